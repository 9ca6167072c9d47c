// Command-line front end: single runs, parameter sweeps, and standalone
// bound calculators. Exit codes: 0 success, 1 configuration error, 2 runtime
// failure.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrrh/harness.hpp"

namespace {

using namespace mrrh;

// Accepts "1,2,3" and "1..5" (inclusive range) seed notations.
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    auto dots = token.find("..");
    if (dots != std::string::npos) {
      std::uint64_t lo = std::stoull(token.substr(0, dots));
      std::uint64_t hi = std::stoull(token.substr(dots + 2));
      if (hi < lo) throw InvalidConfig("seed range is reversed: " + token);
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else if (!token.empty()) {
      seeds.push_back(std::stoull(token));
    }
  }
  if (seeds.empty()) throw InvalidConfig("no seeds in: " + text);
  return seeds;
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ','))
    if (!token.empty()) out.push_back(std::stoull(token));
  if (out.empty()) throw InvalidConfig("no sizes in: " + text);
  return out;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot read config file: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

void emit_report(const ExperimentReport& report, const ExperimentConfig& cfg) {
  if (!cfg.out_json.empty()) {
    emit_json(report, cfg.out_json);
    std::printf("wrote %s\n", cfg.out_json.c_str());
  }
  if (!cfg.out_csv.empty()) {
    emit_csv(report, cfg.out_csv);
    std::printf("wrote %s\n", cfg.out_csv.c_str());
  }
  if (cfg.out_json.empty() && cfg.out_csv.empty())
    std::cout << to_csv(report);
  std::printf("%zu runs in %.1f s\n", report.runs.size(),
              report.wall_clock_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MRRH wireless routing simulator"};
  app.require_subcommand(1);

  // ---- run ----
  auto* run_cmd = app.add_subcommand("run", "simulate one or more (N, seed) cells");
  std::string config_path, seeds_text = "1", out_json, out_csv;
  std::size_t run_n = 1024, pairs = 0, hop_limit = 0;
  double lambda = 1.0, eta0 = 1.0, d = 2.0;
  std::optional<double> radius, density;
  std::string convention = "smallest";
  run_cmd->add_option("--config", config_path, "JSON config file; other flags ignored");
  run_cmd->add_option("--n", run_n, "node count");
  run_cmd->add_option("--seed,--seeds", seeds_text, "seed list, e.g. 42 or 1..5");
  run_cmd->add_option("--pairs", pairs, "workload pairs (0 = N/2)");
  run_cmd->add_option("--lambda", lambda, "per-node throughput, bits/s");
  run_cmd->add_option("--eta0", eta0, "noise spectral density, W/Hz");
  run_cmd->add_option("--d", d, "path-loss exponent");
  run_cmd->add_option("--radius", radius, "sphere radius, m");
  run_cmd->add_option("--density", density, "node density, nodes/m^2");
  run_cmd->add_option("--hop-limit", hop_limit, "trace hop limit (0 = N)");
  run_cmd->add_option("--usage-convention", convention,
                      "channel charged per hop: smallest|largest");
  run_cmd->add_option("--out", out_json, "JSON report path");
  run_cmd->add_option("--csv", out_csv, "CSV report path");

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand("sweep", "simulate a grid of N x seeds");
  std::string sweep_n_text = "512,1024,2048,4096,8192";
  sweep_cmd->add_option("--config", config_path, "JSON config file; other flags ignored");
  sweep_cmd->add_option("--n", sweep_n_text, "comma-separated node counts");
  sweep_cmd->add_option("--seeds", seeds_text, "seed list, e.g. 1..5");
  sweep_cmd->add_option("--pairs", pairs, "workload pairs (0 = N/2)");
  sweep_cmd->add_option("--lambda", lambda, "per-node throughput, bits/s");
  sweep_cmd->add_option("--eta0", eta0, "noise spectral density, W/Hz");
  sweep_cmd->add_option("--d", d, "path-loss exponent");
  sweep_cmd->add_option("--radius", radius, "sphere radius, m");
  sweep_cmd->add_option("--density", density, "node density, nodes/m^2");
  sweep_cmd->add_option("--hop-limit", hop_limit, "trace hop limit (0 = N)");
  sweep_cmd->add_option("--usage-convention", convention,
                        "channel charged per hop: smallest|largest");
  sweep_cmd->add_option("--out", out_json, "JSON report path");
  sweep_cmd->add_option("--csv", out_csv, "CSV report path");

  // ---- bounds ----
  auto* bounds_cmd = app.add_subcommand("bounds", "print power/bandwidth floors");
  std::size_t bounds_n = 1024;
  double latency = 1.0;
  int k_channels = 0;
  bounds_cmd->add_option("--n", bounds_n, "node count")->required();
  bounds_cmd->add_option("--latency", latency, "average latency, hops")->required();
  bounds_cmd->add_option("--lambda", lambda, "per-node throughput, bits/s");
  bounds_cmd->add_option("--eta0", eta0, "noise spectral density, W/Hz");
  bounds_cmd->add_option("--d", d, "path-loss exponent");
  bounds_cmd->add_option("--radius", radius, "sphere radius, m");
  bounds_cmd->add_option("--density", density, "node density, nodes/m^2");
  bounds_cmd->add_option("--k", k_channels, "channel count (0 = derive from N)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (bounds_cmd->parsed()) {
      BoundInputs inp;
      inp.lambda = lambda;
      inp.latency = latency;
      inp.n = bounds_n;
      inp.k_channels = k_channels > 0 ? k_channels
                                      : derive_channel_count(bounds_n);
      inp.eta0 = eta0;
      inp.d = d;
      ExperimentConfig geom;
      geom.radius = radius;
      geom.density = density;
      inp.radius = geom.radius_for(bounds_n);
      std::printf("n %zu\nk_channels %d\nradius %s\nlatency %s\n", inp.n,
                  inp.k_channels, format_number(inp.radius).c_str(),
                  format_number(inp.latency).c_str());
      std::printf("p_lower_bound %s\n",
                  format_number(power_lower_bound(inp)).c_str());
      std::printf("b_lower_bound %s\n",
                  format_number(bandwidth_lower_bound(inp)).c_str());
      return 0;
    }

    ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config_file(config_path);
    } else {
      cfg.n = run_cmd->parsed() ? std::vector<std::size_t>{run_n}
                                : parse_n_list(sweep_n_text);
      cfg.seeds = parse_seed_list(seeds_text);
      cfg.pairs = pairs;
      cfg.lambda = lambda;
      cfg.eta0 = eta0;
      cfg.d = d;
      cfg.radius = radius;
      cfg.density = density;
      cfg.hop_limit = hop_limit;
      cfg.lemma7_channel_convention = convention;
      cfg.out_json = out_json;
      cfg.out_csv = out_csv;
      cfg.validate();
    }
    emit_report(run_experiment(cfg), cfg);
    return 0;
  } catch (const InvalidConfig& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
