#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrrh/analysis.hpp"
#include "mrrh/phy.hpp"
#include "mrrh/router.hpp"
#include "mrrh/topology.hpp"

namespace mrrh {

inline constexpr const char* kVersion = "0.1.0";

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::vector<std::size_t> n;
  std::optional<double> radius;
  std::optional<double> density;  // nodes/m^2; R = sqrt(N / (4 pi rho))
  std::vector<std::uint64_t> seeds;
  std::size_t pairs = 0;  // 0 means N/2
  double lambda = 1.0;
  double eta0 = 1.0;
  double d = 2.0;
  std::size_t hop_limit = 0;  // 0 means N
  std::string out_json;
  std::string out_csv;
  bool run_nnc = true;
  bool run_phy = true;
  bool run_bounds = true;
  std::string lemma7_channel_convention = "smallest";
  std::size_t verify_links_per_channel = 400;
  std::size_t interference_samples_per_channel = 200;

  void validate() const {
    if (n.empty()) throw InvalidConfig("config: need at least one N");
    if (seeds.empty()) throw InvalidConfig("config: need at least one seed");
    if (radius && density)
      throw InvalidConfig("config: radius and density are mutually exclusive");
    if (radius && !(*radius > 0.0)) throw InvalidConfig("config: radius must be > 0");
    if (density && !(*density > 0.0)) throw InvalidConfig("config: density must be > 0");
    if (!(lambda >= 0.0) || !(eta0 > 0.0) || !(d > 0.0))
      throw InvalidConfig("config: lambda >= 0, eta0 > 0, d > 0 required");
    if (lemma7_channel_convention != "smallest" &&
        lemma7_channel_convention != "largest")
      throw InvalidConfig("config: lemma7_channel_convention must be smallest|largest");
    for (std::size_t nv : n)
      if (nv < 8) throw InvalidConfig("config: every N must be >= 8");
  }

  double radius_for(std::size_t nodes) const {
    if (radius) return *radius;
    double rho = density.value_or(1.0);
    return std::sqrt(static_cast<double>(nodes) / (4.0 * kPi * rho));
  }
};

struct RunRecord {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  int k_channels = 0;
  std::size_t pairs = 0;
  double delivered_frac = 0.0;
  double mean_hops = 0.0;
  std::size_t max_hops = 0;
  double p50_hops = 0.0;
  double p95_hops = 0.0;
  double theorem4_bound = 0.0;  // 2 (log2 N)^3
  double usage_violation_frac = 0.0;          // configured convention
  double usage_violation_frac_smallest = 0.0;
  double usage_violation_frac_largest = 0.0;
  double lemma6_violation_frac = 0.0;
  double lemma5_violation_frac = 0.0;
  double distant_pair_frac = 0.0;
  int tdma_max_slots = 0;
  double tdma_budget = 0.0;  // 6 log2 N + 1
  std::vector<int> tdma_slots;  // per channel
  double interference_violation_frac = 0.0;
  std::size_t interference_samples = 0;
  double rate_violation_frac = 0.0;
  double p_avg_provisioned = 0.0;
  double b_total_provisioned = 0.0;
  double p_lower_bound = 0.0;
  double b_lower_bound = 0.0;
  double p_ratio = 0.0;
  double b_ratio = 0.0;
  double nnc_mean_hops = 0.0;
  double nnc_delivered_frac = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RunRecord> runs;
  std::string version = kVersion;
  double wall_clock_seconds = 0.0;
};

// ---- JSON (de)serialization; canonical form relies on nlohmann's sorted
// keys and shortest round-trip number formatting. ----

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["n"] = c.n;
  if (c.radius) j["radius"] = *c.radius;
  if (c.density) j["density"] = *c.density;
  j["seeds"] = c.seeds;
  j["pairs"] = c.pairs;
  j["lambda"] = c.lambda;
  j["eta0"] = c.eta0;
  j["d"] = c.d;
  j["hop_limit"] = c.hop_limit;
  j["out_json"] = c.out_json;
  j["out_csv"] = c.out_csv;
  j["run_nnc"] = c.run_nnc;
  j["run_phy"] = c.run_phy;
  j["run_bounds"] = c.run_bounds;
  j["lemma7_channel_convention"] = c.lemma7_channel_convention;
  j["verify_links_per_channel"] = c.verify_links_per_channel;
  j["interference_samples_per_channel"] = c.interference_samples_per_channel;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.n = j.at("n").get<std::vector<std::size_t>>();
  if (j.contains("radius")) c.radius = j.at("radius").get<double>();
  if (j.contains("density")) c.density = j.at("density").get<double>();
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.pairs = j.value("pairs", std::size_t{0});
  c.lambda = j.value("lambda", 1.0);
  c.eta0 = j.value("eta0", 1.0);
  c.d = j.value("d", 2.0);
  c.hop_limit = j.value("hop_limit", std::size_t{0});
  c.out_json = j.value("out_json", std::string{});
  c.out_csv = j.value("out_csv", std::string{});
  c.run_nnc = j.value("run_nnc", true);
  c.run_phy = j.value("run_phy", true);
  c.run_bounds = j.value("run_bounds", true);
  c.lemma7_channel_convention =
      j.value("lemma7_channel_convention", std::string{"smallest"});
  c.verify_links_per_channel = j.value("verify_links_per_channel", std::size_t{400});
  c.interference_samples_per_channel =
      j.value("interference_samples_per_channel", std::size_t{200});
  c.validate();
  return c;
}

inline nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["k_channels"] = r.k_channels;
  j["pairs"] = r.pairs;
  j["delivered_frac"] = r.delivered_frac;
  j["mean_hops"] = r.mean_hops;
  j["max_hops"] = r.max_hops;
  j["p50_hops"] = r.p50_hops;
  j["p95_hops"] = r.p95_hops;
  j["theorem4_bound"] = r.theorem4_bound;
  j["usage_violation_frac"] = r.usage_violation_frac;
  j["usage_violation_frac_smallest"] = r.usage_violation_frac_smallest;
  j["usage_violation_frac_largest"] = r.usage_violation_frac_largest;
  j["lemma6_violation_frac"] = r.lemma6_violation_frac;
  j["lemma5_violation_frac"] = r.lemma5_violation_frac;
  j["distant_pair_frac"] = r.distant_pair_frac;
  j["tdma_max_slots"] = r.tdma_max_slots;
  j["tdma_budget"] = r.tdma_budget;
  j["tdma_slots"] = r.tdma_slots;
  j["interference_violation_frac"] = r.interference_violation_frac;
  j["interference_samples"] = r.interference_samples;
  j["rate_violation_frac"] = r.rate_violation_frac;
  j["p_avg_provisioned"] = r.p_avg_provisioned;
  j["b_total_provisioned"] = r.b_total_provisioned;
  j["p_lower_bound"] = r.p_lower_bound;
  j["b_lower_bound"] = r.b_lower_bound;
  j["p_ratio"] = r.p_ratio;
  j["b_ratio"] = r.b_ratio;
  j["nnc_mean_hops"] = r.nnc_mean_hops;
  j["nnc_delivered_frac"] = r.nnc_delivered_frac;
  return j;
}

inline nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["config"] = to_json(report.config);
  nlohmann::json runs = nlohmann::json::array();
  for (const RunRecord& r : report.runs) runs.push_back(to_json(r));
  j["runs"] = runs;
  j["version"] = report.version;
  j["wall_clock_seconds"] = report.wall_clock_seconds;
  return j;
}

/// The closed-form interference ceiling 6 P_k (8 pi R sqrt(2^k log2 N / N))^-d.
inline double interference_bound(double p_k, int k, std::size_t n, double radius,
                                 double d) {
  double log_n = std::log2(static_cast<double>(n));
  double dist = 8.0 * kPi * radius *
                std::sqrt(std::ldexp(log_n, k) / static_cast<double>(n));
  return 6.0 * p_k * std::pow(dist, -d);
}

/// Executes one (N, seed) cell of the experiment grid.
inline RunRecord run_single(const ExperimentConfig& cfg, std::size_t n,
                            std::uint64_t seed) {
  RunRecord rec;
  rec.n = n;
  rec.seed = seed;

  NetworkConfig net_cfg;
  net_cfg.node_count = n;
  net_cfg.radius = cfg.radius_for(n);
  net_cfg.seed = seed;
  net_cfg.hop_limit = cfg.hop_limit;
  HierarchicalNetwork net = build_network(net_cfg);
  rec.k_channels = net.plan().channel_count;

  Workload workload = generate_pairing(n, seed);
  if (cfg.pairs > 0 && cfg.pairs < workload.pairs.size())
    workload.pairs.resize(cfg.pairs);
  rec.pairs = workload.pairs.size();

  WorkloadResult result = route_workload(net, workload, net_cfg.effective_hop_limit());
  LatencyStats stats = latency_stats(result);
  double log_n = std::log2(static_cast<double>(n));
  rec.delivered_frac = stats.delivered_fraction;
  rec.mean_hops = stats.mean;
  rec.max_hops = stats.max;
  rec.p50_hops = stats.p50;
  rec.p95_hops = stats.p95;
  rec.theorem4_bound = 2.0 * log_n * log_n * log_n;

  UsageReport usage_small = usage_check(result.usage_smallest, n);
  UsageReport usage_large = usage_check(result.usage_largest, n);
  rec.usage_violation_frac_smallest = usage_small.violation_fraction;
  rec.usage_violation_frac_largest = usage_large.violation_fraction;
  rec.usage_violation_frac = cfg.lemma7_channel_convention == "largest"
                                 ? rec.usage_violation_frac_largest
                                 : rec.usage_violation_frac_smallest;

  ChannelDisciplineReport discipline = channel_discipline(net, result.traces);
  rec.lemma6_violation_frac = discipline.monotonicity_violation_fraction;
  rec.lemma5_violation_frac = discipline.exit_violation_fraction;
  rec.distant_pair_frac = distant_pair_fraction(net, workload);

  if (cfg.run_nnc) {
    std::size_t delivered = 0, hop_sum = 0;
    for (const auto& [src, dst] : workload.pairs) {
      RouteTrace t = nnc_route(net, src, dst, net_cfg.effective_hop_limit());
      if (t.status == RouteStatus::Delivered) {
        delivered++;
        hop_sum += t.hop_count();
      }
    }
    rec.nnc_delivered_frac = workload.pairs.empty()
                                 ? 0.0
                                 : static_cast<double>(delivered) /
                                       static_cast<double>(workload.pairs.size());
    if (delivered > 0)
      rec.nnc_mean_hops =
          static_cast<double>(hop_sum) / static_cast<double>(delivered);
  }

  PhyConfig phy;
  phy.eta0 = cfg.eta0;
  phy.lambda = cfg.lambda;
  phy.d = cfg.d;
  PhyProvision prov;
  if (cfg.run_phy || cfg.run_bounds) prov = provision(net, phy);

  if (cfg.run_phy) {
    rec.p_avg_provisioned = prov.p_avg;
    rec.b_total_provisioned = prov.b_total;
    rec.tdma_budget = 6.0 * log_n + 1.0;
    std::vector<TdmaSchedule> schedules;
    for (int k = 0; k <= net.plan().channel_count; ++k) {
      schedules.push_back(tdma_schedule(net, k));
      rec.tdma_slots.push_back(schedules.back().slot_count);
      rec.tdma_max_slots = std::max(rec.tdma_max_slots, schedules.back().slot_count);
    }
    // Interference samples: random open-channel receiver, random foreign slot.
    std::size_t bad = 0, total = 0;
    for (int k = 0; k <= net.plan().channel_count; ++k) {
      const TdmaSchedule& sched = schedules[static_cast<std::size_t>(k)];
      if (sched.members.size() < 2 || sched.slot_count < 2) continue;
      double p_k = prov.power[static_cast<std::size_t>(k)];
      double bound = interference_bound(p_k, k, n, net_cfg.radius, cfg.d);
      Rng rng = derive_stream(seed, {stream::kInterferenceSampling, n,
                                     static_cast<std::uint64_t>(k)});
      for (std::size_t s = 0; s < cfg.interference_samples_per_channel; ++s) {
        NodeId receiver = sched.members[rng.below(sched.members.size())];
        int slot = static_cast<int>(rng.below(static_cast<std::uint64_t>(sched.slot_count)));
        if (slot == sched.slot[receiver]) continue;
        double interf = interference_at(net, sched, receiver, slot, p_k, cfg.d);
        total++;
        if (interf > bound) bad++;
      }
    }
    rec.interference_samples = total;
    if (total > 0)
      rec.interference_violation_frac =
          static_cast<double>(bad) / static_cast<double>(total);

    RateSufficiencyReport rate_report =
        verify_rate_sufficiency(net, prov, schedules, phy, 1.0,
                                cfg.verify_links_per_channel, seed);
    rec.rate_violation_frac = rate_report.violation_fraction;
  }

  if (cfg.run_bounds) {
    BoundInputs inp;
    inp.lambda = cfg.lambda;
    inp.n = n;
    inp.k_channels = net.plan().channel_count;
    inp.radius = net_cfg.radius;
    inp.eta0 = cfg.eta0;
    inp.d = cfg.d;
    OptimalityReport opt = optimality_ratios(prov, stats, inp);
    rec.p_lower_bound = opt.p_lower_bound;
    rec.b_lower_bound = opt.b_lower_bound;
    rec.p_ratio = opt.p_ratio;
    rec.b_ratio = opt.b_ratio;
  }
  return rec;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = cfg;
  for (std::size_t n : cfg.n)
    for (std::uint64_t seed : cfg.seeds) report.runs.push_back(run_single(cfg, n, seed));
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---- Emission ----

inline std::string format_number(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "n", "seed", "k_channels", "pairs", "delivered_frac", "mean_hops",
      "max_hops", "p95_hops", "theorem4_bound", "usage_violation_frac",
      "tdma_max_slots", "tdma_budget", "interference_violation_frac",
      "p_avg_provisioned", "b_total_provisioned", "p_lower_bound",
      "b_lower_bound", "p_ratio", "b_ratio", "nnc_mean_hops"};
  return cols;
}

inline std::string to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  for (const RunRecord& r : report.runs) {
    out << r.n << ',' << r.seed << ',' << r.k_channels << ',' << r.pairs << ','
        << format_number(r.delivered_frac) << ',' << format_number(r.mean_hops)
        << ',' << r.max_hops << ',' << format_number(r.p95_hops) << ','
        << format_number(r.theorem4_bound) << ','
        << format_number(r.usage_violation_frac) << ',' << r.tdma_max_slots << ','
        << format_number(r.tdma_budget) << ','
        << format_number(r.interference_violation_frac) << ','
        << format_number(r.p_avg_provisioned) << ','
        << format_number(r.b_total_provisioned) << ','
        << format_number(r.p_lower_bound) << ','
        << format_number(r.b_lower_bound) << ',' << format_number(r.p_ratio) << ','
        << format_number(r.b_ratio) << ',' << format_number(r.nnc_mean_hops)
        << '\n';
  }
  return out.str();
}

inline void emit_json(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("emit_json: cannot write " + path);
  out << to_json(report).dump(2) << '\n';
  if (!out) throw FileError("emit_json: write failed for " + path);
}

inline void emit_csv(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("emit_csv: cannot write " + path);
  out << to_csv(report);
  if (!out) throw FileError("emit_csv: write failed for " + path);
}

}  // namespace mrrh
