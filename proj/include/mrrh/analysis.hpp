#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mrrh/phy.hpp"
#include "mrrh/router.hpp"

namespace mrrh {

struct BoundInputs {
  double lambda = 1.0;  // bits/s
  double latency = 1.0; // average network latency, hops
  std::size_t n = 0;
  int k_channels = 1;
  double radius = 1.0;  // m
  double eta0 = 1.0;    // W/Hz
  double d = 2.0;

  void validate() const {
    if (!(lambda >= 0.0 && latency >= 1.0 && n > 0 && k_channels >= 1 &&
          radius > 0.0 && eta0 > 0.0 && d > 0.0))
      throw InvalidConfig("BoundInputs: all fields must be positive, L >= 1");
  }
};

/// Average-power floor for any scheme with throughput lambda and latency L:
/// eta0 lambda / (16 gamma(R / 4L) ln 2), with gamma(D) = min(1, D^-d).
inline double power_lower_bound(const BoundInputs& inp) {
  inp.validate();
  double gamma = loss_of_distance(inp.radius / (4.0 * inp.latency), inp.d);
  return inp.eta0 * inp.lambda / (16.0 * gamma * 0.6931471805599453);
}

/// The constant-density specialization of the same bound, reported as a
/// labeled secondary quantity: lambda / (rho eta0 48 4pi) * N / L^2.
inline double power_lower_bound_constant_density(const BoundInputs& inp,
                                                 double rho) {
  inp.validate();
  if (!(rho > 0.0)) throw InvalidConfig("power bound: rho must be > 0");
  return inp.lambda / (rho * inp.eta0 * 48.0 * 4.0 * kPi) *
         static_cast<double>(inp.n) / (inp.latency * inp.latency);
}

/// Total-bandwidth floor: gamma(2 pi R) / gamma(R / 4L) * N lambda / (16 K eta0).
inline double bandwidth_lower_bound(const BoundInputs& inp) {
  inp.validate();
  double ratio = loss_of_distance(2.0 * kPi * inp.radius, inp.d) /
                 loss_of_distance(inp.radius / (4.0 * inp.latency), inp.d);
  return ratio * static_cast<double>(inp.n) * inp.lambda /
         (16.0 * static_cast<double>(inp.k_channels) * inp.eta0);
}

/// Fraction of workload pairs at geodesic distance >= R/4 (angle >= 1/4 rad).
inline double distant_pair_fraction(const HierarchicalNetwork& net,
                                    const Workload& workload) {
  if (workload.pairs.empty()) return 0.0;
  std::size_t far = 0;
  for (const auto& [src, dst] : workload.pairs) {
    double ang = spherical_angle(net.position(src), net.position(dst)).radians();
    if (ang >= 0.25) far++;
  }
  return static_cast<double>(far) / static_cast<double>(workload.pairs.size());
}

struct LatencyStats {
  double mean = 0.0;  // over delivered traces only
  std::size_t max = 0;
  double p50 = 0.0;
  double p95 = 0.0;
  double delivered_fraction = 0.0;
  std::size_t delivered = 0;
  std::size_t undelivered = 0;
};

inline LatencyStats latency_stats(const WorkloadResult& result) {
  if (result.traces.empty()) throw InvalidInput("latency_stats: empty result");
  LatencyStats stats;
  std::vector<std::size_t> hops;
  for (const RouteTrace& trace : result.traces) {
    if (trace.status == RouteStatus::Delivered)
      hops.push_back(trace.hop_count());
    else
      stats.undelivered++;
  }
  stats.delivered = hops.size();
  stats.delivered_fraction = static_cast<double>(stats.delivered) /
                             static_cast<double>(result.traces.size());
  if (hops.empty()) return stats;
  std::sort(hops.begin(), hops.end());
  std::size_t sum = 0;
  for (std::size_t h : hops) sum += h;
  stats.mean = static_cast<double>(sum) / static_cast<double>(hops.size());
  stats.max = hops.back();
  auto quantile = [&](double q) {
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(hops.size()))) ;
    if (idx > 0) --idx;
    return static_cast<double>(hops[idx]);
  };
  stats.p50 = quantile(0.50);
  stats.p95 = quantile(0.95);
  return stats;
}

struct UsageReport {
  std::size_t cells = 0;          // (node, channel) cells
  std::size_t violations = 0;     // U^k(i) strictly above 2^(k+2) log2 N
  double violation_fraction = 0.0;
};

/// Checks per-cell usage against the 2^(k+2) log2 N ceiling. A cell at
/// exactly the bound does not count as a violation.
inline UsageReport usage_check(
    const std::vector<std::vector<std::uint32_t>>& usage, std::size_t n) {
  UsageReport report;
  double log_n = std::log2(static_cast<double>(n));
  for (std::size_t k = 0; k < usage.size(); ++k) {
    double bound = std::ldexp(log_n, static_cast<int>(k) + 2);
    for (std::uint32_t u : usage[k]) {
      report.cells++;
      if (static_cast<double>(u) > bound) report.violations++;
    }
  }
  if (report.cells > 0)
    report.violation_fraction = static_cast<double>(report.violations) /
                                static_cast<double>(report.cells);
  return report;
}

struct ChannelDisciplineReport {
  std::size_t transitions = 0;
  std::size_t monotonicity_violations = 0;  // channel drop while target not reachable
  double monotonicity_violation_fraction = 0.0;
  std::size_t traces = 0;
  std::size_t exit_violations = 0;  // > 2 log2 N consecutive same-channel hops
  double exit_violation_fraction = 0.0;
};

/// Empirical channel-monotonicity and channel-exit checks over a set of
/// traces.
inline ChannelDisciplineReport channel_discipline(
    const HierarchicalNetwork& net, const std::vector<RouteTrace>& traces) {
  ChannelDisciplineReport report;
  double exit_budget = 2.0 * std::log2(static_cast<double>(net.size()));
  const ChannelPlan& plan = net.plan();
  for (const RouteTrace& trace : traces) {
    report.traces++;
    const NodePosition& dest = net.position(trace.destination);
    bool trace_exit_violation = false;
    std::size_t run_length = 1;
    for (std::size_t t = 0; t + 1 < trace.hops.size(); ++t) {
      const Hop& cur = trace.hops[t];
      const Hop& nxt = trace.hops[t + 1];
      report.transitions++;
      if (nxt.channel < cur.channel) {
        // Allowed only when the destination already lies inside the channel-k
        // cap of the relay that received the packet on channel k. The target
        // itself is exempt from the channel-open rule: final delivery happens
        // on whatever channel the target has open.
        double ang =
            spherical_angle(net.position(cur.to), dest).radians();
        if (!(ang < plan.theta[static_cast<std::size_t>(cur.channel)]))
          report.monotonicity_violations++;
      }
      // Channel-exit: long same-channel runs while the phase is still above
      // the channel index.
      if (nxt.channel == cur.channel)
        run_length++;
      else
        run_length = 1;
      if (static_cast<double>(run_length) > exit_budget &&
          nxt.phase > nxt.channel)
        trace_exit_violation = true;
    }
    if (trace_exit_violation) report.exit_violations++;
  }
  if (report.transitions > 0)
    report.monotonicity_violation_fraction =
        static_cast<double>(report.monotonicity_violations) /
        static_cast<double>(report.transitions);
  if (report.traces > 0)
    report.exit_violation_fraction = static_cast<double>(report.exit_violations) /
                                     static_cast<double>(report.traces);
  return report;
}

struct OptimalityReport {
  double p_avg = 0.0;
  double b_total = 0.0;
  double p_lower_bound = 0.0;
  double b_lower_bound = 0.0;
  double p_ratio = 0.0;
  double b_ratio = 0.0;
  double latency_used = 0.0;
};

inline OptimalityReport optimality_ratios(const PhyProvision& prov,
                                          const LatencyStats& stats,
                                          BoundInputs inp) {
  inp.latency = std::max(1.0, stats.mean);
  OptimalityReport report;
  report.p_avg = prov.p_avg;
  report.b_total = prov.b_total;
  report.p_lower_bound = power_lower_bound(inp);
  report.b_lower_bound = bandwidth_lower_bound(inp);
  report.p_ratio = report.p_avg / report.p_lower_bound;
  report.b_ratio = report.b_total / report.b_lower_bound;
  report.latency_used = inp.latency;
  return report;
}

/// Least-squares slope of log2(y) against log2(x).
inline double log_log_slope(const std::vector<double>& x,
                            const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidInput("log_log_slope: need >= 2 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log2(x[i]);
    double ly = std::log2(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mrrh
