#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mrrh/router.hpp"
#include "mrrh/topology.hpp"

namespace mrrh {

struct PhyConfig {
  double eta0 = 1.0;    // noise power spectral density, W/Hz
  double lambda = 1.0;  // per-node throughput, bits/s
  double d = 2.0;       // path-loss exponent
  // The bit-rate requirement is taken from the proof (24 lambda 2^k log N);
  // setting this multiplies in the statement's extra log N factor.
  bool rate_extra_log_factor = false;

  void validate() const {
    if (!(eta0 > 0.0)) throw InvalidConfig("PhyConfig: eta0 must be > 0");
    if (lambda < 0.0) throw InvalidConfig("PhyConfig: lambda must be >= 0");
    if (!(d > 0.0)) throw InvalidConfig("PhyConfig: d must be > 0");
  }
};

/// Shannon rate of an AWGN channel: B log2(1 + P g / (B eta0 + I)).
inline double awgn_rate(double power, double gain, double bandwidth, double eta0,
                        double interference) {
  if (!(bandwidth > 0.0)) throw InvalidConfig("awgn_rate: bandwidth must be > 0");
  if (!(eta0 > 0.0)) throw InvalidConfig("awgn_rate: eta0 must be > 0");
  return bandwidth * std::log2(1.0 + power * gain / (bandwidth * eta0 + interference));
}

/// Infinite-bandwidth limit of awgn_rate: P g / (eta0 ln 2). awgn_rate
/// increases towards this value as B grows and never exceeds it.
inline double rate_power_limit(double power, double gain, double eta0) {
  return power * gain / (eta0 * 0.6931471805599453);
}

/// Per-channel rate needed to carry a throughput of lambda: 24 lambda 2^k log2 N.
inline double required_channel_rate(double lambda, int k, std::size_t n,
                                    bool extra_log_factor = false) {
  double log_n = std::log2(static_cast<double>(n));
  double rate = 24.0 * lambda * std::ldexp(log_n, k);
  return extra_log_factor ? rate * log_n : rate;
}

/// Transmit power for channel k: lambda eta0 ln2 (2 pi R)^d 2^k theta_k^d log2^2 N.
inline double channel_power(double lambda, int k, const ChannelPlan& plan,
                            double radius, double d, double eta0, std::size_t n) {
  double log_n = std::log2(static_cast<double>(n));
  double theta = plan.theta.at(static_cast<std::size_t>(k));
  return lambda * eta0 * 0.6931471805599453 * std::pow(2.0 * kPi * radius, d) *
         std::ldexp(std::pow(theta, d), k) * log_n * log_n;
}

/// Interference-masking bandwidth: 6 P_k N^(d/2) (8 pi)^-d (2^k log2 N)^(-d/2).
inline double channel_bandwidth(double p_k, int k, std::size_t n, double d,
                                double eta0) {
  if (!(eta0 > 0.0)) throw InvalidConfig("channel_bandwidth: eta0 must be > 0");
  double log_n = std::log2(static_cast<double>(n));
  return 6.0 * p_k * std::pow(static_cast<double>(n), d / 2.0) *
         std::pow(8.0 * kPi, -d) * std::pow(std::ldexp(log_n, k), -d / 2.0);
}

struct PhyProvision {
  std::vector<double> power;           // P_k, W
  std::vector<double> bandwidth;       // B_k, Hz
  std::vector<double> required_rate;   // R^k, bits/s
  double p_avg = 0.0;                  // occupancy-weighted total, W
  double b_total = 0.0;                // sum of B_k, Hz
};

inline PhyProvision provision(const HierarchicalNetwork& net, const PhyConfig& phy) {
  phy.validate();
  PhyProvision prov;
  const ChannelPlan& plan = net.plan();
  std::size_t n = net.size();
  double r = net.config().radius;
  for (int k = 0; k <= plan.channel_count; ++k) {
    double p_k = channel_power(phy.lambda, k, plan, r, phy.d, phy.eta0, n);
    double b_k = channel_bandwidth(p_k, k, n, phy.d, phy.eta0);
    prov.power.push_back(p_k);
    prov.bandwidth.push_back(b_k);
    prov.required_rate.push_back(
        required_channel_rate(phy.lambda, k, n, phy.rate_extra_log_factor));
    prov.p_avg += std::ldexp(p_k, -k);  // Pr{channel k open} <= 2^-k
    prov.b_total += b_k;
  }
  return prov;
}

struct TdmaSchedule {
  int channel = 0;
  int slot_count = 0;
  std::vector<NodeId> members;  // nodes with the channel open, ascending id
  std::vector<int> slot;        // indexed by node id; -1 when channel closed
};

/// Greedy coloring of the channel-k conflict graph (open-channel nodes,
/// edges between pairs within theta_k). Descending conflict degree, ties by
/// node id.
inline TdmaSchedule tdma_schedule(const HierarchicalNetwork& net, int k) {
  if (k < 0 || k > net.plan().channel_count)
    throw InvalidInput("tdma_schedule: channel out of range");
  TdmaSchedule sched;
  sched.channel = k;
  sched.slot.assign(net.size(), -1);
  double theta = net.plan().theta[static_cast<std::size_t>(k)];
  for (NodeId i = 0; i < net.size(); ++i)
    if (net.level(i) >= k) sched.members.push_back(i);

  std::vector<std::vector<NodeId>> adj(sched.members.size());
  std::vector<std::uint32_t> index_of(net.size(), 0);
  for (std::size_t m = 0; m < sched.members.size(); ++m)
    index_of[sched.members[m]] = static_cast<std::uint32_t>(m);
  for (std::size_t m = 0; m < sched.members.size(); ++m) {
    NodeId i = sched.members[m];
    net.for_each_in_cap(net.position(i), theta, [&](NodeId j, double) {
      if (j != i && net.level(j) >= k) adj[m].push_back(index_of[j]);
    });
  }

  std::vector<std::uint32_t> order(sched.members.size());
  for (std::uint32_t m = 0; m < order.size(); ++m) order[m] = m;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (adj[a].size() != adj[b].size()) return adj[a].size() > adj[b].size();
    return sched.members[a] < sched.members[b];
  });

  std::vector<int> color(sched.members.size(), -1);
  std::vector<char> taken;
  for (std::uint32_t m : order) {
    taken.assign(color.size() + 1, 0);
    for (std::uint32_t nb : adj[m])
      if (color[nb] >= 0) taken[static_cast<std::size_t>(color[nb])] = 1;
    int c = 0;
    while (taken[static_cast<std::size_t>(c)]) ++c;
    color[m] = c;
    sched.slot_count = std::max(sched.slot_count, c + 1);
  }
  for (std::size_t m = 0; m < sched.members.size(); ++m)
    sched.slot[sched.members[m]] = color[m];
  return sched;
}

/// Exact sum of P_k * loss over every member transmitting in `slot`, excluding
/// the nodes in `exclude` (and the receiver itself).
inline double interference_at(const HierarchicalNetwork& net,
                              const TdmaSchedule& schedule, NodeId receiver,
                              int slot, double p_k, double d,
                              NodeId exclude = std::numeric_limits<NodeId>::max()) {
  if (receiver >= net.size()) throw InvalidInput("interference_at: unknown node");
  double total = 0.0;
  for (NodeId u : schedule.members) {
    if (u == receiver || u == exclude) continue;
    if (schedule.slot[u] != slot) continue;
    total += p_k * path_loss(spherical_angle(net.position(u), net.position(receiver)),
                             d, net.config().radius);
  }
  return total;
}

struct RateSufficiencyReport {
  std::size_t links_checked = 0;
  std::size_t power_limit_violations = 0;   // awgn < rate_power_limit / 4
  std::size_t required_rate_violations = 0; // awgn < R^k / slot_count
  std::size_t violations = 0;               // either clause
  double violation_fraction = 0.0;
  // Scales every B_k for sensitivity experiments (1.0 = as provisioned).
  double bandwidth_scale = 1.0;
};

/// Checks every (or a sampled subset of) scheduled link (i, j, k): the AWGN
/// rate under measured same-slot interference must stay within a factor 4 of
/// the infinite-bandwidth rate and cover the TDMA share of R^k.
inline RateSufficiencyReport verify_rate_sufficiency(
    const HierarchicalNetwork& net, const PhyProvision& prov,
    const std::vector<TdmaSchedule>& schedules, const PhyConfig& phy,
    double bandwidth_scale = 1.0, std::size_t max_links_per_channel = 0,
    std::uint64_t sample_seed = 0) {
  phy.validate();
  RateSufficiencyReport report;
  report.bandwidth_scale = bandwidth_scale;
  for (const TdmaSchedule& sched : schedules) {
    int k = sched.channel;
    double p_k = prov.power.at(static_cast<std::size_t>(k));
    double b_k = prov.bandwidth.at(static_cast<std::size_t>(k)) * bandwidth_scale;
    if (!(b_k > 0.0) || sched.slot_count == 0) continue;
    double share = prov.required_rate.at(static_cast<std::size_t>(k)) /
                   static_cast<double>(sched.slot_count);
    std::vector<std::vector<NodeId>> by_slot(
        static_cast<std::size_t>(sched.slot_count));
    for (NodeId u : sched.members)
      by_slot[static_cast<std::size_t>(sched.slot[u])].push_back(u);
    std::vector<std::pair<NodeId, NodeId>> links;
    for (NodeId i : sched.members)
      for (NodeId j : net.neighbors(i, k)) links.emplace_back(i, j);
    if (max_links_per_channel > 0 && links.size() > max_links_per_channel) {
      Rng rng = derive_stream(sample_seed, {stream::kVerifySampling,
                                            static_cast<std::uint64_t>(k)});
      std::vector<std::pair<NodeId, NodeId>> sampled;
      sampled.reserve(max_links_per_channel);
      for (std::size_t t = 0; t < max_links_per_channel; ++t)
        sampled.push_back(links[rng.below(links.size())]);
      links.swap(sampled);
    }
    for (const auto& [i, j] : links) {
      double gain = path_loss(spherical_angle(net.position(i), net.position(j)),
                              phy.d, net.config().radius);
      double interf = 0.0;
      for (NodeId u : by_slot[static_cast<std::size_t>(sched.slot[i])]) {
        if (u == i || u == j) continue;
        interf += p_k * path_loss(spherical_angle(net.position(u), net.position(j)),
                                  phy.d, net.config().radius);
      }
      double rate = awgn_rate(p_k, gain, b_k, phy.eta0, interf);
      bool bad_power = rate < rate_power_limit(p_k, gain, phy.eta0) / 4.0;
      bool bad_required = rate < share;
      report.links_checked++;
      if (bad_power) report.power_limit_violations++;
      if (bad_required) report.required_rate_violations++;
      if (bad_power || bad_required) report.violations++;
    }
  }
  if (report.links_checked > 0)
    report.violation_fraction = static_cast<double>(report.violations) /
                                static_cast<double>(report.links_checked);
  return report;
}

/// Time-averaged power: N^-1 sum_i sum_k duty[i][k] P_k.
inline double measured_average_power(const PhyProvision& prov,
                                     const std::vector<std::vector<double>>& duty) {
  double total = 0.0;
  for (const auto& row : duty) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] < 0.0 || row[k] > 1.0)
        throw InvalidInput("measured_average_power: duty outside [0, 1]");
      total += row[k] * prov.power.at(k);
    }
  }
  return duty.empty() ? 0.0 : total / static_cast<double>(duty.size());
}

/// Duty matrix from the participation policy: indicator that channel k is
/// open, optionally divided by the channel's slot count.
inline std::vector<std::vector<double>> occupancy_duty(
    const HierarchicalNetwork& net,
    const std::vector<TdmaSchedule>* schedules = nullptr) {
  std::size_t channels = static_cast<std::size_t>(net.plan().channel_count) + 1;
  std::vector<std::vector<double>> duty(net.size(),
                                        std::vector<double>(channels, 0.0));
  for (NodeId i = 0; i < net.size(); ++i)
    for (std::size_t k = 0; k <= static_cast<std::size_t>(net.level(i)); ++k) {
      double share = 1.0;
      if (schedules != nullptr) {
        int slots = (*schedules).at(k).slot_count;
        share = slots > 0 ? 1.0 / static_cast<double>(slots) : 0.0;
      }
      duty[i][k] = share;
    }
  return duty;
}

}  // namespace mrrh
