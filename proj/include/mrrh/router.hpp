#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "mrrh/topology.hpp"

namespace mrrh {

struct Packet {
  NodeId source = 0;
  NodeId destination = 0;
  NodePosition destination_position;
};

enum class RouteStatus { Delivered, Stuck, HopLimitExceeded };

struct Hop {
  NodeId from = 0;
  NodeId to = 0;
  int channel = 0;      // smallest open channel exposing the chosen relay
  int channel_max = 0;  // largest such channel (alternate usage convention)
  int phase = 0;        // phase of `from` relative to the destination
  double angle_to_dest = 0.0;  // angle(to, destination) after the hop
};

struct RouteTrace {
  RouteStatus status = RouteStatus::Stuck;
  NodeId source = 0;
  NodeId destination = 0;
  std::vector<Hop> hops;

  std::size_t hop_count() const { return hops.size(); }
};

struct NextHop {
  NodeId node = 0;
  int channel = 0;      // smallest qualifying channel
  int channel_max = 0;  // largest qualifying channel
};

namespace detail {

/// Greedy candidate scan shared by MRRH and NNC routing. Channels
/// [0, k_top] are searched; `respect_levels` disables the level filter for
/// the NNC baseline. Returns the neighbor strictly closest to the target,
/// ties broken by smallest node id.
inline std::optional<NextHop> greedy_next_hop(const HierarchicalNetwork& net,
                                              NodeId current,
                                              const NodePosition& dest,
                                              NodeId dest_id, int k_top,
                                              bool respect_levels) {
  if (current >= net.size() || dest_id >= net.size())
    throw InvalidInput("greedy_next_hop: unknown node id");
  const auto& plan = net.plan();
  const auto& levels = net.levels();
  double current_angle =
      spherical_angle(net.position(current), dest).radians();

  NodeId best = std::numeric_limits<NodeId>::max();
  double best_angle = current_angle;
  bool dest_seen = false;
  // One query over the widest open cap; channel membership of the winner is
  // recovered from its distance afterwards.
  double widest = plan.theta[static_cast<std::size_t>(k_top)];
  double best_dist = 0.0;
  double dest_dist = 0.0;
  const NodePosition& cur_pos = net.position(current);
  net.for_each_in_cap(cur_pos, widest, [&](NodeId j, double dist) {
    if (j == current) return;
    if (respect_levels) {
      // j must have open the smallest channel whose cap reaches it.
      int needed = 0;
      while (dist >= plan.theta[static_cast<std::size_t>(needed)]) ++needed;
      if (levels[j] < needed) return;
    }
    if (j == dest_id) {
      dest_seen = true;
      dest_dist = dist;
      return;
    }
    double ang = spherical_angle(net.position(j), dest).radians();
    if (ang < best_angle || (ang == best_angle && ang < current_angle && j < best)) {
      best_angle = ang;
      best = j;
      best_dist = dist;
    }
  });

  auto channels_for = [&](double dist, NodeId j) {
    int lo = 0;
    while (dist >= plan.theta[static_cast<std::size_t>(lo)]) ++lo;
    int hi = respect_levels ? std::min(k_top, levels[j]) : k_top;
    return std::pair<int, int>(lo, hi);
  };

  if (dest_seen) {
    auto [lo, hi] = channels_for(dest_dist, dest_id);
    return NextHop{dest_id, lo, hi};
  }
  if (best == std::numeric_limits<NodeId>::max()) return std::nullopt;
  auto [lo, hi] = channels_for(best_dist, best);
  return NextHop{best, lo, hi};
}

inline RouteTrace run_route(const HierarchicalNetwork& net, NodeId src, NodeId dst,
                            std::size_t hop_limit, bool nnc) {
  if (src >= net.size() || dst >= net.size())
    throw InvalidInput("route: unknown node id");
  if (hop_limit < 1) throw InvalidConfig("route: hop_limit must be >= 1");
  RouteTrace trace;
  trace.source = src;
  trace.destination = dst;
  if (src == dst) {
    trace.status = RouteStatus::Delivered;
    return trace;
  }
  const NodePosition& dest_pos = net.position(dst);
  NodeId current = src;
  while (true) {
    int k_top = nnc ? 0 : net.level(current);
    auto next = greedy_next_hop(net, current, dest_pos, dst, k_top, !nnc);
    if (!next) {
      trace.status = RouteStatus::Stuck;
      return trace;
    }
    Hop hop;
    hop.from = current;
    hop.to = next->node;
    hop.channel = next->channel;
    hop.channel_max = next->channel_max;
    hop.phase = net.phase_of(current, dest_pos);
    hop.angle_to_dest = spherical_angle(net.position(next->node), dest_pos).radians();
    trace.hops.push_back(hop);
    current = next->node;
    if (current == dst) {
      trace.status = RouteStatus::Delivered;
      return trace;
    }
    if (trace.hops.size() >= hop_limit) {
      trace.status = RouteStatus::HopLimitExceeded;
      return trace;
    }
  }
}

}  // namespace detail

/// One greedy step: direct delivery when the destination is an open-channel
/// neighbor, else the open-channel neighbor strictly closest to the target.
inline std::optional<NextHop> next_hop(const HierarchicalNetwork& net, NodeId current,
                                       const NodePosition& dest, NodeId dest_id) {
  if (current >= net.size() || dest_id >= net.size())
    throw InvalidInput("next_hop: unknown node id");
  return detail::greedy_next_hop(net, current, dest, dest_id, net.level(current),
                                 true);
}

inline RouteTrace route(const HierarchicalNetwork& net, NodeId src, NodeId dst,
                        std::size_t hop_limit) {
  return detail::run_route(net, src, dst, hop_limit, false);
}

/// Baseline: greedy over base-channel caps with every node participating.
inline RouteTrace nnc_route(const HierarchicalNetwork& net, NodeId src, NodeId dst,
                            std::size_t hop_limit) {
  return detail::run_route(net, src, dst, hop_limit, true);
}

struct Workload {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::uint64_t seed = 0;
};

/// Uniform fixed-point-free pairing: a random shuffle split into N/2
/// disjoint (source, destination) pairs.
inline Workload generate_pairing(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidConfig("generate_pairing: need N >= 2");
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  Rng rng = derive_stream(seed, {stream::kPairing, n});
  rng.shuffle(ids);
  Workload w;
  w.seed = seed;
  for (std::size_t t = 0; t + 1 < n; t += 2) w.pairs.emplace_back(ids[t], ids[t + 1]);
  return w;
}

struct WorkloadResult {
  std::vector<RouteTrace> traces;
  std::size_t delivered = 0;
  double mean_hops = 0.0;   // over delivered traces
  std::size_t max_hops = 0;
  // Per-channel usage U^k(i), indexed [channel][node]; a hop increments both
  // endpoints. The two matrices differ in which channel a hop is charged to.
  std::vector<std::vector<std::uint32_t>> usage_smallest;
  std::vector<std::vector<std::uint32_t>> usage_largest;

  double delivered_fraction() const {
    return traces.empty() ? 0.0
                          : static_cast<double>(delivered) /
                                static_cast<double>(traces.size());
  }
};

inline WorkloadResult route_workload(const HierarchicalNetwork& net,
                                     const Workload& workload,
                                     std::size_t hop_limit) {
  WorkloadResult res;
  int channels = net.plan().channel_count + 1;
  res.usage_smallest.assign(channels, std::vector<std::uint32_t>(net.size(), 0));
  res.usage_largest.assign(channels, std::vector<std::uint32_t>(net.size(), 0));
  res.traces.reserve(workload.pairs.size());
  std::size_t hop_sum = 0;
  for (const auto& [src, dst] : workload.pairs) {
    RouteTrace trace = route(net, src, dst, hop_limit);
    for (const Hop& hop : trace.hops) {
      res.usage_smallest[hop.channel][hop.from]++;
      res.usage_smallest[hop.channel][hop.to]++;
      res.usage_largest[hop.channel_max][hop.from]++;
      res.usage_largest[hop.channel_max][hop.to]++;
    }
    if (trace.status == RouteStatus::Delivered) {
      res.delivered++;
      hop_sum += trace.hop_count();
      res.max_hops = std::max(res.max_hops, trace.hop_count());
    }
    res.traces.push_back(std::move(trace));
  }
  if (res.delivered > 0)
    res.mean_hops = static_cast<double>(hop_sum) / static_cast<double>(res.delivered);
  return res;
}

}  // namespace mrrh
