#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mrrh/geometry.hpp"
#include "mrrh/rng.hpp"

namespace mrrh {

using NodeId = std::uint32_t;

struct ClosedChannel : std::logic_error {
  using std::logic_error::logic_error;
};

struct NetworkConfig {
  std::size_t node_count = 0;
  double radius = 1.0;     // meters
  std::uint64_t seed = 0;
  std::size_t hop_limit = 0;  // 0 means default (node_count)

  std::size_t effective_hop_limit() const {
    return hop_limit == 0 ? node_count : hop_limit;
  }
};

/// K = max(1, floor(log2 N - 2 log2 log2 N)). Requires N >= 8.
inline int derive_channel_count(std::size_t n) {
  if (n < 8) throw InvalidConfig("derive_channel_count: need N >= 8");
  double log_n = std::log2(static_cast<double>(n));
  int k = static_cast<int>(std::floor(log_n - 2.0 * std::log2(log_n)));
  return std::max(1, k);
}

/// Cap half-angles and areas for channels 0..K. Channel k cap satisfies
/// 1 - cos theta_k = min(2, 32 * log2(N) * 2^k / N); caps whose raw value
/// exceeds the sphere clamp to theta = pi.
struct ChannelPlan {
  int channel_count = 0;            // K
  std::vector<double> theta;        // K+1 half-angles, radians
  std::vector<double> area;         // K+1 cap areas, m^2
};

inline ChannelPlan build_channel_plan(std::size_t n, double radius) {
  ChannelPlan plan;
  plan.channel_count = derive_channel_count(n);
  double log_n = std::log2(static_cast<double>(n));
  double base = 32.0 * log_n / static_cast<double>(n);
  for (int k = 0; k <= plan.channel_count; ++k) {
    double one_minus_cos = std::min(2.0, std::ldexp(base, k));
    double theta = one_minus_cos >= 2.0 ? kPi : std::acos(1.0 - one_minus_cos);
    plan.theta.push_back(theta);
    plan.area.push_back(cap_area(Angle(theta), radius));
  }
  return plan;
}

/// i.i.d. levels with Pr{l = k} = 2^-(k+1) for k < k_max and the residual
/// mass 2^-k_max on k_max.
inline std::vector<int> assign_levels(std::size_t n, int k_max, Rng& rng) {
  std::vector<int> levels(n);
  for (std::size_t i = 0; i < n; ++i) {
    int level = static_cast<int>(std::floor(-std::log2(rng.uniform01())));
    levels[i] = std::min(level, k_max);
  }
  return levels;
}

/// Fixed-resolution binning of the unit sphere: latitude bands uniform in z,
/// equal azimuth columns. Queries return a superset of cap members; callers
/// filter by exact angle.
class SphereGrid {
 public:
  SphereGrid() = default;

  void build(const std::vector<NodePosition>& positions) {
    std::size_t n = positions.size();
    bands_ = std::max<std::size_t>(4, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
    cols_ = 2 * bands_;
    bins_.assign(bands_ * cols_, {});
    unit_x_.resize(n);
    unit_y_.resize(n);
    unit_z_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const NodePosition& p = positions[i];
      double inv = 1.0 / p.r;
      unit_x_[i] = p.x * inv;
      unit_y_[i] = p.y * inv;
      unit_z_[i] = p.z * inv;
      bins_[bin_of(unit_x_[i], unit_y_[i], unit_z_[i])].push_back(static_cast<NodeId>(i));
    }
  }

  /// Invokes fn(id, angle) for every node with angle(center, node) < theta.
  template <typename Fn>
  void for_each_in_cap(const NodePosition& center, double theta, Fn&& fn) const {
    double inv = 1.0 / center.r;
    double cx = center.x * inv, cy = center.y * inv, cz = center.z * inv;
    double polar = std::acos(std::clamp(cz, -1.0, 1.0));
    double band_height = 2.0 / static_cast<double>(bands_);
    // z-range of the cap, padded by one band.
    double z_hi = std::cos(std::max(0.0, polar - theta));
    double z_lo = std::cos(std::min(kPi, polar + theta));
    std::size_t b_lo = band_index(z_hi);
    std::size_t b_hi = band_index(z_lo);
    if (b_lo > 0) --b_lo;
    if (b_hi + 1 < bands_) ++b_hi;
    double col_width = 2.0 * kPi / static_cast<double>(cols_);
    double az_center = std::atan2(cy, cx);
    for (std::size_t b = b_lo; b <= b_hi; ++b) {
      // Conservative azimuth half-width over this band's polar range.
      double z_top = 1.0 - band_height * static_cast<double>(b);
      double z_bot = z_top - band_height;
      double half_width = max_azimuth_half_width(polar, theta, z_top, z_bot);
      if (half_width >= kPi - col_width) {
        scan_band(b, 0, cols_, cx, cy, cz, theta, fn);
        continue;
      }
      half_width += 1.5 * col_width;
      long c0 = static_cast<long>(std::floor((az_center - half_width + kPi) / col_width));
      long c1 = static_cast<long>(std::floor((az_center + half_width + kPi) / col_width));
      for (long c = c0; c <= c1; ++c) {
        long cc = ((c % static_cast<long>(cols_)) + static_cast<long>(cols_)) %
                  static_cast<long>(cols_);
        scan_bin(b * cols_ + static_cast<std::size_t>(cc), cx, cy, cz, theta, fn);
      }
    }
  }

 private:
  std::size_t band_index(double z) const {
    double t = (1.0 - std::clamp(z, -1.0, 1.0)) / 2.0 * static_cast<double>(bands_);
    std::size_t b = static_cast<std::size_t>(t);
    return std::min(b, bands_ - 1);
  }

  std::size_t bin_of(double ux, double uy, double uz) const {
    std::size_t b = band_index(uz);
    double az = std::atan2(uy, ux);  // [-pi, pi]
    double t = (az + kPi) / (2.0 * kPi) * static_cast<double>(cols_);
    std::size_t c = std::min(static_cast<std::size_t>(t), cols_ - 1);
    return b * cols_ + c;
  }

  // Widest azimuthal extent of a cap (center polar angle `polar`, half-angle
  // theta) over polar angles whose cosines span [z_bot, z_top].
  static double max_azimuth_half_width(double polar, double theta, double z_top,
                                       double z_bot) {
    double cos_theta = std::cos(theta);
    double sin_polar = std::sin(polar);
    double cos_polar = std::cos(polar);
    double widest = 0.0;
    auto eval = [&](double z) {
      z = std::clamp(z, -1.0, 1.0);
      double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      double denom = sin_polar * s;
      if (denom < 1e-12) return kPi;  // pole inside the band
      double c = (cos_theta - cos_polar * z) / denom;
      if (c <= -1.0) return kPi;
      if (c >= 1.0) return 0.0;
      return std::acos(c);
    };
    // Extremum of the width lies at z = cos(polar)/cos(theta) when interior.
    widest = std::max(eval(z_top), eval(z_bot));
    if (std::abs(cos_theta) > 1e-12) {
      double z_star = cos_polar / cos_theta;
      if (z_star > z_bot && z_star < z_top) widest = std::max(widest, eval(z_star));
    }
    return widest;
  }

  template <typename Fn>
  void scan_band(std::size_t b, std::size_t c_begin, std::size_t c_end, double cx,
                 double cy, double cz, double theta, Fn&& fn) const {
    for (std::size_t c = c_begin; c < c_end; ++c)
      scan_bin(b * cols_ + c, cx, cy, cz, theta, fn);
  }

  template <typename Fn>
  void scan_bin(std::size_t bin, double cx, double cy, double cz, double theta,
                Fn&& fn) const {
    for (NodeId id : bins_[bin]) {
      double ang = unit_angle(cx, cy, cz, unit_x_[id], unit_y_[id], unit_z_[id]);
      if (ang < theta) fn(id, ang);
    }
  }

  std::size_t bands_ = 0, cols_ = 0;
  std::vector<std::vector<NodeId>> bins_;
  std::vector<double> unit_x_, unit_y_, unit_z_;
};

/// Immutable snapshot of node placement, per-node levels and the neighbor
/// index. Channel k of node i is open iff levels[i] >= k.
class HierarchicalNetwork {
 public:
  HierarchicalNetwork(NetworkConfig config, ChannelPlan plan,
                      std::vector<NodePosition> positions, std::vector<int> levels)
      : config_(config),
        plan_(std::move(plan)),
        positions_(std::move(positions)),
        levels_(std::move(levels)) {
    if (positions_.size() != levels_.size())
      throw InvalidConfig("HierarchicalNetwork: positions/levels size mismatch");
    grid_.build(positions_);
  }

  const NetworkConfig& config() const { return config_; }
  const ChannelPlan& plan() const { return plan_; }
  const std::vector<NodePosition>& positions() const { return positions_; }
  const std::vector<int>& levels() const { return levels_; }
  std::size_t size() const { return positions_.size(); }
  const SphereGrid& grid() const { return grid_; }

  const NodePosition& position(NodeId i) const { return positions_.at(i); }
  int level(NodeId i) const { return levels_.at(i); }

  /// Channel-k neighborhood of i: nodes j != i with angle(i,j) < theta_k and
  /// channel k open at j. Requires channel k open at i.
  std::vector<NodeId> neighbors(NodeId i, int k) const {
    check_node(i);
    if (k < 0 || k > levels_[i])
      throw ClosedChannel("neighbors: channel not open at node");
    std::vector<NodeId> out;
    grid_.for_each_in_cap(positions_[i], plan_.theta[static_cast<std::size_t>(k)],
                          [&](NodeId j, double) {
                            if (j != i && levels_[j] >= k) out.push_back(j);
                          });
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Nodes within `theta` of a point, regardless of level, excluding `exclude`.
  template <typename Fn>
  void for_each_in_cap(const NodePosition& center, double theta, Fn&& fn) const {
    grid_.for_each_in_cap(center, theta, fn);
  }

  /// Phase of the pair (node i, target): 0 when angle <= theta_0, else the
  /// unique g with theta_g < angle <= theta_{g+1}; angles beyond theta_K
  /// (possible only when the top cap is unclamped) report K.
  int phase_of(NodeId i, const NodePosition& target) const {
    check_node(i);
    double ang = spherical_angle(positions_[i], target).radians();
    return phase_of_angle(ang);
  }

  int phase_of_angle(double ang) const {
    for (std::size_t m = 0; m < plan_.theta.size(); ++m)
      if (ang <= plan_.theta[m]) return m == 0 ? 0 : static_cast<int>(m) - 1;
    return plan_.channel_count;
  }

 private:
  void check_node(NodeId i) const {
    if (i >= positions_.size()) throw InvalidInput("unknown node id");
  }

  NetworkConfig config_;
  ChannelPlan plan_;
  std::vector<NodePosition> positions_;
  std::vector<int> levels_;
  SphereGrid grid_;
};

inline HierarchicalNetwork build_network(const NetworkConfig& config) {
  if (config.node_count < 8) throw InvalidConfig("build_network: need N >= 8");
  if (!(config.radius > 0.0)) throw InvalidConfig("build_network: radius must be > 0");
  ChannelPlan plan = build_channel_plan(config.node_count, config.radius);
  Rng pos_rng = derive_stream(config.seed, {stream::kPositions, config.node_count});
  Rng lvl_rng = derive_stream(config.seed, {stream::kLevels, config.node_count});
  std::vector<NodePosition> positions =
      sample_uniform_sphere(config.node_count, config.radius, pos_rng);
  std::vector<int> levels =
      assign_levels(config.node_count, plan.channel_count, lvl_rng);
  return HierarchicalNetwork(config, std::move(plan), std::move(positions),
                             std::move(levels));
}

/// New snapshot with identical placement and freshly drawn levels.
inline HierarchicalNetwork resample_levels(const HierarchicalNetwork& net,
                                           std::uint64_t seed) {
  Rng lvl_rng = derive_stream(seed, {stream::kResample, net.size()});
  std::vector<int> levels =
      assign_levels(net.size(), net.plan().channel_count, lvl_rng);
  return HierarchicalNetwork(net.config(), net.plan(), net.positions(),
                             std::move(levels));
}

}  // namespace mrrh
