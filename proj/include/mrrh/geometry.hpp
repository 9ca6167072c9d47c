#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mrrh/rng.hpp"

namespace mrrh {

inline constexpr double kPi = 3.14159265358979323846;

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Central angle between two points on a sphere, in [0, pi].
class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians) : value_(radians) {
    if (!(radians >= 0.0 && radians <= kPi))
      throw InvalidInput("Angle outside [0, pi]");
  }
  double radians() const { return value_; }

 private:
  double value_ = 0.0;
};

/// Point on a sphere of radius `r` centered at the origin.
struct NodePosition {
  double x = 0.0, y = 0.0, z = 1.0;
  double r = 1.0;  // |(x, y, z)| == r

  static NodePosition from_unit(double ux, double uy, double uz, double radius) {
    return NodePosition{ux * radius, uy * radius, uz * radius, radius};
  }
};

struct SphericalCap {
  NodePosition center;
  Angle half_angle;
  double area = 0.0;  // m^2
};

/// Central angle between unit vectors, via atan2 for accuracy near 0 and pi.
inline double unit_angle(double ax, double ay, double az, double bx, double by,
                         double bz) {
  double cx = ay * bz - az * by;
  double cy = az * bx - ax * bz;
  double cz = ax * by - ay * bx;
  double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
  double dot = ax * bx + ay * by + az * bz;
  return std::atan2(cross, dot);
}

inline Angle spherical_angle(const NodePosition& a, const NodePosition& b) {
  if (a.r <= 0.0 || b.r <= 0.0 || std::abs(a.r - b.r) > 1e-9 * a.r)
    throw InvalidInput("spherical_angle: nodes on different spheres");
  double inv_a = 1.0 / a.r, inv_b = 1.0 / b.r;
  return Angle(unit_angle(a.x * inv_a, a.y * inv_a, a.z * inv_a, b.x * inv_b,
                          b.y * inv_b, b.z * inv_b));
}

/// n i.i.d. uniform points on the sphere of the given radius. Normalized
/// 3-component standard normals; deterministic for a fixed generator state.
inline std::vector<NodePosition> sample_uniform_sphere(std::size_t n, double radius,
                                                       Rng& rng) {
  if (n == 0) throw InvalidConfig("sample_uniform_sphere: n must be >= 1");
  if (!(radius > 0.0)) throw InvalidConfig("sample_uniform_sphere: radius must be > 0");
  std::vector<NodePosition> out;
  out.reserve(n);
  while (out.size() < n) {
    double gx = rng.normal(), gy = rng.normal(), gz = rng.normal();
    double norm = std::sqrt(gx * gx + gy * gy + gz * gz);
    if (norm < 1e-12) continue;
    out.push_back(NodePosition::from_unit(gx / norm, gy / norm, gz / norm, radius));
  }
  return out;
}

/// Area of a spherical cap: 2 pi R^2 (1 - cos theta).
inline double cap_area(Angle theta, double radius) {
  return 2.0 * kPi * radius * radius * (1.0 - std::cos(theta.radians()));
}

/// Inverse of cap_area; areas above the full sphere clamp to theta = pi.
inline Angle cap_angle(double area, double radius) {
  if (!(area > 0.0)) throw InvalidInput("cap_angle: area must be > 0");
  double one_minus_cos = area / (2.0 * kPi * radius * radius);
  if (one_minus_cos >= 2.0) return Angle(kPi);
  return Angle(std::acos(1.0 - one_minus_cos));
}

/// (1 - cos(theta/2)) / (1 - cos theta), strictly inside (1/4, 1/2) for
/// theta in (0, pi); equals 1/2 at theta = pi.
inline double half_angle_area_ratio(Angle theta) {
  double t = theta.radians();
  if (t == 0.0) throw InvalidInput("half_angle_area_ratio: theta must be > 0");
  // Half-angle forms avoid cancellation for small theta.
  double s_half = std::sin(t / 4.0);
  double s_full = std::sin(t / 2.0);
  return (s_half * s_half) / (s_full * s_full);
}

/// Loss over a plain distance D: min(1, D^-d).
inline double loss_of_distance(double distance, double d) {
  if (!(d > 0.0)) throw InvalidConfig("loss_of_distance: exponent must be > 0");
  if (distance <= 1.0) return 1.0;
  return std::pow(distance, -d);
}

/// Loss between nodes separated by a central angle, using the convention
/// D = 2 pi R * angle: min(1, (2 pi R angle)^-d).
inline double path_loss(Angle angle, double d, double radius) {
  if (!(d > 0.0)) throw InvalidConfig("path_loss: exponent must be > 0");
  return loss_of_distance(2.0 * kPi * radius * angle.radians(), d);
}

}  // namespace mrrh
