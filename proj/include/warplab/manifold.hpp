#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "warplab/warp.hpp"

namespace warplab {

/// [0, T_max] x S^(n-1) with metric dt^2 + f(t)^2 ds^2.
class RotSymManifold {
 public:
  /// Requires n >= 2 and a warp that passes validate().
  static RotSymManifold create(int n, WarpFunction warp) {
    const auto rep = validate(warp);
    if (!rep.ok())
      throw DomainError("invalid warp: " + rep.violations.front());
    return unchecked(n, std::move(warp));
  }

  /// Skips the concavity/schedule checks; used to build counterexamples
  /// for the comparison validators.
  static RotSymManifold unchecked(int n, WarpFunction warp) {
    if (n < 2) throw DomainError("dimension must be >= 2");
    RotSymManifold m;
    m.n_ = n;
    m.warp_ = std::move(warp);
    return m;
  }

  int n() const { return n_; }
  const WarpFunction& warp() const { return warp_; }
  const Wide& t_max() const { return warp_.t_max(); }
  double log_t_max() const { return warp_.log_t_max(); }
  double t_max_d() const { return warp_.t_max_d(); }

 private:
  RotSymManifold() = default;
  int n_ = 2;
  WarpFunction warp_ = euclidean_warp();
};

/// ln of the volume of the Euclidean unit n-ball.
inline double log_unit_ball_volume(int n) {
  return 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0);
}

/// ln vol(S^(n-1)) = ln(n omega_n).
inline double log_unit_sphere_area(int n) {
  return std::log(static_cast<double>(n)) + log_unit_ball_volume(n);
}

}  // namespace warplab
