#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "warplab/manifold.hpp"

namespace warplab {

/// The warp seen at scale r: f_r(s) = f(r s) / r, in double precision.
/// Rescaling by r maps the metric of M to that of r^-1 M, so distances on
/// the rescaled space are computed directly from this profile.
class ScaledProfile {
 public:
  struct Piece {
    bool power = false;
    double gamma = 1.0;
    double coef = 1.0;  // power: coef * s^gamma
    double slope = 1.0;
    double intercept = 0.0;  // linear: slope * s + intercept
    double lo = 0.0, hi = 0.0;

    double value(double s) const {
      return power ? (s > 0.0 ? coef * std::pow(s, gamma) : 0.0)
                   : slope * s + intercept;
    }
    double derivative(double s) const {
      return power ? coef * gamma * std::pow(s, gamma - 1.0) : slope;
    }
    /// value(a + h) - value(a), without cancellation.
    double increment(double a, double h) const {
      if (!power) return slope * h;
      if (a <= 0.0) return coef * std::pow(h, gamma);
      return coef * std::pow(a, gamma) * std::expm1(gamma * std::log1p(h / a));
    }
  };

  static constexpr double kMinScaled = 1e-300;
  static constexpr double kMaxScaled = 1e300;

  ScaledProfile(const WarpFunction& w, const Radius& r) : ln_r_(r.log()) {
    const double ln_min = std::log(kMinScaled);
    const double ln_max = std::log(kMaxScaled);
    for (const auto& p : w.pieces()) {
      const double ln_hi = p.log_hi() - ln_r_;
      if (ln_hi < ln_min) continue;
      const double ln_lo = p.log_lo() - ln_r_;
      if (ln_lo > ln_max) break;
      Piece q;
      if (ln_r_ == 0.0) {
        q.lo = p.lo_d();
        q.hi = std::min(p.hi_d(), kMaxScaled);
      } else {
        q.lo = pieces_.empty() ? 0.0 : std::exp(ln_lo);
        q.hi = ln_hi > ln_max ? kMaxScaled : std::exp(ln_hi);
      }
      if (p.is_power()) {
        q.power = true;
        q.gamma = p.gamma();
        q.coef = std::exp((p.gamma() - 1.0) * ln_r_);
      } else {
        q.slope = p.slope_d();
        q.intercept = to_double(p.intercept() / wide_from_log(ln_r_));
      }
      pieces_.push_back(q);
    }
    if (pieces_.empty()) throw DomainError("scale leaves no part of the warp");
    s_max_ = pieces_.back().hi;
  }

  explicit ScaledProfile(const WarpFunction& w) : ScaledProfile(w, Radius::of(1.0)) {}

  double log_scale() const { return ln_r_; }
  double s_max() const { return s_max_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  std::size_t index(double s) const {
    const auto it = std::upper_bound(
        pieces_.begin(), pieces_.end(), s,
        [](double v, const Piece& p) { return v < p.hi; });
    if (it == pieces_.end()) return pieces_.size() - 1;
    return static_cast<std::size_t>(it - pieces_.begin());
  }

  double value(double s) const {
    if (s <= 0.0) return 0.0;
    return pieces_[index(s)].value(s);
  }

  double derivative(double s) const { return pieces_[index(s)].derivative(s); }

  /// f(a + h) - f(a) for h >= 0, summed piece by piece.
  double increment(double a, double h) const {
    double acc = 0.0;
    const double b = a + h;
    for (std::size_t i = index(a); i < pieces_.size(); ++i) {
      const auto& p = pieces_[i];
      const double lo = std::max(a, p.lo);
      // a + h may round to a; the first piece still sees the exact h
      if (lo >= b && lo > a) break;
      if (p.hi >= b) return acc + p.increment(lo, lo == a ? h : b - lo);
      acc += p.increment(lo, p.hi - lo);
    }
    return acc;
  }

  /// Breakpoints strictly inside (a, b).
  std::vector<double> breakpoints(double a, double b) const {
    std::vector<double> out;
    for (const auto& p : pieces_)
      if (p.hi > a && p.hi < b) out.push_back(p.hi);
    return out;
  }

 private:
  std::vector<Piece> pieces_;
  double ln_r_ = 0.0;
  double s_max_ = 0.0;
};

}  // namespace warplab
