#pragma once

// Distances on dt^2 + f(t)^2 ds^2.  Two points at radii t1, t2 and angle
// theta lie in a totally geodesic surface dt^2 + f(t)^2 dphi^2, where
// geodesics keep the Clairaut constant c = f sin(psi).  We follow the whole
// one-parameter family of geodesics leaving the inner radius, find every
// member whose angular sweep reaches the outer point, and compare with the
// path through the pole.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "warplab/profile.hpp"

namespace warplab {

/// Member u of the geodesic family from radius t_lo to t_hi.
///   u in [-1, 0]: monotone in t, c runs from 0 (radial) to f(t_lo);
///   u in (0, 1):  turning at t* = t_lo (1 - u^2) with c = f(t*);
///   u = 1:        limit through the pole.
struct FamilyPoint {
  double u = 0.0;
  double sweep = 0.0;  // angle swept, phi(t_hi) - phi(t_lo)
  double extra = 0.0;  // length - (t_hi - t_lo)
  double c = 0.0;      // Clairaut constant = d(length)/d(sweep)
};

namespace detail {

using Pair = std::complex<double>;  // (sweep, length excess) integrands

inline constexpr double kQuadTol = 1e-11;

/// Adaptive Gauss-Kronrod on [lo, hi] through the reference interval.
/// Boost 1.74 reports the local error of each subinterval without its
/// half-width, so integrating over [-1, 1] keeps the estimate in the units
/// of the integral (and conservative after subdivision).
template <class F>
Pair gauss_kronrod(F&& f, double lo, double hi, double* err) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double y) { return f(mid + half * y) * half; }, -1.0, 1.0, 15, kQuadTol, err);
}

/// Integrates the sweep and the length excess f/sqrt(f^2-c^2) - 1 over
/// [a, a + span], where f(t) - c = delta + (f(t) - f(a)).  The span is
/// passed exactly since a may sit within rounding of the far end.
inline Pair integrate_family(const ScaledProfile& P, double a, double span,
                             double c, double delta) {
  const double b = a + span;
  if (!(span > 0.0) || c <= 0.0) return {0.0, 0.0};
  auto offset = [&](double x) { return x == b ? span : x - a; };

  auto kernel = [&](double h) -> Pair {
    const double D = delta + P.increment(a, h);
    if (!(D > 0.0)) return {0.0, 0.0};
    const double s = std::sqrt(D * (2.0 * c + D));
    const double f = c + D;
    return {c / (f * s), c * c / (s * (f + s))};
  };

  // breakpoints within rounding of a or b are dropped; the first cut (2a or
  // an earlier breakpoint) bounds the square-root substitution
  const double gap = 1e-13 * b;
  std::vector<double> inner;
  for (double x : P.breakpoints(a, b))
    if (x - a > gap && b - x > gap) inner.push_back(x);
  double first = (a > 0.0 && 2.0 * a < b) ? 2.0 * a : b;
  if (!inner.empty()) first = std::min(first, inner.front());
  std::vector<double> cuts{a, first};
  for (double x : inner)
    if (x - cuts.back() > gap) cuts.push_back(x);
  if (cuts.back() < b) cuts.push_back(b);

  Pair total{0.0, 0.0};
  double err_total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    double err = 0.0;
    Pair part;
    if (i == 0) {
      // t = a + w^2 removes the inverse square root at a turning point
      part = gauss_kronrod([&](double w) { return kernel(w * w) * (2.0 * w); }, 0.0,
                           std::sqrt(offset(hi)), &err);
    } else if (offset(hi) / (lo - a) > 4.0) {
      // t = a + e^x: smooth both near the turning point and over long ranges
      part = gauss_kronrod(
          [&](double x) {
            const double h = std::exp(x);
            return kernel(h) * h;
          },
          std::log(lo - a), std::log(offset(hi)), &err);
    } else {
      part = gauss_kronrod([&](double t) { return kernel(t - a); }, lo, hi, &err);
    }
    total += part;
    err_total += err;
  }
  if (!(err_total <= 1e-7 * std::max(1.0, std::abs(total))))
    throw QuadratureFailure("geodesic integral did not converge");
  return total;
}

}  // namespace detail

class GeodesicFamily {
 public:
  GeodesicFamily(const ScaledProfile& P, double t_lo, double t_hi)
      : P_(&P), t_lo_(t_lo), t_hi_(t_hi), f_lo_(P.value(t_lo)) {}

  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }

  FamilyPoint at(double u) const {
    FamilyPoint out;
    out.u = u;
    if (u >= 1.0) {
      out.sweep = kPi;
      out.extra = 2.0 * t_lo_;
      return out;
    }
    if (u <= 0.0) {
      const double w2 = u * u;
      out.c = f_lo_ * (1.0 - w2);
      const auto r =
          detail::integrate_family(*P_, t_lo_, t_hi_ - t_lo_, out.c, f_lo_ * w2);
      out.sweep = r.real();
      out.extra = r.imag();
      return out;
    }
    const double dip = t_lo_ * u * u;
    const double t_star = t_lo_ - dip;
    out.c = P_->value(t_star);
    const auto a = detail::integrate_family(*P_, t_star, dip, out.c, 0.0);
    const auto b = detail::integrate_family(*P_, t_star, dip + (t_hi_ - t_lo_), out.c, 0.0);
    out.sweep = a.real() + b.real();
    out.extra = 2.0 * dip + a.imag() + b.imag();
    return out;
  }

 private:
  const ScaledProfile* P_;
  double t_lo_, t_hi_, f_lo_;
};

namespace detail {

/// Smallest of theta + 2 pi k and 2 pi (k+1) - theta (k >= 0) in [lo, hi].
/// Length along the family grows with sweep at rate c >= 0, so within one
/// monotone bracket the smallest target is the shortest member.
inline std::optional<double> lowest_target(double theta, double lo, double hi) {
  const double turn = 2.0 * kPi;
  const double ka = std::max(0.0, std::ceil((lo - theta) / turn));
  const double kb = std::max(0.0, std::ceil((lo + theta) / turn - 1.0));
  double best = kInf;
  for (double k = std::max(0.0, ka - 1.0); k <= ka; ++k)
    if (const double a = theta + turn * k; a >= lo) best = std::min(best, a);
  for (double k = std::max(0.0, kb - 1.0); k <= kb; ++k)
    if (const double b = turn * (k + 1.0) - theta; b >= lo) best = std::min(best, b);
  if (best > hi) return std::nullopt;
  return best;
}

inline void check_query(const ScaledProfile& P, double t1, double t2,
                        double theta) {
  if (!(t1 >= 0.0 && t2 >= 0.0) || t1 > P.s_max() || t2 > P.s_max())
    throw DomainError("radius outside [0, T_max]");
  if (!(theta >= 0.0 && theta <= kPi * (1.0 + 1e-15)))
    throw DomainError("theta must lie in [0, pi]");
}

/// Near-collapsed circles: going radially to t_lo and then around is
/// within rounding of the lower bound |t1 - t2|.
inline bool collapsed(double f_lo, double t_hi) {
  return f_lo * kPi <= 1e-15 * t_hi;
}

}  // namespace detail

struct ShootingOptions {
  int scan_points = 24;  // per branch
};

/// d - |t1 - t2| in the surface with profile P between (t1, 0) and
/// (t2, theta).
inline double distance_excess(const ScaledProfile& P, double t1, double t2,
                              double theta, const ShootingOptions& opt = {}) {
  detail::check_query(P, t1, t2, theta);
  theta = std::min(theta, kPi);
  const double t_lo = std::min(t1, t2), t_hi = std::max(t1, t2);
  const double pole = 2.0 * t_lo;
  if (theta == 0.0 || t_lo == 0.0) return 0.0;
  const double f_lo = P.value(t_lo);
  if (detail::collapsed(f_lo, t_hi)) return std::min(pole, f_lo * theta);

  const GeodesicFamily fam(P, t_lo, t_hi);
  const int n = opt.scan_points;
  std::vector<FamilyPoint> scan;
  scan.reserve(2 * n + 1);
  for (int i = 0; i <= 2 * n; ++i) scan.push_back(fam.at(-1.0 + double(i) / n));

  double best = pole;
  for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
    const FamilyPoint& A = scan[i];
    const FamilyPoint& B = scan[i + 1];
    const double lo = std::min(A.sweep, B.sweep), hi = std::max(A.sweep, B.sweep);
    if (const auto t = detail::lowest_target(theta, lo, hi)) {
      const double target = *t;
      FamilyPoint hit;
      if (A.sweep == target) {
        hit = A;
      } else if (B.sweep == target) {
        hit = B;
      } else {
        std::uintmax_t iters = 100;
        auto g = [&](double u) { return fam.at(u).sweep - target; };
        const auto r = boost::math::tools::toms748_solve(
            g, A.u, B.u, A.sweep - target, B.sweep - target,
            boost::math::tools::eps_tolerance<double>(50), iters);
        hit = fam.at(0.5 * (r.first + r.second));
      }
      best = std::min(best, hit.extra);
    }
  }
  return std::max(best, 0.0);
}

inline double distance(const ScaledProfile& P, double t1, double t2,
                       double theta, const ShootingOptions& opt = {}) {
  return std::fabs(t1 - t2) + distance_excess(P, t1, t2, theta, opt);
}

inline double distance(const RotSymManifold& M, double t1, double t2,
                       double theta) {
  return distance(ScaledProfile(M.warp()), t1, t2, theta);
}

/// d(x, y) as a function of the angle for a fixed pair of radii, built once
/// and then queried many times.  Length along the family is a smooth
/// function of sweep with derivative c, so each interval is a cubic
/// Hermite segment; intervals are split until the midpoint is reproduced.
class DistanceTable {
 public:
  DistanceTable(const ScaledProfile& P, double t1, double t2,
                double rel_tol = 1e-9)
      : t_lo_(std::min(t1, t2)), t_hi_(std::max(t1, t2)) {
    detail::check_query(P, t1, t2, 0.0);
    if (t_lo_ == 0.0) return;
    f_lo_ = P.value(t_lo_);
    if (detail::collapsed(f_lo_, t_hi_)) return;
    tol_ = rel_tol * t_hi_;
    const GeodesicFamily fam(P, t_lo_, t_hi_);
    const int n = 16;
    std::vector<FamilyPoint> coarse;
    for (int i = 0; i <= 2 * n; ++i) coarse.push_back(fam.at(-1.0 + double(i) / n));
    pts_.push_back(coarse.front());
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i)
      refine(fam, coarse[i], coarse[i + 1], 0);
  }

  double operator()(double theta) const {
    const double radial = t_hi_ - t_lo_;
    const double pole = t_hi_ + t_lo_;
    if (theta <= 0.0 || t_lo_ == 0.0) return radial;
    if (pts_.empty()) return std::min(pole, radial + f_lo_ * theta);
    double best = pole;
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
      const FamilyPoint& A = pts_[i];
      const FamilyPoint& B = pts_[i + 1];
      const double lo = std::min(A.sweep, B.sweep), hi = std::max(A.sweep, B.sweep);
      if (const auto t = detail::lowest_target(theta, lo, hi))
        best = std::min(best, radial + hermite(A, B, *t));
    }
    return std::max(best, radial);
  }

  std::size_t size() const { return pts_.size(); }

 private:
  static double hermite(const FamilyPoint& A, const FamilyPoint& B, double x) {
    const double h = B.sweep - A.sweep;
    if (h == 0.0) return std::min(A.extra, B.extra);
    const double s = (x - A.sweep) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * A.extra + h10 * h * A.c + h01 * B.extra + h11 * h * B.c;
  }

  void refine(const GeodesicFamily& fam, const FamilyPoint& A,
              const FamilyPoint& B, int depth) {
    const FamilyPoint M = fam.at(0.5 * (A.u + B.u));
    const bool monotone = (M.sweep - A.sweep) * (B.sweep - M.sweep) >= 0.0;
    const bool good = monotone && std::fabs(hermite(A, B, M.sweep) - M.extra) <= tol_;
    if (depth >= 14 || good) {
      if (!monotone) pts_.push_back(M);
      pts_.push_back(B);
      return;
    }
    refine(fam, A, M, depth + 1);
    refine(fam, M, B, depth + 1);
  }

  double t_lo_, t_hi_;
  double f_lo_ = 0.0;
  double tol_ = 0.0;
  std::vector<FamilyPoint> pts_;
};

/// diam of the sphere of radius R about the pole: the antipodal distance.
inline double sphere_diameter(const RotSymManifold& M, double R) {
  if (!(R > 0.0)) throw DomainError("R must be positive");
  return distance(M, R, R, kPi);
}

/// R_cut - d(x, gamma(R_cut)) for x = (t, theta) and the ray gamma along
/// theta = 0.
inline double busemann(const RotSymManifold& M, double t, double theta,
                       double R_cut) {
  if (!(R_cut >= 10.0 * t)) throw DomainError("R_cut must be >= 10 t");
  const ScaledProfile P(M.warp());
  // d = (R_cut - t) + extra, so R_cut - d = t - extra without cancellation
  return t - distance_excess(P, t, R_cut, theta);
}

}  // namespace warplab
