#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "warplab/volume.hpp"

namespace warplab {

/// Samples of a nondecreasing function F, linearly interpolated.
class MonotoneTrace {
 public:
  MonotoneTrace(std::vector<double> x, std::vector<double> F)
      : x_(std::move(x)), F_(std::move(F)) {
    if (x_.size() != F_.size()) throw DomainError("x and F differ in length");
    if (x_.size() < 2) throw DomainError("trace needs at least two samples");
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!(x_[i] >= 1.0)) throw DomainError("trace abscissae must be >= 1");
      if (i && !(x_[i] > x_[i - 1]))
        throw DomainError("trace abscissae must increase strictly");
      if (i && F_[i] < F_[i - 1]) throw DomainError("trace must be nondecreasing");
    }
  }

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& F() const { return F_; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

  double operator()(double v) const {
    if (v < x_.front() || v > x_.back()) throw WindowExceedsTrace("abscissa outside trace");
    auto it = std::upper_bound(x_.begin(), x_.end(), v);
    if (it == x_.end()) return F_.back();
    const std::size_t j = static_cast<std::size_t>(it - x_.begin());
    const double w = (v - x_[j - 1]) / (x_[j] - x_[j - 1]);
    return F_[j - 1] + w * (F_[j] - F_[j - 1]);
  }

 private:
  std::vector<double> x_, F_;
};

struct SlopeScales {
  std::vector<double> r;
  double k = 0.0;
  double l = 0.0;
  double step = 0.05;
  std::optional<bool> hypothesis_holds;  // F(s) <= k s at the supplied s
};

/// {1, 1 + step, ..., l}, closed at l.
inline std::vector<double> window_grid(double l, double step) {
  if (!(step > 0.0)) throw DomainError("t-grid step must be positive");
  std::vector<double> t;
  for (int j = 0;; ++j) {
    const double v = 1.0 + j * step;
    if (v > l + 1e-12) break;
    t.push_back(std::min(v, l));
  }
  if (t.back() < l - 1e-12) t.push_back(l);
  return t;
}

/// Abscissae r of the trace with F(r + t) - F(r) <= (k + 1/l) t for every t
/// on the window grid.
inline SlopeScales slope_scales(const MonotoneTrace& trace, double k, double l,
                                double step = 0.05,
                                const std::vector<double>& s_points = {}) {
  if (!(l > 1.0)) throw DomainError("window l must exceed 1");
  SlopeScales out;
  out.k = k;
  out.l = l;
  out.step = step;
  if (!s_points.empty()) {
    bool ok = true;
    for (double s : s_points) ok = ok && trace(s) <= k * s + 1e-12;
    out.hypothesis_holds = ok;
  }
  const auto ts = window_grid(l, step);
  const double bound = k + 1.0 / l;
  bool any_candidate = false;
  for (double r : trace.x()) {
    if (r + l > trace.back()) break;
    any_candidate = true;
    const double Fr = trace(r);
    const bool good = std::all_of(ts.begin(), ts.end(), [&](double t) {
      return trace(r + t) - Fr <= bound * t + 1e-12;
    });
    if (good) out.r.push_back(r);
  }
  if (!any_candidate) throw WindowExceedsTrace("no abscissa r has r + l inside the trace");
  return out;
}

/// x = ln R against F = ln vol(B_R(p)) on x_lo, x_lo + dx, ..., x_hi.
inline MonotoneTrace log_volume_trace(const RotSymManifold& M, double x_lo,
                                      double x_hi, double dx) {
  if (!(dx > 0.0) || !(x_hi > x_lo)) throw DomainError("bad trace range");
  std::vector<double> x, F;
  const int n = static_cast<int>(std::floor((x_hi - x_lo) / dx + 1e-9));
  for (int i = 0; i <= n; ++i) {
    const double v = x_lo + i * dx;
    x.push_back(v);
    F.push_back(log_ball_volume(M, Radius::from_log(v)));
  }
  return MonotoneTrace(std::move(x), std::move(F));
}

struct ProfilePoint {
  double R = 1.0;
  double ratio = 1.0;
};

/// vol(B_{R r}) / vol(B_r) for each R on the grid.
inline std::vector<ProfilePoint> renormalized_profile(
    const RotSymManifold& M, const Radius& r, const std::vector<double>& R_grid) {
  const double base = log_ball_volume(M, r);
  std::vector<ProfilePoint> out;
  out.reserve(R_grid.size());
  for (double R : R_grid) {
    if (!(R >= 1.0)) throw DomainError("profile grid values must be >= 1");
    out.push_back({R, std::exp(log_ball_volume(M, r.scaled(R)) - base)});
  }
  return out;
}

inline std::string profile_csv(const std::vector<ProfilePoint>& pts) {
  std::string out = "R,ratio\n";
  for (const auto& p : pts)
    out += format_double(p.R) + ',' + format_double(p.ratio) + '\n';
  return out;
}

inline std::string slope_scales_csv(const SlopeScales& s) {
  std::string out = "# k=" + format_double(s.k) + "\n# l=" + format_double(s.l) +
                    "\n# step=" + format_double(s.step) + "\n";
  if (s.hypothesis_holds)
    out += std::string("# hypothesis=") + (*s.hypothesis_holds ? "true" : "false") + "\n";
  out += "r\n";
  for (double r : s.r) out += format_double(r) + '\n';
  return out;
}

}  // namespace warplab
