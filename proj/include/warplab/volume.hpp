#pragma once

// Volumes of metric balls about the pole, growth-order curves and the
// comparison inequalities (Bishop, Yau, Bishop-Gromov, stable growth).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "warplab/io.hpp"
#include "warplab/manifold.hpp"

namespace warplab {

namespace detail {

/// ln of the integral of f^m over [a, b] within one piece, given ln a, ln b.
inline double log_piece_integral(const WarpPiece& p, int m, double ln_a,
                                 double ln_b) {
  const double ln_len = ln_b + log1mexp(ln_a - ln_b);  // ln(b - a)
  if (p.is_power()) {
    const double q = p.gamma() * m + 1.0;
    return q * ln_b + log1mexp(q * (ln_a - ln_b)) - std::log(q);
  }
  // (f_b^(m+1) - f_a^(m+1)) / (s (m+1)) = (b - a) sum_k f_b^k f_a^(m-k) / (m+1)
  const double fa = p.log_value(ln_a);
  const double fb = p.log_value(ln_b);
  double acc = -kInf;
  for (int k = 0; k <= m; ++k) {
    double term = 0.0;
    if (k > 0) term += k * fb;
    if (m - k > 0) term += (m - k) * fa;
    acc = logaddexp(acc, term);
  }
  return ln_len + acc - std::log(m + 1.0);
}

}  // namespace detail

/// ln vol(B_R(p)) = ln(vol(S^(n-1)) * integral_0^R f^(n-1)), summed piece by
/// piece in closed form.
inline double log_ball_volume(const RotSymManifold& M, const Radius& R) {
  if (R.log() > M.log_t_max() + 1e-14 * std::max(1.0, std::fabs(M.log_t_max())))
    throw DomainError("R exceeds T_max");
  const int m = M.n() - 1;
  const double ln_R = R.log();
  double acc = -kInf;
  for (const auto& p : M.warp().pieces()) {
    if (p.log_lo() >= ln_R) break;
    const double hi = std::min(p.log_hi(), ln_R);
    acc = logaddexp(acc, detail::log_piece_integral(p, m, p.log_lo(), hi));
  }
  return log_unit_sphere_area(M.n()) + acc;
}

inline double ball_volume(const RotSymManifold& M, double R) {
  if (!(R > 0.0)) throw DomainError("R must be positive");
  return std::exp(log_ball_volume(M, Radius::of(R)));
}

// ---------------------------------------------------------------------------

struct GrowthEntry {
  Radius R;
  double log_vol = 0.0;
  double order = 0.0;  // ln vol / ln R
};

struct GrowthCurve {
  std::vector<GrowthEntry> entries;
};

/// count radii with equally spaced logs from ln_lo to ln_hi.
inline std::vector<Radius> log_grid(double ln_lo, double ln_hi, int count) {
  if (count < 1) throw DomainError("grid needs at least one radius");
  std::vector<Radius> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double x =
        count == 1 ? ln_lo : ln_lo + (ln_hi - ln_lo) * i / (count - 1.0);
    out.push_back(Radius::from_log(x));
  }
  return out;
}

inline std::vector<Radius> radii_of(const std::vector<double>& values) {
  std::vector<Radius> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(Radius::of(v));
  return out;
}

inline GrowthCurve growth_curve(const RotSymManifold& M,
                                const std::vector<Radius>& grid) {
  GrowthCurve c;
  c.entries.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i].log() > 0.0)) throw DomainError("grid radii must exceed 1");
    if (i && !(grid[i - 1] < grid[i]))
      throw DomainError("grid must be strictly increasing");
    GrowthEntry e;
    e.R = grid[i];
    e.log_vol = log_ball_volume(M, grid[i]);
    e.order = e.log_vol / grid[i].log();
    c.entries.push_back(e);
  }
  return c;
}

struct OrderRange {
  double iv = 0.0;
  double sv = 0.0;
  std::size_t tail_count = 0;
};

/// Min and max of the order over the last ceil(tail_fraction * size) entries.
inline OrderRange estimate_iv_sv(const GrowthCurve& curve, double tail_fraction) {
  if (curve.entries.empty()) throw EmptyCurve("growth curve is empty");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw DomainError("tail_fraction must lie in (0, 1]");
  const std::size_t len = curve.entries.size();
  std::size_t tail = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(len) - 1e-9));
  tail = std::clamp<std::size_t>(tail, 1, len);
  OrderRange r{kInf, -kInf, tail};
  for (std::size_t i = len - tail; i < len; ++i) {
    r.iv = std::min(r.iv, curve.entries[i].order);
    r.sv = std::max(r.sv, curve.entries[i].order);
  }
  return r;
}

inline std::string growth_curve_csv(const GrowthCurve& c) {
  std::string out = "R,vol,order\n";
  for (const auto& e : c.entries) {
    out += e.R.fits_double() ? format_double(e.R.value()) : format_from_log(e.R.log());
    out += ',';
    out += format_from_log(e.log_vol);
    out += ',';
    out += format_double(e.order);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Comparison checks.

/// max over the grid of vol(B_R) / (omega_n R^n).
inline double check_bishop(const RotSymManifold& M,
                           const std::vector<Radius>& grid) {
  double worst = -kInf;
  for (const auto& R : grid) {
    const double ln_ratio =
        log_ball_volume(M, R) - log_unit_ball_volume(M.n()) - M.n() * R.log();
    worst = std::max(worst, ln_ratio);
  }
  return std::exp(worst);
}

/// min over grid radii R >= 1 of vol(B_R) / R.
inline double check_yau_linear(const RotSymManifold& M,
                               const std::vector<Radius>& grid) {
  double best = kInf;
  for (const auto& R : grid) {
    if (R.log() < 0.0) continue;
    best = std::min(best, log_ball_volume(M, R) - R.log());
  }
  if (best == kInf) throw DomainError("grid has no radius >= 1");
  return std::exp(best);
}

struct MonotoneCheck {
  bool passed = true;
  double worst_increase = 0.0;  // largest relative increase between neighbours
  std::size_t worst_index = 0;
};

/// vol(B_R)/R^n must be nonincreasing along the (increasing) grid, up to a
/// relative slack of 1e-9.
inline MonotoneCheck check_bishop_gromov(const RotSymManifold& M,
                                         const std::vector<Radius>& grid) {
  MonotoneCheck out;
  double prev = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double cur = log_ball_volume(M, grid[i]) - M.n() * grid[i].log();
    if (i > 0) {
      const double inc = std::expm1(cur - prev);
      if (inc > out.worst_increase) {
        out.worst_increase = inc;
        out.worst_index = i;
      }
    }
    prev = cur;
  }
  out.passed = out.worst_increase <= 1e-9;
  return out;
}

/// vol(B_{R r}) / vol(B_r) after checking C1 <= vol(B_s)/s^k <= C2 on the
/// reference grid.
inline double stable_growth_check(const RotSymManifold& M, double k, double C1,
                                  double C2, double R, const Radius& r,
                                  const std::vector<Radius>& reference) {
  if (!(R >= 1.0)) throw DomainError("R must be >= 1");
  if (!(C1 > 0.0) || !(C2 >= C1)) throw DomainError("need 0 < C1 <= C2");
  const double slack = 1e-9;
  for (const auto& s : reference) {
    const double lr = log_ball_volume(M, s) - k * s.log();
    if (lr < std::log(C1) - slack || lr > std::log(C2) + slack)
      throw PreconditionViolation(
          "vol(B_s)/s^k leaves [C1, C2] at s = " + format_from_log(s.log()));
  }
  return std::exp(log_ball_volume(M, r.scaled(R)) - log_ball_volume(M, r));
}

}  // namespace warplab
