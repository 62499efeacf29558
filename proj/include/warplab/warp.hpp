#pragma once

// Piecewise concave warping functions f for metrics dt^2 + f(t)^2 ds^2, and
// the oscillating construction that alternates slow windows t^(1/(l+1)) with
// fast windows t^(1 - 1/(l+1)).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "warplab/errors.hpp"
#include "warplab/numeric.hpp"

namespace warplab {

enum class PieceKind { power, linear };

/// One piece of a warp: either t^gamma or slope*t + intercept on [lo, hi].
class WarpPiece {
 public:
  static WarpPiece power(double gamma, Wide lo, Wide hi) {
    if (!(gamma > 0.0 && gamma <= 1.0))
      throw DomainError("power exponent must lie in (0, 1]");
    WarpPiece p(PieceKind::power, std::move(lo), std::move(hi));
    p.gamma_ = gamma;
    p.finish();
    return p;
  }

  static WarpPiece linear(Wide slope, Wide intercept, Wide lo, Wide hi) {
    if (slope < 0) throw DomainError("linear slope must be >= 0");
    WarpPiece p(PieceKind::linear, std::move(lo), std::move(hi));
    p.slope_ = std::move(slope);
    p.intercept_ = std::move(intercept);
    if (p.slope_ * p.hi_ + p.intercept_ <= 0 ||
        (p.lo_ >= 0 && p.slope_ * p.lo_ + p.intercept_ < 0))
      throw DomainError("linear piece must be positive on (lo, hi]");
    p.finish();
    return p;
  }

  PieceKind kind() const { return kind_; }
  bool is_power() const { return kind_ == PieceKind::power; }
  double gamma() const { return gamma_; }
  const Wide& slope() const { return slope_; }
  const Wide& intercept() const { return intercept_; }
  const Wide& lo() const { return lo_; }
  const Wide& hi() const { return hi_; }
  double log_lo() const { return ln_lo_; }
  double log_hi() const { return ln_hi_; }
  /// Endpoints as doubles (+inf beyond range).
  double lo_d() const { return lo_d_; }
  double hi_d() const { return hi_d_; }
  double log_slope() const { return ln_slope_; }
  double slope_d() const { return slope_d_; }
  double intercept_d() const { return intercept_d_; }

  double value(double t) const {
    if (kind_ == PieceKind::power) return t == 0.0 ? 0.0 : std::pow(t, gamma_);
    return slope_d_ * t + intercept_d_;
  }

  double log_value(double ln_t) const {
    if (kind_ == PieceKind::power) return gamma_ * ln_t;
    if (intercept_negative_)
      return ln_slope_ + ln_t + log1mexp(ln_intercept_ - ln_slope_ - ln_t);
    return logaddexp(ln_slope_ + ln_t, ln_intercept_);
  }

  double derivative(double t) const {
    if (kind_ == PieceKind::power) return gamma_ * std::pow(t, gamma_ - 1.0);
    return slope_d_;
  }

  /// ln f'(t); -inf for a flat piece.
  double log_derivative(double ln_t) const {
    if (kind_ == PieceKind::power)
      return std::log(gamma_) + (gamma_ - 1.0) * ln_t;
    return ln_slope_;
  }

  double second_derivative(double t) const {
    if (kind_ == PieceKind::power)
      return gamma_ * (gamma_ - 1.0) * std::pow(t, gamma_ - 2.0);
    return 0.0;
  }

  friend bool operator==(const WarpPiece& a, const WarpPiece& b) {
    return a.kind_ == b.kind_ && a.gamma_ == b.gamma_ && a.slope_ == b.slope_ &&
           a.intercept_ == b.intercept_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  WarpPiece(PieceKind kind, Wide lo, Wide hi)
      : kind_(kind), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (!(lo_ < hi_)) throw DomainError("piece domain must satisfy lo < hi");
    if (lo_ < 0) throw DomainError("piece domain must be nonnegative");
  }

  void finish() {
    ln_lo_ = log_of(lo_);
    ln_hi_ = log_of(hi_);
    lo_d_ = to_double(lo_);
    hi_d_ = to_double(hi_);
    if (kind_ == PieceKind::linear) {
      ln_slope_ = log_of(slope_);
      intercept_negative_ = intercept_ < 0;
      ln_intercept_ = log_of(intercept_negative_ ? Wide(-intercept_) : intercept_);
      slope_d_ = to_double(slope_);
      intercept_d_ = to_double(intercept_);
    }
  }

  PieceKind kind_;
  double gamma_ = 1.0;
  Wide slope_ = 0;
  Wide intercept_ = 0;
  Wide lo_, hi_;
  double ln_lo_ = 0, ln_hi_ = 0, lo_d_ = 0, hi_d_ = 0;
  double ln_slope_ = -kInf, ln_intercept_ = -kInf, slope_d_ = 0,
         intercept_d_ = 0;
  bool intercept_negative_ = false;  // ln_intercept_ then holds ln|intercept|
};

/// A power window of the oscillating construction.
struct PowerWindow {
  int stage = 0;  // l >= 1
  bool slow = true;
  double gamma = 1.0;
  Wide lo, hi;
  std::size_t piece = 0;
};

class WarpFunction {
 public:
  /// Checks the structural invariants: the pieces tile [0, T_max], values
  /// agree at shared endpoints, and f(t) = t on [0, 1].  Concavity and the
  /// schedule inequality are reported by validate().
  static WarpFunction from_pieces(std::vector<WarpPiece> pieces,
                                  std::vector<BigInt> schedule = {},
                                  int n_stages = 0) {
    if (pieces.empty()) throw DomainError("warp needs at least one piece");
    const WarpPiece& first = pieces.front();
    if (first.lo() != 0 || first.kind() != PieceKind::linear ||
        first.slope() != 1 || first.intercept() != 0 || first.hi() < 1)
      throw DomainError("first piece must be f(t) = t on [0, 1]");
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
      if (pieces[i].hi() != pieces[i + 1].lo())
        throw DomainError("pieces must tile the domain without gaps");
      const double ln_b = pieces[i].log_hi();
      const double gap =
          std::fabs(pieces[i].log_value(ln_b) - pieces[i + 1].log_value(ln_b));
      if (!(gap < 1e-9))
        throw DomainError("warp is discontinuous at piece " +
                          std::to_string(i + 1));
    }
    if (n_stages < 0) throw DomainError("n_stages must be >= 0");
    WarpFunction w;
    w.pieces_ = std::move(pieces);
    w.schedule_ = std::move(schedule);
    w.n_stages_ = n_stages;
    w.ln_his_.reserve(w.pieces_.size());
    for (const auto& p : w.pieces_) w.ln_his_.push_back(p.log_hi());
    return w;
  }

  const std::vector<WarpPiece>& pieces() const { return pieces_; }
  const std::vector<BigInt>& schedule() const { return schedule_; }
  int n_stages() const { return n_stages_; }
  const Wide& t_max() const { return pieces_.back().hi(); }
  double log_t_max() const { return pieces_.back().log_hi(); }
  /// +inf when T_max is beyond double range.
  double t_max_d() const { return pieces_.back().hi_d(); }

  /// Piece whose closed domain holds t; at an interior junction the piece to
  /// the right.
  std::size_t piece_index(double t) const {
    const auto it = std::upper_bound(
        pieces_.begin(), pieces_.end(), t,
        [](double v, const WarpPiece& p) { return v < p.hi_d(); });
    if (it == pieces_.end()) return pieces_.size() - 1;
    return static_cast<std::size_t>(it - pieces_.begin());
  }

  std::size_t piece_index_log(double ln_t) const {
    const auto it = std::upper_bound(ln_his_.begin(), ln_his_.end(), ln_t);
    if (it == ln_his_.end()) return pieces_.size() - 1;
    return static_cast<std::size_t>(it - ln_his_.begin());
  }

  std::vector<PowerWindow> power_windows() const {
    std::vector<PowerWindow> out;
    if (n_stages_ == 0) return out;
    int m = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (!pieces_[i].is_power()) continue;
      ++m;
      PowerWindow win;
      win.stage = (m + 1) / 2;
      win.slow = (m % 2) == 1;
      win.gamma = pieces_[i].gamma();
      win.lo = pieces_[i].lo();
      win.hi = pieces_[i].hi();
      win.piece = i;
      out.push_back(std::move(win));
    }
    return out;
  }

  friend bool operator==(const WarpFunction& a, const WarpFunction& b) {
    return a.n_stages_ == b.n_stages_ && a.schedule_ == b.schedule_ &&
           a.pieces_ == b.pieces_;
  }

 private:
  std::vector<WarpPiece> pieces_;
  std::vector<BigInt> schedule_;
  std::vector<double> ln_his_;
  int n_stages_ = 0;
};

// ---------------------------------------------------------------------------
// Concave joins.  A chord from (b, b^alpha) to (c, c^beta) keeps the glued
// function concave iff
//   beta c^(beta-1) <= (c^beta - b^alpha)/(c - b) <= alpha b^(alpha-1).

inline constexpr double kJoinTolerance = 1e-12;
inline constexpr double kJoinRelStep = 1e-9;

namespace detail {

inline void check_exponent(double e) {
  if (!(e > 0.0 && e <= 1.0))
    throw DomainError("exponent must lie in (0, 1]");
}

/// Join test with c = b * e^d, evaluated entirely on logs so it is valid
/// for radii far beyond double range.
inline bool concave_join_log(double alpha, double beta, double ln_b, double d) {
  if (!(d > 0.0)) return false;
  const double ln_c = ln_b + d;
  // beta ln c - alpha ln b, written to keep precision when alpha == beta.
  const double gap = (beta - alpha) * ln_b + beta * d;
  if (!(gap > 0.0)) return false;  // chord slope <= 0 < left bound
  const double ln_num = beta * ln_c + log1mexp(-gap);
  const double ln_den = ln_b + d + log1mexp(-d);  // ln(c - b)
  const double ln_chord = ln_num - ln_den;
  const double ln_lower = std::log(beta) + (beta - 1.0) * ln_c;
  const double ln_upper = std::log(alpha) + (alpha - 1.0) * ln_b;
  return ln_lower <= ln_chord + kJoinTolerance &&
         ln_chord <= ln_upper + kJoinTolerance;
}

/// ln(c/b) of the least qualifying c on the lattice c = b(1 + 1e-9 2^k),
/// refined by bisection to relative width 1e-9.
inline double join_point_log(double alpha, double beta, double ln_b,
                             double max_log_ratio) {
  // log1p(1e-9 * 2^k) without overflowing 2^k
  auto d_at = [](double k) {
    const double x = std::log(kJoinRelStep) + k * std::numbers::ln2;
    return x < 0.0 ? std::log1p(std::exp(x)) : x + std::log1p(std::exp(-x));
  };
  double k = 0.0;
  double d_hi = d_at(k);
  while (!concave_join_log(alpha, beta, ln_b, d_hi)) {
    k += 1.0;
    d_hi = d_at(k);
    if (d_hi > max_log_ratio)
      throw IterationLimit("no concave join point below the configured cap");
  }
  if (k == 0.0) return d_hi;
  double d_lo = d_at(k - 1.0);
  while (d_hi - d_lo > kJoinRelStep) {
    const double mid = 0.5 * (d_lo + d_hi);
    if (concave_join_log(alpha, beta, ln_b, mid))
      d_hi = mid;
    else
      d_lo = mid;
  }
  return d_hi;
}

}  // namespace detail

inline bool check_concave_join(double alpha, double beta, double b, double c) {
  detail::check_exponent(alpha);
  detail::check_exponent(beta);
  if (!(b > 0.0) || !(b < c)) throw DomainError("join requires 0 < b < c");
  return detail::concave_join_log(alpha, beta, std::log(b),
                                  std::log1p((c - b) / b));
}

/// Least c (relative resolution 1e-9) such that the chord from
/// (b, b^alpha) to (c, c^beta) is a concave join.
inline double find_join_point(double alpha, double beta, double b,
                              double max_log_ratio = 1e5) {
  detail::check_exponent(alpha);
  detail::check_exponent(beta);
  if (!(b > 0.0)) throw DomainError("join requires b > 0");
  const double d =
      detail::join_point_log(alpha, beta, std::log(b), max_log_ratio);
  return b + b * std::expm1(d);
}

/// Linear piece through (b, fb) and (c, fc), formed at extended precision.
inline WarpPiece chord_piece(const Wide& b, const WideHi& fb, const Wide& c,
                             const WideHi& fc) {
  const WideHi bh(b), ch(c);
  const WideHi slope = (fc - fb) / (ch - bh);
  WideHi intercept = fb - slope * bh;
  if (intercept < 0) intercept = 0;
  return WarpPiece::linear(Wide(slope), Wide(intercept), b, c);
}

// ---------------------------------------------------------------------------
// Warp factories.

inline WarpFunction euclidean_warp(const Wide& t_max = Wide(1e300)) {
  if (t_max < 1) throw DomainError("T_max must be >= 1");
  return WarpFunction::from_pieces({WarpPiece::linear(1, 0, 0, t_max)});
}

/// f(t) = t on [0, 1] and t^gamma on [1, T_max].
inline WarpFunction power_warp(double gamma, const Wide& t_max = Wide(1e300)) {
  detail::check_exponent(gamma);
  if (!(t_max > 1)) throw DomainError("T_max must be > 1");
  return WarpFunction::from_pieces(
      {WarpPiece::linear(1, 0, 0, 1), WarpPiece::power(gamma, 1, t_max)});
}

/// Exponent of the m-th power window (m = 1, 2, ...): slow windows
/// t^(1/(l+1)) alternate with fast windows t^(1 - 1/(l+1)).
inline double window_exponent(int m) {
  const int stage = (m + 1) / 2;
  const double a = 1.0 / (stage + 1.0);
  return (m % 2 == 1) ? a : 1.0 - a;
}

/// Oscillating warp with n_stages slow/fast window pairs.  The schedule is
/// R_0 = 1 and, for each window m, R_{2m-1} = max((R_{2m-2}+1)^2 + 2,
/// join threshold - 1) and R_{2m} = (R_{2m-1}+1)^2 + 2.  Window m covers
/// [R_{2m-1}+1, R_{2m}-1] and consecutive windows are joined by chords.
inline WarpFunction build_oscillating_warp(int n_stages,
                                           const Wide& schedule_cap) {
  if (n_stages < 1) throw DomainError("n_stages must be >= 1");
  std::vector<BigInt> sched{BigInt(1)};
  std::vector<WarpPiece> pieces{WarpPiece::linear(1, 0, 0, 1)};

  auto check_cap = [&](const BigInt& r) {
    if (Wide(r) > schedule_cap)
      throw CapExceeded("schedule exceeds the cap before stage " +
                        std::to_string(n_stages) + " completes");
  };

  Wide b = 1;          // end of the previous window
  WideHi fb = 1;       // f(b)
  double alpha = 1.0;  // exponent left of the join
  for (int m = 1; m <= 2 * n_stages; ++m) {
    const double beta = window_exponent(m);
    const BigInt& prev = sched.back();
    BigInt start = (prev + 1) * (prev + 1) + 2;
    const double ln_b = log_of(b);
    const double d = detail::join_point_log(alpha, beta, ln_b, 1e7);
    const BigInt threshold = ceil_from_log(ln_b + d);
    if (threshold - 1 > start) start = threshold - 1;
    // c = R + 1 must clear the join test; bump if rounding left it short.
    for (int guard = 0;; ++guard) {
      const double dc = log_of(BigInt(start + 1)) - ln_b;
      if (detail::concave_join_log(alpha, beta, ln_b, dc)) break;
      if (guard > 64) throw IterationLimit("could not place join point");
      start += start / 1000000 + 1;
    }
    check_cap(start);
    sched.push_back(start);
    BigInt end = (start + 1) * (start + 1) + 2;
    check_cap(end);
    sched.push_back(end);

    const Wide c = wide_of(start + 1);
    const Wide e = wide_of(end - 1);
    const WideHi fc = mp::pow(WideHi(c), WideHi(beta));
    pieces.push_back(chord_piece(b, fb, c, fc));
    pieces.push_back(WarpPiece::power(beta, c, e));
    b = e;
    fb = mp::pow(WideHi(e), WideHi(beta));
    alpha = beta;
  }
  return WarpFunction::from_pieces(std::move(pieces), std::move(sched),
                                   n_stages);
}

// ---------------------------------------------------------------------------
// Evaluation.

inline void check_in_domain(const WarpFunction& w, double t) {
  if (!(t >= 0.0) || t > w.t_max_d())
    throw DomainError("radius outside [0, T_max]");
}

inline double eval(const WarpFunction& w, double t) {
  check_in_domain(w, t);
  if (t == 0.0) return 0.0;
  const auto& p = w.pieces()[w.piece_index(t)];
  const double v = p.value(t);
  if (std::isfinite(v) && v > 0.0) return v;
  return std::exp(p.log_value(std::log(t)));
}

/// ln f(t) for any radius, including those beyond double range.
inline double eval_log(const WarpFunction& w, const Radius& t) {
  if (t.log() > w.log_t_max() + 1e-12)
    throw DomainError("radius outside [0, T_max]");
  return w.pieces()[w.piece_index_log(t.log())].log_value(t.log());
}

struct Slopes {
  double left = 0.0;
  double right = 0.0;
};

namespace detail {

inline bool near_junction(const WarpPiece& p, double t) {
  return std::isfinite(p.hi_d()) && std::fabs(t - p.hi_d()) <= 1e-12 * p.hi_d();
}

}  // namespace detail

/// One-sided derivatives; they differ only at junctions.
inline Slopes eval_slopes(const WarpFunction& w, double t) {
  check_in_domain(w, t);
  const auto& ps = w.pieces();
  const std::size_t i = w.piece_index(t);
  if (i > 0 && detail::near_junction(ps[i - 1], t))
    return {ps[i - 1].derivative(t), ps[i].derivative(t)};
  if (i + 1 < ps.size() && detail::near_junction(ps[i], t))
    return {ps[i].derivative(t), ps[i + 1].derivative(t)};
  const double s = ps[i].derivative(t);
  return {s, s};
}

struct CurvatureRange {
  double low = 0.0;   // -f''/f
  double high = 0.0;  // (1 - f'^2)/f^2
};

/// Bounds on the sectional curvatures at radius t: every sectional
/// curvature lies between -f''/f and (1 - f'^2)/f^2.
inline CurvatureRange curvature_range(const WarpFunction& w, double t) {
  check_in_domain(w, t);
  if (!(t > 0.0)) throw DomainError("curvature needs t > 0");
  const auto& ps = w.pieces();
  const std::size_t i = w.piece_index(t);
  if ((i > 0 && detail::near_junction(ps[i - 1], t)) ||
      (i + 1 < ps.size() && detail::near_junction(ps[i], t)))
    throw BreakpointError("f'' is undefined at a junction");
  const auto& p = ps[i];
  const double f = p.value(t);
  const double d1 = p.derivative(t);
  const double d2 = p.second_derivative(t);
  return {-d2 / f, -std::expm1(2.0 * std::log(d1)) / (f * f)};
}

/// Log-space variant for radii beyond double range; values that underflow
/// come back as 0.
inline CurvatureRange curvature_range(const WarpFunction& w, const Radius& t) {
  if (t.fits_double() && t.value() <= w.t_max_d())
    return curvature_range(w, t.value());
  if (t.log() > w.log_t_max()) throw DomainError("radius outside [0, T_max]");
  const auto& p = w.pieces()[w.piece_index_log(t.log())];
  const double ln_t = t.log();
  if (std::fabs(ln_t - p.log_lo()) < 1e-12 || std::fabs(ln_t - p.log_hi()) < 1e-12)
    throw BreakpointError("f'' is undefined at a junction");
  const double ln_f = p.log_value(ln_t);
  const double ln_d1 = p.log_derivative(ln_t);
  double low = 0.0;
  if (p.is_power()) {
    const double g = p.gamma();
    low = g < 1.0 ? std::exp(std::log(g * (1.0 - g)) - 2.0 * ln_t) : 0.0;
  }
  const double one_minus = -std::expm1(2.0 * ln_d1);
  const double high =
      one_minus > 0.0 ? std::exp(std::log(one_minus) - 2.0 * ln_f) : one_minus;
  return {low, high};
}

// ---------------------------------------------------------------------------
// Invariant checks.

struct InvariantReport {
  std::vector<std::string> violations;
  double max_continuity_residual = 0.0;  // relative, at junctions
  bool ok() const { return violations.empty(); }
};

inline InvariantReport validate(const WarpFunction& w) {
  InvariantReport rep;
  const auto& ps = w.pieces();
  auto fail = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };

  for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
    const double ln_b = ps[i].log_hi();
    const double fl = ps[i].log_value(ln_b);
    const double fr = ps[i + 1].log_value(ln_b);
    const double res = std::fabs(std::expm1(fl - fr));
    rep.max_continuity_residual = std::max(rep.max_continuity_residual, res);
    if (!(res < 1e-9)) fail("discontinuity at junction " + std::to_string(i));
    const double sl = ps[i].log_derivative(ln_b);
    const double sr = ps[i + 1].log_derivative(ln_b);
    if (sr > sl + 1e-12)
      fail("slope increases (convex kink) at junction " + std::to_string(i));
    if (fl > ln_b + 1e-12) fail("f(t) > t at junction " + std::to_string(i));
  }
  const auto& s = w.schedule();
  for (std::size_t j = 0; j + 1 < s.size(); ++j) {
    if (!(s[j + 1] > (s[j] + 1) * (s[j] + 1) + 1))
      fail("schedule inequality fails at j = " + std::to_string(j));
  }
  if (!s.empty() && s.front() != 1) fail("schedule must start at R_0 = 1");
  return rep;
}

}  // namespace warplab
