#pragma once

// Number types, log-space helpers and C-locale decimal formatting shared by
// every warplab module.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "warplab/errors.hpp"

namespace warplab {

namespace mp = boost::multiprecision;

/// Double-precision mantissa with a 32-bit binary exponent.  Oscillating
/// schedules leave the range of `double` after a couple of stages.
using Wide = mp::number<
    mp::cpp_bin_float<53, mp::digit_base_2, void, std::int32_t, -200000000,
                      200000000>,
    mp::et_off>;

/// Extra working precision for chord construction; rounded back to Wide.
using WideHi = mp::number<
    mp::cpp_bin_float<128, mp::digit_base_2, void, std::int32_t, -200000000,
                      200000000>,
    mp::et_off>;

using BigInt = mp::cpp_int;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLn10 = std::numbers::ln10;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(1 - e^x) for x <= 0.
inline double log1mexp(double x) {
  if (x > 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0.0) return -kInf;
  return x > -std::numbers::ln2 ? std::log(-std::expm1(x))
                                : std::log1p(-std::exp(x));
}

/// log(e^a + e^b).
inline double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

inline double log_of(const Wide& w) {
  if (w <= 0) return -kInf;
  return mp::log(w).convert_to<double>();
}

inline double log_of(const BigInt& v) {
  if (v <= 0) return -kInf;
  const auto bits = static_cast<long>(mp::msb(v));
  if (bits < 62) return std::log(v.convert_to<double>());
  const long shift = bits - 62;
  const BigInt top = v >> shift;
  return std::log(top.convert_to<double>()) +
         static_cast<double>(shift) * std::numbers::ln2;
}

inline Wide wide_of(const BigInt& v) { return Wide(v); }

/// Returns +inf when w exceeds the range of double.
inline double to_double(const Wide& w) { return w.convert_to<double>(); }

inline Wide wide_from_log(double ln) {
  if (ln == -kInf) return Wide(0);
  if (std::fabs(ln) < 700.0) return Wide(std::exp(ln));
  return mp::exp(Wide(ln));
}

/// Smallest integer that is >= e^ln (up to a one-ulp safety bump).
inline BigInt ceil_from_log(double ln) {
  if (ln < 36.0) {
    const double v = std::ceil(std::exp(ln) * (1.0 + 4e-16));
    return BigInt(static_cast<std::int64_t>(v));
  }
  const double e2 = ln / std::numbers::ln2;
  const auto k = static_cast<long>(std::floor(e2)) - 60;
  const double mant = std::ceil(std::exp2(e2 - static_cast<double>(k)) *
                                (1.0 + 1e-14));
  BigInt out(static_cast<std::uint64_t>(mant));
  out <<= k;
  return out;
}

/// A positive radius kept by its natural log, plus the exact double value
/// when the radius was given as one.
class Radius {
 public:
  Radius() = default;

  static Radius of(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
      throw DomainError("radius must be positive and finite");
    Radius out;
    out.log_ = std::log(r);
    out.value_ = r;
    return out;
  }

  static Radius from_log(double ln) {
    if (!std::isfinite(ln)) throw DomainError("log radius must be finite");
    Radius out;
    out.log_ = ln;
    out.value_ = ln < 709.0 ? std::exp(ln) : kInf;
    return out;
  }

  static Radius from_wide(const Wide& w) {
    if (w <= 0) throw DomainError("radius must be positive");
    const double d = to_double(w);
    if (std::isfinite(d) && d > 0.0 && Wide(d) == w) return of(d);
    return from_log(log_of(w));
  }

  double log() const { return log_; }
  /// +inf when the radius is beyond double range.
  double value() const { return value_; }
  bool fits_double() const { return std::isfinite(value_); }

  Radius scaled(double factor) const {
    if (fits_double() && std::isfinite(value_ * factor))
      return of(value_ * factor);
    return from_log(log_ + std::log(factor));
  }

  friend bool operator<(const Radius& a, const Radius& b) {
    return a.log_ < b.log_;
  }

 private:
  double log_ = 0.0;
  double value_ = 1.0;
};

// ---------------------------------------------------------------------------
// C-locale decimal text.  snprintf is locale-sensitive only through
// LC_NUMERIC, which warplab never changes from "C".

inline std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// e^ln written with 17 significant digits; exponents beyond double range
/// are written verbatim ("3.1415926535897931e+3612").
inline std::string format_from_log(double ln) {
  if (ln == -kInf) return "0";
  if (std::fabs(ln) < 700.0) return format_double(std::exp(ln));
  const long double l10 = static_cast<long double>(ln) / std::numbers::ln10_v<long double>;
  long double e10 = std::floor(l10);
  long double mant = std::pow(10.0L, l10 - e10);
  if (mant >= 10.0L) {
    mant /= 10.0L;
    e10 += 1.0L;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16fe%+lld", static_cast<double>(mant),
                static_cast<long long>(e10));
  return buf;
}

/// Natural log of a decimal literal of any exponent size.
inline double parse_log_decimal(std::string_view text) {
  std::string s(text);
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("not a number: '" + s + "'");
  if (std::isfinite(d) && d > 0.0 && errno == 0) return std::log(d);
  if (d == 0.0 && errno == 0) return -kInf;
  if (d < 0.0) throw ParseError("expected a positive number: '" + s + "'");
  const auto epos = s.find_first_of("eE");
  if (epos == std::string::npos) throw ParseError("number out of range: " + s);
  const double mant = std::strtod(s.substr(0, epos).c_str(), nullptr);
  const long long e10 = std::strtoll(s.c_str() + epos + 1, nullptr, 10);
  if (!(mant > 0.0)) throw ParseError("expected a positive number: '" + s + "'");
  return std::log(mant) + static_cast<double>(e10) * kLn10;
}

inline std::string format_wide(const Wide& w) {
  if (w == 0) return "0";
  const double d = to_double(w);
  if (std::isfinite(d) && std::fabs(d) >= std::numeric_limits<double>::min() &&
      Wide(d) == w)
    return format_double(d);
  return w.str(16, std::ios_base::scientific);
}

inline Wide parse_wide(std::string_view text) {
  std::string s(text);
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("not a number: '" + s + "'");
  if (errno == 0 && std::isfinite(d) &&
      (d == 0.0 || std::fabs(d) >= std::numeric_limits<double>::min()))
    return Wide(d);
  try {
    return Wide(s);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'");
  }
}

inline BigInt parse_bigint(std::string_view text) {
  std::string s(text);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("expected a nonnegative integer: '" + s + "'");
  return BigInt(s);
}

}  // namespace warplab
