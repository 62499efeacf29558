#pragma once

// Finite samples of rescaled balls r^-1 B_{rR}(p), packing numbers, box
// dimension slopes and the radial-projection test for ray-like cones.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "warplab/geodesy.hpp"
#include "warplab/io.hpp"
#include "warplab/parallel.hpp"

namespace warplab {

class MetricSample {
 public:
  MetricSample() = default;

  /// dist holds the strict upper triangle in row-major order.
  MetricSample(std::vector<double> t, std::vector<double> theta,
               std::vector<double> dist, double log_scale = 0.0)
      : t_(std::move(t)), theta_(std::move(theta)), dist_(std::move(dist)),
        log_scale_(log_scale) {
    if (t_.size() != theta_.size()) throw DomainError("t and theta differ in length");
    const std::size_t n = t_.size();
    if (dist_.size() != n * (n - (n ? 1 : 0)) / 2)
      throw DomainError("distance triangle has the wrong size");
  }

  /// Synthetic sample from a full symmetric matrix; t/theta are set to 0.
  static MetricSample from_matrix(const std::vector<std::vector<double>>& d) {
    const std::size_t n = d.size();
    std::vector<double> tri;
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i].size() != n) throw DomainError("matrix must be square");
      for (std::size_t j = i + 1; j < n; ++j) tri.push_back(d[i][j]);
    }
    return MetricSample(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                        std::move(tri));
  }

  std::size_t size() const { return t_.size(); }
  double log_scale() const { return log_scale_; }
  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& triangle() const { return dist_; }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return dist_[index(i, j)];
  }

  double diameter() const {
    double d = 0.0;
    for (double v : dist_) d = std::max(d, v);
    return d;
  }

  std::size_t index(std::size_t i, std::size_t j) const {
    const std::size_t n = size();
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

 private:
  std::vector<double> t_, theta_, dist_;
  double log_scale_ = 0.0;
};

inline constexpr double kMaxSampleEntries = 2e7;

/// Polar grid of r^-1 B_{rR}(p): n_t radii on [0, R], n_theta angles on
/// [0, pi], the pole kept once.  Distances are those of r^-1 M.
inline MetricSample sample_rescaled_ball(const RotSymManifold& M, const Radius& r,
                                         double R, int n_t, int n_theta) {
  if (n_t < 1 || n_theta < 1) throw DomainError("grid counts must be >= 1");
  if (!(R > 0.0)) throw DomainError("R must be positive");
  if (r.log() + std::log(R) > M.log_t_max() + 1e-12)
    throw DomainError("r R exceeds T_max");
  const std::size_t npts =
      1 + static_cast<std::size_t>(n_t - 1) * static_cast<std::size_t>(n_theta);
  if (static_cast<double>(npts) * static_cast<double>(npts) > kMaxSampleEntries)
    throw SizeCapExceeded("sample matrix would exceed 2e7 entries");

  std::vector<double> radii(n_t);
  for (int i = 0; i < n_t; ++i) radii[i] = n_t == 1 ? 0.0 : R * i / (n_t - 1.0);
  radii.back() = n_t == 1 ? 0.0 : R;
  const double dtheta = n_theta == 1 ? 0.0 : kPi / (n_theta - 1.0);

  std::vector<double> t{0.0}, theta{0.0};
  for (int i = 1; i < n_t; ++i)
    for (int a = 0; a < n_theta; ++a) {
      t.push_back(radii[i]);
      theta.push_back(a == n_theta - 1 ? kPi : a * dtheta);
    }
  const std::size_t n = t.size();
  std::vector<double> dist(n * (n - 1) / 2, 0.0);
  MetricSample shell(t, theta, dist, r.log());

  const ScaledProfile P(M.warp(), r);
  auto point = [&](int ring, int a) -> std::size_t {
    return ring == 0 ? 0 : 1 + static_cast<std::size_t>(ring - 1) * n_theta + a;
  };

  // one distance table per pair of rings, queried at the angle differences
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n_t; ++i)
    for (int j = i; j < n_t; ++j)
      if (!(i == 0 && j == 0)) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const DistanceTable table(P, radii[i], radii[j]);
    std::vector<double> by_diff(n_theta);
    for (int d = 0; d < n_theta; ++d)
      by_diff[d] = table(d == n_theta - 1 ? kPi : d * dtheta);
    const int na = i == 0 ? 1 : n_theta;
    for (int a = 0; a < na; ++a)
      for (int b = 0; b < n_theta; ++b) {
        const std::size_t p = point(i, a), q = point(j, b);
        if (p >= q) continue;
        dist[shell.index(p, q)] = by_diff[std::abs(a - b)];
      }
  });
  return MetricSample(std::move(t), std::move(theta), std::move(dist), r.log());
}

// ---------------------------------------------------------------------------
// Packing.

namespace detail {

/// Farthest-point insertion radii: the k-th inserted point lies at distance
/// radii[k] from all earlier ones, and radii is nonincreasing.
inline std::vector<double> farthest_point_radii(const MetricSample& s,
                                                std::size_t start) {
  const std::size_t n = s.size();
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<char> used(n, 0);
  std::vector<double> radii;
  radii.reserve(n);
  std::size_t cur = start;
  double cur_r = std::numeric_limits<double>::infinity();
  for (std::size_t step = 0; step < n; ++step) {
    used[cur] = 1;
    radii.push_back(cur_r);
    std::size_t next = n;
    double best = -1.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (used[v]) continue;
      nearest[v] = std::min(nearest[v], s(cur, v));
      if (nearest[v] > best) {
        best = nearest[v];
        next = v;
      }
    }
    if (next == n) break;
    cur = next;
    cur_r = best;
  }
  return radii;
}

/// Maximum set of vertices with no conflict edge; adj[i] is a bitmask.
inline int max_independent_set(const std::vector<std::uint32_t>& adj,
                               std::uint32_t candidates, int chosen, int best) {
  if (candidates == 0) return std::max(best, chosen);
  if (chosen + __builtin_popcount(candidates) <= best) return best;
  const int v = __builtin_ctz(candidates);
  const std::uint32_t bit = 1u << v;
  best = max_independent_set(adj, candidates & ~bit & ~adj[v], chosen + 1, best);
  return max_independent_set(adj, candidates & ~bit, chosen, best);
}

}  // namespace detail

inline constexpr std::size_t kExactPackingLimit = 24;
inline constexpr int kPackingRestarts = 32;

/// Largest eps-separated subset (pairwise distance >= eps) by exhaustive
/// branch and bound; only for samples of at most 24 points.
inline std::size_t exact_capacity(const MetricSample& s, double eps) {
  const std::size_t n = s.size();
  if (n > kExactPackingLimit) throw SizeCapExceeded("exact packing is limited to 24 points");
  if (n == 0) return 0;
  std::vector<std::uint32_t> adj(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && s(i, j) < eps) adj[i] |= 1u << j;
  const std::uint32_t all = n == 32 ? ~0u : ((1u << n) - 1u);
  return static_cast<std::size_t>(detail::max_independent_set(adj, all, 0, 0));
}

/// Capacities at many eps from one set of farthest-point runs.
class PackingCounter {
 public:
  explicit PackingCounter(const MetricSample& s, std::uint64_t seed = 0)
      : sample_(&s) {
    if (s.size() <= kExactPackingLimit || s.size() == 0) return;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
    std::vector<std::size_t> starts(kPackingRestarts);
    for (auto& st : starts) st = pick(rng);
    runs_.resize(starts.size());
    parallel_for(starts.size(), [&](std::size_t k) {
      runs_[k] = detail::farthest_point_radii(s, starts[k]);
    });
  }

  std::size_t operator()(double eps) const {
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    if (runs_.empty()) return exact_capacity(*sample_, eps);
    std::size_t best = 0;
    for (const auto& radii : runs_) {
      const auto it = std::partition_point(
          radii.begin(), radii.end(), [&](double r) { return r >= eps; });
      best = std::max(best, static_cast<std::size_t>(it - radii.begin()));
    }
    return best;
  }

 private:
  const MetricSample* sample_;
  std::vector<std::vector<double>> runs_;
};

/// Size of an eps-separated subset: exact for <= 24 points, otherwise the
/// best farthest-point packing over 32 seeded restarts (a lower bound).
inline std::size_t capacity(const MetricSample& s, double eps, std::uint64_t seed = 0) {
  return PackingCounter(s, seed)(eps);
}

struct CapacityEstimate {
  std::vector<double> eps;
  std::vector<std::size_t> counts;
  double dim_slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the fit in ln(count)
  double slope_stderr = 0.0;
};

/// Least-squares slope of ln Cap(eps) against ln(1/eps) on n_eps
/// log-spaced values of eps in [lo, hi].
inline CapacityEstimate upper_box_dimension(const MetricSample& s, double lo,
                                            double hi, int n_eps,
                                            std::uint64_t seed = 0) {
  if (s.size() < 2) throw DegenerateRegression("sample has fewer than two points");
  if (!(lo > 0.0 && lo < hi)) throw DomainError("need 0 < lo < hi");
  if (!(hi < s.diameter())) throw DomainError("hi must be below the sample diameter");
  if (n_eps < 4) throw DomainError("n_eps must be >= 4");
  const PackingCounter counter(s, seed);
  CapacityEstimate est;
  std::vector<double> xs, ys;
  for (int i = 0; i < n_eps; ++i) {
    const double e = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n_eps - 1.0));
    est.eps.push_back(e);
    est.counts.push_back(counter(e));
    xs.push_back(-std::log(e));
    ys.push_back(std::log(static_cast<double>(est.counts.back())));
  }
  if (std::all_of(est.counts.begin(), est.counts.end(),
                  [&](std::size_t c) { return c == est.counts.front(); }))
    throw DegenerateRegression("all packing counts are equal");
  const double n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  est.dim_slope = sxy / sxx;
  est.intercept = my - est.dim_slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (est.intercept + est.dim_slope * xs[i]);
    ss += e * e;
  }
  est.residual = std::sqrt(ss / n);
  est.slope_stderr = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
  return est;
}

// ---------------------------------------------------------------------------

struct RatioPoint {
  double R = 0.0;
  double ratio = 0.0;
};

/// diam(S_R(p)) / R along the grid.
inline std::vector<RatioPoint> diameter_ratio_curve(const RotSymManifold& M,
                                                    const std::vector<double>& R_grid) {
  const ScaledProfile P(M.warp());
  std::vector<RatioPoint> out(R_grid.size());
  parallel_for(R_grid.size(), [&](std::size_t i) {
    const double R = R_grid[i];
    if (!(R > 0.0)) throw DomainError("R must be positive");
    out[i] = {R, distance(P, R, R, kPi) / R};
  });
  return out;
}

/// Largest | d(x, y) - |t_x - t_y| | over a sample: the distortion of the
/// radial projection onto [0, R].
inline double radial_distortion(const MetricSample& s) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      worst = std::max(worst, std::fabs(s(i, j) - std::fabs(s.t()[i] - s.t()[j])));
  return worst;
}

struct RayCheck {
  bool is_ray = false;
  double distortion = 0.0;
};

inline RayCheck ray_check(const RotSymManifold& M, const Radius& r, double R,
                          double tol, int n_t = 24, int n_theta = 24) {
  if (!(tol >= 0.0)) throw DomainError("tol must be >= 0");
  const auto s = sample_rescaled_ball(M, r, R, n_t, n_theta);
  const double d = radial_distortion(s);
  return {d <= tol, d};
}

/// True iff the rescaled ball sample is tol-close to its radial projection.
inline bool detect_ray_limit(const RotSymManifold& M, const Radius& r, double R,
                             double tol, int n_t = 24, int n_theta = 24) {
  return ray_check(M, r, R, tol, n_t, n_theta).is_ray;
}

// ---------------------------------------------------------------------------
// Text formats.

inline std::string points_csv(const MetricSample& s) {
  std::string out = "t,theta\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out += format_double(s.t()[i]) + ',' + format_double(s.theta()[i]) + '\n';
  return out;
}

inline std::string dist_csv(const MetricSample& s) {
  std::string out = "i,j,dist\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      out += std::to_string(i) + ',' + std::to_string(j) + ',' +
             format_double(s(i, j)) + '\n';
  return out;
}

inline MetricSample sample_from_csv(const std::string& points, const std::string& dist,
                                    double log_scale = 0.0) {
  const auto pt = parse_csv(points);
  const auto dt = parse_csv(dist);
  if (pt.header != std::vector<std::string>{"t", "theta"} ||
      dt.header != std::vector<std::string>{"i", "j", "dist"})
    throw ParseError("unexpected sample CSV header");
  std::vector<double> t, theta;
  for (const auto& row : pt.rows) {
    t.push_back(csv_double(row[0]));
    theta.push_back(csv_double(row[1]));
  }
  const std::size_t n = t.size();
  std::vector<double> tri(n * (n ? n - 1 : 0) / 2, 0.0);
  if (dt.rows.size() != tri.size()) throw ParseError("dist.csv has the wrong row count");
  MetricSample shell(t, theta, tri);
  for (const auto& row : dt.rows) {
    const auto i = static_cast<std::size_t>(std::stoull(row[0]));
    const auto j = static_cast<std::size_t>(std::stoull(row[1]));
    if (!(i < j && j < n)) throw ParseError("bad index pair in dist.csv");
    tri[shell.index(i, j)] = csv_double(row[2]);
  }
  return MetricSample(std::move(t), std::move(theta), std::move(tri), log_scale);
}

inline std::string capacity_csv(const CapacityEstimate& e) {
  std::string out = "eps,count\n";
  for (std::size_t i = 0; i < e.eps.size(); ++i)
    out += format_double(e.eps[i]) + ',' + std::to_string(e.counts[i]) + '\n';
  return out;
}

inline std::string capacity_json(const CapacityEstimate& e) {
  return "{\n  \"dim_slope\": " + format_double(e.dim_slope) +
         ",\n  \"residual\": " + format_double(e.residual) +
         ",\n  \"slope_stderr\": " + format_double(e.slope_stderr) +
         ",\n  \"intercept\": " + format_double(e.intercept) +
         ",\n  \"n_eps\": " + std::to_string(e.eps.size()) + "\n}\n";
}

}  // namespace warplab
