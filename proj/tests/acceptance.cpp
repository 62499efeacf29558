#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "support/dijkstra_oracle.hpp"
#include "support/slope_oracle.hpp"
#include "warplab/warplab.hpp"

using namespace warplab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? " ok" : " FAILED");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const RotSymManifold& euclid() {
  static const auto m = RotSymManifold::create(2, euclidean_warp());
  return m;
}
const RotSymManifold& root() {
  static const auto m = RotSymManifold::create(2, power_warp(0.5));
  return m;
}
const RotSymManifold& osc() {
  static const auto m =
      RotSymManifold::create(2, build_oscillating_warp(3, parse_wide("1e5000")));
  return m;
}

double mid_log(const PowerWindow& w) { return 0.5 * (log_of(w.lo) + log_of(w.hi)); }

void euclidean_sanity(Outcome& o) {
  double worst = 0.0;
  for (double R : {0.1, 1.0, 3.0, 10.0, 1e3, 1e6})
    worst = std::max(worst, std::fabs(ball_volume(euclid(), R) / (kPi * R * R) - 1.0));
  o.require(worst <= 1e-8, "ball volume rel err " + num(worst));
  const double d = distance(euclid(), 3, 4, kPi / 2);
  o.require(std::fabs(d - 5.0) <= 1e-4, "distance(3,4,pi/2) = " + num(d));
  double dworst = 0.0;
  for (double R : {0.5, 1.0, 7.0, 100.0}) dworst = std::max(dworst, std::fabs(sphere_diameter(euclid(), R) - 2 * R));
  o.require(dworst <= 1e-4, "sphere diameter err " + num(dworst));
  const auto s = sample_rescaled_ball(euclid(), Radius::of(1.0), 1.0, 60, 60);
  const auto est = upper_box_dimension(s, 0.02, 0.2, 8);
  o.require(std::fabs(est.dim_slope - 2.0) <= 0.15, "box dimension " + num(est.dim_slope));
}

void paraboloid_order(Outcome& o) {
  const Radius R = Radius::of(1e6);
  const double order = log_ball_volume(root(), R) / R.log();
  o.require(std::fabs(order - 1.5) <= 0.01, "order at 1e6 = " + num(order));
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(std::pow(10.0, 0.25 * i));
  double worst = 0.0;
  for (const auto& p : diameter_ratio_curve(root(), grid))
    worst = std::max(worst, p.ratio / (kPi / std::sqrt(p.R)));
  o.require(worst <= 1.0 + 1e-12, "diameter ratio / (pi R^-1/2) max " + num(worst));
}

void oscillation(Outcome& o) {
  const auto wins = osc().warp().power_windows();
  const auto& slow = wins[4];
  const auto& fast = wins[5];
  const auto cs = growth_curve(osc(), log_grid(log_of(slow.lo), log_of(slow.hi), 400));
  const auto cf = growth_curve(osc(), log_grid(log_of(fast.lo), log_of(fast.hi), 400));
  const double iv = estimate_iv_sv(cs, 1.0).iv;
  const double sv = estimate_iv_sv(cf, 1.0).sv;
  o.require(iv <= 1.0 + 0.25 + 0.1, "slow-window tail min " + num(iv));
  o.require(sv >= 2.0 - 0.25 - 0.1, "fast-window tail max " + num(sv));
  const auto& s = osc().warp().schedule();
  bool grows = true;
  for (std::size_t j = 0; j + 1 < s.size(); ++j) grows = grows && s[j + 1] > (s[j] + 1) * (s[j] + 1) + 1;
  o.require(grows, "schedule growth over " + std::to_string(s.size()) + " entries");
  o.require(check_concave_join(1.0, 0.5, 2.0, 16.0), "join(1, 1/2, 2, 16)");
}

void comparison_validators(Outcome& o) {
  std::vector<std::pair<std::string, WarpFunction>> warps;
  warps.emplace_back("euclidean", euclidean_warp());
  for (double g : {0.1, 0.25, 0.5, 0.75, 1.0}) warps.emplace_back("power " + num(g), power_warp(g));
  for (int L = 1; L <= 3; ++L)
    warps.emplace_back("oscillating " + std::to_string(L),
                       build_oscillating_warp(L, parse_wide("1e5000")));
  int failures = 0;
  for (const auto& [name, w] : warps) {
    for (int n : {2, 3, 5}) {
      const auto M = RotSymManifold::create(n, w);
      const double top = std::min(M.log_t_max(), 8000.0);
      const auto grid = log_grid(0.0, top, 600);
      const double b = check_bishop(M, grid);
      const double y = check_yau_linear(M, grid);
      const bool bg = check_bishop_gromov(M, grid).passed;
      double kmin = kInf;
      for (const auto& t : log_grid(std::log(1e-3), top - 1e-9, 1000)) {
        const auto k = curvature_range(w, t);
        kmin = std::min({kmin, k.low, k.high});
      }
      const bool ok = b <= 1.0 + 1e-9 && y > 0.0 && bg && kmin >= 0.0;
      if (!ok) {
        ++failures;
        o.detail << name << " n=" << n << " bishop " << num(b) << " yau " << num(y)
                 << " bg " << bg << " kmin " << num(kmin) << "; ";
      }
    }
  }
  o.require(failures == 0, std::to_string(warps.size() * 3) + " warp/dimension pairs");
}

void slope_lemma(Outcome& o) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0, checked = 0;
  while (checked < 100) {
    std::vector<double> x{1.0 + 3.0 * u(rng)}, F{5.0 * u(rng)};
    const int n = 40 + static_cast<int>(rng() % 200);
    for (int i = 1; i < n; ++i) {
      x.push_back(x.back() + 0.01 + 0.3 * u(rng));
      F.push_back(F.back() + (u(rng) < 0.2 ? 0.0 : 3.0 * u(rng) * u(rng)));
    }
    const double k = 0.5 + 2.0 * u(rng), l = 1.5 + 4.0 * u(rng);
    if (x.front() + l > x.back()) continue;
    ++checked;
    if (slope_scales(MonotoneTrace(x, F), k, l).r !=
        warplab::testing::brute_force_scales(x, F, k, l, 0.05))
      ++mismatches;
  }
  o.require(mismatches == 0, "oracle mismatches " + std::to_string(mismatches) + "/100");

  int empty = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double k = 0.5 + 2.0 * u(rng);
    const double a = k * (0.2 + 0.8 * u(rng)), p = 0.3 + 0.7 * u(rng);
    const double b = (k - a) * u(rng);
    std::vector<double> x, F;
    for (int i = 0; i <= 800; ++i) {
      x.push_back(1.0 + 0.05 * i);
      F.push_back(a * std::pow(x.back(), p) + b * x.back());
    }
    for (double l : {2.0, 5.0, 10.0})
      if (slope_scales(MonotoneTrace(x, F), k, l).r.empty()) ++empty;
  }
  o.require(empty == 0, "empty outputs on concave traces " + std::to_string(empty) + "/300");
}

void renormalized_profile_bound(Outcome& o) {
  const auto wins = osc().warp().power_windows();
  const double x_hi = log_of(wins[5].hi);
  const auto trace = log_volume_trace(osc(), 1.0, x_hi, 0.05);
  double tail_min = kInf;
  // tail = the deepest stage, from the start of its slow window
  for (std::size_t i = 0; i < trace.x().size(); ++i)
    if (trace.x()[i] >= log_of(wins[4].lo))
      tail_min = std::min(tail_min, trace.F()[i] / trace.x()[i]);
  const double k = tail_min + 1.0 / 3.0;
  const auto s = slope_scales(trace, k, 3.0);
  int violations = 0;
  const std::vector<double> ts{1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<double> grid;
  for (double t : ts) grid.push_back(std::exp(t));
  for (double r : s.r) {
    const auto prof = renormalized_profile(osc(), Radius::from_log(r), grid);
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (prof[i].ratio > std::exp((k + 1.0 / 3.0) * ts[i]) * (1.0 + 1e-12)) ++violations;
  }
  o.require(!s.r.empty(), "tail min " + num(tail_min) + ", " + std::to_string(s.r.size()) + " scales");
  o.require(violations == 0, "violations " + std::to_string(violations));
}

void distance_oracle(Outcome& o) {
  std::mt19937_64 rng(7);
  const std::vector<const RotSymManifold*> ms{&euclid(), &root(), &osc()};
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const ScaledProfile P(ms[i % 3]->warp());
    const double dt = 0.1;
    const double a = dt * (1 + rng() % 300), b = dt * (1 + rng() % 300);
    const double th = std::uniform_real_distribution<double>(0.05, kPi)(rng);
    const double d = distance(P, a, b, th);
    const double g = warplab::testing::grid_distance(P, a, b, th, {dt, 8});
    const double rel = std::fabs(d - g) / g;
    worst = std::max(worst, rel);
    if (rel > 0.01) ++bad;
  }
  o.require(bad == 0, "200 oracle triples, worst rel " + num(worst));

  auto gap = [](double x, double y) { return std::min(std::fabs(std::remainder(x - y, 2 * kPi)), kPi); };
  std::uniform_real_distribution<double> t(0.0, 80.0), ang(0.0, 2 * kPi);
  int broken = 0;
  for (int i = 0; i < 1000; ++i) {
    const ScaledProfile P(ms[i % 3]->warp());
    const double t1 = t(rng), t2 = t(rng), t3 = t(rng);
    const double p1 = ang(rng), p2 = ang(rng), p3 = ang(rng);
    const double d12 = distance(P, t1, t2, gap(p1, p2));
    const double d13 = distance(P, t1, t3, gap(p1, p3));
    const double d23 = distance(P, t2, t3, gap(p2, p3));
    const double tol = 1e-6 * std::max({d12, d13, d23});
    if (d13 > d12 + d23 + tol || d12 > d13 + d23 + tol || d23 > d12 + d13 + tol) ++broken;
  }
  o.require(broken == 0, "triangle violations " + std::to_string(broken) + "/1000");
}

void ray_and_dimension(Outcome& o) {
  const auto wins = osc().warp().power_windows();
  const Radius r_slow = Radius::from_log(mid_log(wins[4]));
  const Radius r_fast = Radius::from_log(mid_log(wins[5]));
  const double R = 1.0;
  const double tol = kPi * std::exp(eval_log(osc().warp(), r_slow.scaled(R)) - r_slow.log()) + 0.02;
  const auto ray = ray_check(osc(), r_slow, R, tol);
  o.require(ray.is_ray, "slow-window ray, distortion " + num(ray.distortion) + " tol " + num(tol));
  bool euclid_ray = false;
  for (double r : {1e-3, 1.0, 100.0, 1e6, 1e100})
    euclid_ray = euclid_ray || detect_ray_limit(euclid(), Radius::of(r), R, 0.1);
  o.require(!euclid_ray, "euclidean never a ray");

  const auto ss = sample_rescaled_ball(osc(), r_slow, R, 40, 40);
  const auto sf = sample_rescaled_ball(osc(), r_fast, R, 40, 40);
  const double ds = upper_box_dimension(ss, 0.02, 0.2, 8).dim_slope;
  const double df = upper_box_dimension(sf, 0.02, 0.2, 8).dim_slope;
  o.require(ds <= 1.3, "slow-window box slope " + num(ds));
  o.require(df >= 1.6, "fast-window box slope " + num(df));
}

std::size_t exhaustive(const MetricSample& s, double eps) {
  const std::size_t n = s.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto c = static_cast<std::size_t>(__builtin_popcount(mask));
    if (c <= best) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if ((mask >> i & 1) && (mask >> j & 1) && s(i, j) < eps) ok = false;
    if (ok) best = c;
  }
  return best;
}

void capacity_exactness(Outcome& o) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    std::vector<std::pair<double, double>> p(n);
    for (auto& q : p) q = {u(rng), u(rng)};
    std::vector<std::vector<double>> d(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::hypot(p[i].first - p[j].first, p[i].second - p[j].second);
    const auto s = MetricSample::from_matrix(d);
    const double eps = 0.05 + 0.75 * u(rng);
    if (capacity(s, eps) != exhaustive(s, eps)) ++mismatches;
  }
  o.require(mismatches == 0, "mismatches " + std::to_string(mismatches) + "/1000");
  std::vector<std::vector<double>> line(10, std::vector<double>(10));
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) line[i][j] = std::abs(i - j);
  const auto c = capacity(MetricSample::from_matrix(line), 2.5);
  o.require(c == 4, "collinear capacity " + std::to_string(c));
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"Euclidean sanity", 60, euclidean_sanity},
      {"paraboloid order", 30, paraboloid_order},
      {"oscillation", 60, oscillation},
      {"comparison validators", 120, comparison_validators},
      {"slope lemma", 60, slope_lemma},
      {"renormalized profile", 60, renormalized_profile_bound},
      {"distance oracle", 300, distance_oracle},
      {"ray detection and dimension contrast", 300, ray_and_dimension},
      {"capacity exactness", 60, capacity_exactness},
  };
  return list;
}

bool run_one(int index) {
  const auto& c = criteria()[index - 1];
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    c.run(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs <= c.budget_s, "runtime " + num(secs) + " s");
  std::printf("criterion %d (%s): %s [%s]\n", index, c.name, o.pass ? "PASS" : "FAIL",
              o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const int n = static_cast<int>(criteria().size());
  if (argc > 1) {
    const int index = std::atoi(argv[1]);
    if (index < 1 || index > n) {
      std::fprintf(stderr, "usage: acceptance [1-%d]\n", n);
      return 2;
    }
    return run_one(index) ? 0 : 1;
  }
  bool all = true;
  for (int i = 1; i <= n; ++i) all = run_one(i) && all;
  return all ? 0 : 1;
}
