#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support/dijkstra_oracle.hpp"
#include "warplab/geodesy.hpp"

using namespace warplab;

namespace {

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
      RotSymManifold::create(2, build_oscillating_warp(3, parse_wide("1e10000")));
  return m;
}

double law_of_cosines(double a, double b, double th) {
  return std::sqrt(std::max(0.0, a * a + b * b - 2 * a * b * std::cos(th)));
}

}  // namespace

TEST(Distance, PlanarExamples) {
  EXPECT_NEAR(distance(euclid(), 3, 4, kPi / 2), 5.0, 1e-9);
  EXPECT_NEAR(distance(euclid(), 1, 1, kPi), 2.0, 1e-12);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> t(0.0, 50.0), th(0.0, kPi);
  for (int i = 0; i < 200; ++i) {
    const double a = t(rng), b = t(rng), c = th(rng);
    EXPECT_NEAR(distance(euclid(), a, b, c), law_of_cosines(a, b, c),
                1e-8 * std::max(1.0, a + b));
  }
}

TEST(Distance, SameMeridianIsRadial) {
  for (const auto* M : {&euclid(), &root(), &osc()}) {
    EXPECT_DOUBLE_EQ(distance(*M, 7, 2, 0), 5.0);
    EXPECT_DOUBLE_EQ(distance(*M, 0, 9, 2.0), 9.0);
  }
}

TEST(Distance, Bounds) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lt(-2.0, std::log(1e5)), th(0.0, kPi);
  for (const auto* M : {&euclid(), &root(), &osc()}) {
    for (int i = 0; i < 100; ++i) {
      const double a = std::exp(lt(rng)), b = std::exp(lt(rng)), c = th(rng);
      const double d = distance(*M, a, b, c);
      EXPECT_GE(d, std::fabs(a - b) - 1e-12);
      EXPECT_LE(d, a + b + 1e-12);
    }
  }
}

TEST(Distance, ParaboloidAntipodesClosedForm) {
  // for f = t^(1/2) the geodesic turning at R - g has sweep 4 sqrt(R-g) asinh(sqrt(g/(R-g)))
  // and length 2 (sqrt(R g) + (R-g) asinh(sqrt(g/(R-g))))
  for (double R : {1e2, 1e4, 1e8, 5.6e9, 1e14}) {
    using L = long double;
    auto arc = [&](L g) { return std::asinh(std::sqrt(g / (R - g))); };
    L lo = 0, hi = 0.5L * R;
    for (int i = 0; i < 400; ++i) {
      const L mid = (lo + hi) / 2;
      (4 * std::sqrt(R - mid) * arc(mid) < kPi ? lo : hi) = mid;
    }
    const L g = (lo + hi) / 2;
    const double exact = static_cast<double>(2 * (std::sqrt(R * g) + (R - g) * arc(g)));
    EXPECT_NEAR(distance(root(), R, R, kPi), exact, 1e-12 * exact) << R;
  }
}

TEST(Distance, AgreesWithGridOracle) {
  std::mt19937_64 rng(8);
  for (const auto* M : {&euclid(), &root(), &osc()}) {
    const ScaledProfile P(M->warp());
    for (int k = 0; k < 8; ++k) {
      const double dt = 0.1;
      const double a = dt * (1 + rng() % 300), b = dt * (1 + rng() % 300);
      const double th = std::uniform_real_distribution<double>(0.05, kPi)(rng);
      const double d = distance(P, a, b, th);
      const double g = warplab::testing::grid_distance(P, a, b, th, {dt, 8});
      EXPECT_NEAR(d, g, 0.01 * d) << a << " " << b << " " << th;
      EXPECT_LE(d, g * (1.0 + 1e-9));
    }
  }
}

TEST(Distance, MonotoneInAngle) {
  for (const auto* M : {&euclid(), &root(), &osc()}) {
    const ScaledProfile P(M->warp());
    for (auto [a, b] : {std::pair{3.0, 4.0}, std::pair{20.0, 45.0}, std::pair{60.0, 60.0}}) {
      double prev = 0.0;
      for (int i = 0; i <= 60; ++i) {
        const double d = distance(P, a, b, kPi * i / 60.0);
        EXPECT_GE(d, prev - 1e-9);
        prev = d;
      }
    }
  }
}

TEST(Distance, TriangleInequality) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> t(0.0, 80.0), ang(0.0, 2 * kPi);
  for (const auto* M : {&euclid(), &root(), &osc()}) {
    const ScaledProfile P(M->warp());
    auto gap = [](double x, double y) {
      const double g = std::fabs(std::remainder(x - y, 2 * kPi));
      return std::min(g, kPi);
    };
    for (int i = 0; i < 60; ++i) {
      const double t1 = t(rng), t2 = t(rng), t3 = t(rng);
      const double p1 = ang(rng), p2 = ang(rng), p3 = ang(rng);
      const double d12 = distance(P, t1, t2, gap(p1, p2));
      const double d13 = distance(P, t1, t3, gap(p1, p3));
      const double d23 = distance(P, t2, t3, gap(p2, p3));
      const double tol = 1e-6 * std::max({d12, d13, d23, 1e-300});
      EXPECT_LE(d13, d12 + d23 + tol);
      EXPECT_LE(d12, d13 + d23 + tol);
      EXPECT_LE(d23, d12 + d13 + tol);
    }
  }
}

TEST(Distance, DomainChecks) {
  EXPECT_THROW(distance(root(), -1, 2, 1), DomainError);
  EXPECT_THROW(distance(root(), 1, 2, 4), DomainError);
  const auto small = RotSymManifold::create(2, power_warp(0.5, Wide(10)));
  EXPECT_THROW(distance(small, 1, 11, 1), DomainError);
}

TEST(DistanceTable, MatchesShooting) {
  std::mt19937_64 rng(21);
  for (const auto* M : {&euclid(), &root(), &osc()}) {
    const ScaledProfile P(M->warp());
    for (int k = 0; k < 10; ++k) {
      const double a = std::uniform_real_distribution<double>(0.0, 60.0)(rng);
      const double b = std::uniform_real_distribution<double>(0.0, 60.0)(rng);
      const DistanceTable table(P, a, b);
      for (int j = 0; j <= 12; ++j) {
        const double th = kPi * j / 12.0;
        const double d = distance(P, a, b, th);
        EXPECT_NEAR(table(th), d, 1e-7 * std::max(1.0, d));
      }
    }
  }
}

TEST(SphereDiameter, Examples) {
  EXPECT_NEAR(sphere_diameter(euclid(), 1.0), 2.0, 1e-12);
  const double d = sphere_diameter(root(), 1e4);
  EXPECT_LE(d, kPi * 100.0);
  EXPECT_GE(d, 2.0 * 100.0);
  const ScaledProfile P(root().warp());
  const double g = warplab::testing::grid_distance(P, 1e4, 1e4, kPi, {10.0, 8});
  EXPECT_NEAR(d, g, 0.01 * d);
  EXPECT_LT(sphere_diameter(osc(), 1e-6), 3e-6);
  EXPECT_THROW(sphere_diameter(euclid(), 0.0), DomainError);
}

TEST(SphereDiameter, BoundedByCircleAndPole) {
  for (const auto* M : {&euclid(), &root(), &osc()}) {
    for (double R : {0.5, 3.0, 40.0, 2000.0, 1e6}) {
      const double d = sphere_diameter(*M, R);
      EXPECT_LE(d, kPi * eval(M->warp(), R) * (1 + 1e-9));
      EXPECT_LE(d, 2 * R * (1 + 1e-12));
    }
  }
}

TEST(Busemann, OnTheRay) {
  for (const auto* M : {&euclid(), &root(), &osc()})
    for (double t : {0.5, 3.0, 20.0}) EXPECT_DOUBLE_EQ(busemann(*M, t, 0.0, 100.0 * t), t);
}

TEST(Busemann, EuclideanHeight) {
  for (double th : {0.3, 1.0, 2.0, 3.0}) {
    const double t = 2.0;
    EXPECT_NEAR(busemann(euclid(), t, th, 1e4 * t), t * std::cos(th), 1e-3);
  }
  EXPECT_THROW(busemann(euclid(), 2.0, 1.0, 5.0), DomainError);
}

TEST(Busemann, SandwichAndCauchy) {
  const ScaledProfile P(osc().warp());
  for (double t : {2.0, 15.0, 80.0}) {
    double prev = kInf;
    for (int i = 0; i <= 12; ++i) {
      const double th = kPi * i / 12.0;
      // the gap between R_cut and 2 R_cut shrinks like 1 / int dt / f^2, which
      // only becomes large once f flattens out on the long stage-2 chord
      const double b = busemann(osc(), t, th, 1e10 * t);
      EXPECT_LE(b, t + 1e-12);
      EXPECT_GE(b, t - distance(P, t, t, th) - 1e-9);
      EXPECT_NEAR(b, busemann(osc(), t, th, 2e10 * t), 1e-3 * t);
      EXPECT_LE(b, prev + 1e-9);
      prev = b;
    }
  }
}
