#include <cmath>
#include <random>

#include "doctest.h"
#include "plk/errors.hpp"
#include "plk/lift.hpp"

using namespace plk;

namespace {

Rational q(long n, long d = 1) { return Rational(mpz_class(n), mpz_class(d)); }
Point p1(Rational x) { return make_point({x}); }

SimplicialMap square_fold() {
  auto sq = std::make_shared<Complex>(
      std::vector<Point>{make_point({q(0), q(0)}), make_point({q(1), q(0)}), make_point({q(1), q(1)}),
                         make_point({q(0), q(1)})},
      std::vector<Simplex>{{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  auto chain = std::make_shared<Complex>(std::vector<Point>{p1(q(0)), p1(q(1)), p1(q(2))},
                                         std::vector<Simplex>{{0, 1}, {1, 2}});
  return SimplicialMap{sq, chain, {0, 1, 2, 1}};
}

LiftFunction coordinate_lift(int n) {
  // wave with α=1, β=0, no terms: g(x) = x_0
  return LiftFunction::from_registry("wave", {1, static_cast<double>(n), 0, 1, 0});
}

}  // namespace

TEST_CASE("absval example values") {
  auto inst = example_absval();
  CHECK(is_nondegenerate(inst.f).nondegenerate);
  CHECK(inst.g.exact(p1(q(1, 2))) == p1(q(0)));
  CHECK(inst.g.exact(p1(q(-2, 3))) == p1(q(0)));
  CHECK(inst.g.exact(p1(q(0))) == p1(q(0)));
  CHECK(inst.g.exact(p1(q(-1))) == p1(q(2)));
  CHECK(inst.g.exact(p1(q(2, 3))) == p1(q(-4, 3)));
  // literal formulas agree with the rewritten ones
  for (double x : {0.3, 0.77, 0.05, -0.3, -0.77, -0.05}) {
    double lit = x > 0 ? x * (-1 + std::cos(2 * M_PI / x)) : -x * (1 + std::cos(2 * M_PI / x));
    CHECK(absval_g(x) == doctest::Approx(lit).epsilon(1e-12));
  }
  // g(−x) − g(x) = 2x with g(x) ≤ 0 ≤ g(−x)
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    double x = u(rng);
    if (x == 0) continue;
    double a = absval_g(x), b = absval_g(-x);
    REQUIRE(a <= 0);
    REQUIRE(b >= 0);
    REQUIRE(b - a > 0);
    CHECK(b - a == doctest::Approx(2 * x).epsilon(1e-9));
  }
}

TEST_CASE("absval zeros") {
  auto pos = absval_zeros(0.01, 1.0);
  REQUIRE(pos.size() == 100);
  for (std::size_t i = 0; i < pos.size(); ++i) CHECK(std::abs(pos[i] - 1.0 / (100 - i)) < 1e-12);
  auto neg = absval_zeros(-1.0, -0.01);
  // |x| = 2/(2j+1) ≥ 0.01 → j = 1..99
  REQUIRE(neg.size() == 99);
  for (std::size_t i = 0; i < neg.size(); ++i) CHECK(std::abs(neg[i] + 2.0 / (2 * (i + 1) + 1)) < 1e-12);
  CHECK_THROWS_AS(absval_zeros(-1, 1), std::invalid_argument);
}

TEST_CASE("barycentric failure") {
  auto r = barycentric_failure(q(1));
  CHECK(r.lower == q(1, 2));
  CHECK(r.upper == q(2, 3));
  CHECK(r.pair_inside);
  REQUIRE_FALSE(r.hulls.disjoint);
  CHECK(r.hulls.witness->point == p1(q(0)));

  r = barycentric_failure(q(1, 2));
  CHECK(r.lower == q(1, 3));
  CHECK(r.upper == q(2, 5));
  CHECK(r.pair_inside);
  CHECK_FALSE(r.hulls.disjoint);

  for (int i = 1; i <= 60; ++i) {
    Rational eps = q(i, 61);
    auto rr = barycentric_failure(eps, 64);
    CHECK(rr.pair_inside);
    CHECK_FALSE(rr.hulls.disjoint);
  }
  CHECK_THROWS_AS(barycentric_failure(q(0)), std::invalid_argument);
  CHECK_THROWS_AS(barycentric_failure(q(3, 2)), std::invalid_argument);
}

TEST_CASE("barycentric grid") {
  CHECK(barycentric_grid(1, 4).size() == 5);
  CHECK(barycentric_grid(1, 4, true).size() == 3);
  CHECK(barycentric_grid(2, 3).size() == 10);
  CHECK(barycentric_grid(2, 3, true).size() == 1);
  CHECK(barycentric_grid(0, 5, true).size() == 1);
}

TEST_CASE("double point samples") {
  auto inst = example_absval();
  auto d = sample_double_points(inst.f, 10);
  REQUIRE(d.pairs.size() == 10);
  for (const auto& dp : d.pairs) {
    CHECK(dp.x(0) == -dp.y(0));
    CHECK(dp.x != dp.y);
    CHECK(abs(dp.x(0)) > q(0));
  }

  auto k = std::make_shared<Complex>(std::vector<Point>{p1(q(0)), p1(q(1))}, std::vector<Simplex>{{0, 1}});
  CHECK(sample_double_points(SimplicialMap{k, k, {0, 1}}, 10).pairs.empty());

  auto fold = square_fold();
  auto ds = sample_double_points(fold, 8);
  CHECK(ds.pairs.size() == 2 * 8 - 1);
  for (const auto& dp : ds.pairs) {
    // f is linear on each sheet; recompute the images
    auto img = [&](const Point& x, int sheet) {
      auto w = barycentric_coordinates(fold.source->points_of(sheet), x);
      return fold.apply(fold.source->simplex(sheet), *w);
    };
    CHECK(img(dp.x, dp.sheet_x) == img(dp.y, dp.sheet_y));
  }

  auto pt = std::make_shared<Complex>(std::vector<Point>{p1(q(0))}, std::vector<Simplex>{{0}});
  CHECK_THROWS_AS(sample_double_points(SimplicialMap{k, pt, {0, 0}}, 4), std::invalid_argument);
}

TEST_CASE("sign maps") {
  auto inst = example_absval();
  auto d = sample_double_points(inst.f, 50);
  auto s = sign_map(inst.g, d);
  CHECK(s.clusters == 1);
  REQUIRE(s.cluster_sign.size() == 1);
  CHECK(s.cluster_sign[0] != 0);

  // g(x)=x: pairs are stored (negative sheet, positive sheet), so g(y)−g(x) = 2|x| > 0
  auto lin = sign_map(coordinate_lift(1), d);
  for (const auto& v : lin.values) CHECK(v(0) == 1.0);

  // equivariance under swapping
  DoublePointSample swapped = d;
  for (auto& dp : swapped.pairs) {
    std::swap(dp.x, dp.y);
    std::swap(dp.sheet_x, dp.sheet_y);
  }
  auto sw = sign_map(inst.g, swapped);
  for (std::size_t i = 0; i < d.pairs.size(); ++i) CHECK(sw.values[i](0) == -s.values[i](0));
  CHECK(sw.cluster_sign == s.cluster_sign);

  // identical lifts give identical maps
  auto again = sign_map(inst.g, d);
  CHECK(again.values == s.values);

  auto zero = LiftFunction::from_registry("wave", {1, 1, 0, 0, 0});
  try {
    (void)sign_map(zero, d);
    FAIL("expected a zero-difference error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("not an embedded lift at pair") != std::string::npos);
  }

  // square fold: the two arcs meet only at the fold vertices 0 and 2, so one cluster
  auto fold = square_fold();
  auto ds = sample_double_points(fold, 6);
  auto sq = sign_map(coordinate_lift(2), ds);
  CHECK(sq.clusters == 1);
}

TEST_CASE("pl_table lift") {
  auto k = std::make_shared<Complex>(
      std::vector<Point>{make_point({q(0), q(0)}), make_point({q(1), q(0)}), make_point({q(0), q(1)}),
                         make_point({q(1), q(1)})},
      std::vector<Simplex>{{0, 1, 2}, {1, 2, 3}});
  auto g = LiftFunction::pl_table(k, {p1(q(0)), p1(q(1)), p1(q(2)), p1(q(5))});
  CHECK(g.exact(make_point({q(1, 2), q(1, 4)})) == p1(q(1, 2) + q(2, 4)));
  CHECK(g.exact(make_point({q(1), q(1)})) == p1(q(5)));
  Vec<double> x(2);
  x << 0.75, 0.75;
  // (0.75,0.75) in triangle {1,2,3}: weights (0.25, 0.25, 0.5)
  CHECK(g(x)(0) == doctest::Approx(0.25 + 0.5 + 2.5));
  x << 2.0, 2.0;
  CHECK_THROWS_AS((void)g(x), std::domain_error);

  auto combo = LiftFunction::combination({{2.0, g}, {-1.0, g}});
  x << 0.25, 0.25;
  CHECK(combo(x)(0) == doctest::Approx(g(x)(0)));
}

TEST_CASE("registry") {
  CHECK_THROWS_AS(LiftFunction::from_registry("nope"), UnknownBuiltin);
  CHECK_THROWS_AS(LiftFunction::from_registry("wave", {1, 1}), std::invalid_argument);
  auto w = LiftFunction::from_registry("wave", {2, 1, 1, 1, 0, 0.5, 2, 0, 0, 1, 0.0, 1, 0});
  Vec<double> x(1);
  x << 0.3;
  auto v = w(x);
  CHECK(v(0) == doctest::Approx(0.3 * (1 + 0.5 * std::sin(0.6))));
  CHECK(v(1) == doctest::Approx(1.0));
}
