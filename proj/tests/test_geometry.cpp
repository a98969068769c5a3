#include <random>

#include "doctest.h"
#include "plk/geometry.hpp"

using namespace plk;

namespace {

Rational q(long n, long d = 1) { return Rational(mpz_class(n), mpz_class(d)); }

PointSet random_set(std::mt19937& rng, int dim, int count, int spread) {
  std::uniform_int_distribution<int> coord(-spread, spread);
  std::vector<Point> pts;
  for (int i = 0; i < count; ++i) {
    Point p(dim);
    for (int d = 0; d < dim; ++d) p(d) = q(coord(rng), 4);
    pts.push_back(p);
  }
  return make_point_set(pts);
}

// closed-form distance between segments in the plane (oracle for hull_distance)
double segment_distance(Vec<double> p0, Vec<double> p1, Vec<double> q0, Vec<double> q1) {
  auto point_seg = [](const Vec<double>& x, const Vec<double>& a, const Vec<double>& b) {
    Vec<double> ab = b - a;
    double t = ab.squaredNorm() == 0 ? 0 : std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (a + t * ab - x).norm();
  };
  auto cross = [](const Vec<double>& u, const Vec<double>& v) { return u(0) * v(1) - u(1) * v(0); };
  Vec<double> r = p1 - p0, s = q1 - q0;
  double den = cross(r, s);
  if (den != 0) {
    double t = cross(q0 - p0, s) / den, u = cross(q0 - p0, r) / den;
    if (t >= 0 && t <= 1 && u >= 0 && u <= 1) return 0.0;
  }
  return std::min({point_seg(p0, q0, q1), point_seg(p1, q0, q1), point_seg(q0, p0, p1), point_seg(q1, p0, p1)});
}

}  // namespace

TEST_CASE("rational parsing and canonical form") {
  CHECK(Rational::parse("6/-4").str() == "-3/2");
  CHECK(Rational::parse("-6/4").str() == "-3/2");
  CHECK(Rational::parse("7").str() == "7");
  CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
  CHECK(Rational::from_double(0.375) == q(3, 8));
  CHECK(Rational::snap(1.0 / 3.0, 4) == q(5, 16));
  CHECK(Rational::snap(-1.0 / 3.0, 4) == q(-5, 16));
}

TEST_CASE("hull_disjoint on distinct singletons gives x - 1/2") {
  auto a = make_point_set({make_point({0})});
  auto b = make_point_set({make_point({1})});
  auto rel = hull_disjoint(a, b);
  REQUIRE(rel.disjoint);
  CHECK(rel.separator->normal(0) == q(1));
  CHECK(rel.separator->offset == q(1, 2));
}

TEST_CASE("hull_disjoint finds a point inside a triangle") {
  auto a = make_point_set({make_point({0, 0}), make_point({2, 0}), make_point({0, 2})});
  auto b = make_point_set({make_point({q(1, 2), q(1, 2)})});
  auto rel = hull_disjoint(a, b);
  REQUIRE_FALSE(rel.disjoint);
  CHECK(rel.witness->point == make_point({q(1, 2), q(1, 2)}));
}

TEST_CASE("hull_disjoint rejects dimension mismatch") {
  auto a = make_point_set({make_point({0})});
  auto b = make_point_set({make_point({0, 1})});
  CHECK_THROWS_AS(hull_disjoint(a, b), std::invalid_argument);
  CHECK_THROWS_AS(hull_distance(a, b), std::invalid_argument);
}

TEST_CASE("hull_disjoint handles degenerate collinear sets through the LP") {
  auto a = make_point_set({make_point({0, 0}), make_point({1, 1}), make_point({2, 2})});
  auto b = make_point_set({make_point({3, 3}), make_point({4, 4})});
  auto rel = hull_disjoint(a, b);
  CHECK(rel.disjoint);
  auto c = make_point_set({make_point({1, 1}), make_point({5, 5})});
  CHECK_FALSE(hull_disjoint(a, c).disjoint);
}

TEST_CASE("certificates verify exactly and relation is symmetric (property)") {
  std::mt19937 rng(20221);
  for (int trial = 0; trial < 200; ++trial) {
    int dim = 1 + trial % 3;
    auto a = random_set(rng, dim, 1 + trial % 5, 8);
    auto b = random_set(rng, dim, 1 + (trial / 3) % 5, 8);
    if (trial % 4 == 0) b.array() += Rational(3);
    auto ab = hull_disjoint(a, b);
    auto ba = hull_disjoint(b, a);
    REQUIRE(ab.disjoint == ba.disjoint);
    auto dist = hull_distance(a, b);
    CHECK((dist.squared.is_zero()) == !ab.disjoint);
    if (ab.disjoint) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) CHECK((*ab.separator)(a.col(j)).sign() < 0);
      for (Eigen::Index j = 0; j < b.cols(); ++j) CHECK((*ab.separator)(b.col(j)).sign() > 0);
      // swapped functional is a valid separator for (B, A) after negation
      AffineFunctional neg{-ab.separator->normal, -ab.separator->offset};
      for (Eigen::Index j = 0; j < b.cols(); ++j) CHECK(neg(b.col(j)).sign() < 0);
      CHECK(dist.lower > 0);
    } else {
      const auto& w = *ab.witness;
      Rational sa(0), sb(0);
      Point pa = Point::Constant(dim, Rational(0)), pb = pa;
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        CHECK(w.weights_a[j].sign() >= 0);
        sa += w.weights_a[j];
        pa += a.col(j) * w.weights_a[j];
      }
      for (Eigen::Index j = 0; j < b.cols(); ++j) {
        CHECK(w.weights_b[j].sign() >= 0);
        sb += w.weights_b[j];
        pb += b.col(j) * w.weights_b[j];
      }
      CHECK(sa == Rational(1));
      CHECK(sb == Rational(1));
      CHECK(pa == w.point);
      CHECK(pb == w.point);
    }
  }
}

TEST_CASE("hull_distance on simple configurations") {
  auto a = make_point_set({make_point({0})});
  auto b = make_point_set({make_point({1})});
  CHECK(hull_distance(a, b).squared == Rational(1));
  CHECK(hull_distance(a, b).lower == 1.0);
  auto tri = make_point_set({make_point({0, 0}), make_point({2, 0}), make_point({0, 2})});
  CHECK(hull_distance(tri, tri).squared.is_zero());
  // two unit segments three apart
  auto s1 = make_point_set({make_point({0, 0}), make_point({1, 0})});
  auto s2 = make_point_set({make_point({0, 3}), make_point({1, 3})});
  auto d = hull_distance(s1, s2);
  CHECK(d.lower <= 3.0);
  CHECK(d.lower >= 3.0 - 1e-12);
  CHECK(d.upper >= 3.0);
}

TEST_CASE("hull_distance matches the closed-form segment distance") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto s1 = random_set(rng, 2, 2, 12);
    auto s2 = random_set(rng, 2, 2, 12);
    double oracle = segment_distance(to_double<Rational>(s1.col(0)), to_double<Rational>(s1.col(1)),
                                     to_double<Rational>(s2.col(0)), to_double<Rational>(s2.col(1)));
    auto d = hull_distance(s1, s2);
    CHECK(d.lower <= oracle + 1e-12);
    CHECK(d.upper >= oracle - 1e-12);
    CHECK(std::abs(d.lower - oracle) < 1e-9);
  }
}

TEST_CASE("diameter") {
  CHECK(diameter(make_point_set({make_point({1, 2})})).squared.is_zero());
  auto d = diameter(make_point_set({make_point({0, 0}), make_point({3, 4})}));
  CHECK(d.squared == Rational(25));
  CHECK(d.upper == 5.0);
  // barycentric subdivision of [0,1]: pieces [0,1/2] and [1/2,1]
  CHECK(diameter(make_point_set({make_point({0}), make_point({q(1, 2)})})).squared == q(1, 4));
  CHECK(diameter(make_point_set({make_point({q(1, 2)}), make_point({1})})).squared == q(1, 4));
}

TEST_CASE("diameter is invariant under permutation and translation (property)") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_set(rng, 2, 6, 10);
    auto base = diameter(a).squared;
    Mat<Rational> perm = a.rowwise().reverse();
    perm = a;
    for (Eigen::Index j = 0; j + 1 < perm.cols(); j += 2) perm.col(j).swap(perm.col(j + 1));
    CHECK(diameter(perm).squared == base);
    Mat<Rational> shifted = a;
    shifted.row(0).array() += q(7, 3);
    shifted.row(1).array() -= q(2, 5);
    CHECK(diameter(shifted).squared == base);
  }
}

TEST_CASE("barycentric coordinates and affine rank") {
  auto tri = make_point_set({make_point({0, 0}), make_point({2, 0}), make_point({0, 2})});
  auto w = barycentric_coordinates(tri, make_point({q(1, 2), q(1, 2)}));
  REQUIRE(w);
  CHECK((*w)[0] == q(1, 2));
  CHECK((*w)[1] == q(1, 4));
  CHECK((*w)[2] == q(1, 4));
  CHECK(affine_rank(tri) == 2);
  auto line = make_point_set({make_point({0, 0}), make_point({1, 1}), make_point({2, 2})});
  CHECK(affine_rank(line) == 1);
  auto seg = make_point_set({make_point({0, 0}), make_point({1, 1})});
  CHECK_FALSE(barycentric_coordinates(seg, make_point({1, 0})));
}
