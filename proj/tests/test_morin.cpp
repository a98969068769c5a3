#include <cmath>
#include <random>

#include "doctest.h"
#include "plk/morin.hpp"

using namespace plk;

namespace {

Rational q(long n, long d = 1) { return Rational(mpz_class(n), mpz_class(d)); }

QPoly qpoly(std::initializer_list<long> c) {
  std::vector<Rational> v;
  for (long x : c) v.push_back(q(x));
  return QPoly(std::move(v));
}

Rational random_q(std::mt19937_64& rng, long range = 4, long den = 16) {
  std::uniform_int_distribution<long> pick(-range * den, range * den);
  return q(pick(rng), den);
}

}  // namespace

TEST_CASE("chebyshev polynomials") {
  CHECK(chebyshev(0) == qpoly({1}));
  CHECK(chebyshev(1) == qpoly({0, 1}));
  CHECK(chebyshev(3) == qpoly({0, -3, 0, 4}));
  CHECK(std::abs(chebyshev(5).cast<double>()(std::cos(0.3)) - std::cos(1.5)) < 1e-12);
  const QPoly x = QPoly::monomial(1);
  for (int r = 1; r <= 12; ++r) {
    CHECK(chebyshev(r + 1) == q(2) * (x * chebyshev(r)) - chebyshev(r - 1));
    const QPoly t = chebyshev(r);
    CHECK(t.degree() == r);
    for (int j = 0; j <= r; ++j)
      if ((j - r) % 2 != 0) CHECK(t[j].is_zero());
  }
  for (int r = 1; r <= 10; ++r) {
    const RPoly t = chebyshev(r).cast<double>();
    for (int k = 0; k <= 30; ++k) {
      const double s = 0.1 * k;
      CHECK(std::abs(t(std::cosh(s)) - std::cosh(r * s)) <= 1e-10 * std::cosh(r * s));
    }
  }
  CHECK_THROWS_AS(chebyshev(-1), std::invalid_argument);
}

TEST_CASE("tau and M_r membership") {
  CHECK(tau(2) == QPoly({q(0), q(-3, 4), q(0), q(1)}));
  CHECK(tau(1) == qpoly({0, 0, 1}));
  for (int r = 1; r <= 8; ++r) CHECK(mr_membership(tau(r), r));
  CHECK(mr_membership(qpoly({0, -1, 0, 1}), 2));
  CHECK_FALSE(mr_membership(qpoly({0, 0, 1, 1}), 2));
  CHECK_FALSE(mr_membership(qpoly({1, -1, 0, 1}), 2));
  CHECK_FALSE(mr_membership(qpoly({0, -1, 0, 2}), 2));
  CHECK_FALSE(mr_membership(qpoly({0, -1, 0, 1}), 3));
  CHECK(mr_polynomial({q(2), q(-1)}) == qpoly({0, 2, -1, 0, 1}));
  CHECK_THROWS_AS(tau(0), std::invalid_argument);
}

TEST_CASE("membership agrees with monic, P(0) = 0 and zero root sum") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 2 + static_cast<int>(rng() % 6);
    std::vector<Rational> a;
    for (int j = 1; j < r; ++j) a.push_back(random_q(rng));
    QPoly p = mr_polynomial(a);
    if (trial % 2) p = p + QPoly::monomial(r, random_q(rng) + q(1, 3));  // breaks the x^r term
    auto zs = roots(p.cast<double>());
    REQUIRE(static_cast<int>(zs.size()) == r + 1);
    std::complex<double> sum = 0;
    bool zero_root = false;
    for (auto z : zs) {
      sum += z;
      zero_root = zero_root || std::abs(z) < 1e-9;
    }
    const bool by_roots = std::abs(p.leading().to_double() - 1) < 1e-12 && zero_root && std::abs(sum) < 1e-8;
    CHECK(by_roots == mr_membership(p, r));
  }
}

TEST_CASE("root finder") {
  // (x − 1)(x + 2)(x² + 1)
  RPoly p = RPoly::linear_factor(1) * RPoly::linear_factor(-2) * RPoly(std::vector<double>{1, 0, 1});
  auto zs = roots(p);
  REQUIRE(zs.size() == 4);
  CHECK(std::abs(zs[0] - std::complex<double>(-2, 0)) < 1e-12);
  CHECK(std::abs(zs[1] - std::complex<double>(0, -1)) < 1e-12);
  CHECK(std::abs(zs[2] - std::complex<double>(0, 1)) < 1e-12);
  CHECK(std::abs(zs[3] - std::complex<double>(1, 0)) < 1e-12);
  CHECK(real_roots(p).size() == 2);
  auto z0 = roots(RPoly(std::vector<double>{0, 0, 1}));
  CHECK(z0 == std::vector<std::complex<double>>{0.0, 0.0});
}

TEST_CASE("critical points of T_r") {
  auto c3 = critical_points(3);
  REQUIRE(c3.maxima.size() == 1);
  REQUIRE(c3.minima.size() == 1);
  CHECK(std::abs(c3.maxima[0] + 0.5) < 1e-12);
  CHECK(std::abs(c3.minima[0] - 0.5) < 1e-12);
  auto c2 = critical_points(2);
  CHECK(c2.maxima.empty());
  REQUIRE(c2.minima.size() == 1);
  CHECK(std::abs(c2.minima[0]) < 1e-12);
  for (int r = 2; r <= 12; ++r) {
    const RPoly t = chebyshev(r).cast<double>();
    auto c = critical_points(r);
    CHECK(static_cast<int>(c.maxima.size() + c.minima.size()) == r - 1);
    for (double m : c.maxima) CHECK(std::abs(t(m) - 1) < 1e-12);
    for (double m : c.minima) CHECK(std::abs(t(m) + 1) < 1e-12);
    CHECK(std::is_sorted(c.maxima.begin(), c.maxima.end()));
  }
  CHECK_THROWS_AS(critical_points(1), std::invalid_argument);
}

TEST_CASE("Morin normal forms") {
  for (int r = 0; r <= 4; ++r) {
    MorinSpec spec{r, 2 * std::max(r, 1), 2 * std::max(r, 1) + 1};
    if (r == 0) spec = {0, 3, 5};
    spec.validate();
    Point p = Point::Constant(spec.n, q(0));
    p(spec.n - 1) = q(3, 2);
    Point want = Point::Constant(spec.m, q(0));
    Rational xp(1);
    for (int k = 0; k <= r; ++k) xp *= q(3, 2);
    want(spec.n - 1) = xp;
    CHECK(morin_eval(spec, p) == want);
  }
  const MorinSpec s245{2, 4, 5};
  CHECK(morin_eval(s245, make_point({q(-1), q(0), q(2), q(1)})) == make_point({q(-1), q(0), q(2), q(0), q(2)}));
  // f_2(t, x) = (t, tx + x³)
  const MorinSpec f2 = MorinSpec::fr(2);
  CHECK(morin_eval(f2, make_point({q(3), q(-2)})) == make_point({q(3), q(-6 - 8)}));
  // r = 0: inclusion
  CHECK(morin_eval({0, 2, 3}, make_point({q(5), q(7)})) == make_point({q(5), q(7), q(0)}));
  CHECK(morin_lift_eval({0, 2, 3}, 1, make_point({q(5), q(7)})) == make_point({q(5), q(7), q(0), q(0)}));
  CHECK_THROWS_AS(morin_eval(s245, make_point({q(1)})), std::invalid_argument);
  CHECK_THROWS_AS((MorinSpec{2, 3, 5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MorinSpec{1, 4, 3}.validate()), std::invalid_argument);
}

TEST_CASE("Morin lifts") {
  const MorinSpec s245{2, 4, 5};
  const Point a = make_point({q(-1), q(0), q(2), q(1)}), b = make_point({q(-1), q(0), q(2), q(-1)});
  REQUIRE(morin_eval(s245, a) == morin_eval(s245, b));
  CHECK(morin_lift_eval(s245, 1, a)(5) == q(1));
  CHECK(morin_lift_eval(s245, 1, b)(5) == q(-1));
  CHECK(morin_lift_eval(s245, -1, a)(5) == q(-1));
  CHECK_THROWS_AS(morin_lift_eval(s245, 0, a), std::invalid_argument);
  // injective on a finite sample: t and x are read back from Φ
  std::mt19937_64 rng(8);
  for (int sign : {1, -1}) {
    std::vector<Point> pts;
    for (int i = 0; i < 60; ++i) {
      Point p(4);
      for (int j = 0; j < 4; ++j) p(j) = random_q(rng, 1, 4);
      pts.push_back(p);
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Point img = morin_lift_eval(s245, sign, pts[i]);
      Point back(4);
      back.head(3) = img.head(3);
      back(3) = img(5) * q(sign);
      CHECK(back == pts[i]);
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (pts[i] != pts[j]) CHECK(img != morin_lift_eval(s245, sign, pts[j]));
    }
  }
}

TEST_CASE("double points") {
  auto dp = fr_double_point(2, q(1), q(-1), {});
  CHECK(dp.first(0) == q(-1));
  const MorinSpec f2 = MorinSpec::fr(2);
  CHECK(morin_eval(f2, dp.first) == make_point({q(-1), q(0)}));
  CHECK(morin_eval(f2, dp.second) == make_point({q(-1), q(0)}));
  CHECK_THROWS_AS(fr_double_point(2, q(1, 3), q(1, 3), {}), std::invalid_argument);
  CHECK_THROWS_AS(fr_double_point(1, q(1), q(2), {}), std::invalid_argument);

  // τ_2 = x³ − (3/4)x: x1² + x1x2 + x2² = 3/4
  const RPoly t2 = tau(2).cast<double>();
  const double h = std::sqrt(3.0) / 2;
  CHECK(std::abs(t2(h) - t2(-h)) < 1e-15);

  for (int r = 1; r <= 6; ++r) {
    const MorinSpec fr = MorinSpec::fr(r);
    for (const auto& d : delta_sample_fr(r, 40, 100 + r)) {
      CHECK(d.first != d.second);
      CHECK(morin_eval(fr, d.first) == morin_eval(fr, d.second));
    }
  }
  for (int r = 2; r <= 6; ++r) {
    const RPoly t = tau(r).cast<double>();
    auto pts = delta_sample_poly(t, 12, DeltaContext::tau_r);
    CHECK(!pts.empty());
    for (const auto& d : pts) {
      const double x1 = d.first(0).to_double(), x2 = d.second(0).to_double();
      CHECK(x1 < x2);
      CHECK(std::abs(t(x1) - t(x2)) < 1e-10);
    }
  }
  CHECK(delta_sample_poly(RPoly(std::vector<double>{0, 1, 0, 1}), 5).empty());
}

TEST_CASE("product coordinates on the double points of F_r") {
  const MorinSpec s245{2, 4, 5};
  ProductCoords pc;
  pc.base = fr_double_point(2, q(1), q(-1), {});
  pc.c = {{q(2)}};
  auto dp = product_forward(s245, pc);
  CHECK(dp.first == make_point({q(-1), q(0), q(2), q(1)}));
  CHECK(dp.second == make_point({q(-1), q(0), q(2), q(-1)}));
  auto back = product_inverse(s245, dp);
  CHECK(back.c == pc.c);
  CHECK(back.base.first == pc.base.first);

  SUBCASE("zero c embeds the f_r point") {
    const MorinSpec spec{3, 6, 7};
    ProductCoords z;
    z.base = fr_double_point(3, q(1, 2), q(-3, 2), {q(1, 4)});
    z.c = {{q(0), q(0)}};
    auto out = product_forward(spec, z);
    CHECK(out.first.head(2) == z.base.first.head(2));
    CHECK(out.first.segment(2, 3) == Point::Constant(3, q(0)));
    CHECK(out.first(5) == q(1, 2));
    CHECK(out.second(5) == q(-3, 2));
  }

  SUBCASE("round trips") {
    std::mt19937_64 rng(77);
    const std::vector<MorinSpec> specs{{1, 2, 3}, {2, 4, 5}, {2, 6, 7}, {3, 6, 7}, {2, 6, 8}, {3, 9, 11}, {4, 8, 9}};
    for (int trial = 0; trial < 100; ++trial) {
      const MorinSpec& spec = specs[trial % specs.size()];
      spec.validate();
      const int r = spec.r;
      ProductCoords pc2;
      pc2.base = delta_sample_fr(r, 1, rng())[0];
      for (int i = 0; i < spec.q_count(); ++i) {
        std::vector<Rational> row;
        for (int j = 0; j < r - 1; ++j) row.push_back(random_q(rng));
        pc2.c.push_back(row);
      }
      for (int u = 0; u < spec.unused_count(); ++u) pc2.unused.push_back(random_q(rng));
      auto fwd = product_forward(spec, pc2);
      CHECK(morin_eval(spec, fwd.first) == morin_eval(spec, fwd.second));
      auto inv = product_inverse(spec, fwd);
      CHECK(inv.c == pc2.c);
      CHECK(inv.unused == pc2.unused);
      CHECK(inv.base.first == pc2.base.first);
      CHECK(inv.base.second == pc2.base.second);
      auto again = product_forward(spec, inv);
      CHECK(again.first == fwd.first);
      CHECK(again.second == fwd.second);
    }
  }

  SUBCASE("inverse rejects pairs that are not double points") {
    auto bad = dp;
    // Q = x + 2x² separates 1 and −1
    bad.first(1) = q(1);
    bad.second(1) = q(1);
    CHECK_THROWS_AS(product_inverse(s245, bad), std::invalid_argument);
    auto diag = dp;
    diag.second = diag.first;
    CHECK_THROWS_AS(product_inverse(s245, diag), std::invalid_argument);
  }
}

namespace {

void check_path(const MrPath& path, int r) {
  CHECK(path.max_drift() <= 1e-10);
  CHECK(path.max_membership_defect() <= 1e-10);
  for (const auto& st : path.stages)
    for (const auto& s : st.samples) {
      CHECK(mr_membership(s.poly, r, 1e-10));
      CHECK(s.x1 < s.x2);
    }
  // endpoint is τ_r carrying a double point
  const RPoly t = tau(r).cast<double>();
  for (int j = 0; j <= r + 1; ++j) CHECK(std::abs(path.end().poly[j] - t[j]) < 1e-10);
  CHECK(std::abs(t(path.end().x1) - t(path.end().x2)) < 1e-10);
}

}  // namespace

TEST_CASE("paths in M_r to tau_r") {
  SUBCASE("r = 2") {
    auto path = connect_to_tau(qpoly({0, -1, 0, 1}), q(1), q(-1));
    check_path(path, 2);
    const double a = path.end().x1, b = path.end().x2;
    CHECK(std::abs(a * a + a * b + b * b - 0.75) < 1e-10);
  }
  SUBCASE("tau_r itself") {
    for (int r = 2; r <= 5; ++r) {
      const RPoly t = tau(r).cast<double>();
      auto pts = delta_sample_poly(t, 4);
      REQUIRE(!pts.empty());
      auto path = connect_to_tau(t, pts[0].first(0).to_double(), pts[0].second(0).to_double());
      REQUIRE(path.stages.size() == 1);
      CHECK(path.stages[0].family == "constant");
      check_path(path, r);
    }
  }
  SUBCASE("random polynomials") {
    int collapses = 0;
    for (int r = 3; r <= 7; ++r)
      for (const auto& d : delta_sample_fr(r, 8, 500 + r)) {
        const QPoly p = morin_p(MorinSpec::fr(r), d.first);
        auto path = connect_to_tau(p, d.first(r - 1), d.second(r - 1));
        check_path(path, r);
        for (const auto& st : path.stages) collapses += st.family == "collapse";
        CHECK(path.stages.front().family == "remove");
        CHECK(path.stages.back().family == "interpolate");
      }
    CHECK(collapses > 0);
  }
  SUBCASE("float input") {
    auto path = connect_to_tau(RPoly(std::vector<double>{0, 0, -1, 0, 1}), -1.0, 1.0);
    check_path(path, 3);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(connect_to_tau(qpoly({0, -1, 1, 1}), q(1), q(-1)), std::invalid_argument);
    CHECK_THROWS_AS(connect_to_tau(qpoly({0, -1, 0, 1}), q(1), q(1)), std::invalid_argument);
    CHECK_THROWS_AS(connect_to_tau(qpoly({0, -1, 0, 1}), q(1), q(2)), std::invalid_argument);
  }
}

TEST_CASE("conjugate pairs collapse to real double roots") {
  // (x − i)(x + i)x
  auto res = collapse_conjugate_pairs(RPoly(std::vector<double>{0, 1, 0, 1}), 8);
  REQUIRE(res.stages.size() == 1);
  REQUIRE(res.real_roots.size() == 3);
  for (double z : res.real_roots) CHECK(std::abs(z) < 1e-12);
  const RPoly& last = res.stages[0].samples.back().poly;
  CHECK(std::abs(last[3] - 1) < 1e-12);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(last[j]) < 1e-12);
  for (const auto& s : res.stages[0].samples) CHECK(mr_membership(s.poly, 2, 1e-12));
}

TEST_CASE("classifying lifts of T_r") {
  for (int r = 1; r <= 6; ++r)
    for (int eps : {1, -1}) {
      auto c = classify_lift_sign(r, [eps](double x) { return eps * x; });
      CHECK(c.epsilon == eps);
      CHECK(c.degenerate == (r == 1));
      if (r >= 2) CHECK(c.pairs > 0);
      CHECK(c.orderings_checked == (r >= 3));
    }
  CHECK(classify_lift_sign(4, [](double x) { return -x * x * x; }).epsilon == -1);
  CHECK_THROWS_AS(classify_lift_sign(2, [](double x) { return x * x; }), std::domain_error);
  // sign map disagrees between clusters
  CHECK_THROWS_AS(classify_lift_sign(3, [](double x) { return std::sin(6 * x); }), std::domain_error);

  SUBCASE("perturbed embedded lifts keep one sign per cluster") {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
      const int r = 2 + trial % 5;
      const int eps = trial % 2 ? -1 : 1;
      const double w = 1 + 5 * u(rng), a = 0.9 * u(rng) / w, ph = 6 * u(rng);
      auto g = [=](double x) { return eps * x + a * std::sin(w * x + ph); };
      auto delta = chebyshev_delta(r, 40);
      std::vector<int> seen(delta.clusters, 0);
      for (std::size_t i = 0; i < delta.pairs.size(); ++i) {
        const int s = g(delta.pairs[i].second) > g(delta.pairs[i].first) ? 1 : -1;
        int& slot = seen[delta.cluster[i]];
        if (slot == 0) slot = s;
        CHECK(slot == s);
      }
      CHECK(classify_lift_sign(r, g).epsilon == eps);
    }
  }
}

TEST_CASE("isotopy to the model lifts") {
  const MorinSpec s245{2, 4, 5};
  const MorinSpec s369{3, 6, 7};
  auto phi = [](int sign) { return [sign](const Vec<double>& p) { return sign * p(p.size() - 1); }; };
  for (const auto& spec : {s245, s369}) {
    auto plus = lift_isotopy_check(spec, phi(1), 1, 50, 3);
    CHECK(plus.epsilon == 1);
    CHECK(plus.ok());
    CHECK(plus.pairs == 50);
    CHECK(plus.t_checked == 11);

    // vertical shear: the pair shares t, so the last-coordinate gap is unchanged
    auto sheared = lift_isotopy_check(
        spec, [](const Vec<double>& p) { return p(p.size() - 1) + 0.1 * p(0) - 0.05 * p(1); }, 1, 50, 4);
    CHECK(sheared.epsilon == 1);
    CHECK(sheared.ok());

    auto wrong = lift_isotopy_check(spec, phi(-1), 1, 50, 5);
    CHECK(wrong.epsilon == -1);
    CHECK(wrong.violations == 50);
    REQUIRE(wrong.witness);
    CHECK(wrong.witness->t == 0.5);
    CHECK(lift_isotopy_check(spec, phi(-1), -1, 50, 5).ok());
  }
  CHECK_THROWS_AS(lift_isotopy_check({0, 2, 2}, phi(1), 1, 5, 1), std::invalid_argument);
}
