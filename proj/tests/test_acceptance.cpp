// One pass/fail line per acceptance criterion. Exit status is nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "plk/homotopy.hpp"
#include "plk/instances.hpp"
#include "plk/morin.hpp"

using namespace plk;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "FAILED: " << what << "; ";
    pass = pass && ok;
  }
};

Rational q(long n, long d = 1) { return Rational(mpz_class(n), mpz_class(d)); }

Rational dyadic(std::mt19937_64& rng, long range, int bits = 10) {
  std::uniform_int_distribution<long> pick(-range << bits, range << bits);
  return Rational(mpz_class(pick(rng)), mpz_class(1L << bits));
}

struct Pipeline {
  std::string name;
  LiftInstance inst;
  LiftTriangulation t;
  LiftFunction star;
  double seconds = 0;
};

// absval plus three seeded random instances, triangulated once and shared by criteria 3, 4, 5, 10
std::vector<Pipeline>& pipelines() {
  static std::vector<Pipeline> all = [] {
    std::vector<Pipeline> out;
    auto ex = example_absval();
    out.push_back({"absval", {"absval", ex.f, ex.g}, {}, {}});
    for (auto [name, seed, k] : std::vector<std::tuple<std::string, std::uint64_t, int>>{
             {"fold1d", 2, 2}, {"sheets2d", 2, 1}, {"fold2d", 1, 1}})
      out.push_back({name + " seed " + std::to_string(seed) + " k=" + std::to_string(k), builtin_instance(name, seed, k), {}, {}});
    for (auto& p : out) {
      const auto t0 = std::chrono::steady_clock::now();
      p.t = triangulate_lift(p.inst.f, p.inst.g);
      p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return out;
  }();
  return all;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1
void chebyshev_exact(Outcome& o) {
  o.require(chebyshev(3) == QPoly({q(0), q(-3), q(0), q(4)}), "T_3 = 4x^3 - 3x");
  o.require(tau(2) == QPoly({q(0), q(-3, 4), q(0), q(1)}), "tau_2 = x^3 - 3x/4");
  for (int r = 1; r <= 8; ++r) o.require(mr_membership(tau(r), r), "tau_" + std::to_string(r) + " in M_r");
  o.detail << "T_3, tau_2 exact; tau_1..tau_8 in M_r";
}

// ---------------------------------------------------------------- 2
void oscillating_example(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  auto ex = example_absval();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0, 1);
  long collisions = 0;
  for (int i = 0; i < 1'000'000; ++i) {
    const double x = 1 - unit(rng);  // (0, 1]
    Vec<double> a(1), b(1);
    a(0) = x;
    b(0) = -x;
    collisions += ex.g(a)(0) == ex.g(b)(0);
  }
  o.require(collisions == 0, "g(x) != g(-x) on 10^6 samples");

  double worst = 0;
  auto pos = absval_zeros(1.0 / 200.5, 1);
  auto neg = absval_zeros(-1, -1.0 / 200);
  o.require(pos.size() == 200, "200 positive zeros");
  for (std::size_t i = 0; i < pos.size(); ++i)
    worst = std::max(worst, std::abs(pos[pos.size() - 1 - i] - 1.0 / double(i + 1)));
  // −2/(2j+1) in [−1, −1/200]: j = 1..199
  o.require(neg.size() == 199, "199 negative zeros");
  for (std::size_t i = 0; i < neg.size(); ++i) worst = std::max(worst, std::abs(neg[i] + 2.0 / double(2 * i + 3)));
  o.require(worst <= 1e-12, "zeros within 1e-12");

  int certified = 0;
  for (int i = 0; i < 100; ++i) {
    const Rational eps = Rational::snap(std::pow(10.0, -3.0 * i / 99), 40);
    auto b = barycentric_failure(eps);
    bool ok = b.pair_inside && !b.hulls.disjoint && b.hulls.witness.has_value();
    if (ok) {
      Rational sa(0), sb(0);
      for (const auto& w : b.hulls.witness->weights_a) ok = ok && w.sign() >= 0, sa += w;
      for (const auto& w : b.hulls.witness->weights_b) ok = ok && w.sign() >= 0, sb += w;
      ok = ok && sa == Rational(1) && sb == Rational(1);
    }
    certified += ok;
  }
  o.require(certified == 100, "hull intersection certified for every epsilon");
  const double s = seconds_since(t0);
  o.require(s < 30, "runtime < 30 s");
  o.detail << "0 collisions in 10^6 pairs; zero error " << worst << "; " << certified << "/100 epsilon certified; "
           << s << " s";
}

// ---------------------------------------------------------------- 3
void certificates(Outcome& o) {
  for (auto& p : pipelines()) {
    const auto& t = p.t;
    std::set<std::pair<int, int>> have;
    for (const auto& e : t.certificate) have.emplace(e.u, e.v);
    std::map<int, std::vector<int>> fibres;
    for (int u = 0; u < t.K.complex->num_vertices(); ++u) fibres[t.f_KL.vertex_map[u]].push_back(u);
    long pairs = 0, missing = 0;
    for (const auto& [img, us] : fibres)
      for (std::size_t a = 0; a < us.size(); ++a)
        for (std::size_t b = a + 1; b < us.size(); ++b) {
          ++pairs;
          missing += !have.count({std::min(us[a], us[b]), std::max(us[a], us[b])});
        }
    const int bad = recheck_certificate(t);
    o.require(missing == 0 && bad == 0, p.name + " certificate complete and rechecked");
    o.require(p.seconds < 300, p.name + " under 5 min");
    o.detail << p.name << ": " << pairs << " pairs, " << bad << " recheck failures, " << p.seconds << " s; ";
  }
}

// ---------------------------------------------------------------- 4
InjectivityReport oracle(const SimplicialMap& f, const LiftFunction& h) {
  for (int res = 8;; res *= 2) {
    auto rep = verify_embedding_sampled(f, h, res);
    if (!rep.injective || rep.pairs_checked >= 100'000 || res > 1 << 20) return rep;
  }
}

void plification(Outcome& o) {
  int disagreements = 0, cases = 0;
  for (auto& p : pipelines()) {
    p.star = plify(p.t, p.inst.g);
    const auto& f = p.t.derived.map;
    auto exact = verify_embedding_exact(f, p.star);
    o.require(exact.injective, p.name + " plified lift injective");
    auto sampled = oracle(f, p.star);
    o.require(sampled.pairs_checked >= 100'000, "oracle density");
    disagreements += exact.injective != sampled.injective;
    ++cases;
    // negative control: the constant lift collides everywhere
    auto zero = LiftFunction::pl_table(f.source, std::vector<Point>(p.t.g_values.size(),
                                                                    Point::Constant(p.inst.g.k(), Rational(0))));
    disagreements += verify_embedding_exact(f, zero).injective != oracle(f, zero).injective;
    ++cases;
    o.detail << p.name << ": " << sampled.pairs_checked << " oracle samples; ";
  }
  o.require(disagreements == 0, "exact and sampled verification agree");
  o.detail << disagreements << "/" << cases << " disagreements";
}

// ---------------------------------------------------------------- 5
void cube_homotopy(Outcome& o) {
  const auto& p = pipelines()[0];
  auto base = std::make_shared<LiftTriangulation>(p.t);
  CubeHomotopy h(base, p.inst.g);
  std::mt19937_64 rng(5);
  double worst = 0;
  const std::vector<Rational> one{q(1)}, zero{q(0)};
  for (int i = 0; i < 1000; ++i) {
    const Point x = make_point({dyadic(rng, 1, 20)});
    worst = std::max(worst, std::abs(h.eval(one, x)(0).to_double() - absval_g(x(0).to_double())));
  }
  o.require(worst <= 1e-12, "t = 1 matches g");
  const Complex& kp = *base->derived.source.result;
  bool vertices = true;
  for (int v = 0; v < kp.num_vertices(); ++v) vertices = vertices && h.eval(zero, kp.vertex(v)) == base->g_values[v];
  o.require(vertices, "t = 0 matches the PL-ification at K' vertices");

  // ĥσ points keep g★ for every t
  bool cone_ok = true;
  for (int v = 0; v < kp.num_vertices(); ++v) {
    std::uniform_int_distribution<long> pick(0, 1024);
    cone_ok = cone_ok && h.eval({q(pick(rng), 1024)}, kp.vertex(v)) == base->g_values[v];
  }
  // staircase t = (0,1) in dimension 2: the cone from σ̂_0 over the face where g is kept
  const auto& p2 = pipelines()[2];
  auto base2 = std::make_shared<LiftTriangulation>(p2.t);
  CubeHomotopy h2(base2, p2.inst.g);
  const Complex& kp2 = *base2->derived.source.result;
  int cones = 0;
  for (int id : kp2.maximal()) {
    if (kp2.simplex_dim(id) != 2 || cones >= 300) continue;
    std::uniform_int_distribution<long> pick(1, 1000);
    const long a0 = pick(rng), a1 = pick(rng), a2 = pick(rng), total = a0 + a1 + a2;
    const std::vector<Rational> w{q(a0, total), q(a1, total), q(a2, total)};
    const auto& sx = kp2.simplex(id);
    const Rational s1 = w[1] + w[2];
    const Point face = kp2.vertex(sx[1]) * (w[1] / s1) + kp2.vertex(sx[2]) * (w[2] / s1);
    const Point cone = p2.inst.g.exact(face) * s1 + base2->g_values[sx[0]] * (Rational(1) - s1);
    const Point linear = base2->g_values[sx[0]] * w[0] + base2->g_values[sx[1]] * w[1] + base2->g_values[sx[2]] * w[2];
    cone_ok = cone_ok && h2.eval_on(id, w, {q(0), q(1)}) == cone && h2.eval_on(id, w, {q(0), q(0)}) == linear;
    ++cones;
  }
  o.require(cone_ok && cones > 0, "staircase values are conical extensions");
  int clean = 0;
  for (int i = 0; i < 10; ++i) {
    std::uniform_int_distribution<long> pick(0, 1024);
    clean += homotopy_certificate(h, {q(pick(rng), 1024)}, 1000, 50 + i).ok();
  }
  o.require(clean == 10, "homotopy certificate clean for 10 random t");
  o.detail << "t=1 error " << worst << "; K' vertices exact; " << cones << " cone samples; " << clean
           << "/10 certificates clean";
}

// ---------------------------------------------------------------- 6
LiftFunction wave(std::vector<double> p) { return LiftFunction::from_registry("wave", std::move(p)); }

void same_sign_homotopy(Outcome& o) {
  auto ex = example_absval();
  auto delta = sample_double_points(ex.f, 400);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  int ok = 0;
  long pairs = 0;
  for (int i = 0; i < 20; ++i) {
    const double a = 0.5 + 1.5 * u(rng), b = (u(rng) - 0.5) * 0.8 * a;
    const double c = u(rng), amp = 0.3 * u(rng), w = 1 + 20 * u(rng), ph = 6.28 * u(rng);
    // a·g + b·x + an even bump c(1 + amp sin(wx+ph) + amp sin(−wx+ph))
    auto g2 = LiftFunction::combination({{a, ex.g},
                                         {b, wave({1, 1, 0, 1, 0})},
                                         {1.0, wave({1, 1, 2, 0, c, amp, w, ph, amp, -w, ph})}});
    auto rep = linear_lift_homotopy_check(ex.g, g2, delta);
    ok += rep.same_sign && rep.injectivity_failures == 0 && rep.t_checked == 11;
    pairs += rep.pairs;
  }
  o.require(ok == 20, "20 same-sign pairs stay injective");
  auto neg = linear_lift_homotopy_check(ex.g, LiftFunction::combination({{-1.0, ex.g}}), delta);
  o.require(!neg.same_sign && neg.mismatches == neg.pairs && neg.pairs > 0, "antipodal control fails at every pair");
  o.detail << ok << "/20 pairs injective at 11 t over " << pairs / 20 << " double points; antipodal mismatches "
           << neg.mismatches << "/" << neg.pairs;
}

// ---------------------------------------------------------------- 7
void product_structure(Outcome& o) {
  std::mt19937_64 rng(7);
  int round_trips = 0;
  for (MorinSpec spec : {MorinSpec{2, 4, 5}, MorinSpec{3, 6, 7}}) {
    for (int i = 0; i < 100; ++i) {
      Rational x1 = dyadic(rng, 2), x2 = dyadic(rng, 2);
      if (x1 == x2) x2 += q(1);
      std::vector<Rational> rest;
      for (int j = 2; j < spec.r; ++j) rest.push_back(dyadic(rng, 3));
      ProductCoords pc;
      pc.base = fr_double_point(spec.r, x1, x2, rest);
      for (int row = 0; row < spec.q_count(); ++row) {
        pc.c.emplace_back();
        for (int j = 0; j + 1 < spec.r; ++j) pc.c.back().push_back(dyadic(rng, 3));
      }
      for (int j = 0; j < spec.unused_count(); ++j) pc.unused.push_back(dyadic(rng, 3));
      auto dp = product_forward(spec, pc);
      auto back = product_inverse(spec, dp);
      const bool same = back.base.first == pc.base.first && back.base.second == pc.base.second && back.c == pc.c &&
                        back.unused == pc.unused && morin_eval(spec, dp.first) == morin_eval(spec, dp.second);
      round_trips += same;
    }
  }
  o.require(round_trips == 200, "product coordinates round trip");
  const MorinSpec s{2, 4, 5};
  const Point a = make_point({q(-1), q(0), q(2), q(1)}), b = make_point({q(-1), q(0), q(2), q(-1)});
  o.require(a != b && morin_eval(s, a) == morin_eval(s, b), "worked F_2 double point");
  o.detail << round_trips << "/200 exact round trips; F_2((-1,0,2,1)) = F_2((-1,0,2,-1))";
}

// ---------------------------------------------------------------- 8
void path_to_tau(Outcome& o) {
  std::mt19937_64 rng(8);
  int good = 0;
  double drift = 0, defect = 0, quad = 0;
  for (int r : {2, 3}) {
    const RPoly target = tau(r).cast<double>();
    for (int i = 0; i < 10; ++i) {
      Rational x1 = dyadic(rng, 2, 6), x2 = dyadic(rng, 2, 6);
      if (x1 == x2) x2 += q(1, 2);
      std::vector<Rational> rest;
      for (int j = 2; j < r; ++j) rest.push_back(dyadic(rng, 2, 6));
      auto dp = fr_double_point(r, x1, x2, rest);
      const QPoly p = morin_p(MorinSpec::fr(r), dp.first);
      auto path = connect_to_tau(p, x1, x2);
      const auto& end = path.end();
      bool ok = path.max_drift() < 1e-10 && path.max_membership_defect() <= 1e-10;
      const RPoly diff = end.poly - target;
      for (double c : diff.coeffs()) ok = ok && std::abs(c) <= 1e-10;
      ok = ok && std::abs(end.x1 - end.x2) > 1e-6 && std::abs(target(end.x1) - target(end.x2)) < 1e-10;
      if (r == 2) {
        const double e = std::abs(end.x1 * end.x1 + end.x1 * end.x2 + end.x2 * end.x2 - 0.75);
        quad = std::max(quad, e);
        ok = ok && e < 1e-10;
      }
      drift = std::max(drift, path.max_drift());
      defect = std::max(defect, path.max_membership_defect());
      good += ok;
    }
  }
  o.require(good == 20, "20 paths end at tau carrying the double point");
  o.detail << good << "/20 paths; max drift " << drift << ", max M_r defect " << defect << ", r=2 endpoint residual "
           << quad;
}

// ---------------------------------------------------------------- 9
void lift_classification(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  int classified = 0;
  for (int r = 1; r <= 6; ++r)
    for (int e : {1, -1}) classified += classify_lift_sign(r, [e](double x) { return e * x; }).epsilon == e;
  o.require(classified == 12, "model lifts classified");

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  int constant = 0;
  for (int i = 0; i < 20; ++i) {
    const int r = 2 + i % 5, e = i % 2 ? -1 : 1;
    const double w = 1 + 10 * u(rng), a = 0.9 * u(rng) / w, ph = 6.28 * u(rng);
    RealLift g = [=](double x) { return e * x + a * std::sin(w * x + ph); };
    auto delta = chebyshev_delta(r, 64);
    std::vector<int> sign(delta.clusters, 0);
    bool ok = true;
    for (std::size_t k = 0; k < delta.pairs.size(); ++k) {
      const double d = g(delta.pairs[k].second) - g(delta.pairs[k].first);
      const int s = d > 0 ? 1 : d < 0 ? -1 : 0;
      int& c = sign[delta.cluster[k]];
      ok = ok && s != 0 && (c == 0 || c == s);
      c = s;
    }
    constant += ok && classify_lift_sign(r, g).epsilon == e;
  }
  o.require(constant == 20, "perturbed lifts have constant sign per cluster");

  int matched = 0, witnessed = 0;
  for (MorinSpec spec : {MorinSpec{2, 4, 5}, MorinSpec{3, 6, 7}})
    for (int e : {1, -1}) {
      const int n = spec.n;
      MorinLift phi = [n, e](const Vec<double>& v) { return e * v(n - 1); };
      matched += lift_isotopy_check(spec, phi, e, 50, 10 + n).ok();
      auto bad = lift_isotopy_check(spec, phi, -e, 50, 20 + n);
      witnessed += !bad.ok() && bad.witness.has_value();
    }
  o.require(matched == 4, "matched-sign isotopies pass");
  o.require(witnessed == 4, "mismatched-sign controls report witnesses");
  const double s = seconds_since(t0);
  o.require(s < 60, "runtime < 60 s");
  o.detail << classified << "/12 model signs; " << constant << "/20 perturbed constant; isotopy " << matched
           << "/4 matched, " << witnessed << "/4 witnessed; " << s << " s";
}

// ---------------------------------------------------------------- 10
void stability(Outcome& o) {
  auto& p = pipelines()[0];
  if (p.star.kind() != LiftFunction::Kind::pl_table) p.star = plify(p.t, p.inst.g);
  double min_dist = INFINITY;
  for (const auto& e : p.t.certificate) min_dist = std::min(min_dist, e.distance_lower);
  const double bound = min_dist / 2;
  auto rep = perturbation_stability(p.t, p.star, bound, 50, 10, 10);
  o.require(rep.passes == 50, "50/50 trials at half the certified distance");
  const double ratio = rep.radius / bound;
  o.require(ratio >= 0.25 && ratio <= 4, "empirical radius within 4x of the bound");
  o.detail << rep.passes << "/50 at delta " << bound << "; radius " << rep.radius << " (" << ratio << "x)";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"Chebyshev and tau exactness", chebyshev_exact},
      {"oscillating example suite", oscillating_example},
      {"certified triangulation pipeline", certificates},
      {"PL-ification and oracle agreement", plification},
      {"cube homotopy", cube_homotopy},
      {"same-sign linear homotopy", same_sign_homotopy},
      {"product structure of double points", product_structure},
      {"path to tau", path_to_tau},
      {"lift classification and isotopy", lift_classification},
      {"perturbation stability", stability},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("criterion %zu %s: %s (%.2f s) %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
