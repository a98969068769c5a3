#include "plk/homotopy.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace plk {

namespace {

constexpr int kSnapBits = 64;

// weights of x(s) on the flag vertices: λ_0 = 1−s_1, λ_j = s_1⋯s_j(1−s_{j+1}), λ_k = s_1⋯s_k.
// s[0] is unused; s_j for j > upto counts as 0.
std::vector<Rational> flag_weights(const std::vector<Rational>& s, int upto) {
  const int top = static_cast<int>(s.size()) - 1;
  std::vector<Rational> lam(s.size(), Rational(0));
  Rational prod(1);
  for (int m = 0; m <= top; ++m) {
    const Rational next = m + 1 <= std::min(upto, top) ? s[m + 1] : Rational(0);
    lam[m] = prod * (Rational(1) - next);
    prod *= next;
  }
  return lam;
}

std::vector<Rational> random_weights(std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<long> pick(1, 1L << 20);
  std::vector<long> raw(count);
  for (auto& r : raw) r = pick(rng);
  const long total = std::accumulate(raw.begin(), raw.end(), 0L);
  std::vector<Rational> w;
  for (long r : raw) w.emplace_back(mpz_class(r), mpz_class(total));
  return w;
}

}  // namespace

CubeHomotopy::CubeHomotopy(std::shared_ptr<const LiftTriangulation> base, LiftFunction g)
    : CubeHomotopy(base, std::move(g), base->g_values) {}

CubeHomotopy::CubeHomotopy(std::shared_ptr<const LiftTriangulation> base, LiftFunction g, std::vector<Point> g_values)
    : base_(std::move(base)), g_(std::move(g)), g_values_(std::move(g_values)) {
  const auto& kp = base_->derived.source.result;
  if (static_cast<int>(g_values_.size()) != kp->num_vertices())
    throw std::invalid_argument("need one value per K' vertex");
  n_ = base_->K.complex->dim();
  locator_ = LiftFunction::pl_table(kp, g_values_);
}

CubeHomotopy::Trace CubeHomotopy::trace_on(int id, const std::vector<Rational>& weights,
                                           const std::vector<Rational>& t) const {
  const Complex& kp = *base_->derived.source.result;
  const Complex& k = *base_->K.complex;
  const auto& chain = flag(id);
  const int top = static_cast<int>(chain.size()) - 1;
  if (static_cast<int>(weights.size()) != top + 1) throw std::invalid_argument("weights do not match the simplex");
  if (static_cast<int>(t.size()) != n_) throw std::invalid_argument("t must have one entry per dimension");
  for (const auto& ti : t)
    if (ti.sign() < 0 || ti > Rational(1)) throw std::invalid_argument("t outside the unit cube");

  // s from the weights through tail sums; 0/0 := 0
  std::vector<Rational> tail(top + 2, Rational(0));
  for (int m = top; m >= 0; --m) tail[m] = tail[m + 1] + weights[m];
  std::vector<Rational> s(top + 1, Rational(0)), sp(top + 1, Rational(0)), sb(top + 1, Rational(0));
  for (int j = 1; j <= top; ++j) {
    s[j] = tail[j - 1].is_zero() ? Rational(0) : tail[j] / tail[j - 1];
    const Rational& tj = t[k.simplex_dim(chain[j]) - 1];
    sp[j] = std::max(s[j], tj);
    sb[j] = sp[j].is_zero() ? Rational(0) : s[j] / sp[j];
  }

  Trace out;
  out.inner_weights = flag_weights(sb, top);
  out.inner = Point::Constant(kp.ambient_dim(), Rational(0));
  int support = 0, last = -1;
  for (int m = 0; m <= top; ++m)
    if (!out.inner_weights[m].is_zero()) {
      out.inner += kp.vertex(chain[m]) * out.inner_weights[m];
      ++support;
      last = m;
    }
  Point y = support == 1 ? g_values_[chain[last]] : g_.exact(out.inner, kSnapBits);
  for (int i = top; i >= 1; --i) {
    // w_{i−1}(s̄) = g_n(v_{i−1}(s̄))
    auto lam = flag_weights(sb, i - 1);
    Point w = Point::Constant(g_.k(), Rational(0));
    for (int m = 0; m < i; ++m)
      if (!lam[m].is_zero()) w += g_values_[chain[m]] * lam[m];
    y = w * (Rational(1) - sp[i]) + y * sp[i];
  }
  out.value = std::move(y);
  return out;
}

Point CubeHomotopy::eval_on(int id, const std::vector<Rational>& weights, const std::vector<Rational>& t) const {
  return trace_on(id, weights, t).value;
}

Point CubeHomotopy::eval(const std::vector<Rational>& t, const Point& x) const {
  auto hit = locator_.locate(x);
  if (!hit) throw std::domain_error("point outside |K'|");
  return eval_on(hit->first, hit->second, t);
}

HomotopyReport homotopy_certificate(const CubeHomotopy& h, const std::vector<Rational>& t, int samples,
                                    std::uint64_t seed) {
  const auto& base = h.base();
  const Complex& kp = *base.derived.source.result;
  std::mt19937_64 rng(seed);
  HomotopyReport rep;

  auto tops = kp.maximal();
  std::uniform_int_distribution<std::size_t> pick(0, tops.size() - 1);
  for (int i = 0; i < samples; ++i) {
    const int id = tops[pick(rng)];
    const Simplex& s = kp.simplex(id);
    auto tr = h.trace_on(id, random_weights(rng, static_cast<int>(s.size())), t);
    // conv g(σ) through points of σ: its vertices and x(s̄)
    std::vector<Point> hull;
    for (int v : s) hull.push_back(h.g().exact(kp.vertex(v), kSnapBits));
    hull.push_back(h.g().exact(tr.inner, kSnapBits));
    ++rep.containment_checked;
    if (hull_disjoint(make_point_set({tr.value}), make_point_set(hull)).disjoint) {
      ++rep.containment_violations;
      if (!rep.first) rep.first = HomotopyViolation{HomotopyViolation::Kind::containment, id, tr.inner, {}, tr.value};
    }
  }

  auto delta = sample_double_points(base.derived.map, 3);
  std::vector<std::size_t> order(delta.pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  if (static_cast<int>(order.size()) > samples) order.resize(samples);
  for (std::size_t i : order) {
    const auto& p = delta.pairs[i];
    ++rep.pairs_checked;
    Point hx = h.eval(t, p.x), hy = h.eval(t, p.y);
    if (hx == hy) {
      ++rep.injectivity_violations;
      if (!rep.first) rep.first = HomotopyViolation{HomotopyViolation::Kind::injectivity, p.sheet_x, p.x, p.y, hx};
    }
  }
  return rep;
}

LinearHomotopyReport linear_lift_homotopy_check(const LiftFunction& g, const LiftFunction& g2,
                                                const DoublePointSample& delta, int t_count, double tol) {
  if (t_count < 2) throw std::invalid_argument("t_count must be at least 2");
  if (g.k() != g2.k()) throw std::invalid_argument("lifts differ in codomain dimension");
  LinearHomotopyReport rep;
  rep.pairs = static_cast<long>(delta.pairs.size());
  auto a = sign_map(g, delta);
  auto b = sign_map(g2, delta);
  for (std::size_t i = 0; i < delta.pairs.size(); ++i) {
    bool same = g.k() == 1 ? (a.values[i](0) > 0) == (b.values[i](0) > 0) : (a.values[i] - b.values[i]).norm() <= tol;
    if (!same) {
      rep.same_sign = false;
      if (!rep.mismatch) rep.mismatch = i;
      ++rep.mismatches;
    }
  }
  if (!rep.same_sign) return rep;
  rep.t_checked = t_count;
  for (const auto& p : delta.pairs) {
    Vec<double> da = g(p.y) - g(p.x), db = g2(p.y) - g2(p.x);
    const double scale = da.norm() + db.norm();
    for (int j = 0; j < t_count; ++j) {
      const double t = static_cast<double>(j) / (t_count - 1);
      if (((1 - t) * da + t * db).norm() <= tol * scale) ++rep.injectivity_failures;
    }
  }
  return rep;
}

namespace {

struct TrialResult {
  int passes = 0;
  std::optional<InjectivityWitness> witness;
};

TrialResult run_trials(const LiftTriangulation& t, const LiftFunction& g_star, double delta, int trials,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  TrialResult out;
  const auto& table = g_star.table();
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<Point> values = table;
    if (delta > 0)
      for (auto& v : values)
        for (Eigen::Index c = 0; c < v.size(); ++c) {
          // snapped noise of magnitude strictly below δ
          Rational noise = Rational::snap(unit(rng) * delta * (1 - 1e-9), 48);
          v(c) += noise;
        }
    auto rep = verify_embedding_exact(t.derived.map, LiftFunction::pl_table(g_star.carrier(), std::move(values)));
    if (rep.injective) {
      ++out.passes;
    } else if (!out.witness) {
      out.witness = rep.witness;
    }
  }
  return out;
}

}  // namespace

StabilityReport perturbation_stability(const LiftTriangulation& t, const LiftFunction& g_star, double delta, int trials,
                                       std::uint64_t seed, int bisection_steps) {
  if (g_star.kind() != LiftFunction::Kind::pl_table || g_star.carrier() != t.derived.source.result)
    throw std::invalid_argument("g★ must be a table on K'");
  if (!(delta >= 0)) throw std::invalid_argument("δ must be nonnegative");
  StabilityReport rep;
  rep.delta = delta;
  rep.trials = trials;
  auto first = run_trials(t, g_star, delta, trials, seed);
  rep.passes = first.passes;
  rep.witness = first.witness;
  if (bisection_steps <= 0) {
    rep.radius = first.passes == trials ? delta : 0;
    return rep;
  }
  auto all_pass = [&](double d) {
    bool ok = run_trials(t, g_star, d, trials, seed).passes == trials;
    rep.probes.emplace_back(d, ok);
    return ok;
  };
  double lo = 0, hi = delta;
  if (first.passes == trials) {
    lo = delta;
    hi = delta > 0 ? 2 * delta : 1;
    for (int j = 0; j < 16 && all_pass(hi); ++j) {
      lo = hi;
      hi *= 2;
    }
  }
  for (int step = 0; step < bisection_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    (all_pass(mid) ? lo : hi) = mid;
  }
  rep.radius = lo;
  return rep;
}

}  // namespace plk
