#include "plk/morin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace plk {

QPoly chebyshev(int r) {
  if (r < 0) throw std::invalid_argument("chebyshev: r must be nonnegative");
  const QPoly x = QPoly::monomial(1);
  QPoly prev = QPoly::constant(Rational(1)), cur = x;
  if (r == 0) return prev;
  for (int k = 1; k < r; ++k) {
    QPoly next = Rational(2) * (x * cur) - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

QPoly tau(int r) {
  if (r < 1) throw std::invalid_argument("tau: r must be at least 1");
  const QPoly t = chebyshev(r + 1);
  QPoly out = (Rational(1) / t.leading()) * (t - QPoly::constant(t[0]));
  if (!mr_membership(out, r)) throw std::logic_error("tau left M_r");
  return out;
}

bool mr_membership(const QPoly& p, int r) {
  if (r < 0 || p.degree() != r + 1 || p.leading() != Rational(1)) return false;
  return p[0].is_zero() && (r == 0 || p[r].is_zero());
}

bool mr_membership(const RPoly& p, int r, double tol) {
  if (r < 0 || p.degree() != r + 1 || std::abs(p.leading() - 1) > tol) return false;
  return std::abs(p[0]) <= tol && (r == 0 || std::abs(p[r]) <= tol);
}

QPoly mr_polynomial(const std::vector<Rational>& a) {
  const int r = static_cast<int>(a.size()) + 1;
  std::vector<Rational> c(r + 2, Rational(0));
  for (int j = 1; j < r; ++j) c[j] = a[j - 1];
  c[r + 1] = Rational(1);
  return QPoly(std::move(c));
}

CriticalPoints critical_points(int r) {
  if (r < 2) throw std::invalid_argument("critical_points: T_r has no critical points for r < 2");
  const RPoly t = chebyshev(r).cast<double>();
  CriticalPoints out;
  for (double x : real_roots(t.derivative())) (t(x) > 0 ? out.maxima : out.minima).push_back(x);
  return out;
}

// ---------------------------------------------------------------- Morin maps

void MorinSpec::validate() const {
  if (r < 0) throw std::invalid_argument("morin: r must be nonnegative");
  if (n < 1 || n > m) throw std::invalid_argument("morin: need 1 <= n <= m");
  if ((m - n + 1) * r > n) throw std::invalid_argument("morin: need (m-n+1)r <= n");
}

namespace {

void check_point(const MorinSpec& spec, const Point& p) {
  spec.validate();
  if (p.size() != spec.n) throw std::invalid_argument("morin: point has the wrong dimension");
}

// t_j, 1-based, as stored in p
const Rational& t_at(const Point& p, int j) { return p(j - 1); }

}  // namespace

QPoly morin_p(const MorinSpec& spec, const Point& p) {
  check_point(spec, p);
  std::vector<Rational> c(spec.r + 2, Rational(0));
  for (int j = 1; j < spec.r; ++j) c[j] = t_at(p, j);
  c[spec.r + 1] = Rational(1);
  return QPoly(std::move(c));
}

QPoly morin_q(const MorinSpec& spec, int i, const Point& p) {
  check_point(spec, p);
  if (i < 1 || i > spec.q_count()) throw std::invalid_argument("morin: Q index out of range");
  std::vector<Rational> c(spec.r + 1, Rational(0));
  for (int k = 1; k <= spec.r; ++k) c[k] = t_at(p, i * spec.r + k - 1);
  return QPoly(std::move(c));
}

Point morin_eval(const MorinSpec& spec, const Point& p) {
  check_point(spec, p);
  const Rational& x = p(spec.n - 1);
  Point out(spec.m);
  for (int j = 0; j < spec.n - 1; ++j) out(j) = p(j);
  out(spec.n - 1) = morin_p(spec, p)(x);
  for (int i = 1; i <= spec.q_count(); ++i) out(spec.n - 1 + i) = morin_q(spec, i, p)(x);
  return out;
}

Point morin_lift_eval(const MorinSpec& spec, int sign, const Point& p) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("morin: sign must be +1 or -1");
  Point f = morin_eval(spec, p);
  Point out(spec.m + 1);
  out.head(spec.m) = f;
  out(spec.m) = spec.r == 0 ? Rational(0) : p(spec.n - 1) * Rational(sign);
  return out;
}

// ------------------------------------------------------------- double points

std::string to_string(DeltaContext c) {
  switch (c) {
    case DeltaContext::f_r: return "f_r";
    case DeltaContext::F_r: return "F_r";
    case DeltaContext::tau_r: return "tau_r";
    case DeltaContext::T_r: return "T_r";
    case DeltaContext::poly: return "poly";
  }
  return "poly";
}

namespace {

// (x1^j − x2^j)/(x1 − x2) without the subtraction
Rational divided_power(const Rational& x1, const Rational& x2, int j) {
  Rational acc(0), a(1);
  std::vector<Rational> pow2(j, Rational(1));
  for (int k = 1; k < j; ++k) pow2[k] = pow2[k - 1] * x2;
  for (int k = 0; k < j; ++k) {
    acc += a * pow2[j - 1 - k];
    a *= x1;
  }
  return acc;
}

Rational random_dyadic(std::mt19937_64& rng, long range, int bits) {
  std::uniform_int_distribution<long> pick(-range << bits, range << bits);
  return Rational(mpz_class(pick(rng)), mpz_class(1L << bits));
}

}  // namespace

PolyDoublePoint fr_double_point(int r, const Rational& x1, const Rational& x2, const std::vector<Rational>& rest) {
  if (r < 1) throw std::invalid_argument("f_r double points need r >= 1");
  if (x1 == x2) throw std::invalid_argument("double point on the diagonal");
  PolyDoublePoint dp;
  dp.context = DeltaContext::f_r;
  dp.first = Point(r);
  dp.second = Point(r);
  if (r == 1) {
    if (x2 != -x1) throw std::invalid_argument("f_1 = x^2 forces x2 = -x1");
  } else {
    if (static_cast<int>(rest.size()) != r - 2) throw std::invalid_argument("need t_2..t_{r-1}");
    Rational t1 = -divided_power(x1, x2, r + 1);
    for (int j = 2; j < r; ++j) t1 -= rest[j - 2] * divided_power(x1, x2, j);
    dp.first(0) = dp.second(0) = t1;
    for (int j = 2; j < r; ++j) dp.first(j - 1) = dp.second(j - 1) = rest[j - 2];
  }
  dp.first(r - 1) = x1;
  dp.second(r - 1) = x2;
  return dp;
}

std::vector<PolyDoublePoint> delta_sample_fr(int r, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("count must be positive");
  std::mt19937_64 rng(seed);
  std::vector<PolyDoublePoint> out;
  while (static_cast<int>(out.size()) < count) {
    Rational x1 = random_dyadic(rng, 2, 10), x2 = r == 1 ? -x1 : random_dyadic(rng, 2, 10);
    if (x1 == x2) continue;
    std::vector<Rational> rest;
    for (int j = 2; j < r; ++j) rest.push_back(random_dyadic(rng, 2, 10));
    out.push_back(fr_double_point(r, x1, x2, rest));
  }
  return out;
}

std::vector<PolyDoublePoint> delta_sample_poly(const RPoly& p, int levels, DeltaContext context) {
  if (levels < 1) throw std::invalid_argument("levels must be positive");
  std::vector<PolyDoublePoint> out;
  auto crit = real_roots(p.derivative());
  if (crit.empty()) return out;  // monotone: Δ empty
  double lo = 1e300, hi = -1e300;
  for (double x : crit) {
    lo = std::min(lo, p(x));
    hi = std::max(hi, p(x));
  }
  // for even degree the outer branches pair up above (or below) every critical value
  const double pad = p.degree() % 2 == 0 ? 0.5 * (hi - lo) + 1 : 0;
  if (p.degree() % 2 == 0) (p.leading() > 0 ? hi : lo) += p.leading() > 0 ? pad : -pad;
  for (int k = 0; k < levels; ++k) {
    const double c = hi == lo ? lo + 1 : lo + (hi - lo) * (k + 0.5) / levels;
    auto zs = real_roots(p - RPoly::constant(c));
    for (std::size_t a = 0; a < zs.size(); ++a)
      for (std::size_t b = a + 1; b < zs.size(); ++b) {
        if (zs[a] == zs[b]) continue;
        PolyDoublePoint dp;
        dp.context = context;
        dp.first = make_point({Rational::from_double(zs[a])});
        dp.second = make_point({Rational::from_double(zs[b])});
        out.push_back(std::move(dp));
      }
  }
  return out;
}

// ------------------------------------------------------- product coordinates

namespace {

struct Pair {
  Rational x1, x2, s, p;  // s = x1 + x2, p = x1 x2
};

Pair carried(const Point& a, const Point& b) {
  const Rational& x1 = a(a.size() - 1);
  const Rational& x2 = b(b.size() - 1);
  return {x1, x2, x1 + x2, x1 * x2};
}

// coefficients q_1..q_r of c_0 x(x − s) + (c_1 x + … + c_{r−2}x^{r−2})(x² − s x + p)
std::vector<Rational> q_coeffs(int r, const std::vector<Rational>& c, const Pair& dp) {
  auto cc = [&](int j) { return j >= 0 && j < static_cast<int>(c.size()) ? c[j] : Rational(0); };
  std::vector<Rational> q(r + 1, Rational(0));
  if (r >= 1) q[1] = -dp.s * cc(0) + dp.p * cc(1);
  for (int k = 2; k <= r; ++k) q[k] = cc(k - 2) - dp.s * cc(k - 1) + dp.p * cc(k);
  return q;
}

}  // namespace

PolyDoublePoint product_forward(const MorinSpec& spec, const ProductCoords& pc) {
  spec.validate();
  const int r = spec.r;
  if (r < 1) throw std::invalid_argument("F_0 has no double points");
  if (pc.base.first.size() != r || pc.base.second.size() != r)
    throw std::invalid_argument("base double point must live in R^r");
  if (static_cast<int>(pc.c.size()) != spec.q_count()) throw std::invalid_argument("need one c row per Q_i");
  if (static_cast<int>(pc.unused.size()) != spec.unused_count()) throw std::invalid_argument("wrong unused t count");
  const MorinSpec fr = MorinSpec::fr(r);
  const Pair dp = carried(pc.base.first, pc.base.second);
  if (dp.x1 == dp.x2 || pc.base.first.head(r - 1) != pc.base.second.head(r - 1) ||
      morin_eval(fr, pc.base.first) != morin_eval(fr, pc.base.second))
    throw std::invalid_argument("base is not a double point of f_r");

  Point t = Point::Constant(spec.n, Rational(0));
  for (int j = 0; j < r - 1; ++j) t(j) = pc.base.first(j);
  for (int i = 1; i <= spec.q_count(); ++i) {
    if (static_cast<int>(pc.c[i - 1].size()) != r - 1) throw std::invalid_argument("c rows need r-1 entries");
    auto q = q_coeffs(r, pc.c[i - 1], dp);
    for (int k = 1; k <= r; ++k) t(i * r + k - 2) = q[k];
  }
  for (int u = 0; u < spec.unused_count(); ++u) t(spec.first_unused() + u - 1) = pc.unused[u];

  PolyDoublePoint out;
  out.context = DeltaContext::F_r;
  out.first = t;
  out.second = t;
  out.first(spec.n - 1) = dp.x1;
  out.second(spec.n - 1) = dp.x2;
  return out;
}

ProductCoords product_inverse(const MorinSpec& spec, const PolyDoublePoint& in) {
  spec.validate();
  const int r = spec.r;
  if (r < 1) throw std::invalid_argument("F_0 has no double points");
  if (in.first.size() != spec.n || in.second.size() != spec.n) throw std::invalid_argument("points must live in R^n");
  if (in.first.head(spec.n - 1) != in.second.head(spec.n - 1))
    throw std::invalid_argument("not a double point: parameters differ");
  const Pair dp = carried(in.first, in.second);
  if (dp.x1 == dp.x2) throw std::invalid_argument("not a double point: diagonal");
  if (morin_p(spec, in.first)(dp.x1) != morin_p(spec, in.first)(dp.x2))
    throw std::invalid_argument("not a double point: P(x1) != P(x2)");

  ProductCoords out;
  for (int i = 1; i <= spec.q_count(); ++i) {
    const QPoly q = morin_q(spec, i, in.first);
    // c_{r−2} is the x^r coefficient; then downward
    std::vector<Rational> c(std::max(r - 1, 0), Rational(0));
    auto cc = [&](int j) { return j >= 0 && j < r - 1 ? c[j] : Rational(0); };
    for (int k = r; k >= 2; --k) c[k - 2] = q[k] + dp.s * cc(k - 1) - dp.p * cc(k);
    if (q[1] != -dp.s * cc(0) + dp.p * cc(1))
      throw std::invalid_argument("not a double point: Q_" + std::to_string(i) + " separates the pair");
    out.c.push_back(std::move(c));
  }
  for (int u = 0; u < spec.unused_count(); ++u) out.unused.push_back(in.first(spec.first_unused() + u - 1));
  std::vector<Rational> rest;
  for (int j = 2; j < r; ++j) rest.push_back(in.first(j - 1));
  out.base = fr_double_point(r, dp.x1, dp.x2, rest);
  if (out.base.first.head(r - 1) != in.first.head(r - 1)) throw std::logic_error("product_inverse: t_1 mismatch");
  return out;
}

// ------------------------------------------------------------ paths in M_r

namespace {

double to_d(const Rational& v) { return v.to_double(); }
double to_d(double v) { return v; }

bool close(const Rational& a, const Rational& b) { return a == b; }
bool close(double a, double b) { return std::abs(a - b) <= 1e-10 * (1 + std::abs(a) + std::abs(b)); }

RPoly to_rpoly(const QPoly& p) { return p.cast<double>(); }
RPoly to_rpoly(const RPoly& p) { return p; }

RPoly from_roots(const std::vector<double>& rs) {
  RPoly out = RPoly::constant(1);
  for (double z : rs) out = out * RPoly::linear_factor(z);
  return out;
}

double relative_drift(const RPoly& p, double x1, double x2) {
  const double a = p(x1), b = p(x2);
  return std::abs(a - b) / (1 + std::max(std::abs(a), std::abs(b)));
}

double membership_defect(const RPoly& p, int r) {
  if (p.degree() != r + 1) return std::numeric_limits<double>::infinity();
  double d = std::max(std::abs(p.leading() - 1), std::abs(p[0]));
  if (r >= 1) d = std::max(d, std::abs(p[r]));
  return d;
}

// Real roots of τ_r with multiplicity. Multiple roots come back from the
// eigenvalue solver split by ~sqrt(eps); clusters are replaced by their mean.
std::vector<double> tau_roots(int r) {
  std::vector<double> xs;
  for (const auto& z : roots(tau(r).cast<double>())) {
    if (std::abs(z.imag()) > 1e-6) throw std::runtime_error("tau_r root off the real line");
    xs.push_back(z.real());
  }
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < xs.size();) {
    std::size_t j = i + 1;
    while (j < xs.size() && xs[j] - xs[j - 1] < 1e-6) ++j;
    double mean = 0;
    bool has_zero = false;
    for (std::size_t k = i; k < j; ++k) {
      mean += xs[k];
      has_zero = has_zero || xs[k] == 0;
    }
    mean = has_zero ? 0.0 : mean / static_cast<double>(j - i);
    out.insert(out.end(), j - i, mean);
    i = j;
  }
  return out;
}

std::vector<double> grid(int steps, bool descending) {
  std::vector<double> t;
  for (int k = 0; k <= steps; ++k) t.push_back(static_cast<double>(descending ? steps - k : k) / steps);
  return t;
}

// Stage 3: slot 0 is the pinned zero root, slots 1 and 2 the carried pair.
PathStage interpolate_roots(int r, const std::vector<double>& from, int steps) {
  std::vector<double> to = tau_roots(r);
  if (to.size() != from.size()) throw std::logic_error("root count mismatch");
  const auto zero = std::find(to.begin(), to.end(), 0.0);
  if (zero == to.end()) throw std::logic_error("tau_r lost its zero root");
  to.erase(zero);
  std::sort(to.begin(), to.end());

  const std::size_t k = from.size() - 1;
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return from[a] < from[b]; });
  std::vector<double> target(from.size(), 0.0);
  for (std::size_t rank = 0; rank < k; ++rank) target[order[rank]] = to[rank];
  // rank matching can send the carried pair onto one double root; trade one end
  if (!(target[1] < target[2])) {
    std::size_t best = 0;
    for (std::size_t s = 3; s < from.size(); ++s)
      if (target[s] > target[2] && (best == 0 || target[s] < target[best])) best = s;
    if (best) {
      std::swap(target[2], target[best]);
    } else {
      for (std::size_t s = 3; s < from.size(); ++s)
        if (target[s] < target[1] && (best == 0 || target[s] > target[best])) best = s;
      if (!best) throw std::runtime_error("no distinct target slots for the carried pair");
      std::swap(target[1], target[best]);
    }
  }

  PathStage stage{"interpolate", {}};
  for (double t : grid(steps, false)) {
    std::vector<double> rs(from.size());
    for (std::size_t s = 0; s < from.size(); ++s) rs[s] = (1 - t) * from[s] + t * target[s];
    stage.samples.push_back({t, t == 1 ? tau(r).cast<double>() : from_roots(rs), rs[1], rs[2], rs});
  }
  return stage;
}

// Stage 2: q's conjugate pairs a ± ib shrink to double roots a, one stage per
// pair, with `fixed` roots (and the carried pair) untouched.
CollapseResult collapse_impl(const RPoly& q, const std::vector<double>& fixed, double x1, double x2, int steps) {
  std::vector<double> real;
  std::vector<std::pair<double, double>> pairs;  // b > 0
  for (const auto& z : roots(q)) {
    if (z.imag() == 0)
      real.push_back(z.real());
    else if (z.imag() > 0)
      pairs.emplace_back(z.real(), z.imag());
  }
  std::vector<double> base = fixed;
  base.insert(base.end(), real.begin(), real.end());
  const double lead = q.leading();
  CollapseResult out;
  std::vector<double> collapsed;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    PathStage stage{"collapse", {}};
    for (double t : grid(steps, true)) {
      RPoly poly = lead * (from_roots(base) * from_roots(collapsed));
      for (std::size_t l = j; l < pairs.size(); ++l) {
        const auto [a, b] = pairs[l];
        const double bt = l == j ? t * b : b;
        poly = poly * RPoly(std::vector<double>{a * a + bt * bt, -2 * a, 1});
      }
      stage.samples.push_back({t, poly, x1, x2, {}});
    }
    collapsed.push_back(pairs[j].first);
    collapsed.push_back(pairs[j].first);
    out.stages.push_back(std::move(stage));
  }
  out.real_roots = real;
  out.real_roots.insert(out.real_roots.end(), collapsed.begin(), collapsed.end());
  return out;
}

template <typename S>
MrPath connect_impl(const Polynomial<S>& p, S x1, S x2, int steps) {
  if (steps < 1) throw std::invalid_argument("connect_to_tau: steps must be positive");
  const int r = p.degree() - 1;
  bool member;
  if constexpr (std::is_same_v<S, Rational>)
    member = mr_membership(p, r);
  else
    member = mr_membership(p, r, 1e-10);
  if (!member || r < 1) throw std::invalid_argument("connect_to_tau: P is not in M_r");
  if (close(x1, x2)) throw std::invalid_argument("connect_to_tau: double point on the diagonal");
  if (!close(p(x1), p(x2))) throw std::invalid_argument("connect_to_tau: P(x1) != P(x2)");
  if (x2 < x1) std::swap(x1, x2);
  const double d1 = to_d(x1), d2 = to_d(x2);

  MrPath path;
  path.r = r;
  const RPoly pd = to_rpoly(p);
  const QPoly tq = tau(r);
  bool is_tau = true;
  if constexpr (std::is_same_v<S, Rational>)
    is_tau = p == tq;
  else
    for (int j = 0; j <= r + 1; ++j) is_tau = is_tau && close(p[j], tq[j].to_double());

  if (r == 1 || is_tau) {
    path.stages.push_back({"constant", {{0, pd, d1, d2, {}}, {1, pd, d1, d2, {}}}});
  } else if (r == 2) {
    // x^3 − a x; the pair scales with sqrt(a_t / a)
    const double a = -to_d(p[1]);
    PathStage stage{"rescale", {}};
    for (double t : grid(steps, false)) {
      const double at = (1 - t) * a + t * 0.75;
      const double k = std::sqrt(at / a);
      stage.samples.push_back({t, t == 1 ? tq.cast<double>() : RPoly(std::vector<double>{0, -at, 0, 1}), k * d1, k * d2, {}});
    }
    path.stages.push_back(std::move(stage));
  } else {
    // P − P(x1) = (x − x1)(x − x2)R;  c = R(0);  P⁺ = P − c·x(x − x1 − x2)
    using Poly = Polynomial<S>;
    const Poly quad = Poly::linear_factor(x1) * Poly::linear_factor(x2);
    auto [big_r, rem] = (p - Poly::constant(p(x1))).divmod(quad);
    (void)rem;
    const S c = big_r[0];
    const Poly bump = Poly::monomial(1) * Poly(std::vector<S>{-(x1 + x2), S(1)});
    const RPoly plus = to_rpoly(p - c * bump), bump_d = to_rpoly(bump);
    PathStage remove{"remove", {}};
    for (double t : grid(steps, true)) remove.samples.push_back({t, plus + (t * to_d(c)) * bump_d, d1, d2, {}});
    path.stages.push_back(std::move(remove));

    // P⁺ = x(x − x1)(x − x2)·(R − R(0))/x
    std::vector<S> rest_c(big_r.coeffs().begin() + 1, big_r.coeffs().end());
    const RPoly rest = to_rpoly(Poly(std::move(rest_c)));
    std::vector<double> fixed{0, d1, d2};
    auto col = collapse_impl(rest, fixed, d1, d2, steps);
    for (auto& st : col.stages) path.stages.push_back(std::move(st));
    std::vector<double> from = fixed;
    from.insert(from.end(), col.real_roots.begin(), col.real_roots.end());
    path.stages.push_back(interpolate_roots(r, from, steps));
  }

  if (path.max_drift() > 1e-10) throw std::runtime_error("connect_to_tau: carried double point drifted");
  if (path.max_membership_defect() > 1e-10) throw std::runtime_error("connect_to_tau: path left M_r");
  for (const auto& st : path.stages)
    for (const auto& s : st.samples)
      if (!(s.x1 < s.x2)) throw std::runtime_error("connect_to_tau: carried pair collided");
  return path;
}

}  // namespace

double MrPath::max_drift() const {
  double worst = 0;
  for (const auto& st : stages)
    for (const auto& s : st.samples) worst = std::max(worst, relative_drift(s.poly, s.x1, s.x2));
  return worst;
}

double MrPath::max_membership_defect() const {
  double worst = 0;
  for (const auto& st : stages)
    for (const auto& s : st.samples) worst = std::max(worst, membership_defect(s.poly, r));
  return worst;
}

MrPath connect_to_tau(const QPoly& p, const Rational& x1, const Rational& x2, int steps) {
  return connect_impl<Rational>(p, x1, x2, steps);
}

MrPath connect_to_tau(const RPoly& p, double x1, double x2, int steps) { return connect_impl<double>(p, x1, x2, steps); }

CollapseResult collapse_conjugate_pairs(const RPoly& p, int steps) {
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  auto out = collapse_impl(p, {}, 0, 0, steps);
  std::sort(out.real_roots.begin(), out.real_roots.end());
  return out;
}

// ------------------------------------------------------- lifts of T_r, F_r

ChebyshevDelta chebyshev_delta(int r, int levels) {
  if (r < 1 || levels < 1) throw std::invalid_argument("chebyshev_delta: need r >= 1 and levels >= 1");
  const RPoly t = chebyshev(r).cast<double>();
  ChebyshevDelta out;
  // interior levels: r simple roots; above 1 (even r): the two outer branches
  std::vector<double> cs;
  for (int k = 0; k < levels; ++k) cs.push_back(-1 + 2 * (k + 0.5) / levels);
  if (r % 2 == 0)
    for (int k = 0; k < std::max(1, levels / 4); ++k) cs.push_back(1 + (k + 0.5) / std::max(1, levels / 4));
  int band_count = -1, band_base = 0;
  for (double c : cs) {
    auto zs = real_roots(t - RPoly::constant(c));
    const int count = static_cast<int>(zs.size());
    if (count != band_count) {
      band_base = out.clusters;
      out.clusters += count * (count - 1) / 2;
      band_count = count;
    }
    int idx = 0;
    for (int a = 0; a < count; ++a)
      for (int b = a + 1; b < count; ++b, ++idx) {
        out.pairs.emplace_back(zs[a], zs[b]);
        out.cluster.push_back(band_base + idx);
      }
  }
  return out;
}

LiftSign classify_lift_sign(int r, const RealLift& g, int levels) {
  if (r < 1) throw std::invalid_argument("classify_lift_sign: r must be at least 1");
  LiftSign out;
  auto sign_of = [](double a, double b) {
    const double d = b - a;
    if (std::abs(d) <= 1e-12 * (1 + std::abs(a) + std::abs(b)) || !std::isfinite(d))
      throw std::domain_error("not an embedded lift: g agrees on a double point");
    return d > 0 ? 1 : -1;
  };
  if (r == 1) {
    out.degenerate = true;
    out.epsilon = sign_of(g(-1), g(1));
    return out;
  }
  for (const auto& [x1, x2] : chebyshev_delta(r, levels).pairs) {
    ++out.pairs;
    (sign_of(g(x1), g(x2)) > 0 ? out.positive : out.negative) += 1;
  }
  if (out.positive && out.negative) throw std::domain_error("not an embedded lift: sign map is not constant");
  out.epsilon = out.positive ? 1 : -1;
  if (r >= 3) {
    auto cp = critical_points(r);
    for (double m : cp.maxima) out.maxima_values.push_back(g(m));
    for (double m : cp.minima) out.minima_values.push_back(g(m));
    auto ordered = [&](const std::vector<double>& v) {
      for (std::size_t i = 1; i < v.size(); ++i)
        if ((v[i] - v[i - 1]) * out.epsilon <= 0) return false;
      return true;
    };
    if (!ordered(out.maxima_values) || !ordered(out.minima_values))
      throw std::domain_error("not an embedded lift: extrema out of order");
    out.orderings_checked = true;
  }
  return out;
}

IsotopyReport lift_isotopy_check(const MorinSpec& spec, const MorinLift& psi, int epsilon, int samples,
                                 std::uint64_t seed, int t_count) {
  spec.validate();
  const int r = spec.r;
  if (r < 1) throw std::invalid_argument("lift_isotopy_check: r must be at least 1");
  if (epsilon != 1 && epsilon != -1) throw std::invalid_argument("lift_isotopy_check: epsilon must be +1 or -1");
  if (samples < 1 || t_count < 2) throw std::invalid_argument("lift_isotopy_check: need samples >= 1, t_count >= 2");
  IsotopyReport rep;
  rep.target = epsilon;

  // over λ(x) = (c_1/c_{r+1}, …, c_{r−1}/c_{r+1}, x) the map is τ_r, i.e. T_{r+1} up to an affine change
  const QPoly cheb = chebyshev(r + 1);
  Vec<double> base = Vec<double>::Zero(spec.n);
  for (int j = 1; j < r; ++j) base(j - 1) = (cheb[j] / cheb.leading()).to_double();
  rep.epsilon = classify_lift_sign(r + 1, [&](double x) {
                  Vec<double> p = base;
                  p(spec.n - 1) = x;
                  return psi(p);
                }).epsilon;

  std::mt19937_64 rng(seed);
  auto bases = delta_sample_fr(r, samples, rng());
  rep.t_checked = t_count;
  for (const auto& b : bases) {
    ProductCoords pc;
    pc.base = b;
    for (int i = 0; i < spec.q_count(); ++i) {
      std::vector<Rational> row;
      for (int j = 0; j < r - 1; ++j) row.push_back(random_dyadic(rng, 1, 8));
      pc.c.push_back(std::move(row));
    }
    for (int u = 0; u < spec.unused_count(); ++u) pc.unused.push_back(random_dyadic(rng, 1, 8));
    auto dp = product_forward(spec, pc);
    const Vec<double> p1 = to_double(dp.first), p2 = to_double(dp.second);
    ++rep.pairs;
    const double dpsi = psi(p1) - psi(p2);
    const double dphi = epsilon * (p1(spec.n - 1) - p2(spec.n - 1));
    const double scale = std::abs(dpsi) + std::abs(dphi);
    for (int k = 0; k < t_count; ++k) {
      const double t = static_cast<double>(k) / (t_count - 1);
      // both ends lift F_r, so only the last coordinate can separate the pair
      if (std::abs((1 - t) * dpsi + t * dphi) <= 1e-12 * scale) {
        ++rep.violations;
        if (!rep.witness) rep.witness = IsotopyReport::Witness{t, p1, p2};
      }
    }
  }
  return rep;
}

}  // namespace plk
