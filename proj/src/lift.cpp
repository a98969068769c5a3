#include "plk/lift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/QR>

#include "plk/errors.hpp"

namespace plk {

namespace {

Vec<double> point_to_double(const Point& p) { return to_double<Rational>(p); }

Point snap_vec(const Vec<double>& v, int bits) {
  Point p(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) p(i) = Rational::snap(v(i), bits);
  return p;
}

// least-squares barycentric coordinates in double; nullopt if off the affine hull
std::optional<std::vector<double>> barycentric_double(const Mat<double>& simplex, const Vec<double>& x) {
  const Eigen::Index d = simplex.cols() - 1;
  std::vector<double> w(d + 1);
  if (d == 0) {
    if ((simplex.col(0) - x).lpNorm<Eigen::Infinity>() > 1e-12) return std::nullopt;
    w[0] = 1;
    return w;
  }
  Mat<double> a(simplex.rows(), d);
  for (Eigen::Index j = 0; j < d; ++j) a.col(j) = simplex.col(j + 1) - simplex.col(0);
  Vec<double> rhs = x - simplex.col(0);
  Vec<double> mu = a.colPivHouseholderQr().solve(rhs);
  if ((a * mu - rhs).lpNorm<Eigen::Infinity>() > 1e-10) return std::nullopt;
  w[0] = 1 - mu.sum();
  for (Eigen::Index j = 0; j < d; ++j) w[j + 1] = mu(j);
  return w;
}

}  // namespace

// Top simplices sorted by the lower end of their extent along coordinate 0.
struct LiftFunction::Locator {
  std::vector<int> order;
  std::vector<double> lo0;
  std::vector<Mat<double>> simplex;  // indexed by position in `order`
  double max_width = 0;
};

LiftFunction LiftFunction::closed_form(std::string name, std::vector<double> params, int domain_dim, int k,
                                       DoubleEval eval, ExactHook exact, double sampling_mesh) {
  LiftFunction g;
  g.kind_ = Kind::closed_form_named;
  g.name_ = std::move(name);
  g.params_ = std::move(params);
  g.domain_dim_ = domain_dim;
  g.k_ = k;
  g.eval_ = std::move(eval);
  g.exact_ = std::move(exact);
  g.sampling_mesh_ = sampling_mesh;
  return g;
}

LiftFunction LiftFunction::pl_table(ComplexPtr carrier, std::vector<Point> values) {
  if (static_cast<int>(values.size()) != carrier->num_vertices())
    throw std::invalid_argument("pl_table needs one value per carrier vertex");
  if (values.empty()) throw std::invalid_argument("pl_table on an empty complex");
  LiftFunction g;
  g.kind_ = Kind::pl_table;
  g.name_ = "pl_table";
  g.domain_dim_ = carrier->ambient_dim();
  g.k_ = static_cast<int>(values[0].size());
  for (const auto& v : values)
    if (v.size() != g.k_) throw std::invalid_argument("pl_table values differ in dimension");
  for (const auto& v : values) g.table_double_.push_back(point_to_double(v));
  auto loc = std::make_shared<Locator>();
  std::vector<int> tops = carrier->maximal();
  std::vector<std::pair<double, int>> keyed;
  std::vector<Mat<double>> mats(carrier->num_simplices());
  for (int id : tops) {
    Mat<double> m = carrier->points_of(id).unaryExpr([](const Rational& q) { return q.to_double(); });
    double lo = m.row(0).minCoeff(), hi = m.row(0).maxCoeff();
    loc->max_width = std::max(loc->max_width, hi - lo);
    keyed.emplace_back(lo, id);
    mats[id] = std::move(m);
  }
  std::sort(keyed.begin(), keyed.end());
  for (auto& [lo, id] : keyed) {
    loc->order.push_back(id);
    loc->lo0.push_back(lo);
    loc->simplex.push_back(std::move(mats[id]));
  }
  g.locator_ = std::move(loc);
  g.carrier_ = std::move(carrier);
  g.table_ = std::move(values);
  g.sampling_mesh_ = 0;
  return g;
}

LiftFunction LiftFunction::combination(std::vector<std::pair<double, LiftFunction>> terms) {
  if (terms.empty()) throw std::invalid_argument("combination needs at least one term");
  LiftFunction g;
  g.kind_ = Kind::composite;
  g.name_ = "composite";
  g.domain_dim_ = terms[0].second.domain_dim();
  g.k_ = terms[0].second.k();
  g.sampling_mesh_ = terms[0].second.sampling_mesh();
  for (const auto& [c, t] : terms) {
    if (t.k() != g.k_) throw std::invalid_argument("combination terms differ in codomain dimension");
    if (t.sampling_mesh() > 0) g.sampling_mesh_ = std::min(g.sampling_mesh_ > 0 ? g.sampling_mesh_ : 1.0, t.sampling_mesh());
  }
  g.terms_ = std::move(terms);
  return g;
}

std::optional<std::pair<int, std::vector<double>>> LiftFunction::locate(const Vec<double>& x) const {
  const auto& loc = *locator_;
  const double tol = 1e-12;
  auto end = std::upper_bound(loc.lo0.begin(), loc.lo0.end(), x(0) + tol) - loc.lo0.begin();
  std::optional<std::pair<int, std::vector<double>>> best;
  for (auto i = end - 1; i >= 0 && loc.lo0[i] >= x(0) - loc.max_width - tol; --i) {
    auto w = barycentric_double(loc.simplex[i], x);
    if (!w || *std::min_element(w->begin(), w->end()) < -1e-12) continue;
    if (!best || loc.order[i] < best->first) best.emplace(loc.order[i], std::move(*w));
  }
  return best;
}

std::optional<std::pair<int, std::vector<Rational>>> LiftFunction::locate(const Point& x) const {
  const auto& loc = *locator_;
  Vec<double> xd = point_to_double(x);
  auto end = std::upper_bound(loc.lo0.begin(), loc.lo0.end(), xd(0) + 1e-9) - loc.lo0.begin();
  std::optional<std::pair<int, std::vector<Rational>>> best;
  auto consider = [&](int id) {
    auto w = barycentric_coordinates(carrier_->points_of(id), x);
    if (!w || std::any_of(w->begin(), w->end(), [](const Rational& q) { return q.sign() < 0; })) return;
    if (!best || id < best->first) best.emplace(id, std::move(*w));
  };
  for (auto i = end - 1; i >= 0 && loc.lo0[i] >= xd(0) - loc.max_width - 1e-9; --i) consider(loc.order[i]);
  if (!best)
    for (int id : loc.order) consider(id);
  return best;
}

Vec<double> LiftFunction::operator()(const Vec<double>& x) const {
  switch (kind_) {
    case Kind::closed_form_named:
      return eval_(x);
    case Kind::pl_table: {
      auto hit = locate(x);
      if (!hit) throw std::domain_error("point outside the pl_table carrier");
      const Simplex& s = carrier_->simplex(hit->first);
      Vec<double> out = Vec<double>::Zero(k_);
      for (std::size_t j = 0; j < s.size(); ++j) out += hit->second[j] * table_double_[s[j]];
      return out;
    }
    case Kind::composite: {
      Vec<double> out = Vec<double>::Zero(k_);
      for (const auto& [c, t] : terms_) out += c * t(x);
      return out;
    }
  }
  return {};
}

Vec<double> LiftFunction::operator()(const Point& x) const {
  if (kind_ == Kind::pl_table) return point_to_double(exact(x));
  if (kind_ == Kind::closed_form_named && exact_)
    if (auto v = exact_(x)) return point_to_double(*v);
  return (*this)(point_to_double(x));
}

Point LiftFunction::exact(const Point& x, int bits) const {
  if (kind_ == Kind::pl_table) {
    auto hit = locate(x);
    if (!hit) throw std::domain_error("point outside the pl_table carrier");
    return on_simplex(hit->first, hit->second);
  }
  if (kind_ == Kind::closed_form_named && exact_)
    if (auto v = exact_(x)) return *v;
  return snap_vec((*this)(point_to_double(x)), bits);
}

Point LiftFunction::on_simplex(int simplex_id, const std::vector<Rational>& weights) const {
  if (kind_ != Kind::pl_table) throw std::logic_error("on_simplex needs a pl_table");
  const Simplex& s = carrier_->simplex(simplex_id);
  Point out = Point::Constant(k_, Rational(0));
  for (std::size_t j = 0; j < s.size(); ++j)
    if (!weights[j].is_zero()) out += table_[s[j]] * weights[j];
  return out;
}

// ---- builtins ----

double absval_g(double x) {
  if (x == 0) return 0;
  double a = std::numbers::pi / x;
  if (x > 0) {
    double s = std::sin(a);
    return -2 * x * s * s;
  }
  double c = std::cos(a);
  return -2 * x * c * c;
}

namespace {

std::optional<Point> absval_exact(const Point& p) {
  const Rational& x = p(0);
  if (x.is_zero()) return make_point({Rational(0)});
  Rational inv = Rational(1) / abs(x);  // 1/|x|
  Rational twice = inv * Rational(2);
  bool inv_int = inv.den() == 1, twice_odd = twice.den() == 1 && mpz_odd_p(twice.num().get_mpz_t());
  if (x.sign() > 0) {
    if (inv_int) return make_point({Rational(0)});           // sin(π/x) = 0
    if (twice_odd) return make_point({Rational(-2) * x});    // sin² = 1
  } else {
    if (twice_odd) return make_point({Rational(0)});         // cos(π/x) = 0
    if (inv_int) return make_point({Rational(-2) * x});      // cos² = 1
  }
  return std::nullopt;
}

LiftFunction make_absval() {
  return LiftFunction::closed_form(
      "absval_example", {}, 1, 1,
      [](const Vec<double>& x) {
        Vec<double> out(1);
        out(0) = absval_g(x(0));
        return out;
      },
      absval_exact, 1e-4);
}

// wave: params [k, N, M, then per output j: α_j, β_j, then M × (a, ω_1..ω_N, φ)]
// g_j(x) = (α_j x_0 + β_j)(1 + Σ_m a_m sin(ω_m·x + φ_m))
LiftFunction make_wave(const std::vector<double>& p) {
  if (p.size() < 3) throw std::invalid_argument("wave: params must start with k, N, M");
  const int k = static_cast<int>(p[0]), n = static_cast<int>(p[1]), m = static_cast<int>(p[2]);
  if (k < 1 || n < 1 || m < 0) throw std::invalid_argument("wave: need k ≥ 1, N ≥ 1, M ≥ 0");
  const std::size_t per_term = static_cast<std::size_t>(n) + 2, per_out = 2 + per_term * m;
  if (p.size() != 3 + per_out * k) throw std::invalid_argument("wave: wrong parameter count");
  double max_freq = 1;
  for (int j = 0; j < k; ++j)
    for (int t = 0; t < m; ++t) {
      const double* term = &p[3 + per_out * j + 2 + per_term * t];
      for (int i = 0; i < n; ++i) max_freq = std::max(max_freq, std::abs(term[1 + i]));
    }
  return LiftFunction::closed_form(
      "wave", p, n, k,
      [p, k, n, m, per_term, per_out](const Vec<double>& x) {
        Vec<double> out(k);
        for (int j = 0; j < k; ++j) {
          const double* row = &p[3 + per_out * j];
          double factor = 1;
          for (int t = 0; t < m; ++t) {
            const double* term = row + 2 + per_term * t;
            double phase = term[1 + n];
            for (int i = 0; i < n; ++i) phase += term[1 + i] * x(i);
            factor += term[0] * std::sin(phase);
          }
          out(j) = (row[0] * x(0) + row[1]) * factor;
        }
        return out;
      },
      {}, 0.05 / max_freq);
}

}  // namespace

LiftFunction LiftFunction::from_registry(const std::string& name, const std::vector<double>& params) {
  if (name == "absval_example") {
    if (!params.empty()) throw std::invalid_argument("absval_example takes no params");
    return make_absval();
  }
  if (name == "wave") return make_wave(params);
  throw UnknownBuiltin("unknown builtin lift: " + name);
}

AbsvalInstance example_absval() {
  auto p = std::make_shared<Complex>(
      std::vector<Point>{make_point({Rational(-1)}), make_point({Rational(0)}), make_point({Rational(1)})},
      std::vector<Simplex>{{0, 1}, {1, 2}});
  auto q = std::make_shared<Complex>(std::vector<Point>{make_point({Rational(0)}), make_point({Rational(1)})},
                                     std::vector<Simplex>{{0, 1}});
  return {SimplicialMap{p, q, {1, 0, 1}}, make_absval()};
}

std::vector<double> absval_zeros(double lo, double hi) {
  if (!(lo < hi) || (lo <= 0 && hi >= 0)) throw std::invalid_argument("absval_zeros: interval must avoid 0");
  const bool positive = lo > 0;
  const double a = std::abs(positive ? lo : hi), b = std::abs(positive ? hi : lo);  // a < b, |x| ∈ [a,b]
  // positive side: zeros of sin(π/x) at 1/n; negative side: zeros of cos(π/x) at 1/(j+1/2)
  auto factor = [positive](double ax) { return positive ? std::sin(std::numbers::pi / ax) : std::cos(std::numbers::pi / ax); };
  std::vector<double> out;
  const long u_lo = static_cast<long>(std::floor(1 / b)), u_hi = static_cast<long>(std::ceil(1 / a));
  for (long u = std::max(1L, u_lo - 1); u <= u_hi; ++u) {
    // bracket |x| ∈ [1/(u+1/2), 1/(u−1/2)] around 1/u (positive) or [1/(u+1), 1/u] around 1/(u+1/2) (negative)
    double left = positive ? 1 / (u + 0.5) : 1.0 / (u + 1);
    double right = positive ? (u > 1 ? 1 / (u - 0.5) : 2.0) : 1.0 / u;
    double fl = factor(left), fr = factor(right);
    if (fl == 0 || fr == 0 || (fl > 0) == (fr > 0)) {
      double z = fl == 0 ? left : (fr == 0 ? right : NAN);
      if (std::isnan(z)) continue;
      if (z >= a && z <= b) out.push_back(positive ? z : -z);
      continue;
    }
    for (int it = 0; it < 200 && right - left > 0; ++it) {
      double mid = 0.5 * (left + right);
      if (mid <= left || mid >= right) break;
      double fm = factor(mid);
      if (fm == 0) { left = right = mid; break; }
      if ((fm > 0) == (fl > 0)) left = mid, fl = fm;
      else right = mid;
    }
    double z = 0.5 * (left + right);
    if (z >= a && z <= b) out.push_back(positive ? z : -z);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BarycentricFailure barycentric_failure(const Rational& epsilon, int samples) {
  if (epsilon.sign() <= 0 || epsilon > Rational(1)) throw std::invalid_argument("barycentric_failure needs ε in (0,1]");
  BarycentricFailure out;
  out.epsilon = epsilon;
  // smallest odd k ≥ 2/ε: then 2/k is a zero of the negative branch and 2/(k+1) of the positive one
  Rational two_over = Rational(2) / epsilon;
  mpz_class k = two_over.num() / two_over.den();
  if (Rational(k, 1) < two_over) k += 1;
  if (mpz_even_p(k.get_mpz_t())) k += 1;
  out.k = k.get_si();
  out.upper = Rational(mpz_class(2), k);
  out.lower = Rational(mpz_class(2), k + 1);
  const Rational half = epsilon / Rational(2);
  out.pair_inside = half <= out.lower && out.upper <= epsilon;

  auto g = make_absval();
  std::vector<Point> pos, neg;
  for (int i = 0; i <= samples; ++i) {
    Rational x = half + (epsilon - half) * Rational(mpz_class(i), mpz_class(samples));
    pos.push_back(g.exact(make_point({x})));
    neg.push_back(g.exact(make_point({-x})));
  }
  pos.push_back(g.exact(make_point({out.lower})));
  neg.push_back(g.exact(make_point({-out.upper})));
  out.samples = static_cast<int>(pos.size() + neg.size());
  out.hulls = hull_disjoint(make_point_set(pos), make_point_set(neg));
  return out;
}

std::vector<std::vector<Rational>> barycentric_grid(int d, int m, bool interior_only) {
  std::vector<std::vector<Rational>> out;
  std::vector<int> parts(d + 1, 0);
  const int min_part = interior_only ? 1 : 0;
  // enumerate compositions of m into d+1 parts
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == d) {
      if (left < min_part) return;
      parts[d] = left;
      std::vector<Rational> w(d + 1);
      for (int j = 0; j <= d; ++j) w[j] = Rational(mpz_class(parts[j]), mpz_class(m));
      out.push_back(std::move(w));
      return;
    }
    for (int v = min_part; v <= left - min_part * (d - idx); ++v) {
      parts[idx] = v;
      rec(idx + 1, left - v);
    }
  };
  if (m >= 1) rec(0, m);
  return out;
}

namespace {

// point of `sheet` over target simplex `rho` at barycentric weights on rho
Point sheet_point(const SimplicialMap& f, const Simplex& sheet, const Simplex& rho, const std::vector<Rational>& w) {
  Point x = Point::Constant(f.source->ambient_dim(), Rational(0));
  for (int v : sheet) {
    auto pos = std::lower_bound(rho.begin(), rho.end(), f.vertex_map[v]) - rho.begin();
    if (!w[pos].is_zero()) x += f.source->vertex(v) * w[pos];
  }
  return x;
}

}  // namespace

DoublePointSample sample_double_points(const SimplicialMap& f, int res) {
  if (res < 1) throw std::invalid_argument("resolution must be ≥ 1");
  auto nd = is_nondegenerate(f);
  if (!nd.nondegenerate) throw std::invalid_argument("sample_double_points requires a non-degenerate map");
  std::map<int, std::vector<int>> sheets;
  for (int id = 0; id < f.source->num_simplices(); ++id) sheets[f.image_id(id)].push_back(id);
  DoublePointSample out;
  out.map = f;
  out.resolution = res;
  for (const auto& [rho_id, over] : sheets) {
    if (over.size() < 2) continue;
    const Simplex& rho = f.target->simplex(rho_id);
    auto grid = barycentric_grid(static_cast<int>(rho.size()) - 1, res, true);
    for (std::size_t a = 0; a < over.size(); ++a)
      for (std::size_t b = a + 1; b < over.size(); ++b)
        for (const auto& w : grid) {
          DoublePoint dp;
          dp.x = sheet_point(f, f.source->simplex(over[a]), rho, w);
          dp.y = sheet_point(f, f.source->simplex(over[b]), rho, w);
          dp.sheet_x = over[a];
          dp.sheet_y = over[b];
          dp.image = rho_id;
          dp.weights = w;
          out.pairs.push_back(std::move(dp));
        }
  }
  return out;
}

namespace {

// union-find with orientation parity
struct ParityUnionFind {
  std::map<std::pair<int, int>, std::pair<std::pair<int, int>, int>> parent;
  std::pair<std::pair<int, int>, int> find(std::pair<int, int> key) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      parent[key] = {key, 0};
      return {key, 0};
    }
    if (it->second.first == key) return {key, 0};
    auto [root, par] = find(it->second.first);
    it->second = {root, it->second.second ^ par};
    return it->second;
  }
  void unite(std::pair<int, int> a, std::pair<int, int> b, int parity) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return;
    if (rb < ra) std::swap(ra, rb);
    parent[rb] = {ra, pa ^ pb ^ parity};
  }
};

}  // namespace

SignMap sign_map(const LiftFunction& g, const DoublePointSample& delta) {
  SignMap out;
  const std::size_t n = delta.pairs.size();
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& dp = delta.pairs[i];
    Vec<double> diff = g(dp.y) - g(dp.x);
    double norm = diff.norm();
    if (!(norm > 0)) {
      auto show = [](const Point& p) {
        std::string s = "(";
        for (Eigen::Index j = 0; j < p.size(); ++j) s += (j ? "," : "") + p(j).str();
        return s + ")";
      };
      throw std::runtime_error("not an embedded lift at pair (" + show(dp.x) + "," + show(dp.y) + ")");
    }
    out.values[i] = diff / norm;
  }
  // clusters: sheet pairs joined through common face pairs, tracking orientation
  ParityUnionFind uf;
  const SimplicialMap& f = delta.map;
  if (f.source) {
    std::map<int, std::vector<int>> sheets;
    for (int id = 0; id < f.source->num_simplices(); ++id) sheets[f.image_id(id)].push_back(id);
    for (const auto& [rho_id, over] : sheets) {
      const Simplex& rho = f.target->simplex(rho_id);
      if (rho.size() < 2) continue;
      for (std::size_t a = 0; a < over.size(); ++a)
        for (std::size_t b = a + 1; b < over.size(); ++b)
          for (std::size_t drop = 0; drop < rho.size(); ++drop) {
            auto face = [&](int sheet) {
              Simplex out;
              for (int v : f.source->simplex(sheet))
                if (f.vertex_map[v] != rho[drop]) out.push_back(v);
              return *f.source->find(out);
            };
            int fa = face(over[a]), fb = face(over[b]);
            if (fa == fb) continue;
            uf.unite({over[a], over[b]}, {std::min(fa, fb), std::max(fa, fb)}, fa > fb ? 1 : 0);
          }
    }
  }
  std::map<std::pair<int, int>, int> root_cluster;
  out.cluster.assign(n, 0);
  out.orientation.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& dp = delta.pairs[i];
    std::pair<int, int> key{std::min(dp.sheet_x, dp.sheet_y), std::max(dp.sheet_x, dp.sheet_y)};
    auto [root, parity] = uf.find(key);
    if (dp.sheet_x > dp.sheet_y) parity ^= 1;
    auto it = root_cluster.emplace(root, static_cast<int>(root_cluster.size())).first;
    out.cluster[i] = it->second;
    out.orientation[i] = parity ? -1 : 1;
  }
  out.clusters = static_cast<int>(root_cluster.size());
  if (g.k() == 1) {
    out.cluster_sign.assign(out.clusters, 2);
    for (std::size_t i = 0; i < n; ++i) {
      int s = (out.values[i](0) > 0 ? 1 : -1) * out.orientation[i];
      int& cs = out.cluster_sign[out.cluster[i]];
      cs = cs == 2 ? s : (cs == s ? s : 0);
    }
  }
  return out;
}

}  // namespace plk
