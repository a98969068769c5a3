#include "plk/triangulate.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <set>

#include "plk/parallel.hpp"

namespace plk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat<double> to_double_mat(const PointSet& m) {
  return m.unaryExpr([](const Rational& q) { return q.to_double(); });
}

int grid_cap(int d, int max_res) {
  if (d <= 1) return max_res;
  return std::max(2, static_cast<int>(std::pow(static_cast<double>(max_res), 1.0 / d)));
}

int adaptive_res(double diam, double mesh, int d, int min_res, int max_res) {
  if (d == 0) return 1;
  if (!(mesh > 0)) return std::max(1, min_res);
  double want = std::ceil(diam / mesh);
  return std::clamp(static_cast<int>(std::min(want, 1e9)), min_res, std::max(min_res, grid_cap(d, max_res)));
}

// integer compositions of m into d+1 parts, as double weights
std::vector<std::vector<double>> make_grid_double(int d, int m) {
  std::vector<std::vector<double>> out;
  std::vector<int> parts(d + 1);
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == d) {
      parts[d] = left;
      std::vector<double> w(d + 1);
      for (int j = 0; j <= d; ++j) w[j] = static_cast<double>(parts[j]) / m;
      out.push_back(std::move(w));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      parts[idx] = v;
      rec(idx + 1, left - v);
    }
  };
  rec(0, m);
  return out;
}

const std::vector<std::vector<double>>& grid_double(int d, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<std::vector<double>>> cache;
  std::lock_guard lock(mu);
  auto [it, fresh] = cache.try_emplace({d, m});
  if (fresh) it->second = make_grid_double(d, m);
  return it->second;  // map nodes never move
}

double dist_to_skeleton(const Vec<double>& x, const std::vector<Mat<double>>& skeleton) {
  double best = kInf;
  for (const auto& s : skeleton) best = std::min(best, point_simplex_distance(x, s));
  return best;
}

// Other sheets over the same image, per source simplex, so a K simplex can
// measure how far g keeps it from its partners.
struct SheetPartners {
  std::vector<Mat<double>> inverse;                // [x;1] -> image-ordered barycentric weights
  std::vector<std::vector<Mat<double>>> partners;  // image-ordered vertex columns of the other sheets
  std::vector<Mat<double>> skeleton;               // samples this close to P^(i) are ignored
  double eps = 0;
};

SheetPartners sheet_partners(const SimplicialMap& f, int i, double eps) {
  const Complex& p = *f.source;
  SheetPartners out;
  out.eps = eps;
  out.inverse.resize(p.num_simplices());
  out.partners.resize(p.num_simplices());
  std::map<int, std::vector<int>> over;
  for (int id = 0; id < p.num_simplices(); ++id) {
    if (p.simplex_dim(id) <= i) out.skeleton.push_back(to_double_mat(p.points_of(id)));
    over[f.image_id(id)].push_back(id);
  }
  auto ordered = [&](int id) {
    const Simplex& rho = f.target->simplex(f.image_id(id));
    Mat<double> m(p.ambient_dim(), rho.size());
    for (int v : p.simplex(id)) {
      auto pos = std::lower_bound(rho.begin(), rho.end(), f.vertex_map[v]) - rho.begin();
      m.col(pos) = to_double<Rational>(p.vertex(v));
    }
    return m;
  };
  for (const auto& [rho, ids] : over) {
    if (ids.size() < 2) continue;
    for (int id : ids) {
      Mat<double> m = ordered(id);
      Mat<double> h(m.rows() + 1, m.cols());
      h.topRows(m.rows()) = m;
      h.row(m.rows()).setOnes();
      out.inverse[id] = h.completeOrthogonalDecomposition().pseudoInverse();
      for (int other : ids)
        if (other != id) out.partners[id].push_back(ordered(other));
    }
  }
  return out;
}

struct Oscillation {
  double spread = 0;     // diagonal of the bounding box of g-samples
  double gap = kInf;     // smallest |g(x) - g(partner of x)| over samples
};

Oscillation oscillation(const LiftFunction& g, const Mat<double>& simplex, int min_res, int max_res,
                        const SheetPartners* sp = nullptr, int carrier = -1) {
  const int d = static_cast<int>(simplex.cols()) - 1;
  double diam = 0;
  for (int a = 0; a <= d; ++a)
    for (int b = a + 1; b <= d; ++b) diam = std::max(diam, (simplex.col(a) - simplex.col(b)).norm());
  int res = adaptive_res(diam, g.sampling_mesh(), d, min_res, max_res);
  bool partnered = sp && carrier >= 0 && !sp->partners[carrier].empty();
  // one distance query decides most simplices wholesale
  bool all_far = false;
  if (partnered) {
    const double d0 = dist_to_skeleton(simplex.col(0), sp->skeleton);
    all_far = d0 - diam > sp->eps;
    partnered = d0 + diam > sp->eps;
  }
  Oscillation out;
  Vec<double> lo, hi;
  bool first = true;
  for (const auto& w : grid_double(d, res)) {
    Vec<double> x = Vec<double>::Zero(simplex.rows());
    for (int j = 0; j <= d; ++j) x += w[j] * simplex.col(j);
    Vec<double> v = g(x);
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    if (!partnered || (!all_far && dist_to_skeleton(x, sp->skeleton) <= sp->eps)) continue;
    Vec<double> xh(x.size() + 1);
    xh << x, 1.0;
    Vec<double> lambda = sp->inverse[carrier] * xh;
    for (const auto& m : sp->partners[carrier]) out.gap = std::min(out.gap, (v - g(Vec<double>(m * lambda))).norm());
  }
  out.spread = (hi - lo).norm();
  return out;
}

double simplex_diameter(const Mat<double>& s) {
  double diam = 0;
  for (Eigen::Index a = 0; a < s.cols(); ++a)
    for (Eigen::Index b = a + 1; b < s.cols(); ++b) diam = std::max(diam, (s.col(a) - s.col(b)).norm());
  return diam;
}

bool all_above(const CarriedComplex& c, const Simplex& s, int level) {
  return std::all_of(s.begin(), s.end(), [&](int v) { return c.level(v) > level; });
}

// Refines L near its vertices of level > `above` until every K simplex there has
// sampled g-oscillation below max(floor, local gap · ratio), the local gap
// being measured against the other sheets (none given: the floor alone).
// Returns the largest such K simplex diameter.
double refine_stage(const SimplicialMap& f, const LiftFunction& g, CarriedComplex& L, int above, double floor,
                    double ratio, const SheetPartners* sp, const TriangulateOptions& opt) {
  for (int round = 0;; ++round) {
    Pullback pb = pullback(f, L);
    const Complex& k = *pb.source.complex;
    std::vector<int> region;
    for (int id = 0; id < k.num_simplices(); ++id)
      if (k.simplex_dim(id) >= 1 && all_above(pb.source, k.simplex(id), above)) region.push_back(id);
    std::vector<char> bad(region.size(), 0);
    std::vector<double> diam(region.size(), 0);
    parallel_for(region.size(), [&](std::size_t i) {
      Mat<double> s = to_double_mat(k.points_of(region[i]));
      diam[i] = simplex_diameter(s);
      const int carrier = sp ? pb.source.carrier_of(k.simplex(region[i])) : -1;
      auto osc = oscillation(g, s, opt.sample_res, opt.max_sample_res, sp, carrier);
      bad[i] = osc.spread >= (sp ? std::max(floor, osc.gap * ratio) : floor);
    });
    std::vector<bool> flags(L.complex->num_vertices(), false);
    bool any = false;
    for (std::size_t i = 0; i < region.size(); ++i) {
      if (!bad[i]) continue;
      any = true;
      for (int w : pb.map.image(k.simplex(region[i]))) flags[w] = true;
    }
    if (!any) return diam.empty() ? 0.0 : *std::max_element(diam.begin(), diam.end());
    if (round >= opt.max_rounds || static_cast<std::size_t>(k.num_simplices()) > opt.max_simplices)
      throw TriangulationFailure("refinement budget exhausted before the oscillation bound was met", -1, -1);
    L = refine_near(L, flags);
  }
}

// pairs of distinct K vertices over a common L vertex
std::vector<std::pair<int, int>> vertex_pairs(const Pullback& pb, int level_filter) {
  std::map<int, std::vector<int>> by_image;
  for (int v = 0; v < pb.source.complex->num_vertices(); ++v)
    if (level_filter < 0 || pb.source.level(v) == level_filter) by_image[pb.map.vertex_map[v]].push_back(v);
  std::vector<std::pair<int, int>> out;
  for (const auto& [w, vs] : by_image)
    for (std::size_t a = 0; a < vs.size(); ++a)
      for (std::size_t b = a + 1; b < vs.size(); ++b) out.emplace_back(vs[a], vs[b]);
  return out;
}

double gap(const LiftFunction& g, const Point& x, const Point& y) { return (g(x) - g(y)).norm(); }

// d_{i+1} and the U_i radius
std::pair<double, double> stage_separation(const SimplicialMap& f, const LiftFunction& g, const Pullback& pb, int i,
                                           const TriangulateOptions& opt) {
  const Complex& p = *f.source;
  const Complex& k = *pb.source.complex;
  std::vector<Mat<double>> skeleton;
  for (int id = 0; id < p.num_simplices(); ++id)
    if (p.simplex_dim(id) <= i) skeleton.push_back(to_double_mat(p.points_of(id)));
  // U_i radius: half the distance from X_i to P^(i)
  double eps = kInf;
  for (int id = 0; id < k.num_simplices(); ++id) {
    Simplex hi, lo;
    for (int v : k.simplex(id)) (pb.source.level(v) > i ? hi : lo).push_back(v);
    if (hi.empty()) continue;
    if (lo.empty()) {
      if (hi.size() == 1) eps = std::min(eps, dist_to_skeleton(to_double<Rational>(k.vertex(hi[0])), skeleton));
      continue;
    }
    auto r = min_norm_point<double>(to_double_mat(k.points_of(hi)), to_double_mat(k.points_of(lo)));
    eps = std::min(eps, std::sqrt(std::max(0.0, r.squared)));
  }
  eps *= 0.5;
  if (!(eps > 0) || std::isinf(eps)) return {kInf, eps};

  double d = kInf;
  // sampled double points of P^(i+1) ∩ U_i
  std::map<int, std::vector<int>> sheets;
  for (int id = 0; id < p.num_simplices(); ++id)
    if (p.simplex_dim(id) == i + 1) sheets[f.image_id(id)].push_back(id);
  for (const auto& [rho_id, over] : sheets) {
    if (over.size() < 2) continue;
    const Simplex& rho = f.target->simplex(rho_id);
    const int dim = static_cast<int>(rho.size()) - 1;
    double diam = 0;
    for (int s : over) diam = std::max(diam, simplex_diameter(to_double_mat(p.points_of(s))));
    int res = std::clamp(static_cast<int>(std::ceil(4 * diam / eps)), opt.delta_res,
                         std::max(opt.delta_res, grid_cap(dim, 1 << 14)));
    auto grid = grid_double(dim, res);
    auto sheet_mat = [&](int s) {
      Mat<double> m(p.ambient_dim(), rho.size());
      for (int v : p.simplex(s)) {
        auto pos = std::lower_bound(rho.begin(), rho.end(), f.vertex_map[v]) - rho.begin();
        m.col(pos) = to_double<Rational>(p.vertex(v));
      }
      return m;
    };
    for (std::size_t a = 0; a < over.size(); ++a)
      for (std::size_t b = a + 1; b < over.size(); ++b) {
        Mat<double> ma = sheet_mat(over[a]), mb = sheet_mat(over[b]);
        std::vector<double> best(grid.size(), kInf);
        parallel_for(grid.size(), [&](std::size_t gi) {
          Vec<double> x = Vec<double>::Zero(ma.rows()), y = x;
          for (int j = 0; j <= dim; ++j) {
            x += grid[gi][j] * ma.col(j);
            y += grid[gi][j] * mb.col(j);
          }
          if (dist_to_skeleton(x, skeleton) <= eps || dist_to_skeleton(y, skeleton) <= eps) return;
          best[gi] = (g(x) - g(y)).norm();
        });
        d = std::min(d, *std::min_element(best.begin(), best.end()));
      }
  }
  // the K vertices that will need separating at this level
  // (those inside U_i are left to the certificate, like the sampled ones)
  for (auto [u, v] : vertex_pairs(pb, i + 1)) {
    if (dist_to_skeleton(to_double<Rational>(k.vertex(u)), skeleton) <= eps ||
        dist_to_skeleton(to_double<Rational>(k.vertex(v)), skeleton) <= eps)
      continue;
    d = std::min(d, gap(g, k.vertex(u), k.vertex(v)));
  }
  return {d, eps};
}

BarycenterRule level_weighted_rule(const CarriedComplex& l, const mpz_class& w) {
  return [l, w](const Complex& c, int id) {
    Point sum = Point::Constant(c.ambient_dim(), Rational(0));
    Rational total(0);
    for (int v : c.simplex(id)) {
      mpz_class weight;
      mpz_pow_ui(weight.get_mpz_t(), w.get_mpz_t(), static_cast<unsigned long>(l.level(v)));
      Rational rw(weight, mpz_class(1));
      sum += c.vertex(v) * rw;
      total += rw;
    }
    return Point(sum / total);
  };
}

std::vector<Point> dedupe(std::vector<Point> pts) {
  auto less = [](const Point& a, const Point& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::sort(pts.begin(), pts.end(), less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

namespace {

// The maximal simplices of u's dual cone are the top simplices of K' at u's
// center, so the star is all that needs sampling.
std::vector<Point> star_samples(const Complex& kp, const std::vector<int>& star, double mesh, int min_res,
                                int max_res) {
  std::vector<Point> out;
  for (int id : star) {
    const int dim = kp.simplex_dim(id);
    PointSet pts = kp.points_of(id);
    int res = adaptive_res(simplex_diameter(to_double_mat(pts)), mesh, dim, min_res, max_res);
    for (const auto& w : barycentric_grid(dim, res)) {
      Point x = Point::Constant(kp.ambient_dim(), Rational(0));
      for (int j = 0; j <= dim; ++j)
        if (!w[j].is_zero()) x += pts.col(j) * w[j];
      out.push_back(std::move(x));
    }
  }
  return dedupe(std::move(out));
}

std::vector<std::vector<int>> maximal_star_index(const Complex& kp) {
  std::vector<std::vector<int>> star(kp.num_vertices());
  for (int id : kp.maximal())
    for (int v : kp.simplex(id)) star[v].push_back(id);
  return star;
}

}  // namespace

std::vector<Point> dual_cone_samples(const LiftTriangulation& t, int u, double mesh, int min_res, int max_res) {
  const Complex& kp = *t.derived.source.result;
  const int center = t.K.complex->vertex_id(u);
  std::vector<int> star;
  for (int id : kp.maximal())
    if (std::binary_search(kp.simplex(id).begin(), kp.simplex(id).end(), center)) star.push_back(id);
  return star_samples(kp, star, mesh, min_res, max_res);
}

LiftTriangulation triangulate_lift(const SimplicialMap& f, const LiftFunction& g, const TriangulateOptions& opt) {
  if (!is_nondegenerate(f).nondegenerate) throw std::invalid_argument("triangulate_lift requires a non-degenerate map");
  if (g.domain_dim() != f.source->ambient_dim())
    throw std::invalid_argument("lift domain dimension does not match the source complex");
  const int n = f.source->dim();
  int fail_u = -1, fail_v = -1;
  std::string fail_msg = "certificate failed";

  // d_0 over vertex pairs of P
  double d0 = kInf;
  {
    auto ident = CarriedComplex::identity(f.target);
    Pullback pb0 = pullback(f, ident);
    for (auto [u, v] : vertex_pairs(pb0, -1)) d0 = std::min(d0, gap(g, pb0.source.complex->vertex(u), pb0.source.complex->vertex(v)));
  }

  for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
    const double scale = std::ldexp(1.0, -attempt);
    LiftTriangulation t;
    t.f = f;
    t.audit.retries = attempt;
    try {
      CarriedComplex L = CarriedComplex::identity(f.target);
      t.audit.d.push_back(d0);
      const double ratio = scale / (2 * opt.safety);
      t.audit.r.push_back(std::isinf(d0) ? 0.0 : refine_stage(f, g, L, -1, d0 * ratio, ratio, nullptr, opt));
      for (int i = 0; i < n; ++i) {
        Pullback pb = pullback(f, L);
        auto [d, eps] = stage_separation(f, g, pb, i, opt);
        t.audit.d.push_back(d);
        t.audit.eps_u.push_back(eps);
        if (std::isinf(d)) {
          t.audit.r.push_back(0.0);
          continue;
        }
        auto sp = sheet_partners(f, i, eps);
        t.audit.r.push_back(refine_stage(f, g, L, i, d * ratio, ratio, &sp, opt));
      }
      Pullback pb = pullback(f, L);
      t.K = pb.source;
      t.L = L;
      t.f_KL = pb.map;
    } catch (const TriangulationFailure& e) {
      fail_msg = e.what();
      continue;
    }
    // barycenter weights W^level, W a power of two
    const ComplexPtr k_ptr = t.K.complex;  // t is reassigned below
    const Complex& k = *k_ptr;
    double max_diam = 0, min_edge = kInf;
    for (int id = 0; id < k.num_simplices(); ++id) {
      if (k.simplex_dim(id) < 1) continue;
      double dm = simplex_diameter(to_double_mat(k.points_of(id)));
      max_diam = std::max(max_diam, dm);
      if (k.simplex_dim(id) == 1) min_edge = std::min(min_edge, dm);
    }
    int exponent = attempt;
    if (max_diam > 0 && min_edge < kInf)
      exponent += std::max(0, static_cast<int>(std::ceil(std::log2(2.0 * (n + 1) * max_diam / min_edge))));
    mpz_class w;
    mpz_ui_pow_ui(w.get_mpz_t(), 2, static_cast<unsigned long>(exponent));
    auto audit = t.audit;
    t = assemble_triangulation(f, t.L, level_weighted_rule(t.L, w), g, opt.snap_bits);
    t.audit = audit;
    t.audit.weight_base = w;

    auto check = certify_dual_cones(t, g, opt);
    if (!check.failures.empty()) {
      double tightest = kInf;
      for (auto [u, v] : check.failures) {
        double gp = gap(g, k.vertex(u), k.vertex(v));
        if (gp < tightest) {
          tightest = gp;
          fail_u = u;
          fail_v = v;
        }
      }
      fail_msg = "dual-cone hulls intersect";
      continue;
    }
    t.certificate = std::move(check.entries);
    return t;
  }
  throw TriangulationFailure("triangulate_lift: retry budget exhausted (" + fail_msg + ")", fail_u, fail_v);
}

LiftTriangulation assemble_triangulation(const SimplicialMap& f, const CarriedComplex& L, const BarycenterRule& rule,
                                         const LiftFunction& g, int snap_bits) {
  LiftTriangulation t;
  t.f = f;
  Pullback pb = pullback(f, L);
  t.K = pb.source;
  t.L = L;
  t.f_KL = pb.map;
  t.derived = compatible_derived_pair(t.f_KL, rule);
  const Complex& kp = *t.derived.source.result;
  t.g_values.resize(kp.num_vertices());
  parallel_for(t.g_values.size(), [&](std::size_t v) { t.g_values[v] = g.exact(kp.vertex(static_cast<int>(v)), snap_bits); });
  return t;
}

DualConeCheck certify_dual_cones(const LiftTriangulation& t, const LiftFunction& g, const TriangulateOptions& opt) {
  auto pairs = vertex_pairs(Pullback{t.K, t.f_KL}, -1);
  std::set<int> involved;
  for (auto [u, v] : pairs) {
    involved.insert(u);
    involved.insert(v);
  }
  std::vector<int> verts(involved.begin(), involved.end());
  std::map<int, std::size_t> slot;
  for (std::size_t i = 0; i < verts.size(); ++i) slot[verts[i]] = i;
  const Complex& kp = *t.derived.source.result;
  const auto star = maximal_star_index(kp);
  std::vector<PointSet> images(verts.size());
  parallel_for(verts.size(), [&](std::size_t i) {
    const auto& st = star[t.K.complex->vertex_id(verts[i])];
    std::vector<Point> vals;
    if (g.has_exact_values()) {
      for (const auto& x : star_samples(kp, st, g.sampling_mesh(), opt.sample_res, opt.max_sample_res))
        vals.push_back(g.exact(x, opt.snap_bits));
    } else {
      // g is only known in double anyway; sample points in double too
      std::vector<Vec<double>> raw;
      for (int id : st) {
        Mat<double> s = to_double_mat(kp.points_of(id));
        const int dim = kp.simplex_dim(id);
        int res = adaptive_res(simplex_diameter(s), g.sampling_mesh(), dim, opt.sample_res, opt.max_sample_res);
        for (const auto& w : grid_double(dim, res)) {
          Vec<double> x = Vec<double>::Zero(s.rows());
          for (int j = 0; j <= dim; ++j) x += w[j] * s.col(j);
          raw.push_back(g(x));
        }
      }
      std::sort(raw.begin(), raw.end(), [](const Vec<double>& a, const Vec<double>& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
      });
      raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
      for (const auto& y : raw) {
        Point v(y.size());
        for (Eigen::Index c = 0; c < y.size(); ++c) v(c) = Rational::snap(y(c), static_cast<unsigned>(opt.snap_bits));
        vals.push_back(std::move(v));
      }
    }
    images[i] = make_point_set(dedupe(std::move(vals)));
  });
  std::vector<HullRelation> rels(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    rels[i] = hull_disjoint(images[slot[pairs[i].first]], images[slot[pairs[i].second]]);
  });
  DualConeCheck out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [u, v] = pairs[i];
    if (!rels[i].disjoint) {
      out.failures.push_back(pairs[i]);
      out.witnesses.push_back(*rels[i].witness);
      continue;
    }
    CertificateEntry e;
    e.u = u;
    e.v = v;
    e.separator = *rels[i].separator;
    e.samples_u = images[slot[u]];
    e.samples_v = images[slot[v]];
    const PointSet& a = e.samples_u;
    const PointSet& b = e.samples_v;
    Rational hi_a = e.separator(a.col(0)), lo_b = e.separator(b.col(0));
    for (Eigen::Index c = 1; c < a.cols(); ++c) hi_a = std::max(hi_a, e.separator(a.col(c)));
    for (Eigen::Index c = 1; c < b.cols(); ++c) lo_b = std::min(lo_b, e.separator(b.col(c)));
    Rational gap_q = lo_b - hi_a;
    e.distance_lower = sqrt_lower(gap_q * gap_q / e.separator.normal.squaredNorm());
    out.entries.push_back(std::move(e));
  }
  return out;
}

int recheck_certificate(const LiftTriangulation& t) {
  int failures = 0;
  for (const auto& e : t.certificate) {
    bool ok = true;
    for (Eigen::Index c = 0; c < e.samples_u.cols() && ok; ++c) ok = e.separator(e.samples_u.col(c)).sign() < 0;
    for (Eigen::Index c = 0; c < e.samples_v.cols() && ok; ++c) ok = e.separator(e.samples_v.col(c)).sign() > 0;
    if (!ok) ++failures;
  }
  return failures;
}

namespace {

struct SheetJob {
  int rho, a, b;  // target simplex, sheet ids
};

// per sheet, its vertices ordered by the position of their image in rho
Simplex ordered_sheet(const SimplicialMap& f, int sheet, const Simplex& rho) {
  Simplex out(rho.size());
  for (int v : f.source->simplex(sheet)) {
    auto pos = std::lower_bound(rho.begin(), rho.end(), f.vertex_map[v]) - rho.begin();
    out[pos] = v;
  }
  return out;
}

// sheet pairs over a common image that differ at every vertex position
std::vector<SheetJob> sheet_jobs(const SimplicialMap& f) {
  std::map<int, std::vector<int>> sheets;
  for (int id = 0; id < f.source->num_simplices(); ++id) sheets[f.image_id(id)].push_back(id);
  std::vector<SheetJob> jobs;
  for (const auto& [rho_id, over] : sheets) {
    const Simplex& rho = f.target->simplex(rho_id);
    for (std::size_t a = 0; a < over.size(); ++a)
      for (std::size_t b = a + 1; b < over.size(); ++b) {
        Simplex sa = ordered_sheet(f, over[a], rho), sb = ordered_sheet(f, over[b], rho);
        bool all_differ = true;
        for (std::size_t j = 0; j < rho.size(); ++j) all_differ = all_differ && sa[j] != sb[j];
        if (all_differ) jobs.push_back({rho_id, over[a], over[b]});
      }
  }
  return jobs;
}

void check_pl_on_source(const SimplicialMap& f, const LiftFunction& h) {
  if (h.kind() != LiftFunction::Kind::pl_table) throw std::invalid_argument("h is not linear on K' (not a pl_table)");
  if (h.carrier() != f.source && !(*h.carrier() == *f.source))
    throw std::invalid_argument("h is not linear on K' (table carried by a different complex)");
  if (!is_nondegenerate(f).nondegenerate) throw std::invalid_argument("verification requires a non-degenerate map");
}

}  // namespace

InjectivityReport verify_embedding_exact(const SimplicialMap& f, const LiftFunction& h) {
  check_pl_on_source(f, h);
  auto jobs = sheet_jobs(f);
  const auto& table = h.table();
  std::vector<std::optional<InjectivityWitness>> found(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& job = jobs[i];
    const Simplex& rho = f.target->simplex(job.rho);
    Simplex sa = ordered_sheet(f, job.a, rho), sb = ordered_sheet(f, job.b, rho);
    std::vector<Point> deltas;
    for (std::size_t j = 0; j < rho.size(); ++j) deltas.push_back(table[sa[j]] - table[sb[j]]);
    auto rel = hull_disjoint(make_point_set({Point::Constant(h.k(), Rational(0))}), make_point_set(deltas));
    if (rel.disjoint) return;
    const auto& beta = rel.witness->weights_b;
    InjectivityWitness w;
    w.x = Point::Constant(f.source->ambient_dim(), Rational(0));
    w.y = w.x;
    w.value = Point::Constant(h.k(), Rational(0));
    for (std::size_t j = 0; j < rho.size(); ++j) {
      if (beta[j].is_zero()) continue;
      w.x += f.source->vertex(sa[j]) * beta[j];
      w.y += f.source->vertex(sb[j]) * beta[j];
      w.value += table[sa[j]] * beta[j];
    }
    w.sheet_x = job.a;
    w.sheet_y = job.b;
    found[i] = std::move(w);
  });
  InjectivityReport rep;
  rep.pairs_checked = static_cast<long>(jobs.size());
  for (auto& w : found)
    if (w) {
      rep.injective = false;
      rep.witness = std::move(w);
      break;
    }
  return rep;
}

InjectivityReport verify_embedding_sampled(const SimplicialMap& f, const LiftFunction& h, int res, double tol) {
  check_pl_on_source(f, h);
  auto jobs = sheet_jobs(f);
  std::vector<Vec<double>> table;
  for (const auto& v : h.table()) table.push_back(to_double<Rational>(v));
  std::vector<std::optional<InjectivityWitness>> found(jobs.size());
  std::vector<long> counts(jobs.size(), 0);
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& job = jobs[i];
    const Simplex& rho = f.target->simplex(job.rho);
    const int dim = static_cast<int>(rho.size()) - 1;
    Simplex sa = ordered_sheet(f, job.a, rho), sb = ordered_sheet(f, job.b, rho);
    auto grid = barycentric_grid(dim, dim == 0 ? 1 : res);
    bool pos = false, neg = false;
    std::optional<std::size_t> hit;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      Vec<double> diff = Vec<double>::Zero(h.k());
      for (int j = 0; j <= dim; ++j) diff += grid[gi][j].to_double() * (table[sa[j]] - table[sb[j]]);
      ++counts[i];
      if (diff.lpNorm<Eigen::Infinity>() <= tol) hit = gi;
      if (h.k() == 1) {
        pos = pos || diff(0) > 0;
        neg = neg || diff(0) < 0;
        if (pos && neg && !hit) hit = gi;
      }
      if (hit) break;
    }
    if (!hit) return;
    InjectivityWitness w;
    const auto& lam = grid[*hit];
    w.x = Point::Constant(f.source->ambient_dim(), Rational(0));
    w.y = w.x;
    w.value = Point::Constant(h.k(), Rational(0));
    for (int j = 0; j <= dim; ++j) {
      w.x += f.source->vertex(sa[j]) * lam[j];
      w.y += f.source->vertex(sb[j]) * lam[j];
      w.value += h.table()[sa[j]] * lam[j];
    }
    w.sheet_x = job.a;
    w.sheet_y = job.b;
    found[i] = std::move(w);
  });
  InjectivityReport rep;
  for (long c : counts) rep.pairs_checked += c;
  for (auto& w : found)
    if (w) {
      rep.injective = false;
      rep.witness = std::move(w);
      break;
    }
  return rep;
}

LiftFunction plify_on(const DerivedPair& d, const LiftFunction& g, int snap_bits) {
  const Complex& kp = *d.source.result;
  std::vector<Point> values(kp.num_vertices());
  parallel_for(values.size(), [&](std::size_t v) { values[v] = g.exact(kp.vertex(static_cast<int>(v)), snap_bits); });
  return LiftFunction::pl_table(d.source.result, std::move(values));
}

LiftFunction plify(const LiftTriangulation& t, const LiftFunction& g) {
  if (g.kind() == LiftFunction::Kind::pl_table && g.carrier() == t.derived.source.result) return g;
  auto star = LiftFunction::pl_table(t.derived.source.result, t.g_values);
  auto rep = verify_embedding_exact(t.derived.map, star);
  if (!rep.injective) throw VerificationFailure("plify: f × g★ is not injective", *rep.witness);
  return star;
}

}  // namespace plk
