#include <optional>
#include "plk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plk {

Point make_point(std::initializer_list<Rational> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (const auto& c : coords) p(i++) = c;
  return p;
}

PointSet make_point_set(const std::vector<Point>& points) {
  if (points.empty()) throw std::invalid_argument("point set must be nonempty");
  PointSet m(points.front().size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].size() != m.rows()) throw std::invalid_argument("point set dimension mismatch");
    m.col(static_cast<Eigen::Index>(j)) = points[j];
  }
  return m;
}

namespace {

void check_pair(const PointSet& a, const PointSet& b) {
  if (a.cols() == 0 || b.cols() == 0) throw std::invalid_argument("point set must be nonempty");
  if (a.rows() != b.rows()) throw std::invalid_argument("ambient dimension mismatch");
  if (a.rows() < 1) throw std::invalid_argument("ambient dimension must be at least one");
}

struct PhaseOne {
  bool feasible = false;
  std::vector<Rational> x;  // structural solution when feasible
  std::vector<Rational> dual;  // Farkas multipliers when infeasible
};

// Phase-one simplex for {M x = rhs, x >= 0} with rhs >= 0, Bland's rule, exact.
PhaseOne phase_one(const Mat<Rational>& m, const Vec<Rational>& rhs) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index n = m.cols();
  const Eigen::Index total = n + rows;
  Mat<Rational> t(rows, total + 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) t(i, j) = m(i, j);
    for (Eigen::Index j = 0; j < rows; ++j) t(i, n + j) = Rational(i == j ? 1 : 0);
    t(i, total) = rhs(i);
  }
  std::vector<Eigen::Index> basis(rows);
  for (Eigen::Index i = 0; i < rows; ++i) basis[i] = n + i;
  // reduced costs: artificials cost 1
  std::vector<Rational> reduced(total + 1, Rational(0));
  for (Eigen::Index j = 0; j <= total; ++j) {
    if (j >= n && j < total) continue;
    Rational s(0);
    for (Eigen::Index i = 0; i < rows; ++i) s += t(i, j);
    reduced[j] = -s;  // for j == total this is -objective
  }
  for (;;) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < total; ++j)
      if (reduced[j].sign() < 0) { enter = j; break; }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    Rational best;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (t(i, enter).sign() <= 0) continue;
      Rational ratio = t(i, total) / t(i, enter);
      if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) throw std::logic_error("phase-one simplex unbounded");
    Rational inv = Rational(1) / t(leave, enter);
    for (Eigen::Index j = 0; j <= total; ++j) t(leave, j) *= inv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == leave || t(i, enter).is_zero()) continue;
      Rational f = t(i, enter);
      for (Eigen::Index j = 0; j <= total; ++j)
        if (!t(leave, j).is_zero()) t(i, j) -= f * t(leave, j);
    }
    if (!reduced[enter].is_zero()) {
      Rational f = reduced[enter];
      for (Eigen::Index j = 0; j <= total; ++j)
        if (!t(leave, j).is_zero()) reduced[j] -= f * t(leave, j);
    }
    basis[leave] = enter;
  }
  PhaseOne out;
  Rational objective = -reduced[total];
  if (objective.is_zero()) {
    out.feasible = true;
    out.x.assign(n, Rational(0));
    for (Eigen::Index i = 0; i < rows; ++i)
      if (basis[i] < n) out.x[basis[i]] = t(i, total);
  } else {
    out.dual.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) out.dual[i] = Rational(1) - reduced[n + i];
  }
  return out;
}

HullRelation interval_relation(const PointSet& a, const PointSet& b) {
  auto extent = [](const PointSet& s) {
    Eigen::Index lo = 0, hi = 0;
    for (Eigen::Index j = 1; j < s.cols(); ++j) {
      if (s(0, j) < s(0, lo)) lo = j;
      if (s(0, j) > s(0, hi)) hi = j;
    }
    return std::pair{lo, hi};
  };
  auto [alo, ahi] = extent(a);
  auto [blo, bhi] = extent(b);
  HullRelation rel;
  if (a(0, ahi) < b(0, blo) || b(0, bhi) < a(0, alo)) {
    rel.disjoint = true;
    AffineFunctional f{Point(1), Rational(0)};
    if (a(0, ahi) < b(0, blo)) {
      f.normal(0) = Rational(1);
      f.offset = (a(0, ahi) + b(0, blo)) / Rational(2);
    } else {
      f.normal(0) = Rational(-1);
      f.offset = -(b(0, bhi) + a(0, alo)) / Rational(2);
    }
    rel.separator = f;
    return rel;
  }
  Rational p = std::max(a(0, alo), b(0, blo));
  auto weights = [&p](const PointSet& s, Eigen::Index lo, Eigen::Index hi) {
    std::vector<Rational> w(s.cols(), Rational(0));
    if (s(0, lo) == s(0, hi)) {
      w[lo] = Rational(1);
    } else {
      Rational u = (p - s(0, lo)) / (s(0, hi) - s(0, lo));
      w[hi] += u;
      w[lo] += Rational(1) - u;
    }
    return w;
  };
  HullWitness wit{Point(1), weights(a, alo, ahi), weights(b, blo, bhi)};
  wit.point(0) = p;
  rel.witness = wit;
  return rel;
}

HullRelation lp_relation(const PointSet& a, const PointSet& b) {
  const Eigen::Index k = a.rows();
  const Eigen::Index na = a.cols(), nb = b.cols();
  Mat<Rational> m(k + 2, na + nb);
  Vec<Rational> rhs(k + 2);
  for (Eigen::Index i = 0; i < k + 2; ++i) {
    rhs(i) = Rational(i >= k ? 1 : 0);
    for (Eigen::Index j = 0; j < na + nb; ++j) m(i, j) = Rational(0);
  }
  for (Eigen::Index j = 0; j < na; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) m(i, j) = a(i, j);
    m(k, j) = Rational(1);
  }
  for (Eigen::Index j = 0; j < nb; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) m(i, na + j) = -b(i, j);
    m(k + 1, na + j) = Rational(1);
  }
  PhaseOne sol = phase_one(m, rhs);
  HullRelation rel;
  if (sol.feasible) {
    HullWitness wit;
    wit.weights_a.assign(sol.x.begin(), sol.x.begin() + na);
    wit.weights_b.assign(sol.x.begin() + na, sol.x.end());
    wit.point = Point::Constant(k, Rational(0));
    for (Eigen::Index j = 0; j < na; ++j)
      if (!wit.weights_a[j].is_zero()) wit.point += a.col(j) * wit.weights_a[j];
    rel.witness = std::move(wit);
    return rel;
  }
  // y = (w, alpha, beta): w·a <= -alpha, w·b >= beta, alpha + beta > 0
  AffineFunctional f{Point(k), Rational(0)};
  for (Eigen::Index i = 0; i < k; ++i) f.normal(i) = sol.dual[i];
  const Rational& alpha = sol.dual[k];
  const Rational& beta = sol.dual[k + 1];
  f.offset = (beta - alpha) / Rational(2);
  for (Eigen::Index j = 0; j < na; ++j)
    if (f(a.col(j)).sign() >= 0) throw std::logic_error("separator check failed on A");
  for (Eigen::Index j = 0; j < nb; ++j)
    if (f(b.col(j)).sign() <= 0) throw std::logic_error("separator check failed on B");
  rel.disjoint = true;
  rel.separator = std::move(f);
  return rel;
}

Mat<double> as_double(const PointSet& p) {
  Mat<double> out(p.rows(), p.cols());
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    for (Eigen::Index i = 0; i < p.rows(); ++i) out(i, j) = p(i, j).to_double();
  return out;
}

// Most disjoint pairs are separated by the bisector of the floating closest
// points; checking that exactly is far cheaper than the LP.
std::optional<AffineFunctional> quick_separator(const PointSet& a, const PointSet& b) {
  const auto res = min_norm_point<double>(as_double(a), as_double(b));
  if (!(res.squared > 1e-24)) return std::nullopt;
  const Eigen::Index k = a.rows();
  AffineFunctional f{Point(k), Rational(0)};
  for (Eigen::Index i = 0; i < k; ++i) f.normal(i) = Rational::snap(-res.difference(i), 40);
  if (f.normal.isZero()) return std::nullopt;
  Rational hi_a = f.normal.dot(a.col(0)), lo_b = f.normal.dot(b.col(0));
  for (Eigen::Index j = 1; j < a.cols(); ++j) hi_a = std::max(hi_a, Rational(f.normal.dot(a.col(j))));
  for (Eigen::Index j = 1; j < b.cols(); ++j) lo_b = std::min(lo_b, Rational(f.normal.dot(b.col(j))));
  if (!(hi_a < lo_b)) return std::nullopt;
  f.offset = (hi_a + lo_b) / Rational(2);
  return f;
}

// Exact planar hull vertices (monotone chain), as column indices.
std::vector<Eigen::Index> hull_vertices_2d(const PointSet& p) {
  std::vector<Eigen::Index> idx(p.cols());
  for (Eigen::Index j = 0; j < p.cols(); ++j) idx[j] = j;
  auto less = [&p](Eigen::Index u, Eigen::Index v) {
    return p(0, u) < p(0, v) || (p(0, u) == p(0, v) && p(1, u) < p(1, v));
  };
  std::sort(idx.begin(), idx.end(), less);
  idx.erase(std::unique(idx.begin(), idx.end(),
                        [&p](Eigen::Index u, Eigen::Index v) { return p(0, u) == p(0, v) && p(1, u) == p(1, v); }),
            idx.end());
  if (idx.size() < 3) return idx;
  auto cross = [&p](Eigen::Index o, Eigen::Index u, Eigen::Index v) {
    return (p(0, u) - p(0, o)) * (p(1, v) - p(1, o)) - (p(1, u) - p(1, o)) * (p(0, v) - p(0, o));
  };
  std::vector<Eigen::Index> h(2 * idx.size());
  std::size_t n = 0;
  for (Eigen::Index i : idx) {
    while (n >= 2 && cross(h[n - 2], h[n - 1], i).sign() <= 0) --n;
    h[n++] = i;
  }
  const std::size_t lower = n + 1;
  for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
    while (n >= lower && cross(h[n - 2], h[n - 1], *it).sign() <= 0) --n;
    h[n++] = *it;
  }
  h.resize(n - 1);
  return h;
}

PointSet columns(const PointSet& p, const std::vector<Eigen::Index>& idx) {
  PointSet out(p.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = p.col(idx[j]);
  return out;
}

std::vector<Rational> spread(const std::vector<Rational>& w, const std::vector<Eigen::Index>& idx, Eigen::Index n) {
  std::vector<Rational> out(n, Rational(0));
  for (std::size_t j = 0; j < idx.size(); ++j) out[idx[j]] = w[j];
  return out;
}

}  // namespace

HullRelation hull_disjoint(const PointSet& a, const PointSet& b) {
  check_pair(a, b);
  if (a.rows() == 1) return interval_relation(a, b);
  if (a.cols() + b.cols() > 8) {
    if (auto f = quick_separator(a, b)) {
      HullRelation rel;
      rel.disjoint = true;
      rel.separator = std::move(*f);
      return rel;
    }
    if (a.rows() == 2) {
      const auto ia = hull_vertices_2d(a), ib = hull_vertices_2d(b);
      HullRelation rel = lp_relation(columns(a, ia), columns(b, ib));
      if (rel.witness) {
        rel.witness->weights_a = spread(rel.witness->weights_a, ia, a.cols());
        rel.witness->weights_b = spread(rel.witness->weights_b, ib, b.cols());
      }
      return rel;
    }
  }
  return lp_relation(a, b);
}

double sqrt_lower(const Rational& squared) {
  if (squared.sign() <= 0) return 0.0;
  double d = std::sqrt(squared.to_double());
  while (d > 0 && Rational::from_double(d) * Rational::from_double(d) > squared)
    d = std::nextafter(d, 0.0);
  return d;
}

double sqrt_upper(const Rational& squared) {
  if (squared.sign() <= 0) return 0.0;
  double d = std::sqrt(squared.to_double());
  while (Rational::from_double(d) * Rational::from_double(d) < squared)
    d = std::nextafter(d, std::numeric_limits<double>::infinity());
  return d;
}

HullDistance hull_distance(const PointSet& a, const PointSet& b) {
  check_pair(a, b);
  HullDistance out;
  if (a.rows() == 1) {
    Rational amin = a.row(0).minCoeff(), amax = a.row(0).maxCoeff();
    Rational bmin = b.row(0).minCoeff(), bmax = b.row(0).maxCoeff();
    Rational gap(0);
    if (amax < bmin) gap = bmin - amax;
    else if (bmax < amin) gap = amin - bmax;
    out.squared = gap * gap;
    out.lower = out.upper = 0;
    if (!gap.is_zero()) {
      out.lower = sqrt_lower(out.squared);
      out.upper = sqrt_upper(out.squared);
    }
    return out;
  }
  auto res = min_norm_point<Rational>(a, b);
  out.squared = res.squared;
  out.lower = sqrt_lower(out.squared);
  out.upper = sqrt_upper(out.squared);
  return out;
}

Diameter diameter(const PointSet& a) {
  if (a.cols() == 0) throw std::invalid_argument("point set must be nonempty");
  Diameter d{Rational(0), 0.0};
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      Rational s = (a.col(i) - a.col(j)).squaredNorm();
      if (s > d.squared) d.squared = s;
    }
  d.upper = sqrt_upper(d.squared);
  return d;
}

Eigen::Index affine_rank(const PointSet& pts) {
  if (pts.cols() <= 1) return 0;
  Mat<Rational> diff(pts.rows(), pts.cols() - 1);
  for (Eigen::Index j = 1; j < pts.cols(); ++j) diff.col(j - 1) = pts.col(j) - pts.col(0);
  return rank<Rational>(diff);
}

std::optional<std::vector<Rational>> barycentric_coordinates(const PointSet& simplex, const Point& x) {
  const Eigen::Index n = simplex.cols();
  if (x.size() != simplex.rows()) throw std::invalid_argument("ambient dimension mismatch");
  Mat<Rational> m(simplex.rows() + 1, n);
  Vec<Rational> rhs(simplex.rows() + 1);
  m.topRows(simplex.rows()) = simplex;
  for (Eigen::Index j = 0; j < n; ++j) m(simplex.rows(), j) = Rational(1);
  rhs.head(simplex.rows()) = x;
  rhs(simplex.rows()) = Rational(1);
  // least-squares-free exact solve: reduce the augmented system
  Mat<Rational> aug(m.rows(), n + 1);
  aug.leftCols(n) = m;
  aug.col(n) = rhs;
  auto pivots = detail::row_reduce(aug, n);
  if (static_cast<Eigen::Index>(pivots.size()) < n) return std::nullopt;
  for (Eigen::Index r = n; r < aug.rows(); ++r)
    if (!aug(r, n).is_zero()) return std::nullopt;
  std::vector<Rational> w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[pivots[i]] = aug(i, n);
  return w;
}

namespace {

template <typename Scalar>
bool nonpositive(const Scalar& v) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return v.sign() <= 0;
  } else {
    return v <= 1e-15;
  }
}

}  // namespace

template <typename Scalar>
MinNormResult<Scalar> min_norm_point(const PointSetT<Scalar>& a, const PointSetT<Scalar>& b) {
  if (a.cols() == 0 || b.cols() == 0 || a.rows() != b.rows())
    throw std::invalid_argument("min_norm_point: bad point sets");
  using Pair = std::pair<Eigen::Index, Eigen::Index>;
  auto diff = [&](const Pair& p) -> PointT<Scalar> { return a.col(p.first) - b.col(p.second); };
  auto oracle = [&](const PointT<Scalar>& x) {
    Eigen::Index ia = 0, ib = 0;
    Scalar best_a = x.dot(a.col(0)), best_b = x.dot(b.col(0));
    for (Eigen::Index j = 1; j < a.cols(); ++j) {
      Scalar v = x.dot(a.col(j));
      if (v < best_a) { best_a = v; ia = j; }
    }
    for (Eigen::Index j = 1; j < b.cols(); ++j) {
      Scalar v = x.dot(b.col(j));
      if (v > best_b) { best_b = v; ib = j; }
    }
    return Pair{ia, ib};
  };

  std::vector<Pair> corral{oracle(PointT<Scalar>::Zero(a.rows()))};
  std::vector<Scalar> lambda{Scalar(1)};
  PointT<Scalar> x = diff(corral[0]);
  const int max_iter = 10000;
  for (int iter = 0; iter < max_iter; ++iter) {
    Pair p = oracle(x);
    Scalar xx = x.dot(x);
    Scalar gap = xx - x.dot(diff(p));
    if constexpr (std::is_same_v<Scalar, Rational>) {
      if (gap.sign() <= 0) break;
    } else {
      if (gap <= 1e-14 * (1.0 + xx)) break;
    }
    if (std::find(corral.begin(), corral.end(), p) != corral.end()) break;
    corral.push_back(p);
    lambda.push_back(Scalar(0));
    for (;;) {
      const Eigen::Index s = static_cast<Eigen::Index>(corral.size());
      Mat<Scalar> sys(s + 1, s + 1);
      Vec<Scalar> rhs = Vec<Scalar>::Zero(s + 1);
      for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) sys(i, j) = diff(corral[i]).dot(diff(corral[j]));
        sys(i, s) = Scalar(1);
        sys(s, i) = Scalar(1);
      }
      sys(s, s) = Scalar(0);
      rhs(s) = Scalar(1);
      auto alpha = solve<Scalar>(sys, rhs);
      if (!alpha) {
        // affinely dependent corral (floating point only); drop the newest point
        corral.pop_back();
        lambda.pop_back();
        iter = max_iter;
        break;
      }
      bool interior = true;
      for (Eigen::Index i = 0; i < s; ++i)
        if (nonpositive((*alpha)(i))) { interior = false; break; }
      if (interior) {
        for (Eigen::Index i = 0; i < s; ++i) lambda[i] = (*alpha)(i);
        break;
      }
      Scalar theta(1);
      Eigen::Index arg = -1;
      for (Eigen::Index i = 0; i < s; ++i) {
        if (!nonpositive((*alpha)(i))) continue;
        Scalar denom = lambda[i] - (*alpha)(i);
        if (nonpositive(denom)) { theta = Scalar(0); arg = i; break; }
        Scalar th = lambda[i] / denom;
        if (arg < 0 || th < theta) { theta = th; arg = i; }
      }
      for (Eigen::Index i = 0; i < s; ++i) lambda[i] = theta * (*alpha)(i) + (Scalar(1) - theta) * lambda[i];
      lambda[arg] = Scalar(0);
      std::vector<Pair> kept;
      std::vector<Scalar> kept_l;
      for (Eigen::Index i = 0; i < s; ++i) {
        if (nonpositive(lambda[i])) continue;
        kept.push_back(corral[i]);
        kept_l.push_back(lambda[i]);
      }
      corral = std::move(kept);
      lambda = std::move(kept_l);
      if (corral.size() == 1) {
        lambda[0] = Scalar(1);
        break;
      }
    }
    x = PointT<Scalar>::Zero(a.rows());
    for (std::size_t i = 0; i < corral.size(); ++i) x += diff(corral[i]) * lambda[i];
  }
  MinNormResult<Scalar> out;
  out.difference = x;
  out.squared = x.dot(x);
  out.weights_a.assign(a.cols(), Scalar(0));
  out.weights_b.assign(b.cols(), Scalar(0));
  for (std::size_t i = 0; i < corral.size(); ++i) {
    out.weights_a[corral[i].first] += lambda[i];
    out.weights_b[corral[i].second] += lambda[i];
  }
  return out;
}

template MinNormResult<Rational> min_norm_point(const PointSetT<Rational>&, const PointSetT<Rational>&);
template MinNormResult<double> min_norm_point(const PointSetT<double>&, const PointSetT<double>&);

double point_simplex_distance(const Vec<double>& x, const Mat<double>& simplex) {
  if (simplex.cols() == 1) return (x - simplex.col(0)).norm();
  if (simplex.cols() == 2) {
    Vec<double> e = simplex.col(1) - simplex.col(0);
    const double len2 = e.squaredNorm();
    const double t = len2 > 0 ? std::clamp(e.dot(x - simplex.col(0)) / len2, 0.0, 1.0) : 0.0;
    return (x - simplex.col(0) - t * e).norm();
  }
  Mat<double> single(x.size(), 1);
  single.col(0) = x;
  return std::sqrt(std::max(0.0, min_norm_point<double>(single, simplex).squared));
}

}  // namespace plk
