#pragma once

#include <optional>
#include <vector>

#include "plk/linalg.hpp"
#include "plk/rational.hpp"

namespace plk {

template <typename Scalar>
using PointT = Vec<Scalar>;
using Point = PointT<Rational>;

/// Nonempty set of points in a common ambient space, stored one point per column.
template <typename Scalar>
using PointSetT = Mat<Scalar>;
using PointSet = PointSetT<Rational>;

Point make_point(std::initializer_list<Rational> coords);
PointSet make_point_set(const std::vector<Point>& points);

/// Affine functional x ↦ normal·x − offset.
struct AffineFunctional {
  Point normal;
  Rational offset;

  [[nodiscard]] Rational operator()(const Point& x) const { return normal.dot(x) - offset; }
};

/// A point lying in both hulls, with the convex weights that reproduce it.
struct HullWitness {
  Point point;
  std::vector<Rational> weights_a;
  std::vector<Rational> weights_b;
};

struct HullRelation {
  bool disjoint = false;
  std::optional<AffineFunctional> separator;  ///< < 0 on A, > 0 on B
  std::optional<HullWitness> witness;
};

/// Exact decision whether conv(A) and conv(B) are disjoint.
///
/// Dimension one reduces to interval overlap. Otherwise the intersection
/// system is solved by an exact phase-one simplex; when it is infeasible the
/// phase-one dual yields the separating functional. Throws
/// `std::invalid_argument` on dimension mismatch or empty input.
HullRelation hull_disjoint(const PointSet& a, const PointSet& b);

/// Squared hull distance, exact, together with a bracketing float interval.
struct HullDistance {
  Rational squared;
  double lower = 0;  ///< certified: lower <= sqrt(squared)
  double upper = 0;  ///< certified: sqrt(squared) <= upper
};

HullDistance hull_distance(const PointSet& a, const PointSet& b);

struct Diameter {
  Rational squared;
  double upper = 0;  ///< float upper bound on the diameter
};

Diameter diameter(const PointSet& a);

/// Floor/ceil of sqrt of a nonnegative rational as doubles.
double sqrt_lower(const Rational& squared);
double sqrt_upper(const Rational& squared);

/// Affine rank of the columns (number of affinely independent points minus one).
Eigen::Index affine_rank(const PointSet& pts);

/// Barycentric coordinates of `x` w.r.t. affinely independent columns of
/// `simplex`; nullopt when `x` is outside the affine hull.
std::optional<std::vector<Rational>> barycentric_coordinates(const PointSet& simplex, const Point& x);

/// Result of the minimum-norm-point iteration on conv(A) − conv(B).
template <typename Scalar>
struct MinNormResult {
  Scalar squared{};
  PointT<Scalar> difference;  ///< closest point of conv(A) − conv(B)
  std::vector<Scalar> weights_a;
  std::vector<Scalar> weights_b;
};

/// Wolfe's minimum-norm-point algorithm on the Minkowski difference
/// conv(A) − conv(B), driven by a linear-minimization oracle so the
/// difference set is never formed. Exact and finite for `Rational`.
template <typename Scalar>
MinNormResult<Scalar> min_norm_point(const PointSetT<Scalar>& a, const PointSetT<Scalar>& b);

extern template MinNormResult<Rational> min_norm_point(const PointSetT<Rational>&, const PointSetT<Rational>&);
extern template MinNormResult<double> min_norm_point(const PointSetT<double>&, const PointSetT<double>&);

/// Euclidean distance from `x` to the simplex spanned by the columns of `simplex` (floating point).
double point_simplex_distance(const Vec<double>& x, const Mat<double>& simplex);

}  // namespace plk
