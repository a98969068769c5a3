#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plk/geometry.hpp"
#include "plk/polynomial.hpp"

namespace plk {

/// Chebyshev polynomial of the first kind, T_r(cos θ) = cos rθ.
QPoly chebyshev(int r);

/// τ_r = (T_{r+1} − c_0)/c_{r+1}, the model point of M_r. r ≥ 1.
QPoly tau(int r);

/// P ∈ M_r: monic, degree r+1, P(0) = 0, no x^r term.
bool mr_membership(const QPoly& p, int r);
/// Float variant, coefficients compared to `tol`.
bool mr_membership(const RPoly& p, int r, double tol = 1e-10);

/// Builds x^{r+1} + a_{r−1}x^{r−1} + … + a_1x from a = (a_1, …, a_{r−1}).
QPoly mr_polynomial(const std::vector<Rational>& a);

struct CriticalPoints {
  std::vector<double> maxima;  ///< T_r = 1, ascending
  std::vector<double> minima;  ///< T_r = −1, ascending
};
CriticalPoints critical_points(int r);

/// Index bookkeeping for F_r : R^n → R^m.
struct MorinSpec {
  int r = 0, n = 1, m = 1;
  /// Throws std::invalid_argument unless r ≥ 0, 1 ≤ n ≤ m, (m−n+1)r ≤ n.
  void validate() const;
  [[nodiscard]] int q_count() const { return m - n; }
  /// Parameters t_j, j = first_unused()..n−1, not read by P or any Q_i.
  [[nodiscard]] int first_unused() const { return (m - n + 1) * r; }
  [[nodiscard]] int unused_count() const { return std::max(0, n - first_unused()); }
  /// The specialization f_r = F_r with n = m = r.
  static MorinSpec fr(int r) { return {r, std::max(r, 1), std::max(r, 1)}; }
};

/// F_r(t_1, …, t_{n−1}, x), exact.
Point morin_eval(const MorinSpec& spec, const Point& p);
/// Φ_r^±: F_r with ±x appended. For r = 0 the appended coordinate is 0.
Point morin_lift_eval(const MorinSpec& spec, int sign, const Point& p);

/// Polynomial P (of f_r / F_r) and the Q_i at fixed t, in x.
QPoly morin_p(const MorinSpec& spec, const Point& p);
QPoly morin_q(const MorinSpec& spec, int i, const Point& p);

enum class DeltaContext { f_r, F_r, tau_r, T_r, poly };
std::string to_string(DeltaContext c);

struct PolyDoublePoint {
  Point first, second;
  DeltaContext context = DeltaContext::poly;
};

/// Random double points of f_r: (x_1, x_2) and t_2..t_{r−1} drawn from small
/// dyadics, t_1 solved from the divided difference. Exact. r ≥ 2.
std::vector<PolyDoublePoint> delta_sample_fr(int r, int count, std::uint64_t seed);
/// The f_r double point over (x_1, x_2) with t_2..t_{r−1} = rest. Throws if x_1 = x_2.
PolyDoublePoint fr_double_point(int r, const Rational& x1, const Rational& x2, const std::vector<Rational>& rest);
/// Double points (x_1 < x_2, 1-D points) of a fixed polynomial: real root pairs
/// of P − c over `levels` evenly spaced c spanning its critical values.
std::vector<PolyDoublePoint> delta_sample_poly(const RPoly& p, int levels, DeltaContext context = DeltaContext::poly);

/// Coordinates on Δ_{F_r} = Δ_{f_r} × R^{2n−m−r}.
struct ProductCoords {
  PolyDoublePoint base;                   ///< double point of f_r (points in R^r)
  std::vector<std::vector<Rational>> c;   ///< (m−n) rows of c_{i0..i,r−2}
  std::vector<Rational> unused;           ///< t_{first_unused}..t_{n−1}
};
PolyDoublePoint product_forward(const MorinSpec& spec, const ProductCoords& pc);
/// Throws std::invalid_argument when `dp` is not a double point of F_r.
ProductCoords product_inverse(const MorinSpec& spec, const PolyDoublePoint& dp);

struct PathSample {
  double t = 0;
  RPoly poly;
  double x1 = 0, x2 = 0;  ///< carried double point
  std::vector<double> roots;  ///< root trajectories by slot (interpolation stage only)
};
struct PathStage {
  std::string family;
  std::vector<PathSample> samples;
};
struct MrPath {
  int r = 0;
  std::vector<PathStage> stages;
  [[nodiscard]] const PathSample& end() const { return stages.back().samples.back(); }
  /// Largest |P(x_1) − P(x_2)| / (1 + max |P(x_i)|) and largest M_r coefficient defect over all samples.
  [[nodiscard]] double max_drift() const;
  [[nodiscard]] double max_membership_defect() const;
};

/// Path in M_r from P to τ_r carrying the double point x_1 ≠ x_2 of P.
/// `steps` samples per stage (plus the endpoints).
MrPath connect_to_tau(const QPoly& p, const Rational& x1, const Rational& x2, int steps = 16);
/// Float-coefficient entry point (used by the stage tests).
MrPath connect_to_tau(const RPoly& p, double x1, double x2, int steps = 16);

/// Stage 2 in isolation: each conjugate pair a ± ib of p shrinks (b → 0) to a
/// double root. Samples carry no double point (x1 = x2 = 0).
struct CollapseResult {
  std::vector<PathStage> stages;
  std::vector<double> real_roots;  ///< of the final polynomial, with multiplicity
};
CollapseResult collapse_conjugate_pairs(const RPoly& p, int steps = 16);

using RealLift = std::function<double(double)>;

struct LiftSign {
  int epsilon = 0;
  bool degenerate = false;     ///< r = 1: Δ empty, decided by g(1) vs g(−1)
  long pairs = 0;
  long positive = 0, negative = 0;
  std::vector<double> maxima_values, minima_values;
  bool orderings_checked = false;
};

/// Sign of an embedded lift g of T_r relative to Γ_r^±(x) = (T_r(x), ±x).
/// Throws std::domain_error if g is not an embedded lift on the sample.
LiftSign classify_lift_sign(int r, const RealLift& g, int levels = 64);

/// Δ_{T_r} sampled over `levels` values; pairs grouped by (root count, root
/// indices) within runs of levels where the root count is constant. Each
/// group is a connected arc of Δ.
struct ChebyshevDelta {
  std::vector<std::pair<double, double>> pairs;  ///< x_1 < x_2
  std::vector<int> cluster;
  int clusters = 0;
};
ChebyshevDelta chebyshev_delta(int r, int levels);

/// Last coordinate of a lift Ψ of F_r.
using MorinLift = std::function<double(const Vec<double>&)>;

struct IsotopyReport {
  int epsilon = 0;     ///< classified sign of Ψ over λ(R)
  int target = 0;      ///< requested ε
  long pairs = 0;
  int t_checked = 0;
  long violations = 0;
  struct Witness {
    double t;
    Vec<double> first, second;
  };
  std::optional<Witness> witness;
  [[nodiscard]] bool ok() const { return violations == 0; }
};

/// Restricts Ψ over λ(R), classifies it against τ_r, then checks that
/// (1−t)Ψ + tΦ_r^ε stays injective on `samples` random double points of F_r
/// for t on an 11-point grid. r ≥ 1.
IsotopyReport lift_isotopy_check(const MorinSpec& spec, const MorinLift& psi, int epsilon, int samples,
                                 std::uint64_t seed, int t_count = 11);

}  // namespace plk
