#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plk/simplicial.hpp"

namespace plk {

/// An evaluator N → R^k standing in for the lift coordinate g.
///
/// Closed forms evaluate in double and snap to rationals on request; a
/// closed form may provide an exact hook for special inputs (known zeros).
/// PL tables are exact and linear on each simplex of their carrier.
class LiftFunction {
 public:
  enum class Kind { closed_form_named, pl_table, composite };
  using DoubleEval = std::function<Vec<double>(const Vec<double>&)>;
  using ExactHook = std::function<std::optional<Point>(const Point&)>;

  LiftFunction() = default;

  static LiftFunction closed_form(std::string name, std::vector<double> params, int domain_dim, int k,
                                  DoubleEval eval, ExactHook exact = {}, double sampling_mesh = 1e-3);
  static LiftFunction pl_table(ComplexPtr carrier, std::vector<Point> values);
  /// Σ c_i g_i, evaluated pointwise.
  static LiftFunction combination(std::vector<std::pair<double, LiftFunction>> terms);
  /// Builtins: "absval_example" (no params) and "wave" (see lift.cpp).
  /// Throws UnknownBuiltin or std::invalid_argument on bad params.
  static LiftFunction from_registry(const std::string& name, const std::vector<double>& params = {});

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] int domain_dim() const { return domain_dim_; }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const std::vector<double>& params() const { return params_; }
  [[nodiscard]] double sampling_mesh() const { return sampling_mesh_; }
  [[nodiscard]] const ComplexPtr& carrier() const { return carrier_; }
  [[nodiscard]] const std::vector<Point>& table() const { return table_; }
  [[nodiscard]] const std::vector<std::pair<double, LiftFunction>>& terms() const { return terms_; }

  [[nodiscard]] Vec<double> operator()(const Vec<double>& x) const;
  [[nodiscard]] Vec<double> operator()(const Point& x) const;
  /// Rational value: exact for tables and exact hooks, otherwise the double value snapped at `bits`.
  [[nodiscard]] Point exact(const Point& x, int bits = 64) const;
  /// False when `exact` only snaps the double value, so samples may be taken in double.
  [[nodiscard]] bool has_exact_values() const {
    return kind_ == Kind::pl_table || (kind_ == Kind::closed_form_named && static_cast<bool>(exact_));
  }
  /// Table value on a carrier simplex at barycentric weights (pl_table only, exact).
  [[nodiscard]] Point on_simplex(int simplex_id, const std::vector<Rational>& weights) const;
  /// Top carrier simplex containing x, with barycentric weights (pl_table only).
  [[nodiscard]] std::optional<std::pair<int, std::vector<double>>> locate(const Vec<double>& x) const;
  [[nodiscard]] std::optional<std::pair<int, std::vector<Rational>>> locate(const Point& x) const;

 private:
  struct Locator;

  Kind kind_ = Kind::closed_form_named;
  std::string name_;
  std::vector<double> params_;
  int domain_dim_ = 0;
  int k_ = 0;
  double sampling_mesh_ = 1e-3;
  DoubleEval eval_;
  ExactHook exact_;
  ComplexPtr carrier_;
  std::vector<Point> table_;
  std::vector<Vec<double>> table_double_;
  std::shared_ptr<const Locator> locator_;
  std::vector<std::pair<double, LiftFunction>> terms_;
};

/// The oscillating example over f(x)=|x| on [−1,1] → [0,1]:
/// g(x) = x(−1+cos(2π/x)) for x>0, g(x) = −x(1+cos(2π/x)) for x<0, g(0)=0.
struct AbsvalInstance {
  SimplicialMap f;
  LiftFunction g;
};
AbsvalInstance example_absval();
/// g of the example, in double.
double absval_g(double x);
/// Zeros of the example's g in [lo, hi] (0 < lo or hi < 0 required), located by
/// bisection on the sign-changing factor, sorted ascending.
std::vector<double> absval_zeros(double lo, double hi);

struct BarycentricFailure {
  Rational epsilon;
  long k = 0;               ///< the consecutive pair is 2/(k+1), 2/k
  Rational lower, upper;    ///< 2/(k+1), 2/k
  bool pair_inside = false; ///< both inside [ε/2, ε]
  HullRelation hulls;       ///< conv g([ε/2,ε]) vs conv g([−ε,−ε/2]) on samples
  int samples = 0;
};
/// Throws std::invalid_argument unless 0 < ε ≤ 1.
BarycentricFailure barycentric_failure(const Rational& epsilon, int samples = 512);

/// A pair x ≠ y with f(x) = f(y), located on sheets of a common image simplex.
struct DoublePoint {
  Point x, y;
  int sheet_x = -1, sheet_y = -1;  ///< source simplex ids
  int image = -1;                  ///< target simplex id
  std::vector<Rational> weights;   ///< barycentric weights on `image`
};

struct DoublePointSample {
  SimplicialMap map;  ///< the map whose double points these are
  std::vector<DoublePoint> pairs;
  int resolution = 0;
};

/// Every pair of distinct source simplices over a common target simplex ρ,
/// sampled at the interior grid points of ρ with denominator `res`.
/// Throws std::invalid_argument if f is degenerate.
DoublePointSample sample_double_points(const SimplicialMap& f, int res);

struct SignMap {
  std::vector<Vec<double>> values;  ///< unit vectors (g(y)−g(x))/‖·‖ per pair
  /// Sheet pairs joined through common face pairs form clusters (the diagonal separates them).
  std::vector<int> cluster;         ///< cluster id per pair
  std::vector<int> orientation;     ///< ±1: pair orientation relative to its cluster's reference
  std::vector<int> cluster_sign;    ///< k=1: oriented sign if constant on the cluster, 0 if mixed; empty for k>1
  int clusters = 0;
};

/// Throws std::runtime_error "not an embedded lift at pair (x,y)" on a zero difference.
SignMap sign_map(const LiftFunction& g, const DoublePointSample& delta);

/// Barycentric grid of a d-simplex with denominator m: all weight vectors of
/// nonnegative multiples of 1/m summing to 1 (interior only if requested).
std::vector<std::vector<Rational>> barycentric_grid(int d, int m, bool interior_only = false);

}  // namespace plk
