#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "plk/triangulate.hpp"

namespace plk {

/// The n-parameter family h_t, t ∈ [0,1]^n, joining g (t = 1…1) to its
/// PL-ification on K' (t = 0…0). Coordinate t_i drives the cone step at
/// dimension i of each flag.
class CubeHomotopy {
 public:
  CubeHomotopy(std::shared_ptr<const LiftTriangulation> base, LiftFunction g);
  /// Same, with the K' vertex values replaced (negative controls).
  CubeHomotopy(std::shared_ptr<const LiftTriangulation> base, LiftFunction g, std::vector<Point> g_values);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const LiftTriangulation& base() const { return *base_; }
  [[nodiscard]] const LiftFunction& g() const { return g_; }
  [[nodiscard]] const std::vector<Point>& g_values() const { return g_values_; }
  /// Flag σ_0 ⊂ … ⊂ σ_k of K simplex ids for a K' simplex.
  [[nodiscard]] const std::vector<int>& flag(int kp_simplex) const { return base_->derived.source.chains[kp_simplex]; }

  /// h_t(x). Throws std::domain_error outside |K'| and std::invalid_argument for t outside the cube.
  [[nodiscard]] Point eval(const std::vector<Rational>& t, const Point& x) const;
  /// h_t at barycentric weights on a K' simplex whose flag is full.
  [[nodiscard]] Point eval_on(int kp_simplex, const std::vector<Rational>& weights, const std::vector<Rational>& t) const;

  struct Trace {
    Point value;
    Point inner;                      ///< x(s̄), where g itself is evaluated
    std::vector<Rational> inner_weights;
  };
  [[nodiscard]] Trace trace_on(int kp_simplex, const std::vector<Rational>& weights, const std::vector<Rational>& t) const;

 private:
  std::shared_ptr<const LiftTriangulation> base_;
  LiftFunction g_;
  std::vector<Point> g_values_;
  LiftFunction locator_;  // g★ table, used for point location only
  int n_ = 0;
};

struct HomotopyViolation {
  enum class Kind { containment, injectivity } kind = Kind::containment;
  int simplex = -1;  ///< K' simplex (containment) or sheet of x (injectivity)
  Point x, y;        ///< y only for injectivity
  Point value;
};

struct HomotopyReport {
  long containment_checked = 0;
  long containment_violations = 0;
  long pairs_checked = 0;
  long injectivity_violations = 0;
  std::optional<HomotopyViolation> first;
  [[nodiscard]] bool ok() const { return containment_violations == 0 && injectivity_violations == 0; }
};

/// Checks h_t(σ) ⊆ conv g(σ) at `samples` random points of K' (the hull holds
/// g at σ's vertices and at x(s̄)), then f × h_t injectivity on up to
/// `samples` double points of K' → L'. Exact.
HomotopyReport homotopy_certificate(const CubeHomotopy& h, const std::vector<Rational>& t, int samples,
                                    std::uint64_t seed);

struct LinearHomotopyReport {
  bool same_sign = true;
  std::optional<std::size_t> mismatch;  ///< first disagreeing pair index
  long mismatches = 0;
  int t_checked = 0;
  long injectivity_failures = 0;        ///< (pair, t) with a vanishing difference
  long pairs = 0;
};

/// Compares the sign maps of g and g' on Δ (k = 1: signs; k > 1: unit vectors
/// within `tol`); when they agree, checks (1−t)g + tg' at `t_count` evenly
/// spaced t on every pair.
LinearHomotopyReport linear_lift_homotopy_check(const LiftFunction& g, const LiftFunction& g2,
                                                const DoublePointSample& delta, int t_count = 11, double tol = 1e-9);

struct StabilityReport {
  double delta = 0;
  int trials = 0;
  int passes = 0;
  std::optional<InjectivityWitness> witness;  ///< from the first failing trial
  double radius = 0;                          ///< largest δ tried with every trial passing
  std::vector<std::pair<double, bool>> probes;  ///< bisection log
};

/// Random φ linear on K' with ‖φ − g★‖_∞ ≤ δ (uniform per vertex coordinate,
/// snapped), each checked by verify_embedding_exact. With bisection_steps > 0
/// also searches for the empirical stability radius.
StabilityReport perturbation_stability(const LiftTriangulation& t, const LiftFunction& g_star, double delta, int trials,
                                       std::uint64_t seed, int bisection_steps = 0);

}  // namespace plk
