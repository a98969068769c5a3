#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plk/lift.hpp"

namespace plk {

/// Disjointness proof for one pair u ≠ v of K vertices with f(u) = f(v).
struct CertificateEntry {
  int u = -1, v = -1;            ///< K vertex ids, u < v
  AffineFunctional separator;    ///< < 0 on g-samples of |u*|, > 0 on g-samples of |v*|
  PointSet samples_u, samples_v; ///< snapped g-samples of the dual cones in K'
  double distance_lower = 0;     ///< certified lower bound on the hull distance
};

struct TriangulationAudit {
  std::vector<double> d;      ///< separation estimate per stage
  std::vector<double> r;      ///< largest simplex diameter inside the refined region per stage
  std::vector<double> eps_u;  ///< neighborhood radius used for U_i per stage (i ≥ 1)
  mpz_class weight_base;      ///< W: barycenters weighted by W^level
  int retries = 0;
};

/// Subdivisions K, L and derived K', L' with f simplicial on both, plus the
/// dual-cone disjointness certificate.
struct LiftTriangulation {
  SimplicialMap f;        ///< the input P → Q
  CarriedComplex K, L;    ///< carriers point into P and Q
  SimplicialMap f_KL;     ///< K → L
  DerivedPair derived;    ///< K' → L'
  std::vector<CertificateEntry> certificate;
  std::vector<Point> g_values;  ///< snapped g at K' vertices
  TriangulationAudit audit;
};

struct TriangulateOptions {
  int max_retries = 6;
  int sample_res = 8;            ///< minimum grid density per simplex
  int max_sample_res = 2048;     ///< cap for 1-simplices (squared root of this for 2-simplices)
  int delta_res = 32;            ///< minimum grid density for separation estimates
  int snap_bits = 64;
  double safety = 2;             ///< oscillation must stay below d / (2 · safety)
  int max_rounds = 60;
  std::size_t max_simplices = 4'000'000;
};

struct TriangulationFailure : std::runtime_error {
  int u = -1, v = -1;  ///< tightest failing K vertex pair of the last attempt
  TriangulationFailure(const std::string& msg, int u_, int v_) : std::runtime_error(msg), u(u_), v(v_) {}
};

/// Builds certified subdivisions for an embedded lift f × g. Throws
/// std::invalid_argument for degenerate f and TriangulationFailure when the
/// retry budget is exhausted.
LiftTriangulation triangulate_lift(const SimplicialMap& f, const LiftFunction& g, const TriangulateOptions& opt = {});

/// Assembles K = pullback of L, L' by `rule`, K' compatible, and snapped g at K' vertices (no certificate).
LiftTriangulation assemble_triangulation(const SimplicialMap& f, const CarriedComplex& L, const BarycenterRule& rule,
                                         const LiftFunction& g, int snap_bits = 64);

struct DualConeCheck {
  std::vector<CertificateEntry> entries;           ///< disjoint pairs
  std::vector<std::pair<int, int>> failures;       ///< intersecting pairs (K vertex ids)
  std::vector<HullWitness> witnesses;              ///< one per failure
};

/// Exact hull test of g-samples of |u*| and |v*| for every pair u ≠ v of K vertices with f(u) = f(v).
DualConeCheck certify_dual_cones(const LiftTriangulation& t, const LiftFunction& g, const TriangulateOptions& opt = {});

/// Re-runs every certificate entry's separator against its samples; returns the number of failing entries.
int recheck_certificate(const LiftTriangulation& t);

/// Grid samples of the dual cone of K vertex `u` in K' (rational points).
std::vector<Point> dual_cone_samples(const LiftTriangulation& t, int u, double mesh, int min_res, int max_res);

struct InjectivityWitness {
  Point x, y;
  int sheet_x = -1, sheet_y = -1;  ///< K' simplex ids
  Point value;                     ///< common h value
};

struct InjectivityReport {
  bool injective = true;
  std::optional<InjectivityWitness> witness;  ///< smallest by (image simplex, sheet pair)
  long pairs_checked = 0;
};

/// Exact decision whether f × h is injective, for f simplicial and h a
/// pl_table on f's source. Throws std::invalid_argument otherwise.
InjectivityReport verify_embedding_exact(const SimplicialMap& f, const LiftFunction& h);

/// The same question answered by dense sampling in double (oracle for tests and audits):
/// every sheet pair over every top target simplex is compared on a grid of `res`.
InjectivityReport verify_embedding_sampled(const SimplicialMap& f, const LiftFunction& h, int res, double tol = 1e-12);

struct VerificationFailure : std::runtime_error {
  InjectivityWitness witness;
  VerificationFailure(const std::string& msg, InjectivityWitness w) : std::runtime_error(msg), witness(std::move(w)) {}
};

/// PL-ification g★: the snapped values of g at K' vertices, linear on K'
/// simplices. Throws VerificationFailure if f × g★ is not injective.
LiftFunction plify(const LiftTriangulation& t, const LiftFunction& g);

/// g★ on an arbitrary compatible derived pair (no certificate); used to
/// exhibit failures of plain barycentric subdivisions. Not verified.
LiftFunction plify_on(const DerivedPair& d, const LiftFunction& g, int snap_bits = 64);

}  // namespace plk
