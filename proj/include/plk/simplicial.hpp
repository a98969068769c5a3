#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "plk/geometry.hpp"

namespace plk {

/// Sorted vertex indices.
using Simplex = std::vector<int>;

struct SimplexHash {
  std::size_t operator()(const Simplex& s) const noexcept {
    std::size_t h = s.size();
    for (int v : s) h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// All nonempty faces of `s` (including `s`), each sorted.
std::vector<Simplex> faces_of(const Simplex& s);
/// True if every vertex of `a` is a vertex of `b` (both sorted).
bool is_face(const Simplex& a, const Simplex& b);

/// Finite geometric simplicial complex with exact rational vertices.
///
/// Simplices are stored once, ordered by (dimension, lexicographic), and
/// addressed by their position in that order. The complex is immutable.
class Complex {
 public:
  enum class Closure { close, as_given };

  Complex() = default;
  Complex(std::vector<Point> vertices, const std::vector<Simplex>& simplices, Closure mode = Closure::close);

  [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
  [[nodiscard]] const Point& vertex(int v) const { return vertices_[v]; }
  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] const std::vector<Simplex>& simplices() const { return simplices_; }
  [[nodiscard]] const Simplex& simplex(int id) const { return simplices_[id]; }
  [[nodiscard]] int num_simplices() const { return static_cast<int>(simplices_.size()); }
  [[nodiscard]] int simplex_dim(int id) const { return static_cast<int>(simplices_[id].size()) - 1; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int ambient_dim() const { return vertices_.empty() ? 0 : static_cast<int>(vertices_[0].size()); }

  [[nodiscard]] std::optional<int> find(const Simplex& s) const;
  /// Id of the 0-simplex {v}.
  [[nodiscard]] int vertex_id(int v) const { return *find(Simplex{v}); }
  /// Ids of simplices of dimension ≤ i (the i-skeleton).
  [[nodiscard]] std::vector<int> skeleton(int i) const;
  /// Ids of simplices that are not a proper face of another simplex.
  [[nodiscard]] std::vector<int> maximal() const;
  /// Ids of proper faces of a simplex.
  [[nodiscard]] std::vector<int> proper_faces(int id) const;
  [[nodiscard]] PointSet points_of(int id) const;
  [[nodiscard]] PointSet points_of(const Simplex& s) const;
  [[nodiscard]] Point centroid(int id) const;

  /// Optional provenance: per simplex, the id of the parent simplex carrying it.
  [[nodiscard]] const std::vector<int>& parent_carrier() const { return parent_carrier_; }
  void set_parent_carrier(std::vector<int> carriers) { parent_carrier_ = std::move(carriers); }

  friend bool operator==(const Complex& a, const Complex& b) {
    return a.vertices_ == b.vertices_ && a.simplices_ == b.simplices_ && a.parent_carrier_ == b.parent_carrier_;
  }

 private:
  std::vector<Point> vertices_;
  std::vector<Simplex> simplices_;
  std::unordered_map<Simplex, int, SimplexHash> index_;
  std::vector<int> parent_carrier_;
  int dim_ = -1;
};

using ComplexPtr = std::shared_ptr<const Complex>;

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> violations;
};

ValidationReport validate_complex(const Complex& c);

/// Vertex assignment between complexes.
struct SimplicialMap {
  ComplexPtr source;
  ComplexPtr target;
  std::vector<int> vertex_map;

  /// Sorted, deduplicated image vertex set of a source simplex.
  [[nodiscard]] Simplex image(const Simplex& s) const;
  /// Target simplex id of the image; throws `std::invalid_argument` if not a simplex.
  [[nodiscard]] int image_id(int source_simplex) const;
  /// Throws `std::invalid_argument` unless every simplex maps onto a target simplex.
  void check_simplicial() const;
  /// Affine image of a point given by barycentric weights on a source simplex.
  [[nodiscard]] Point apply(const Simplex& s, const std::vector<Rational>& weights) const;
};

struct NondegeneracyReport {
  bool nondegenerate = true;
  std::optional<Simplex> collapsed;  ///< a simplex on which the map is not injective
};

NondegeneracyReport is_nondegenerate(const SimplicialMap& f);

/// Picks the weighted barycenter of simplex `id` of `complex`.
using BarycenterRule = std::function<Point(const Complex& complex, int id)>;

BarycenterRule centroid_rule();

/// Derived subdivision: result vertex `i` is the barycenter of parent simplex `i`,
/// result simplices are strictly increasing chains of parent simplices.
struct DerivedSubdivision {
  ComplexPtr parent;
  std::vector<Point> barycenters;
  ComplexPtr result;
  /// chains[id] lists the parent simplex ids of result simplex `id` in increasing order.
  std::vector<std::vector<int>> chains;
};

/// Throws `std::invalid_argument` if the rule returns a point not interior to its simplex.
DerivedSubdivision derived_subdivision(ComplexPtr parent, const BarycenterRule& rule = centroid_rule());

struct DerivedPair {
  DerivedSubdivision source;  ///< K'
  DerivedSubdivision target;  ///< L'
  SimplicialMap map;          ///< f : K' → L'
};

/// Derived subdivisions K', L' with f : K' → L' simplicial: L' uses `target_rule`
/// and each source barycenter is the preimage of its image's barycenter.
DerivedPair compatible_derived_pair(const SimplicialMap& f, const BarycenterRule& target_rule = centroid_rule());

struct DualCone {
  int simplex = -1;             ///< parent simplex id (σ)
  int center = -1;              ///< result vertex of σ's barycenter
  std::vector<int> cone;        ///< result simplex ids of σ*
  std::vector<int> link;        ///< result simplex ids of ∂σ*
  std::vector<int> vertices;    ///< result vertex ids of σ*
};

DualCone dual_cone(int parent_simplex, const DerivedSubdivision& d);

/// A complex together with, for each vertex, the id of the simplex of an
/// original complex whose relative interior contains it.
struct CarriedComplex {
  ComplexPtr complex;
  ComplexPtr original;
  std::vector<int> vertex_carrier;

  static CarriedComplex identity(ComplexPtr c);
  /// Original simplex spanned by the carriers of a simplex's vertices.
  [[nodiscard]] int carrier_of(const Simplex& s) const;
  /// Dimension of a vertex's original carrier.
  [[nodiscard]] int level(int v) const { return original->simplex_dim(vertex_carrier[v]); }
};

/// One round of derived subdivision near the full subcomplex spanned by the
/// flagged vertices: every simplex of that subcomplex is starred at its
/// centroid, in order of decreasing dimension. New vertices are flagged.
CarriedComplex refine_near(const CarriedComplex& c, std::vector<bool>& in_region);

/// Repeats `refine_near` until every simplex inside |X| has diameter < mesh.
/// `region` must be a full subcomplex given by simplex ids (possibly empty).
Complex subdivide_relative(ComplexPtr k, const std::vector<int>& region, double mesh);

/// Subdivision K of the source induced by a subdivision L of the target
/// (f must be non-degenerate and simplicial), with f : K → L simplicial.
struct Pullback {
  CarriedComplex source;
  SimplicialMap map;  ///< K → L
};

Pullback pullback(const SimplicialMap& f, const CarriedComplex& target_subdivision);

/// Unsigned volume of a top simplex times d! (exact), for polyhedron accounting.
Rational scaled_volume(const PointSet& simplex);

}  // namespace plk
