#include "plk/simplicial.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace plk {

std::vector<Simplex> faces_of(const Simplex& s) {
  std::vector<Simplex> out;
  const std::size_t n = s.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    Simplex f;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) f.push_back(s[i]);
    out.push_back(std::move(f));
  }
  return out;
}

bool is_face(const Simplex& a, const Simplex& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

namespace {
bool simplex_order(const Simplex& a, const Simplex& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}
}  // namespace

Complex::Complex(std::vector<Point> vertices, const std::vector<Simplex>& simplices, Closure mode)
    : vertices_(std::move(vertices)) {
  std::set<Simplex, decltype(&simplex_order)> all(&simplex_order);
  for (Simplex s : simplices) {
    std::sort(s.begin(), s.end());
    if (s.empty()) continue;
    if (mode == Closure::close) {
      for (auto& f : faces_of(s)) all.insert(std::move(f));
    } else {
      all.insert(std::move(s));
    }
  }
  simplices_.assign(all.begin(), all.end());
  for (int i = 0; i < num_simplices(); ++i) {
    index_.emplace(simplices_[i], i);
    dim_ = std::max(dim_, simplex_dim(i));
  }
}

std::optional<int> Complex::find(const Simplex& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Complex::skeleton(int i) const {
  std::vector<int> out;
  for (int id = 0; id < num_simplices(); ++id)
    if (simplex_dim(id) <= i) out.push_back(id);
  return out;
}

std::vector<int> Complex::maximal() const {
  std::vector<bool> is_proper_face(simplices_.size(), false);
  for (const auto& s : simplices_) {
    if (s.size() < 2) continue;
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      Simplex f;
      for (std::size_t j = 0; j < s.size(); ++j)
        if (j != drop) f.push_back(s[j]);
      if (auto id = find(f)) is_proper_face[*id] = true;
    }
  }
  std::vector<int> out;
  for (int id = 0; id < num_simplices(); ++id)
    if (!is_proper_face[id]) out.push_back(id);
  return out;
}

std::vector<int> Complex::proper_faces(int id) const {
  std::vector<int> out;
  for (const auto& f : faces_of(simplices_[id])) {
    if (f.size() == simplices_[id].size()) continue;
    if (auto fid = find(f)) out.push_back(*fid);
  }
  return out;
}

PointSet Complex::points_of(const Simplex& s) const {
  PointSet m(ambient_dim(), static_cast<Eigen::Index>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = vertices_[s[j]];
  return m;
}

PointSet Complex::points_of(int id) const { return points_of(simplices_[id]); }

Point Complex::centroid(int id) const {
  const auto& s = simplices_[id];
  Point c = Point::Constant(ambient_dim(), Rational(0));
  for (int v : s) c += vertices_[v];
  return c / Rational(static_cast<long>(s.size()));
}

ValidationReport validate_complex(const Complex& c) {
  ValidationReport rep;
  auto fail = [&rep](std::string msg) {
    rep.valid = false;
    rep.violations.push_back(std::move(msg));
  };
  const int amb = c.ambient_dim();
  for (int v = 0; v < c.num_vertices(); ++v)
    if (c.vertex(v).size() != amb) fail("vertex " + std::to_string(v) + ": ambient dimension mismatch");
  for (int id = 0; id < c.num_simplices(); ++id) {
    const auto& s = c.simplex(id);
    std::string name = "simplex " + std::to_string(id);
    bool indices_ok = true;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] < 0 || s[j] >= c.num_vertices()) indices_ok = false;
      if (j > 0 && s[j] == s[j - 1]) indices_ok = false;
    }
    if (!indices_ok) {
      fail(name + ": invalid vertex indices");
      continue;
    }
    for (const auto& f : faces_of(s))
      if (!c.find(f)) {
        fail(name + ": not face-closed (missing face)");
        break;
      }
    if (static_cast<int>(s.size()) - 1 > amb || affine_rank(c.points_of(id)) != static_cast<Eigen::Index>(s.size()) - 1)
      fail(name + ": affinely dependent vertices");
  }
  return rep;
}

Simplex SimplicialMap::image(const Simplex& s) const {
  Simplex img;
  for (int v : s) img.push_back(vertex_map.at(v));
  std::sort(img.begin(), img.end());
  img.erase(std::unique(img.begin(), img.end()), img.end());
  return img;
}

int SimplicialMap::image_id(int source_simplex) const {
  auto id = target->find(image(source->simplex(source_simplex)));
  if (!id) throw std::invalid_argument("map is not simplicial: image of a simplex is not a simplex");
  return *id;
}

void SimplicialMap::check_simplicial() const {
  if (static_cast<int>(vertex_map.size()) != source->num_vertices())
    throw std::invalid_argument("vertex map size does not match source vertex count");
  for (int v : vertex_map)
    if (v < 0 || v >= target->num_vertices()) throw std::invalid_argument("vertex map index out of range");
  for (int id = 0; id < source->num_simplices(); ++id) (void)image_id(id);
}

Point SimplicialMap::apply(const Simplex& s, const std::vector<Rational>& weights) const {
  Point out = Point::Constant(target->ambient_dim(), Rational(0));
  for (std::size_t j = 0; j < s.size(); ++j)
    if (!weights[j].is_zero()) out += target->vertex(vertex_map[s[j]]) * weights[j];
  return out;
}

NondegeneracyReport is_nondegenerate(const SimplicialMap& f) {
  f.check_simplicial();
  NondegeneracyReport rep;
  for (const auto& s : f.source->simplices()) {
    if (f.image(s).size() != s.size()) {
      rep.nondegenerate = false;
      rep.collapsed = s;
      return rep;
    }
  }
  return rep;
}

BarycenterRule centroid_rule() {
  return [](const Complex& c, int id) { return c.centroid(id); };
}

namespace {

bool strictly_interior(const PointSet& simplex, const Point& p) {
  auto w = barycentric_coordinates(simplex, p);
  if (!w) return false;
  return std::all_of(w->begin(), w->end(), [](const Rational& x) { return x.sign() > 0; });
}

}  // namespace

DerivedSubdivision derived_subdivision(ComplexPtr parent, const BarycenterRule& rule) {
  DerivedSubdivision d;
  d.parent = parent;
  const int n = parent->num_simplices();
  d.barycenters.resize(n);
  for (int id = 0; id < n; ++id) {
    if (parent->simplex_dim(id) == 0) {
      d.barycenters[id] = parent->vertex(parent->simplex(id)[0]);
      continue;
    }
    Point p = rule(*parent, id);
    if (!strictly_interior(parent->points_of(id), p))
      throw std::invalid_argument("barycenter rule returned a point outside the open simplex " + std::to_string(id));
    d.barycenters[id] = std::move(p);
  }
  // chains ending at each simplex, built bottom-up (ids are ordered by dimension)
  std::vector<std::vector<std::vector<int>>> ending(n);
  std::vector<Simplex> tops;
  for (int id = 0; id < n; ++id) {
    ending[id].push_back({id});
    for (int f : parent->proper_faces(id))
      for (const auto& ch : ending[f]) {
        auto ext = ch;
        ext.push_back(id);
        ending[id].push_back(std::move(ext));
      }
  }
  for (int id : parent->maximal())
    for (const auto& ch : ending[id])
      if (static_cast<int>(ch.size()) == parent->simplex_dim(id) + 1) tops.push_back(ch);
  auto result = std::make_shared<Complex>(d.barycenters, tops);
  std::vector<int> carriers(result->num_simplices());
  d.chains.resize(result->num_simplices());
  for (int id = 0; id < result->num_simplices(); ++id) {
    d.chains[id] = result->simplex(id);  // sorted ids == chain order (faces precede cofaces)
    carriers[id] = d.chains[id].back();
  }
  result->set_parent_carrier(std::move(carriers));
  d.result = std::move(result);
  return d;
}

DerivedPair compatible_derived_pair(const SimplicialMap& f, const BarycenterRule& target_rule) {
  auto nd = is_nondegenerate(f);
  if (!nd.nondegenerate) throw std::invalid_argument("compatible_derived_pair requires a non-degenerate map");
  DerivedPair out;
  out.target = derived_subdivision(f.target, target_rule);
  const auto& lbar = out.target.barycenters;
  BarycenterRule source_rule = [&f, &lbar](const Complex& k, int id) {
    const Simplex& s = k.simplex(id);
    int img = f.image_id(id);
    const Simplex& t = f.target->simplex(img);
    auto w = barycentric_coordinates(f.target->points_of(img), lbar[img]);
    Point p = Point::Constant(k.ambient_dim(), Rational(0));
    for (int v : s) {
      auto pos = std::lower_bound(t.begin(), t.end(), f.vertex_map[v]) - t.begin();
      p += k.vertex(v) * (*w)[pos];
    }
    return p;
  };
  out.source = derived_subdivision(f.source, source_rule);
  out.map.source = out.source.result;
  out.map.target = out.target.result;
  out.map.vertex_map.resize(f.source->num_simplices());
  for (int id = 0; id < f.source->num_simplices(); ++id) out.map.vertex_map[id] = f.image_id(id);
  return out;
}

DualCone dual_cone(int parent_simplex, const DerivedSubdivision& d) {
  if (parent_simplex < 0 || parent_simplex >= d.parent->num_simplices())
    throw std::invalid_argument("simplex not in parent complex");
  const Simplex& sigma = d.parent->simplex(parent_simplex);
  DualCone dc;
  dc.simplex = parent_simplex;
  dc.center = parent_simplex;
  std::set<int> verts;
  for (int id = 0; id < d.result->num_simplices(); ++id) {
    const Simplex& first = d.parent->simplex(d.chains[id].front());
    if (!is_face(sigma, first)) continue;
    dc.cone.push_back(id);
    if (first.size() > sigma.size()) dc.link.push_back(id);
    for (int v : d.result->simplex(id)) verts.insert(v);
  }
  dc.vertices.assign(verts.begin(), verts.end());
  return dc;
}

CarriedComplex CarriedComplex::identity(ComplexPtr c) {
  CarriedComplex cc{c, c, {}};
  cc.vertex_carrier.resize(c->num_vertices());
  for (int v = 0; v < c->num_vertices(); ++v) cc.vertex_carrier[v] = c->vertex_id(v);
  return cc;
}

int CarriedComplex::carrier_of(const Simplex& s) const {
  Simplex u;
  for (int v : s) {
    const auto& c = original->simplex(vertex_carrier[v]);
    u.insert(u.end(), c.begin(), c.end());
  }
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  auto id = original->find(u);
  if (!id) throw std::logic_error("carrier lookup failed: vertices do not lie in a common original simplex");
  return *id;
}

CarriedComplex refine_near(const CarriedComplex& c, std::vector<bool>& in_region) {
  const Complex& k = *c.complex;
  std::vector<Point> verts = k.vertices();
  std::vector<int> carriers = c.vertex_carrier;
  std::unordered_map<int, int> star_vertex;  // simplex id of k → new vertex
  auto hat = [&](const Simplex& a) -> int {
    if (a.size() == 1) return a[0];
    int id = *k.find(a);
    auto it = star_vertex.find(id);
    if (it != star_vertex.end()) return it->second;
    int nv = static_cast<int>(verts.size());
    verts.push_back(k.centroid(id));
    carriers.push_back(c.carrier_of(a));
    star_vertex.emplace(id, nv);
    return nv;
  };
  std::vector<Simplex> tops;
  for (int id : k.maximal()) {
    const Simplex& s = k.simplex(id);
    Simplex a, b;
    for (int v : s) (in_region[v] ? a : b).push_back(v);
    if (a.size() <= 1) {
      tops.push_back(s);
      continue;
    }
    Simplex perm = a;
    do {
      Simplex piece = b;
      Simplex prefix;
      for (int v : perm) {
        prefix.insert(std::upper_bound(prefix.begin(), prefix.end(), v), v);
        piece.push_back(hat(prefix));
      }
      tops.push_back(std::move(piece));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  const std::size_t old_count = in_region.size();
  in_region.resize(verts.size(), true);
  (void)old_count;
  auto next = std::make_shared<Complex>(std::move(verts), tops);
  CarriedComplex out{next, c.original, std::move(carriers)};
  std::vector<int> simplex_carriers(next->num_simplices());
  for (int id = 0; id < next->num_simplices(); ++id) simplex_carriers[id] = out.carrier_of(next->simplex(id));
  next->set_parent_carrier(std::move(simplex_carriers));
  return out;
}

namespace {

Rational max_region_diameter_sq(const Complex& k, const std::vector<bool>& in_region) {
  Rational best(0);
  for (int id = 0; id < k.num_simplices(); ++id) {
    const auto& s = k.simplex(id);
    if (s.size() < 2) continue;
    if (!std::all_of(s.begin(), s.end(), [&](int v) { return in_region[v]; })) continue;
    Rational d = diameter(k.points_of(id)).squared;
    if (d > best) best = d;
  }
  return best;
}

}  // namespace

Complex subdivide_relative(ComplexPtr k, const std::vector<int>& region, double mesh) {
  if (!(mesh > 0)) throw std::invalid_argument("mesh must be positive");
  std::vector<bool> in_region(k->num_vertices(), false);
  std::set<int> region_ids(region.begin(), region.end());
  for (int id : region) {
    if (id < 0 || id >= k->num_simplices()) throw std::invalid_argument("region simplex out of range");
    for (int v : k->simplex(id)) in_region[v] = true;
  }
  // the region must be the full subcomplex on its vertices
  for (int id = 0; id < k->num_simplices(); ++id) {
    const auto& s = k->simplex(id);
    bool all_in = std::all_of(s.begin(), s.end(), [&](int v) { return in_region[v]; });
    if (all_in && !region_ids.count(id)) throw std::invalid_argument("region is not a full subcomplex");
  }
  Rational mesh_sq = Rational::from_double(mesh) * Rational::from_double(mesh);
  CarriedComplex cur = CarriedComplex::identity(k);
  for (int round = 0; round < 64; ++round) {
    if (max_region_diameter_sq(*cur.complex, in_region) < mesh_sq) {
      Complex out = *cur.complex;
      if (round == 0) {
        std::vector<int> ident(out.num_simplices());
        std::iota(ident.begin(), ident.end(), 0);
        out.set_parent_carrier(std::move(ident));
      }
      return out;
    }
    cur = refine_near(cur, in_region);
  }
  throw std::runtime_error("subdivide_relative: mesh not reached");
}

Pullback pullback(const SimplicialMap& f, const CarriedComplex& l) {
  if (l.original != f.target && *l.original != *f.target)
    throw std::invalid_argument("pullback: subdivision is not of the map's target");
  const Complex& p = *f.source;
  const Complex& lc = *l.complex;
  // barycentric coordinates of each L vertex within its Q carrier
  std::vector<std::vector<Rational>> coords(lc.num_vertices());
  for (int w = 0; w < lc.num_vertices(); ++w)
    coords[w] = *barycentric_coordinates(f.target->points_of(l.vertex_carrier[w]), lc.vertex(w));
  // L simplices grouped by Q carrier
  std::unordered_map<int, std::vector<int>> by_carrier;
  for (int id = 0; id < lc.num_simplices(); ++id) by_carrier[l.carrier_of(lc.simplex(id))].push_back(id);

  std::map<std::pair<int, int>, int> vertex_index;  // (P face id, L vertex) → K vertex
  std::vector<Point> kverts;
  std::vector<int> kcarrier, kmap;
  auto kvertex = [&](int sigma, int w) {
    // face of σ lying over the carrier of w
    const Simplex& s = p.simplex(sigma);
    const Simplex& rho = f.target->simplex(l.vertex_carrier[w]);
    Simplex face;
    std::vector<Rational> weights;
    for (int v : s) {
      auto pos = std::lower_bound(rho.begin(), rho.end(), f.vertex_map[v]);
      if (pos != rho.end() && *pos == f.vertex_map[v]) face.push_back(v);
    }
    int face_id = *p.find(face);
    auto key = std::make_pair(face_id, w);
    auto it = vertex_index.find(key);
    if (it != vertex_index.end()) return it->second;
    Point x = Point::Constant(p.ambient_dim(), Rational(0));
    for (int v : face) {
      auto pos = std::lower_bound(rho.begin(), rho.end(), f.vertex_map[v]) - rho.begin();
      x += p.vertex(v) * coords[w][pos];
    }
    int id = static_cast<int>(kverts.size());
    kverts.push_back(std::move(x));
    kcarrier.push_back(face_id);
    kmap.push_back(w);
    vertex_index.emplace(key, id);
    return id;
  };
  std::vector<Simplex> tops;
  for (int sigma : p.maximal()) {
    int img = f.image_id(sigma);
    for (const auto& rho : faces_of(f.target->simplex(img))) {
      auto it = by_carrier.find(*f.target->find(rho));
      if (it == by_carrier.end()) continue;
      for (int lid : it->second) {
        Simplex ks;
        for (int w : lc.simplex(lid)) ks.push_back(kvertex(sigma, w));
        tops.push_back(std::move(ks));
      }
    }
  }
  auto k = std::make_shared<Complex>(std::move(kverts), tops);
  Pullback out;
  out.source = CarriedComplex{k, f.source, std::move(kcarrier)};
  std::vector<int> simplex_carriers(k->num_simplices());
  for (int id = 0; id < k->num_simplices(); ++id) simplex_carriers[id] = out.source.carrier_of(k->simplex(id));
  k->set_parent_carrier(std::move(simplex_carriers));
  out.map = SimplicialMap{k, l.complex, std::move(kmap)};
  return out;
}

Rational scaled_volume(const PointSet& simplex) {
  const Eigen::Index d = simplex.cols() - 1;
  if (d == 0) return Rational(1);
  Mat<Rational> m(simplex.rows(), d);
  for (Eigen::Index j = 1; j <= d; ++j) m.col(j - 1) = simplex.col(j) - simplex.col(0);
  // Gram determinant gives squared volume; for full-dimensional simplices use the determinant
  if (m.rows() != d) throw std::invalid_argument("scaled_volume needs a full-dimensional simplex");
  Mat<Rational> a = m;
  Rational det(1);
  for (Eigen::Index c = 0; c < d; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = c; r < d; ++r)
      if (!a(r, c).is_zero()) { piv = r; break; }
    if (piv < 0) return Rational(0);
    if (piv != c) { a.row(piv).swap(a.row(c)); det = -det; }
    det *= a(c, c);
    for (Eigen::Index r = c + 1; r < d; ++r) {
      Rational fct = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < d; ++k) a(r, k) -= fct * a(c, k);
    }
  }
  return abs(det);
}

}  // namespace plk
