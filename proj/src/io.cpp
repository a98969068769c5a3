#include "plk/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "plk/errors.hpp"

namespace plk::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw SchemaError(what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object holding \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field \"") + key + "\"");
  return *it;
}

const Json& array_field(const Json& j, const char* key) {
  const Json& a = field(j, key);
  if (!a.is_array()) bad(std::string("field \"") + key + "\" must be an array");
  return a;
}

int int_from(const Json& j) {
  if (!j.is_number_integer()) bad("expected an integer");
  return j.get<int>();
}

std::vector<int> ints_from(const Json& j) {
  if (!j.is_array()) bad("expected an integer array");
  std::vector<int> out;
  for (const auto& v : j) out.push_back(int_from(v));
  return out;
}

Json points_json(const std::vector<Point>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

std::vector<Point> points_from(const Json& j) {
  if (!j.is_array()) bad("expected an array of points");
  std::vector<Point> out;
  for (const auto& p : j) out.push_back(point_from(p));
  return out;
}

Json point_set_json(const PointSet& s) {
  Json a = Json::array();
  for (Eigen::Index c = 0; c < s.cols(); ++c) a.push_back(to_json(Point(s.col(c))));
  return a;
}

PointSet point_set_from(const Json& j) {
  auto pts = points_from(j);
  if (pts.empty()) return PointSet(0, 0);
  PointSet s(pts[0].size(), static_cast<Eigen::Index>(pts.size()));
  for (std::size_t c = 0; c < pts.size(); ++c) {
    if (pts[c].size() != s.rows()) bad("points of mixed dimension");
    s.col(static_cast<Eigen::Index>(c)) = pts[c];
  }
  return s;
}

Json carried_json(const CarriedComplex& c) {
  return Json{{"complex", to_json(*c.complex)}, {"vertex_carrier", c.vertex_carrier}};
}

CarriedComplex carried_from(const Json& j, const ComplexPtr& original) {
  CarriedComplex c;
  c.complex = complex_from(field(j, "complex"));
  c.original = original;
  c.vertex_carrier = ints_from(field(j, "vertex_carrier"));
  if (static_cast<int>(c.vertex_carrier.size()) != c.complex->num_vertices()) bad("one carrier per vertex required");
  for (int s : c.vertex_carrier)
    if (s < 0 || s >= original->num_simplices()) bad("vertex carrier out of range");
  return c;
}

Json derived_json(const DerivedSubdivision& d) {
  return Json{{"barycenters", points_json(d.barycenters)}, {"result", to_json(*d.result)}, {"chains", d.chains}};
}

DerivedSubdivision derived_from(const Json& j, const ComplexPtr& parent) {
  DerivedSubdivision d;
  d.parent = parent;
  d.barycenters = points_from(field(j, "barycenters"));
  d.result = complex_from(field(j, "result"));
  for (const auto& c : array_field(j, "chains")) d.chains.push_back(ints_from(c));
  if (static_cast<int>(d.barycenters.size()) != parent->num_simplices()) bad("one barycenter per parent simplex");
  if (static_cast<int>(d.chains.size()) != d.result->num_simplices()) bad("one chain per derived simplex");
  return d;
}

SimplicialMap map_between(const ComplexPtr& s, const ComplexPtr& t, const Json& vm) {
  SimplicialMap f{s, t, ints_from(vm)};
  if (static_cast<int>(f.vertex_map.size()) != s->num_vertices()) bad("vertex_map needs one entry per source vertex");
  for (int v : f.vertex_map)
    if (v < 0 || v >= t->num_vertices()) bad("vertex_map entry out of range");
  try {
    f.check_simplicial();
  } catch (const std::invalid_argument& e) {
    bad(std::string("map is not simplicial: ") + e.what());
  }
  return f;
}

}  // namespace

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

std::string doc_type(const Json& j) {
  if (!j.is_object()) bad("document must be a JSON object");
  const Json& s = field(j, "schema");
  if (!s.is_string() || s.get<std::string>() != kSchema) bad(std::string("schema must be \"") + kSchema + "\"");
  const Json& t = field(j, "type");
  if (!t.is_string()) bad("type must be a string");
  return t.get<std::string>();
}

Json header(const std::string& type) { return Json{{"schema", kSchema}, {"type", type}}; }

Json to_json(const Rational& q) { return q.str(); }

Rational rational_from(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (!j.is_string()) bad("rationals are \"num/den\" strings");
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError("bad rational \"" + j.get<std::string>() + "\"");
  }
}

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  bad("expected a number");
}

Json to_json(const Point& p) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(to_json(p(i)));
  return a;
}

Point point_from(const Json& j) {
  if (!j.is_array()) bad("points are arrays of rationals");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p(static_cast<Eigen::Index>(i)) = rational_from(j[i]);
  return p;
}

Json to_json(const Complex& c) {
  Json simplices = Json::array();
  for (int id : c.maximal()) simplices.push_back(c.simplex(id));
  Json out{{"vertices", points_json(c.vertices())}, {"simplices", simplices}};
  if (!c.parent_carrier().empty()) out["parent_carrier"] = c.parent_carrier();
  return out;
}

ComplexPtr complex_from(const Json& j) {
  auto verts = points_from(field(j, "vertices"));
  for (const auto& v : verts)
    if (v.size() != verts[0].size()) bad("vertices of mixed dimension");
  std::vector<Simplex> simplices;
  for (const auto& s : array_field(j, "simplices")) {
    Simplex sx = ints_from(s);
    if (sx.empty()) bad("empty simplex");
    for (int v : sx)
      if (v < 0 || v >= static_cast<int>(verts.size())) bad("simplex vertex out of range");
    std::sort(sx.begin(), sx.end());
    if (std::adjacent_find(sx.begin(), sx.end()) != sx.end()) bad("repeated vertex in a simplex");
    simplices.push_back(std::move(sx));
  }
  auto c = std::make_shared<Complex>(std::move(verts), simplices);
  if (j.contains("parent_carrier")) {
    auto pc = ints_from(j["parent_carrier"]);
    if (static_cast<int>(pc.size()) != c->num_simplices()) bad("parent_carrier needs one entry per simplex");
    c->set_parent_carrier(std::move(pc));
  }
  return c;
}

Json to_json(const SimplicialMap& f) {
  return Json{{"source", to_json(*f.source)}, {"target", to_json(*f.target)}, {"vertex_map", f.vertex_map}};
}

SimplicialMap map_from(const Json& j) {
  return map_between(complex_from(field(j, "source")), complex_from(field(j, "target")), field(j, "vertex_map"));
}

Json to_json(const LiftFunction& g, const ComplexPtr& source) {
  switch (g.kind()) {
    case LiftFunction::Kind::pl_table: {
      Json carrier = source && g.carrier() == source ? Json("source") : to_json(*g.carrier());
      return Json{{"kind", "table"}, {"carrier", carrier}, {"values", points_json(g.table())}};
    }
    case LiftFunction::Kind::composite: {
      Json terms = Json::array();
      for (const auto& [c, t] : g.terms())
        terms.push_back(Json{{"coeff", to_json(Rational::from_double(c))}, {"lift", to_json(t, source)}});
      return Json{{"kind", "combination"}, {"terms", terms}};
    }
    case LiftFunction::Kind::closed_form_named: {
      Json params = Json::array();
      for (double p : g.params()) params.push_back(to_json(Rational::from_double(p)));
      return Json{{"kind", "registry"}, {"name", g.name()}, {"params", params}};
    }
  }
  bad("unknown lift kind");
}

LiftFunction lift_from(const Json& j, const ComplexPtr& source) {
  const Json& kind = field(j, "kind");
  if (!kind.is_string()) bad("lift kind must be a string");
  const auto k = kind.get<std::string>();
  if (k == "registry") {
    const Json& name = field(j, "name");
    if (!name.is_string()) bad("registry name must be a string");
    std::vector<double> params;
    if (j.contains("params")) {
      if (!j["params"].is_array()) bad("params must be an array");
      for (const auto& p : j["params"]) params.push_back(rational_from(p).to_double());
    }
    try {
      return LiftFunction::from_registry(name.get<std::string>(), params);
    } catch (const UnknownBuiltin&) {
      throw;
    } catch (const std::invalid_argument& e) {
      bad(std::string("bad registry parameters: ") + e.what());
    }
  }
  if (k == "table") {
    const Json& c = field(j, "carrier");
    ComplexPtr carrier;
    if (c.is_string() && c.get<std::string>() == "source") {
      if (!source) bad("table carrier \"source\" needs a map");
      carrier = source;
    } else {
      carrier = complex_from(c);
    }
    auto values = points_from(field(j, "values"));
    if (static_cast<int>(values.size()) != carrier->num_vertices()) bad("table needs one value per carrier vertex");
    for (const auto& v : values)
      if (v.size() != values[0].size()) bad("table values of mixed dimension");
    return LiftFunction::pl_table(carrier, std::move(values));
  }
  if (k == "combination") {
    std::vector<std::pair<double, LiftFunction>> terms;
    for (const auto& t : array_field(j, "terms"))
      terms.emplace_back(rational_from(field(t, "coeff")).to_double(), lift_from(field(t, "lift"), source));
    try {
      return LiftFunction::combination(std::move(terms));
    } catch (const std::invalid_argument& e) {
      bad(e.what());
    }
  }
  bad("unknown lift kind \"" + k + "\"");
}

Json lift_doc(const LiftDoc& d) {
  Json j = header("lift");
  j["label"] = d.label;
  if (d.f) j["map"] = to_json(*d.f);
  j["g"] = to_json(d.g, d.f ? d.f->source : nullptr);
  return j;
}

LiftDoc lift_doc_from(const Json& j) {
  if (doc_type(j) != "lift") bad("expected a lift document");
  LiftDoc d;
  if (j.contains("label")) {
    if (!j["label"].is_string()) bad("label must be a string");
    d.label = j["label"].get<std::string>();
  }
  if (j.contains("map")) d.f = map_from(j["map"]);
  d.g = lift_from(field(j, "g"), d.f ? d.f->source : nullptr);
  if (d.f && d.g.domain_dim() != 0 && d.g.domain_dim() != d.f->source->ambient_dim())
    bad("lift domain does not match the map source");
  return d;
}

Json complex_doc(const Complex& c) {
  Json j = header("complex");
  j.update(to_json(c));
  return j;
}

Json map_doc(const SimplicialMap& f) {
  Json j = header("map");
  j.update(to_json(f));
  return j;
}

Json cert_doc(const CertDoc& d) {
  const auto& t = d.t;
  Json j = header("triangulation-cert");
  j["label"] = d.label;
  j["input"] = Json{{"map", to_json(t.f)}, {"g", to_json(d.g, t.f.source)}};
  j["K"] = carried_json(t.K);
  j["L"] = carried_json(t.L);
  j["f_KL"] = t.f_KL.vertex_map;
  j["derived"] = Json{{"source", derived_json(t.derived.source)},
                      {"target", derived_json(t.derived.target)},
                      {"vertex_map", t.derived.map.vertex_map}};
  Json entries = Json::array();
  for (const auto& e : t.certificate)
    entries.push_back(Json{{"u", e.u},
                           {"v", e.v},
                           {"separator", Json{{"normal", to_json(e.separator.normal)}, {"offset", to_json(e.separator.offset)}}},
                           {"samples_u", point_set_json(e.samples_u)},
                           {"samples_v", point_set_json(e.samples_v)},
                           {"numeric", Json{{"distance_lower", number(e.distance_lower)}}}});
  j["certificate"] = entries;
  j["g_values"] = points_json(t.g_values);
  Json d_arr = Json::array(), r_arr = Json::array(), e_arr = Json::array();
  for (double v : t.audit.d) d_arr.push_back(number(v));
  for (double v : t.audit.r) r_arr.push_back(number(v));
  for (double v : t.audit.eps_u) e_arr.push_back(number(v));
  j["audit"] = Json{{"weight_base", t.audit.weight_base.get_str()},
                    {"retries", t.audit.retries},
                    {"numeric", Json{{"d", d_arr}, {"r", r_arr}, {"eps_u", e_arr}}}};
  return j;
}

CertDoc cert_doc_from(const Json& j) {
  if (doc_type(j) != "triangulation-cert") bad("expected a triangulation-cert document");
  CertDoc d;
  if (j.contains("label") && j["label"].is_string()) d.label = j["label"].get<std::string>();
  auto& t = d.t;
  const Json& input = field(j, "input");
  t.f = map_from(field(input, "map"));
  d.g = lift_from(field(input, "g"), t.f.source);
  t.K = carried_from(field(j, "K"), t.f.source);
  t.L = carried_from(field(j, "L"), t.f.target);
  t.f_KL = map_between(t.K.complex, t.L.complex, field(j, "f_KL"));
  const Json& der = field(j, "derived");
  t.derived.source = derived_from(field(der, "source"), t.K.complex);
  t.derived.target = derived_from(field(der, "target"), t.L.complex);
  t.derived.map = map_between(t.derived.source.result, t.derived.target.result, field(der, "vertex_map"));
  for (const auto& e : array_field(j, "certificate")) {
    CertificateEntry c;
    c.u = int_from(field(e, "u"));
    c.v = int_from(field(e, "v"));
    if (c.u < 0 || c.v < 0 || c.u >= t.K.complex->num_vertices() || c.v >= t.K.complex->num_vertices())
      bad("certificate vertex out of range");
    const Json& sep = field(e, "separator");
    c.separator.normal = point_from(field(sep, "normal"));
    c.separator.offset = rational_from(field(sep, "offset"));
    c.samples_u = point_set_from(field(e, "samples_u"));
    c.samples_v = point_set_from(field(e, "samples_v"));
    if (c.samples_u.rows() != c.separator.normal.size() || c.samples_v.rows() != c.separator.normal.size())
      bad("separator and samples differ in dimension");
    c.distance_lower = number_from(field(field(e, "numeric"), "distance_lower"));
    t.certificate.push_back(std::move(c));
  }
  t.g_values = points_from(field(j, "g_values"));
  if (static_cast<int>(t.g_values.size()) != t.derived.source.result->num_vertices())
    bad("g_values needs one value per K' vertex");
  const Json& audit = field(j, "audit");
  const Json& wb = field(audit, "weight_base");
  if (!wb.is_string() || t.audit.weight_base.set_str(wb.get<std::string>(), 10) != 0) bad("weight_base must be an integer string");
  t.audit.retries = int_from(field(audit, "retries"));
  const Json& num = field(audit, "numeric");
  for (const auto& v : array_field(num, "d")) t.audit.d.push_back(number_from(v));
  for (const auto& v : array_field(num, "r")) t.audit.r.push_back(number_from(v));
  for (const auto& v : array_field(num, "eps_u")) t.audit.eps_u.push_back(number_from(v));
  return d;
}

Json report(const std::string& verb) {
  Json j = header("report");
  j["verb"] = verb;
  j["status"] = "pass";
  j["witnesses"] = Json::array();
  j["artifacts"] = Json::array();
  j["timing"] = Json::object();
  return j;
}

void validate_report(const Json& j) {
  if (doc_type(j) != "report") bad("expected a report document");
  if (!field(j, "verb").is_string()) bad("verb must be a string");
  const Json& s = field(j, "status");
  if (!s.is_string() || (s != "pass" && s != "fail" && s != "error")) bad("status must be pass, fail or error");
  array_field(j, "witnesses");
  array_field(j, "artifacts");
  if (!field(j, "timing").is_object()) bad("timing must be an object");
  if (s != "pass" && j["witnesses"].empty() && !(j.contains("message") && j["message"].is_string()))
    bad("fail/error reports need a witness or a message");
}

Json to_json(const QPoly& p) {
  Json c = Json::array();
  for (const auto& v : p.coeffs()) c.push_back(to_json(v));
  if (c.empty()) c.push_back("0");
  return Json{{"exact", true}, {"coefficients", c}};
}

Json to_json(const RPoly& p) {
  Json c = Json::array();
  for (double v : p.coeffs()) c.push_back(number(v));
  if (c.empty()) c.push_back(0.0);
  return Json{{"numeric", true}, {"coefficients", c}};
}

Json to_json(const MrPath& path) {
  Json stages = Json::array();
  for (const auto& st : path.stages) {
    Json grid = Json::array(), polys = Json::array(), pairs = Json::array();
    for (const auto& s : st.samples) {
      grid.push_back(number(s.t));
      polys.push_back(to_json(s.poly)["coefficients"]);
      pairs.push_back(Json::array({number(s.x1), number(s.x2)}));
    }
    stages.push_back(Json{{"family", st.family}, {"t_grid", grid}, {"polys", polys}, {"carried_pairs", pairs}});
  }
  return Json{{"r", path.r}, {"numeric", true}, {"stages", stages}};
}

Json to_json(const PolyDoublePoint& dp) {
  return Json{{"context", to_string(dp.context)}, {"first", to_json(dp.first)}, {"second", to_json(dp.second)}};
}

PolyDoublePoint double_point_from(const Json& j) {
  PolyDoublePoint dp;
  dp.first = point_from(field(j, "first"));
  dp.second = point_from(field(j, "second"));
  if (j.contains("context")) {
    const auto c = j["context"].is_string() ? j["context"].get<std::string>() : "";
    if (c == "f_r")
      dp.context = DeltaContext::f_r;
    else if (c == "F_r")
      dp.context = DeltaContext::F_r;
    else if (c == "tau_r")
      dp.context = DeltaContext::tau_r;
    else if (c == "T_r")
      dp.context = DeltaContext::T_r;
    else if (c == "poly")
      dp.context = DeltaContext::poly;
    else
      bad("unknown double point context");
  }
  return dp;
}

}  // namespace plk::io
