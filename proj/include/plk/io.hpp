#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "plk/morin.hpp"
#include "plk/triangulate.hpp"

namespace plk::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "plk/1";

/// Text → JSON; throws ParseError.
Json parse(const std::string& text);
/// Reads a whole file; throws std::runtime_error if unreadable.
std::string read_file(const std::string& path);
/// Writes via a temporary in the same directory, then renames over `path`.
void write_atomic(const std::string& path, const std::string& text);

/// Checks the "schema" tag and returns the "type" field; throws SchemaError.
std::string doc_type(const Json& j);
Json header(const std::string& type);

// scalars: rationals as "num/den" strings; doubles in numeric sections, with
// non-finite values spelled "inf", "-inf", "nan"
Json to_json(const Rational& q);
Rational rational_from(const Json& j);
Json number(double v);
double number_from(const Json& j);
Json to_json(const Point& p);
Point point_from(const Json& j);

// complexes store maximal simplices only; parsing closes them
Json to_json(const Complex& c);
ComplexPtr complex_from(const Json& j);

Json to_json(const SimplicialMap& f);
SimplicialMap map_from(const Json& j);

/// `source` is the map source: a table carried by it is written as "carrier": "source".
Json to_json(const LiftFunction& g, const ComplexPtr& source = nullptr);
LiftFunction lift_from(const Json& j, const ComplexPtr& source = nullptr);

/// A lift file: the map f (optional for closed forms on their own) and g.
struct LiftDoc {
  std::string label;
  std::optional<SimplicialMap> f;
  LiftFunction g;
};
Json lift_doc(const LiftDoc& d);
LiftDoc lift_doc_from(const Json& j);

Json complex_doc(const Complex& c);
Json map_doc(const SimplicialMap& f);

/// Triangulation certificate with its input.
struct CertDoc {
  std::string label;
  LiftFunction g;
  LiftTriangulation t;
};
Json cert_doc(const CertDoc& d);
CertDoc cert_doc_from(const Json& j);

/// Reports: {schema, type: "report", verb, status, message?, witnesses[], constants?, exact?, numeric?, artifacts[], timing{}}.
Json report(const std::string& verb);
/// Throws SchemaError unless `j` is a well-formed report.
void validate_report(const Json& j);

Json to_json(const QPoly& p);
Json to_json(const RPoly& p);  ///< tagged numeric
Json to_json(const MrPath& path);
Json to_json(const PolyDoublePoint& dp);
PolyDoublePoint double_point_from(const Json& j);

}  // namespace plk::io
