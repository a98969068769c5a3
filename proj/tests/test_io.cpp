#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "plk/errors.hpp"
#include "plk/instances.hpp"
#include "plk/io.hpp"

using namespace plk;
using io::Json;

namespace {

// serialize ∘ parse on the emitted text
void text_round_trip(const Json& j) {
  const std::string text = j.dump(1);
  CHECK(io::parse(text).dump(1) == text);
}

Point pt(std::initializer_list<Rational> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const auto& q : v) p(i++) = q;
  return p;
}

}  // namespace

TEST_CASE("rationals are num/den strings") {
  CHECK(io::to_json(Rational(-3, 4)) == "-3/4");
  CHECK(io::to_json(Rational(5)) == "5");
  CHECK(io::rational_from(Json("6/8")) == Rational(3, 4));
  CHECK_THROWS_AS(io::rational_from(Json("1/0")), ParseError);
  CHECK_THROWS_AS(io::rational_from(Json("x")), ParseError);
  CHECK_THROWS_AS(io::rational_from(Json(0.5)), SchemaError);
}

TEST_CASE("numbers keep non-finite values") {
  CHECK(io::number_from(io::number(INFINITY)) == INFINITY);
  CHECK(io::number_from(io::number(-INFINITY)) == -INFINITY);
  CHECK(std::isnan(io::number_from(io::number(NAN))));
  const double v = 0.1 + 0.2;
  CHECK(io::number_from(io::parse(io::number(v).dump())) == v);
}

TEST_CASE("complex documents round trip") {
  auto c = std::make_shared<Complex>(std::vector<Point>{pt({0, 0}), pt({1, 0}), pt({0, 1}), pt({1, 1})},
                                     std::vector<Simplex>{{0, 1, 2}, {1, 2, 3}});
  const Json j = io::complex_doc(*c);
  CHECK(io::doc_type(j) == "complex");
  auto back = io::complex_from(j);
  CHECK(*back == *c);
  CHECK(io::complex_doc(*back) == j);
  text_round_trip(j);

  Json bad = j;
  bad["simplices"][0][0] = 9;
  CHECK_THROWS_AS(io::complex_from(bad), SchemaError);
  bad = j;
  bad["vertices"][0][0] = "1/x";
  CHECK_THROWS_AS(io::complex_from(bad), ParseError);
}

TEST_CASE("schema tag is checked") {
  Json j = io::header("complex");
  CHECK(j["schema"] == "plk/1");
  j["schema"] = "plk/0";
  CHECK_THROWS_AS(io::doc_type(j), SchemaError);
  CHECK_THROWS_AS(io::doc_type(Json::array()), SchemaError);
  CHECK_THROWS_AS(io::doc_type(Json{{"schema", "plk/1"}}), SchemaError);
  CHECK_THROWS_AS(io::parse("{\"a\":"), ParseError);
}

TEST_CASE("lift documents round trip") {
  SUBCASE("registry closed form with a map") {
    auto ex = example_absval();
    const Json j = io::lift_doc({"absval", ex.f, ex.g});
    auto d = io::lift_doc_from(j);
    CHECK(d.label == "absval");
    REQUIRE(d.f);
    CHECK(io::lift_doc(d) == j);
    text_round_trip(j);
  }
  SUBCASE("random builtins") {
    for (const char* name : {"fold1d", "sheets2d"})
      for (int k : {1, 2}) {
        auto inst = builtin_instance(name, 7, k);
        const Json j = io::lift_doc({inst.label, inst.f, inst.g});
        CHECK(io::lift_doc(io::lift_doc_from(j)) == j);
        text_round_trip(j);
      }
  }
  SUBCASE("table carried by the source") {
    auto ex = example_absval();
    std::vector<Point> vals;
    for (int v = 0; v < ex.f.source->num_vertices(); ++v) vals.push_back(pt({Rational(v, 7)}));
    auto g = LiftFunction::pl_table(ex.f.source, vals);
    const Json j = io::lift_doc({"table", ex.f, g});
    CHECK(j["g"]["carrier"] == "source");
    auto d = io::lift_doc_from(j);
    CHECK(d.g.table() == vals);
    CHECK(io::lift_doc(d) == j);
  }
  SUBCASE("combination") {
    auto g = LiftFunction::combination(
        {{0.5, LiftFunction::from_registry("absval_example")}, {-2, LiftFunction::from_registry("absval_example")}});
    const Json j = io::lift_doc({"combo", std::nullopt, g});
    CHECK(io::lift_doc(io::lift_doc_from(j)) == j);
  }
  SUBCASE("unknown registry name") {
    Json j = io::lift_doc({"x", std::nullopt, LiftFunction::from_registry("absval_example")});
    j["g"]["name"] = "nope";
    CHECK_THROWS_AS(io::lift_doc_from(j), UnknownBuiltin);
  }
}

TEST_CASE("map documents are checked simplicial") {
  auto ex = example_absval();
  const Json j = io::map_doc(ex.f);
  CHECK(io::doc_type(j) == "map");
  CHECK(io::map_doc(io::map_from(j)) == j);
  Json bad = j;
  bad["vertex_map"][0] = 1000;
  CHECK_THROWS_AS(io::map_from(bad), SchemaError);
}

TEST_CASE("certificate documents round trip and recheck") {
  auto ex = example_absval();
  auto t = triangulate_lift(ex.f, ex.g);
  const Json j = io::cert_doc({"absval", ex.g, t});
  auto d = io::cert_doc_from(j);
  CHECK(io::cert_doc(d) == j);
  text_round_trip(j);
  CHECK(recheck_certificate(d.t) == 0);
  CHECK(d.t.certificate.size() == t.certificate.size());
  CHECK(d.t.g_values == t.g_values);

  // a tampered separator no longer rechecks
  Json bad = j;
  auto& sep = bad["certificate"][0]["separator"];
  sep["normal"][0] = io::to_json(-io::rational_from(sep["normal"][0]));
  sep["offset"] = io::to_json(-io::rational_from(sep["offset"]));
  CHECK(recheck_certificate(io::cert_doc_from(bad).t) > 0);
}

TEST_CASE("reports") {
  Json r = io::report("tau");
  CHECK(r["status"] == "pass");
  CHECK_NOTHROW(io::validate_report(r));
  r["status"] = "fail";
  CHECK_THROWS_AS(io::validate_report(r), SchemaError);
  r["message"] = "why";
  CHECK_NOTHROW(io::validate_report(r));
  r["status"] = "maybe";
  CHECK_THROWS_AS(io::validate_report(r), SchemaError);
}

TEST_CASE("polynomial and double point json") {
  const Json q = io::to_json(tau(2));
  CHECK(q["exact"] == true);
  CHECK(q["coefficients"] == Json({"0", "-3/4", "0", "1"}));
  CHECK(io::to_json(tau(2).cast<double>())["numeric"] == true);

  auto dps = delta_sample_fr(3, 5, 11);
  for (const auto& dp : dps) {
    const Json j = io::to_json(dp);
    auto back = io::double_point_from(j);
    CHECK(back.first == dp.first);
    CHECK(back.second == dp.second);
    CHECK(back.context == dp.context);
    CHECK(io::to_json(back) == j);
  }
}

TEST_CASE("atomic writes leave no temporaries") {
  const auto dir = std::filesystem::temp_directory_path() / "plk_io_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.json").string();
  io::write_atomic(path, "first\n");
  io::write_atomic(path, "second\n");
  CHECK(io::read_file(path) == "second\n");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  CHECK_THROWS(io::write_atomic((dir / "missing" / "x.json").string(), "x"));
  std::filesystem::remove_all(dir);
}
