#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <random>
#include <set>

#include "cli.hpp"
#include "plk/errors.hpp"
#include "plk/homotopy.hpp"
#include "plk/instances.hpp"

namespace plk::cli {

namespace {

using io::to_json;

Json witness_json(const InjectivityWitness& w) {
  return Json{{"x", to_json(w.x)}, {"y", to_json(w.y)}, {"sheet_x", w.sheet_x}, {"sheet_y", w.sheet_y},
              {"value", to_json(w.value)}};
}

Json hull_witness_json(const HullWitness& w) {
  Json a = Json::array(), b = Json::array();
  for (const auto& q : w.weights_a) a.push_back(to_json(q));
  for (const auto& q : w.weights_b) b.push_back(to_json(q));
  return Json{{"point", to_json(w.point)}, {"weights_a", a}, {"weights_b", b}};
}

bool is_file(const std::string& s) { return std::filesystem::is_regular_file(s); }

/// A lift problem from a file or a builtin name.
io::LiftDoc lift_input(const std::string& input, const Common& c, int k) {
  if (is_file(input)) {
    auto d = io::lift_doc_from(load(input));
    if (!d.f) throw SchemaError("lift document has no map");
    return d;
  }
  if (input != "absval" && input != "fold1d" && input != "sheets2d" && input != "fold2d")
    throw UnknownBuiltin("no file or builtin named \"" + input + "\"");
  const std::uint64_t seed = input == "absval" ? c.seed.value_or(0) : c.need_seed("builtin " + input + " is random");
  auto inst = builtin_instance(input, seed, k);
  return {inst.label, inst.f, inst.g};
}

io::CertDoc cert_input(const std::string& path) {
  if (!is_file(path)) throw UsageError("no such file: " + path);
  return io::cert_doc_from(load(path));
}

double min_certified(const LiftTriangulation& t) {
  double m = INFINITY;
  for (const auto& e : t.certificate) m = std::min(m, e.distance_lower);
  return m;
}

/// K vertex pairs u < v with f(u) = f(v) that carry no certificate entry.
long missing_pairs(const LiftTriangulation& t) {
  std::set<std::pair<int, int>> have;
  for (const auto& e : t.certificate) have.emplace(std::min(e.u, e.v), std::max(e.u, e.v));
  std::map<int, std::vector<int>> fibres;
  for (int u = 0; u < t.K.complex->num_vertices(); ++u) fibres[t.f_KL.vertex_map[u]].push_back(u);
  long missing = 0;
  for (const auto& [img, us] : fibres)
    for (std::size_t a = 0; a < us.size(); ++a)
      for (std::size_t b = a + 1; b < us.size(); ++b) missing += !have.count({us[a], us[b]});
  return missing;
}

void add_pipeline_constants(Json& r, const LiftTriangulation& t) {
  Json d = Json::array(), rr = Json::array();
  for (double v : t.audit.d) d.push_back(io::number(v));
  for (double v : t.audit.r) rr.push_back(io::number(v));
  r["constants"] = Json{{"numeric", true}, {"d", d}, {"r", rr}};
}

// ---------------------------------------------------------------- verbs

Json run_validate(const std::string& path) {
  Json r = io::report("validate");
  if (!is_file(path)) throw UsageError("no such file: " + path);
  const Json doc = load(path);
  const std::string type = io::doc_type(doc);
  r["document"] = type;
  if (type == "complex") {
    auto c = io::complex_from(doc);
    auto v = validate_complex(*c);
    r["exact"] = Json{{"vertices", c->num_vertices()}, {"simplices", c->num_simplices()}, {"dim", c->dim()}};
    for (const auto& msg : v.violations) r["witnesses"].push_back(msg);
    if (!v.valid) fail(r, "complex is not a valid geometric simplicial complex");
  } else if (type == "map") {
    auto f = io::map_from(doc);
    auto nd = is_nondegenerate(f);
    r["exact"] = Json{{"nondegenerate", nd.nondegenerate}};
    if (nd.collapsed) r["witnesses"].push_back(Json{{"collapsed_simplex", *nd.collapsed}});
  } else if (type == "lift") {
    auto d = io::lift_doc_from(doc);
    r["exact"] = Json{{"k", d.g.k()}, {"has_map", d.f.has_value()}};
  } else if (type == "triangulation-cert") {
    auto d = io::cert_doc_from(doc);
    const int bad = recheck_certificate(d.t);
    const long missing = missing_pairs(d.t);
    r["exact"] = Json{{"entries", d.t.certificate.size()}, {"recheck_failures", bad}, {"missing_pairs", missing}};
    if (bad || missing) fail(r, "certificate does not recheck");
  } else if (type == "report") {
    io::validate_report(doc);
  } else {
    throw SchemaError("unknown document type \"" + type + "\"");
  }
  return r;
}

struct TriangulateOpts {
  std::string input, out;
  int k = 1;
  TriangulateOptions opt;
};

Json run_triangulate(const TriangulateOpts& o, const Common& c) {
  Json r = io::report("triangulate-lift");
  Stopwatch sw;
  auto in = lift_input(o.input, c, o.k);
  r["timing"]["load"] = sw.lap();
  LiftTriangulation t = triangulate_lift(*in.f, in.g, o.opt);
  r["timing"]["triangulate"] = sw.lap();
  const int bad = recheck_certificate(t);
  r["timing"]["recheck"] = sw.lap();
  add_pipeline_constants(r, t);
  r["exact"] = Json{{"certificate_entries", t.certificate.size()},
                    {"recheck_failures", bad},
                    {"K_vertices", t.K.complex->num_vertices()},
                    {"K_prime_simplices", t.derived.source.result->num_simplices()},
                    {"weight_base", t.audit.weight_base.get_str()},
                    {"retries", t.audit.retries}};
  r["numeric"] = Json{{"min_certified_distance", io::number(min_certified(t))}};
  if (bad) fail(r, "certificate entries fail re-verification");
  if (!o.out.empty()) {
    write_json(o.out, io::cert_doc({in.label, in.g, std::move(t)}));
    r["artifacts"].push_back(o.out);
  }
  return r;
}

Json run_plify(const std::string& path, const std::string& out) {
  Json r = io::report("plify");
  Stopwatch sw;
  auto d = cert_input(path);
  try {
    LiftFunction star = plify(d.t, d.g);
    r["timing"]["plify"] = sw.lap();
    r["exact"] = Json{{"K_prime_vertices", d.t.derived.source.result->num_vertices()}, {"verified", true}};
    if (!out.empty()) {
      write_json(out, io::lift_doc({d.label + " (PL)", d.t.derived.map, star}));
      r["artifacts"].push_back(out);
    }
  } catch (const VerificationFailure& e) {
    fail(r, e.what());
    r["witnesses"].push_back(witness_json(e.witness));
  }
  return r;
}

Json run_verify(const std::string& path, int oracle_res, int delta_res, const Common& c) {
  Json r = io::report("verify");
  if (!is_file(path)) throw UsageError("no such file: " + path);
  const Json doc = load(path);
  const std::string type = io::doc_type(doc);
  Stopwatch sw;
  if (type == "triangulation-cert") {
    auto d = io::cert_doc_from(doc);
    const int bad = recheck_certificate(d.t);
    const long missing = missing_pairs(d.t);
    auto star = LiftFunction::pl_table(d.t.derived.source.result, d.t.g_values);
    auto rep = verify_embedding_exact(d.t.derived.map, star);
    r["timing"]["verify"] = sw.lap();
    r["exact"] = Json{{"certificate_entries", d.t.certificate.size()},
                      {"recheck_failures", bad},
                      {"missing_pairs", missing},
                      {"pairs_checked", rep.pairs_checked},
                      {"injective", rep.injective}};
    if (rep.witness) r["witnesses"].push_back(witness_json(*rep.witness));
    if (bad || missing) fail(r, "certificate does not recheck");
    if (!rep.injective) fail(r, "f x g-star is not injective");
    return r;
  }
  if (type != "lift") throw SchemaError("verify expects a triangulation-cert or a lift document");
  auto d = io::lift_doc_from(doc);
  if (!d.f) throw SchemaError("lift document has no map");
  if (d.g.kind() == LiftFunction::Kind::pl_table && d.g.carrier() == d.f->source) {
    auto rep = verify_embedding_exact(*d.f, d.g);
    r["exact"] = Json{{"pairs_checked", rep.pairs_checked}, {"injective", rep.injective}};
    if (rep.witness) r["witnesses"].push_back(witness_json(*rep.witness));
    if (!rep.injective) fail(r, "f x g is not injective");
    if (oracle_res > 0) {
      auto s = verify_embedding_sampled(*d.f, d.g, oracle_res, c.tol(1e-12));
      r["numeric"] = Json{{"oracle_injective", s.injective}, {"oracle_pairs", s.pairs_checked}};
      if (s.injective != rep.injective) fail(r, "exact and sampled verification disagree");
    }
  } else {
    // closed forms: only the sampled sign map is available
    auto delta = sample_double_points(*d.f, delta_res);
    try {
      auto sm = sign_map(d.g, delta);
      r["numeric"] = Json{{"pairs", delta.pairs.size()}, {"clusters", sm.clusters}};
      for (int cl = 0; cl < static_cast<int>(sm.cluster_sign.size()); ++cl)
        if (sm.cluster_sign[cl] == 0) fail(r, "sign of g(y) - g(x) changes on cluster " + std::to_string(cl));
    } catch (const std::runtime_error& e) {
      fail(r, e.what());
    }
  }
  r["timing"]["verify"] = sw.lap();
  return r;
}

struct HomotopyOpts {
  std::string input;
  std::vector<std::string> t;
  int random = 10, samples = 1000;
};

Json run_homotopy(const HomotopyOpts& o, const Common& c) {
  Json r = io::report("homotopy");
  const std::uint64_t seed = c.need_seed("homotopy samples points at random");
  auto d = cert_input(o.input);
  auto base = std::make_shared<LiftTriangulation>(std::move(d.t));
  CubeHomotopy h(base, d.g);
  std::vector<std::vector<Rational>> ts;
  for (const auto& s : o.t) ts.push_back(rationals(s));
  if (ts.empty()) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> pick(0, 1L << 20);
    for (int i = 0; i < o.random; ++i) {
      std::vector<Rational> t;
      for (int j = 0; j < h.n(); ++j) t.emplace_back(mpz_class(pick(rng)), mpz_class(1L << 20));
      ts.push_back(std::move(t));
    }
  }
  Json runs = Json::array();
  Stopwatch sw;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (static_cast<int>(ts[i].size()) != h.n())
      throw UsageError("--t needs " + std::to_string(h.n()) + " comma-separated entries");
    auto rep = homotopy_certificate(h, ts[i], o.samples, seed + i);
    Json t = Json::array();
    for (const auto& q : ts[i]) t.push_back(to_json(q));
    runs.push_back(Json{{"t", t},
                        {"containment_checked", rep.containment_checked},
                        {"containment_violations", rep.containment_violations},
                        {"pairs_checked", rep.pairs_checked},
                        {"injectivity_violations", rep.injectivity_violations}});
    if (!rep.ok()) {
      fail(r, "homotopy leaves a hull or loses injectivity");
      const auto& v = *rep.first;
      r["witnesses"].push_back(
          Json{{"kind", v.kind == HomotopyViolation::Kind::containment ? "containment" : "injectivity"},
               {"simplex", v.simplex}, {"x", to_json(v.x)}, {"value", to_json(v.value)}});
    }
  }
  r["timing"]["homotopy"] = sw.lap();
  r["exact"] = Json{{"runs", runs}};
  return r;
}

struct StabilityOpts {
  std::string input;
  std::optional<double> delta;
  int trials = 50, bisect = 0;
};

Json run_stability(const StabilityOpts& o, const Common& c) {
  Json r = io::report("stability");
  const std::uint64_t seed = c.need_seed("perturbations are random");
  auto d = cert_input(o.input);
  const double bound = min_certified(d.t) / 2;
  const double delta = o.delta.value_or(bound);
  if (!std::isfinite(delta)) throw UsageError("no certified distance; pass --delta");
  auto star = plify(d.t, d.g);
  Stopwatch sw;
  auto rep = perturbation_stability(d.t, star, delta, o.trials, seed, o.bisect);
  r["timing"]["stability"] = sw.lap();
  Json probes = Json::array();
  for (const auto& [dv, okv] : rep.probes) probes.push_back(Json{{"delta", dv}, {"all_pass", okv}});
  r["numeric"] = Json{{"delta", delta}, {"half_min_certified", io::number(bound)}, {"trials", rep.trials},
                      {"passes", rep.passes}, {"radius", rep.radius}, {"probes", probes}};
  if (rep.witness) r["witnesses"].push_back(witness_json(*rep.witness));
  if (rep.passes != rep.trials) fail(r, "some perturbations are not embeddings");
  return r;
}

struct ExampleOpts {
  std::string name, out, csv, plot;
  int k = 1, points = 10000;
};

Json run_example(const ExampleOpts& o, const Common& c) {
  Json r = io::report("example");
  auto in = lift_input(o.name, c, o.k);
  if (is_file(o.name)) throw UsageError("example takes a builtin name");
  r["exact"] = Json{{"label", in.label}, {"source_vertices", in.f->source->num_vertices()}, {"k", in.g.k()}};
  if (!o.out.empty()) {
    write_json(o.out, io::lift_doc(in));
    r["artifacts"].push_back(o.out);
  }
  if (!o.plot.empty() || !o.csv.empty()) {
    if (o.plot != "g-graph") throw UsageError("unknown series \"" + o.plot + "\" (example offers g-graph)");
    if (o.csv.empty()) throw UsageError("--plot needs --csv");
    if (in.f->source->ambient_dim() != 1) throw UsageError("g-graph needs a 1-dimensional source");
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : in.f->source->vertices()) {
      lo = std::min(lo, v(0).to_double());
      hi = std::max(hi, v(0).to_double());
    }
    std::vector<std::string> header{"x"};
    for (int j = 0; j < in.g.k(); ++j) header.push_back(in.g.k() == 1 ? "g" : "g" + std::to_string(j + 1));
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < o.points; ++i) {
      const double x = lo + (hi - lo) * i / std::max(1, o.points - 1);
      Vec<double> p(1);
      p(0) = x;
      Vec<double> gv = in.g(p);
      std::vector<double> row{x};
      for (int j = 0; j < gv.size(); ++j) row.push_back(gv(j));
      rows.push_back(std::move(row));
    }
    write_csv(o.csv, header, rows);
    r["artifacts"].push_back(o.csv);
  }
  return r;
}

Json run_barycentric(const std::vector<std::string>& eps, int grid, int samples) {
  Json r = io::report("barycentric-failure");
  std::vector<Rational> es;
  for (const auto& e : eps) es.push_back(rational(e));
  // log grid on [1e-3, 1], snapped to dyadics
  for (int i = 0; i < grid; ++i) es.push_back(Rational::snap(std::pow(10.0, -3.0 * i / std::max(1, grid - 1)), 40));
  if (es.empty()) es.push_back(Rational(1));
  Json rows = Json::array();
  long failures = 0;
  Stopwatch sw;
  for (const auto& e : es) {
    auto b = barycentric_failure(e, samples);
    const bool certified = b.pair_inside && !b.hulls.disjoint && b.hulls.witness;
    failures += !certified;
    Json row{{"epsilon", to_json(e)}, {"k", b.k}, {"lower", to_json(b.lower)}, {"upper", to_json(b.upper)},
             {"pair_inside", b.pair_inside}, {"hulls_intersect", !b.hulls.disjoint}};
    if (b.hulls.witness) row["witness"] = hull_witness_json(*b.hulls.witness);
    rows.push_back(std::move(row));
  }
  r["timing"]["barycentric"] = sw.lap();
  r["exact"] = Json{{"cases", rows}, {"uncertified", failures}};
  if (failures) fail(r, "some epsilon values were not certified");
  return r;
}

}  // namespace

void register_lift_verbs(CLI::App& app, Handlers& h, Common& c) {
  {
    auto path = std::make_shared<std::string>();
    auto* sub = app.add_subcommand("validate", "Check a plk/1 document against its schema and invariants");
    sub->add_option("input", *path, "JSON document")->required();
    add_common(sub, c);
    h[sub] = [path] { return run_validate(*path); };
  }
  {
    auto o = std::make_shared<TriangulateOpts>();
    auto* sub = app.add_subcommand("triangulate-lift", "Certified subdivisions for an embedded lift");
    sub->add_option("input", o->input, "lift document or builtin (absval, fold1d, sheets2d, fold2d)")->required();
    sub->add_option("--out", o->out, "triangulation-cert output");
    sub->add_option("--k", o->k, "codimension for random builtins")->check(CLI::Range(1, 2));
    sub->add_option("--max-retries", o->opt.max_retries, "certification retries");
    sub->add_option("--snap-bits", o->opt.snap_bits, "denominator bound 2^bits for snapped values");
    add_common(sub, c);
    h[sub] = [o, &c] { return run_triangulate(*o, c); };
  }
  {
    auto in = std::make_shared<std::string>(), out = std::make_shared<std::string>();
    auto* sub = app.add_subcommand("plify", "PL-ification on K' from a certificate");
    sub->add_option("input", *in, "triangulation-cert")->required();
    sub->add_option("--out", *out, "lift output (table on K')");
    add_common(sub, c);
    h[sub] = [in, out] { return run_plify(*in, *out); };
  }
  {
    auto in = std::make_shared<std::string>();
    auto oracle = std::make_shared<int>(0), dres = std::make_shared<int>(16);
    auto* sub = app.add_subcommand("verify", "Exact injectivity of f x g (certificate or PL lift)");
    sub->add_option("input", *in, "triangulation-cert or lift document")->required();
    sub->add_option("--oracle-res", *oracle, "also run the sampled oracle at this grid density");
    sub->add_option("--delta-res", *dres, "double point grid for closed-form lifts");
    add_common(sub, c);
    h[sub] = [in, oracle, dres, &c] { return run_verify(*in, *oracle, *dres, c); };
  }
  {
    auto o = std::make_shared<HomotopyOpts>();
    auto* sub = app.add_subcommand("homotopy", "Cube homotopy certificate between g and its PL-ification");
    sub->add_option("input", o->input, "triangulation-cert")->required();
    sub->add_option("--t", o->t, "t in [0,1]^n as comma-separated rationals (repeatable)");
    sub->add_option("--random", o->random, "number of random t when --t is absent");
    sub->add_option("--samples", o->samples, "containment samples and double points per t");
    add_common(sub, c);
    h[sub] = [o, &c] { return run_homotopy(*o, c); };
  }
  {
    auto o = std::make_shared<StabilityOpts>();
    auto* sub = app.add_subcommand("stability", "Random perturbations of g-star around the certificate");
    sub->add_option("input", o->input, "triangulation-cert")->required();
    sub->add_option("--delta", o->delta, "perturbation size (default: half the smallest certified distance)");
    sub->add_option("--trials", o->trials, "perturbations per size");
    sub->add_option("--bisect", o->bisect, "bisection steps for the empirical radius");
    add_common(sub, c);
    h[sub] = [o, &c] { return run_stability(*o, c); };
  }
  {
    auto o = std::make_shared<ExampleOpts>();
    auto* sub = app.add_subcommand("example", "Serialize a builtin instance");
    sub->add_option("name", o->name, "absval, fold1d, sheets2d, fold2d")->required();
    sub->add_option("--out", o->out, "lift output");
    sub->add_option("--k", o->k, "codimension for random builtins")->check(CLI::Range(1, 2));
    sub->add_option("--csv", o->csv, "CSV output for --plot");
    sub->add_option("--plot", o->plot, "series: g-graph");
    sub->add_option("--points", o->points, "samples in the g-graph");
    add_common(sub, c);
    h[sub] = [o, &c] { return run_example(*o, c); };
  }
  {
    auto eps = std::make_shared<std::vector<std::string>>();
    auto grid = std::make_shared<int>(0), samples = std::make_shared<int>(512);
    auto* sub = app.add_subcommand("barycentric-failure", "Hull intersection near 0 in the oscillating example");
    sub->add_option("--epsilon", *eps, "epsilon in (0,1] (repeatable)");
    sub->add_option("--grid", *grid, "also run a log grid of this many epsilon values in [1e-3, 1]");
    sub->add_option("--samples", *samples, "g samples per interval");
    add_common(sub, c);
    h[sub] = [eps, grid, samples] { return run_barycentric(*eps, *grid, *samples); };
  }
}

}  // namespace plk::cli
