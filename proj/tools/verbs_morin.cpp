#include <cmath>
#include <memory>
#include <sstream>

#include "cli.hpp"
#include "plk/errors.hpp"
#include "plk/morin.hpp"

namespace plk::cli {

namespace {

using io::to_json;

Point point_of(const std::vector<Rational>& v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p(static_cast<Eigen::Index>(i)) = v[i];
  return p;
}

/// Comma-separated rationals or decimals.
std::vector<double> doubles(const std::string& csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  for (std::string cur; std::getline(in, cur, ',');) {
    if (cur.empty()) continue;
    if (cur.find_first_of(".eE") == std::string::npos) {
      out.push_back(rational(cur).to_double());
      continue;
    }
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(cur, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cur.size()) throw ParseError("bad number \"" + cur + "\"");
    out.push_back(v);
  }
  return out;
}

/// "name" or "name:a,b,c".
std::pair<std::string, std::vector<double>> named(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) return {s, {}};
  return {s.substr(0, colon), doubles(s.substr(colon + 1))};
}

void need_params(const std::string& name, const std::vector<double>& p, std::size_t n) {
  if (p.size() != n) throw UsageError(name + " takes " + std::to_string(n) + " parameters");
}

RealLift real_lift(const std::string& spec) {
  auto [name, p] = named(spec);
  if (name == "identity") return [](double x) { return x; };
  if (name == "negate") return [](double x) { return -x; };
  if (name == "cube") return [](double x) { return x * x * x; };
  if (name == "neg-cube") return [](double x) { return -x * x * x; };
  if (name == "square") return [](double x) { return x * x; };
  if (name == "wave") {
    // e·x + a·sin(w·x + ph)
    need_params(name, p, 4);
    return [p = p](double x) { return p[0] * x + p[1] * std::sin(p[2] * x + p[3]); };
  }
  throw UnknownBuiltin("unknown lift \"" + name + "\" (identity, negate, cube, neg-cube, square, wave:e,a,w,ph)");
}

MorinLift morin_lift(const std::string& spec, int n) {
  auto [name, p] = named(spec);
  if (name == "phi+") return [n](const Vec<double>& v) { return v(n - 1); };
  if (name == "phi-") return [n](const Vec<double>& v) { return -v(n - 1); };
  if (name == "shear") {
    // x + Σ s_j t_j
    if (static_cast<int>(p.size()) > n - 1) throw UsageError("shear takes at most n-1 parameters");
    return [n, p = p](const Vec<double>& v) {
      double s = v(n - 1);
      for (std::size_t j = 0; j < p.size(); ++j) s += p[j] * v(static_cast<Eigen::Index>(j));
      return s;
    };
  }
  throw UnknownBuiltin("unknown lift \"" + name + "\" (phi+, phi-, shear:s1,s2,...)");
}

int parse_sign(const std::string& s) {
  if (s == "+" || s == "1" || s == "+1") return 1;
  if (s == "-" || s == "-1") return -1;
  throw UsageError("sign must be + or -");
}

MorinSpec spec_of(int r, int n, int m) {
  MorinSpec s{r, n, m};
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return s;
}

// ---------------------------------------------------------------- verbs

Json run_chebyshev(int r) {
  if (r < 0) throw UsageError("r must be non-negative");
  Json r_ = io::report("chebyshev");
  r_["exact"] = Json{{"r", r}, {"polynomial", to_json(chebyshev(r))}};
  if (r >= 1) {
    auto cp = critical_points(r);
    Json mx = Json::array(), mn = Json::array();
    for (double v : cp.maxima) mx.push_back(v);
    for (double v : cp.minima) mn.push_back(v);
    r_["numeric"] = Json{{"maxima", mx}, {"minima", mn}};
  }
  return r_;
}

Json run_tau(int r) {
  if (r < 1) throw UsageError("r must be at least 1");
  Json rep = io::report("tau");
  const QPoly t = tau(r);
  rep["exact"] = Json{{"r", r}, {"polynomial", to_json(t)}, {"in_M_r", mr_membership(t, r)}};
  if (!mr_membership(t, r)) fail(rep, "tau is not in M_r");
  return rep;
}

struct MorinOpts {
  int r = 2, n = 2, m = 2;
  std::string sign, point;
};

Json run_morin(const MorinOpts& o) {
  const auto spec = spec_of(o.r, o.n, o.m);
  const auto v = rationals(o.point);
  if (static_cast<int>(v.size()) != spec.n) throw UsageError("--point needs n = " + std::to_string(spec.n) + " entries");
  const Point p = point_of(v);
  Json rep = io::report("morin");
  rep["exact"] = Json{{"r", spec.r}, {"n", spec.n}, {"m", spec.m}, {"point", to_json(p)},
                      {"value", to_json(o.sign.empty() ? morin_eval(spec, p) : morin_lift_eval(spec, parse_sign(o.sign), p))}};
  if (spec.r >= 1) rep["exact"]["P"] = to_json(morin_p(spec, p));
  return rep;
}

struct DeltaOpts {
  int r = 0, count = 16, levels = 64;
  std::string poly, csv, plot;
};

Json run_delta(const DeltaOpts& o, const Common& c) {
  Json rep = io::report("delta");
  std::vector<PolyDoublePoint> dps;
  if (!o.poly.empty()) {
    dps = delta_sample_poly(QPoly(rationals(o.poly)).cast<double>(), o.levels);
  } else {
    if (o.r < 2) throw UsageError("--r must be at least 2 (f_1 has no double points)");
    dps = delta_sample_fr(o.r, o.count, c.need_seed("f_r double points are drawn at random"));
  }
  Json pts = Json::array();
  for (const auto& dp : dps) pts.push_back(to_json(dp));
  rep["exact"] = Json{{"count", dps.size()}, {"double_points", pts}};
  if (!o.plot.empty() || !o.csv.empty()) {
    if (o.plot != "delta") throw UsageError("unknown series \"" + o.plot + "\" (delta offers delta)");
    if (o.csv.empty()) throw UsageError("--plot needs --csv");
    std::vector<std::vector<double>> rows;
    for (const auto& dp : dps)
      rows.push_back({dp.first(dp.first.size() - 1).to_double(), dp.second(dp.second.size() - 1).to_double()});
    write_csv(o.csv, {"x1", "x2"}, rows);
    rep["artifacts"].push_back(o.csv);
  }
  return rep;
}

struct ProductOpts {
  int r = 2, n = 2, m = 2;
  bool forward = false, inverse = false;
  std::string x1, x2, rest, c, unused, first, second;
};

Json coords_json(const ProductCoords& pc) {
  Json rows = Json::array(), un = Json::array();
  for (const auto& row : pc.c) {
    Json jr = Json::array();
    for (const auto& q : row) jr.push_back(to_json(q));
    rows.push_back(jr);
  }
  for (const auto& q : pc.unused) un.push_back(to_json(q));
  return Json{{"base", to_json(pc.base)}, {"c", rows}, {"unused", un}};
}

Json run_product(const ProductOpts& o) {
  const auto spec = spec_of(o.r, o.n, o.m);
  if (spec.r < 2) throw UsageError("--r must be at least 2");
  if (o.forward == o.inverse) throw UsageError("pass exactly one of --forward, --inverse");
  Json rep = io::report("product-coords");
  if (o.forward) {
    ProductCoords pc;
    PolyDoublePoint dp;
    try {
      pc.base = fr_double_point(spec.r, rational(o.x1), rational(o.x2), rationals(o.rest));
      std::istringstream rows(o.c);
      for (std::string row; std::getline(rows, row, ';');) pc.c.push_back(rationals(row));
      pc.unused = rationals(o.unused);
      dp = product_forward(spec, pc);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const auto back = product_inverse(spec, dp);
    rep["exact"] = Json{{"coords", coords_json(pc)}, {"double_point", to_json(dp)},
                        {"round_trip", coords_json(back) == coords_json(pc)}};
    if (coords_json(back) != coords_json(pc)) fail(rep, "inverse does not recover the coordinates");
  } else {
    PolyDoublePoint dp{point_of(rationals(o.first)), point_of(rationals(o.second)), DeltaContext::F_r};
    if (dp.first.size() != spec.n || dp.second.size() != spec.n)
      throw UsageError("--first and --second need n entries");
    try {
      const auto pc = product_inverse(spec, dp);
      rep["exact"] = Json{{"double_point", to_json(dp)}, {"coords", coords_json(pc)}};
    } catch (const std::invalid_argument& e) {
      fail(rep, e.what());
    }
  }
  return rep;
}

struct ConnectOpts {
  std::string poly, x1, x2, csv, plot;
  int steps = 16;
};

Json run_connect(const ConnectOpts& o, const Common& c) {
  const QPoly p(rationals(o.poly));
  const int r = p.degree() - 1;
  Json rep = io::report("connect-tau");
  Stopwatch sw;
  MrPath path;
  try {
    path = connect_to_tau(p, rational(o.x1), rational(o.x2), o.steps);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  rep["timing"]["path"] = sw.lap();
  const double tol = c.tol(1e-10);
  const double drift = path.max_drift(), defect = path.max_membership_defect();
  const RPoly end_err = path.end().poly - tau(r).cast<double>();
  double end_dev = 0;
  for (double v : end_err.coeffs()) end_dev = std::max(end_dev, std::abs(v));
  rep["exact"] = Json{{"r", r}, {"start", to_json(p)}, {"target", to_json(tau(r))}};
  rep["numeric"] = Json{{"max_drift", drift}, {"max_membership_defect", defect}, {"endpoint_deviation", end_dev},
                        {"tolerance", tol}, {"path", to_json(path)}};
  if (drift > tol) fail(rep, "double point drifts apart along the path");
  if (defect > tol) fail(rep, "path leaves M_r");
  if (end_dev > tol) fail(rep, "path does not end at tau");

  if (!o.plot.empty() || !o.csv.empty()) {
    if (o.csv.empty()) throw UsageError("--plot needs --csv");
    std::vector<std::vector<double>> rows;
    std::vector<std::string> header;
    if (o.plot == "roots") {
      header = {"stage", "t"};
      for (int i = 0; i <= r; ++i) header.push_back("root" + std::to_string(i));
      for (std::size_t s = 0; s < path.stages.size(); ++s)
        for (const auto& smp : path.stages[s].samples) {
          if (static_cast<int>(smp.roots.size()) != r + 1) continue;
          std::vector<double> row{double(s), smp.t};
          row.insert(row.end(), smp.roots.begin(), smp.roots.end());
          rows.push_back(std::move(row));
        }
    } else if (o.plot == "double-point") {
      header = {"stage", "t", "x1", "x2"};
      for (std::size_t s = 0; s < path.stages.size(); ++s)
        for (const auto& smp : path.stages[s].samples) rows.push_back({double(s), smp.t, smp.x1, smp.x2});
    } else {
      throw UsageError("unknown series \"" + o.plot + "\" (connect-tau offers roots, double-point)");
    }
    write_csv(o.csv, header, rows);
    rep["artifacts"].push_back(o.csv);
  }
  return rep;
}

Json run_classify(int r, const std::string& lift, int levels) {
  if (r < 1) throw UsageError("r must be at least 1");
  const RealLift g = real_lift(lift);
  Json rep = io::report("classify");
  try {
    const auto s = classify_lift_sign(r, g, levels);
    rep["exact"] = Json{{"r", r}, {"lift", lift}, {"epsilon", s.epsilon}, {"degenerate", s.degenerate}};
    rep["numeric"] = Json{{"pairs", s.pairs}, {"positive", s.positive}, {"negative", s.negative},
                          {"maxima_values", s.maxima_values}, {"minima_values", s.minima_values},
                          {"orderings_checked", s.orderings_checked}};
  } catch (const std::domain_error& e) {
    fail(rep, e.what());
  }
  return rep;
}

struct IsotopyOpts {
  int r = 2, n = 4, m = 5, samples = 50, t_count = 11;
  std::string psi = "phi+", epsilon = "+";
};

Json run_isotopy(const IsotopyOpts& o, const Common& c) {
  const auto spec = spec_of(o.r, o.n, o.m);
  if (spec.r < 1) throw UsageError("r must be at least 1");
  const std::uint64_t seed = c.need_seed("double points of F_r are drawn at random");
  const MorinLift psi = morin_lift(o.psi, spec.n);
  Json rep = io::report("isotopy-check");
  Stopwatch sw;
  IsotopyReport ir;
  try {
    ir = lift_isotopy_check(spec, psi, parse_sign(o.epsilon), o.samples, seed, o.t_count);
  } catch (const std::domain_error& e) {
    fail(rep, e.what());
    return rep;
  }
  rep["timing"]["isotopy"] = sw.lap();
  rep["exact"] = Json{{"r", spec.r}, {"n", spec.n}, {"m", spec.m}, {"psi", o.psi},
                      {"classified_epsilon", ir.epsilon}, {"target_epsilon", ir.target}};
  rep["numeric"] = Json{{"pairs", ir.pairs}, {"t_checked", ir.t_checked}, {"violations", ir.violations}};
  if (ir.witness) {
    auto vec = [](const Vec<double>& v) {
      Json j = Json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
      return j;
    };
    rep["witnesses"].push_back(
        Json{{"numeric", true}, {"t", ir.witness->t}, {"first", vec(ir.witness->first)}, {"second", vec(ir.witness->second)}});
  }
  if (!ir.ok()) fail(rep, "linear isotopy to phi loses injectivity");
  return rep;
}

void spec_options(CLI::App* sub, int& r, int& n, int& m) {
  sub->add_option("--r", r, "r")->required();
  sub->add_option("--n", n, "source dimension")->required();
  sub->add_option("--m", m, "target dimension")->required();
}

}  // namespace

void register_morin_verbs(CLI::App& app, Handlers& h, Common& c) {
  {
    auto r = std::make_shared<int>();
    auto* sub = app.add_subcommand("chebyshev", "Chebyshev polynomial T_r");
    sub->add_option("r", *r, "degree")->required();
    add_common(sub, c);
    h[sub] = [r] { return run_chebyshev(*r); };
  }
  {
    auto r = std::make_shared<int>();
    auto* sub = app.add_subcommand("tau", "The normalized Chebyshev point of M_r");
    sub->add_option("r", *r, "r >= 1")->required();
    add_common(sub, c);
    h[sub] = [r] { return run_tau(*r); };
  }
  {
    auto o = std::make_shared<MorinOpts>();
    auto* sub = app.add_subcommand("morin", "Evaluate F_r, or its lift with --sign");
    spec_options(sub, o->r, o->n, o->m);
    sub->add_option("--sign", o->sign, "+ or -: evaluate the lift");
    sub->add_option("--point", o->point, "t_1,...,t_{n-1},x")->required();
    add_common(sub, c);
    h[sub] = [o] { return run_morin(*o); };
  }
  {
    auto o = std::make_shared<DeltaOpts>();
    auto* sub = app.add_subcommand("delta", "Double points of f_r or of a fixed polynomial");
    sub->add_option("--r", o->r, "sample f_r");
    sub->add_option("--count", o->count, "number of f_r samples");
    sub->add_option("--poly", o->poly, "ascending coefficients of a polynomial");
    sub->add_option("--levels", o->levels, "levels for --poly");
    sub->add_option("--csv", o->csv, "CSV output for --plot");
    sub->add_option("--plot", o->plot, "series: delta");
    add_common(sub, c);
    h[sub] = [o, &c] { return run_delta(*o, c); };
  }
  {
    auto o = std::make_shared<ProductOpts>();
    auto* sub = app.add_subcommand("product-coords", "Product coordinates on the double points of F_r");
    spec_options(sub, o->r, o->n, o->m);
    sub->add_flag("--forward", o->forward, "coordinates to a double point");
    sub->add_flag("--inverse", o->inverse, "double point to coordinates");
    sub->add_option("--x1", o->x1);
    sub->add_option("--x2", o->x2);
    sub->add_option("--rest", o->rest, "t_2,...,t_{r-1} of the f_r double point");
    sub->add_option("--c", o->c, "rows separated by ';', entries by ','");
    sub->add_option("--unused", o->unused, "trailing parameters");
    sub->add_option("--first", o->first, "first point, n entries");
    sub->add_option("--second", o->second, "second point, n entries");
    add_common(sub, c);
    h[sub] = [o] { return run_product(*o); };
  }
  {
    auto o = std::make_shared<ConnectOpts>();
    auto* sub = app.add_subcommand("connect-tau", "Path in M_r to tau carrying a double point");
    sub->add_option("--poly", o->poly, "ascending coefficients of P in M_r")->required();
    sub->add_option("--x1", o->x1)->required();
    sub->add_option("--x2", o->x2)->required();
    sub->add_option("--steps", o->steps, "samples per stage");
    sub->add_option("--csv", o->csv, "CSV output for --plot");
    sub->add_option("--plot", o->plot, "series: roots, double-point");
    add_common(sub, c);
    h[sub] = [o, &c] { return run_connect(*o, c); };
  }
  {
    auto r = std::make_shared<int>(), levels = std::make_shared<int>(64);
    auto lift = std::make_shared<std::string>();
    auto* sub = app.add_subcommand("classify", "Sign of an embedded lift of T_r");
    sub->add_option("--r", *r)->required();
    sub->add_option("--lift", *lift, "identity, negate, cube, neg-cube, square, wave:e,a,w,ph")->required();
    sub->add_option("--levels", *levels, "sampling levels");
    add_common(sub, c);
    h[sub] = [r, lift, levels] { return run_classify(*r, *lift, *levels); };
  }
  {
    auto o = std::make_shared<IsotopyOpts>();
    auto* sub = app.add_subcommand("isotopy-check", "Linear isotopy from a lift of F_r to its model");
    spec_options(sub, o->r, o->n, o->m);
    sub->add_option("--psi", o->psi, "phi+, phi-, shear:s1,...");
    sub->add_option("--epsilon", o->epsilon, "+ or -");
    sub->add_option("--samples", o->samples, "double points");
    sub->add_option("--t-count", o->t_count, "t grid size");
    add_common(sub, c);
    h[sub] = [o, &c] { return run_isotopy(*o, c); };
  }
}

}  // namespace plk::cli
