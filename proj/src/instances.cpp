#include "plk/instances.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "plk/errors.hpp"

namespace plk {

namespace {

Rational q(long n, long d) { return Rational(mpz_class(n), mpz_class(d)); }

// sorted distinct rationals in (0,1) with denominator 64, `count` of them
std::vector<Rational> random_cuts(std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<long> pick(8, 56);
  std::set<long> picked;
  while (static_cast<int>(picked.size()) < count) {
    long v = pick(rng);
    bool spaced = std::all_of(picked.begin(), picked.end(), [v](long w) { return std::abs(w - v) >= 8; });
    if (spaced) picked.insert(v);
  }
  std::vector<Rational> out;
  for (long v : picked) out.push_back(q(v, 64));
  return out;
}

// wave params for output rows; row j: (α_j, β_j) and M random terms with Σ|a| ≤ amp
std::vector<double> wave_params(std::mt19937_64& rng, int k, int n, const std::vector<std::pair<double, double>>& rows,
                                double amp, double freq) {
  const int m = 2;
  std::vector<double> p{static_cast<double>(k), static_cast<double>(n), static_cast<double>(m)};
  std::uniform_real_distribution<double> unit(-1, 1);
  for (int j = 0; j < k; ++j) {
    p.push_back(rows[j].first);
    p.push_back(rows[j].second);
    for (int t = 0; t < m; ++t) {
      p.push_back(amp / m * unit(rng));
      for (int i = 0; i < n; ++i) p.push_back(freq * unit(rng));
      p.push_back(3.14159 * unit(rng));
    }
  }
  return p;
}

// second output row: a positive function unrelated to the sheets
std::vector<std::pair<double, double>> rows_for(int k) {
  std::vector<std::pair<double, double>> rows{{1.0, 0.0}};
  if (k == 2) rows.emplace_back(0.0, 1.0);
  return rows;
}

void check_k(int k) {
  if (k < 1 || k > 2) throw std::invalid_argument("random instances support k = 1 or 2");
}

}  // namespace

LiftInstance random_fold_1d(std::uint64_t seed, int k) {
  check_k(k);
  std::mt19937_64 rng(seed);
  auto cuts = random_cuts(rng, 2);
  std::vector<Rational> qs{Rational(0)};
  qs.insert(qs.end(), cuts.begin(), cuts.end());
  qs.push_back(Rational(1));
  const int m = static_cast<int>(qs.size());
  std::vector<Point> qv, pv;
  std::vector<Simplex> qsx, psx;
  for (const auto& x : qs) qv.push_back(make_point({x}));
  for (int i = 0; i + 1 < m; ++i) qsx.push_back({i, i + 1});
  // P vertices: −q_{m−1} … −q_1, 0, q_1 … q_{m−1}
  std::vector<int> vmap;
  for (int i = m - 1; i >= 1; --i) {
    pv.push_back(make_point({-qs[i]}));
    vmap.push_back(i);
  }
  for (int i = 0; i < m; ++i) {
    pv.push_back(make_point({qs[i]}));
    vmap.push_back(i);
  }
  for (int i = 0; i + 1 < static_cast<int>(pv.size()); ++i) psx.push_back({i, i + 1});
  auto p = std::make_shared<Complex>(pv, psx);
  auto qc = std::make_shared<Complex>(qv, qsx);
  auto g = LiftFunction::from_registry("wave", wave_params(rng, k, 1, rows_for(k), 0.6, 6.0));
  return {"fold1d", SimplicialMap{p, qc, vmap}, g};
}

namespace {

// unit square split by a random interior point into 4 triangles (vertices 0..3 corners, 4 center)
std::pair<std::vector<Point>, std::vector<Simplex>> random_square(std::mt19937_64& rng, const Rational& shift) {
  std::uniform_int_distribution<long> pick(20, 44);
  Rational cx = q(pick(rng), 64), cy = q(pick(rng), 64);
  std::vector<Point> v{make_point({shift, Rational(0)}), make_point({shift + Rational(1), Rational(0)}),
                       make_point({shift + Rational(1), Rational(1)}), make_point({shift, Rational(1)}),
                       make_point({shift + cx, cy})};
  return {v, {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {0, 3, 4}}};
}

}  // namespace

LiftInstance random_sheets_2d(std::uint64_t seed, int k) {
  check_k(k);
  std::mt19937_64 rng(seed);
  auto [qv, qs] = random_square(rng, Rational(0));
  std::vector<Point> pv;
  std::vector<Simplex> ps;
  std::vector<int> vmap;
  for (int sheet = 0; sheet < 2; ++sheet) {
    const int base = static_cast<int>(pv.size());
    for (std::size_t i = 0; i < qv.size(); ++i) {
      Point x = qv[i];
      x(0) += Rational(3 * sheet);
      pv.push_back(x);
      vmap.push_back(static_cast<int>(i));
    }
    for (auto s : qs) {
      for (int& v : s) v += base;
      ps.push_back(s);
    }
  }
  auto p = std::make_shared<Complex>(pv, ps);
  auto qc = std::make_shared<Complex>(qv, qs);
  auto g = LiftFunction::from_registry("wave", wave_params(rng, k, 2, rows_for(k), 0.15, 3.0));
  return {"sheets2d", SimplicialMap{p, qc, vmap}, g};
}

LiftInstance random_fold_2d(std::uint64_t seed, int k) {
  check_k(k);
  std::mt19937_64 rng(seed);
  auto cuts = random_cuts(rng, 1);
  std::vector<Rational> xs{Rational(0), cuts[0], Rational(1)};
  std::vector<Rational> ys{Rational(0), Rational(1)};
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  auto qid = [nx](int i, int j) { return j * nx + i; };
  std::vector<Point> qv;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) qv.push_back(make_point({xs[i], ys[j]}));
  std::vector<Simplex> qs;
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      qs.push_back({qid(i, j), qid(i + 1, j), qid(i + 1, j + 1)});
      qs.push_back({qid(i, j), qid(i, j + 1), qid(i + 1, j + 1)});
    }
  // P: the positive sheet is Q itself; the negative sheet mirrors it, sharing the x = 0 column
  std::vector<Point> pv = qv;
  std::vector<int> vmap(qv.size());
  for (std::size_t i = 0; i < qv.size(); ++i) vmap[i] = static_cast<int>(i);
  std::map<int, int> mirror;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i == 0) {
        mirror[qid(i, j)] = qid(i, j);
        continue;
      }
      mirror[qid(i, j)] = static_cast<int>(pv.size());
      pv.push_back(make_point({-xs[i], ys[j]}));
      vmap.push_back(qid(i, j));
    }
  std::vector<Simplex> ps = qs;
  for (const auto& s : qs) {
    Simplex m;
    for (int v : s) m.push_back(mirror[v]);
    ps.push_back(m);
  }
  auto p = std::make_shared<Complex>(pv, ps);
  auto qc = std::make_shared<Complex>(qv, qs);
  auto g = LiftFunction::from_registry("wave", wave_params(rng, k, 2, rows_for(k), 0.5, 3.0));
  return {"fold2d", SimplicialMap{p, qc, vmap}, g};
}

LiftInstance builtin_instance(const std::string& name, std::uint64_t seed, int k) {
  if (name == "absval") {
    auto inst = example_absval();
    return {"absval", inst.f, inst.g};
  }
  if (name == "fold1d") return random_fold_1d(seed, k);
  if (name == "sheets2d") return random_sheets_2d(seed, k);
  if (name == "fold2d") return random_fold_2d(seed, k);
  throw UnknownBuiltin("unknown builtin instance: " + name);
}

}  // namespace plk
