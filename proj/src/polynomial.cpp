#include "plk/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace plk {

namespace {

using cd = std::complex<double>;

cd horner(const std::vector<double>& c, cd z) {
  cd acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double residual(const std::vector<double>& c, const std::vector<cd>& z) {
  double worst = 0;
  for (const auto& zi : z) {
    // relative to the size of the terms, so large roots are not penalized
    double scale = 0, p = 1;
    for (double ci : c) {
      scale += std::abs(ci) * p;
      p *= std::abs(zi);
    }
    worst = std::max(worst, std::abs(horner(c, zi)) / std::max(scale, 1e-300));
  }
  return worst;
}

// Aberth–Ehrlich sweeps; keeps the best iterate by residual.
std::vector<cd> aberth(const std::vector<double>& c, std::vector<cd> z) {
  std::vector<double> dc;
  for (std::size_t i = 1; i < c.size(); ++i) dc.push_back(c[i] * static_cast<double>(i));
  std::vector<cd> best = z;
  double best_res = residual(c, z);
  for (int it = 0; it < 60 && best_res > 1e-16; ++it) {
    double moved = 0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const cd pd = horner(dc, z[k]);
      if (std::abs(pd) == 0) continue;
      const cd w = horner(c, z[k]) / pd;
      cd sum = 0;
      for (std::size_t j = 0; j < z.size(); ++j)
        if (j != k && z[j] != z[k]) sum += 1.0 / (z[k] - z[j]);
      const cd den = 1.0 - w * sum;
      const cd step = std::abs(den) == 0 ? w : w / den;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[k] -= step;
      moved = std::max(moved, std::abs(step) / (1 + std::abs(z[k])));
    }
    const double res = residual(c, z);
    if (res < best_res) {
      best_res = res;
      best = z;
    }
    if (moved < 1e-17) break;
  }
  return best;
}

}  // namespace

std::vector<std::complex<double>> roots(const RPoly& p) {
  if (p.is_zero()) throw std::domain_error("the zero polynomial has no finite root set");
  std::vector<double> c = p.coeffs();
  std::vector<cd> out;
  // exact zeros first
  std::size_t lead_zeros = 0;
  while (lead_zeros < c.size() && c[lead_zeros] == 0) ++lead_zeros;
  out.assign(lead_zeros, cd(0, 0));
  c.erase(c.begin(), c.begin() + static_cast<long>(lead_zeros));
  const int d = static_cast<int>(c.size()) - 1;
  if (d >= 1) {
    const double lead = c.back();
    for (auto& v : c) v /= lead;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -c[i];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("companion eigenvalues did not converge");
    std::vector<cd> z(es.eigenvalues().data(), es.eigenvalues().data() + d);
    z = aberth(c, std::move(z));
    // real coefficients: restore exact conjugate symmetry
    for (auto& zi : z)
      if (std::abs(zi.imag()) <= 1e-14 * (1 + std::abs(zi.real()))) zi.imag(0);
    out.insert(out.end(), z.begin(), z.end());
  }
  std::sort(out.begin(), out.end(), [](const cd& a, const cd& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    if (std::abs(a.imag()) != std::abs(b.imag())) return std::abs(a.imag()) < std::abs(b.imag());
    return a.imag() < b.imag();
  });
  return out;
}

std::vector<double> real_roots(const RPoly& p, double tol) {
  std::vector<double> out;
  for (const auto& z : roots(p))
    if (std::abs(z.imag()) <= tol * (1 + std::abs(z.real()))) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace plk
