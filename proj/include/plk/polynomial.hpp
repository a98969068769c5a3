#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include "plk/rational.hpp"

namespace plk {

/// Dense univariate polynomial, coefficients in ascending order. Trailing
/// zeros are trimmed, so the zero polynomial has no coefficients.
template <typename Scalar>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Polynomial monomial(int degree, Scalar coeff = Scalar(1)) {
    std::vector<Scalar> c(degree + 1, Scalar(0));
    c[degree] = coeff;
    return Polynomial(std::move(c));
  }
  static Polynomial constant(Scalar v) { return Polynomial(std::vector<Scalar>{v}); }
  /// (x − root)
  static Polynomial linear_factor(Scalar root) { return Polynomial(std::vector<Scalar>{-root, Scalar(1)}); }

  [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }  // −1 for zero
  [[nodiscard]] bool is_zero() const { return c_.empty(); }
  [[nodiscard]] const std::vector<Scalar>& coeffs() const { return c_; }
  /// Coefficient at x^i (zero past the degree).
  [[nodiscard]] Scalar operator[](int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : Scalar(0); }
  [[nodiscard]] Scalar leading() const { return c_.empty() ? Scalar(0) : c_.back(); }

  template <typename X>
  [[nodiscard]] X operator()(const X& x) const {
    X acc = X(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + X(*it);
    return acc;
  }

  [[nodiscard]] Polynomial derivative() const {
    std::vector<Scalar> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * Scalar(static_cast<long>(i)));
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Scalar> c(std::max(a.c_.size(), b.c_.size()), Scalar(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a) {
    std::vector<Scalar> c = a.c_;
    for (auto& v : c) v = -v;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Scalar> c(a.c_.size() + b.c_.size() - 1, Scalar(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const Scalar& s, const Polynomial& a) {
    std::vector<Scalar> c = a.c_;
    for (auto& v : c) v = s * v;
    return Polynomial(std::move(c));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  /// Long division: *this = q·d + r with deg r < deg d.
  [[nodiscard]] std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Scalar> rem = c_;
    const int dd = d.degree();
    if (degree() < dd) return {Polynomial(), *this};
    std::vector<Scalar> q(degree() - dd + 1, Scalar(0));
    for (int i = degree(); i >= dd; --i) {
      Scalar f = rem[i] / d.c_[dd];
      q[i - dd] = f;
      for (int j = 0; j <= dd; ++j) rem[i - dd + j] -= f * d.c_[j];
    }
    rem.resize(dd);
    return {Polynomial(std::move(q)), Polynomial(std::move(rem))};
  }

  template <typename Other>
  [[nodiscard]] Polynomial<Other> cast() const {
    std::vector<Other> c;
    for (const auto& v : c_) {
      if constexpr (std::is_same_v<Scalar, Rational> && std::is_same_v<Other, double>)
        c.push_back(v.to_double());
      else if constexpr (std::is_same_v<Scalar, double> && std::is_same_v<Other, Rational>)
        c.push_back(Rational::from_double(v));
      else
        c.push_back(static_cast<Other>(v));
    }
    return Polynomial<Other>(std::move(c));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == Scalar(0)) c_.pop_back();
  }
  std::vector<Scalar> c_;
};

using QPoly = Polynomial<Rational>;
using RPoly = Polynomial<double>;

/// All complex roots (with multiplicity): companion-matrix eigenvalues refined
/// by Aberth iteration. Sorted by (real part, |imaginary part|, imaginary part).
std::vector<std::complex<double>> roots(const RPoly& p);

/// Real roots (|imaginary part| ≤ tol·scale), ascending.
std::vector<double> real_roots(const RPoly& p, double tol = 1e-9);

}  // namespace plk
