#include "plk/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace plk {

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("rational division by zero");
  q_ /= o.q_;
  return *this;
}

Rational Rational::from_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite value cannot be made rational");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), v);
  return Rational(q);
}

Rational Rational::snap(double v, unsigned bits) {
  Rational exact = from_double(v);
  mpz_class bound = mpz_class(1) << bits;
  if (exact.den() <= bound) return exact;
  // round(v * 2^bits) / 2^bits
  mpq_class scaled = exact.raw() * mpq_class(bound);
  mpz_class twice = (scaled.get_num() * 2 + (sgn(scaled) >= 0 ? scaled.get_den() : -scaled.get_den()));
  mpz_class rounded;
  mpz_tdiv_q(rounded.get_mpz_t(), twice.get_mpz_t(), mpz_class(scaled.get_den() * 2).get_mpz_t());
  return Rational(rounded, bound);
}

Rational Rational::parse(std::string_view s) {
  std::string text(s);
  auto trim = [](std::string& t) {
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  };
  trim(text);
  if (text.empty()) throw std::invalid_argument("empty rational");
  auto slash = text.find('/');
  mpz_class num, den(1);
  auto parse_int = [](const std::string& part, mpz_class& out) {
    if (part.empty()) return false;
    std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
    if (i == part.size()) return false;
    for (std::size_t j = i; j < part.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(part[j]))) return false;
    return out.set_str(part[0] == '+' ? part.substr(1) : part, 10) == 0;
  };
  if (slash == std::string::npos) {
    if (!parse_int(text, num)) throw std::invalid_argument("malformed rational: " + text);
  } else {
    if (!parse_int(text.substr(0, slash), num) || !parse_int(text.substr(slash + 1), den))
      throw std::invalid_argument("malformed rational: " + text);
    if (den == 0) throw std::invalid_argument("zero denominator: " + text);
  }
  return Rational(num, den);
}

std::string Rational::str() const {
  if (q_.get_den() == 1) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::size_t hash_value(const Rational& r) {
  return std::hash<std::string>{}(r.str());
}

}  // namespace plk
