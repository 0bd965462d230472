#include "mcint/rational.hpp"

#include <cctype>

namespace mcint {

namespace {

bool valid_integer_text(std::string_view s) {
  if (!s.empty() && s.front() == '-') s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational::Rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  value_ = mpq_class(num, den);
  value_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  const std::string_view num_text = text.substr(0, slash);
  if (!valid_integer_text(num_text)) throw ParseError("malformed rational: '" + std::string(text) + "'");
  BigInt num(std::string(num_text), 10);
  if (slash == std::string_view::npos) return Rational(num);

  const std::string_view den_text = text.substr(slash + 1);
  if (!valid_integer_text(den_text) || den_text.front() == '-') {
    throw ParseError("malformed rational: '" + std::string(text) + "'");
  }
  BigInt den(std::string(den_text), 10);
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

Rational Rational::power(const Rational& base, long exp) {
  if (exp == 0) return Rational(1);
  if (exp < 0 && base.is_zero()) throw DomainError("zero to a negative power");
  const unsigned long e = exp < 0 ? static_cast<unsigned long>(-exp) : static_cast<unsigned long>(exp);
  BigInt n, d;
  mpz_pow_ui(n.get_mpz_t(), base.value_.get_num_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), base.value_.get_den_mpz_t(), e);
  return exp < 0 ? Rational(d, n) : Rational(n, d);
}

std::string Rational::str() const {
  if (is_integer()) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

BigInt Rational::floor() const {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  return q;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw DomainError("division by zero");
  value_ /= o.value_;
  return *this;
}

Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

Rational inverse_power(long base, long k) { return Rational::power(Rational(base), -k); }

}  // namespace mcint
