#include "mcint/expansion.hpp"

#include <algorithm>
#include <string>

namespace mcint {

namespace {

BigInt pow_ui(unsigned base, std::size_t e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

// Least n0 with den1 | base^n0, where den1 is the part of den built from
// primes dividing base: max over p of ceil(v_p(den) / v_p(base)). Leaves the
// cofactor coprime to base in `den`.
std::size_t strip_preperiod(BigInt& den, unsigned base) {
  std::size_t n0 = 0;
  unsigned rest = base;
  for (unsigned p = 2; rest > 1; ++p) {
    unsigned e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    if (e == 0) continue;
    const BigInt prime = p;
    const std::size_t v = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), prime.get_mpz_t());
    n0 = std::max(n0, (v + e - 1) / e);
  }
  return n0;
}

}  // namespace

BigInt digits_to_integer(const std::vector<std::uint8_t>& digits, unsigned base) {
  if (digits.empty()) return 0;
  // mpz_set_str converts long strings in subquadratic time.
  static constexpr char kLow[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  static constexpr char kHigh[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
  const char* alphabet = base <= 36 ? kLow : kHigh;
  std::string s(digits.size(), '0');
  for (std::size_t i = 0; i < digits.size(); ++i) s[i] = alphabet[digits[i]];
  BigInt v;
  mpz_set_str(v.get_mpz_t(), s.c_str(), static_cast<int>(base));
  return v;
}

Rational DigitExpansion::value() const {
  Rational v(integer_part);
  const std::size_t n0 = preperiod.size();
  if (n0 > 0) v += Rational(digits_to_integer(preperiod, base), pow_ui(base, n0));
  if (!period.empty()) {
    const BigInt rep = digits_to_integer(period, base);
    const BigInt denom = (pow_ui(base, period.size()) - 1) * pow_ui(base, n0);
    v += Rational(rep, denom);
  }
  return v;
}

DigitExpansion baseq_expand(const Rational& x, unsigned base, std::size_t max_preperiod,
                            std::size_t max_period) {
  if (base < 2 || base > 62) throw DomainError("expansion base must lie in [2, 62]");
  if (x.sign() < 0) throw DomainError("cannot expand a negative value: " + x.str());
  if (x >= Rational::power(Rational(static_cast<long>(base)), 64)) {
    throw DomainError("value too large to expand: " + x.str());
  }
  if (max_preperiod < 1) throw DomainError("max_preperiod must be at least 1");

  DigitExpansion out;
  out.base = base;
  out.integer_part = x.floor();
  const BigInt den = x.den();
  BigInt rem = x.num() - out.integer_part * den;
  if (rem == 0) return out;

  BigInt coprime = den;
  const std::size_t n0 = strip_preperiod(coprime, base);
  if (n0 > max_preperiod) {
    throw BudgetError("preperiod of " + std::to_string(n0) + " digits exceeds the limit of " +
                      std::to_string(max_preperiod));
  }

  // Preperiod in one division: the digits of rem * base^n0 / den.
  BigInt scaled = rem * pow_ui(base, n0);
  BigInt lead;
  mpz_fdiv_qr(lead.get_mpz_t(), rem.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  if (n0 > 0) {
    std::string s = lead.get_str(static_cast<int>(base));
    if (s.size() < n0) s.insert(0, n0 - s.size(), '0');
    out.preperiod.reserve(n0);
    for (char c : s) {
      unsigned d;
      if (c >= '0' && c <= '9') d = static_cast<unsigned>(c - '0');
      else if (c >= 'A' && c <= 'Z') d = static_cast<unsigned>(c - 'A' + 10);
      // GMP writes lowercase for 10..35 up to base 36 and for 36..61 above it.
      else d = static_cast<unsigned>(c - 'a' + (base > 36 ? 36 : 10));
      out.preperiod.push_back(static_cast<std::uint8_t>(d));
    }
  }
  if (coprime == 1) return out;

  // What is left is purely periodic with denominator `coprime`.
  const Rational tail(rem, den);
  const BigInt& pden = tail.den();
  if (pden.fits_ulong_p()) {
    // Same long division on machine words; remainders stay below pden.
    const unsigned long d64 = pden.get_ui();
    unsigned long r = tail.num().get_ui();
    const unsigned long start = r;
    do {
      if (out.period.size() >= max_period) {
        throw BudgetError("period exceeds the limit of " + std::to_string(max_period) + " digits");
      }
      const unsigned __int128 t = static_cast<unsigned __int128>(r) * base;
      r = static_cast<unsigned long>(t % d64);
      out.period.push_back(static_cast<std::uint8_t>(t / d64));
    } while (r != start);
    return out;
  }

  BigInt r = tail.num();
  BigInt digit;
  const BigInt start = r;
  do {
    if (out.period.size() >= max_period) {
      throw BudgetError("period exceeds the limit of " + std::to_string(max_period) + " digits");
    }
    r *= base;
    mpz_fdiv_qr(digit.get_mpz_t(), r.get_mpz_t(), r.get_mpz_t(), pden.get_mpz_t());
    out.period.push_back(static_cast<std::uint8_t>(digit.get_ui()));
  } while (r != start);
  return out;
}

DigitCursor::DigitCursor(const Rational& fraction, unsigned base)
    : base_(base), numerator_(fraction.num()), denominator_(fraction.den()) {
  if (fraction.sign() < 0 || fraction >= Rational(1)) {
    throw DomainError("digit cursor needs a value in [0,1), got " + fraction.str());
  }
}

unsigned DigitCursor::next() {
  numerator_ *= base_;
  BigInt digit;
  mpz_fdiv_qr(digit.get_mpz_t(), numerator_.get_mpz_t(), numerator_.get_mpz_t(),
              denominator_.get_mpz_t());
  return static_cast<unsigned>(digit.get_ui());
}

}  // namespace mcint
