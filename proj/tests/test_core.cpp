#include <doctest.h>

#include <numeric>
#include <random>

#include "mcint/enclosure.hpp"
#include "mcint/expansion.hpp"
#include "mcint/rational.hpp"
#include "oracles.hpp"

using namespace mcint;

TEST_CASE("rational arithmetic basics") {
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(4, 6) == Rational(2, 3));
  CHECK(Rational(4, 6).str() == "2/3");
  CHECK(Rational(-4, -6).str() == "2/3");
  CHECK(Rational(3, -6).str() == "-1/2");
  CHECK(Rational(8, 4).str() == "2");
  CHECK(inverse_power(2, 4) * inverse_power(2, 4) == inverse_power(2, 8));
  CHECK(abs(Rational(-3, 7)) == Rational(3, 7));
  CHECK(min(Rational(1, 3), Rational(1, 4)) == Rational(1, 4));
  CHECK(max(Rational(1, 3), Rational(1, 4)) == Rational(1, 3));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK((Rational(2, 3) <=> Rational(4, 6)) == std::strong_ordering::equal);
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK_THROWS_AS(Rational(1) / Rational(0), DomainError);
  CHECK_THROWS_AS(Rational(1, 0), DomainError);
}

TEST_CASE("rational parsing") {
  CHECK(Rational::parse("3/9") == Rational(1, 3));
  CHECK(Rational::parse("-5/10").str() == "-1/2");
  CHECK(Rational::parse("42") == Rational(42));
  CHECK(Rational::parse("123456789012345678901234567890/3").str() == "41152263004115226300411522630");
  for (const char* bad : {"", "/", "1/", "/2", "1/0", "1/-2", "a/b", "1.5", " 1", "1/2/3", "--1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Rational::parse(bad), ParseError);
  }
}

TEST_CASE("addition commutes and canonical forms are unique") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(-100000, 100000);
  std::uniform_int_distribution<long> den(1, 100000);
  for (int i = 0; i < 500; ++i) {
    const long an = num(rng), ad = den(rng), bn = num(rng), bd = den(rng);
    const Rational a(an, ad), b(bn, bd);
    const Rational s = a + b;
    CHECK(s == b + a);
    // Independent canonical form of an/ad + bn/bd via std::gcd.
    long long n = static_cast<long long>(an) * bd + static_cast<long long>(bn) * ad;
    long long d = static_cast<long long>(ad) * bd;
    const long long g = std::gcd(n < 0 ? -n : n, d);
    if (g != 0) { n /= g; d /= g; }
    if (n == 0) d = 1;
    CHECK(s.num() == BigInt(static_cast<long>(n)));
    CHECK(s.den() == BigInt(static_cast<long>(d)));
  }
}

TEST_CASE("base-q expansion examples") {
  auto third = baseq_expand(Rational(1, 3), 3);
  CHECK(third.integer_part == 0);
  CHECK(third.preperiod == std::vector<std::uint8_t>{1});
  CHECK(third.period.empty());

  auto quarter = baseq_expand(Rational(1, 4), 3);
  CHECK(quarter.preperiod.empty());
  CHECK(quarter.period == std::vector<std::uint8_t>{0, 2});

  auto fifth = baseq_expand(Rational(1, 5), 5);
  CHECK(fifth.preperiod == std::vector<std::uint8_t>{1});
  CHECK(fifth.period.empty());

  auto mixed = baseq_expand(Rational(7, 6), 10);
  CHECK(mixed.integer_part == 1);
  CHECK(mixed.preperiod == std::vector<std::uint8_t>{1});
  CHECK(mixed.period == std::vector<std::uint8_t>{6});

  CHECK(baseq_expand(Rational(5), 7).preperiod.empty());
  CHECK(baseq_expand(Rational(5), 7).value() == Rational(5));
}

TEST_CASE("base-q expansion errors") {
  CHECK_THROWS_AS(baseq_expand(Rational(-1, 3), 3), DomainError);
  CHECK_THROWS_AS(baseq_expand(Rational(1, 3), 1), DomainError);
  CHECK_THROWS_AS(baseq_expand(Rational::power(Rational(3), 64), 3), DomainError);
  CHECK_THROWS_AS(baseq_expand(inverse_power(2, 10), 2, 5), BudgetError);
  CHECK_NOTHROW(baseq_expand(inverse_power(2, 10), 2, 10));
  // Period of 1/7 in base 10 has length 6.
  CHECK_THROWS_AS(baseq_expand(Rational(1, 7), 10, 10, 5), BudgetError);
}

TEST_CASE("expansion reconstructs the value exactly") {
  std::mt19937_64 rng(2024);
  for (unsigned base : {2u, 3u, 5u, 10u}) {
    for (int i = 0; i < 200; ++i) {
      const Rational x = oracle::random_unit_fraction(rng, 1'000'000);
      CAPTURE(x.str());
      CAPTURE(base);
      const auto e = baseq_expand(x, base);
      CHECK(e.value() == x);
      if (e.terminating() && !e.preperiod.empty()) CHECK(e.preperiod.back() != 0);
    }
  }
}

TEST_CASE("expansion digits match an independent long division") {
  std::mt19937_64 rng(77);
  for (unsigned base : {2u, 3u, 5u, 10u}) {
    for (int i = 0; i < 200; ++i) {
      const Rational x = oracle::random_unit_fraction(rng, 20'000);
      CAPTURE(x.str());
      const auto e = baseq_expand(x, base);
      const auto ref = oracle::long_division(x.num().get_si(), x.den().get_si(), static_cast<int>(base));
      CHECK(std::vector<int>(e.preperiod.begin(), e.preperiod.end()) == ref.pre);
      CHECK(std::vector<int>(e.period.begin(), e.period.end()) == ref.period);
    }
  }
}

TEST_CASE("word-size and multiprecision long division agree") {
  // 2^70 * 7 does not fit a machine word, forcing the GMP route.
  const Rational big = Rational(BigInt(3), BigInt(7) << 70);
  const auto e = baseq_expand(big, 2);
  CHECK(e.preperiod.size() == 70);  // 3/7 = 0.(011) in base 2
  CHECK(e.period.size() == 3);
  CHECK(e.value() == big);
  const auto small = baseq_expand(Rational(3, 7), 2);
  CHECK(std::equal(small.period.begin(), small.period.end(), e.period.begin()));
}

TEST_CASE("large terminating expansions take the fast path consistently") {
  // 1234567/3^80 has an 80 digit terminating base-3 expansion.
  const Rational x = Rational(1234567) * inverse_power(3, 80);
  const auto e = baseq_expand(x, 3);
  CHECK(e.terminating());
  CHECK(e.preperiod.size() == 80);
  CHECK(e.value() == x);
  // Base above 36 exercises GMP's mixed-case digit alphabet.
  const Rational y = Rational(61 * 62 + 37, 62 * 62);
  const auto f = baseq_expand(y, 62);
  CHECK(f.preperiod == std::vector<std::uint8_t>{61, 37});
}

TEST_CASE("digit cursor") {
  DigitCursor c(Rational(1, 4), 3);
  CHECK(c.next() == 0);
  CHECK(c.next() == 2);
  CHECK(c.next() == 0);
  CHECK_FALSE(c.remainder_is_zero());
  DigitCursor t(Rational(2, 9), 3);
  CHECK(t.next() == 0);
  CHECK(t.next() == 2);
  CHECK(t.remainder_is_zero());
  CHECK_THROWS_AS(DigitCursor(Rational(1), 3), DomainError);
}

TEST_CASE("enclosure arithmetic examples") {
  const Enclosure a(Rational(1, 4), Rational(1, 3));
  const Enclosure b(Rational(0), Rational(1, 9));
  CHECK(a + b == Enclosure(Rational(1, 4), Rational(4, 9)));
  CHECK(abs(Enclosure(Rational(-1, 8), Rational(1, 16))) == Enclosure(Rational(0), Rational(1, 8)));
  CHECK(abs(Enclosure(Rational(-1, 2), Rational(-1, 3))) == Enclosure(Rational(1, 3), Rational(1, 2)));
  CHECK(Enclosure(Rational(23, 108), Rational(25, 108)).width() == Rational(1, 54));
  CHECK(a - b == Enclosure(Rational(1, 4) - Rational(1, 9), Rational(1, 3)));
  CHECK_THROWS_AS(Enclosure(Rational(1), Rational(0)), DomainError);
  CHECK_THROWS_AS(a.intersect(Enclosure(Rational(1), Rational(2))), DomainError);
}

TEST_CASE("enclosure operations are inclusion-monotone") {
  std::mt19937_64 rng(99);
  auto rnd = [&] { return Rational(static_cast<long>(rng() % 2001) - 1000, static_cast<long>(rng() % 97 + 1)); };
  auto widen = [&](const Enclosure& e) {
    return Enclosure(e.lo() - abs(rnd()), e.hi() + abs(rnd()));
  };
  for (int i = 0; i < 300; ++i) {
    Rational p = rnd(), q = rnd(), r = rnd(), s = rnd();
    const Enclosure a(min(p, q), max(p, q));
    const Enclosure b(min(r, s), max(r, s));
    const Enclosure a2 = widen(a), b2 = widen(b);
    CHECK(a2.contains(a));
    CHECK((a2 + b2).contains(a + b));
    CHECK((a2 - b2).contains(a - b));
    CHECK(abs(a2).contains(abs(a)));
    CHECK(a2.width() >= a.width());
    // Point images stay inside.
    CHECK((a + b).contains(a.lo() + b.hi()));
    CHECK(abs(a).contains(abs(a.lo())));
  }
}
