#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "mcint/rational.hpp"

namespace mcint {

/// Eventually periodic base-b expansion of a nonnegative rational:
/// integer_part . preperiod (period)(period)...
///
/// Terminating values are stored with an empty period and no trailing zeros,
/// so a value with two expansions always carries the terminating one.
struct DigitExpansion {
  unsigned base = 10;
  BigInt integer_part;
  std::vector<std::uint8_t> preperiod;
  std::vector<std::uint8_t> period;

  bool terminating() const { return period.empty(); }
  /// Exact value (finite sum plus the geometric period sum).
  Rational value() const;

  friend bool operator==(const DigitExpansion&, const DigitExpansion&) = default;
};

/// Integer whose base-b digits (most significant first) are `digits`.
BigInt digits_to_integer(const std::vector<std::uint8_t>& digits, unsigned base);

inline constexpr std::size_t kDefaultMaxPreperiod = std::size_t{1} << 20;
inline constexpr std::size_t kDefaultMaxPeriod = std::size_t{1} << 22;

/// Exact expansion of x in the given base (2..62) by long division, period
/// detected from remainder cycling.
///
/// Requires 0 <= x < base^64. Throws BudgetError when the preperiod would
/// exceed `max_preperiod` digits or the period `max_period` digits.
DigitExpansion baseq_expand(const Rational& x, unsigned base,
                            std::size_t max_preperiod = kDefaultMaxPreperiod,
                            std::size_t max_period = kDefaultMaxPeriod);

/// Streams base-b digits of a value in [0,1) without period detection.
/// Each call to next() yields the following digit; remainder_is_zero()
/// reports whether every later digit is 0.
class DigitCursor {
 public:
  DigitCursor(const Rational& fraction, unsigned base);

  unsigned next();
  bool remainder_is_zero() const { return numerator_ == 0; }
  /// Remaining tail as a value in [0,1).
  Rational remainder() const { return Rational(numerator_, denominator_); }

 private:
  unsigned base_;
  BigInt numerator_;
  BigInt denominator_;
};

}  // namespace mcint
