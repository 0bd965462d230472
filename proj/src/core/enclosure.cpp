#include "mcint/enclosure.hpp"

namespace mcint {

Enclosure::Enclosure(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (hi_ < lo_) throw DomainError("enclosure with lo > hi: " + lo_.str() + " > " + hi_.str());
}

Enclosure Enclosure::intersect(const Enclosure& o) const {
  return {max(lo_, o.lo_), min(hi_, o.hi_)};
}

Enclosure abs(const Enclosure& e) {
  if (e.lo().sign() >= 0) return e;
  if (e.hi().sign() <= 0) return {-e.hi(), -e.lo()};
  return {Rational(0), max(-e.lo(), e.hi())};
}

}  // namespace mcint
