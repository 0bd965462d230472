#include "mcint/cantor.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <string>

namespace mcint {

namespace {

BigInt pow_ui(unsigned long base, unsigned long e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

constexpr int kPrefixDigits = 64;

std::vector<std::uint8_t> halved(const std::vector<std::uint8_t>& digits) {
  std::vector<std::uint8_t> h(digits.size());
  std::transform(digits.begin(), digits.end(), h.begin(), [](std::uint8_t d) { return d / 2; });
  return h;
}

void require_unit_interval(const Rational& x) {
  if (x.sign() < 0 || x > Rational(1)) throw DomainError("point outside [0,1]: " + x.str());
}

}  // namespace

std::size_t default_interval_budget() {
  static const std::size_t budget = [] {
    if (const char* env = std::getenv("MCINT_MAX_INTERVALS")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::size_t{1'000'000};
  }();
  return budget;
}

struct CantorSystem::LevelCache {
  std::mutex mu;
  std::vector<std::shared_ptr<const std::vector<NodeInterval>>> levels;
};

CantorSystem::CantorSystem(unsigned q, std::size_t max_intervals)
    : q_(q), budget_(max_intervals), cache_(std::make_shared<LevelCache>()) {
  if (q < 3 || q % 2 == 0 || q > 61) throw DomainError("Cantor base must be odd and in [3, 61]");
}

void CantorSystem::check_count(int k, const BigInt& count, const char* what) const {
  if (count > BigInt(static_cast<unsigned long>(budget_))) {
    throw BudgetError(std::string(what) + " at level " + std::to_string(k) + " has " +
                      count.get_str() + " intervals, over the budget of " + std::to_string(budget_));
  }
}

NodeInterval CantorSystem::node_from_path(std::vector<std::uint32_t> path) const {
  BigInt left_num = 0;
  for (auto idx : path) {
    if (idx > m()) throw DomainError("child index out of range");
    left_num = left_num * q_ + 2 * idx;
  }
  const int k = static_cast<int>(path.size());
  NodeInterval node;
  node.level = k;
  node.left = Rational(left_num, pow_ui(q_, k));
  node.right = node.left + length(k);
  node.path = std::move(path);
  return node;
}

std::shared_ptr<const std::vector<NodeInterval>> CantorSystem::nodes(int k) const {
  if (k < 0) throw DomainError("level must be nonnegative");
  check_count(k, pow_ui(m() + 1, k), "C_k");

  std::lock_guard lock(cache_->mu);
  auto& levels = cache_->levels;
  if (levels.empty()) {
    levels.push_back(std::make_shared<const std::vector<NodeInterval>>(
        std::vector<NodeInterval>{NodeInterval{0, {}, Rational(0), Rational(1)}}));
  }
  while (static_cast<int>(levels.size()) <= k) {
    const int level = static_cast<int>(levels.size());
    const auto& parent = *levels.back();
    const Rational child_len = length(level);
    std::vector<NodeInterval> next;
    next.reserve(parent.size() * (m() + 1));
    for (const auto& p : parent) {
      for (unsigned j = 0; j < q_; j += 2) {
        NodeInterval c;
        c.level = level;
        c.path = p.path;
        c.path.push_back(j / 2);
        c.left = p.left + Rational(static_cast<long>(j)) * child_len;
        c.right = c.left + child_len;
        next.push_back(std::move(c));
      }
    }
    levels.push_back(std::make_shared<const std::vector<NodeInterval>>(std::move(next)));
  }
  return levels[static_cast<std::size_t>(k)];
}

std::vector<GapInterval> CantorSystem::gaps(int k) const {
  if (k < 1) throw DomainError("gap level must be at least 1");
  check_count(k, m() * pow_ui(m() + 1, k - 1), "R_k");
  const auto parents = nodes(k - 1);
  const Rational len = length(k);
  std::vector<GapInterval> out;
  out.reserve(parents->size() * m());
  for (const auto& p : *parents) {
    for (unsigned j = 1; j < q_; j += 2) {
      const Rational left = p.left + Rational(static_cast<long>(j)) * len;
      out.push_back(GapInterval{k, left, left + len});
    }
  }
  return out;
}

Located CantorSystem::locate(const Rational& x, int max_depth) const {
  if (max_depth < 1) throw DomainError("max_depth must be at least 1");
  if (x.sign() < 0 || x > Rational(1)) return Outside{};
  std::vector<std::uint32_t> path;
  path.reserve(static_cast<std::size_t>(max_depth));
  if (x == Rational(1)) {
    path.assign(static_cast<std::size_t>(max_depth), m());
    return InNodeToDepth{node_from_path(std::move(path)), max_depth};
  }
  DigitCursor cur(x, q_);
  BigInt left_num = 0;
  for (int i = 1; i <= max_depth; ++i) {
    const unsigned d = cur.next();
    if (d % 2 == 1) {
      if (cur.remainder_is_zero()) {
        // Left end of a gap, i.e. right end of the even child before it.
        path.push_back((d - 1) / 2);
        path.resize(static_cast<std::size_t>(max_depth), m());
        return InNodeToDepth{node_from_path(std::move(path)), max_depth};
      }
      const Rational left(left_num * q_ + d, pow_ui(q_, i));
      return InGap{GapInterval{i, left, left + length(i)}};
    }
    left_num = left_num * q_ + d;
    path.push_back(d / 2);
  }
  return InNodeToDepth{node_from_path(std::move(path)), max_depth};
}

Membership CantorSystem::classify(const Rational& x) const {
  require_unit_interval(x);
  Membership out;
  if (x == Rational(1)) {
    out.in_set = true;
    out.psi = Rational(1);
    return out;
  }
  const unsigned b = m() + 1;

  // Most points meet an odd digit or end within a few digits; stream those
  // before paying for full period detection.
  {
    DigitCursor cur(x, q_);
    std::vector<std::uint8_t> lead;
    for (int i = 1; i <= kPrefixDigits; ++i) {
      const unsigned d = cur.next();
      if (d % 2 == 1) {
        out.psi = Rational(digits_to_integer(halved(lead), b) * b + (d + 1) / 2, pow_ui(b, i));
        lead.push_back(static_cast<std::uint8_t>(d));
        if (cur.remainder_is_zero()) {
          out.in_set = true;
        } else {
          const Rational left(digits_to_integer(lead, q_), pow_ui(q_, i));
          out.gap = GapInterval{i, left, left + length(i)};
        }
        return out;
      }
      lead.push_back(static_cast<std::uint8_t>(d));
      if (cur.remainder_is_zero()) {
        out.in_set = true;
        out.psi = Rational(digits_to_integer(halved(lead), b), pow_ui(b, i));
        return out;
      }
    }
  }

  const DigitExpansion e = baseq_expand(x, q_);
  const std::size_t n0 = e.preperiod.size();

  // First odd digit, scanning the preperiod then one copy of the period.
  std::vector<std::uint8_t> digits = e.preperiod;
  digits.insert(digits.end(), e.period.begin(), e.period.end());
  const auto odd = std::find_if(digits.begin(), digits.end(), [](std::uint8_t d) { return d % 2 == 1; });
  if (odd != digits.end()) {
    const std::size_t pos = static_cast<std::size_t>(odd - digits.begin()) + 1;
    const unsigned d = *odd;
    const BigInt prefix = digits_to_integer(halved({digits.begin(), odd}), b);
    out.psi = Rational(prefix * b + (d + 1) / 2, pow_ui(b, pos));
    if (e.terminating() && pos == n0) {
      // Last digit odd: x is the left end of a gap, which lies in the set.
      out.in_set = true;
    } else {
      const int level = static_cast<int>(pos);
      std::vector<std::uint8_t> lead(digits.begin(), odd + 1);
      const Rational left(digits_to_integer(lead, q_), pow_ui(q_, pos));
      out.gap = GapInterval{level, left, left + length(level)};
    }
    return out;
  }

  out.in_set = true;
  out.psi = Rational(digits_to_integer(halved(e.preperiod), b), pow_ui(b, n0));
  if (!e.period.empty()) {
    const BigInt per_num = digits_to_integer(halved(e.period), b);
    const BigInt denom = (pow_ui(b, e.period.size()) - 1) * pow_ui(b, n0);
    out.psi += Rational(per_num, denom);
  }
  return out;
}

bool CantorSystem::contains(const Rational& x) const {
  if (x.sign() < 0 || x > Rational(1)) return false;
  return classify(x).in_set;
}

Rational CantorSystem::psi(const Rational& x) const { return classify(x).psi; }

Rational CantorSystem::psi_extended(const Rational& x) const {
  if (x.sign() <= 0) return Rational(0);
  if (x >= Rational(1)) return Rational(1);
  return psi(x);
}

Rational CantorSystem::psi_level(const Rational& x, int depth) const {
  require_unit_interval(x);
  if (depth < 0) throw DomainError("depth must be nonnegative");
  if (x == Rational(1)) return Rational(1);
  const unsigned b = m() + 1;
  DigitCursor cur(x, q_);
  BigInt num = 0;
  for (int i = 1; i <= depth; ++i) {
    const unsigned d = cur.next();
    if (d % 2 == 1) return Rational(num * b + (d + 1) / 2, pow_ui(b, i));
    num = num * b + d / 2;
  }
  return (Rational(num) + cur.remainder()) * inverse_power(b, depth);
}

Enclosure CantorSystem::psi_enclose(const Rational& x, int depth) const {
  require_unit_interval(x);
  if (depth < 1) throw DomainError("depth must be at least 1");
  if (x.is_zero() || x == Rational(1)) return Enclosure(x);
  const unsigned b = m() + 1;
  DigitCursor cur(x, q_);
  BigInt num = 0;
  for (int i = 1; i <= depth; ++i) {
    const unsigned d = cur.next();
    if (d % 2 == 1) return Enclosure(Rational(num * b + (d + 1) / 2, pow_ui(b, i)));
    num = num * b + d / 2;
    if (cur.remainder_is_zero()) return Enclosure(Rational(num, pow_ui(b, i)));
  }
  const Rational tail = inverse_power(b, depth);
  const Rational level_value = (Rational(num) + cur.remainder()) * tail;
  return {max(Rational(0), level_value - tail), min(Rational(1), level_value + tail)};
}

BigInt CantorSystem::count_gaps_within(int k, const Rational& lo, const Rational& hi) const {
  if (k < 1) throw DomainError("gap level must be at least 1");
  const unsigned b = m() + 1;
  std::function<BigInt(int, const Rational&)> walk = [&](int p, const Rational& left) -> BigInt {
    const Rational len = length(p);
    const Rational right = left + len;
    if (right <= lo || left >= hi) return 0;
    if (lo <= left && right <= hi) return m() * pow_ui(b, static_cast<unsigned long>(k - p - 1));
    const Rational child = len / Rational(static_cast<long>(q_));
    BigInt total = 0;
    if (p == k - 1) {
      for (unsigned j = 1; j < q_; j += 2) {
        const Rational gl = left + Rational(static_cast<long>(j)) * child;
        if (lo <= gl && gl + child <= hi) total += 1;
      }
      return total;
    }
    for (unsigned j = 0; j < q_; j += 2) total += walk(p + 1, left + Rational(static_cast<long>(j)) * child);
    return total;
  };
  return walk(0, Rational(0));
}

std::vector<Rational> node_endpoints(const CantorSystem& sys, int max_level) {
  const auto level = sys.nodes(max_level);
  std::vector<Rational> pts;
  pts.reserve(level->size() * 2);
  for (const auto& n : *level) {
    pts.push_back(n.left);
    pts.push_back(n.right);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<Rational> gap_endpoints(const CantorSystem& sys, int max_level) {
  std::vector<Rational> pts;
  for (int k = 1; k <= max_level; ++k) {
    for (const auto& g : sys.gaps(k)) {
      pts.push_back(g.left);
      pts.push_back(g.right);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace mcint
