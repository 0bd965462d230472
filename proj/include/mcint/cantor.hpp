#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "mcint/enclosure.hpp"
#include "mcint/expansion.hpp"
#include "mcint/rational.hpp"

namespace mcint {

/// Maximum number of intervals a single level enumeration may produce.
/// Read once from MCINT_MAX_INTERVALS, default 10^6.
std::size_t default_interval_budget();

/// Closed interval of C_k. `path[j]` is the child index (0..m) taken at
/// level j+1, i.e. the base-q digit 2*path[j].
struct NodeInterval {
  int level = 0;
  std::vector<std::uint32_t> path;
  Rational left;
  Rational right;

  friend bool operator==(const NodeInterval&, const NodeInterval&) = default;
};

/// Open interval removed at level k (a component of C_{k-1} \ C_k).
struct GapInterval {
  int level = 0;
  Rational left;
  Rational right;

  Rational length() const { return right - left; }
  friend bool operator==(const GapInterval&, const GapInterval&) = default;
};

struct Outside {};
struct InGap {
  GapInterval gap;
};
/// x lies in C_depth; membership deeper than `depth` was not probed.
struct InNodeToDepth {
  NodeInterval node;
  int depth = 0;
};
using Located = std::variant<Outside, InGap, InNodeToDepth>;

/// Where an exact rational sits relative to the Cantor set, found from its
/// full base-q expansion.
struct Membership {
  bool in_set = false;
  /// Valid when !in_set: the gap containing x.
  GapInterval gap;
  /// Exact psi(x).
  Rational psi;
};

/// Base-q Cantor construction (q = 2m+1 odd): C_0 = [0,1], each closed
/// interval keeps its even-indexed q-ths and loses the odd-indexed ones.
///
/// Copies share one level cache. Reads are safe from any thread; the cache
/// fill is guarded and idempotent.
class CantorSystem {
 public:
  explicit CantorSystem(unsigned q, std::size_t max_intervals = default_interval_budget());

  unsigned q() const { return q_; }
  unsigned m() const { return (q_ - 1) / 2; }
  std::size_t budget() const { return budget_; }

  /// q^{-k}, the common length of C_k intervals and R_k gaps.
  Rational length(int k) const { return inverse_power(q_, k); }

  /// C_k, sorted by left endpoint. Throws BudgetError past the budget.
  std::shared_ptr<const std::vector<NodeInterval>> nodes(int k) const;
  /// R_k for k >= 1, sorted by left endpoint.
  std::vector<GapInterval> gaps(int k) const;

  /// Digit walk to `max_depth`; endpoints of C_k intervals count as members.
  Located locate(const Rational& x, int max_depth) const;

  /// Exact classification of x in [0,1] from its eventually periodic expansion.
  Membership classify(const Rational& x) const;
  bool contains(const Rational& x) const;

  /// Exact Cantor function value; x must lie in [0,1].
  Rational psi(const Rational& x) const;
  /// Exact psi extended by 0 left of 0 and 1 right of 1.
  Rational psi_extended(const Rational& x) const;

  /// psi_depth(x) (the normalized C_depth measure left of x) widened by the
  /// tail (m+1)^{-depth} and clipped to [0,1]. Points whose value is already
  /// decided within `depth` digits (gaps of level <= depth, C_j endpoints
  /// with j <= depth, and 0, 1) get the exact point enclosure.
  Enclosure psi_enclose(const Rational& x, int depth) const;

  /// Unclipped psi_depth(x) for x in [0,1].
  Rational psi_level(const Rational& x, int depth) const;

  /// Number of R_k gaps J with lo <= inf J and sup J <= hi.
  BigInt count_gaps_within(int k, const Rational& lo, const Rational& hi) const;

  /// Builds the node for a path of child indices.
  NodeInterval node_from_path(std::vector<std::uint32_t> path) const;

 private:
  struct LevelCache;

  void check_count(int k, const BigInt& count, const char* what) const;

  unsigned q_;
  std::size_t budget_;
  std::shared_ptr<LevelCache> cache_;
};

/// Endpoints of every C_k interval, k <= max_level, sorted and deduplicated.
std::vector<Rational> node_endpoints(const CantorSystem& sys, int max_level);
/// Endpoints of every R_k gap, k <= max_level, sorted and deduplicated.
std::vector<Rational> gap_endpoints(const CantorSystem& sys, int max_level);

}  // namespace mcint
