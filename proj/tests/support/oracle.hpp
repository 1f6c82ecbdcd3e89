#pragma once

#include <cstdint>
#include <limits>

#include "cbpv/rational.hpp"
#include "cbpv/term.hpp"

namespace cbpv::testing {

/// Naive reference for Pr(M converges). Works on whole terms: every step
/// re-locates the redex from the root, rewrites it in place and compares
/// complete terms for deterministic loops. Shares no code with the machine.
struct OracleLimits {
  /// rec unfoldings allowed along any single path.
  std::uint32_t unfolds = std::numeric_limits<std::uint32_t>::max();
  /// Deterministic steps allowed along any single path.
  std::uint64_t steps = 100000;
  /// Total redexes over the whole tree; past this every answer is 0, inexact.
  std::uint64_t nodes = 2000000;
  /// Nested choice/obs points along one path (bounds the recursion).
  std::uint32_t nesting = 1000;
  /// Largest term, in nodes, a path may reach before giving up.
  std::size_t term_size = 1000;
};

struct OracleResult {
  Rational value = 0;
  /// No limit was hit anywhere, so value is Pr itself.
  bool exact = false;
  std::uint64_t nodes = 0;
};

/// M must be ground of type F V unit.
OracleResult oracle_probability(const Term& m, const OracleLimits& limits = {});

}  // namespace cbpv::testing
