#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbpv/context.hpp"
#include "cbpv/rational.hpp"
#include "cbpv/term.hpp"

namespace cbpv::opsem {

struct Configuration {
  EvalContext context;
  Term focus;

  std::string str() const;
  /// Equal for alpha-equal configurations.
  std::string key() const;
};

/// [_] . M
Configuration initial(const Term& m);

enum class OutcomeKind { Det, Terminal1, Split, ObsGate, Stuck };
enum class SplitKind { PChoice, NChoice, PifzMax };

struct StepOutcome {
  OutcomeKind kind = OutcomeKind::Stuck;
  /// One of the fixed rule names (discover, beta, ..., obs-gate), or "stuck".
  std::string rule;
  /// Det: {next}. Split PChoice/NChoice: {left, right}. Split PifzMax:
  /// {ifz configuration, zero branch, nonzero branch}. ObsGate: {inner,
  /// continuation}.
  std::vector<Configuration> next;
  SplitKind split = SplitKind::PChoice;
  Rational gate;
};

/// One transition of the machine. Throws Error on a configuration no
/// well-typed ground configuration can reach (a free variable in focus).
StepOutcome step(const Configuration& cfg);

struct ProbResult {
  Rational lower = 0;
  bool exact = false;
  std::uint64_t steps_used = 0;
  /// The step limit cut the exploration short.
  bool truncated = false;
  /// The budget cut some path that never unfolded a rec whose binder occurs
  /// in its body.
  bool rec_free_cut = false;
};

struct ProbOptions {
  /// Caps the number of step() calls; 0 means unlimited.
  std::uint64_t step_limit = 0;
  /// Receives one line per transition when set.
  std::ostream* trace = nullptr;
  /// Reuses results of alpha-equal configurations.
  bool memoize = false;
};

/// Budget-indexed lower bound on the must-termination probability of cfg.
/// The budget bounds the derivation depth along every path.
ProbResult prob(const Configuration& cfg, std::uint64_t budget, const ProbOptions& options = {});

enum class LimitStatus { Exact, Converged, BudgetExhausted };
const char* to_string(LimitStatus s);

struct LimitResult {
  Rational lower = 0;
  bool exact = false;
  LimitStatus status = LimitStatus::BudgetExhausted;
  std::uint64_t steps_used = 0;
  /// Largest derivation depth tried.
  std::uint64_t depth = 0;
};

struct LimitOptions {
  Rational epsilon = Rational(1, 1000000);
  std::uint64_t max_steps = 1000000;
  std::ostream* trace = nullptr;
  bool memoize = false;
};

/// Deepens prob([_] . M, k) for k = 1, 2, 4, ... until the result is exact,
/// two successive positive bounds differ by less than epsilon (counted only
/// when every budget cut fell after a genuinely recursive unfolding), or the
/// step cap is spent. Throws typing::TypeErrorException unless M : F V unit, and
/// Error when M is open.
LimitResult pr_limit(const Term& m, const LimitOptions& options = {});

/// Same, starting from C . M. Throws ContextError on a hole type mismatch.
LimitResult pr_config(const EvalContext& c, const Term& m, const LimitOptions& options = {});

}  // namespace cbpv::opsem
