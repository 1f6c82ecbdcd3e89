#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cbpv/context.hpp"
#include "cbpv/term.hpp"
#include "cbpv/types.hpp"

namespace cbpv::harness {

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Relative weights of the constructs the generator may pick. Zero disables
/// a construct.
struct ConstructWeights {
  double variable = 3;
  double literal = 2;     // *, numerals, ret/produce/thunk/fun of a smaller term
  double abort = 1;
  double succ_pred = 1;
  double ifz = 1;
  double seq = 1;
  double pair = 1;
  double proj = 1;
  double pchoice = 3;
  double nchoice = 2;
  double pifz = 1;
  double obs = 1;
  double do_ = 2;
  double to = 2;
  double app = 1;
  double force = 1;
};

struct GenPolicy {
  /// Depth 1 admits only the minimal inhabitants of each type.
  int max_depth = 5;
  ConstructWeights weights;
  /// Chance of wrapping a first-order value-type position in a rec.
  double rec_probability = 0;
  /// Chance that a rec body puts its variable under a (+) or ifz guard.
  double guard_probability = 0.9;
  /// Non-leaf weights are scaled by decay^level, level being the distance
  /// from the root.
  double decay = 0.85;
  long literal_min = 0;
  long literal_max = 2;
  std::uint64_t seed = 1;
};

/// A closed, well-typed term of type t; deterministic given the policy.
/// Throws GenerationError when the policy admits no such term within depth.
Term generate(const GenPolicy& policy, const Type& t);

/// Stateful generator, for drawing many terms from one seed.
class Generator {
 public:
  explicit Generator(GenPolicy policy);

  Term term(const Type& t);
  /// A random small type; computation types only when `computation` is set.
  Type value_type(int size = 2);
  Type computation_type(int size = 2);
  /// A ground evaluation context with up to `max_frames` frames whose hole
  /// type is returned alongside it.
  std::pair<EvalContext, Type> context(std::size_t max_frames);

  std::mt19937_64& rng() { return rng_; }
  const GenPolicy& policy() const { return policy_; }

 private:
  struct Impl;
  GenPolicy policy_;
  std::mt19937_64 rng_;
};

}  // namespace cbpv::harness
