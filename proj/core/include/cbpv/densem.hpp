#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbpv/rational.hpp"
#include "cbpv/term.hpp"
#include "cbpv/types.hpp"

namespace cbpv::densem {

class RepresentationError : public Error {
 public:
  using Error::Error;
};

enum class SemKind {
  Unit,  // Sierpinski space: bottom or top
  Int,   // flat integers with bottom
  Pair,
  Val,   // finite formal sum of weighted points
  FBot,  // least element of an F domain
  FSet,  // upper closure of finitely many generators; none means the empty set, the top
  Fun,
};

class Sem;
class Env;
using SemFn = std::function<Sem(const Sem&)>;

/// Immutable, shared semantic value.
///
/// Values without functions inside are kept normalized: valuations merge equal
/// points and F-sets keep only minimal generators, both sorted by their
/// printed form. Two such values are then equal iff they print the same.
class Sem {
 public:
  static Sem unit(bool top);
  static Sem integer(std::optional<BigInt> n);
  static Sem pair(Sem a, Sem b);
  static Sem val(std::vector<std::pair<Rational, Sem>> support);
  static Sem dirac(Sem point) { return val({{Rational(1), std::move(point)}}); }
  static Sem fbot();
  static Sem fset(std::vector<Sem> generators);
  static Sem empty_set() { return fset({}); }
  static Sem function(SemFn fn);
  /// The function that ignores its argument.
  static Sem constant(Sem value);

  SemKind kind() const;
  bool is_top_unit() const;
  const std::optional<BigInt>& int_value() const;
  const Sem& first() const;
  const Sem& second() const;
  const std::vector<std::pair<Rational, Sem>>& support() const;
  const std::vector<Sem>& generators() const;
  /// The constant result of a constant function, if known to be constant.
  const std::optional<Sem>& constant_value() const;

  /// True when no function occurs inside.
  bool comparable() const;
  /// Printed form; for comparable values it is canonical.
  const std::string& str() const;

  /// Total mass of a valuation.
  Rational mass() const;

  struct Node;
  explicit Sem(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const Node& node() const { return *node_; }

 private:
  std::shared_ptr<const Node> node_;
};

/// Applies a function value.
Sem apply(const Sem& f, const Sem& arg);

/// Least element of the domain of t.
Sem bottom(const Type& t);
/// Greatest element of a computation type's domain: the empty set at F types,
/// the constant-top function at arrows. Throws RepresentationError on a value
/// type.
Sem top(const Type& t);

/// Binary infimum at computation type t; at arrow types a pointwise meet.
Sem meet(const Sem& a, const Sem& b, const Type& t);

/// Extension of f : point -> [[t]] to F-values: bottom on FBot, top on the
/// empty set, else the meet of f over the generators.
Sem qstar(const SemFn& f, const Sem& q, const Type& t);

/// Extension of f : point -> valuation to valuations: sum_i w_i f(x_i).
Sem vdagger(const SemFn& f, const Sem& nu);

/// Scales every weight of a valuation.
Sem scale(const Sem& nu, const Rational& factor);
/// Formal sum of two valuations.
Sem add(const Sem& a, const Sem& b);

/// Integral of h against a valuation.
Rational integrate(const std::function<Rational(const Sem&)>& h, const Sem& nu);

/// Mass of top for a valuation over unit.
Rational top_mass(const Sem& nu);

/// Termination probability read off an F V unit value: 0 on FBot, 1 on the
/// empty set, else the least top-mass over the generators.
Rational hstar(const Sem& q);

/// Domain order at a type with no arrows. Throws RepresentationError on a
/// higher-order type or mismatched representations.
bool leq(const Sem& a, const Sem& b, const Type& t);
/// leq both ways.
bool sem_equal(const Sem& a, const Sem& b, const Type& t);

std::string to_string(const Sem& v);

/// Persistent environment from typed variables to values.
class Env {
 public:
  Env() = default;
  Env bind(const Variable& x, Sem v) const;
  /// Throws Error when x is unbound.
  const Sem& lookup(const Variable& x) const;
  bool contains(const Variable& x) const;

 private:
  struct Link;
  std::shared_ptr<const Link> head_;
};

struct EvalConfig {
  /// Iterations of the least-fixpoint approximation for each rec.
  std::size_t rec_depth = 64;
  /// Iteration also stops, inexact, once an iterate prints longer than this.
  /// Weights of iterates such as x -> x*x/2 + 1/2 double their digits per step.
  std::size_t max_iterate_size = 2048;
};

struct EvalResult {
  Sem value;
  /// No rec stopped short of a detected fixpoint.
  bool exact;
};

/// Evaluates M in env. Function values returned here keep evaluating lazily
/// when applied; their later approximation loss is not reflected in `exact`.
EvalResult evaluate(const Term& m, const Env& env = {}, const EvalConfig& config = {});

}  // namespace cbpv::densem
