#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cbpv/context.hpp"
#include "cbpv/term.hpp"
#include "cbpv/types.hpp"

namespace cbpv::typing {

struct TypeError {
  std::string message;
  /// Child indices from the root to the offending subterm.
  std::vector<std::size_t> path;
  SourceSpan span;

  std::string str() const;
};

class TypingResult {
 public:
  TypingResult(Type t) : value_(std::move(t)) {}
  TypingResult(TypeError e) : value_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<Type>(value_); }
  const Type& type() const;
  const TypeError& error() const;

 private:
  std::variant<Type, TypeError> value_;
};

/// Raised by the throwing entry points below.
class TypeErrorException : public Error {
 public:
  explicit TypeErrorException(TypeError e) : Error(e.str()), error_(std::move(e)) {}
  const TypeError& error() const { return error_; }

 private:
  TypeError error_;
};

/// Synthesizes the unique type of M. Free variables are allowed: each carries
/// its own type. `to`, `pifz` and `abort` are also accepted at arrow types.
TypingResult synth(const Term& m);

/// synth, throwing TypeErrorException on failure.
Type type_of(const Term& m);

/// Rewrites `to`, `pifz` and `abort` at arrow types into their eta-expanded
/// core forms, with fresh binders. The result only uses these constructs at
/// F types. Throws TypeErrorException when M is ill-typed.
Term elaborate(const Term& m);

/// True when every `to`/`pifz`/`abort` in M already sits at an F type.
bool is_core(const Term& m);

/// Hole type of C, where C : hole |- F V unit. Also checks that the rank never
/// decreases from a frame's hole to its result.
TypingResult check_context(const EvalContext& c);

}  // namespace cbpv::typing
