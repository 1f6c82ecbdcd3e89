#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cbpv/rational.hpp"
#include "cbpv/types.hpp"

namespace cbpv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceSpan {
  int line = 0;
  int column = 0;
  bool known() const { return line > 0; }
};

/// A typed variable x_sigma. Two variables are the same iff both the name and
/// the value type agree, so x_int and x_unit are distinct.
struct Variable {
  std::string name;
  Type type;

  friend bool operator==(const Variable& a, const Variable& b) {
    return a.name == b.name && a.type == b.type;
  }
  friend bool operator!=(const Variable& a, const Variable& b) { return !(a == b); }
  friend bool operator<(const Variable& a, const Variable& b);
};

enum class TermKind {
  Var,
  Star,
  Num,
  Abort,
  Lam,
  App,
  Rec,
  Succ,
  Pred,
  Thunk,
  Force,
  Seq,
  Ifz,
  Proj1,
  Proj2,
  Pair,
  PChoice,  // M (+) N
  Ret,
  Do,
  NChoice,  // M (x) N
  Produce,
  To,
  Pifz,
  Obs,  // obs[b] M, the statistical termination tester
};

const char* to_string(TermKind kind);

/// Immutable, structurally shared abstract syntax tree.
///
/// Child layout: Lam/Rec keep the body in child(0); App is (fun, arg); Do and
/// To keep the bound computation in child(0) and the scope of the binder in
/// child(1); Ifz/Pifz are (scrutinee, zero branch, nonzero branch).
class Term {
 public:
  static Term var(Variable x);
  static Term star();
  static Term num(BigInt n);
  static Term num(long n) { return num(BigInt(n)); }
  static Term abort(Type computation);
  static Term lam(Variable x, Term body);
  static Term app(Term fun, Term arg);
  static Term rec(Variable x, Term body);
  static Term succ(Term m);
  static Term pred(Term m);
  static Term thunk(Term m);
  static Term force(Term m);
  static Term seq(Term m, Term n);
  static Term ifz(Term m, Term zero, Term nonzero);
  static Term proj1(Term m);
  static Term proj2(Term m);
  static Term pair(Term m, Term n);
  static Term pchoice(Term m, Term n);
  static Term ret(Term m);
  static Term do_(Variable x, Term m, Term n);
  static Term nchoice(Term m, Term n);
  static Term produce(Term m);
  static Term to(Term m, Variable x, Term n);
  static Term pifz(Term m, Term zero, Term nonzero);
  /// Throws Error unless 0 < b < 1.
  static Term obs(Rational b, Term m);

  TermKind kind() const;
  bool is(TermKind k) const { return kind() == k; }

  /// The variable of a Var node, or the binder of Lam/Rec/Do/To.
  const Variable& variable() const;
  bool binds() const;

  std::size_t arity() const;
  const Term& child(std::size_t i) const;

  const BigInt& number() const;
  const Type& abort_type() const;
  const Rational& bound() const;

  /// Sorted, duplicate-free.
  const std::vector<Variable>& free_vars() const;
  bool closed() const { return free_vars().empty(); }
  bool has_free(const Variable& x) const;
  bool has_free_name(const std::string& name) const;

  SourceSpan span() const;
  Term with_span(SourceSpan span) const;

  /// Number of nodes.
  std::size_t size() const;
  const void* identity() const { return node_.get(); }

  /// Same constructor, binder and payload with new children.
  Term rebuild(std::vector<Term> children) const;
  /// Same constructor with a new binder (Lam/Rec/Do/To only).
  Term rebuild(Variable binder, std::vector<Term> children) const;

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend class TermFactory;

  std::shared_ptr<const Node> node_;
};

/// M[x := N] with capture avoidance; throws SubstitutionTypeError when N does
/// not synthesize x's type.
Term substitute(const Term& m, const Variable& x, const Term& n);

/// Same as substitute without re-checking N's type (the engine uses this on
/// configurations already known to be well typed).
Term substitute_unchecked(const Term& m, const Variable& x, const Term& n);

/// Simultaneous substitution M[x1 := N1, ..., xk := Nk].
Term substitute_all(const Term& m, const std::vector<std::pair<Variable, Term>>& bindings);

/// Equality up to consistent renaming of bound variables.
bool alpha_equal(const Term& a, const Term& b);

/// A string that is equal for two terms iff they are alpha-equal. Bound
/// variables are replaced by de Bruijn indices.
std::string canonical_key(const Term& m);

/// Picks base, base', base'', ... avoiding every name for which `taken`
/// returns true.
template <typename Pred>
std::string fresh_name(const std::string& base, Pred taken) {
  std::string candidate = base;
  while (taken(candidate)) candidate += '\'';
  return candidate;
}

class SubstitutionTypeError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbpv
