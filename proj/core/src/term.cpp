#include "cbpv/term.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "cbpv/typing.hpp"

namespace cbpv {

bool operator<(const Variable& a, const Variable& b) {
  if (a.name != b.name) return a.name < b.name;
  if (a.type == b.type) return false;
  if (a.type.hash() != b.type.hash()) return a.type.hash() < b.type.hash();
  return a.type.str() < b.type.str();
}

const char* to_string(TermKind kind) {
  switch (kind) {
    case TermKind::Var: return "variable";
    case TermKind::Star: return "*";
    case TermKind::Num: return "integer literal";
    case TermKind::Abort: return "abort";
    case TermKind::Lam: return "fun";
    case TermKind::App: return "application";
    case TermKind::Rec: return "rec";
    case TermKind::Succ: return "succ";
    case TermKind::Pred: return "pred";
    case TermKind::Thunk: return "thunk";
    case TermKind::Force: return "force";
    case TermKind::Seq: return "sequencing";
    case TermKind::Ifz: return "ifz";
    case TermKind::Proj1: return "fst";
    case TermKind::Proj2: return "snd";
    case TermKind::Pair: return "pair";
    case TermKind::PChoice: return "probabilistic choice";
    case TermKind::Ret: return "ret";
    case TermKind::Do: return "do";
    case TermKind::NChoice: return "nondeterministic choice";
    case TermKind::Produce: return "produce";
    case TermKind::To: return "to";
    case TermKind::Pifz: return "pifz";
    case TermKind::Obs: return "obs";
  }
  return "?";
}

struct Term::Node {
  TermKind kind;
  std::optional<Variable> binder;
  std::optional<Type> annotation;
  BigInt number;
  Rational bound;
  std::vector<Term> kids;
  std::size_t arity = 0;
  std::vector<Variable> free;
  SourceSpan span;
  std::size_t size = 1;
};

namespace {

bool binds_kind(TermKind k) {
  return k == TermKind::Lam || k == TermKind::Rec || k == TermKind::Do || k == TermKind::To;
}

// Index of the child in which a binder's variable is in scope.
std::size_t scope_child(TermKind k) {
  return (k == TermKind::Do || k == TermKind::To) ? 1 : 0;
}

void merge_into(std::vector<Variable>& out, const std::vector<Variable>& in,
                const Variable* except) {
  std::vector<Variable> merged;
  merged.reserve(out.size() + in.size());
  auto a = out.begin();
  auto b = in.begin();
  while (a != out.end() || b != in.end()) {
    if (b != in.end() && except && *b == *except) {
      ++b;
      continue;
    }
    if (b == in.end() || (a != out.end() && *a < *b)) {
      merged.push_back(*a++);
    } else if (a == out.end() || *b < *a) {
      merged.push_back(*b++);
    } else {
      merged.push_back(*a++);
      ++b;
    }
  }
  out = std::move(merged);
}

}  // namespace

namespace {

// Recomputes free variables once the node payload is in place.
void finish_free(std::vector<Variable>& free, TermKind kind, const std::optional<Variable>& binder,
                 const std::vector<Term>& kids, std::size_t arity) {
  free.clear();
  if (kind == TermKind::Var) {
    free.push_back(*binder);
    return;
  }
  for (std::size_t i = 0; i < arity; ++i) {
    const Variable* except = nullptr;
    if (binds_kind(kind) && i == scope_child(kind)) except = &*binder;
    merge_into(free, kids[i].free_vars(), except);
  }
}

}  // namespace

namespace {

struct Builder {
  TermKind kind;
  std::optional<Variable> binder;
  std::optional<Type> annotation;
  BigInt number = 0;
  Rational bound = 0;
  std::vector<Term> kids;
};

}  // namespace

class TermFactory {
 public:
  static Term build(Builder b) {
    auto node = std::make_shared<Term::Node>();
    node->kind = b.kind;
    node->binder = std::move(b.binder);
    node->annotation = std::move(b.annotation);
    node->number = std::move(b.number);
    node->bound = std::move(b.bound);
    node->arity = b.kids.size();
    for (const auto& k : b.kids) node->size += k.size();
    node->kids = std::move(b.kids);
    finish_free(node->free, node->kind, node->binder, node->kids, node->arity);
    return Term(std::move(node));
  }
  static Term with_span(const Term& t, SourceSpan span) {
    auto node = std::make_shared<Term::Node>(*t.node_);
    node->span = span;
    return Term(std::move(node));
  }
  static const Term::Node& node(const Term& t) { return *t.node_; }
};

namespace {

Term build(Builder b) { return TermFactory::build(std::move(b)); }

Term unary(TermKind k, Term m) {
  Builder b{k, {}, {}, 0, 0, {}};
  b.kids.push_back(std::move(m));
  return build(std::move(b));
}

Term binary(TermKind k, Term m, Term n) {
  Builder b{k, {}, {}, 0, 0, {}};
  b.kids.push_back(std::move(m));
  b.kids.push_back(std::move(n));
  return build(std::move(b));
}

Term ternary(TermKind k, Term m, Term n, Term p) {
  Builder b{k, {}, {}, 0, 0, {}};
  b.kids.push_back(std::move(m));
  b.kids.push_back(std::move(n));
  b.kids.push_back(std::move(p));
  return build(std::move(b));
}

void require_value_binder(const Variable& x) {
  if (!x.type.is_value()) {
    throw Error("variable " + x.name + " must have a value type, got " + x.type.str());
  }
}

}  // namespace

Term Term::var(Variable x) {
  require_value_binder(x);
  return build(Builder{TermKind::Var, std::move(x), {}, 0, 0, {}});
}

Term Term::star() {
  static const Term t = build(Builder{TermKind::Star, {}, {}, 0, 0, {}});
  return t;
}

Term Term::num(BigInt n) { return build(Builder{TermKind::Num, {}, {}, std::move(n), 0, {}}); }

Term Term::abort(Type computation) {
  if (!computation.is_computation()) {
    throw Error("abort expects a computation type, got " + computation.str());
  }
  return build(Builder{TermKind::Abort, {}, std::move(computation), 0, 0, {}});
}

Term Term::lam(Variable x, Term body) {
  require_value_binder(x);
  Builder b{TermKind::Lam, std::move(x), {}, 0, 0, {}};
  b.kids.push_back(std::move(body));
  return build(std::move(b));
}

Term Term::app(Term fun, Term arg) { return binary(TermKind::App, std::move(fun), std::move(arg)); }

Term Term::rec(Variable x, Term body) {
  require_value_binder(x);
  Builder b{TermKind::Rec, std::move(x), {}, 0, 0, {}};
  b.kids.push_back(std::move(body));
  return build(std::move(b));
}

Term Term::succ(Term m) { return unary(TermKind::Succ, std::move(m)); }
Term Term::pred(Term m) { return unary(TermKind::Pred, std::move(m)); }
Term Term::thunk(Term m) { return unary(TermKind::Thunk, std::move(m)); }
Term Term::force(Term m) { return unary(TermKind::Force, std::move(m)); }
Term Term::seq(Term m, Term n) { return binary(TermKind::Seq, std::move(m), std::move(n)); }
Term Term::ifz(Term m, Term zero, Term nonzero) {
  return ternary(TermKind::Ifz, std::move(m), std::move(zero), std::move(nonzero));
}
Term Term::proj1(Term m) { return unary(TermKind::Proj1, std::move(m)); }
Term Term::proj2(Term m) { return unary(TermKind::Proj2, std::move(m)); }
Term Term::pair(Term m, Term n) { return binary(TermKind::Pair, std::move(m), std::move(n)); }
Term Term::pchoice(Term m, Term n) { return binary(TermKind::PChoice, std::move(m), std::move(n)); }
Term Term::ret(Term m) { return unary(TermKind::Ret, std::move(m)); }

Term Term::do_(Variable x, Term m, Term n) {
  require_value_binder(x);
  Builder b{TermKind::Do, std::move(x), {}, 0, 0, {}};
  b.kids.push_back(std::move(m));
  b.kids.push_back(std::move(n));
  return build(std::move(b));
}

Term Term::nchoice(Term m, Term n) { return binary(TermKind::NChoice, std::move(m), std::move(n)); }
Term Term::produce(Term m) { return unary(TermKind::Produce, std::move(m)); }

Term Term::to(Term m, Variable x, Term n) {
  require_value_binder(x);
  Builder b{TermKind::To, std::move(x), {}, 0, 0, {}};
  b.kids.push_back(std::move(m));
  b.kids.push_back(std::move(n));
  return build(std::move(b));
}

Term Term::pifz(Term m, Term zero, Term nonzero) {
  return ternary(TermKind::Pifz, std::move(m), std::move(zero), std::move(nonzero));
}

Term Term::obs(Rational b, Term m) {
  b.canonicalize();
  if (b <= 0 || b >= 1) {
    throw Error("obs threshold must lie strictly between 0 and 1, got " + to_fraction_string(b));
  }
  Builder bl{TermKind::Obs, {}, {}, 0, std::move(b), {}};
  bl.kids.push_back(std::move(m));
  return build(std::move(bl));
}

TermKind Term::kind() const { return node_->kind; }
std::size_t Term::arity() const { return node_->arity; }
const std::vector<Variable>& Term::free_vars() const { return node_->free; }
SourceSpan Term::span() const { return node_->span; }
std::size_t Term::size() const { return node_->size; }

const Variable& Term::variable() const {
  if (!node_->binder) throw std::logic_error(std::string("no variable on a ") + to_string(kind()) + " node");
  return *node_->binder;
}

bool Term::binds() const { return binds_kind(kind()); }

const Term& Term::child(std::size_t i) const {
  if (i >= node_->arity) throw std::out_of_range("term child index");
  return node_->kids[i];
}

const BigInt& Term::number() const {
  if (kind() != TermKind::Num) throw std::logic_error("not an integer literal");
  return node_->number;
}

const Type& Term::abort_type() const {
  if (kind() != TermKind::Abort) throw std::logic_error("not an abort");
  return *node_->annotation;
}

const Rational& Term::bound() const {
  if (kind() != TermKind::Obs) throw std::logic_error("not an obs");
  return node_->bound;
}

bool Term::has_free(const Variable& x) const {
  return std::binary_search(node_->free.begin(), node_->free.end(), x);
}

bool Term::has_free_name(const std::string& name) const {
  for (const auto& v : node_->free) {
    if (v.name == name) return true;
  }
  return false;
}

Term Term::with_span(SourceSpan span) const { return TermFactory::with_span(*this, span); }

Term Term::rebuild(std::vector<Term> children) const {
  if (children.size() != node_->arity) throw std::logic_error("rebuild arity mismatch");
  bool same = true;
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (children[i].identity() != node_->kids[i].identity()) same = false;
  }
  if (same) return *this;
  Builder b{node_->kind, node_->binder, node_->annotation, node_->number, node_->bound, std::move(children)};
  return TermFactory::with_span(build(std::move(b)), node_->span);
}

Term Term::rebuild(Variable binder, std::vector<Term> children) const {
  if (!binds()) throw std::logic_error("rebuild with binder on a non-binding node");
  Builder b{node_->kind, std::move(binder), node_->annotation, node_->number, node_->bound, std::move(children)};
  return TermFactory::with_span(build(std::move(b)), node_->span);
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

using Bindings = std::vector<std::pair<Variable, Term>>;

const Term* lookup(const Bindings& s, const Variable& x) {
  for (const auto& [v, t] : s) {
    if (v == x) return &t;
  }
  return nullptr;
}

bool relevant(const Bindings& s, const Term& m) {
  for (const auto& [v, t] : s) {
    if (m.has_free(v)) return true;
  }
  return false;
}

// Names that a binder must not take because some replacement that will be
// pushed under it mentions them.
bool clashes(const Bindings& s, const Term& body, const std::string& name) {
  for (const auto& [v, t] : s) {
    if (body.has_free(v) && t.has_free_name(name)) return true;
  }
  return false;
}

Term subst(const Term& m, const Bindings& s) {
  if (!relevant(s, m)) return m;
  if (m.is(TermKind::Var)) {
    const Term* r = lookup(s, m.variable());
    return r ? *r : m;
  }
  if (!m.binds()) {
    std::vector<Term> kids;
    kids.reserve(m.arity());
    for (std::size_t i = 0; i < m.arity(); ++i) kids.push_back(subst(m.child(i), s));
    return m.rebuild(std::move(kids));
  }

  const Variable& y = m.variable();
  const std::size_t scope = scope_child(m.kind());
  std::vector<Term> kids;
  kids.reserve(m.arity());
  // Children outside the binder's scope see the full substitution.
  for (std::size_t i = 0; i < m.arity(); ++i) {
    if (i != scope) kids.push_back(subst(m.child(i), s));
    else kids.push_back(m.child(i));
  }

  Bindings inner;
  for (const auto& b : s) {
    if (b.first != y) inner.push_back(b);
  }
  const Term& body = m.child(scope);
  if (!relevant(inner, body)) return m.rebuild(y, std::move(kids));

  Variable binder = y;
  if (clashes(inner, body, y.name)) {
    auto taken = [&](const std::string& name) {
      if (body.has_free_name(name)) return true;
      for (const auto& [v, t] : inner) {
        if (v.name == name || t.has_free_name(name)) return true;
      }
      return false;
    };
    binder.name = fresh_name(y.name, taken);
    inner.emplace_back(y, Term::var(binder));
  }
  kids[scope] = subst(body, inner);
  return m.rebuild(binder, std::move(kids));
}

}  // namespace

Term substitute_unchecked(const Term& m, const Variable& x, const Term& n) {
  return subst(m, Bindings{{x, n}});
}

Term substitute(const Term& m, const Variable& x, const Term& n) {
  auto result = typing::synth(n);
  if (!result.ok()) {
    throw SubstitutionTypeError("cannot substitute an ill-typed term for " + x.name + ": " +
                                result.error().message);
  }
  if (result.type() != x.type) {
    throw SubstitutionTypeError("substitution type mismatch: " + x.name + " has type " +
                                x.type.str() + " but the replacement has type " + result.type().str());
  }
  return subst(m, Bindings{{x, n}});
}

Term substitute_all(const Term& m, const std::vector<std::pair<Variable, Term>>& bindings) {
  return subst(m, bindings);
}

// ---------------------------------------------------------------------------
// Alpha equivalence

namespace {

struct Scope {
  std::vector<Variable> left;
  std::vector<Variable> right;
};

std::optional<std::size_t> index_of(const std::vector<Variable>& stack, const Variable& x) {
  for (std::size_t i = stack.size(); i-- > 0;) {
    if (stack[i] == x) return stack.size() - 1 - i;
  }
  return std::nullopt;
}

bool alpha(const Term& a, const Term& b, Scope& scope) {
  if (a.identity() == b.identity() && a.closed()) return true;
  if (a.kind() != b.kind() || a.arity() != b.arity()) return false;
  switch (a.kind()) {
    case TermKind::Var: {
      auto ia = index_of(scope.left, a.variable());
      auto ib = index_of(scope.right, b.variable());
      if (ia || ib) return ia == ib;
      return a.variable() == b.variable();
    }
    case TermKind::Num:
      return a.number() == b.number();
    case TermKind::Abort:
      return a.abort_type() == b.abort_type();
    case TermKind::Obs:
      if (a.bound() != b.bound()) return false;
      break;
    default:
      break;
  }
  if (!a.binds()) {
    for (std::size_t i = 0; i < a.arity(); ++i) {
      if (!alpha(a.child(i), b.child(i), scope)) return false;
    }
    return true;
  }
  if (a.variable().type != b.variable().type) return false;
  const std::size_t inner = scope_child(a.kind());
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (i == inner) continue;
    if (!alpha(a.child(i), b.child(i), scope)) return false;
  }
  scope.left.push_back(a.variable());
  scope.right.push_back(b.variable());
  bool ok = alpha(a.child(inner), b.child(inner), scope);
  scope.left.pop_back();
  scope.right.pop_back();
  return ok;
}

void key(const Term& m, std::vector<Variable>& stack, std::string& out) {
  out += static_cast<char>('A' + static_cast<int>(m.kind()));
  switch (m.kind()) {
    case TermKind::Var: {
      auto i = index_of(stack, m.variable());
      if (i) {
        out += '#';
        out += std::to_string(*i);
      } else {
        out += '$';
        out += m.variable().name;
        out += ':';
        out += m.variable().type.str();
      }
      out += ';';
      return;
    }
    case TermKind::Num:
      out += m.number().get_str();
      out += ';';
      return;
    case TermKind::Abort:
      out += m.abort_type().str();
      out += ';';
      return;
    case TermKind::Obs:
      out += to_fraction_string(m.bound());
      out += ';';
      break;
    default:
      break;
  }
  if (m.binds()) {
    out += m.variable().type.str();
    out += ';';
  }
  out += '(';
  const std::size_t inner = m.binds() ? scope_child(m.kind()) : m.arity();
  for (std::size_t i = 0; i < m.arity(); ++i) {
    if (i == inner) stack.push_back(m.variable());
    key(m.child(i), stack, out);
    if (i == inner) stack.pop_back();
    out += ',';
  }
  out += ')';
}

}  // namespace

bool alpha_equal(const Term& a, const Term& b) {
  Scope scope;
  return alpha(a, b, scope);
}

std::string canonical_key(const Term& m) {
  std::vector<Variable> stack;
  std::string out;
  out.reserve(m.size() * 4);
  key(m, stack, out);
  return out;
}

}  // namespace cbpv
