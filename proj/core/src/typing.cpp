#include "cbpv/typing.hpp"

#include <unordered_map>

namespace cbpv::typing {

std::string TypeError::str() const {
  std::string out;
  if (span.known()) out += std::to_string(span.line) + ":" + std::to_string(span.column) + ": ";
  out += message;
  if (!path.empty()) {
    out += " (at path";
    for (auto i : path) out += " " + std::to_string(i);
    out += ")";
  }
  return out;
}

const Type& TypingResult::type() const {
  if (!ok()) throw TypeErrorException(std::get<TypeError>(value_));
  return std::get<Type>(value_);
}

const TypeError& TypingResult::error() const {
  if (ok()) throw std::logic_error("typing succeeded; there is no error");
  return std::get<TypeError>(value_);
}

namespace {

struct Failure {
  TypeError error;
};

// Memoizes by node identity; the cache keeps every visited node alive so
// addresses cannot be reused while it exists.
class Synth {
 public:
  Type run(const Term& m) { return go(m); }

 private:
  std::vector<std::size_t> path_;
  std::unordered_map<const void*, std::pair<Term, Type>> cache_;

  [[noreturn]] void fail(const Term& at, std::string message) {
    throw Failure{TypeError{std::move(message), path_, at.span()}};
  }

  Type child(const Term& m, std::size_t i) {
    path_.push_back(i);
    Type t = go(m.child(i));
    path_.pop_back();
    return t;
  }

  void expect(const Term& m, const Type& got, const Type& want, const std::string& what) {
    if (got != want) fail(m, what + " must have type " + want.str() + ", got " + got.str());
  }

  Type go(const Term& m) {
    auto it = cache_.find(m.identity());
    if (it != cache_.end()) return it->second.second;
    Type t = rule(m);
    cache_.emplace(m.identity(), std::make_pair(m, t));
    return t;
  }

  Type rule(const Term& m) {
    switch (m.kind()) {
      case TermKind::Var:
        return m.variable().type;
      case TermKind::Star:
        return Type::unit();
      case TermKind::Num:
        return Type::integer();
      case TermKind::Abort:
        return m.abort_type();
      case TermKind::Lam: {
        Type body = child(m, 0);
        if (!body.is_computation()) fail(m, "function body must be a computation, got " + body.str());
        return Type::arrow(m.variable().type, body);
      }
      case TermKind::App: {
        Type f = child(m, 0);
        Type a = child(m, 1);
        if (f.kind() != TypeKind::Arrow) fail(m, "applied term must be a function, got " + f.str());
        expect(m, a, f.first(), "argument");
        return f.second();
      }
      case TermKind::Rec: {
        Type body = child(m, 0);
        expect(m, body, m.variable().type, "rec body");
        return body;
      }
      case TermKind::Succ:
      case TermKind::Pred: {
        expect(m, child(m, 0), Type::integer(), std::string(to_string(m.kind())) + " operand");
        return Type::integer();
      }
      case TermKind::Thunk: {
        Type t = child(m, 0);
        if (!t.is_computation()) fail(m, "thunk expects a computation, got " + t.str());
        return Type::u(t);
      }
      case TermKind::Force: {
        Type t = child(m, 0);
        if (t.kind() != TypeKind::U) fail(m, "force expects a U type, got " + t.str());
        return t.first();
      }
      case TermKind::Seq: {
        expect(m, child(m, 0), Type::unit(), "left side of ;");
        return child(m, 1);
      }
      case TermKind::Ifz: {
        expect(m, child(m, 0), Type::integer(), "ifz scrutinee");
        Type n = child(m, 1);
        Type p = child(m, 2);
        if (n != p) fail(m, "ifz branches differ: " + n.str() + " vs " + p.str());
        return n;
      }
      case TermKind::Proj1:
      case TermKind::Proj2: {
        Type t = child(m, 0);
        if (t.kind() != TypeKind::Prod) fail(m, "projection expects a product, got " + t.str());
        return m.is(TermKind::Proj1) ? t.first() : t.second();
      }
      case TermKind::Pair: {
        Type a = child(m, 0);
        Type b = child(m, 1);
        if (!a.is_value() || !b.is_value()) fail(m, "pair components must be values");
        return Type::prod(a, b);
      }
      case TermKind::PChoice: {
        Type a = child(m, 0);
        Type b = child(m, 1);
        if (a.kind() != TypeKind::V) fail(m, "(+) expects V types, got " + a.str());
        if (a != b) fail(m, "(+) branches differ: " + a.str() + " vs " + b.str());
        return a;
      }
      case TermKind::Ret: {
        Type t = child(m, 0);
        if (!t.is_value()) fail(m, "ret expects a value, got " + t.str());
        return Type::v(t);
      }
      case TermKind::Do: {
        expect(m, child(m, 0), Type::v(m.variable().type), "do-bound term");
        Type n = child(m, 1);
        if (n.kind() != TypeKind::V) fail(m, "do body must have a V type, got " + n.str());
        return n;
      }
      case TermKind::NChoice: {
        Type a = child(m, 0);
        Type b = child(m, 1);
        if (a.kind() != TypeKind::F) fail(m, "(x) expects F types, got " + a.str());
        if (a != b) fail(m, "(x) branches differ: " + a.str() + " vs " + b.str());
        return a;
      }
      case TermKind::Produce: {
        Type t = child(m, 0);
        if (!t.is_value()) fail(m, "produce expects a value, got " + t.str());
        return Type::f(t);
      }
      case TermKind::To: {
        expect(m, child(m, 0), Type::f(m.variable().type), "to-bound term");
        Type n = child(m, 1);
        if (!n.is_computation()) fail(m, "to body must be a computation, got " + n.str());
        return n;
      }
      case TermKind::Pifz: {
        expect(m, child(m, 0), Type::integer(), "pifz scrutinee");
        Type n = child(m, 1);
        Type p = child(m, 2);
        if (!n.is_computation()) fail(m, "pifz branches must be computations, got " + n.str());
        if (n != p) fail(m, "pifz branches differ: " + n.str() + " vs " + p.str());
        return n;
      }
      case TermKind::Obs: {
        expect(m, child(m, 0), fvunit(), "obs argument");
        return Type::unit();
      }
    }
    fail(m, "unknown term");
  }
};

bool name_used(const Term& m, const std::string& name) { return m.has_free_name(name); }

std::string fresh_for(const std::string& base, const std::vector<Term>& avoid, const std::string& also) {
  return fresh_name(base, [&](const std::string& n) {
    if (n == also) return true;
    for (const auto& t : avoid) {
      if (name_used(t, n)) return true;
    }
    return false;
  });
}

Term abort_at(const Type& t, const std::string& hint) {
  if (t.kind() != TypeKind::Arrow) return Term::abort(t);
  return Term::lam(Variable{hint, t.first()}, abort_at(t.second(), hint + "'"));
}

// m to x in n, where n : ty.
Term to_at(const Term& m, const Variable& x, const Term& n, const Type& ty) {
  if (ty.kind() != TypeKind::Arrow) return Term::to(m, x, n);
  Variable y{fresh_for("y", {m, n}, x.name), ty.first()};
  return Term::lam(y, to_at(m, x, Term::app(n, Term::var(y)), ty.second()));
}

Term pifz_at(const Term& m, const Term& n, const Term& p, const Type& ty) {
  if (ty.kind() != TypeKind::Arrow) return Term::pifz(m, n, p);
  Variable x{fresh_for("x", {m, n, p}, ""), ty.first()};
  Term arg = Term::var(x);
  return Term::lam(x, pifz_at(m, Term::app(n, arg), Term::app(p, arg), ty.second()));
}

bool core_node(const Term& m, Synth& typer) {
  switch (m.kind()) {
    case TermKind::Abort:
      return m.abort_type().kind() == TypeKind::F;
    case TermKind::To:
    case TermKind::Pifz:
      return typer.run(m).kind() == TypeKind::F;
    default:
      return true;
  }
}

bool core_rec(const Term& m, Synth& typer) {
  if (!core_node(m, typer)) return false;
  for (std::size_t i = 0; i < m.arity(); ++i) {
    if (!core_rec(m.child(i), typer)) return false;
  }
  return true;
}

Term elab(const Term& m, Synth& typer) {
  std::vector<Term> kids;
  bool changed = false;
  for (std::size_t i = 0; i < m.arity(); ++i) {
    kids.push_back(elab(m.child(i), typer));
    if (kids.back().identity() != m.child(i).identity()) changed = true;
  }
  if (!changed && core_node(m, typer)) return m;
  switch (m.kind()) {
    case TermKind::Abort:
      return abort_at(m.abort_type(), "x").with_span(m.span());
    case TermKind::To:
      return to_at(kids[0], m.variable(), kids[1], typer.run(kids[1])).with_span(m.span());
    case TermKind::Pifz:
      return pifz_at(kids[0], kids[1], kids[2], typer.run(kids[1])).with_span(m.span());
    default:
      return m.binds() ? m.rebuild(m.variable(), kids) : m.rebuild(kids);
  }
}

}  // namespace

TypingResult synth(const Term& m) {
  try {
    return Synth().run(m);
  } catch (Failure& f) {
    return std::move(f.error);
  }
}

Type type_of(const Term& m) {
  auto r = synth(m);
  if (!r.ok()) throw TypeErrorException(r.error());
  return r.type();
}

bool is_core(const Term& m) {
  Synth typer;
  try {
    return core_rec(m, typer);
  } catch (Failure&) {
    return false;
  }
}

Term elaborate(const Term& m) {
  Synth typer;
  try {
    typer.run(m);
    return elab(m, typer);
  } catch (Failure& f) {
    throw TypeErrorException(std::move(f.error));
  }
}

TypingResult check_context(const EvalContext& c) {
  Type result = fvunit();
  Type hole = result;
  switch (c.initial()) {
    case InitialKind::Hole: hole = fvunit(); break;
    case InitialKind::Produce: hole = Type::v(Type::unit()); break;
    case InitialKind::ProduceRet: hole = Type::unit(); break;
  }
  auto frames = c.frames();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    result = hole;
    auto err = [&](const std::string& msg) {
      return TypeError{"frame " + std::to_string(i + 1) + " " + f.str() + ": " + msg, {i + 1}, {}};
    };
    auto operand_type = [&](std::size_t k) -> std::optional<Type> {
      auto r = synth(f.operand(k));
      if (!r.ok()) return std::nullopt;
      return r.type();
    };
    switch (f.kind()) {
      case FrameKind::AppArg: {
        auto a = operand_type(0);
        if (!a) return err("ill-typed argument");
        if (!result.is_computation()) return err("result must be a computation, got " + result.str());
        hole = Type::arrow(*a, result);
        break;
      }
      case FrameKind::To: {
        auto n = operand_type(0);
        if (!n) return err("ill-typed body");
        if (result.kind() != TypeKind::F || *n != result) {
          return err("body type " + n->str() + " does not match " + result.str());
        }
        hole = Type::f(f.binder().type);
        break;
      }
      case FrameKind::Force:
        if (!result.is_computation()) return err("result must be a computation, got " + result.str());
        hole = Type::u(result);
        break;
      case FrameKind::Succ:
      case FrameKind::Pred:
        if (result != Type::integer()) return err("result must be int, got " + result.str());
        hole = Type::integer();
        break;
      case FrameKind::Ifz: {
        auto n = operand_type(0);
        auto p = operand_type(1);
        if (!n || !p) return err("ill-typed branch");
        if (*n != result || *p != result) return err("branches do not have type " + result.str());
        hole = Type::integer();
        break;
      }
      case FrameKind::Seq: {
        auto n = operand_type(0);
        if (!n) return err("ill-typed continuation");
        if (*n != result) return err("continuation does not have type " + result.str());
        hole = Type::unit();
        break;
      }
      case FrameKind::Proj1:
        if (!result.is_value()) return err("result must be a value type");
        hole = Type::prod(result, f.other());
        break;
      case FrameKind::Proj2:
        if (!result.is_value()) return err("result must be a value type");
        hole = Type::prod(f.other(), result);
        break;
      case FrameKind::Do: {
        auto n = operand_type(0);
        if (!n) return err("ill-typed body");
        if (result.kind() != TypeKind::V || *n != result) {
          return err("body does not have type " + result.str());
        }
        hole = Type::v(f.binder().type);
        break;
      }
    }
    if (hole.rank() > result.rank()) {
      return err("rank decreases from " + to_string(hole.rank()) + " to " + to_string(result.rank()));
    }
  }
  return hole;
}

}  // namespace cbpv::typing
