#include "oracle.hpp"

#include <optional>
#include <string>
#include <vector>

#include "cbpv/typing.hpp"

namespace cbpv::testing {

namespace {

enum class Shell { None, Produce, ProduceRet };

struct State {
  Shell shell;
  Term body;
};

struct Val {
  Rational v;
  bool exact;
};

Val cap1(Val x) {
  if (x.v == 1) x.exact = true;
  return x;
}

Term replace_at(const Term& t, const std::vector<std::size_t>& path, std::size_t i, const Term& with) {
  if (i == path.size()) return with;
  std::vector<Term> kids;
  for (std::size_t k = 0; k < t.arity(); ++k) kids.push_back(t.child(k));
  kids[path[i]] = replace_at(kids[path[i]], path, i + 1, with);
  return t.rebuild(std::move(kids));
}

const Term& at(const Term& t, const std::vector<std::size_t>& path) {
  const Term* cur = &t;
  for (auto k : path) cur = &cur->child(k);
  return *cur;
}

bool head_is(const Term& t, TermKind k) { return t.child(0).is(k); }

// Path from the root to the node whose evaluation happens next: either a
// contractible node (its head is already a matching value) or a choice,
// rec, obs or abort node.
std::vector<std::size_t> locate(const Term& root) {
  std::vector<std::size_t> path;
  const Term* t = &root;
  for (;;) {
    bool go_down = false;
    switch (t->kind()) {
      case TermKind::App: go_down = !head_is(*t, TermKind::Lam); break;
      case TermKind::To: go_down = !head_is(*t, TermKind::Produce); break;
      case TermKind::Force: go_down = !head_is(*t, TermKind::Thunk); break;
      case TermKind::Succ:
      case TermKind::Pred:
      case TermKind::Ifz: go_down = !head_is(*t, TermKind::Num); break;
      case TermKind::Seq: go_down = !head_is(*t, TermKind::Star); break;
      case TermKind::Proj1:
      case TermKind::Proj2: go_down = !head_is(*t, TermKind::Pair); break;
      case TermKind::Do: go_down = !head_is(*t, TermKind::Ret); break;
      default: break;
    }
    if (!go_down) return path;
    path.push_back(0);
    t = &t->child(0);
  }
}

// Contracts a redex whose head is a value; nullopt if the node is not one.
std::optional<Term> contract(const Term& n) {
  switch (n.kind()) {
    case TermKind::App: {
      const Term& f = n.child(0);
      if (!f.is(TermKind::Lam)) return std::nullopt;
      return substitute_unchecked(f.child(0), f.variable(), n.child(1));
    }
    case TermKind::To:
      if (!head_is(n, TermKind::Produce)) return std::nullopt;
      return substitute_unchecked(n.child(1), n.variable(), n.child(0).child(0));
    case TermKind::Do:
      if (!head_is(n, TermKind::Ret)) return std::nullopt;
      return substitute_unchecked(n.child(1), n.variable(), n.child(0).child(0));
    case TermKind::Force:
      if (!head_is(n, TermKind::Thunk)) return std::nullopt;
      return n.child(0).child(0);
    case TermKind::Succ:
    case TermKind::Pred: {
      if (!head_is(n, TermKind::Num)) return std::nullopt;
      BigInt v = n.child(0).number();
      v += n.is(TermKind::Succ) ? 1 : -1;
      return Term::num(v);
    }
    case TermKind::Ifz:
      if (!head_is(n, TermKind::Num)) return std::nullopt;
      return n.child(n.child(0).number() == 0 ? 1 : 2);
    case TermKind::Seq:
      if (!head_is(n, TermKind::Star)) return std::nullopt;
      return n.child(1);
    case TermKind::Proj1:
    case TermKind::Proj2:
      if (!head_is(n, TermKind::Pair)) return std::nullopt;
      return n.child(0).child(n.is(TermKind::Proj1) ? 0 : 1);
    default:
      return std::nullopt;
  }
}

class Oracle {
 public:
  explicit Oracle(const OracleLimits& limits) : limits_(limits) {}

  Val run(State s, std::uint32_t unfolds, std::uint64_t steps, std::uint32_t nesting = 0) {
    if (nesting > limits_.nesting) return {0, false};
    // Brent's cycle detection over the deterministic chain
    std::optional<State> checkpoint;
    std::uint64_t power = 1, since = 0;
    for (;;) {
      if (++nodes_ > limits_.nodes) return {0, false};
      // Initial shells.
      if (s.shell == Shell::None && s.body.is(TermKind::Produce)) {
        s = {Shell::Produce, s.body.child(0)};
        continue;
      }
      if (s.shell == Shell::Produce && s.body.is(TermKind::Ret)) {
        s = {Shell::ProduceRet, s.body.child(0)};
        continue;
      }
      if (s.shell == Shell::ProduceRet && s.body.is(TermKind::Star)) return {1, true};

      if (checkpoint && checkpoint->shell == s.shell && checkpoint->body.size() == s.body.size() &&
          alpha_equal(checkpoint->body, s.body)) {
        return {0, true};
      }
      if (!checkpoint || ++since == power) {
        checkpoint = s;
        power *= 2;
        since = 0;
      }
      if (steps == 0 || s.body.size() > limits_.term_size) return {0, false};
      --steps;

      auto path = locate(s.body);
      const Term& n = at(s.body, path);
      auto with = [&](const Term& replacement) { return State{s.shell, replace_at(s.body, path, 0, replacement)}; };

      if (auto r = contract(n)) {
        s = with(*r);
        continue;
      }
      switch (n.kind()) {
        case TermKind::Rec:
          if (unfolds == 0) return {0, false};
          --unfolds;
          s = with(substitute_unchecked(n.child(0), n.variable(), n));
          continue;
        case TermKind::Abort:
          return {1, true};
        case TermKind::PChoice: {
          Val a = run(with(n.child(0)), unfolds, steps, nesting + 1);
          Val b = run(with(n.child(1)), unfolds, steps, nesting + 1);
          return cap1({(a.v + b.v) / 2, a.exact && b.exact});
        }
        case TermKind::NChoice: {
          Val a = run(with(n.child(0)), unfolds, steps, nesting + 1);
          if (a.exact && a.v == 0) return a;
          Val b = run(with(n.child(1)), unfolds, steps, nesting + 1);
          return lesser(a, b);
        }
        case TermKind::Pifz: {
          const Term& k = n.child(0);
          if (k.is(TermKind::Num)) {
            s = with(n.child(k.number() == 0 ? 1 : 2));
            continue;
          }
          Val both = lesser(run(with(n.child(1)), unfolds, steps, nesting + 1),
                            run(with(n.child(2)), unfolds, steps, nesting + 1));
          if (both.exact && both.v == 1) return both;
          Val seq = run(with(Term::ifz(k, n.child(1), n.child(2))), unfolds, steps, nesting + 1);
          return cap1({seq.v > both.v ? seq.v : both.v, seq.exact && both.exact});
        }
        case TermKind::Obs: {
          Val inner = run(State{Shell::None, n.child(0)}, unfolds, steps, nesting + 1);
          if (!(inner.v > n.bound())) return {0, inner.exact};
          s = with(Term::star());
          continue;
        }
        default:
          return {0, true};
      }
    }
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  static Val lesser(const Val& a, const Val& b) {
    Val out{a.v < b.v ? a.v : b.v, false};
    out.exact = (a.exact && b.exact) || (a.exact && a.v <= b.v) || (b.exact && b.v <= a.v);
    return cap1(out);
  }

  OracleLimits limits_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

OracleResult oracle_probability(const Term& m, const OracleLimits& limits) {
  Term core = typing::elaborate(m);
  Oracle o(limits);
  Val v = o.run(State{Shell::None, core}, limits.unfolds, limits.steps);
  OracleResult r;
  r.value = v.v;
  r.exact = v.exact;
  r.nodes = o.nodes();
  if (o.nodes() > limits.nodes) r.exact = false;
  return r;
}

}  // namespace cbpv::testing
