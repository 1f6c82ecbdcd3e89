#include "cbpv/opsem.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>

#include "cbpv/printer.hpp"
#include "cbpv/typing.hpp"

namespace cbpv::opsem {

std::string Configuration::str() const { return context.str() + " · " + print_term(focus); }

std::string Configuration::key() const {
  std::string out;
  out += static_cast<char>('0' + static_cast<int>(context.initial()));
  for (const auto& f : context.frames()) {
    out += '|';
    out += to_string(f.kind());
    switch (f.kind()) {
      case FrameKind::To:
      case FrameKind::Do:
        out += canonical_key(Term::lam(f.binder(), f.operand(0)));
        break;
      case FrameKind::Proj1:
      case FrameKind::Proj2:
        out += f.other().str();
        break;
      default:
        for (std::size_t i = 0; i < f.operand_count(); ++i) out += canonical_key(f.operand(i)) + ",";
    }
  }
  out += "||";
  out += canonical_key(focus);
  return out;
}

Configuration initial(const Term& m) { return Configuration{EvalContext(InitialKind::Hole), m}; }

const char* to_string(LimitStatus s) {
  switch (s) {
    case LimitStatus::Exact: return "exact";
    case LimitStatus::Converged: return "converged";
    case LimitStatus::BudgetExhausted: return "budget exhausted";
  }
  return "?";
}

namespace {

StepOutcome det(const char* rule, EvalContext c, Term focus) {
  StepOutcome out;
  out.kind = OutcomeKind::Det;
  out.rule = rule;
  out.next.push_back(Configuration{std::move(c), std::move(focus)});
  return out;
}

StepOutcome terminal(const char* rule) {
  StepOutcome out;
  out.kind = OutcomeKind::Terminal1;
  out.rule = rule;
  return out;
}

StepOutcome split(const char* rule, SplitKind kind, std::vector<Configuration> next) {
  StepOutcome out;
  out.kind = OutcomeKind::Split;
  out.rule = rule;
  out.split = kind;
  out.next = std::move(next);
  return out;
}

StepOutcome stuck() {
  StepOutcome out;
  out.kind = OutcomeKind::Stuck;
  out.rule = "stuck";
  return out;
}

bool top_is(const EvalContext& c, FrameKind k) { return c.has_frames() && c.top().kind() == k; }

}  // namespace

StepOutcome step(const Configuration& cfg) {
  const EvalContext& c = cfg.context;
  const Term& m = cfg.focus;
  switch (m.kind()) {
    // Redex discovery: push the elementary frame around the principal subterm.
    case TermKind::App:
      return det("discover", c.push(Frame::app_arg(m.child(1))), m.child(0));
    case TermKind::To:
      return det("discover", c.push(Frame::to(m.variable(), m.child(1))), m.child(0));
    case TermKind::Force:
      return det("discover", c.push(Frame::force()), m.child(0));
    case TermKind::Succ:
      return det("discover", c.push(Frame::succ()), m.child(0));
    case TermKind::Pred:
      return det("discover", c.push(Frame::pred()), m.child(0));
    case TermKind::Ifz:
      return det("discover", c.push(Frame::ifz(m.child(1), m.child(2))), m.child(0));
    case TermKind::Seq:
      return det("discover", c.push(Frame::seq(m.child(1))), m.child(0));
    case TermKind::Proj1:
    case TermKind::Proj2: {
      Type pair = typing::type_of(m.child(0));
      if (pair.kind() != TypeKind::Prod) throw Error("projection of a non-pair in focus");
      Frame f = m.is(TermKind::Proj1) ? Frame::proj1(pair.second()) : Frame::proj2(pair.first());
      return det("discover", c.push(std::move(f)), m.child(0));
    }
    case TermKind::Do:
      return det("discover", c.push(Frame::do_(m.variable(), m.child(1))), m.child(0));

    // Contractions against the innermost frame.
    case TermKind::Lam:
      if (top_is(c, FrameKind::AppArg)) {
        return det("beta", c.pop(), substitute_unchecked(m.child(0), m.variable(), c.top().operand(0)));
      }
      return stuck();
    case TermKind::Produce:
      if (top_is(c, FrameKind::To)) {
        const Frame& f = c.top();
        return det("to-produce", c.pop(), substitute_unchecked(f.operand(0), f.binder(), m.child(0)));
      }
      if (!c.has_frames() && c.initial() == InitialKind::Hole) {
        return det("init-produce", EvalContext(InitialKind::Produce), m.child(0));
      }
      return stuck();
    case TermKind::Thunk:
      if (top_is(c, FrameKind::Force)) return det("force-thunk", c.pop(), m.child(0));
      return stuck();
    case TermKind::Num:
      if (top_is(c, FrameKind::Pred)) return det("pred", c.pop(), Term::num(BigInt(m.number() - 1)));
      if (top_is(c, FrameKind::Succ)) return det("succ", c.pop(), Term::num(BigInt(m.number() + 1)));
      if (top_is(c, FrameKind::Ifz)) {
        const Frame& f = c.top();
        if (m.number() == 0) return det("ifz0", c.pop(), f.operand(0));
        return det("ifzN", c.pop(), f.operand(1));
      }
      return stuck();
    case TermKind::Star:
      if (top_is(c, FrameKind::Seq)) return det("seq", c.pop(), c.top().operand(0));
      if (!c.has_frames() && c.initial() == InitialKind::ProduceRet) return terminal("axiom-star");
      return stuck();
    case TermKind::Pair:
      if (top_is(c, FrameKind::Proj1)) return det("proj1", c.pop(), m.child(0));
      if (top_is(c, FrameKind::Proj2)) return det("proj2", c.pop(), m.child(1));
      return stuck();
    case TermKind::Ret:
      if (top_is(c, FrameKind::Do)) {
        const Frame& f = c.top();
        return det("do-ret", c.pop(), substitute_unchecked(f.operand(0), f.binder(), m.child(0)));
      }
      if (!c.has_frames() && c.initial() == InitialKind::Produce) {
        return det("init-ret", EvalContext(InitialKind::ProduceRet), m.child(0));
      }
      return stuck();

    case TermKind::Rec:
      return det("rec", c, substitute_unchecked(m.child(0), m.variable(), m));

    case TermKind::PChoice:
      return split("split-pchoice", SplitKind::PChoice,
                   {Configuration{c, m.child(0)}, Configuration{c, m.child(1)}});
    case TermKind::NChoice:
      return split("split-nchoice", SplitKind::NChoice,
                   {Configuration{c, m.child(0)}, Configuration{c, m.child(1)}});
    case TermKind::Pifz:
      return split("split-pifz", SplitKind::PifzMax,
                   {Configuration{c, Term::ifz(m.child(0), m.child(1), m.child(2))}, Configuration{c, m.child(1)},
                    Configuration{c, m.child(2)}});
    case TermKind::Obs: {
      StepOutcome out;
      out.kind = OutcomeKind::ObsGate;
      out.rule = "obs-gate";
      out.gate = m.bound();
      out.next.push_back(Configuration{EvalContext(InitialKind::Hole), m.child(0)});
      out.next.push_back(Configuration{c, Term::star()});
      return out;
    }
    case TermKind::Abort:
      return terminal("axiom-abort");
    case TermKind::Var:
      throw Error("free variable " + m.variable().name + " in focus; configurations must be ground");
  }
  return stuck();
}

namespace {

struct Val {
  Rational lower;
  bool exact;
  // Some budget cut below fell on a path with no rec unfolding.
  bool fresh_cut = false;
};

Val settle(Val v) {
  if (v.lower == 1) v.exact = true;
  return v;
}

Val min_of(const Val& a, const Val& b) {
  Val out{a.lower < b.lower ? a.lower : b.lower, false};
  out.exact = (a.exact && b.exact) || (a.exact && a.lower <= b.lower) || (b.exact && b.lower <= a.lower);
  return settle(out);
}

Val max_of(const Val& a, const Val& b) {
  Val out{a.lower > b.lower ? a.lower : b.lower, a.exact && b.exact};
  return settle(out);
}

struct Node {
  StepOutcome out;
  std::uint64_t budget;
  std::vector<Val> got;
  std::string key;
  bool chain_unfolded;
};

struct MemoEntry {
  Val val;
  std::uint64_t budget;
};

class Engine {
 public:
  Engine(const ProbOptions& options) : options_(options) {}

  ProbResult run(const Configuration& start, std::uint64_t budget) {
    std::optional<Val> ret = descend(start, budget);
    for (;;) {
      if (ret) {
        if (stack_.empty()) break;
        stack_.back().got.push_back(*ret);
        ret.reset();
      }
      Node& node = stack_.back();
      if (auto done = finished(node)) {
        for (const auto& g : node.got) done->fresh_cut = done->fresh_cut || g.fresh_cut;
        if (options_.memoize) remember(node.key, *done, node.budget);
        if (node.chain_unfolded) done->fresh_cut = false;
        stack_.pop_back();
        ret = done;
        continue;
      }
      std::size_t i = node.got.size();
      ret = descend(node.out.next[i], node.budget - 1);
    }
    ProbResult r;
    r.lower = ret->lower;
    r.exact = ret->exact;
    r.steps_used = steps_;
    r.truncated = truncated_;
    r.rec_free_cut = ret->fresh_cut;
    return r;
  }

 private:
  const ProbOptions& options_;
  std::vector<Node> stack_;
  std::uint64_t steps_ = 0;
  bool truncated_ = false;
  std::unordered_map<std::string, MemoEntry> memo_;

  void remember(const std::string& key, const Val& v, std::uint64_t budget) {
    auto it = memo_.find(key);
    if (it == memo_.end()) {
      memo_.emplace(key, MemoEntry{v, budget});
    } else if (!it->second.val.exact && (v.exact || budget > it->second.budget)) {
      it->second = MemoEntry{v, budget};
    }
  }

  std::optional<Val> recall(const std::string& key, std::uint64_t budget) const {
    auto it = memo_.find(key);
    if (it == memo_.end()) return std::nullopt;
    const MemoEntry& e = it->second;
    if (e.budget == budget || (e.val.exact && budget >= e.budget)) return e.val;
    return std::nullopt;
  }

  void trace(const Configuration& cfg, const StepOutcome& out) {
    std::ostream& os = *options_.trace;
    os << "STEP " << steps_ << ": " << cfg.context.str() << " · " << summarize_term(cfg.focus) << " --" << out.rule
       << "--> ";
    switch (out.kind) {
      case OutcomeKind::Det:
        os << out.next[0].context.str() << " · " << summarize_term(out.next[0].focus);
        break;
      case OutcomeKind::Terminal1:
        os << "1";
        break;
      case OutcomeKind::Split:
        os << out.next.size() << " branches";
        break;
      case OutcomeKind::ObsGate:
        os << "gate " << to_fraction_string(out.gate);
        break;
      case OutcomeKind::Stuck:
        os << "0";
        break;
    }
    os << '\n';
  }

  // Follows deterministic steps; returns a value, or pushes a node and
  // returns nothing.
  std::optional<Val> descend(Configuration cfg, std::uint64_t budget) {
    bool unfolded = false;
    for (;;) {
      if (truncated_) return Val{0, false};
      if (budget == 0) return Val{0, false, !unfolded};
      if (options_.step_limit != 0 && steps_ >= options_.step_limit) {
        truncated_ = true;
        return Val{0, false};
      }
      StepOutcome out = step(cfg);
      ++steps_;
      if (options_.trace) trace(cfg, out);
      switch (out.kind) {
        case OutcomeKind::Det:
          if (cfg.focus.is(TermKind::Rec) && !unfolded) {
            const auto& fv = cfg.focus.child(0).free_vars();
            unfolded = std::find(fv.begin(), fv.end(), cfg.focus.variable()) != fv.end();
          }
          cfg = std::move(out.next[0]);
          --budget;
          continue;
        case OutcomeKind::Terminal1:
          return Val{1, true};
        case OutcomeKind::Stuck:
          return Val{0, true};
        case OutcomeKind::Split:
        case OutcomeKind::ObsGate: {
          std::string key;
          if (options_.memoize) {
            key = cfg.key();
            if (auto hit = recall(key, budget)) {
              if (unfolded) hit->fresh_cut = false;
              return hit;
            }
          }
          stack_.push_back(Node{std::move(out), budget, {}, std::move(key), unfolded});
          return std::nullopt;
        }
      }
    }
  }

  static std::optional<Val> finished(const Node& n) {
    const auto& g = n.got;
    if (n.out.kind == OutcomeKind::ObsGate) {
      if (g.size() == 1) {
        if (g[0].lower > n.out.gate) return std::nullopt;
        return Val{0, g[0].exact};
      }
      if (g.size() == 2) return g[1];
      return std::nullopt;
    }
    switch (n.out.split) {
      case SplitKind::PChoice:
        if (g.size() < 2) return std::nullopt;
        return settle(Val{(g[0].lower + g[1].lower) / 2, g[0].exact && g[1].exact});
      case SplitKind::NChoice:
        if (g.size() == 1 && g[0].exact && g[0].lower == 0) return Val{0, true};
        if (g.size() < 2) return std::nullopt;
        return min_of(g[0], g[1]);
      case SplitKind::PifzMax:
        if (g.size() == 1 && g[0].exact && g[0].lower == 1) return g[0];
        if (g.size() == 2 && g[1].exact && g[1].lower == 0) return max_of(g[0], Val{0, true});
        if (g.size() < 3) return std::nullopt;
        return max_of(g[0], min_of(g[1], g[2]));
    }
    return std::nullopt;
  }
};

void require_closed(const Term& m, const char* what) {
  if (!m.closed()) {
    throw Error(std::string(what) + " must be ground; free variable " + m.free_vars().front().name);
  }
}

LimitResult deepen(const Configuration& cfg, const LimitOptions& options) {
  LimitResult best;
  std::optional<Rational> previous;
  std::uint64_t depth = 1;
  for (;;) {
    std::uint64_t remaining = options.max_steps > best.steps_used ? options.max_steps - best.steps_used : 0;
    if (remaining == 0) {
      best.status = LimitStatus::BudgetExhausted;
      return best;
    }
    ProbOptions po;
    po.step_limit = remaining;
    po.trace = options.trace;
    po.memoize = options.memoize;
    ProbResult r = prob(cfg, depth, po);
    best.steps_used += r.steps_used;
    best.depth = depth;
    if (r.lower > best.lower || (r.lower == best.lower && r.exact)) {
      best.lower = r.lower;
      best.exact = r.exact;
    }
    if (r.exact) {
      best.lower = r.lower;
      best.exact = true;
      best.status = LimitStatus::Exact;
      return best;
    }
    if (r.truncated) {
      best.status = LimitStatus::BudgetExhausted;
      return best;
    }
    // A cut path that never unfolded rec still finishes at some finite depth,
    // so a plateau there is not convergence.
    if (!r.rec_free_cut && previous && *previous > 0 && r.lower - *previous < options.epsilon) {
      best.status = LimitStatus::Converged;
      return best;
    }
    previous = r.lower;
    if (depth > (std::uint64_t{1} << 62)) {
      best.status = LimitStatus::BudgetExhausted;
      return best;
    }
    depth *= 2;
  }
}

}  // namespace

ProbResult prob(const Configuration& cfg, std::uint64_t budget, const ProbOptions& options) {
  return Engine(options).run(cfg, budget);
}

LimitResult pr_limit(const Term& m, const LimitOptions& options) {
  Type t = typing::type_of(m);
  if (t != fvunit()) {
    throw typing::TypeErrorException(typing::TypeError{"expected type F V unit, got " + t.str(), {}, m.span()});
  }
  require_closed(m, "the term");
  return deepen(initial(typing::elaborate(m)), options);
}

LimitResult pr_config(const EvalContext& c, const Term& m, const LimitOptions& options) {
  auto hole = typing::check_context(c);
  if (!hole.ok()) throw ContextError("ill-typed context: " + hole.error().message);
  Type t = typing::type_of(m);
  if (t != hole.type()) {
    throw ContextError("hole type mismatch: context expects " + hole.type().str() + " but the term has type " +
                       t.str());
  }
  require_closed(m, "the term");
  EvalContext core(c.initial());
  for (const auto& f : c.frames()) {
    for (std::size_t i = 0; i < f.operand_count(); ++i) {
      bool binds = f.kind() == FrameKind::To || f.kind() == FrameKind::Do;
      for (const auto& v : f.operand(i).free_vars()) {
        if (!binds || v != f.binder()) throw Error("the context must be ground; free variable " + v.name);
      }
    }
    switch (f.kind()) {
      case FrameKind::AppArg: core = core.push(Frame::app_arg(typing::elaborate(f.operand(0)))); break;
      case FrameKind::To: core = core.push(Frame::to(f.binder(), typing::elaborate(f.operand(0)))); break;
      case FrameKind::Ifz:
        core = core.push(Frame::ifz(typing::elaborate(f.operand(0)), typing::elaborate(f.operand(1))));
        break;
      case FrameKind::Seq: core = core.push(Frame::seq(typing::elaborate(f.operand(0)))); break;
      case FrameKind::Do: core = core.push(Frame::do_(f.binder(), typing::elaborate(f.operand(0)))); break;
      default: core = core.push(f); break;
    }
  }
  return deepen(Configuration{core, typing::elaborate(m)}, options);
}

}  // namespace cbpv::opsem
