#include <gtest/gtest.h>

#include <regex>
#include <set>
#include <sstream>

#include "cbpv/derived.hpp"
#include "cbpv/generator.hpp"
#include "cbpv/harness.hpp"
#include "cbpv/opsem.hpp"
#include "cbpv/printer.hpp"
#include "helpers.hpp"

using namespace cbpv;
using namespace cbpv::test;
using opsem::Configuration;
using opsem::OutcomeKind;

namespace {

Term half_omega() { return parse("produce (ret * (+) omega[V unit])"); }

Configuration at_root(const std::string& src) { return opsem::initial(parse(src)); }

}  // namespace

TEST(Step, Beta) {
  Variable x = var("x", int_t());
  EvalContext c = EvalContext().push(Frame::to(var("y", int_t()), parse("produce ret *")));
  EvalContext ca = c.push(Frame::app_arg(num(4)));
  auto out = opsem::step({ca, Term::lam(x, Term::produce(Term::var(x)))});
  ASSERT_EQ(out.kind, OutcomeKind::Det);
  EXPECT_EQ(out.rule, "beta");
  EXPECT_EQ(out.next[0].context.str(), c.str());
  EXPECT_TRUE(alpha_equal(out.next[0].focus, Term::produce(num(4))));
}

TEST(Step, InitProduce) {
  auto out = opsem::step(at_root("produce ret *"));
  ASSERT_EQ(out.kind, OutcomeKind::Det);
  EXPECT_EQ(out.rule, "init-produce");
  EXPECT_EQ(out.next[0].context.initial(), InitialKind::Produce);
  EXPECT_FALSE(out.next[0].context.has_frames());
  EXPECT_TRUE(alpha_equal(out.next[0].focus, parse("ret *")));
  auto ret = opsem::step(out.next[0]);
  EXPECT_EQ(ret.rule, "init-ret");
  EXPECT_EQ(ret.next[0].context.initial(), InitialKind::ProduceRet);
}

TEST(Step, AxiomStar) {
  auto out = opsem::step({EvalContext(InitialKind::ProduceRet), Term::star()});
  EXPECT_EQ(out.kind, OutcomeKind::Terminal1);
  EXPECT_EQ(out.rule, "axiom-star");
  auto ab = opsem::step({EvalContext().push(Frame::app_arg(num(1))), Term::abort(Type::arrow(int_t(), fvunit()))});
  EXPECT_EQ(ab.kind, OutcomeKind::Terminal1);
  EXPECT_EQ(ab.rule, "axiom-abort");
}

TEST(Step, SequencingConsumesStar) {
  EvalContext c = EvalContext(InitialKind::Produce).push(Frame::seq(parse("ret *")));
  auto out = opsem::step({c, Term::star()});
  ASSERT_EQ(out.kind, OutcomeKind::Det);
  EXPECT_EQ(out.rule, "seq");
  EXPECT_FALSE(out.next[0].context.has_frames());
}

TEST(Step, DiscoveryAndContractions) {
  Configuration c = at_root("(produce 0) to x : int in ifz (succ x) (produce ret *) (produce ret *)");
  std::vector<std::string> rules;
  for (int i = 0; i < 20; ++i) {
    auto out = opsem::step(c);
    rules.push_back(out.rule);
    if (out.kind != OutcomeKind::Det) break;
    c = out.next[0];
  }
  std::vector<std::string> want{"discover", "to-produce", "discover", "discover", "succ",  "ifzN",
                                "init-produce", "init-ret", "axiom-star"};
  EXPECT_EQ(rules, want);
}

TEST(Step, RecUnfoldsInPlace) {
  Term r = parse("rec (x : U F V unit) thunk produce ret *");
  auto out = opsem::step({EvalContext().push(Frame::force()), r});
  ASSERT_EQ(out.kind, OutcomeKind::Det);
  EXPECT_EQ(out.rule, "rec");
  EXPECT_EQ(out.next[0].context.depth(), 1u);
  EXPECT_TRUE(alpha_equal(out.next[0].focus, parse("thunk produce ret *")));
}

TEST(Step, Splits) {
  auto p = opsem::step({EvalContext(InitialKind::Produce), parse("ret * (+) ret *")});
  EXPECT_EQ(p.kind, OutcomeKind::Split);
  EXPECT_EQ(p.split, opsem::SplitKind::PChoice);
  EXPECT_EQ(p.next.size(), 2u);
  auto n = opsem::step(at_root("produce ret * (x) abort[F V unit]"));
  EXPECT_EQ(n.split, opsem::SplitKind::NChoice);
  auto z = opsem::step(at_root("pifz 3 (produce ret *) abort[F V unit]"));
  EXPECT_EQ(z.split, opsem::SplitKind::PifzMax);
  ASSERT_EQ(z.next.size(), 3u);
  EXPECT_EQ(z.next[0].focus.kind(), TermKind::Ifz);
  auto g = opsem::step(at_root("obs[1/3] produce ret *"));
  EXPECT_EQ(g.kind, OutcomeKind::ObsGate);
  EXPECT_EQ(g.gate, Rational(1, 3));
  EXPECT_EQ(g.next[1].focus.kind(), TermKind::Star);
}

TEST(Step, FreeVariableInFocusThrows) {
  EXPECT_THROW(opsem::step({EvalContext(), Term::var(var("z", fvunit()))}), Error);
}

TEST(Prob, Examples) {
  auto h = opsem::prob(opsem::initial(half_omega()), 20);
  EXPECT_EQ(h.lower, half());
  // Omega branch is never certified; see ledger.
  EXPECT_FALSE(h.exact);
  Term omega = derived::omega(fvunit());
  for (std::uint64_t k : {0, 1, 5, 40}) EXPECT_EQ(opsem::prob(opsem::initial(omega), k).lower, 0);
  auto nch = opsem::prob(opsem::initial(Term::nchoice(parse("produce ret *"), omega)), 20);
  EXPECT_EQ(nch.lower, 0);
  auto ab = opsem::prob(opsem::initial(Term::abort(fvunit())), 1);
  EXPECT_EQ(ab.lower, 1);
  EXPECT_TRUE(ab.exact);
  EXPECT_EQ(opsem::prob(opsem::initial(Term::abort(fvunit())), 0).lower, 0);
}

TEST(Prob, RecFreeIsExact) {
  Term m = parse("produce (ret * (+) (ret * (+) ret *)) (x) pifz 1 (produce ret *) (produce (ret * (+) ret *))");
  EXPECT_EQ(typing::type_of(m), fvunit());
  auto s = opsem::prob(opsem::initial(m), 30);
  EXPECT_TRUE(s.exact);
  EXPECT_EQ(s.lower, 1);
  Term q = parse("produce (ret * (+) ret *) (x) (produce 0 to x : int in produce (ret (ifz x * *) (+) "
                 "(ret * (+) do u : unit <- ret *; ret u)))");
  EXPECT_EQ(typing::type_of(q), fvunit());
  auto r = opsem::prob(opsem::initial(q), 40);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.lower, 1);
}

TEST(PrLimit, SamplerTendsToOne) {
  Term m = parse(std::string("produce (do x : int <- (") + urej_src() + "); ret *)");
  auto r = opsem::pr_limit(m);
  EXPECT_GT(r.lower, Rational(1) - Rational(1, 100000));
  EXPECT_LE(r.lower, 1);
  EXPECT_NE(r.status, opsem::LimitStatus::BudgetExhausted);
}

TEST(PrLimit, OmegaExhaustsTheBudget) {
  opsem::LimitOptions o;
  o.max_steps = 5000;
  auto r = opsem::pr_limit(derived::omega(fvunit()), o);
  EXPECT_EQ(r.lower, 0);
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.status, opsem::LimitStatus::BudgetExhausted);
  EXPECT_GE(r.steps_used, 5000u);
}

TEST(PrLimit, GateNotStrictlyExceeded) {
  Term gated = Term::seq(Term::obs(half(), half_omega()), parse("produce ret *"));
  opsem::LimitOptions o;
  o.max_steps = 200000;
  EXPECT_EQ(opsem::pr_limit(gated, o).lower, 0);
  Term passes = Term::seq(Term::obs(Rational(1, 3), half_omega()), parse("produce ret *"));
  EXPECT_EQ(opsem::pr_limit(passes, o).lower, 1);
}

TEST(PrLimit, PlateauBeforeARecFreeBranchFinishesIsNotConvergence) {
  // the left branch needs more depth than the plateau between budgets 4 and 8
  for (const char* src : {"produce ((do x : unit <- ret *; ifz (snd ifz 0 <x, 0> <x, 1>) (snd <2, ret x>) (ret *)) (+) ret *)",
                          "produce ((ifz 0 * *; rec (x : V unit) ret * (+) ret *) (+) ret *)"}) {
    auto r = opsem::pr_limit(parse(src));
    EXPECT_EQ(r.status, opsem::LimitStatus::Exact) << src;
    EXPECT_EQ(r.lower, Rational(1)) << src;
  }
  auto cut = opsem::prob(at_root("produce ((ifz 0 * *; ret *) (+) ret *)"), 3);
  EXPECT_TRUE(cut.rec_free_cut);
  auto unfolded = opsem::prob(opsem::initial(half_omega()), 6);
  EXPECT_FALSE(unfolded.rec_free_cut);
  opsem::ProbOptions memo;
  memo.memoize = true;
  EXPECT_FALSE(opsem::prob(opsem::initial(half_omega()), 6, memo).rec_free_cut);
}

TEST(PrLimit, Errors) {
  EXPECT_THROW(opsem::pr_limit(parse("produce 3")), typing::TypeErrorException);
  EXPECT_THROW(opsem::pr_limit(Term::produce(Term::ret(Term::var(var("z", unit_t()))))), Error);
}

TEST(PrConfig, Examples) {
  auto r = opsem::pr_config(EvalContext(InitialKind::ProduceRet), Term::star());
  EXPECT_EQ(r.lower, 1);
  EXPECT_TRUE(r.exact);
  EXPECT_THROW(opsem::pr_config(EvalContext().push(Frame::succ()), num(3)), ContextError);
  EXPECT_THROW(opsem::pr_config(EvalContext(InitialKind::Produce), num(3)), ContextError);
}

TEST(PrConfig, AgreesWithPlug) {
  harness::GenPolicy p;
  p.seed = 77;
  p.max_depth = 4;
  p.rec_probability = 0.2;
  harness::Generator gen(p);
  opsem::LimitOptions o;
  o.max_steps = 20000;
  int compared = 0;
  for (int i = 0; i < 150; ++i) {
    auto [c, hole] = gen.context(3);
    Term m = gen.term(hole);
    auto a = opsem::pr_config(c, m, o);
    auto b = opsem::pr_limit(plug(c, m), o);
    if (a.status == opsem::LimitStatus::BudgetExhausted || b.status == opsem::LimitStatus::BudgetExhausted) continue;
    ++compared;
    Rational gap = a.lower - b.lower;
    if (gap < 0) gap = -gap;
    EXPECT_LT(gap, Rational(1, 1000)) << c.str() << " . " << print_term(m);
    if (a.exact && b.exact) EXPECT_EQ(a.lower, b.lower);
  }
  EXPECT_GT(compared, 100);
}

namespace {

std::vector<Configuration> random_configs(std::uint64_t seed, int count) {
  harness::GenPolicy p;
  p.seed = seed;
  p.max_depth = 4;
  p.rec_probability = 0.25;
  harness::Generator gen(p);
  std::vector<Configuration> out;
  for (int i = 0; i < count; ++i) {
    auto [c, hole] = gen.context(2);
    out.push_back({core_context(c), typing::elaborate(gen.term(hole))});
  }
  return out;
}

}  // namespace

TEST(Prob, MonotoneInBudget) {
  opsem::ProbOptions o;
  o.step_limit = 50000;
  for (const auto& cfg : random_configs(5, 120)) {
    Rational prev = 0;
    for (std::uint64_t k = 0; k <= 14; ++k) {
      auto r = opsem::prob(cfg, k, o);
      if (r.truncated) break;
      EXPECT_GE(r.lower, prev) << cfg.str() << " k=" << k;
      EXPECT_GE(r.lower, 0);
      EXPECT_LE(r.lower, 1);
      prev = r.lower;
    }
  }
}

TEST(Prob, StepInvariance) {
  opsem::ProbOptions o;
  o.step_limit = 50000;
  int checked = 0;
  for (auto cfg : random_configs(6, 120)) {
    for (int n = 0; n < 8; ++n) {
      auto out = opsem::step(cfg);
      if (out.kind != OutcomeKind::Det) break;
      const Configuration& next = out.next[0];
      for (std::uint64_t k : {2, 6, 12}) {
        auto before = opsem::prob(cfg, k + 1, o);
        auto after = opsem::prob(next, k, o);
        if (before.truncated || after.truncated) continue;
        EXPECT_GE(before.lower, after.lower) << cfg.str();
        ++checked;
      }
      cfg = next;
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(Prob, MemoizationDoesNotChangeResults) {
  opsem::ProbOptions plain;
  plain.step_limit = 50000;
  opsem::ProbOptions memo = plain;
  memo.memoize = true;
  for (const auto& cfg : random_configs(8, 80)) {
    auto a = opsem::prob(cfg, 10, plain);
    auto b = opsem::prob(cfg, 10, memo);
    if (a.truncated || b.truncated) continue;
    EXPECT_EQ(a.lower, b.lower) << cfg.str();
    EXPECT_EQ(a.exact, b.exact) << cfg.str();
  }
}

TEST(Trace, UsesTheFixedRuleNames) {
  const std::set<std::string> names{"discover",     "beta",         "to-produce",    "force-thunk",   "init-produce",
                                    "pred",         "succ",         "ifz0",          "ifzN",          "seq",
                                    "proj1",        "proj2",        "do-ret",        "init-ret",      "rec",
                                    "axiom-star",   "axiom-abort",  "split-pchoice", "split-nchoice", "split-pifz",
                                    "obs-gate"};
  std::ostringstream out;
  opsem::LimitOptions o;
  o.trace = &out;
  Term m = Term::seq(Term::obs(Rational(1, 3), half_omega()),
                     parse("pifz 0 (produce ret *) abort[F V unit] (x) (produce 1 to y : int in produce ret *)"));
  opsem::pr_limit(m, o);
  std::istringstream lines(out.str());
  std::string line;
  std::regex shape(R"(^STEP (\d+): .* --([a-zA-Z0-9-]+)--> .*$)");
  std::set<std::string> seen;
  int count = 0;
  while (std::getline(lines, line)) {
    std::smatch mt;
    ASSERT_TRUE(std::regex_match(line, mt, shape)) << line;
    EXPECT_TRUE(names.count(mt[2].str())) << line;
    seen.insert(mt[2].str());
    ++count;
  }
  EXPECT_GT(count, 10);
  for (const char* r : {"obs-gate", "split-pchoice", "split-pifz", "split-nchoice", "to-produce", "axiom-star"}) {
    EXPECT_TRUE(seen.count(r)) << r;
  }
}
