#include <gtest/gtest.h>

#include "cbpv/context.hpp"
#include "cbpv/derived.hpp"
#include "cbpv/generator.hpp"
#include "cbpv/printer.hpp"
#include "cbpv/typing.hpp"
#include "helpers.hpp"

using namespace cbpv;
using namespace cbpv::test;

TEST(Substitute, VariableCase) {
  Variable x = var("x", int_t());
  EXPECT_TRUE(alpha_equal(substitute(Term::var(x), x, num(3)), num(3)));
}

TEST(Substitute, RenamesACapturingBinder) {
  Variable x = var("x", int_t());
  Variable y = var("y", int_t());
  Term m = Term::lam(y, Term::produce(Term::var(x)));
  Term r = substitute(m, x, Term::var(y));
  ASSERT_TRUE(r.is(TermKind::Lam));
  EXPECT_NE(r.variable().name, "y");
  EXPECT_TRUE(r.has_free(y));
  EXPECT_TRUE(alpha_equal(r, Term::lam(var("z", int_t()), Term::produce(Term::var(y)))));
}

TEST(Substitute, RecUnfolding) {
  Variable x = var("x", vint());
  Term rec = Term::rec(x, Term::pchoice(Term::ret(num(0)), Term::var(x)));
  Term unfolded = substitute(rec.child(0), x, rec);
  EXPECT_TRUE(alpha_equal(unfolded, Term::pchoice(Term::ret(num(0)), rec)));
  EXPECT_TRUE(unfolded.closed());
}

TEST(Substitute, TypeMismatchThrows) {
  Variable x = var("x", int_t());
  EXPECT_THROW(substitute(Term::var(x), x, Term::star()), SubstitutionTypeError);
}

TEST(Substitute, SameNameOtherTypeIsUntouched) {
  Variable xi = var("x", int_t());
  Variable xu = var("x", unit_t());
  Term m = Term::pair(Term::var(xi), Term::var(xu));
  Term r = substitute(m, xi, num(5));
  EXPECT_TRUE(alpha_equal(r, Term::pair(num(5), Term::var(xu))));
}

TEST(Substitute, SimultaneousIsNotSequential) {
  Variable x = var("x", int_t());
  Variable y = var("y", int_t());
  Term m = Term::pair(Term::var(x), Term::var(y));
  Term r = substitute_all(m, {{x, Term::var(y)}, {y, num(1)}});
  EXPECT_TRUE(alpha_equal(r, Term::pair(Term::var(y), num(1))));
}

TEST(Substitute, CompositionLaw) {
  // M[x:=N][y:=P] = M[x:=N[y:=P], y:=P]
  Variable x = var("x", int_t());
  Variable y = var("y", int_t());
  Variable z = var("z", int_t());
  Term m = Term::lam(z, Term::produce(Term::pair(Term::var(x), Term::pair(Term::var(y), Term::var(z)))));
  Term n = Term::succ(Term::var(y));
  Term p = Term::pred(Term::var(z));
  Term lhs = substitute(substitute(m, x, n), y, p);
  Term rhs = substitute_all(m, {{x, substitute(n, y, p)}, {y, p}});
  EXPECT_TRUE(alpha_equal(lhs, rhs));
  EXPECT_TRUE(lhs.has_free(z));
}

TEST(Alpha, Examples) {
  Variable x = var("x", int_t());
  Variable y = var("y", int_t());
  EXPECT_TRUE(alpha_equal(Term::lam(x, Term::produce(Term::var(x))), Term::lam(y, Term::produce(Term::var(y)))));
  EXPECT_FALSE(alpha_equal(Term::lam(x, Term::produce(Term::var(x))), Term::lam(x, Term::produce(num(0)))));
  EXPECT_TRUE(alpha_equal(derived::omega(int_t()), Term::rec(y, Term::var(y))));
  EXPECT_FALSE(alpha_equal(derived::omega(int_t()), derived::omega(unit_t())));
}

TEST(Alpha, CanonicalKeyAgreesWithAlphaEqual) {
  Variable x = var("x", int_t());
  Variable y = var("y", int_t());
  Term a = Term::lam(x, Term::lam(y, Term::produce(Term::pair(Term::var(x), Term::var(y)))));
  Term b = Term::lam(y, Term::lam(x, Term::produce(Term::pair(Term::var(y), Term::var(x)))));
  Term c = Term::lam(y, Term::lam(x, Term::produce(Term::pair(Term::var(x), Term::var(y)))));
  EXPECT_TRUE(alpha_equal(a, b));
  EXPECT_EQ(canonical_key(a), canonical_key(b));
  EXPECT_FALSE(alpha_equal(a, c));
  EXPECT_NE(canonical_key(a), canonical_key(c));
}

TEST(Plug, Examples) {
  EvalContext succ = EvalContext().push(Frame::succ());
  EXPECT_TRUE(alpha_equal(plug_unchecked(succ, num(3)), Term::succ(num(3))));
  Term m = parse("abort[F V unit]");
  EXPECT_TRUE(alpha_equal(plug(EvalContext(), m), m));
  EXPECT_TRUE(alpha_equal(plug(EvalContext(InitialKind::ProduceRet), Term::star()), parse("produce ret *")));
}

TEST(Plug, HoleTypeMismatchThrows) {
  EXPECT_THROW(plug(EvalContext(InitialKind::ProduceRet), num(3)), ContextError);
  // [_][succ _] has result int, not F V unit
  EXPECT_THROW(plug(EvalContext().push(Frame::succ()), num(3)), ContextError);
}

TEST(Plug, RespectsConcatenation) {
  harness::GenPolicy p;
  p.max_depth = 3;
  p.seed = 11;
  harness::Generator gen(p);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    auto [c, hole] = gen.context(4);
    auto frames = c.frames();
    std::size_t cut = frames.empty() ? 0 : static_cast<std::size_t>(gen.rng()() % (frames.size() + 1));
    EvalContext outer(c.initial());
    EvalContext inner;
    for (std::size_t k = 0; k < frames.size(); ++k) {
      if (k < cut) {
        outer = outer.push(frames[k]);
      } else {
        inner = inner.push(frames[k]);
      }
    }
    Term m = gen.term(hole);
    EXPECT_TRUE(alpha_equal(plug_unchecked(outer.append(inner), m), plug_unchecked(outer, plug_unchecked(inner, m))));
    EXPECT_EQ(typing::type_of(plug(c, m)), fvunit());
    ++checked;
  }
  EXPECT_EQ(checked, 200);
}

TEST(Derived, OmegaIsRecOfItself) {
  Term o = derived::omega(int_t());
  EXPECT_EQ(print_term(o), "rec (x : int) x");
  Term oc = derived::omega(fint());
  ASSERT_TRUE(oc.is(TermKind::Force));
  EXPECT_EQ(typing::type_of(oc), fint());
}

TEST(Derived, EmptyPswitchIsAbort) {
  Term s = derived::pswitch(num(1), {}, fvunit());
  EXPECT_TRUE(alpha_equal(s, Term::abort(fvunit())));
  EXPECT_TRUE(alpha_equal(derived::pcase({}, fint()), Term::abort(fint())));
}

TEST(Derived, SumSplitsInHalves) {
  std::vector<Term> ms;
  for (long i = 1; i <= 4; ++i) ms.push_back(Term::ret(num(i)));
  Term s = derived::sum(ms);
  Term want = Term::pchoice(Term::pchoice(ms[0], ms[1]), Term::pchoice(ms[2], ms[3]));
  EXPECT_TRUE(alpha_equal(s, want));
  EXPECT_THROW(derived::sum({ms[0], ms[1], ms[2]}), derived::DerivedFormError);
  EXPECT_TRUE(alpha_equal(derived::sum({ms[0]}), ms[0]));
}

TEST(Derived, PswitchNestsFromTheLastBranch) {
  Variable m = var("m", int_t());
  Term a = Term::produce(num(10));
  Term b = Term::produce(num(20));
  Term s = derived::pswitch(Term::var(m), {a, b});
  Term want = Term::pifz(Term::pred(Term::pred(Term::var(m))), b,
                         Term::pifz(Term::pred(Term::var(m)), a, Term::abort(fint())));
  EXPECT_TRUE(alpha_equal(s, want));
}

TEST(Derived, EqAndExpansion) {
  Term m = Term::produce(num(0));
  Term n = Term::produce(Term::star());
  Term e = derived::eq0_and(m, n);
  Variable x = var("x", int_t());
  EXPECT_TRUE(alpha_equal(e, Term::to(m, x, Term::ifz(Term::var(x), n, derived::omega(funit())))));
  Term e1 = derived::eq1_and(m, n);
  EXPECT_TRUE(alpha_equal(e1, Term::to(m, x, Term::ifz(Term::pred(Term::var(x)), n, derived::omega(funit())))));
  EXPECT_THROW(derived::eq0_and(n, n), derived::DerivedFormError);
}

TEST(Derived, EveryFormRetypechecks) {
  Term u = Term::star();
  EXPECT_EQ(typing::type_of(derived::por(u, u)), unit_t());
  EXPECT_EQ(typing::type_of(derived::case_tag(u, 2)), fint());
  EXPECT_EQ(typing::type_of(derived::pcase({{u, Term::produce(num(1))}, {u, Term::produce(num(2))}})), fint());
  EXPECT_EQ(typing::type_of(derived::pif(3, num(3), Term::produce(u), Term::produce(u))), funit());
  EXPECT_EQ(typing::type_of(derived::and_then(Term::produce(u), Term::produce(num(1)))), fint());
  EXPECT_FALSE(typing::synth(derived::por(num(1), u)).ok());
}

TEST(Derived, FreshBindersAvoidCapture) {
  Variable x = var("x", int_t());
  Term n = Term::produce(Term::var(x));  // x free in the continuation
  Term g = derived::and_then(Term::produce(num(3)), n);
  EXPECT_TRUE(g.has_free(x));
  EXPECT_NE(g.variable().name, "x");
}

TEST(Context, RankNeverDecreases) {
  harness::GenPolicy p;
  p.max_depth = 2;
  p.seed = 5;
  harness::Generator gen(p);
  for (int i = 0; i < 300; ++i) {
    auto [c, hole] = gen.context(5);
    EvalContext partial(c.initial());
    Type prev = typing::check_context(partial).type();
    for (const auto& f : c.frames()) {
      partial = partial.push(f);
      auto r = typing::check_context(partial);
      ASSERT_TRUE(r.ok()) << r.error().str();
      EXPECT_LE(r.type().rank(), prev.rank());
      prev = r.type();
    }
  }
}
