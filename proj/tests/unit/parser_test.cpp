#include <gtest/gtest.h>

#include "cbpv/derived.hpp"
#include "cbpv/generator.hpp"
#include "cbpv/printer.hpp"
#include "cbpv/typing.hpp"
#include "helpers.hpp"

using namespace cbpv;
using namespace cbpv::test;

TEST(Parser, CoreForms) {
  EXPECT_TRUE(alpha_equal(parse("*"), Term::star()));
  EXPECT_TRUE(alpha_equal(parse("-7"), num(-7)));
  EXPECT_TRUE(alpha_equal(parse("<*, 0>"), Term::pair(Term::star(), num(0))));
  EXPECT_TRUE(alpha_equal(parse("fst <*, 0>"), Term::proj1(Term::pair(Term::star(), num(0)))));
  EXPECT_TRUE(alpha_equal(parse("abort[F int]"), Term::abort(fint())));
  Variable x = var("x", int_t());
  EXPECT_TRUE(alpha_equal(parse("fun (x : int) produce succ x"), Term::lam(x, Term::produce(Term::succ(Term::var(x))))));
  EXPECT_TRUE(alpha_equal(parse("(fun (x : int) produce x) 3"),
                          Term::app(Term::lam(x, Term::produce(Term::var(x))), num(3))));
  EXPECT_TRUE(alpha_equal(parse("produce 1 to x : int in produce x"),
                          Term::to(Term::produce(num(1)), x, Term::produce(Term::var(x)))));
  EXPECT_TRUE(alpha_equal(parse("do x : int <- ret 1; ret x"),
                          Term::do_(x, Term::ret(num(1)), Term::ret(Term::var(x)))));
  EXPECT_TRUE(alpha_equal(parse("obs[1/2] produce ret *"),
                          Term::obs(half(), Term::produce(Term::ret(Term::star())))));
  EXPECT_TRUE(alpha_equal(parse("*; *"), Term::seq(Term::star(), Term::star())));
}

TEST(Parser, ChoicePrecedence) {
  // (x) binds looser than (+)
  Term t = parse("produce ret 1 (x) produce ret 2");
  EXPECT_TRUE(t.is(TermKind::NChoice));
  Term p = parse("ret 0 (+) ret 1 (+) ret 2");
  ASSERT_TRUE(p.is(TermKind::PChoice));
  EXPECT_TRUE(p.child(0).is(TermKind::PChoice));
}

TEST(Parser, UnicodeAliases) {
  EXPECT_TRUE(alpha_equal(parse("ret 0 ⊕ ret 1"), parse("ret 0 (+) ret 1")));
  EXPECT_TRUE(alpha_equal(parse("produce 0 ⊗ produce 1"), parse("produce 0 (x) produce 1")));
  EXPECT_TRUE(alpha_equal(parse("Ω[int]"), parse("omega[int]")));
  EXPECT_TRUE(alpha_equal(parse("λ (x : int) produce x"), parse("fun (x : int) produce x")));
}

TEST(Parser, DerivedForms) {
  EXPECT_TRUE(alpha_equal(parse("omega[int]"), derived::omega(int_t())));
  EXPECT_TRUE(alpha_equal(parse("sum{ret 1 | ret 2 | ret 3 | ret 4}"),
                          parse("(ret 1 (+) ret 2) (+) (ret 3 (+) ret 4)")));
  EXPECT_TRUE(alpha_equal(parse("* \\/ *"), derived::por(Term::star(), Term::star())));
  EXPECT_TRUE(alpha_equal(parse("case-tag[2] *"), derived::case_tag(Term::star(), 2)));
  EXPECT_TRUE(alpha_equal(parse("pswitch[F int] 1 {}"), Term::abort(fint())));
  EXPECT_TRUE(alpha_equal(parse("pif[2] 5 produce 0 produce 1"),
                          derived::pif(2, num(5), Term::produce(num(0)), Term::produce(num(1)))));
  Term amp = parse("produce 0 eq0& produce 1 eq1& produce *");
  EXPECT_TRUE(alpha_equal(amp, derived::eq0_and(Term::produce(num(0)),
                                                derived::eq1_and(Term::produce(num(1)), Term::produce(Term::star())))));
  EXPECT_EQ(typing::type_of(parse("pcase { * -> produce 1 | omega[unit] -> produce 2 }")), fint());
}

TEST(Parser, SamplerTypechecks) {
  EXPECT_EQ(typing::type_of(parse(urej_src())), vint());
}

TEST(Parser, ErrorsCarryLocations) {
  try {
    parse("fun (x : int)\n  produce y");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.span().line, 2);
    EXPECT_NE(std::string(e.what()).find("unbound"), std::string::npos);
  }
  EXPECT_THROW(parse("(("), ParseError);
  EXPECT_THROW(parse("obs[3/2] produce ret *"), ParseError);
  EXPECT_THROW(parse("* *)"), ParseError);
}

TEST(Parser, CommentsAreSkipped) {
  EXPECT_TRUE(alpha_equal(parse("# expect pr: 1\nabort[F V unit] # trailing\n"), Term::abort(fvunit())));
}

TEST(Printer, Examples) {
  EXPECT_EQ(print_term(parse("omega[int]")), "rec (x : int) x");
  EXPECT_EQ(print_term(parse("produce (ret * (+) ret *)")), "produce (ret * (+) ret *)");
  EXPECT_EQ(print_term(parse("abort[(int -> F int)]")), "abort[(int -> F int)]");
}

TEST(Printer, ShadowedNamesOfOtherTypesGetRenamed) {
  Variable xi = var("x", int_t());
  Variable xu = var("x", unit_t());
  Term t = Term::lam(xi, Term::produce(Term::pair(Term::var(xi), Term::var(xu))));
  // prints as an open term; parsing needs xu in scope, so wrap it
  Term closed = Term::lam(xu, t);
  Term back = parse(print_term(closed));
  EXPECT_TRUE(alpha_equal(back, closed)) << print_term(closed);
}

class RoundTrip : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RoundTrip, ParseOfPrintIsAlphaIdentity) {
  harness::GenPolicy p;
  p.max_depth = 5;
  p.rec_probability = 0.2;
  p.seed = GetParam();
  harness::Generator gen(p);
  for (int i = 0; i < 100; ++i) {
    Type t = i % 3 == 0 ? fvunit() : (i % 3 == 1 ? gen.value_type(2) : gen.computation_type(2));
    Term m = gen.term(t);
    std::string text = print_term(m);
    Term back = parse(text);
    ASSERT_TRUE(alpha_equal(back, m)) << text << "\n  reparsed as\n" << print_term(back);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RoundTrip, ::testing::Values(1, 2, 3, 4, 5, 6, 7, 8));
