#include <gtest/gtest.h>

#include "cbpv/rational.hpp"
#include "cbpv/types.hpp"
#include "helpers.hpp"

using namespace cbpv;
using namespace cbpv::test;

TEST(Rational, FractionAndDecimalText) {
  EXPECT_EQ(to_fraction_string(Rational(2, 4)), "1/2");
  EXPECT_EQ(to_fraction_string(Rational(3)), "3");
  EXPECT_EQ(to_fraction_string(Rational(-1, 3)), "-1/3");
  EXPECT_EQ(to_decimal_string(Rational(1, 3)), "0.333333");
  EXPECT_EQ(to_decimal_string(Rational(2, 3)), "0.666667");
  EXPECT_EQ(to_decimal_string(Rational(1)), "1.000000");
}

TEST(Rational, Parsing) {
  EXPECT_EQ(parse_rational("1/4"), Rational(1, 4));
  EXPECT_EQ(parse_rational("2/8"), Rational(1, 4));
  EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("x"), std::invalid_argument);
  EXPECT_EQ(parse_integer("123456789012345678901234567890").get_str(), "123456789012345678901234567890");
}

TEST(Types, PrintedForms) {
  EXPECT_EQ(unit_t().str(), "unit");
  EXPECT_EQ(Type::prod(unit_t(), int_t()).str(), "(unit * int)");
  EXPECT_EQ(Type::f(vunit()).str(), "F V unit");
  EXPECT_EQ(Type::arrow(int_t(), fint()).str(), "(int -> F int)");
  EXPECT_EQ(Type::u(Type::arrow(int_t(), fint())).str(), "U (int -> F int)");
  EXPECT_EQ(parse_type("U (int -> (int -> F int))"),
            Type::u(Type::arrow(int_t(), Type::arrow(int_t(), fint()))));
}

TEST(Types, RanksFollowTheSort) {
  EXPECT_EQ(unit_t().rank(), Rank::Zero);
  EXPECT_EQ(Type::prod(vunit(), int_t()).rank(), Rank::Zero);
  EXPECT_EQ(Type::u(fint()).rank(), Rank::Zero);
  EXPECT_EQ(vint().rank(), Rank::Half);
  EXPECT_EQ(fint().rank(), Rank::One);
  EXPECT_EQ(Type::arrow(int_t(), fint()).rank(), Rank::One);
}

TEST(Types, FirstOrderMeansNoArrow) {
  EXPECT_TRUE(Type::u(Type::f(vint())).first_order());
  EXPECT_TRUE(Type::prod(vunit(), int_t()).first_order());
  EXPECT_FALSE(Type::u(Type::arrow(int_t(), fint())).first_order());
  EXPECT_FALSE(Type::v(Type::u(Type::arrow(int_t(), fint()))).first_order());
}

TEST(Types, StructuralEquality) {
  EXPECT_EQ(Type::v(int_t()), vint());
  EXPECT_NE(Type::v(int_t()), Type::v(unit_t()));
  EXPECT_EQ(Type::v(int_t()).hash(), vint().hash());
}
