#include "cbpv/derived.hpp"

#include "cbpv/typing.hpp"

namespace cbpv::derived {

namespace {

Type type_or_throw(const Term& m, const char* what) {
  auto r = typing::synth(m);
  if (!r.ok()) throw DerivedFormError(std::string(what) + ": " + r.error().str());
  return r.type();
}

std::string fresh_avoiding(const std::string& base, const std::vector<Term>& terms) {
  return fresh_name(base, [&](const std::string& name) {
    for (const auto& t : terms) {
      if (t.has_free_name(name)) return true;
    }
    return false;
  });
}

Term eq_and(const Term& m, const Term& n, unsigned preds) {
  Type mt = type_or_throw(m, "left operand");
  if (mt != Type::f(Type::integer())) throw DerivedFormError("left operand must have type F int, got " + mt.str());
  Type nt = type_or_throw(n, "right operand");
  if (!nt.is_computation()) throw DerivedFormError("right operand must be a computation, got " + nt.str());
  Variable x{fresh_avoiding("x", {n}), Type::integer()};
  Term scrutinee = Term::var(x);
  for (unsigned i = 0; i < preds; ++i) scrutinee = Term::pred(scrutinee);
  return Term::to(m, x, Term::ifz(scrutinee, n, omega(nt)));
}

}  // namespace

Term omega(const Type& t) {
  if (t.is_value()) {
    Variable x{"x", t};
    return Term::rec(x, Term::var(x));
  }
  return Term::force(omega(Type::u(t)));
}

Term eq0_and(const Term& m, const Term& n) { return eq_and(m, n, 0); }
Term eq1_and(const Term& m, const Term& n) { return eq_and(m, n, 1); }

Term and_then(const Term& m, const Term& n) {
  Type mt = type_or_throw(m, "left operand");
  if (mt.kind() != TypeKind::F) throw DerivedFormError("left operand of & must have an F type, got " + mt.str());
  Variable x{fresh_avoiding("x", {n}), mt.first()};
  return Term::to(m, x, n);
}

Term pif(unsigned n, const Term& m, const Term& then_branch, const Term& else_branch) {
  Term scrutinee = m;
  for (unsigned i = 0; i < n; ++i) scrutinee = Term::pred(scrutinee);
  return Term::pifz(scrutinee, then_branch, else_branch);
}

Term pswitch(const Term& m, const std::vector<Term>& branches, const Type& result) {
  if (!result.is_computation()) throw DerivedFormError("pswitch branches must be computations");
  Term out = Term::abort(result);
  for (std::size_t i = 0; i < branches.size(); ++i) {
    out = pif(static_cast<unsigned>(i + 1), m, branches[i], out);
  }
  return out;
}

Term pswitch(const Term& m, const std::vector<Term>& branches) {
  if (branches.empty()) throw DerivedFormError("an empty pswitch needs an explicit result type");
  return pswitch(m, branches, type_or_throw(branches.front(), "pswitch branch"));
}

Term por(const Term& m, const Term& n) {
  Term done = Term::produce(Term::ret(Term::star()));
  return Term::obs(half(), Term::pifz(Term::seq(m, Term::num(0L)), done, Term::produce(Term::ret(n))));
}

Term case_tag(const Term& m, long i) {
  return Term::pifz(Term::seq(m, Term::num(0L)), Term::abort(Type::f(Type::integer())),
                    Term::produce(Term::num(i)));
}

Term pcase(const std::vector<std::pair<Term, Term>>& cases, const Type& result) {
  if (cases.empty()) return Term::abort(result);
  Term tags = case_tag(cases[0].first, 1);
  std::vector<Term> branches{cases[0].second};
  for (std::size_t i = 1; i < cases.size(); ++i) {
    tags = Term::nchoice(tags, case_tag(cases[i].first, static_cast<long>(i + 1)));
    branches.push_back(cases[i].second);
  }
  Variable y{fresh_avoiding("y", branches), Type::integer()};
  return Term::to(tags, y, pswitch(Term::var(y), branches, result));
}

Term pcase(const std::vector<std::pair<Term, Term>>& cases) {
  if (cases.empty()) throw DerivedFormError("an empty pcase needs an explicit result type");
  return pcase(cases, type_or_throw(cases.front().second, "pcase branch"));
}

namespace {

Term sum_range(const std::vector<Term>& s, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return s[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  return Term::pchoice(sum_range(s, lo, mid), sum_range(s, mid, hi));
}

}  // namespace

Term sum(const std::vector<Term>& summands) {
  std::size_t n = summands.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw DerivedFormError("a sum needs a power-of-two number of summands, got " + std::to_string(n));
  }
  return sum_range(summands, 0, n);
}

}  // namespace cbpv::derived
