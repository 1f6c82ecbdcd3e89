#pragma once

#include <utility>
#include <vector>

#include "cbpv/term.hpp"

/// Builders for the macro forms. Each returns its expansion into core syntax.
/// Arity and type violations raise DerivedFormError.
namespace cbpv::derived {

class DerivedFormError : public Error {
 public:
  using Error::Error;
};

/// rec x.x at a value type; force of the thunk-typed omega at a computation
/// type.
Term omega(const Type& t);

/// M to x:int in ifz x N omega.
Term eq0_and(const Term& m, const Term& n);
/// M to x:int in ifz (pred x) N omega.
Term eq1_and(const Term& m, const Term& n);
/// M to x in N with x fresh for N; x takes M's value type.
Term and_then(const Term& m, const Term& n);

/// pifz (pred^n M) N P.
Term pif(unsigned n, const Term& m, const Term& then_branch, const Term& else_branch);

/// Tests branches n down to 1 and ends in abort. `result` is the branch type,
/// needed when there are no branches.
Term pswitch(const Term& m, const std::vector<Term>& branches, const Type& result);
/// Same, reading the branch type off the first branch.
Term pswitch(const Term& m, const std::vector<Term>& branches);

/// obs[1/2](pifz (M; 0) (produce ret *) (produce ret N)).
Term por(const Term& m, const Term& n);

/// pifz (M; 0) abort[F int] (produce i).
Term case_tag(const Term& m, long i);

/// ([M1:1] (x) ... (x) [Mn:n]) to y:int in pswitch y {N1 | ... | Nn}.
Term pcase(const std::vector<std::pair<Term, Term>>& cases, const Type& result);
Term pcase(const std::vector<std::pair<Term, Term>>& cases);

/// Balanced binary (+) over exactly 2^n summands:
/// (M1 (+) ... (+) M_half) (+) (M_half+1 (+) ... (+) M_2^n).
Term sum(const std::vector<Term>& summands);

}  // namespace cbpv::derived
