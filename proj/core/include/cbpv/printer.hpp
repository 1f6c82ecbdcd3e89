#pragma once

#include <string>

#include "cbpv/term.hpp"

namespace cbpv {

/// Binding strength of the surrounding position. A term whose own level is
/// lower than the position's gets parenthesized.
enum class PrintLevel {
  Seq = 0,  // also binders whose body extends to the right
  To = 1,
  NChoice = 2,
  PChoice = 3,
  App = 4,
  Prefix = 5,
  Atom = 6,
};

/// ASCII surface syntax that the parser reads back to an alpha-equal term.
/// A binder is renamed when it would capture a same-named free variable of a
/// different type.
std::string print_term(const Term& m, PrintLevel at = PrintLevel::Seq);

/// Shortened print for traces: at most `limit` characters.
std::string summarize_term(const Term& m, std::size_t limit = 80);

}  // namespace cbpv
