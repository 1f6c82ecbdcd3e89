#include "cbpv/printer.hpp"

namespace cbpv {

namespace {

PrintLevel level_of(const Term& m) {
  switch (m.kind()) {
    case TermKind::Var:
    case TermKind::Star:
    case TermKind::Num:
    case TermKind::Abort:
    case TermKind::Pair:
      return PrintLevel::Atom;
    case TermKind::Succ:
    case TermKind::Pred:
    case TermKind::Thunk:
    case TermKind::Force:
    case TermKind::Proj1:
    case TermKind::Proj2:
    case TermKind::Ret:
    case TermKind::Produce:
    case TermKind::Obs:
    case TermKind::Ifz:
    case TermKind::Pifz:
      return PrintLevel::Prefix;
    case TermKind::App:
      return PrintLevel::App;
    case TermKind::PChoice:
      return PrintLevel::PChoice;
    case TermKind::NChoice:
      return PrintLevel::NChoice;
    case TermKind::To:
      return PrintLevel::To;
    case TermKind::Lam:
    case TermKind::Rec:
    case TermKind::Do:
    case TermKind::Seq:
      return PrintLevel::Seq;
  }
  return PrintLevel::Atom;
}

// Renames the binder of `m` when the scoped body mentions a different variable
// of the same name; returns the binder and scoped body to print.
std::pair<Variable, Term> safe_binder(const Variable& x, const Term& body) {
  bool clash = false;
  for (const auto& v : body.free_vars()) {
    if (v.name == x.name && v != x) clash = true;
  }
  if (!clash) return {x, body};
  Variable renamed{fresh_name(x.name, [&](const std::string& n) { return body.has_free_name(n); }), x.type};
  return {renamed, substitute_unchecked(body, x, Term::var(renamed))};
}

void print(const Term& m, PrintLevel at, std::string& out);

void print_binder_head(const char* keyword, const Variable& x, std::string& out) {
  out += keyword;
  out += " (";
  out += x.name;
  out += " : ";
  out += x.type.str();
  out += ") ";
}

void print_body(const Term& m, std::string& out) {
  switch (m.kind()) {
    case TermKind::Var:
      out += m.variable().name;
      return;
    case TermKind::Star:
      out += '*';
      return;
    case TermKind::Num:
      out += m.number().get_str();
      return;
    case TermKind::Abort:
      out += "abort[" + m.abort_type().str() + "]";
      return;
    case TermKind::Pair:
      out += '<';
      print(m.child(0), PrintLevel::Seq, out);
      out += ", ";
      print(m.child(1), PrintLevel::Seq, out);
      out += '>';
      return;
    case TermKind::Lam:
    case TermKind::Rec: {
      auto [x, body] = safe_binder(m.variable(), m.child(0));
      print_binder_head(m.is(TermKind::Lam) ? "fun" : "rec", x, out);
      print(body, PrintLevel::Seq, out);
      return;
    }
    case TermKind::App:
      print(m.child(0), PrintLevel::App, out);
      out += ' ';
      print(m.child(1), PrintLevel::Atom, out);
      return;
    case TermKind::Succ:
    case TermKind::Pred:
    case TermKind::Thunk:
    case TermKind::Force:
    case TermKind::Proj1:
    case TermKind::Proj2:
    case TermKind::Ret:
    case TermKind::Produce: {
      static const char* names[] = {"succ", "pred", "thunk", "force", "fst", "snd", "ret", "produce"};
      std::size_t idx = 0;
      switch (m.kind()) {
        case TermKind::Succ: idx = 0; break;
        case TermKind::Pred: idx = 1; break;
        case TermKind::Thunk: idx = 2; break;
        case TermKind::Force: idx = 3; break;
        case TermKind::Proj1: idx = 4; break;
        case TermKind::Proj2: idx = 5; break;
        case TermKind::Ret: idx = 6; break;
        default: idx = 7; break;
      }
      out += names[idx];
      out += ' ';
      print(m.child(0), PrintLevel::Prefix, out);
      return;
    }
    case TermKind::Obs:
      out += "obs[" + to_fraction_string(m.bound()) + "] ";
      print(m.child(0), PrintLevel::Prefix, out);
      return;
    case TermKind::Ifz:
    case TermKind::Pifz:
      out += m.is(TermKind::Ifz) ? "ifz" : "pifz";
      for (std::size_t i = 0; i < 3; ++i) {
        out += ' ';
        print(m.child(i), PrintLevel::Atom, out);
      }
      return;
    case TermKind::Seq:
      print(m.child(0), PrintLevel::NChoice, out);
      out += "; ";
      print(m.child(1), PrintLevel::Seq, out);
      return;
    case TermKind::PChoice:
      print(m.child(0), PrintLevel::PChoice, out);
      out += " (+) ";
      print(m.child(1), PrintLevel::App, out);
      return;
    case TermKind::NChoice:
      print(m.child(0), PrintLevel::NChoice, out);
      out += " (x) ";
      print(m.child(1), PrintLevel::PChoice, out);
      return;
    case TermKind::Do: {
      auto [x, body] = safe_binder(m.variable(), m.child(1));
      out += "do " + x.name + " : " + x.type.str() + " <- ";
      print(m.child(0), PrintLevel::To, out);
      out += "; ";
      print(body, PrintLevel::Seq, out);
      return;
    }
    case TermKind::To: {
      auto [x, body] = safe_binder(m.variable(), m.child(1));
      print(m.child(0), PrintLevel::NChoice, out);
      out += " to " + x.name + " : " + x.type.str() + " in ";
      print(body, PrintLevel::Seq, out);
      return;
    }
  }
}

void print(const Term& m, PrintLevel at, std::string& out) {
  bool parens = static_cast<int>(level_of(m)) < static_cast<int>(at);
  if (parens) out += '(';
  print_body(m, out);
  if (parens) out += ')';
}

}  // namespace

std::string print_term(const Term& m, PrintLevel at) {
  std::string out;
  print(m, at, out);
  return out;
}

std::string summarize_term(const Term& m, std::size_t limit) {
  std::string s = print_term(m);
  if (s.size() > limit) s = s.substr(0, limit > 3 ? limit - 3 : 0) + "...";
  return s;
}

}  // namespace cbpv
