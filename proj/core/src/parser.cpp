#include "cbpv/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

#include "cbpv/derived.hpp"
#include "cbpv/typing.hpp"

namespace cbpv {

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

const char* const kKeywords[] = {"succ",  "pred", "thunk", "force", "fst",     "snd",   "ret",  "produce",
                                 "obs",   "ifz",  "pifz",  "pif",   "case-tag", "abort", "omega", "fun",
                                 "rec",   "do",   "to",    "in",    "pswitch", "pcase", "sum",  "unit",
                                 "int",   "V",    "U",     "F"};

bool is_keyword(const std::string& s) {
  for (const char* k : kKeywords) {
    if (s == k) return true;
  }
  return false;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourceSpan at{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", at});
        return out;
      }
      out.push_back(next(at));
    }
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  char peek(std::size_t off = 0) const { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      // Columns count code points, not bytes.
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
        ++col_;
      }
      ++pos_;
    }
  }

  bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_space() {
    for (;;) {
      char c = peek();
      if (c == '#') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  Token next(SourceSpan at) {
    struct Alias {
      const char* utf8;
      const char* ascii;
    };
    static const Alias aliases[] = {{"⊕", "(+)"}, {"⊗", "(x)"}, {"∨", "\\/"}, {"→", "->"},
                                    {"←", "<-"},  {"∗", "*"},   {"×", "*"},   {"λ", "fun"},
                                    {"Ω", "omega"}};
    for (const auto& a : aliases) {
      if (starts(a.utf8)) {
        advance(std::string_view(a.utf8).size());
        std::string text = a.ascii;
        return {std::isalpha(static_cast<unsigned char>(text[0])) ? Tok::Ident : Tok::Sym, text, at};
      }
    }
    static const char* multi[] = {"(+)", "(x)", "->", "\\/"};
    for (const char* s : multi) {
      if (starts(s)) {
        advance(std::string_view(s).size());
        return {Tok::Sym, s, at};
      }
    }
    if (starts("<-") && !std::isdigit(static_cast<unsigned char>(peek(2)))) {
      advance(2);
      return {Tok::Sym, "<-", at};
    }
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      std::string text(1, c);
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        text += peek();
        advance();
      }
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        text += '.';
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          text += peek();
          advance();
        }
      }
      return {Tok::Number, text, at};
    }
    if (ident_start(c)) {
      std::string text;
      while (ident_char(peek()) || (peek() == '-' && ident_start(peek(1)))) {
        text += peek();
        advance();
      }
      if ((text == "eq0" || text == "eq1") && peek() == '&') {
        advance();
        return {Tok::Sym, text + "&", at};
      }
      return {Tok::Ident, text, at};
    }
    static const std::string singles = "()[]{}<>,:;*&|/";
    if (singles.find(c) != std::string::npos) {
      advance();
      return {Tok::Sym, std::string(1, c), at};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", at);
  }
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  Term whole_term() {
    Term t = expr();
    expect_end();
    return t;
  }

  Type whole_type() {
    Type t = any_type();
    expect_end();
    return t;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Variable> scope_;

  const Token& cur() const { return toks_[pos_]; }
  bool is_sym(const char* s) const { return cur().kind == Tok::Sym && cur().text == s; }
  bool is_kw(const char* s) const { return cur().kind == Tok::Ident && cur().text == s; }

  [[noreturn]] void error(const std::string& msg) const { throw ParseError(msg, cur().span); }

  std::string describe() const {
    if (cur().kind == Tok::End) return "end of input";
    return "'" + cur().text + "'";
  }

  void expect_sym(const char* s) {
    if (!is_sym(s)) error(std::string("expected '") + s + "', found " + describe());
    ++pos_;
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) error(std::string("expected '") + s + "', found " + describe());
    ++pos_;
  }
  void expect_end() {
    if (cur().kind != Tok::End) error("unexpected " + describe() + " after the end of the term");
  }

  std::string binder_name() {
    if (cur().kind != Tok::Ident || is_keyword(cur().text)) error("expected a variable name, found " + describe());
    return toks_[pos_++].text;
  }

  // ---- types ----

  Type any_type() {
    if (is_kw("F")) {
      ++pos_;
      return Type::f(value_type());
    }
    if (is_sym("(")) {
      ++pos_;
      Type a = any_type();
      if (is_sym("*")) {
        ++pos_;
        Type b = value_type();
        expect_sym(")");
        return checked([&] { return Type::prod(a, b); });
      }
      if (is_sym("->")) {
        ++pos_;
        Type b = computation_type();
        expect_sym(")");
        return checked([&] { return Type::arrow(a, b); });
      }
      error("expected '*' or '->' in type, found " + describe());
    }
    if (is_kw("unit")) {
      ++pos_;
      return Type::unit();
    }
    if (is_kw("int")) {
      ++pos_;
      return Type::integer();
    }
    if (is_kw("V")) {
      ++pos_;
      return Type::v(value_type());
    }
    if (is_kw("U")) {
      ++pos_;
      return Type::u(computation_type());
    }
    error("expected a type, found " + describe());
  }

  template <typename Fn>
  Type checked(Fn fn) {
    try {
      return fn();
    } catch (const std::invalid_argument& e) {
      error(e.what());
    }
  }

  Type value_type() {
    SourceSpan at = cur().span;
    Type t = any_type();
    if (!t.is_value()) throw ParseError("expected a value type, got " + t.str(), at);
    return t;
  }

  Type computation_type() {
    SourceSpan at = cur().span;
    Type t = any_type();
    if (!t.is_computation()) throw ParseError("expected a computation type, got " + t.str(), at);
    return t;
  }

  // ---- helpers ----

  Type type_at(const Term& t, SourceSpan at) {
    auto r = typing::synth(t);
    if (!r.ok()) throw ParseError("cannot expand derived form: " + r.error().message, at);
    return r.type();
  }

  template <typename Fn>
  Term derived(SourceSpan at, Fn fn) {
    try {
      return fn().with_span(at);
    } catch (const derived::DerivedFormError& e) {
      throw ParseError(e.what(), at);
    } catch (const Error& e) {
      throw ParseError(e.what(), at);
    }
  }

  template <typename Fn>
  Term bound(const Variable& x, Fn body) {
    scope_.push_back(x);
    Term t = body();
    scope_.pop_back();
    return t;
  }

  // ---- terms ----

  Term expr() {
    SourceSpan at = cur().span;
    Term left = to_expr();
    if (is_sym(";")) {
      ++pos_;
      Term right = expr();
      return Term::seq(left, right).with_span(at);
    }
    return left;
  }

  Term to_expr() {
    SourceSpan at = cur().span;
    Term left = amp();
    if (is_kw("to")) {
      ++pos_;
      std::string name = binder_name();
      expect_sym(":");
      Variable x{name, value_type()};
      expect_kw("in");
      Term body = bound(x, [&] { return expr(); });
      return Term::to(left, x, body).with_span(at);
    }
    return left;
  }

  Term amp() {
    SourceSpan at = cur().span;
    Term left = disj();
    if (is_sym("&") || is_sym("eq0&") || is_sym("eq1&")) {
      std::string op = cur().text;
      ++pos_;
      Term right = amp();
      return derived(at, [&] {
        if (op == "&") return derived::and_then(left, right);
        if (op == "eq0&") return derived::eq0_and(left, right);
        return derived::eq1_and(left, right);
      });
    }
    return left;
  }

  Term disj() {
    SourceSpan at = cur().span;
    Term left = nchoice();
    while (is_sym("\\/")) {
      ++pos_;
      Term right = nchoice();
      left = derived(at, [&] {
        expect_unit(left, at);
        expect_unit(right, at);
        return derived::por(left, right);
      });
    }
    return left;
  }

  void expect_unit(const Term& t, SourceSpan at) {
    Type ty = type_at(t, at);
    if (ty != Type::unit()) throw ParseError("operands of \\/ must have type unit, got " + ty.str(), at);
  }

  Term nchoice() {
    SourceSpan at = cur().span;
    Term left = pchoice();
    while (is_sym("(x)")) {
      ++pos_;
      left = Term::nchoice(left, pchoice()).with_span(at);
    }
    return left;
  }

  Term pchoice() {
    SourceSpan at = cur().span;
    Term left = app();
    while (is_sym("(+)")) {
      ++pos_;
      left = Term::pchoice(left, app()).with_span(at);
    }
    return left;
  }

  bool starts_prefix() const {
    const Token& t = cur();
    if (t.kind == Tok::Number) return true;
    if (t.kind == Tok::Sym) return t.text == "*" || t.text == "<" || t.text == "(";
    if (t.kind != Tok::Ident) return false;
    if (t.text == "to" || t.text == "in") return false;
    if (t.text == "unit" || t.text == "int" || t.text == "V" || t.text == "U" || t.text == "F") return false;
    return true;
  }

  Term app() {
    SourceSpan at = cur().span;
    Term f = prefix();
    while (starts_prefix()) f = Term::app(f, prefix()).with_span(at);
    return f;
  }

  Term bracket_type_c() {
    expect_sym("[");
    Type t = computation_type();
    expect_sym("]");
    return Term::abort(t);
  }

  BigInt bracket_integer() {
    expect_sym("[");
    if (cur().kind != Tok::Number) error("expected an integer, found " + describe());
    BigInt n = parse_integer(cur().text);
    ++pos_;
    expect_sym("]");
    return n;
  }

  Term prefix() {
    SourceSpan at = cur().span;
    if (cur().kind == Tok::Ident) {
      const std::string& w = cur().text;
      auto unary = [&](Term (*mk)(Term)) {
        ++pos_;
        return mk(prefix()).with_span(at);
      };
      if (w == "succ") return unary(&Term::succ);
      if (w == "pred") return unary(&Term::pred);
      if (w == "thunk") return unary(&Term::thunk);
      if (w == "force") return unary(&Term::force);
      if (w == "fst") return unary(&Term::proj1);
      if (w == "snd") return unary(&Term::proj2);
      if (w == "ret") return unary(&Term::ret);
      if (w == "produce") return unary(&Term::produce);
      if (w == "obs") {
        ++pos_;
        Rational b = bracket_rational();
        Term m = prefix();
        return derived(at, [&] { return Term::obs(b, m); });
      }
      if (w == "ifz" || w == "pifz") {
        ++pos_;
        Term a = prefix();
        Term b = prefix();
        Term c = prefix();
        return (w == "ifz" ? Term::ifz(a, b, c) : Term::pifz(a, b, c)).with_span(at);
      }
      if (w == "pif") {
        ++pos_;
        BigInt n = bracket_integer();
        if (n < 0 || n > 1000000) throw ParseError("pif index out of range", at);
        Term a = prefix();
        Term b = prefix();
        Term c = prefix();
        return derived::pif(static_cast<unsigned>(n.get_ui()), a, b, c).with_span(at);
      }
      if (w == "case-tag") {
        ++pos_;
        BigInt i = bracket_integer();
        if (i < 1 || !i.fits_slong_p()) throw ParseError("case-tag index must be positive", at);
        Term m = prefix();
        return derived(at, [&] { return derived::case_tag(m, i.get_si()); });
      }
    }
    return atom();
  }

  Rational bracket_rational() {
    expect_sym("[");
    std::string text;
    if (cur().kind != Tok::Number) error("expected a rational, found " + describe());
    text = cur().text;
    ++pos_;
    if (is_sym("/")) {
      ++pos_;
      if (cur().kind != Tok::Number) error("expected a denominator, found " + describe());
      text += "/" + cur().text;
      ++pos_;
    }
    expect_sym("]");
    try {
      return parse_rational(text);
    } catch (const std::invalid_argument& e) {
      error(e.what());
    }
  }

  Term atom() {
    SourceSpan at = cur().span;
    const Token& t = cur();
    if (t.kind == Tok::Number) {
      if (t.text.find('.') != std::string::npos) error("expected an integer, found " + describe());
      BigInt n = parse_integer(t.text);
      ++pos_;
      return Term::num(n).with_span(at);
    }
    if (t.kind == Tok::Sym) {
      if (t.text == "*") {
        ++pos_;
        return Term::star().with_span(at);
      }
      if (t.text == "(") {
        ++pos_;
        Term inner = expr();
        expect_sym(")");
        return inner;
      }
      if (t.text == "<") {
        ++pos_;
        Term a = expr();
        expect_sym(",");
        Term b = expr();
        expect_sym(">");
        return Term::pair(a, b).with_span(at);
      }
      error("unexpected " + describe());
    }
    if (t.kind != Tok::Ident) error("expected a term, found " + describe());
    const std::string w = t.text;
    if (w == "abort") {
      ++pos_;
      return bracket_type_c().with_span(at);
    }
    if (w == "omega") {
      ++pos_;
      expect_sym("[");
      Type ty = any_type();
      expect_sym("]");
      return derived::omega(ty).with_span(at);
    }
    if (w == "fun" || w == "rec") {
      ++pos_;
      expect_sym("(");
      std::string name = binder_name();
      expect_sym(":");
      Variable x{name, value_type()};
      expect_sym(")");
      Term body = bound(x, [&] { return expr(); });
      return (w == "fun" ? Term::lam(x, body) : Term::rec(x, body)).with_span(at);
    }
    if (w == "do") {
      ++pos_;
      std::string name = binder_name();
      expect_sym(":");
      Variable x{name, value_type()};
      expect_sym("<-");
      Term m = to_expr();
      expect_sym(";");
      Term body = bound(x, [&] { return expr(); });
      return Term::do_(x, m, body).with_span(at);
    }
    if (w == "pswitch") {
      ++pos_;
      std::optional<Type> result = optional_ctype();
      Term m = prefix();
      expect_sym("{");
      std::vector<Term> branches;
      if (!is_sym("}")) {
        branches.push_back(expr());
        while (is_sym("|")) {
          ++pos_;
          branches.push_back(expr());
        }
      }
      expect_sym("}");
      return derived(at, [&] {
        if (result) return derived::pswitch(m, branches, *result);
        if (branches.empty()) throw ParseError("an empty pswitch needs a result type: pswitch[ctype]", at);
        return derived::pswitch(m, branches, type_at(branches.front(), at));
      });
    }
    if (w == "pcase") {
      ++pos_;
      std::optional<Type> result = optional_ctype();
      expect_sym("{");
      std::vector<std::pair<Term, Term>> cases;
      if (!is_sym("}")) {
        for (;;) {
          Term guard = to_expr();
          expect_sym("->");
          Term branch = expr();
          cases.emplace_back(guard, branch);
          if (!is_sym("|")) break;
          ++pos_;
        }
      }
      expect_sym("}");
      return derived(at, [&] {
        if (result) return derived::pcase(cases, *result);
        if (cases.empty()) throw ParseError("an empty pcase needs a result type: pcase[ctype]", at);
        return derived::pcase(cases, type_at(cases.front().second, at));
      });
    }
    if (w == "sum") {
      ++pos_;
      expect_sym("{");
      std::vector<Term> parts{expr()};
      while (is_sym("|")) {
        ++pos_;
        parts.push_back(expr());
      }
      expect_sym("}");
      return derived(at, [&] { return derived::sum(parts); });
    }
    if (is_keyword(w)) error("unexpected keyword '" + w + "'");
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->name == w) {
        ++pos_;
        return Term::var(*it).with_span(at);
      }
    }
    error("unbound variable '" + w + "'");
  }

  std::optional<Type> optional_ctype() {
    if (!is_sym("[")) return std::nullopt;
    ++pos_;
    Type t = computation_type();
    expect_sym("]");
    return t;
  }
};

}  // namespace

Term parse_term(std::string_view text) { return Parser(text).whole_term(); }

Type parse_type(std::string_view text) { return Parser(text).whole_type(); }

}  // namespace cbpv
