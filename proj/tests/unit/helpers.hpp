#pragma once

#include <string>

#include "cbpv/context.hpp"
#include "cbpv/parser.hpp"
#include "cbpv/term.hpp"
#include "cbpv/types.hpp"
#include "cbpv/typing.hpp"

namespace cbpv::test {

inline Type unit_t() { return Type::unit(); }
inline Type int_t() { return Type::integer(); }
inline Type vunit() { return Type::v(Type::unit()); }
inline Type vint() { return Type::v(Type::integer()); }
inline Type fint() { return Type::f(Type::integer()); }
inline Type funit() { return Type::f(Type::unit()); }

inline Variable var(const std::string& name, Type t) { return Variable{name, std::move(t)}; }
inline Term num(long n) { return Term::num(n); }
inline Term parse(const std::string& s) { return parse_term(s); }

inline const char* urej_src() { return "rec (u : V int) (ret 0 (+) ret 1) (+) (ret 2 (+) u)"; }


// Elaborates every frame operand, the way the engine's entry point does.
inline EvalContext core_context(const EvalContext& c) {
  EvalContext out(c.initial());
  for (const auto& f : c.frames()) {
    switch (f.kind()) {
      case FrameKind::AppArg: out = out.push(Frame::app_arg(typing::elaborate(f.operand(0)))); break;
      case FrameKind::To: out = out.push(Frame::to(f.binder(), typing::elaborate(f.operand(0)))); break;
      case FrameKind::Ifz:
        out = out.push(Frame::ifz(typing::elaborate(f.operand(0)), typing::elaborate(f.operand(1))));
        break;
      case FrameKind::Seq: out = out.push(Frame::seq(typing::elaborate(f.operand(0)))); break;
      case FrameKind::Do: out = out.push(Frame::do_(f.binder(), typing::elaborate(f.operand(0)))); break;
      default: out = out.push(f); break;
    }
  }
  return out;
}

}  // namespace cbpv::test
