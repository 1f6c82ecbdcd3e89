#include "cbpv/context.hpp"

#include "cbpv/printer.hpp"
#include "cbpv/typing.hpp"

namespace cbpv {

const char* to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::AppArg: return "app";
    case FrameKind::To: return "to";
    case FrameKind::Force: return "force";
    case FrameKind::Succ: return "succ";
    case FrameKind::Pred: return "pred";
    case FrameKind::Ifz: return "ifz";
    case FrameKind::Seq: return "seq";
    case FrameKind::Proj1: return "fst";
    case FrameKind::Proj2: return "snd";
    case FrameKind::Do: return "do";
  }
  return "?";
}

Frame Frame::app_arg(Term arg) { return Frame(FrameKind::AppArg, {}, {std::move(arg)}, {}); }
Frame Frame::to(Variable x, Term body) { return Frame(FrameKind::To, std::move(x), {std::move(body)}, {}); }
Frame Frame::force() { return Frame(FrameKind::Force, {}, {}, {}); }
Frame Frame::succ() { return Frame(FrameKind::Succ, {}, {}, {}); }
Frame Frame::pred() { return Frame(FrameKind::Pred, {}, {}, {}); }
Frame Frame::ifz(Term zero, Term nonzero) {
  return Frame(FrameKind::Ifz, {}, {std::move(zero), std::move(nonzero)}, {});
}
Frame Frame::seq(Term next) { return Frame(FrameKind::Seq, {}, {std::move(next)}, {}); }
Frame Frame::proj1(Type other) { return Frame(FrameKind::Proj1, {}, {}, std::move(other)); }
Frame Frame::proj2(Type other) { return Frame(FrameKind::Proj2, {}, {}, std::move(other)); }
Frame Frame::do_(Variable x, Term body) { return Frame(FrameKind::Do, std::move(x), {std::move(body)}, {}); }

Term Frame::fill(const Term& m) const {
  switch (kind_) {
    case FrameKind::AppArg: return Term::app(m, operands_[0]);
    case FrameKind::To: return Term::to(m, *binder_, operands_[0]);
    case FrameKind::Force: return Term::force(m);
    case FrameKind::Succ: return Term::succ(m);
    case FrameKind::Pred: return Term::pred(m);
    case FrameKind::Ifz: return Term::ifz(m, operands_[0], operands_[1]);
    case FrameKind::Seq: return Term::seq(m, operands_[0]);
    case FrameKind::Proj1: return Term::proj1(m);
    case FrameKind::Proj2: return Term::proj2(m);
    case FrameKind::Do: return Term::do_(*binder_, m, operands_[0]);
  }
  throw std::logic_error("unknown frame");
}

std::string Frame::str() const {
  switch (kind_) {
    case FrameKind::AppArg: return "[_ " + print_term(operands_[0], PrintLevel::Atom) + "]";
    case FrameKind::To:
      return "[_ to " + binder_->name + " : " + binder_->type.str() + " in " + print_term(operands_[0]) + "]";
    case FrameKind::Force: return "[force _]";
    case FrameKind::Succ: return "[succ _]";
    case FrameKind::Pred: return "[pred _]";
    case FrameKind::Ifz:
      return "[ifz _ " + print_term(operands_[0], PrintLevel::Atom) + " " +
             print_term(operands_[1], PrintLevel::Atom) + "]";
    case FrameKind::Seq: return "[_; " + print_term(operands_[0]) + "]";
    case FrameKind::Proj1: return "[fst _]";
    case FrameKind::Proj2: return "[snd _]";
    case FrameKind::Do:
      return "[do " + binder_->name + " : " + binder_->type.str() + " <- _; " + print_term(operands_[0]) + "]";
  }
  return "[?]";
}

EvalContext EvalContext::push(Frame frame) const {
  EvalContext out(initial_);
  out.top_ = std::make_shared<const Link>(Link{std::move(frame), top_, depth() + 1});
  return out;
}

EvalContext EvalContext::pop() const {
  if (!top_) throw std::logic_error("pop on a context without frames");
  EvalContext out(initial_);
  out.top_ = top_->next;
  return out;
}

EvalContext EvalContext::append(const EvalContext& inner) const {
  EvalContext out = *this;
  for (auto& f : inner.frames()) out = out.push(std::move(f));
  return out;
}

std::vector<Frame> EvalContext::frames() const {
  std::vector<Frame> out;
  out.reserve(depth());
  for (const Link* l = top_.get(); l; l = l->next.get()) out.push_back(l->frame);
  return {out.rbegin(), out.rend()};
}

std::string EvalContext::str() const {
  std::string out;
  switch (initial_) {
    case InitialKind::Hole: out = "[_]"; break;
    case InitialKind::Produce: out = "[produce _]"; break;
    case InitialKind::ProduceRet: out = "[produce ret _]"; break;
  }
  for (const auto& f : frames()) out += f.str();
  return out;
}

Term plug_unchecked(const EvalContext& c, const Term& m) {
  Term t = m;
  for (auto f = c.frames(); !f.empty(); f.pop_back()) t = f.back().fill(t);
  switch (c.initial()) {
    case InitialKind::Hole: return t;
    case InitialKind::Produce: return Term::produce(t);
    case InitialKind::ProduceRet: return Term::produce(Term::ret(t));
  }
  return t;
}

Term plug(const EvalContext& c, const Term& m) {
  auto hole = typing::check_context(c);
  if (!hole.ok()) throw ContextError("ill-typed context: " + hole.error().message);
  auto mt = typing::synth(m);
  if (!mt.ok()) throw ContextError("ill-typed term: " + mt.error().message);
  if (mt.type() != hole.type()) {
    throw ContextError("hole type mismatch: context expects " + hole.type().str() + " but the term has type " +
                       mt.type().str());
  }
  return plug_unchecked(c, m);
}

}  // namespace cbpv
