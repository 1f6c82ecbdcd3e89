#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbpv/term.hpp"

namespace cbpv {

enum class InitialKind {
  Hole,        // [_]
  Produce,     // [produce _]
  ProduceRet,  // [produce ret _]
};

enum class FrameKind {
  AppArg,  // [_ N]
  To,      // [_ to x in N]
  Force,   // [force _]
  Succ,
  Pred,
  Ifz,   // [ifz _ N P]
  Seq,   // [_; N]
  Proj1,
  Proj2,
  Do,  // [do x <- _; N]
};

const char* to_string(FrameKind kind);

/// One elementary context.
class Frame {
 public:
  static Frame app_arg(Term arg);
  static Frame to(Variable x, Term body);
  static Frame force();
  static Frame succ();
  static Frame pred();
  static Frame ifz(Term zero, Term nonzero);
  static Frame seq(Term next);
  /// `other` is the type of the discarded component.
  static Frame proj1(Type other);
  static Frame proj2(Type other);
  static Frame do_(Variable x, Term body);

  FrameKind kind() const { return kind_; }
  const Variable& binder() const { return *binder_; }
  const Term& operand(std::size_t i) const { return operands_.at(i); }
  std::size_t operand_count() const { return operands_.size(); }
  const Type& other() const { return *other_; }

  /// E[M].
  Term fill(const Term& m) const;
  std::string str() const;

 private:
  Frame(FrameKind kind, std::optional<Variable> binder, std::vector<Term> operands,
        std::optional<Type> other)
      : kind_(kind), binder_(std::move(binder)), operands_(std::move(operands)), other_(std::move(other)) {}

  FrameKind kind_;
  std::optional<Variable> binder_;
  std::vector<Term> operands_;
  std::optional<Type> other_;
};

/// E0 E1 ... En: an initial context followed by elementary frames. Stored as a
/// persistent stack whose top is the innermost frame En, so pushing and
/// popping share structure with the previous context.
class EvalContext {
 public:
  EvalContext() = default;
  explicit EvalContext(InitialKind initial) : initial_(initial) {}

  InitialKind initial() const { return initial_; }
  bool has_frames() const { return top_ != nullptr; }
  std::size_t depth() const { return top_ ? top_->depth : 0; }
  /// Innermost frame. Requires has_frames().
  const Frame& top() const { return top_->frame; }

  EvalContext push(Frame frame) const;
  EvalContext pop() const;
  /// C C' with the frames of `inner` appended inside this context's frames.
  /// The initial context of `inner` is ignored.
  EvalContext append(const EvalContext& inner) const;

  /// E1 ... En, outermost first.
  std::vector<Frame> frames() const;

  std::string str() const;

 private:
  struct Link {
    Frame frame;
    std::shared_ptr<const Link> next;
    std::size_t depth;
  };

  InitialKind initial_ = InitialKind::Hole;
  std::shared_ptr<const Link> top_;
};

/// C[M]; throws ContextError when M's type differs from C's hole type or C
/// itself is ill-typed.
Term plug(const EvalContext& c, const Term& m);

/// C[M] without type checks.
Term plug_unchecked(const EvalContext& c, const Term& m);

class ContextError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbpv
