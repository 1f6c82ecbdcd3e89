#include "cbpv/types.hpp"

#include <functional>
#include <stdexcept>

namespace cbpv {

std::string to_string(Rank r) {
  switch (r) {
    case Rank::Zero:
      return "0";
    case Rank::Half:
      return "1/2";
    case Rank::One:
      return "1";
  }
  return "?";
}

Type Type::make(TypeKind kind, const Type* left, const Type* right) {
  std::size_t h = std::hash<int>{}(static_cast<int>(kind)) * 0x9e3779b97f4a7c15ULL;
  if (left) h ^= left->hash() + 0x7f4a7c15ULL + (h << 6) + (h >> 2);
  if (right) h ^= right->hash() + 0x2545f491ULL + (h << 6) + (h >> 2);
  return Type(std::make_shared<const Node>(Node{
      kind,
      left ? std::make_shared<const Type>(*left) : nullptr,
      right ? std::make_shared<const Type>(*right) : nullptr,
      h,
  }));
}

Type Type::unit() {
  static const Type t = make(TypeKind::Unit, nullptr, nullptr);
  return t;
}

Type Type::integer() {
  static const Type t = make(TypeKind::Int, nullptr, nullptr);
  return t;
}

Type Type::prod(Type first, Type second) {
  if (!first.is_value() || !second.is_value()) {
    throw std::invalid_argument("product components must be value types");
  }
  return make(TypeKind::Prod, &first, &second);
}

Type Type::v(Type inner) {
  if (!inner.is_value()) throw std::invalid_argument("V expects a value type");
  return make(TypeKind::V, &inner, nullptr);
}

Type Type::u(Type computation) {
  if (!computation.is_computation()) throw std::invalid_argument("U expects a computation type");
  return make(TypeKind::U, &computation, nullptr);
}

Type Type::f(Type value) {
  if (!value.is_value()) throw std::invalid_argument("F expects a value type");
  return make(TypeKind::F, &value, nullptr);
}

Type Type::arrow(Type argument, Type result) {
  if (!argument.is_value() || !result.is_computation()) {
    throw std::invalid_argument("arrow types are (value type -> computation type)");
  }
  return make(TypeKind::Arrow, &argument, &result);
}

bool Type::is_value() const {
  switch (kind()) {
    case TypeKind::Unit:
    case TypeKind::Int:
    case TypeKind::Prod:
    case TypeKind::V:
    case TypeKind::U:
      return true;
    default:
      return false;
  }
}

bool Type::is_computation() const { return !is_value(); }

const Type& Type::first() const {
  if (!node_->left) throw std::logic_error("type " + str() + " has no components");
  return *node_->left;
}

const Type& Type::second() const {
  if (!node_->right) throw std::logic_error("type " + str() + " has no second component");
  return *node_->right;
}

Rank Type::rank() const {
  if (is_computation()) return Rank::One;
  if (kind() == TypeKind::V) return Rank::Half;
  return Rank::Zero;
}

bool Type::first_order() const {
  switch (kind()) {
    case TypeKind::Unit:
    case TypeKind::Int:
      return true;
    case TypeKind::Prod:
      return first().first_order() && second().first_order();
    case TypeKind::V:
    case TypeKind::U:
    case TypeKind::F:
      return first().first_order();
    case TypeKind::Arrow:
      return false;
  }
  return false;
}

std::string Type::str() const {
  switch (kind()) {
    case TypeKind::Unit:
      return "unit";
    case TypeKind::Int:
      return "int";
    case TypeKind::Prod:
      return "(" + first().str() + " * " + second().str() + ")";
    case TypeKind::V:
      return "V " + first().str();
    case TypeKind::U:
      return "U " + first().str();
    case TypeKind::F:
      return "F " + first().str();
    case TypeKind::Arrow:
      return "(" + first().str() + " -> " + second().str() + ")";
  }
  return "?";
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash || a.kind() != b.kind()) return false;
  const auto& an = *a.node_;
  const auto& bn = *b.node_;
  if (static_cast<bool>(an.left) != static_cast<bool>(bn.left)) return false;
  if (an.left && !(*an.left == *bn.left)) return false;
  if (static_cast<bool>(an.right) != static_cast<bool>(bn.right)) return false;
  if (an.right && !(*an.right == *bn.right)) return false;
  return true;
}

}  // namespace cbpv
