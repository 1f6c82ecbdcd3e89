#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <string>

namespace cbpv {

enum class TypeKind {
  // value types
  Unit,
  Int,
  Prod,
  V,
  U,
  // computation types
  F,
  Arrow,
};

/// Rank of a type: 0 for plain value types, 1/2 for V-types, 1 for
/// computation types. Elementary context frames never lower it.
enum class Rank { Zero = 0, Half = 1, One = 2 };

inline auto operator<=>(Rank a, Rank b) {
  return static_cast<int>(a) <=> static_cast<int>(b);
}

std::string to_string(Rank r);

/// Immutable type tree covering both sorts. Value types are Unit, Int, Prod,
/// V and U; computation types are F and Arrow.
class Type {
 public:
  static Type unit();
  static Type integer();
  static Type prod(Type first, Type second);
  static Type v(Type inner);
  static Type u(Type computation);
  static Type f(Type value);
  static Type arrow(Type argument, Type result);

  TypeKind kind() const { return node_->kind; }
  bool is_value() const;
  bool is_computation() const;

  /// Left child: Prod's first component, V/U/F's argument, Arrow's domain.
  const Type& first() const;
  /// Right child: Prod's second component, Arrow's codomain.
  const Type& second() const;

  Rank rank() const;

  /// True when no arrow occurs anywhere inside (U of a first-order
  /// computation type is first-order too). The domain order is decidable
  /// on the representations of exactly these types.
  bool first_order() const;

  std::string str() const;
  std::size_t hash() const { return node_->hash; }

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  struct Node {
    TypeKind kind;
    std::shared_ptr<const Type> left;
    std::shared_ptr<const Type> right;
    std::size_t hash;
  };
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Type make(TypeKind kind, const Type* left, const Type* right);

  std::shared_ptr<const Node> node_;
};

/// The observation type F V unit.
inline Type fvunit() { return Type::f(Type::v(Type::unit())); }

}  // namespace cbpv
