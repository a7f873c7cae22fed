#pragma once

#include <memory>
#include <string>

namespace holi {

/// A HOLi type: unit | int | T * T | T -> T. Immutable, shared, compared structurally.
class Type {
 public:
  enum class Kind { Unit, Int, Prod, Arrow };

  Type() : Type(unit()) {}

  static Type unit();
  static Type integer();
  static Type prod(Type left, Type right);
  static Type arrow(Type arg, Type result);

  Kind kind() const;
  bool is_unit() const { return kind() == Kind::Unit; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_prod() const { return kind() == Kind::Prod; }
  bool is_arrow() const { return kind() == Kind::Arrow; }

  /// Left component of a product, argument type of an arrow.
  Type left() const;
  /// Right component of a product, result type of an arrow.
  Type right() const;

  /// Reference cells may hold any type except products.
  bool storable() const { return !is_prod(); }

  std::string str() const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Type::Node {
  Kind kind;
  std::shared_ptr<const Node> left;
  std::shared_ptr<const Node> right;
};

inline Type::Kind Type::kind() const { return node_->kind; }

}  // namespace holi
