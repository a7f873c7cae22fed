#include "holicheck/type.hpp"

#include <cassert>

namespace holi {

Type Type::unit() {
  static const auto node = std::make_shared<const Node>(Node{Kind::Unit, nullptr, nullptr});
  return Type(node);
}

Type Type::integer() {
  static const auto node = std::make_shared<const Node>(Node{Kind::Int, nullptr, nullptr});
  return Type(node);
}

Type Type::prod(Type left, Type right) {
  return Type(std::make_shared<const Node>(Node{Kind::Prod, left.node_, right.node_}));
}

Type Type::arrow(Type arg, Type result) {
  return Type(std::make_shared<const Node>(Node{Kind::Arrow, arg.node_, result.node_}));
}

Type Type::left() const {
  assert(is_prod() || is_arrow());
  return Type(node_->left);
}

Type Type::right() const {
  assert(is_prod() || is_arrow());
  return Type(node_->right);
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.is_unit() || a.is_int()) return true;
  return a.left() == b.left() && a.right() == b.right();
}

std::string Type::str() const {
  switch (kind()) {
    case Kind::Unit:
      return "unit";
    case Kind::Int:
      return "int";
    case Kind::Prod: {
      // '*' is right-associative and binds tighter than '->'.
      std::string l = left().str();
      if (left().is_prod() || left().is_arrow()) l = "(" + l + ")";
      std::string r = right().str();
      if (right().is_arrow()) r = "(" + r + ")";
      return l + " * " + r;
    }
    case Kind::Arrow: {
      std::string l = left().str();
      if (left().is_arrow()) l = "(" + l + ")";
      return l + " -> " + right().str();
    }
  }
  return "?";
}

}  // namespace holi
