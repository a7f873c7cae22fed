#include "holicheck/name.hpp"

#include <algorithm>

namespace holi {

std::string Name::str() const {
  if (label) return *label;
  std::string n = std::to_string(canonical() ? uid - kCanonicalBase : uid);
  switch (sort) {
    case Sort::Method:
      return "m" + n;
    case Sort::Reference:
      return "r" + n;
    case Sort::Variable:
      return "x" + n;
    case Sort::SymInt:
      return "k" + n;
  }
  return "?";
}

Name NameSupply::fresh(Sort sort, Type type, std::shared_ptr<const std::string> label) {
  auto& counter = next_[static_cast<std::size_t>(sort)];
  ++counter;
  return Name{sort, counter, std::move(type), std::move(label)};
}

bool NameSet::contains(const Name& n) const {
  return std::find(items_.begin(), items_.end(), n) != items_.end();
}

bool NameSet::insert(const Name& n) {
  if (contains(n)) return false;
  items_.push_back(n);
  return true;
}

}  // namespace holi
