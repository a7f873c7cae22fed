#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "holicheck/type.hpp"

namespace holi {

enum class Sort : std::uint8_t { Method, Reference, Variable, SymInt };

/// Canonical renamings use uids from here up; supplies never reach it.
inline constexpr std::uint32_t kCanonicalBase = 1u << 30;

/// A typed name. Identity is (sort, uid); the type and source label ride along.
///
/// Names declared in source text carry their spelling as label. Names minted
/// while running (lambda methods, Opponent names, symbolic integers) carry none
/// and print as a sort prefix followed by the uid.
struct Name {
  Sort sort = Sort::Variable;
  std::uint32_t uid = 0;
  Type type;
  std::shared_ptr<const std::string> label;

  bool declared() const { return label != nullptr; }
  bool canonical() const { return uid >= kCanonicalBase; }
  std::string str() const;

  friend bool operator==(const Name& a, const Name& b) { return a.sort == b.sort && a.uid == b.uid; }
  friend std::strong_ordering operator<=>(const Name& a, const Name& b) {
    if (auto c = a.sort <=> b.sort; c != 0) return c;
    return a.uid <=> b.uid;
  }
};

/// Monotone per-sort uid counters. Copying a supply forks it: both copies hand
/// out the same continuation, which is what a path-local supply needs.
class NameSupply {
 public:
  NameSupply() = default;
  /// Every counter starts at `seed` (uids then begin at seed + 1).
  explicit NameSupply(std::uint32_t seed) { next_.fill(seed); }

  Name fresh(Sort sort, Type type, std::shared_ptr<const std::string> label = nullptr);
  Name fresh_labelled(Sort sort, Type type, const std::string& label) {
    return fresh(sort, std::move(type), std::make_shared<const std::string>(label));
  }

  std::uint32_t peek(Sort sort) const { return next_[static_cast<std::size_t>(sort)]; }
  /// Advances every counter by `n`.
  void skip(std::uint32_t n) {
    for (auto& c : next_) c += n;
  }

  friend bool operator==(const NameSupply&, const NameSupply&) = default;

 private:
  std::array<std::uint32_t, 4> next_{};
};

/// Small insertion-ordered set of names. Pub and Abs are tiny, and exploration
/// order depends on insertion order, so a vector is the right container.
class NameSet {
 public:
  bool contains(const Name& n) const;
  /// Returns false if already present.
  bool insert(const Name& n);
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<Name>& items() const { return items_; }

  friend bool operator==(const NameSet&, const NameSet&) = default;

 private:
  std::vector<Name> items_;
};

}  // namespace holi
