#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <vector>

namespace holi {

/// Immutable cons list. Push is O(1) and shares the tail, so sibling
/// configurations share their common history.
template <class T>
class PList {
 public:
  PList() = default;

  bool empty() const { return cell_ == nullptr; }
  std::size_t size() const { return cell_ ? cell_->size : 0; }
  const T& head() const { return cell_->head; }
  PList tail() const { return PList(cell_->tail); }
  PList push(T value) const {
    return PList(std::make_shared<const Cell>(Cell{std::move(value), cell_, size() + 1}));
  }

  /// Oldest element first.
  std::vector<T> to_vector() const {
    std::vector<T> out(size());
    std::size_t i = size();
    for (const Cell* c = cell_.get(); c; c = c->tail.get()) out[--i] = c->head;
    return out;
  }

  template <class F>
  void for_each_newest_first(F&& f) const {
    for (const Cell* c = cell_.get(); c; c = c->tail.get()) f(c->head);
  }

 private:
  struct Cell {
    T head;
    std::shared_ptr<const Cell> tail;
    std::size_t size;
  };
  explicit PList(std::shared_ptr<const Cell> c) : cell_(std::move(c)) {}
  std::shared_ptr<const Cell> cell_;
};

/// Copy-on-write ordered map: copies share storage until one of them writes.
template <class K, class V>
class CowMap {
 public:
  using Map = std::map<K, V>;

  CowMap() : map_(std::make_shared<Map>()) {}
  explicit CowMap(Map m) : map_(std::make_shared<Map>(std::move(m))) {}

  const V* find(const K& key) const {
    auto it = map_->find(key);
    return it == map_->end() ? nullptr : &it->second;
  }
  bool contains(const K& key) const { return map_->count(key) != 0; }
  const V& at(const K& key) const { return map_->at(key); }
  std::size_t size() const { return map_->size(); }
  const Map& items() const { return *map_; }
  auto begin() const { return map_->cbegin(); }
  auto end() const { return map_->cend(); }

  void set(const K& key, V value) {
    if (map_.use_count() > 1) map_ = std::make_shared<Map>(*map_);
    (*map_)[key] = std::move(value);
  }

 private:
  std::shared_ptr<Map> map_;
};

}  // namespace holi
