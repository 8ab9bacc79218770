#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace stodom::cpree::internal {

/// Binary min-heap over sites 0..n-1 keyed by (time, site), with O(log n)
/// update and removal by site.
class IndexHeap {
 public:
  explicit IndexHeap(std::size_t n) : key_(n, 0.0), pos_(n, kAbsent) {}

  bool empty() const { return heap_.empty(); }
  bool contains(std::size_t s) const { return pos_[s] != kAbsent; }
  std::size_t top() const { return heap_.front(); }
  double top_time() const { return key_[heap_.front()]; }

  void set(std::size_t s, double t) {
    if (!contains(s)) {
      key_[s] = t;
      pos_[s] = heap_.size();
      heap_.push_back(s);
      sift_up(pos_[s]);
      return;
    }
    const double old = key_[s];
    key_[s] = t;
    if (t < old) {
      sift_up(pos_[s]);
    } else {
      sift_down(pos_[s]);
    }
  }

  void remove(std::size_t s) {
    if (!contains(s)) return;
    const std::size_t i = pos_[s];
    const std::size_t last = heap_.back();
    heap_[i] = last;
    pos_[last] = i;
    heap_.pop_back();
    pos_[s] = kAbsent;
    if (i < heap_.size()) {
      sift_up(i);
      sift_down(pos_[last]);
    }
  }

 private:
  static constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();

  bool less(std::size_t a, std::size_t b) const {
    return key_[a] < key_[b] || (key_[a] == key_[b] && a < b);
  }

  void place(std::size_t i, std::size_t s) {
    heap_[i] = s;
    pos_[s] = i;
  }

  void sift_up(std::size_t i) {
    const std::size_t s = heap_[i];
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!less(s, heap_[parent])) break;
      place(i, heap_[parent]);
      i = parent;
    }
    place(i, s);
  }

  void sift_down(std::size_t i) {
    const std::size_t s = heap_[i];
    const std::size_t n = heap_.size();
    while (true) {
      std::size_t child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && less(heap_[child + 1], heap_[child])) ++child;
      if (!less(heap_[child], s)) break;
      place(i, heap_[child]);
      i = child;
    }
    place(i, s);
  }

  std::vector<double> key_;
  std::vector<std::size_t> pos_;
  std::vector<std::size_t> heap_;
};

}  // namespace stodom::cpree::internal
