#pragma once

#include <utility>
#include <vector>

#include "lindyna/errors.hpp"

namespace lindyna {

/// Keyed max-priority queue over feature indices 0..n-1. Each index is held
/// at most once; pushing an index already present keeps the larger of the two
/// priorities. Backed by a binary heap with an index-to-slot table, so push
/// and pop are O(log n) and membership is O(1).
class SweepQueue {
 public:
  explicit SweepQueue(int n);

  int capacity() const { return static_cast<int>(slot_.size()); }
  int size() const { return static_cast<int>(heap_.size()); }
  bool empty() const { return heap_.empty(); }

  /// Inserts or max-merges. Priorities must be >= 0.
  void push(int index, double priority);

  /// Removes and returns an index of maximal priority.
  int pop();

  /// Priority at the top, without removing.
  double top_priority() const;

  bool contains(int index) const { return slot_[static_cast<std::size_t>(index)] >= 0; }
  double priority_of(int index) const;

  void clear();

  /// Snapshot of the contents sorted by index.
  std::vector<std::pair<int, double>> entries() const;

 private:
  struct Node {
    int index;
    double priority;
  };

  void sift_up(int pos);
  void sift_down(int pos);
  void place(int pos, Node node);

  std::vector<Node> heap_;
  std::vector<int> slot_;  // index -> heap position, -1 if absent
};

}  // namespace lindyna
