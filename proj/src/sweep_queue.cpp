#include "lindyna/sweep_queue.hpp"

#include <algorithm>
#include <cmath>

namespace lindyna {

SweepQueue::SweepQueue(int n) {
  if (n < 0) throw ContractViolation("SweepQueue: negative capacity");
  slot_.assign(static_cast<std::size_t>(n), -1);
}

void SweepQueue::place(int pos, Node node) {
  heap_[static_cast<std::size_t>(pos)] = node;
  slot_[static_cast<std::size_t>(node.index)] = pos;
}

void SweepQueue::push(int index, double priority) {
  if (index < 0 || index >= capacity()) throw ContractViolation("SweepQueue::push: index out of range");
  if (!(priority >= 0.0)) throw ContractViolation("SweepQueue::push: priority must be >= 0");
  const int pos = slot_[static_cast<std::size_t>(index)];
  if (pos >= 0) {
    Node& node = heap_[static_cast<std::size_t>(pos)];
    if (priority > node.priority) {
      node.priority = priority;
      sift_up(pos);
    }
    return;
  }
  heap_.push_back({index, priority});
  slot_[static_cast<std::size_t>(index)] = size() - 1;
  sift_up(size() - 1);
}

int SweepQueue::pop() {
  if (empty()) throw ContractViolation("SweepQueue::pop: queue is empty");
  const int index = heap_.front().index;
  slot_[static_cast<std::size_t>(index)] = -1;
  Node last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    place(0, last);
    sift_down(0);
  }
  return index;
}

double SweepQueue::top_priority() const {
  if (empty()) throw ContractViolation("SweepQueue::top_priority: queue is empty");
  return heap_.front().priority;
}

double SweepQueue::priority_of(int index) const {
  const int pos = slot_[static_cast<std::size_t>(index)];
  if (pos < 0) throw ContractViolation("SweepQueue::priority_of: index not present");
  return heap_[static_cast<std::size_t>(pos)].priority;
}

void SweepQueue::clear() {
  for (const Node& n : heap_) slot_[static_cast<std::size_t>(n.index)] = -1;
  heap_.clear();
}

std::vector<std::pair<int, double>> SweepQueue::entries() const {
  std::vector<std::pair<int, double>> out;
  out.reserve(heap_.size());
  for (const Node& n : heap_) out.emplace_back(n.index, n.priority);
  std::sort(out.begin(), out.end());
  return out;
}

void SweepQueue::sift_up(int pos) {
  Node node = heap_[static_cast<std::size_t>(pos)];
  while (pos > 0) {
    const int parent = (pos - 1) / 2;
    if (heap_[static_cast<std::size_t>(parent)].priority >= node.priority) break;
    place(pos, heap_[static_cast<std::size_t>(parent)]);
    pos = parent;
  }
  place(pos, node);
}

void SweepQueue::sift_down(int pos) {
  Node node = heap_[static_cast<std::size_t>(pos)];
  const int n = size();
  while (true) {
    int child = 2 * pos + 1;
    if (child >= n) break;
    if (child + 1 < n &&
        heap_[static_cast<std::size_t>(child + 1)].priority > heap_[static_cast<std::size_t>(child)].priority)
      ++child;
    if (heap_[static_cast<std::size_t>(child)].priority <= node.priority) break;
    place(pos, heap_[static_cast<std::size_t>(child)]);
    pos = child;
  }
  place(pos, node);
}

}  // namespace lindyna
