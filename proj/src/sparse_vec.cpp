#include "lindyna/sparse_vec.hpp"

#include <algorithm>

namespace lindyna {

SparseVec SparseVec::from_entries(int dim, std::vector<Entry> entries) {
  SparseVec v(dim);
  int prev = -1;
  for (const Entry& e : entries) {
    if (e.index <= prev) throw ContractViolation("SparseVec: indices not strictly increasing");
    if (e.index >= dim) throw ContractViolation("SparseVec: index out of range");
    if (e.value == 0.0) throw ContractViolation("SparseVec: stored zero value");
    prev = e.index;
  }
  v.entries_ = std::move(entries);
  return v;
}

SparseVec SparseVec::from_unsorted(int dim, std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  std::vector<Entry> combined;
  combined.reserve(entries.size());
  for (const Entry& e : entries) {
    if (!combined.empty() && combined.back().index == e.index) {
      combined.back().value += e.value;
    } else {
      combined.push_back(e);
    }
  }
  std::erase_if(combined, [](const Entry& e) { return e.value == 0.0; });
  return from_entries(dim, std::move(combined));
}

double SparseVec::at(int i) const {
  if (i < 0 || i >= dim_) throw ContractViolation("SparseVec::at: index out of range");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                             [](const Entry& e, int idx) { return e.index < idx; });
  if (it != entries_.end() && it->index == i) return it->value;
  return 0.0;
}

double dot(const SparseVec& u, const SparseVec& v) {
  if (u.dim() != v.dim()) throw ContractViolation("dot: dimension mismatch");
  double sum = 0.0;
  auto a = u.entries().begin();
  auto b = v.entries().begin();
  while (a != u.entries().end() && b != v.entries().end()) {
    if (a->index < b->index) {
      ++a;
    } else if (b->index < a->index) {
      ++b;
    } else {
      sum += a->value * b->value;
      ++a;
      ++b;
    }
  }
  return sum;
}

SparseVec unit_basis(int i, int n) {
  if (i < 0 || i >= n) throw ContractViolation("unit_basis: index out of range");
  return SparseVec::from_entries(n, {{i, 1.0}});
}

}  // namespace lindyna
