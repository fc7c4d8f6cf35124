#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lindyna/errors.hpp"

namespace lindyna {

/// One stored coordinate of a sparse vector.
struct Entry {
  int index;
  double value;

  friend bool operator==(const Entry& a, const Entry& b) {
    return a.index == b.index && a.value == b.value;
  }
};

/// Immutable sparse feature vector. Entries are strictly increasing in index,
/// never zero-valued, and always below dim(). This is the currency passed
/// between features, environments, models and planners.
class SparseVec {
 public:
  SparseVec() = default;

  /// Vector of the given dimension with no entries (the zero vector).
  explicit SparseVec(int dim) : dim_(dim) {
    if (dim < 0) throw ContractViolation("SparseVec: negative dimension");
  }

  /// Builds from (index, value) pairs. Validates the representation
  /// invariants and throws ContractViolation on any breach.
  static SparseVec from_entries(int dim, std::vector<Entry> entries);

  /// Like from_entries but accepts unsorted indices with possible duplicates;
  /// duplicates are summed, zeros dropped.
  static SparseVec from_unsorted(int dim, std::vector<Entry> entries);

  int dim() const { return dim_; }
  int nnz() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Coordinate lookup by binary search; zero if not stored.
  double at(int i) const;

  friend bool operator==(const SparseVec& a, const SparseVec& b) {
    return a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

 private:
  int dim_ = 0;
  std::vector<Entry> entries_;
};

/// Inner product of two sparse vectors of equal dimension.
double dot(const SparseVec& u, const SparseVec& v);

/// e_i in R^n: the single entry (i, 1.0).
SparseVec unit_basis(int i, int n);

}  // namespace lindyna
