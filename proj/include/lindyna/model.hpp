#pragma once

#include <span>
#include <utility>
#include <vector>

#include "lindyna/sparse_vec.hpp"

namespace lindyna {

/// Learned linear world model: forward matrix F and reward weights b, so that
/// F*phi estimates the next feature vector and b'phi the next reward.
///
/// F is stored sparsely with both orientations kept in sync: columns drive
/// prediction (F*e_j is column j), rows drive predecessor queries (the j with
/// F[i][j] != 0). Entries whose magnitude falls to the drop tolerance or
/// below are removed and treated as exact zeros.
///
/// Single writer; concurrent readers are safe only between updates.
class LinearModel {
 public:
  explicit LinearModel(int dim, double drop_tol = 1e-8);

  int dim() const { return n_; }
  double drop_tolerance() const { return drop_tol_; }

  /// Gradient-descent model learning on one transition:
  ///   F += alpha * (phi' - F phi) phi'
  ///   b += alpha * (r - b'phi) phi
  /// Only entries in columns where phi is nonzero can change.
  void update(const SparseVec& phi, double reward, const SparseVec& phi_next, double alpha);

  /// (F phi, b'phi) with output entries pruned at the drop tolerance.
  std::pair<SparseVec, double> predict(const SparseVec& phi) const;

  SparseVec column(int j) const;
  std::span<const Entry> column_entries(int j) const;  // (row, value), row ascending
  std::span<const Entry> row_entries(int i) const;     // (col, value), col ascending

  double b(int i) const;
  const std::vector<double>& b() const { return b_; }

  /// theta' (F e_j) without materializing the column.
  double predicted_value(std::span<const double> theta, int j) const;
  /// b'phi.
  double predicted_reward(const SparseVec& phi) const;

  /// Direct writes, used by fitting and tests. Values at or below the drop
  /// tolerance erase the entry.
  void set_entry(int i, int j, double value);
  void set_b(int i, double value);

  long nnz() const { return nnz_; }

 private:
  void erase_row_entry(int i, int j);
  void upsert_row_entry(int i, int j, double value);

  int n_;
  double drop_tol_;
  std::vector<std::vector<Entry>> cols_;
  std::vector<std::vector<Entry>> rows_;
  std::vector<double> b_;
  long nnz_ = 0;

  // update() scratch, reused across calls
  std::vector<double> acc_;
  std::vector<int> touched_;
};

/// Per-action world models sharing one feature space.
class ActionModelSet {
 public:
  ActionModelSet(int n_actions, int dim, double drop_tol = 1e-8);

  int actions() const { return static_cast<int>(models_.size()); }
  int dim() const { return dim_; }
  LinearModel& model(int a);
  const LinearModel& model(int a) const;

  /// Ascending column indices j such that F_a[i][j] != 0 for at least one a.
  std::vector<int> row_union(int i) const;

 private:
  int dim_;
  std::vector<LinearModel> models_;
};

struct Transition {
  SparseVec phi;
  double reward;
  SparseVec phi_next;
};

/// Feature/reward/next-feature triples with a common dimension.
class TransitionDataset {
 public:
  explicit TransitionDataset(int dim) : dim_(dim) {}

  void add(SparseVec phi, double reward, SparseVec phi_next);

  int dim() const { return dim_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  const std::vector<Transition>& transitions() const { return data_; }

 private:
  int dim_;
  std::vector<Transition> data_;
};

/// Least-squares model fit: F' = C^-1 D and b = C^-1 rbar with
/// C = sum phi phi', D = sum phi phi'', rbar = sum phi r. Throws IllPosedError
/// when C is singular or the normal-equation residual is not small.
LinearModel fit_least_squares(const TransitionDataset& data);

}  // namespace lindyna
