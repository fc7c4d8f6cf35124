#include "lindyna/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace lindyna {

LinearModel::LinearModel(int dim, double drop_tol) : n_(dim), drop_tol_(drop_tol) {
  if (dim <= 0) throw ContractViolation("LinearModel: dimension must be positive");
  if (drop_tol < 0.0) throw ContractViolation("LinearModel: negative drop tolerance");
  cols_.resize(static_cast<std::size_t>(dim));
  rows_.resize(static_cast<std::size_t>(dim));
  b_.assign(static_cast<std::size_t>(dim), 0.0);
}

void LinearModel::erase_row_entry(int i, int j) {
  auto& row = rows_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Entry& e, int idx) { return e.index < idx; });
  row.erase(it);
}

void LinearModel::upsert_row_entry(int i, int j, double value) {
  auto& row = rows_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Entry& e, int idx) { return e.index < idx; });
  if (it != row.end() && it->index == j) {
    it->value = value;
  } else {
    row.insert(it, {j, value});
  }
}

void LinearModel::update(const SparseVec& phi, double reward, const SparseVec& phi_next,
                         double alpha) {
  if (phi.dim() != n_ || phi_next.dim() != n_)
    throw ContractViolation("LinearModel::update: dimension mismatch");
  if (alpha < 0.0) throw ContractViolation("LinearModel::update: negative step size");
  if (alpha == 0.0 || phi.empty()) return;

  // delta = phi' - F phi, accumulated densely over the touched rows.
  if (acc_.empty()) acc_.assign(static_cast<std::size_t>(n_), 0.0);
  touched_.clear();
  for (const Entry& pj : phi.entries()) {
    for (const Entry& e : cols_[static_cast<std::size_t>(pj.index)]) {
      if (acc_[static_cast<std::size_t>(e.index)] == 0.0) touched_.push_back(e.index);
      acc_[static_cast<std::size_t>(e.index)] -= pj.value * e.value;
    }
  }
  for (const Entry& e : phi_next.entries()) {
    if (acc_[static_cast<std::size_t>(e.index)] == 0.0) touched_.push_back(e.index);
    acc_[static_cast<std::size_t>(e.index)] += e.value;
  }
  std::sort(touched_.begin(), touched_.end());
  std::vector<Entry> delta;
  delta.reserve(touched_.size());
  for (int i : touched_) {
    const double v = acc_[static_cast<std::size_t>(i)];
    acc_[static_cast<std::size_t>(i)] = 0.0;
    if (v != 0.0) delta.push_back({i, v});
  }

  // Rank-one update: column j += (alpha * phi_j) * delta, pruning as we go.
  for (const Entry& pj : phi.entries()) {
    const double scale = alpha * pj.value;
    auto& col = cols_[static_cast<std::size_t>(pj.index)];
    std::vector<Entry> merged;
    merged.reserve(col.size() + delta.size());
    auto a = col.begin();
    auto d = delta.begin();
    auto emit = [&](int i, double value, bool existed) {
      const bool keep = std::abs(value) > drop_tol_;
      if (keep) {
        merged.push_back({i, value});
        if (existed) {
          upsert_row_entry(i, pj.index, value);
        } else {
          upsert_row_entry(i, pj.index, value);
          ++nnz_;
        }
      } else if (existed) {
        erase_row_entry(i, pj.index);
        --nnz_;
      }
    };
    while (a != col.end() || d != delta.end()) {
      if (d == delta.end() || (a != col.end() && a->index < d->index)) {
        merged.push_back(*a);  // untouched by this rank-one step
        ++a;
      } else if (a == col.end() || d->index < a->index) {
        emit(d->index, scale * d->value, false);
        ++d;
      } else {
        emit(a->index, a->value + scale * d->value, true);
        ++a;
        ++d;
      }
    }
    col = std::move(merged);
  }

  // b += alpha * (r - b'phi) * phi
  const double err = reward - predicted_reward(phi);
  for (const Entry& pj : phi.entries())
    b_[static_cast<std::size_t>(pj.index)] += alpha * err * pj.value;
}

std::pair<SparseVec, double> LinearModel::predict(const SparseVec& phi) const {
  if (phi.dim() != n_) throw ContractViolation("LinearModel::predict: dimension mismatch");
  const double r = predicted_reward(phi);
  // Planning samples are unit basis vectors; F e_j is just column j.
  if (phi.nnz() == 1 && phi.entries().front().value == 1.0)
    return {column(phi.entries().front().index), r};

  std::vector<double> acc(static_cast<std::size_t>(n_), 0.0);
  std::vector<int> touched;
  for (const Entry& pj : phi.entries()) {
    for (const Entry& e : cols_[static_cast<std::size_t>(pj.index)]) {
      if (acc[static_cast<std::size_t>(e.index)] == 0.0) touched.push_back(e.index);
      acc[static_cast<std::size_t>(e.index)] += pj.value * e.value;
    }
  }
  std::sort(touched.begin(), touched.end());
  std::vector<Entry> entries;
  entries.reserve(touched.size());
  for (int i : touched) {
    const double v = acc[static_cast<std::size_t>(i)];
    if (std::abs(v) > drop_tol_) entries.push_back({i, v});
  }
  return {SparseVec::from_entries(n_, std::move(entries)), r};
}

SparseVec LinearModel::column(int j) const {
  if (j < 0 || j >= n_) throw ContractViolation("LinearModel::column: index out of range");
  return SparseVec::from_entries(n_, cols_[static_cast<std::size_t>(j)]);
}

std::span<const Entry> LinearModel::column_entries(int j) const {
  if (j < 0 || j >= n_) throw ContractViolation("LinearModel::column_entries: index out of range");
  return cols_[static_cast<std::size_t>(j)];
}

std::span<const Entry> LinearModel::row_entries(int i) const {
  if (i < 0 || i >= n_) throw ContractViolation("LinearModel::row_entries: index out of range");
  return rows_[static_cast<std::size_t>(i)];
}

double LinearModel::b(int i) const {
  if (i < 0 || i >= n_) throw ContractViolation("LinearModel::b: index out of range");
  return b_[static_cast<std::size_t>(i)];
}

double LinearModel::predicted_value(std::span<const double> theta, int j) const {
  double sum = 0.0;
  for (const Entry& e : cols_[static_cast<std::size_t>(j)])
    sum += theta[static_cast<std::size_t>(e.index)] * e.value;
  return sum;
}

double LinearModel::predicted_reward(const SparseVec& phi) const {
  double sum = 0.0;
  for (const Entry& e : phi.entries()) sum += b_[static_cast<std::size_t>(e.index)] * e.value;
  return sum;
}

void LinearModel::set_entry(int i, int j, double value) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_)
    throw ContractViolation("LinearModel::set_entry: index out of range");
  auto& col = cols_[static_cast<std::size_t>(j)];
  auto it = std::lower_bound(col.begin(), col.end(), i,
                             [](const Entry& e, int idx) { return e.index < idx; });
  const bool exists = it != col.end() && it->index == i;
  if (std::abs(value) > drop_tol_) {
    if (exists) {
      it->value = value;
    } else {
      col.insert(it, {i, value});
      ++nnz_;
    }
    upsert_row_entry(i, j, value);
  } else if (exists) {
    col.erase(it);
    erase_row_entry(i, j);
    --nnz_;
  }
}

void LinearModel::set_b(int i, double value) {
  if (i < 0 || i >= n_) throw ContractViolation("LinearModel::set_b: index out of range");
  b_[static_cast<std::size_t>(i)] = value;
}

ActionModelSet::ActionModelSet(int n_actions, int dim, double drop_tol) : dim_(dim) {
  if (n_actions <= 0) throw ContractViolation("ActionModelSet: need at least one action");
  models_.reserve(static_cast<std::size_t>(n_actions));
  for (int a = 0; a < n_actions; ++a) models_.emplace_back(dim, drop_tol);
}

LinearModel& ActionModelSet::model(int a) {
  if (a < 0 || a >= actions()) throw ContractViolation("ActionModelSet::model: bad action");
  return models_[static_cast<std::size_t>(a)];
}

const LinearModel& ActionModelSet::model(int a) const {
  if (a < 0 || a >= actions()) throw ContractViolation("ActionModelSet::model: bad action");
  return models_[static_cast<std::size_t>(a)];
}

std::vector<int> ActionModelSet::row_union(int i) const {
  std::vector<int> out;
  for (const LinearModel& m : models_)
    for (const Entry& e : m.row_entries(i)) out.push_back(e.index);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void TransitionDataset::add(SparseVec phi, double reward, SparseVec phi_next) {
  if (phi.dim() != dim_ || phi_next.dim() != dim_)
    throw ContractViolation("TransitionDataset::add: dimension mismatch");
  data_.push_back({std::move(phi), reward, std::move(phi_next)});
}

LinearModel fit_least_squares(const TransitionDataset& data) {
  if (data.empty()) throw ContractViolation("fit_least_squares: empty dataset");
  const int n = data.dim();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rbar = Eigen::VectorXd::Zero(n);
  for (const Transition& t : data.transitions()) {
    for (const Entry& u : t.phi.entries()) {
      for (const Entry& v : t.phi.entries()) C(u.index, v.index) += u.value * v.value;
      for (const Entry& v : t.phi_next.entries()) D(u.index, v.index) += u.value * v.value;
      rbar(u.index) += u.value * t.reward;
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
  if (!lu.isInvertible())
    throw IllPosedError("fit_least_squares: C = sum phi phi' is singular");
  const Eigen::MatrixXd Ft = lu.solve(D);
  const Eigen::VectorXd b = lu.solve(rbar);

  const double res_f = (C * Ft - D).norm() / (1.0 + D.norm());
  const double res_b = (C * b - rbar).norm() / (1.0 + rbar.norm());
  if (res_f > 1e-8 || res_b > 1e-8)
    throw IllPosedError("fit_least_squares: normal equations solved inaccurately");

  LinearModel m(n, /*drop_tol=*/0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (Ft(j, i) != 0.0) m.set_entry(i, j, Ft(j, i));
  for (int i = 0; i < n; ++i) m.set_b(i, b(i));
  return m;
}

}  // namespace lindyna
