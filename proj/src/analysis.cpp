#include "lindyna/analysis.hpp"

#include <cmath>

#include "lindyna/envs.hpp"
#include "lindyna/features.hpp"

namespace lindyna::analysis {

Eigen::MatrixXd to_dense(const LinearModel& m) {
  const int n = m.dim();
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (const Entry& e : m.column_entries(j)) F(e.index, j) = e.value;
  return F;
}

double numerical_radius(const Eigen::MatrixXd& F) {
  if (F.rows() != F.cols()) throw ContractViolation("numerical_radius: matrix not square");
  if (!F.allFinite()) throw ContractViolation("numerical_radius: non-finite entries");
  const Eigen::MatrixXd sym = 0.5 * (F + F.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

Theta fixed_point(const LinearModel& m, double gamma) {
  const int n = m.dim();
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(n, n) - gamma * to_dense(m).transpose();
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = m.b(i);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  // condition estimate against unit scale, so a uniformly tiny G still counts
  // as ill posed
  if (!(smin > 0.0) || std::max(smax, 1.0) / smin > 1e12)
    throw IllPosedError("fixed_point: I - gamma F' is singular or near-singular; no usable fixed point");
  const Eigen::VectorXd theta = svd.solve(b);

  const double res = (G * theta - b).norm() / (1.0 + b.norm());
  if (res > 1e-10)
    throw IllPosedError("fixed_point: solve residual above tolerance");

  Theta out(n);
  for (int i = 0; i < n; ++i) out[i] = theta(i);
  return out;
}

double fixed_point_residual(const LinearModel& m, const Theta& theta, double gamma) {
  if (theta.dim() != m.dim()) throw ContractViolation("fixed_point_residual: dimension mismatch");
  double sum = 0.0;
  for (int i = 0; i < m.dim(); ++i) {
    const double r = m.b(i) + gamma * m.predicted_value(theta.values(), i) - theta[i];
    sum += r * r;
  }
  return std::sqrt(sum);
}

LstdStats lstd_stats(const TransitionDataset& data, double gamma) {
  if (data.empty()) throw ContractViolation("lstd_stats: empty dataset");
  const int n = data.dim();
  LstdStats s{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  for (const Transition& t : data.transitions()) {
    for (const Entry& u : t.phi.entries()) {
      for (const Entry& v : t.phi.entries()) s.A(u.index, v.index) += u.value * v.value;
      for (const Entry& v : t.phi_next.entries()) s.A(u.index, v.index) -= gamma * u.value * v.value;
      s.rbar(u.index) += u.value * t.reward;
    }
  }
  return s;
}

Theta lstd_solve(const TransitionDataset& data, double gamma) {
  const LstdStats s = lstd_stats(data, gamma);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(s.A);
  if (!lu.isInvertible()) throw IllPosedError("lstd_solve: A is singular");
  const Eigen::VectorXd theta = lu.solve(s.rbar);
  Theta out(data.dim());
  for (int i = 0; i < data.dim(); ++i) out[i] = theta(i);
  return out;
}

double rg_objective(const LinearModel& m, const Theta& theta,
                    const std::vector<SparseVec>& samples, double gamma) {
  if (samples.empty()) throw ContractViolation("rg_objective: empty sample list");
  double sum = 0.0;
  for (const SparseVec& phi : samples) {
    if (phi.dim() != m.dim()) throw ContractViolation("rg_objective: dimension mismatch");
    double delta = m.predicted_reward(phi) - theta.dot(phi);
    for (const Entry& e : phi.entries())
      delta += gamma * e.value * m.predicted_value(theta.values(), e.index);
    sum += 0.5 * delta * delta;
  }
  return sum / static_cast<double>(samples.size());
}

double td_fixed_loss(const TransitionDataset& data, const Theta& theta, double gamma) {
  if (data.empty()) throw ContractViolation("td_fixed_loss: empty dataset");
  if (theta.dim() != data.dim()) throw ContractViolation("td_fixed_loss: dimension mismatch");
  std::vector<double> sum(static_cast<std::size_t>(data.dim()), 0.0);
  for (const Transition& t : data.transitions()) {
    const double delta = t.reward + gamma * theta.dot(t.phi_next) - theta.dot(t.phi);
    for (const Entry& e : t.phi.entries()) sum[static_cast<std::size_t>(e.index)] += delta * e.value;
  }
  double norm2 = 0.0;
  for (double x : sum) norm2 += x * x;
  return std::sqrt(norm2);
}

double rmse_vs_true(const Theta& theta) {
  if (theta.dim() != kBoyanFeatureDim)
    throw ContractViolation("rmse_vs_true: expected the 25-dim chain feature space");
  double sum = 0.0;
  for (int s = 0; s < kBoyanStateCount; ++s) {
    const double err = theta.dot(boyan_features(s)) - boyan_true_value(s);
    sum += err * err;
  }
  return std::sqrt(sum / kBoyanStateCount);
}

}  // namespace lindyna::analysis
