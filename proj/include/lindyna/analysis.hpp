#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "lindyna/model.hpp"
#include "lindyna/theta.hpp"

namespace lindyna::analysis {

/// Dense copy of the model's forward matrix. Small dimensions only.
Eigen::MatrixXd to_dense(const LinearModel& m);

/// max_{||x||_2 = 1} x'Fx over real unit vectors, i.e. the largest eigenvalue
/// of the symmetric part (F + F')/2. r(F) <= 1 is the TD-planning stability
/// condition.
double numerical_radius(const Eigen::MatrixXd& F);

/// theta = (I - gamma F')^-1 b, the unique parameter vector every planning
/// update leaves unchanged. Throws IllPosedError when the system is singular
/// or its condition estimate exceeds 1e12.
Theta fixed_point(const LinearModel& m, double gamma);

/// || b + (gamma F' - I) theta ||_2, the fixed-point equation residual.
double fixed_point_residual(const LinearModel& m, const Theta& theta, double gamma);

/// theta solving sum_k phi_k (r_k + gamma phi'_k . theta - phi_k . theta) = 0,
/// i.e. A theta = rbar with A = sum phi (phi - gamma phi')'. Throws
/// IllPosedError on a singular A.
Theta lstd_solve(const TransitionDataset& data, double gamma);

/// LSTD statistics of a dataset: A and rbar as above. Dense; small dimensions.
struct LstdStats {
  Eigen::MatrixXd A;
  Eigen::VectorXd rbar;
};
LstdStats lstd_stats(const TransitionDataset& data, double gamma);

/// Mean of 1/2 (b'phi + gamma theta'F phi - theta'phi)^2 over the samples:
/// the residual-gradient objective the planning iteration descends.
double rg_objective(const LinearModel& m, const Theta& theta,
                    const std::vector<SparseVec>& samples, double gamma);

/// || sum_k phi_k delta_k(theta) ||_2 over a frozen dataset: the norm of the
/// summed TD(0) updates that would have been attempted at theta. Works at any
/// dimension; equals ||A theta - rbar||_2.
double td_fixed_loss(const TransitionDataset& data, const Theta& theta, double gamma);

/// Root-mean-squared error of theta'phi(s) against the exact chain values,
/// averaged over all 99 states. Boyan setting only (dim 25).
double rmse_vs_true(const Theta& theta);

}  // namespace lindyna::analysis
