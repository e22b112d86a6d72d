#pragma once

#include <Eigen/Core>

#include <vector>

namespace handsteer {

/// Weights and stopping rule for ordered subspace clustering:
///   min ½||E||²_F + λ₁||Z||₁ + λ₂||ZR||₁,₂  s.t.  X = XZ + E
struct OscConfig {
  double lambda1 = 0.1;
  double lambda2 = 1.0;  ///< 0 with zero_diagonal gives the SSC baseline
  double rho = 1.0;
  int max_iter = 300;
  double tol = 1e-4;
  bool zero_diagonal = false;
  bool adapt_rho = true;  ///< residual balancing: x2 / ÷2 when the residual ratio exceeds 10

  void validate() const;
};

struct OscSolution {
  Eigen::MatrixXd Z;  ///< n x n
  Eigen::MatrixXd E;  ///< m x n, E = X - XZ
  int iterations = 0;
  bool converged = false;
  std::vector<double> primal_history;  ///< relative primal residual per iteration
  std::vector<double> dual_history;    ///< relative dual residual per iteration
  /// Objective of the incumbent (best iterate so far); index 0 is Z = 0.
  std::vector<double> objective_history;
  /// Objective of each ADMM iterate, which need not decrease monotonically.
  std::vector<double> raw_objective_history;
  int best_iteration = 0;  ///< iterate returned as Z (0: the zero matrix)
};

/// Lower bidiagonal n x (n-1) difference operator: R(i,i) = -1, R(i+1,i) = 1.
Eigen::MatrixXd build_R(Eigen::Index n);

/// Columns of Z·R, i.e. z_{j+1} - z_j, without forming R.
Eigen::MatrixXd consecutive_differences(const Eigen::MatrixXd& Z);

/// Σⱼ ||(ZR)ⱼ||₂.
double sequential_penalty(const Eigen::MatrixXd& Z);

double osc_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, const OscConfig& cfg);

/// ADMM with split variables J = Z (elementwise shrink) and S = ZR (column
/// group shrink). The Z step is a Sylvester equation solved exactly through
/// the thin SVD of X and tridiagonal solves against RRᵀ. Returns the sparse
/// iterate J with the lowest objective.
OscSolution osc_solve(const Eigen::MatrixXd& X, const OscConfig& cfg = {});

}  // namespace handsteer
