#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "handsteer/dictionary.hpp"

namespace handsteer {

enum class SolverKind { Ridge, L1 };

struct Coefficients {
  Eigen::VectorXd x_hat;
  SolverKind solver = SolverKind::Ridge;
  int iterations = 0;
  /// False when the l1 solver hit max_iter before its KKT violation fell to tol.
  bool converged = true;
  std::vector<double> objective_history;  ///< l1 only
};

struct ClassResiduals {
  std::vector<double> residuals;  ///< one per class block
  int best = 0;
  double margin = 0.0;  ///< second-best minus best; 0 with a single class
};

struct RecognitionResult {
  int label = 0;  ///< class (block) index
  ClassResiduals residuals;
  Coefficients coefficients;
};

struct ResidualOptions {
  /// Divide r_i by ||δᵢ(x̂)||₂ (a CRC variant). Off by default.
  bool coefficient_weighted = false;
};

struct L1Options {
  int max_iter = 500;
  double tol = 1e-5;  ///< on the max KKT violation
};

/// x̂ = P·y. `y` is taken as already centered.
Coefficients crc_code(const Eigen::VectorXd& y, const Dictionary& dict, const Projector& proj);

/// r_i = ||y - A δᵢ(x̂)||₂; ties go to the lowest class index.
ClassResiduals class_residuals(const Eigen::VectorXd& y, const Dictionary& dict,
                               const Coefficients& x, ResidualOptions opts = {});

/// Centers y, codes it through the projector, labels by minimum residual.
RecognitionResult crc_classify(const Eigen::VectorXd& y, const Dictionary& dict,
                               const Projector& proj, ResidualOptions opts = {});

/// Minimizes ½||y - Ax||₂² + λ||x||₁ by monotone accelerated proximal
/// gradient with step 1/L.
Coefficients l1_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lambda,
                      L1Options opts = {}, std::optional<double> lipschitz = std::nullopt);
Coefficients l1_solve(const Eigen::VectorXd& y, const Dictionary& dict, double lambda,
                      L1Options opts = {});

/// max KKT violation of x for the l1 problem.
double l1_kkt_violation(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& x, double lambda);

/// 0.1 * ||Aᵀy||∞ on the centered observation.
double default_l1_lambda(const Eigen::VectorXd& centered_y, const Dictionary& dict);

RecognitionResult src_classify(const Eigen::VectorXd& y, const Dictionary& dict,
                               std::optional<double> lambda_l1 = std::nullopt,
                               L1Options opts = {}, ResidualOptions ropts = {});

}  // namespace handsteer
