#include <Eigen/Dense>

#include "handsteer/osc.hpp"
#include "support.hpp"

using namespace handsteer;

namespace {

// Columns 0..n/2-1 from one random 2-d subspace, the rest from another.
Eigen::MatrixXd two_subspaces(std::mt19937_64& rng, int m, int n, double noise) {
  const Eigen::MatrixXd U1 = test::gaussian(m, 2, rng);
  const Eigen::MatrixXd U2 = test::gaussian(m, 2, rng);
  Eigen::MatrixXd X(m, n);
  for (int j = 0; j < n; ++j) {
    const double s = 0.2 * j;
    const Eigen::Vector2d c(std::cos(s), std::sin(s));
    X.col(j) = (j < n / 2 ? U1 : U2) * c + noise * test::gaussian(m, rng);
  }
  return X;
}

double naive_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, double l1, double l2) {
  const Eigen::MatrixXd E = X - X * Z;
  double f = 0.5 * E.squaredNorm() + l1 * Z.cwiseAbs().sum();
  for (Eigen::Index j = 0; j + 1 < Z.cols(); ++j) f += l2 * (Z.col(j + 1) - Z.col(j)).norm();
  return f;
}

}  // namespace

TEST_CASE("R is the lower bidiagonal difference operator") {
  const auto R = build_R(4);
  Eigen::MatrixXd expect(4, 3);
  expect << -1, 0, 0, 1, -1, 0, 0, 1, -1, 0, 0, 1;
  CHECK(R == expect);
  CHECK_ERROR_CODE(build_R(1), ErrorCode::TooSmall);
}

TEST_CASE("consecutive differences equal Z R") {
  std::mt19937_64 rng(201);
  const Eigen::MatrixXd Z = test::gaussian(7, 7, rng);
  CHECK((consecutive_differences(Z) - Z * build_R(7)).cwiseAbs().maxCoeff() <= 1e-14);
  double pen = 0.0;
  for (int j = 0; j < 6; ++j) pen += (Z.col(j + 1) - Z.col(j)).norm();
  CHECK(sequential_penalty(Z) == doctest::Approx(pen).epsilon(1e-13));
}

TEST_CASE("objective matches a direct evaluation") {
  std::mt19937_64 rng(203);
  const Eigen::MatrixXd X = test::gaussian(5, 9, rng);
  const Eigen::MatrixXd Z = test::gaussian(9, 9, rng);
  OscConfig cfg;
  cfg.lambda1 = 0.3;
  cfg.lambda2 = 0.7;
  CHECK(osc_objective(X, Z, cfg) == doctest::Approx(naive_objective(X, Z, 0.3, 0.7)).epsilon(1e-12));
}

TEST_CASE("osc keeps the best iterate") {
  std::mt19937_64 rng(207);
  const Eigen::MatrixXd X = two_subspaces(rng, 12, 40, 0.01);
  OscConfig cfg;
  cfg.max_iter = 150;
  const auto sol = osc_solve(X, cfg);
  REQUIRE(sol.objective_history.size() >= 2);
  CHECK(sol.objective_history.front() == doctest::Approx(0.5 * X.squaredNorm()));
  for (std::size_t i = 1; i < sol.objective_history.size(); ++i)
    CHECK(sol.objective_history[i] <= sol.objective_history[i - 1]);
  const double f = naive_objective(X, sol.Z, cfg.lambda1, cfg.lambda2);
  CHECK(f == doctest::Approx(sol.objective_history.back()).epsilon(1e-9));
  CHECK(f < 0.5 * X.squaredNorm());
  for (double raw : sol.raw_objective_history) CHECK(raw >= sol.objective_history.back() - 1e-9);
  CHECK((sol.E - (X - X * sol.Z)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(sol.Z.rows() == 40);
  CHECK(sol.Z.cols() == 40);
  CHECK(sol.primal_history.size() == static_cast<std::size_t>(sol.iterations));
}

TEST_CASE("osc affinity is stronger within a subspace") {
  std::mt19937_64 rng(211);
  const Eigen::MatrixXd X = two_subspaces(rng, 12, 40, 0.0);
  const auto sol = osc_solve(X);
  const Eigen::MatrixXd W = sol.Z.cwiseAbs() + sol.Z.transpose().cwiseAbs();
  double within = 0.0, across = 0.0;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) ((i < 20) == (j < 20) ? within : across) += W(i, j);
  CHECK(within > 5.0 * across);
}

TEST_CASE("zero-diagonal baseline") {
  std::mt19937_64 rng(213);
  const Eigen::MatrixXd X = two_subspaces(rng, 8, 20, 0.01);
  OscConfig cfg;
  cfg.lambda2 = 0.0;
  cfg.zero_diagonal = true;
  cfg.max_iter = 100;
  const auto sol = osc_solve(X, cfg);
  CHECK(sol.Z.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("osc input errors") {
  CHECK_ERROR_CODE(osc_solve(Eigen::MatrixXd::Ones(3, 1)), ErrorCode::TooSmall);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(3, 4);
  bad(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_ERROR_CODE(osc_solve(bad), ErrorCode::NonFiniteInput);
  OscConfig cfg;
  cfg.lambda1 = -1.0;
  CHECK_ERROR_CODE(cfg.validate(), ErrorCode::InvalidArgument);
  cfg = {};
  cfg.rho = 0.0;
  CHECK_ERROR_CODE(cfg.validate(), ErrorCode::InvalidArgument);
}
