#include "handsteer/osc.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iostream>

#include "handsteer/error.hpp"

namespace handsteer {

void OscConfig::validate() const {
  if (!(lambda1 > 0.0) || !(lambda2 >= 0.0) || !(rho > 0.0) || !(tol > 0.0) || max_iter < 1)
    throw Error(ErrorCode::InvalidArgument,
                "OSC weights must be positive (lambda2 may be 0 for the SSC baseline)");
}

Eigen::MatrixXd build_R(Eigen::Index n) {
  if (n < 2) throw Error(ErrorCode::TooSmall, "R needs n >= 2");
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    R(i, i) = -1.0;
    R(i + 1, i) = 1.0;
  }
  return R;
}

Eigen::MatrixXd consecutive_differences(const Eigen::MatrixXd& Z) {
  const Eigen::Index n = Z.cols();
  if (n < 2) return Eigen::MatrixXd(Z.rows(), 0);
  return Z.rightCols(n - 1) - Z.leftCols(n - 1);
}

double sequential_penalty(const Eigen::MatrixXd& Z) {
  return consecutive_differences(Z).colwise().norm().sum();
}

double osc_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, const OscConfig& cfg) {
  return 0.5 * (X - X * Z).squaredNorm() + cfg.lambda1 * Z.cwiseAbs().sum() +
         cfg.lambda2 * sequential_penalty(Z);
}

namespace {

double path_degree(Eigen::Index j, Eigen::Index n) { return (j == 0 || j == n - 1) ? 1.0 : 2.0; }

// Solves Y·(diag(a_k) + b·RRᵀ) = B row by row, in place; row k uses a[k].
// RRᵀ is the path-graph Laplacian, so each row is a tridiagonal SPD system.
void solve_rows_tridiagonal(Eigen::MatrixXd& B, const Eigen::ArrayXd& a, double b) {
  const Eigen::Index n = B.cols();
  const double off = -b;
  Eigen::ArrayXXd cprime(B.rows(), n);
  Eigen::ArrayXd denom = a + b * path_degree(0, n);
  cprime.col(0) = off / denom;
  B.col(0).array() /= denom;
  for (Eigen::Index j = 1; j < n; ++j) {
    denom = a + b * path_degree(j, n) - off * cprime.col(j - 1);
    cprime.col(j) = off / denom;
    B.col(j).array() = (B.col(j).array() - off * B.col(j - 1).array()) / denom;
  }
  for (Eigen::Index j = n - 2; j >= 0; --j)
    B.col(j).array() -= cprime.col(j) * B.col(j + 1).array();
}

// Same with one shared diagonal shift a for every row.
void solve_rows_tridiagonal(Eigen::MatrixXd& B, double a, double b) {
  const Eigen::Index n = B.cols();
  const double off = -b;
  Eigen::VectorXd cprime(n);
  double denom = a + b * path_degree(0, n);
  cprime[0] = off / denom;
  B.col(0) /= denom;
  for (Eigen::Index j = 1; j < n; ++j) {
    denom = a + b * path_degree(j, n) - off * cprime[j - 1];
    cprime[j] = off / denom;
    B.col(j) = (B.col(j) - off * B.col(j - 1)) / denom;
  }
  for (Eigen::Index j = n - 2; j >= 0; --j) B.col(j) -= cprime[j] * B.col(j + 1);
}

double soft(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

}  // namespace

OscSolution osc_solve(const Eigen::MatrixXd& X, const OscConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = X.cols();
  if (n < 2) throw Error(ErrorCode::TooSmall, "OSC needs at least two columns");
  if (!X.allFinite()) throw Error(ErrorCode::NonFiniteInput, "data matrix not finite");
  for (Eigen::Index j = 0; j < n; ++j)
    if (std::abs(X.col(j).norm() - 1.0) > 1e-6) {
      std::cerr << "warning: osc_solve input columns are not unit norm\n";
      break;
    }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinV);
  const Eigen::MatrixXd& Vs = svd.matrixV();                            // n x r
  const Eigen::ArrayXd sigma2 = svd.singularValues().array().square();  // r
  const Eigen::MatrixXd Sigma2Vt = sigma2.matrix().asDiagonal() * Vs.transpose();
  const Eigen::Index r = Vs.cols();

  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd J = Z, U1 = Z, B(n, n), dJ(n, n);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n - 1);
  Eigen::MatrixXd U2 = S, dS(n, n - 1);
  Eigen::MatrixXd T(r, n), Z1(r, n), XJ(X.rows(), n);
  Eigen::VectorXd zr(n);
  double rho = cfg.rho;

  // Z = 0 (E = X) is feasible and seeds the incumbent.
  OscSolution sol;
  double best_objective = 0.5 * X.squaredNorm();
  Eigen::MatrixXd best = J;
  sol.objective_history.push_back(best_objective);
  sol.raw_objective_history.push_back(best_objective);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    // Z step: (XᵀX + ρI)Z + ρ Z RRᵀ = XᵀX + ρB with B = J - U1 + (S - U2)Rᵀ,
    // split along range(Vs) and its orthogonal complement.
    for (Eigen::Index i = 0; i < n; ++i) {
      B.col(i) = J.col(i) - U1.col(i);
      if (i + 1 < n) B.col(i) -= S.col(i) - U2.col(i);
      if (i > 0) B.col(i) += S.col(i - 1) - U2.col(i - 1);
    }
    T.noalias() = Vs.transpose() * B;
    Z1 = Sigma2Vt + rho * T;
    solve_rows_tridiagonal(Z1, rho + sigma2, rho);
    solve_rows_tridiagonal(T, 1.0, 1.0);
    solve_rows_tridiagonal(B, 1.0, 1.0);
    Z = B;
    Z1 -= T;
    Z.noalias() += Vs * Z1;

    // J and S steps with their dual updates, accumulating residual norms.
    const double t1 = cfg.lambda1 / rho;
    double pri2 = 0.0, z2 = 0.0, j2 = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double z = Z(i, c);
        const double v = z + U1(i, c);
        const double jn = (cfg.zero_diagonal && i == c) ? 0.0 : soft(v, t1);
        dJ(i, c) = jn - J(i, c);
        J(i, c) = jn;
        U1(i, c) = v - jn;
        pri2 += (z - jn) * (z - jn);
        z2 += z * z;
        j2 += jn * jn;
      }
    }
    const double t2 = cfg.lambda2 / rho;
    for (Eigen::Index c = 0; c + 1 < n; ++c) {
      zr = Z.col(c + 1) - Z.col(c);
      const double vnorm = (zr + U2.col(c)).norm();
      const double scale = vnorm > 0.0 ? std::max(0.0, 1.0 - t2 / vnorm) : 0.0;
      auto s_col = S.col(c);
      auto u_col = U2.col(c);
      double z_sq = 0.0, s_sq = 0.0, p_sq = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double v = zr[i] + u_col[i];
        const double sn = scale * v;
        dS(i, c) = sn - s_col[i];
        s_col[i] = sn;
        u_col[i] = v - sn;
        p_sq += (zr[i] - sn) * (zr[i] - sn);
        z_sq += zr[i] * zr[i];
        s_sq += sn * sn;
      }
      pri2 += p_sq;
      z2 += z_sq;
      j2 += s_sq;
    }
    double dual2 = 0.0, scale2 = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index i = 0; i < n; ++i) {
        double d = dJ(i, c), u = U1(i, c);
        if (c + 1 < n) {
          d -= dS(i, c);
          u -= U2(i, c);
        }
        if (c > 0) {
          d += dS(i, c - 1);
          u += U2(i, c - 1);
        }
        dual2 += d * d;
        scale2 += u * u;
      }
    }

    const double pri = std::sqrt(pri2);
    const double dual = rho * std::sqrt(dual2);
    const double r_rel = pri / std::max(std::sqrt(std::max(z2, j2)), 1e-12);
    const double s_rel = dual / std::max(rho * std::sqrt(scale2), 1e-12);
    sol.primal_history.push_back(r_rel);
    sol.dual_history.push_back(s_rel);
    XJ.noalias() = X * J;
    const double objective = 0.5 * (X - XJ).squaredNorm() + cfg.lambda1 * J.cwiseAbs().sum() +
                             cfg.lambda2 * sequential_penalty(J);
    sol.raw_objective_history.push_back(objective);
    if (objective < best_objective) {
      best_objective = objective;
      best = J;
      sol.best_iteration = it;
    }
    sol.objective_history.push_back(best_objective);
    sol.iterations = it;

    if (std::max(r_rel, s_rel) < cfg.tol) {
      sol.converged = true;
      break;
    }
    if (cfg.adapt_rho) {
      if (r_rel > 10.0 * s_rel && rho < 1e4) {
        rho *= 2.0;
        U1 /= 2.0;
        U2 /= 2.0;
      } else if (s_rel > 10.0 * r_rel && rho > 1e-4) {
        rho /= 2.0;
        U1 *= 2.0;
        U2 *= 2.0;
      }
    }
  }

  sol.Z = std::move(best);
  sol.E = X - X * sol.Z;
  return sol;
}

}  // namespace handsteer
