#include "handsteer/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "handsteer/error.hpp"

namespace handsteer {

namespace {

void require_length(const Eigen::VectorXd& v, Eigen::Index n, const char* what) {
  if (v.size() != n)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has length " +
                                                  std::to_string(v.size()) + ", expected " +
                                                  std::to_string(n));
}

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double l1_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& x,
                    double lambda) {
  return 0.5 * (y - A * x).squaredNorm() + lambda * x.lpNorm<1>();
}

}  // namespace

Coefficients crc_code(const Eigen::VectorXd& y, const Dictionary& dict, const Projector& proj) {
  require_length(y, dict.rows(), "observation");
  if (proj.P.rows() != dict.cols() || proj.P.cols() != dict.rows())
    throw Error(ErrorCode::DimensionMismatch, "projector does not match dictionary");
  Coefficients c;
  c.x_hat = proj.P * y;
  c.solver = SolverKind::Ridge;
  return c;
}

ClassResiduals class_residuals(const Eigen::VectorXd& y, const Dictionary& dict,
                               const Coefficients& x, ResidualOptions opts) {
  require_length(y, dict.rows(), "observation");
  require_length(x.x_hat, dict.cols(), "coefficients");
  const auto& A = dict.atoms();
  ClassResiduals out;
  out.residuals.reserve(dict.class_count());
  const Eigen::Index m = A.rows();
  Eigen::VectorXd rec(m);
  for (const auto& b : dict.blocks()) {
    // Plain loops with a fixed summation order, so results are reproducible
    // bit for bit by a straightforward reconstruction.
    rec.setZero();
    for (Eigen::Index j = b.begin; j < b.end; ++j) {
      const double xj = x.x_hat[j];
      const double* a = A.col(j).data();
      for (Eigen::Index k = 0; k < m; ++k) rec[k] += a[k] * xj;
    }
    double ss = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double d = y[k] - rec[k];
      ss += d * d;
    }
    double r = std::sqrt(ss);
    const auto xi = x.x_hat.segment(b.begin, b.size());
    if (opts.coefficient_weighted) {
      const double w = xi.norm();
      r = w > 0.0 ? r / w : std::numeric_limits<double>::infinity();
    }
    out.residuals.push_back(r);
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(out.residuals.size()); ++i)
    if (out.residuals[i] < out.residuals[best]) best = i;
  out.best = best;
  double second = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(out.residuals.size()); ++i)
    if (i != best) second = std::min(second, out.residuals[i]);
  out.margin = std::isfinite(second) ? second - out.residuals[best] : 0.0;
  return out;
}

RecognitionResult crc_classify(const Eigen::VectorXd& y, const Dictionary& dict,
                               const Projector& proj, ResidualOptions opts) {
  const Eigen::VectorXd yc = apply_center(dict, y);
  RecognitionResult r;
  r.coefficients = crc_code(yc, dict, proj);
  r.residuals = class_residuals(yc, dict, r.coefficients, opts);
  r.label = r.residuals.best;
  return r;
}

double l1_kkt_violation(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& x, double lambda) {
  const Eigen::VectorXd g = A.transpose() * (y - A * x);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x[i] != 0.0 ? std::abs(g[i] - lambda * (x[i] > 0 ? 1.0 : -1.0))
                                 : std::max(0.0, std::abs(g[i]) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

Coefficients l1_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lambda,
                      L1Options opts, std::optional<double> lipschitz) {
  require_length(y, A.rows(), "observation");
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "l1 weight must be positive");
  if (opts.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
  const double L = lipschitz ? *lipschitz : gram_spectral_norm(A);

  Coefficients c;
  c.solver = SolverKind::L1;
  c.x_hat = Eigen::VectorXd::Zero(A.cols());
  if (L <= 0.0) return c;

  const Eigen::VectorXd Aty = A.transpose() * y;
  Eigen::VectorXd x = c.x_hat;
  Eigen::VectorXd z = x;
  Eigen::VectorXd u(A.cols());
  double fx = l1_objective(A, y, x, lambda);
  c.objective_history.push_back(fx);
  double t = 1.0;
  const double step = 1.0 / L;
  bool done = false;
  int it = 0;
  while (it < opts.max_iter && !done) {
    ++it;
    const Eigen::VectorXd grad = A.transpose() * (A * z) - Aty;
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = soft(z[i] - step * grad[i], step * lambda);
    const double fu = l1_objective(A, y, u, lambda);
    const bool accept = fu <= fx;
    const Eigen::VectorXd x_prev = x;
    if (accept) {
      x = u;
      fx = fu;
      done = l1_kkt_violation(A, y, x, lambda) <= opts.tol;
    }
    c.objective_history.push_back(fx);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x + (t / t_next) * (u - x) + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
  }
  c.x_hat = x;
  c.iterations = it;
  c.converged = done;
  return c;
}

Coefficients l1_solve(const Eigen::VectorXd& y, const Dictionary& dict, double lambda,
                      L1Options opts) {
  return l1_solve(dict.atoms(), y, lambda, opts, dict.lipschitz());
}

double default_l1_lambda(const Eigen::VectorXd& centered_y, const Dictionary& dict) {
  return 0.1 * (dict.atoms().transpose() * centered_y).lpNorm<Eigen::Infinity>();
}

RecognitionResult src_classify(const Eigen::VectorXd& y, const Dictionary& dict,
                               std::optional<double> lambda_l1, L1Options opts,
                               ResidualOptions ropts) {
  const Eigen::VectorXd yc = apply_center(dict, y);
  const double lambda = lambda_l1 ? *lambda_l1 : default_l1_lambda(yc, dict);
  RecognitionResult r;
  if (lambda_l1 || lambda > 0.0) {
    r.coefficients = l1_solve(yc, dict, lambda, opts);
  } else {
    // Only reachable with the data-scaled default on y = 0: the minimizer is 0.
    r.coefficients.solver = SolverKind::L1;
    r.coefficients.x_hat = Eigen::VectorXd::Zero(dict.cols());
  }
  r.residuals = class_residuals(yc, dict, r.coefficients, ropts);
  r.label = r.residuals.best;
  return r;
}

}  // namespace handsteer
