#include "handsteer/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "handsteer/error.hpp"

namespace handsteer {

std::vector<std::size_t> ClusterAssignment::sizes() const {
  std::vector<std::size_t> s(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (int l : labels) ++s[static_cast<std::size_t>(l)];
  return s;
}

Affinity build_affinity(const Eigen::MatrixXd& Z) {
  if (Z.rows() != Z.cols()) throw Error(ErrorCode::DimensionMismatch, "affinity needs a square Z");
  Affinity a;
  a.W = Z.cwiseAbs() + Z.transpose().cwiseAbs();
  a.W.diagonal().setZero();
  return a;
}

std::vector<int> canonicalize_labels(const std::vector<int>& labels) {
  std::unordered_map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = remap.emplace(l, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

namespace {

struct LloydResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double inertia = 0.0;
};

LloydResult lloyd(const Eigen::MatrixXd& P, Eigen::MatrixXd centroids, int max_iter) {
  const Eigen::Index n = P.rows();
  const int k = static_cast<int>(centroids.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  Eigen::VectorXd best_d(n);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (P.row(i) - centroids.row(c)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      best_d[i] = bd;
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    // Refill empty clusters with the point farthest from its centroid.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double fd = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] <= 1) continue;
        if (best_d[i] > fd) {
          fd = best_d[i];
          far = i;
        }
      }
      if (far < 0) break;
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      best_d[far] = 0.0;
      changed = true;
    }
    centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centroids.row(labels[static_cast<std::size_t>(i)]) += P.row(i);
    for (int c = 0; c < k; ++c) centroids.row(c) /= std::max(counts[static_cast<std::size_t>(c)], 1);
    if (!changed) break;
  }
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    inertia += (P.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return {std::move(labels), std::move(centroids), inertia};
}

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& P, int k, std::mt19937_64& rng) {
  const Eigen::Index n = P.rows();
  Eigen::MatrixXd c(k, P.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  c.row(0) = P.row(first(rng));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (P.row(i) - c.row(0)).squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (pick = 0; pick + 1 < n; ++pick) {
        target -= d2[pick];
        if (target <= 0.0) break;
      }
    } else {
      pick = first(rng);
    }
    c.row(j) = P.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], (P.row(i) - c.row(j)).squaredNorm());
  }
  return c;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, const KMeansOptions& opts) {
  const Eigen::Index n = points.rows();
  if (k < 1 || k > n)
    throw Error(ErrorCode::InvalidArgument, "k must be in [1, number of points]");
  std::mt19937_64 rng(opts.seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(opts.restarts, 1); ++r) {
    auto res = lloyd(points, plus_plus_seeds(points, k, rng), opts.max_iter);
    if (res.inertia < best.inertia) {
      best.labels = std::move(res.labels);
      best.centroids = std::move(res.centroids);
      best.inertia = res.inertia;
    }
  }
  return best;
}

ClusterAssignment ncut(const Affinity& affinity, int k, const KMeansOptions& opts) {
  const Eigen::MatrixXd& W = affinity.W;
  const Eigen::Index n = W.rows();
  if (W.cols() != n) throw Error(ErrorCode::DimensionMismatch, "affinity must be square");
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "k must be in [1, n]");

  ClusterAssignment out;
  out.k = k;
  if (k == 1) {
    out.labels.assign(static_cast<std::size_t>(n), 0);
    return out;
  }

  const Eigen::VectorXd degree = W.rowwise().sum();
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> isolated;
  for (Eigen::Index i = 0; i < n; ++i) (degree[i] < 1e-12 ? isolated : kept).push_back(i);
  if (!isolated.empty())
    out.warnings.push_back("IsolatedNode: " + std::to_string(isolated.size()) +
                           " node(s) with zero degree assigned to the nearest connected index");
  const auto m = static_cast<Eigen::Index>(kept.size());
  if (m < k) throw Error(ErrorCode::InvalidArgument, "fewer connected nodes than clusters");

  Eigen::VectorXd inv_sqrt(m);
  for (Eigen::Index a = 0; a < m; ++a) inv_sqrt[a] = 1.0 / std::sqrt(degree[kept[a]]);
  Eigen::MatrixXd M(m, m);
  for (Eigen::Index b = 0; b < m; ++b)
    for (Eigen::Index a = 0; a < m; ++a) M(a, b) = inv_sqrt[a] * W(kept[a], kept[b]) * inv_sqrt[b];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::NonConvergence, "eigensolver failed");
  // Largest eigenvalues of M are the smallest of I - M.
  Eigen::MatrixXd embed = eig.eigenvectors().rightCols(k);
  for (Eigen::Index a = 0; a < m; ++a) {
    const double norm = embed.row(a).norm();
    if (norm > 0.0) embed.row(a) /= norm;
  }
  const auto km = kmeans(embed, k, opts);

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (Eigen::Index a = 0; a < m; ++a) labels[static_cast<std::size_t>(kept[a])] = km.labels[static_cast<std::size_t>(a)];
  for (Eigen::Index i : isolated) {
    Eigen::Index nearest = kept.front();
    for (Eigen::Index j : kept)
      if (std::abs(j - i) < std::abs(nearest - i)) nearest = j;
    labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(nearest)];
  }
  out.labels = canonicalize_labels(labels);
  return out;
}

double silhouette(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
  const Eigen::Index n = X.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "one label per column required");
  const int k = n ? *std::max_element(labels.begin(), labels.end()) + 1 : 0;
  if (k < 2) return 0.0;
  const Eigen::VectorXd sq = X.colwise().squaredNorm().transpose();
  Eigen::MatrixXd D = (-2.0 * X.transpose() * X).colwise() + sq;
  D.rowwise() += sq.transpose();
  D = D.cwiseMax(0.0).cwiseSqrt();
  D.diagonal().setZero();

  std::vector<double> count(static_cast<std::size_t>(k), 0.0);
  for (int l : labels) count[static_cast<std::size_t>(l)] += 1.0;
  double total = 0.0;
  std::vector<double> sum(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) sum[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] += D(i, j);
    const int own = labels[static_cast<std::size_t>(i)];
    if (count[static_cast<std::size_t>(own)] <= 1.0) continue;  // singleton scores 0
    const double a = sum[static_cast<std::size_t>(own)] / (count[static_cast<std::size_t>(own)] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c)
      if (c != own && count[static_cast<std::size_t>(c)] > 0.0)
        b = std::min(b, sum[static_cast<std::size_t>(c)] / count[static_cast<std::size_t>(c)]);
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

}  // namespace handsteer
