#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace handsteer {

/// Symmetric, nonnegative, zero-diagonal similarity matrix.
struct Affinity {
  Eigen::MatrixXd W;
};

struct ClusterAssignment {
  std::vector<int> labels;  ///< values in [0, k), canonicalized by first occurrence
  int k = 0;
  std::vector<std::string> warnings;

  std::vector<std::size_t> sizes() const;
};

/// W = |Z| + |Zᵀ| with the diagonal zeroed.
Affinity build_affinity(const Eigen::MatrixXd& Z);

struct KMeansOptions {
  int restarts = 20;
  int max_iter = 300;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;  ///< k x d
  double inertia = 0.0;
};

/// k-means++ seeding with `restarts` seeded restarts; lowest inertia wins.
/// Rows of `points` are observations. Clusters are never left empty.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, const KMeansOptions& opts = {});

/// Normalized-cuts spectral clustering: rows of the k leading eigenvectors of
/// D^{-1/2} W D^{-1/2} (the smallest of the normalized Laplacian), renormalized,
/// then k-means. Isolated nodes take the cluster of the nearest connected index.
ClusterAssignment ncut(const Affinity& affinity, int k, const KMeansOptions& opts = {});

/// Relabels so that cluster ids appear in order of first occurrence.
std::vector<int> canonicalize_labels(const std::vector<int>& labels);

/// Mean silhouette coefficient of the columns of X under `labels` (Euclidean).
double silhouette(const Eigen::MatrixXd& X, const std::vector<int>& labels);

}  // namespace handsteer
