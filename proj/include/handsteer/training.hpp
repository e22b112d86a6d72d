#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "handsteer/osc.hpp"
#include "handsteer/spectral.hpp"

namespace handsteer {

struct ClusteringOptions {
  OscConfig osc;
  KMeansOptions kmeans;
  bool normalize_columns = true;
  double low_silhouette = 0.2;  ///< below this the split is flagged as unstructured
};

struct TrainingClustering {
  ClusterAssignment assignment;
  /// Column indices j where labels[j] != labels[j-1].
  std::vector<std::size_t> boundaries;
  double silhouette = 0.0;
  bool low_silhouette = false;
  int osc_iterations = 0;
  bool osc_converged = false;
  double final_objective = 0.0;
};

/// OSC -> |Z|+|Zᵀ| -> Ncut over the windows (columns) of one recording.
TrainingClustering cluster_training_signal(const Eigen::MatrixXd& X, int k = 2,
                                           const ClusteringOptions& opts = {});

std::vector<std::size_t> label_boundaries(const std::vector<int>& labels);

/// Uniform sample without replacement of `per_cluster` column indices from
/// every cluster; indices come back in increasing order.
std::vector<std::vector<Eigen::Index>> select_representatives(const ClusterAssignment& assignment,
                                                              std::size_t per_cluster,
                                                              std::uint64_t seed);

}  // namespace handsteer
