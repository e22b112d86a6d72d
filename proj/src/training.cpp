#include "handsteer/training.hpp"

#include <algorithm>
#include <random>

#include "handsteer/error.hpp"

namespace handsteer {

std::vector<std::size_t> label_boundaries(const std::vector<int>& labels) {
  std::vector<std::size_t> b;
  for (std::size_t j = 1; j < labels.size(); ++j)
    if (labels[j] != labels[j - 1]) b.push_back(j);
  return b;
}

TrainingClustering cluster_training_signal(const Eigen::MatrixXd& X, int k,
                                           const ClusteringOptions& opts) {
  if (X.cols() < 2) throw Error(ErrorCode::TooSmall, "need at least two windows to cluster");
  Eigen::MatrixXd data = X;
  if (opts.normalize_columns) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      const double norm = data.col(j).norm();
      if (norm < 1e-12) throw Error(ErrorCode::ZeroColumn, "window " + std::to_string(j) + " is zero");
      data.col(j) /= norm;
    }
  }
  const auto osc = osc_solve(data, opts.osc);

  TrainingClustering out;
  out.assignment = ncut(build_affinity(osc.Z), k, opts.kmeans);
  out.boundaries = label_boundaries(out.assignment.labels);
  out.silhouette = silhouette(data, out.assignment.labels);
  out.low_silhouette = out.silhouette < opts.low_silhouette;
  out.osc_iterations = osc.iterations;
  out.osc_converged = osc.converged;
  out.final_objective = osc.objective_history.back();
  return out;
}

std::vector<std::vector<Eigen::Index>> select_representatives(const ClusterAssignment& assignment,
                                                              std::size_t per_cluster,
                                                              std::uint64_t seed) {
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(assignment.k));
  for (std::size_t j = 0; j < assignment.labels.size(); ++j)
    members[static_cast<std::size_t>(assignment.labels[j])].push_back(static_cast<Eigen::Index>(j));

  std::mt19937_64 rng(seed);
  std::vector<std::vector<Eigen::Index>> picked(members.size());
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].size() < per_cluster)
      throw Error(ErrorCode::ClusterTooSmall, "cluster " + std::to_string(c) + " has " +
                                                  std::to_string(members[c].size()) +
                                                  " columns, need " + std::to_string(per_cluster));
    std::sample(members[c].begin(), members[c].end(), std::back_inserter(picked[c]), per_cluster, rng);
  }
  return picked;
}

}  // namespace handsteer
