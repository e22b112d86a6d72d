#include <set>

#include "handsteer/signal.hpp"
#include "handsteer/synth.hpp"
#include "handsteer/training.hpp"
#include "support.hpp"

using namespace handsteer;

TEST_CASE("label boundaries") {
  CHECK(label_boundaries({0, 0, 1, 1, 0}) == std::vector<std::size_t>{2, 4});
  CHECK(label_boundaries({}).empty());
  CHECK(label_boundaries({1}).empty());
}

TEST_CASE("representatives are distinct, sorted, in-cluster and reproducible") {
  ClusterAssignment a;
  a.k = 2;
  for (int j = 0; j < 300; ++j) a.labels.push_back(j < 130 ? 0 : 1);
  const auto reps = select_representatives(a, 100, 9);
  REQUIRE(reps.size() == 2);
  for (int c = 0; c < 2; ++c) {
    CHECK(reps[c].size() == 100);
    CHECK(std::is_sorted(reps[c].begin(), reps[c].end()));
    CHECK(std::set<Eigen::Index>(reps[c].begin(), reps[c].end()).size() == 100);
    for (auto j : reps[c]) CHECK(a.labels[j] == c);
  }
  CHECK(select_representatives(a, 100, 9) == reps);
  CHECK_ERROR_CODE(select_representatives(a, 131, 9), ErrorCode::ClusterTooSmall);
}

TEST_CASE("a short go-side-go recording splits near the transitions") {
  // 8 s, noise 0.01: small enough to cluster quickly.
  Scenario sc;
  sc.segments = {{PostureLabel::GoStraight, 2.0}, {PostureLabel::Stop, 3.5}, {PostureLabel::GoStraight, 2.0}};
  sc.noise = 0.01;
  sc.seed = 5;
  const auto s = synth_generate(sc);
  const auto X = window_matrix(s.frames, kDefaultWindow);
  ClusteringOptions opts;
  opts.osc.max_iter = 100;
  const auto tc = cluster_training_signal(X, 2, opts);
  CHECK(tc.assignment.k == 2);
  CHECK(tc.assignment.labels.size() == static_cast<std::size_t>(X.cols()));
  CHECK(tc.assignment.labels.front() == 0);
  REQUIRE(tc.boundaries.size() == 2);
  // Window j ends at frame j + W, so its centre sits about W/2 frames earlier.
  const auto pieces = scenario_pieces(sc);
  const double mid1 = 0.5 * (pieces[1].begin + pieces[1].end) - kDefaultWindow / 2.0;
  const double mid2 = 0.5 * (pieces[3].begin + pieces[3].end) - kDefaultWindow / 2.0;
  CHECK(std::abs(static_cast<double>(tc.boundaries[0]) - mid1) <= kDefaultWindow);
  CHECK(std::abs(static_cast<double>(tc.boundaries[1]) - mid2) <= kDefaultWindow);
  CHECK(tc.silhouette > 0.5);
  CHECK_FALSE(tc.low_silhouette);
}

TEST_CASE("clustering input errors") {
  CHECK_ERROR_CODE(cluster_training_signal(Eigen::MatrixXd::Ones(4, 1)), ErrorCode::TooSmall);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 5);
  X.col(2).setZero();
  CHECK_ERROR_CODE(cluster_training_signal(X), ErrorCode::ZeroColumn);
}
