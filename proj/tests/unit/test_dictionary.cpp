#include <Eigen/Dense>

#include "handsteer/dictionary.hpp"
#include "support.hpp"

using namespace handsteer;

TEST_CASE("orthonormal columns are stored as given") {
  const std::vector<Eigen::VectorXd> cols = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
  const auto d = build_dictionary(cols, {"a", "b"}, 0.0, false);
  CHECK(d.atoms() == Eigen::Matrix2d::Identity());
  REQUIRE(d.class_count() == 2);
  CHECK(d.blocks()[0] == ClassBlock{"a", 0, 1});
  CHECK(d.blocks()[1] == ClassBlock{"b", 1, 2});
  CHECK(d.class_index("b") == 1);
  CHECK(d.class_index("c") == -1);
}

TEST_CASE("3-4-5 column") {
  const auto d = build_dictionary(std::vector<Eigen::VectorXd>{Eigen::Vector2d(3, 4)}, {"a"}, 0.0, false);
  CHECK(d.atoms()(0, 0) == doctest::Approx(0.6));
  CHECK(d.atoms()(1, 0) == doctest::Approx(0.8));
  CHECK(d.column_norms()[0] == 5.0);
}

TEST_CASE("random columns normalize like a naive loop and group stably") {
  std::mt19937_64 rng(21);
  const Eigen::MatrixXd S = test::gaussian(7, 20, rng);
  std::vector<std::string> labels;
  for (int j = 0; j < 20; ++j) labels.push_back(j % 3 == 0 ? "x" : "y");
  const auto d = build_dictionary(S, labels, 0.1, false);
  CHECK(d.blocks()[0].label == "x");
  CHECK(d.blocks()[0].size() == 7);
  CHECK(d.blocks()[1].size() == 13);
  // Stable grouping: x columns in original order, then y columns.
  std::vector<int> order;
  for (int j = 0; j < 20; ++j)
    if (j % 3 == 0) order.push_back(j);
  for (int j = 0; j < 20; ++j)
    if (j % 3 != 0) order.push_back(j);
  for (int k = 0; k < 20; ++k) {
    const int j = order[k];
    double ss = 0.0;
    for (int i = 0; i < 7; ++i) ss += S(i, j) * S(i, j);
    const double norm = std::sqrt(ss);
    CHECK(std::abs(d.atoms().col(k).norm() - 1.0) <= 1e-10);
    CHECK(d.column_norms()[k] == doctest::Approx(norm).epsilon(1e-14));
    for (int i = 0; i < 7; ++i) CHECK(d.atoms()(i, k) == doctest::Approx(S(i, j) / norm).epsilon(1e-14));
    CHECK(d.column_label(k) == labels[j]);
  }
}

TEST_CASE("explicit class order") {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd S = test::gaussian(3, 4, rng);
  const auto d = build_dictionary(S, {"a", "b", "a", "b"}, 0.0, false, {"b", "a"});
  CHECK(d.blocks()[0].label == "b");
  CHECK(d.blocks()[1].label == "a");
  CHECK_ERROR_CODE(build_dictionary(S, {"a", "b", "a", "b"}, 0.0, false, {"b", "a", "c"}),
                   ErrorCode::EmptyClass);
}

TEST_CASE("centering subtracts the row mean before normalizing") {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd S = test::gaussian(5, 6, rng);
  const auto d = build_dictionary(S, {"a", "a", "a", "b", "b", "b"}, 0.0, true);
  REQUIRE(d.centered());
  const Eigen::VectorXd mean = S.rowwise().mean();
  CHECK((*d.center() - mean).norm() <= 1e-14);
  for (int j = 0; j < 6; ++j)
    CHECK((d.atoms().col(j) - (S.col(j) - mean).normalized()).norm() <= 1e-12);
}

TEST_CASE("dictionary errors") {
  const std::vector<Eigen::VectorXd> ragged = {Eigen::Vector2d(1, 0), Eigen::Vector3d(0, 1, 0)};
  CHECK_ERROR_CODE(build_dictionary(ragged, {"a", "b"}, 0.0, false), ErrorCode::RaggedColumns);
  const std::vector<Eigen::VectorXd> zero = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 0)};
  CHECK_ERROR_CODE(build_dictionary(zero, {"a", "b"}, 0.0, false), ErrorCode::ZeroColumn);
  const std::vector<Eigen::VectorXd> ok = {Eigen::Vector2d(1, 0)};
  CHECK_ERROR_CODE(build_dictionary(ok, {"a", "b"}, 0.0, false), ErrorCode::DimensionMismatch);
  CHECK_ERROR_CODE(build_dictionary(ok, {"a"}, -1.0, false), ErrorCode::InvalidArgument);
}

TEST_CASE("projector examples") {
  const std::vector<Eigen::VectorXd> eye = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
  auto p = precompute_projection(build_dictionary(eye, {"a", "b"}, 0.0, false));
  CHECK(p.P.isApprox(Eigen::Matrix2d::Identity(), 1e-15));
  p = precompute_projection(build_dictionary(eye, {"a", "b"}, 1.0, false));
  CHECK(p.P.isApprox(0.5 * Eigen::Matrix2d::Identity(), 1e-15));

  Eigen::Matrix2d A;
  A << 1, 0, 0, 2;
  // Oracle on the normal equations (AᵀA + I) P = Aᵀ, solved densely.
  const Eigen::Matrix2d oracle = (A.transpose() * A + Eigen::Matrix2d::Identity()).fullPivLu().solve(A.transpose());
  CHECK(oracle(0, 0) == doctest::Approx(0.5));
  CHECK(oracle(1, 1) == doctest::Approx(0.4));
}

TEST_CASE("projector satisfies the normal equations") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd S = test::gaussian(12, 9, rng);
    std::vector<std::string> labels(9, "a");
    const double lambda = 0.05 * (trial + 1);
    const auto d = build_dictionary(S, labels, lambda, false);
    const auto p = precompute_projection(d);
    const Eigen::MatrixXd& A = d.atoms();
    const Eigen::VectorXd y = test::gaussian(12, rng);
    const Eigen::VectorXd x = p.P * y;
    const Eigen::VectorXd lhs = (A.transpose() * A + lambda * Eigen::MatrixXd::Identity(9, 9)) * x;
    const Eigen::VectorXd rhs = A.transpose() * y;
    CHECK((lhs - rhs).norm() <= 1e-8 * rhs.norm());
  }
}

TEST_CASE("P A = I for full column rank at lambda 0") {
  std::mt19937_64 rng(17);
  const auto d = build_dictionary(test::gaussian(10, 6, rng), std::vector<std::string>(6, "a"), 0.0, false);
  const auto p = precompute_projection(d);
  CHECK((p.P * d.atoms() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("rank-deficient dictionary without ridge is singular") {
  const std::vector<Eigen::VectorXd> cols = {Eigen::Vector2d(1, 0), Eigen::Vector2d(2, 0)};
  const auto d = build_dictionary(cols, {"a", "b"}, 0.0, false);
  CHECK_ERROR_CODE(precompute_projection(d), ErrorCode::SingularGram);
  const auto ridged = build_dictionary(cols, {"a", "b"}, 0.1, false);
  CHECK_NOTHROW(precompute_projection(ridged));
}

TEST_CASE("ridge shrinks coefficients on orthonormal dictionaries") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(test::gaussian(8, 5, rng))
                                  .householderQ() * Eigen::MatrixXd::Identity(8, 5);
    const Eigen::VectorXd y = test::gaussian(8, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {0.0, 0.01, 0.3, 1.0, 5.0}) {
      const auto d = build_dictionary(Q, std::vector<std::string>(5, "a"), lambda, false);
      const double n = (precompute_projection(d).P * y).norm();
      CHECK(n <= prev + 1e-12);
      prev = n;
    }
  }
}

TEST_CASE("apply_center") {
  std::mt19937_64 rng(23);
  const Eigen::MatrixXd S = test::gaussian(4, 6, rng);
  const std::vector<std::string> labels(6, "a");
  const auto plain = build_dictionary(S, labels, 0.0, false);
  const Eigen::VectorXd y = test::gaussian(4, rng);
  CHECK(apply_center(plain, y) == y);
  const auto centered = build_dictionary(S, labels, 0.0, true);
  const Eigen::VectorXd c = *centered.center();
  CHECK(apply_center(centered, c).isZero(0.0));
  const Eigen::VectorXd yc = apply_center(centered, y);
  for (int i = 0; i < 4; ++i) CHECK(yc[i] == y[i] - c[i]);
  CHECK_ERROR_CODE(apply_center(centered, Eigen::VectorXd::Zero(3)), ErrorCode::DimensionMismatch);
}

TEST_CASE("projector_row reproduces the stored projector") {
  std::mt19937_64 rng(29);
  const auto d = build_dictionary(test::gaussian(9, 7, rng), std::vector<std::string>(7, "a"), 0.2, false);
  const auto p = precompute_projection(d);
  for (Eigen::Index r = 0; r < 7; ++r) CHECK((projector_row(d, r) - p.P.row(r)).norm() <= 1e-12);
}

TEST_CASE("Gram spectral norm matches the largest eigenvalue") {
  std::mt19937_64 rng(31);
  const Eigen::MatrixXd A = test::gaussian(10, 6, rng);
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A.transpose() * A).eigenvalues().maxCoeff();
  const double est = gram_spectral_norm(A, 1000, 1e-12);
  CHECK(est >= top * (1 - 1e-6));
  CHECK(est <= top * 1.01);
}
