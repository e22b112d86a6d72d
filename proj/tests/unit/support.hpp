#pragma once

#include <Eigen/Core>

#include <random>

#include "doctest.h"
#include "handsteer/error.hpp"

namespace test {

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = n(rng);
  return M;
}

inline Eigen::VectorXd gaussian(Eigen::Index n, std::mt19937_64& rng) {
  return gaussian(n, 1, rng).col(0);
}

}  // namespace test

#define CHECK_ERROR_CODE(expr, ecode)                       \
  do {                                                      \
    bool thrown_ = false;                                   \
    try {                                                   \
      (void)(expr);                                         \
    } catch (const handsteer::Error& e) {                   \
      thrown_ = true;                                       \
      CHECK_MESSAGE(e.code() == (ecode), e.what());         \
    }                                                       \
    CHECK_MESSAGE(thrown_, "expected " #ecode);             \
  } while (0)
