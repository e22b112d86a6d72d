#include "handsteer/dictionary.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "handsteer/error.hpp"

namespace handsteer {

namespace {

constexpr double kZeroColumn = 1e-12;
constexpr double kMinGramEigenvalue = 1e-12;

void validate_blocks(const std::vector<ClassBlock>& blocks, Eigen::Index n) {
  Eigen::Index next = 0;
  for (const auto& b : blocks) {
    if (b.begin != next || b.end <= b.begin)
      throw Error(ErrorCode::BadFormat, "class blocks must partition the columns");
    next = b.end;
  }
  if (next != n) throw Error(ErrorCode::BadFormat, "class blocks do not cover all columns");
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      if (blocks[i].label == blocks[j].label)
        throw Error(ErrorCode::BadFormat, "label " + blocks[i].label + " has two blocks");
}

}  // namespace

double gram_spectral_norm(const Eigen::MatrixXd& A, int max_iter, double tol) {
  if (A.cols() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols()).normalized();
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = A.transpose() * (A * v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(next - estimate) <= tol * std::max(1.0, std::abs(next))) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  // Rayleigh quotient converges from below; the final norm is an upper bound
  // for the power-iteration estimate and keeps 1/L a safe step.
  const Eigen::VectorXd w = A.transpose() * (A * v);
  return std::max(estimate, w.norm());
}

Dictionary Dictionary::from_parts(Eigen::MatrixXd atoms, std::vector<ClassBlock> blocks,
                                  Eigen::VectorXd column_norms,
                                  std::optional<Eigen::VectorXd> center, double lambda) {
  if (atoms.rows() < 1 || atoms.cols() < 1)
    throw Error(ErrorCode::BadFormat, "dictionary must be at least 1x1");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::BadFormat, "lambda must be nonnegative");
  if (column_norms.size() != atoms.cols())
    throw Error(ErrorCode::BadFormat, "column norm count mismatch");
  if (center && center->size() != atoms.rows())
    throw Error(ErrorCode::BadFormat, "center length mismatch");
  validate_blocks(blocks, atoms.cols());
  for (Eigen::Index j = 0; j < atoms.cols(); ++j)
    if (std::abs(atoms.col(j).norm() - 1.0) > 1e-10)
      throw Error(ErrorCode::BadFormat, "dictionary column " + std::to_string(j) + " not unit norm");

  Dictionary d;
  d.atoms_ = std::move(atoms);
  d.blocks_ = std::move(blocks);
  d.column_norms_ = std::move(column_norms);
  d.center_ = std::move(center);
  d.lambda_ = lambda;
  d.lipschitz_ = gram_spectral_norm(d.atoms_);
  return d;
}

int Dictionary::class_index(const std::string& label) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].label == label) return static_cast<int>(i);
  return -1;
}

std::string Dictionary::column_label(Eigen::Index col) const {
  for (const auto& b : blocks_)
    if (col >= b.begin && col < b.end) return b.label;
  throw Error(ErrorCode::DimensionMismatch, "column out of range");
}

Dictionary build_dictionary(const Eigen::MatrixXd& samples, const std::vector<std::string>& labels,
                            double lambda, bool center,
                            const std::vector<std::string>& class_order) {
  const Eigen::Index m = samples.rows();
  const Eigen::Index n = samples.cols();
  if (m < 1 || n < 1) throw Error(ErrorCode::EmptyClass, "dictionary needs at least one column");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "one label per column required");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw Error(ErrorCode::InvalidArgument, "lambda must be nonnegative");
  if (!samples.allFinite()) throw Error(ErrorCode::NonFiniteInput, "training column not finite");

  // Stable grouping: block order by class_order or first appearance, columns
  // within a block keep their input order.
  std::vector<std::string> order = class_order;
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < order.size(); ++i) slot.emplace(order[i], i);
  for (const auto& l : labels) {
    if (slot.count(l)) continue;
    if (!class_order.empty())
      throw Error(ErrorCode::InvalidArgument, "label " + l + " not among declared classes");
    slot.emplace(l, order.size());
    order.push_back(l);
  }
  std::vector<std::vector<Eigen::Index>> members(order.size());
  for (Eigen::Index j = 0; j < n; ++j) members[slot.at(labels[static_cast<std::size_t>(j)])].push_back(j);
  for (std::size_t c = 0; c < order.size(); ++c)
    if (members[c].empty()) throw Error(ErrorCode::EmptyClass, "class " + order[c] + " has no columns");

  Eigen::MatrixXd work = samples;
  std::optional<Eigen::VectorXd> mean;
  if (center) {
    mean = samples.rowwise().mean();
    work.colwise() -= *mean;
  }

  Dictionary d;
  d.atoms_.resize(m, n);
  d.column_norms_.resize(n);
  Eigen::Index next = 0;
  for (std::size_t c = 0; c < order.size(); ++c) {
    ClassBlock block{order[c], next, next};
    for (Eigen::Index j : members[c]) {
      const double norm = work.col(j).norm();
      if (norm < kZeroColumn)
        throw Error(ErrorCode::ZeroColumn, "training column " + std::to_string(j) + " has zero norm");
      d.atoms_.col(next) = work.col(j) / norm;
      d.column_norms_[next] = norm;
      ++next;
    }
    block.end = next;
    d.blocks_.push_back(block);
  }
  d.center_ = std::move(mean);
  d.lambda_ = lambda;
  d.lipschitz_ = gram_spectral_norm(d.atoms_);
  return d;
}

Dictionary build_dictionary(const std::vector<Eigen::VectorXd>& columns,
                            const std::vector<std::string>& labels, double lambda, bool center,
                            const std::vector<std::string>& class_order) {
  if (columns.empty()) throw Error(ErrorCode::EmptyClass, "dictionary needs at least one column");
  const Eigen::Index m = columns.front().size();
  Eigen::MatrixXd samples(m, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != m)
      throw Error(ErrorCode::RaggedColumns, "column " + std::to_string(j) + " has length " +
                                                std::to_string(columns[j].size()) + ", expected " +
                                                std::to_string(m));
    samples.col(static_cast<Eigen::Index>(j)) = columns[j];
  }
  return build_dictionary(samples, labels, lambda, center, class_order);
}

namespace {

Eigen::MatrixXd regularized_gram(const Dictionary& dict) {
  const auto& A = dict.atoms();
  Eigen::MatrixXd G(A.cols(), A.cols());
  G.setZero();
  G.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
  G = G.selfadjointView<Eigen::Lower>();
  G.diagonal().array() += dict.lambda();
  return G;
}

}  // namespace

Projector precompute_projection(const Dictionary& dict) {
  const Eigen::MatrixXd G = regularized_gram(dict);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= kMinGramEigenvalue)
    throw Error(ErrorCode::SingularGram,
                "AᵀA + λI is not positive definite (λ=" + std::to_string(dict.lambda()) + ")");
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::SingularGram, "Cholesky factorization failed");
  return Projector{llt.solve(dict.atoms().transpose()), dict.lambda()};
}

Eigen::RowVectorXd projector_row(const Dictionary& dict, Eigen::Index row) {
  if (row < 0 || row >= dict.cols()) throw Error(ErrorCode::DimensionMismatch, "row out of range");
  Eigen::LLT<Eigen::MatrixXd> llt(regularized_gram(dict));
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularGram, "Cholesky factorization failed");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dict.cols());
  e[row] = 1.0;
  const Eigen::VectorXd q = llt.solve(e);
  return (dict.atoms() * q).transpose();
}

Eigen::VectorXd apply_center(const Dictionary& dict, const Eigen::VectorXd& y) {
  if (y.size() != dict.rows())
    throw Error(ErrorCode::DimensionMismatch, "observation length " + std::to_string(y.size()) +
                                                  " != dictionary rows " + std::to_string(dict.rows()));
  if (!dict.center()) return y;
  return y - *dict.center();
}

}  // namespace handsteer
