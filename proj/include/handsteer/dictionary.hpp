#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace handsteer {

/// Contiguous column range [begin, end) holding one class.
struct ClassBlock {
  std::string label;
  Eigen::Index begin = 0;
  Eigen::Index end = 0;

  Eigen::Index size() const { return end - begin; }
  friend bool operator==(const ClassBlock&, const ClassBlock&) = default;
};

/// Labeled training matrix. Columns are unit-norm training samples grouped
/// into class blocks. Immutable once built.
class Dictionary {
 public:
  /// Empty placeholder; every accessor reports zero size.
  Dictionary() = default;

  /// Assembles a dictionary from already-processed parts (used when loading a
  /// model). Validates the invariants.
  static Dictionary from_parts(Eigen::MatrixXd atoms, std::vector<ClassBlock> blocks,
                               Eigen::VectorXd column_norms,
                               std::optional<Eigen::VectorXd> center, double lambda);

  const Eigen::MatrixXd& atoms() const { return atoms_; }
  const std::vector<ClassBlock>& blocks() const { return blocks_; }
  const Eigen::VectorXd& column_norms() const { return column_norms_; }
  const std::optional<Eigen::VectorXd>& center() const { return center_; }
  double lambda() const { return lambda_; }
  bool centered() const { return center_.has_value(); }

  Eigen::Index rows() const { return atoms_.rows(); }
  Eigen::Index cols() const { return atoms_.cols(); }
  std::size_t class_count() const { return blocks_.size(); }
  /// Index of the block holding `label`, or -1.
  int class_index(const std::string& label) const;
  std::string column_label(Eigen::Index col) const;

  /// Largest eigenvalue of AᵀA (step-size bound for the l1 solver).
  double lipschitz() const { return lipschitz_; }

 private:
  friend Dictionary build_dictionary(const Eigen::MatrixXd&, const std::vector<std::string>&,
                                     double, bool, const std::vector<std::string>&);

  Eigen::MatrixXd atoms_;
  std::vector<ClassBlock> blocks_;
  Eigen::VectorXd column_norms_;
  std::optional<Eigen::VectorXd> center_;
  double lambda_ = 0.0;
  double lipschitz_ = 0.0;
};

/// Ridge operator (AᵀA + λI)⁻¹Aᵀ, n x m.
struct Projector {
  Eigen::MatrixXd P;
  double lambda = 0.0;

  Eigen::Index rows() const { return P.cols(); }  ///< m
  Eigen::Index cols() const { return P.rows(); }  ///< n
};

/// Largest eigenvalue of AᵀA by power iteration from the all-ones vector.
double gram_spectral_norm(const Eigen::MatrixXd& A, int max_iter = 100, double tol = 1e-6);

/// Ridge weight used when none is given. Columns are unit norm, so this is
/// on the same scale for every dictionary.
inline constexpr double kDefaultRidgeLambda = 0.1;

/// Columns of `samples` are training vectors; `labels` has one entry per
/// column. Columns are optionally centered by the per-row mean, then scaled to
/// unit norm and regrouped into class blocks. Block order follows
/// `class_order` when given, otherwise first appearance.
Dictionary build_dictionary(const Eigen::MatrixXd& samples, const std::vector<std::string>& labels,
                            double lambda, bool center,
                            const std::vector<std::string>& class_order = {});
Dictionary build_dictionary(const std::vector<Eigen::VectorXd>& columns,
                            const std::vector<std::string>& labels, double lambda, bool center,
                            const std::vector<std::string>& class_order = {});

Projector precompute_projection(const Dictionary& dict);

/// y minus the dictionary center; y unchanged when centering is off.
Eigen::VectorXd apply_center(const Dictionary& dict, const Eigen::VectorXd& y);

/// Recomputes row `row` of the projector from the atoms.
Eigen::RowVectorXd projector_row(const Dictionary& dict, Eigen::Index row);

// Persistence: a directory holding manifest.json and little-endian float64
// column-major matrices (A.mat, P.mat, norms.mat, center.mat).
void save_dictionary(const std::filesystem::path& dir, const Dictionary& dict,
                     const Projector& proj);
std::pair<Dictionary, Projector> load_dictionary(const std::filesystem::path& dir);

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path, Eigen::Index rows,
                            Eigen::Index cols);

}  // namespace handsteer
