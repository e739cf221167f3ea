#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <variant>
#include <vector>

namespace botdetect {

/// Column-accessible training matrix (rows = samples). Dense for the small
/// numeric field groups, compressed-column sparse for TF-IDF text features.
/// Split scans gather one column at a time, so per-scan memory stays
/// O(nnz + n) regardless of width.
class FeatureMatrix {
public:
  FeatureMatrix() : storage_(Eigen::MatrixXd()) {}
  explicit FeatureMatrix(Eigen::MatrixXd dense) : storage_(std::move(dense)) {}
  explicit FeatureMatrix(Eigen::SparseMatrix<double> sparse)
      : storage_(std::move(sparse)) {
    auto& s = std::get<Eigen::SparseMatrix<double>>(storage_);
    s.makeCompressed();
  }

  Eigen::Index rows() const;
  Eigen::Index cols() const;

  /// Writes column j into `out` (resized to rows()).
  void column(Eigen::Index j, Eigen::VectorXd& out) const;

  double coeff(Eigen::Index i, Eigen::Index j) const;

  /// Dense copy of row i (used by small-scale tests and oracles).
  Eigen::VectorXd row(Eigen::Index i) const;

  bool is_sparse() const {
    return std::holds_alternative<Eigen::SparseMatrix<double>>(storage_);
  }

private:
  std::variant<Eigen::MatrixXd, Eigen::SparseMatrix<double>> storage_;
};

/// Stacks per-row sparse vectors (plus an optional dense tail per row)
/// into one CSC matrix.
FeatureMatrix make_sparse_matrix(
    const std::vector<Eigen::SparseVector<double>>& rows, Eigen::Index cols);

}  // namespace botdetect
