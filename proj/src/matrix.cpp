#include "botdetect/matrix.hpp"

namespace botdetect {

Eigen::Index FeatureMatrix::rows() const {
  return std::visit([](const auto& m) { return m.rows(); }, storage_);
}

Eigen::Index FeatureMatrix::cols() const {
  return std::visit([](const auto& m) { return m.cols(); }, storage_);
}

void FeatureMatrix::column(Eigen::Index j, Eigen::VectorXd& out) const {
  if (const auto* dense = std::get_if<Eigen::MatrixXd>(&storage_)) {
    out = dense->col(j);
    return;
  }
  const auto& sparse = std::get<Eigen::SparseMatrix<double>>(storage_);
  out.setZero(sparse.rows());
  for (Eigen::SparseMatrix<double>::InnerIterator it(sparse, j); it; ++it) {
    out[it.row()] = it.value();
  }
}

double FeatureMatrix::coeff(Eigen::Index i, Eigen::Index j) const {
  return std::visit([&](const auto& m) { return m.coeff(i, j); }, storage_);
}

Eigen::VectorXd FeatureMatrix::row(Eigen::Index i) const {
  if (const auto* dense = std::get_if<Eigen::MatrixXd>(&storage_)) {
    return dense->row(i);
  }
  const auto& sparse = std::get<Eigen::SparseMatrix<double>>(storage_);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sparse.cols());
  for (Eigen::Index j = 0; j < sparse.cols(); ++j) {
    out[j] = sparse.coeff(i, j);
  }
  return out;
}

FeatureMatrix make_sparse_matrix(
    const std::vector<Eigen::SparseVector<double>>& rows, Eigen::Index cols) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += static_cast<std::size_t>(r.nonZeros());
  triplets.reserve(nnz);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::SparseVector<double>::InnerIterator it(rows[i]); it; ++it) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(it.index()),
                            it.value());
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(rows.size()), cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return FeatureMatrix(std::move(m));
}

}  // namespace botdetect
