#include "vemcdr/linalg.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace vem {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_offsets,
                           std::vector<int> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (static_cast<int>(row_offsets_.size()) != rows_ + 1 ||
      col_indices_.size() != values_.size())
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<std::tuple<int, int, double>> entries) {
  for (const auto& [r, c, v] : entries)
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw std::out_of_range("from_triplets: index (" + std::to_string(r) + "," +
                              std::to_string(c) + ") out of range");
  // Duplicates are summed in bit-pattern order so the result does not depend
  // on the input permutation.
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::bit_cast<std::uint64_t>(std::get<2>(a)) <
           std::bit_cast<std::uint64_t>(std::get<2>(b));
  });

  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_offsets_.assign(rows + 1, 0);
  m.col_indices_.reserve(entries.size());
  m.values_.reserve(entries.size());
  std::size_t i = 0;
  for (int r = 0; r < rows; ++r) {
    while (i < entries.size() && std::get<0>(entries[i]) == r) {
      const int c = std::get<1>(entries[i]);
      double acc = 0.0;
      while (i < entries.size() && std::get<0>(entries[i]) == r &&
             std::get<1>(entries[i]) == c) {
        acc += std::get<2>(entries[i]);
        ++i;
      }
      m.col_indices_.push_back(c);
      m.values_.push_back(acc);
    }
    m.row_offsets_[r + 1] = static_cast<int>(m.values_.size());
  }
  return m;
}

Eigen::VectorXd SparseMatrix::multiply(const Eigen::VectorXd& x) const {
  if (x.size() != cols_) throw std::invalid_argument("multiply: size mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows_);
  for (int r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      acc += values_[k] * x(col_indices_[k]);
    y(r) = acc;
  }
  return y;
}

namespace {

using EigenSparse = Eigen::SparseMatrix<double>;

EigenSparse to_eigen(const SparseMatrix& a) {
  EigenSparse m(a.rows(), a.cols());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(a.nnz());
  for (int r = 0; r < a.rows(); ++r)
    for (int k = a.row_offsets()[r]; k < a.row_offsets()[r + 1]; ++k)
      trips.emplace_back(r, a.col_indices()[k], a.values()[k]);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

void check_residual(const SparseMatrix& a, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& b) {
  const double bnorm = b.norm();
  const double rnorm = (a.multiply(x) - b).norm();
  if (!(rnorm <= 1e-10 * std::max(bnorm, 1e-300)))
    throw std::runtime_error("solve: residual " + std::to_string(rnorm / bnorm) +
                             " exceeds 1e-10");
}

}  // namespace

struct LuFactorization::Impl {
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
};

LuFactorization::LuFactorization(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("LuFactorization: matrix not square");
  const EigenSparse m = to_eigen(a);
  impl_->lu.analyzePattern(m);
  impl_->lu.factorize(m);
  if (impl_->lu.info() != Eigen::Success)
    throw std::runtime_error("LuFactorization: matrix is singular");
}

LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

Eigen::VectorXd LuFactorization::solve(const Eigen::VectorXd& b) const {
  return impl_->lu.solve(b);
}

Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols()) throw std::invalid_argument("solve: matrix not square");
  if (b.size() != a.rows()) throw std::invalid_argument("solve: rhs size mismatch");
  const LuFactorization lu(a);
  Eigen::VectorXd x = lu.solve(b);
  // One refinement pass; then enforce the contract.
  x += lu.solve(b - a.multiply(x));
  check_residual(a, x, b);
  return x;
}

Eigen::VectorXd DriftSolver::solve(const SparseMatrix& a, const Eigen::VectorXd& b) {
  const double bnorm = std::max(b.norm(), 1e-300);
  if (cached_) {
    Eigen::VectorXd x = cached_->solve(b);
    Eigen::VectorXd r = b - a.multiply(x);
    double rel = r.norm() / bnorm;
    for (int pass = 0; pass < 6 && rel > 1e-11; ++pass) {
      const double prev = rel;
      x += cached_->solve(r);
      r = b - a.multiply(x);
      rel = r.norm() / bnorm;
      if (rel > 0.5 * prev) break;  // stalled, matrix drifted too far
    }
    if (rel <= 1e-11) return x;
  }
  cached_ = std::make_unique<LuFactorization>(a);
  ++n_factorizations_;
  Eigen::VectorXd x = cached_->solve(b);
  x += cached_->solve(b - a.multiply(x));
  check_residual(a, x, b);
  return x;
}

}  // namespace vem
