#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace vem {

// Compressed sparse row matrix. Construction from triplets sums duplicates
// and is bit-for-bit independent of the input order.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_offsets,
               std::vector<int> col_indices, std::vector<double> values);

  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<std::tuple<int, int, double>> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

// Direct sparse LU with partial pivoting. Throws on singular systems and
// whenever the relative residual ||Ax-b||/||b|| exceeds 1e-10.
Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b);

// Reusable LU factorization of one matrix.
class LuFactorization {
 public:
  explicit LuFactorization(const SparseMatrix& a);
  ~LuFactorization();
  LuFactorization(LuFactorization&&) noexcept;
  LuFactorization& operator=(LuFactorization&&) noexcept;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Solves successions of systems that share a sparsity pattern and drift
// slowly in value: reuses the last factorization through iterative
// refinement and refactorizes when refinement stalls. Every answer meets the
// direct-solve residual contract.
class DriftSolver {
 public:
  Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b);
  int factorization_count() const { return n_factorizations_; }

 private:
  std::unique_ptr<LuFactorization> cached_;
  int n_factorizations_ = 0;
};

}  // namespace vem
