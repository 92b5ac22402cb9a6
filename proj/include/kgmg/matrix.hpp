// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace kgmg {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Multiply-add bookkeeping for one solve. A matvec counts 2 per stored entry.
struct FlopLedger {
  std::uint64_t multiply_adds = 0;
  void add(std::uint64_t n) noexcept { multiply_adds += n; }
};

/// Compressed-row matrix with strictly increasing columns inside each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::uint32_t> columns, std::vector<double> values);

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  std::span<const std::uint32_t> columns() const noexcept { return columns_; }
  std::span<const double> values() const noexcept { return values_; }

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;
  /// Value at (i, j), zero when not stored.
  double coeff(std::size_t i, std::size_t j) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> columns_;
  std::vector<double> values_;
};

/// y = M x; adds 2 nnz to the ledger.
Eigen::VectorXd sparse_matvec(const SparseMatrix& M, const Eigen::VectorXd& x,
                              FlopLedger* ledger = nullptr);

/// Operator storage used by the multigrid cycle: dense row-major or CSR.
/// Both reduce each row with the same four-way accumulation over the stored
/// entries, so a CSR matrix holding every entry reproduces the dense product
/// bit for bit.
class LevelMatrix {
 public:
  LevelMatrix() = default;
  explicit LevelMatrix(std::shared_ptr<const DenseMatrix> dense);
  explicit LevelMatrix(DenseMatrix dense);
  explicit LevelMatrix(SparseMatrix sparse);

  bool empty() const noexcept { return rows() == 0 && cols() == 0; }
  bool is_sparse() const noexcept { return std::holds_alternative<SparseMatrix>(storage_); }
  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;
  std::size_t nnz() const noexcept;

  const DenseMatrix& dense() const;    // throws unless dense
  const SparseMatrix& sparse() const;  // throws unless sparse
  DenseMatrix to_dense() const;
  Eigen::VectorXd diagonal() const;

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y, FlopLedger* ledger = nullptr) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const;
  /// Block version used to build iteration matrices column by column at once.
  Eigen::MatrixXd apply_block(const Eigen::MatrixXd& X) const;

 private:
  std::variant<std::shared_ptr<const DenseMatrix>, SparseMatrix> storage_ =
      std::shared_ptr<const DenseMatrix>{};
};

void write_dense_binary(const std::filesystem::path& path, const DenseMatrix& M);
DenseMatrix read_dense_binary(const std::filesystem::path& path);
void write_dense_csv(const std::filesystem::path& path, const DenseMatrix& M);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& M);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace kgmg
