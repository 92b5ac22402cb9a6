// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/matrix.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "kgmg/errors.hpp"

namespace kgmg {

namespace {

struct Contiguous {
  std::uint32_t operator[](std::size_t k) const noexcept { return static_cast<std::uint32_t>(k); }
};

// Shared by the dense and CSR paths; the accumulation order depends only on
// the position k within the stored row. This file is built without FP
// contraction so both instantiations round identically.
template <class Columns>
double row_dot(const double* values, Columns columns, std::size_t n, const double* x) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += values[k] * x[columns[k]];
    s1 += values[k + 1] * x[columns[k + 1]];
    s2 += values[k + 2] * x[columns[k + 2]];
    s3 += values[k + 3] * x[columns[k + 3]];
  }
  if (k < n) s0 += values[k] * x[columns[k]];
  if (k + 1 < n) s1 += values[k + 1] * x[columns[k + 1]];
  if (k + 2 < n) s2 += values[k + 2] * x[columns[k + 2]];
  return (s0 + s1) + (s2 + s3);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                           std::vector<std::uint32_t> columns, std::vector<double> values)
    : rows_(rows), cols_(cols), offsets_(std::move(row_offsets)), columns_(std::move(columns)),
      values_(std::move(values)) {
  require(offsets_.size() == rows_ + 1 && offsets_.front() == 0 && offsets_.back() == values_.size() &&
              columns_.size() == values_.size(),
          ErrorCode::InvalidArgument, "sparse matrix: inconsistent compressed-row arrays");
  for (std::size_t i = 0; i < rows_; ++i) {
    require(offsets_[i] <= offsets_[i + 1], ErrorCode::InvalidArgument,
            "sparse matrix: row offsets must be nondecreasing");
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      require(columns_[k] < cols_, ErrorCode::InvalidArgument, "sparse matrix: column out of range");
      require(k == offsets_[i] || columns_[k - 1] < columns_[k], ErrorCode::InvalidArgument,
              "sparse matrix: columns must be strictly increasing within a row");
    }
  }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> off(n + 1);
  std::vector<std::uint32_t> col(n);
  for (std::size_t i = 0; i <= n; ++i) off[i] = i;
  for (std::size_t i = 0; i < n; ++i) col[i] = static_cast<std::uint32_t>(i);
  return SparseMatrix(n, n, std::move(off), std::move(col), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> off(cols_ + 1, 0);
  for (std::uint32_t c : columns_) ++off[c + 1];
  for (std::size_t j = 0; j < cols_; ++j) off[j + 1] += off[j];
  std::vector<std::size_t> fill(off.begin(), off.end() - 1);
  std::vector<std::uint32_t> col(values_.size());
  std::vector<double> val(values_.size());
  // Rows are visited in order, so transposed columns come out sorted.
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const std::size_t dst = fill[columns_[k]]++;
      col[dst] = static_cast<std::uint32_t>(i);
      val[dst] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(off), std::move(col), std::move(val));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix D = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      D(static_cast<Eigen::Index>(i), columns_[k]) = values_[k];
    }
  }
  return D;
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
  require(i < rows_ && j < cols_, ErrorCode::InvalidArgument, "sparse matrix: index out of range");
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - columns_.begin())];
}

Eigen::VectorXd sparse_matvec(const SparseMatrix& M, const Eigen::VectorXd& x, FlopLedger* ledger) {
  require(static_cast<std::size_t>(x.size()) == M.cols(), ErrorCode::InvalidArgument,
          "sparse_matvec: dimension mismatch");
  Eigen::VectorXd y(static_cast<Eigen::Index>(M.rows()));
  const auto off = M.row_offsets();
  const double* vals = M.values().data();
  const std::uint32_t* cols = M.columns().data();
  for (std::size_t i = 0; i < M.rows(); ++i) {
    y[static_cast<Eigen::Index>(i)] =
        row_dot(vals + off[i], cols + off[i], off[i + 1] - off[i], x.data());
  }
  if (ledger) ledger->add(2 * M.nnz());
  return y;
}

LevelMatrix::LevelMatrix(std::shared_ptr<const DenseMatrix> dense) : storage_(std::move(dense)) {
  require(std::get<0>(storage_) != nullptr, ErrorCode::InvalidArgument, "level matrix: null storage");
}

LevelMatrix::LevelMatrix(DenseMatrix dense)
    : storage_(std::make_shared<const DenseMatrix>(std::move(dense))) {}

LevelMatrix::LevelMatrix(SparseMatrix sparse) : storage_(std::move(sparse)) {}

std::size_t LevelMatrix::rows() const noexcept {
  if (is_sparse()) return std::get<1>(storage_).rows();
  const auto& d = std::get<0>(storage_);
  return d ? static_cast<std::size_t>(d->rows()) : 0;
}

std::size_t LevelMatrix::cols() const noexcept {
  if (is_sparse()) return std::get<1>(storage_).cols();
  const auto& d = std::get<0>(storage_);
  return d ? static_cast<std::size_t>(d->cols()) : 0;
}

std::size_t LevelMatrix::nnz() const noexcept {
  if (is_sparse()) return std::get<1>(storage_).nnz();
  return rows() * cols();
}

const DenseMatrix& LevelMatrix::dense() const {
  require(!is_sparse() && std::get<0>(storage_), ErrorCode::Internal, "level matrix is not dense");
  return *std::get<0>(storage_);
}

const SparseMatrix& LevelMatrix::sparse() const {
  require(is_sparse(), ErrorCode::Internal, "level matrix is not sparse");
  return std::get<1>(storage_);
}

DenseMatrix LevelMatrix::to_dense() const {
  if (is_sparse()) return std::get<1>(storage_).to_dense();
  return dense();
}

Eigen::VectorXd LevelMatrix::diagonal() const {
  const std::size_t n = std::min(rows(), cols());
  Eigen::VectorXd d(static_cast<Eigen::Index>(n));
  if (is_sparse()) {
    for (std::size_t i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = sparse().coeff(i, i);
  } else {
    d = dense().diagonal().head(static_cast<Eigen::Index>(n));
  }
  return d;
}

void LevelMatrix::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y, FlopLedger* ledger) const {
  require(static_cast<std::size_t>(x.size()) == cols(), ErrorCode::InvalidArgument,
          "level matrix: dimension mismatch");
  if (is_sparse()) {
    y = sparse_matvec(sparse(), x, ledger);
    return;
  }
  const DenseMatrix& D = dense();
  const std::size_t n = cols();
  y.resize(D.rows());
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    y[i] = row_dot(D.data() + static_cast<std::size_t>(i) * n, Contiguous{}, n, x.data());
  }
  if (ledger) ledger->add(2 * rows() * cols());
}

Eigen::VectorXd LevelMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y;
  apply(x, y);
  return y;
}

Eigen::VectorXd LevelMatrix::apply_transpose(const Eigen::VectorXd& x) const {
  require(static_cast<std::size_t>(x.size()) == rows(), ErrorCode::InvalidArgument,
          "level matrix: dimension mismatch");
  if (!is_sparse()) return dense().transpose() * x;
  const SparseMatrix& S = sparse();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S.cols()));
  const auto off = S.row_offsets();
  for (std::size_t i = 0; i < S.rows(); ++i) {
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      y[S.columns()[k]] += S.values()[k] * x[static_cast<Eigen::Index>(i)];
    }
  }
  return y;
}

Eigen::MatrixXd LevelMatrix::apply_block(const Eigen::MatrixXd& X) const {
  require(static_cast<std::size_t>(X.rows()) == cols(), ErrorCode::InvalidArgument,
          "level matrix: dimension mismatch");
  if (!is_sparse()) return dense() * X;
  const SparseMatrix& S = sparse();
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(S.rows()), X.cols());
  const auto off = S.row_offsets();
  for (std::size_t i = 0; i < S.rows(); ++i) {
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      Y.row(static_cast<Eigen::Index>(i)) += S.values()[k] * X.row(S.columns()[k]);
    }
  }
  return Y;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    require(static_cast<bool>(out), ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorCode::Io, "cannot rename " + tmp.string() + " to " + path.string());
}

void write_dense_binary(const std::filesystem::path& path, const DenseMatrix& M) {
  std::string buf;
  buf.reserve(12 + static_cast<std::size_t>(M.size()) * 8);
  buf.append("DMAT", 4);
  put_u32(buf, static_cast<std::uint32_t>(M.rows()));
  put_u32(buf, static_cast<std::uint32_t>(M.cols()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      std::uint64_t bits;
      const double v = M(i, j);
      std::memcpy(&bits, &v, 8);
      for (int k = 0; k < 8; ++k) buf.push_back(static_cast<char>((bits >> (8 * k)) & 0xffu));
    }
  }
  write_file_atomic(path, buf);
}

DenseMatrix read_dense_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  require(data.size() >= 12 && data.compare(0, 4, "DMAT") == 0, ErrorCode::Parse,
          "dense matrix file: bad header");
  auto u32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[at + k])) << (8 * k);
    return v;
  };
  const std::uint32_t rows = u32(4);
  const std::uint32_t cols = u32(8);
  require(data.size() == 12 + static_cast<std::size_t>(rows) * cols * 8, ErrorCode::Parse,
          "dense matrix file: size does not match header");
  DenseMatrix M(rows, cols);
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(rows) * cols; ++idx) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[12 + idx * 8 + k])) << (8 * k);
    }
    double v;
    std::memcpy(&v, &bits, 8);
    M.data()[idx] = v;
  }
  return M;
}

void write_dense_csv(const std::filesystem::path& path, const DenseMatrix& M) {
  std::string out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out.push_back(',');
      out += format_double(M(i, j));
    }
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& M) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(M.rows()) + " " + std::to_string(M.cols()) + " " + std::to_string(M.nnz()) + "\n";
  const auto off = M.row_offsets();
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      out += std::to_string(i + 1) + " " + std::to_string(M.columns()[k] + 1) + " " +
             format_double(M.values()[k]) + "\n";
    }
  }
  write_file_atomic(path, out);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line.rfind("%%MatrixMarket matrix coordinate real", 0) == 0,
          ErrorCode::Parse, "matrix market: unsupported header");
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream dims(line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  require(static_cast<bool>(dims >> rows >> cols >> nnz), ErrorCode::Parse, "matrix market: bad size line");
  struct Entry {
    std::size_t i, j;
    double v;
  };
  std::vector<Entry> entries(nnz);
  for (auto& e : entries) {
    require(static_cast<bool>(in >> e.i >> e.j >> e.v) && e.i >= 1 && e.j >= 1 && e.i <= rows && e.j <= cols,
            ErrorCode::Parse, "matrix market: bad entry");
    --e.i;
    --e.j;
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  std::vector<std::size_t> off(rows + 1, 0);
  std::vector<std::uint32_t> col;
  std::vector<double> val;
  for (const auto& e : entries) {
    ++off[e.i + 1];
    col.push_back(static_cast<std::uint32_t>(e.j));
    val.push_back(e.v);
  }
  for (std::size_t i = 0; i < rows; ++i) off[i + 1] += off[i];
  return SparseMatrix(rows, cols, std::move(off), std::move(col), std::move(val));
}

}  // namespace kgmg
