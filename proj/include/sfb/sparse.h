// sfb/sparse.h

// Copyright 2026  The sfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SFB_SPARSE_H_
#define SFB_SPARSE_H_

// Semiring-valued containers.  An entry that is not stored reads as the
// semiring zero, never as numeric 0: in the log semiring numeric 0 is the
// *one* element.  Stored entries may themselves hold the zero element (an
// arc whose weight was pruned to -inf); canonicalize() drops them.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfb/errors.h"
#include "sfb/semiring.h"

namespace sfb {

using Index = std::uint32_t;

/// Row-major dense matrix.  Used for likelihood payloads and gradients.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T())
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T &operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  friend bool operator==(const DenseMatrix &, const DenseMatrix &) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <Semiring W>
class SparseVector {
 public:
  SparseVector() = default;
  /// Indices must be strictly increasing and below dim.
  SparseVector(std::size_t dim, std::vector<Index> indices, std::vector<W> values)
      : dim_(dim), indices_(std::move(indices)), values_(std::move(values)) {
    if (indices_.size() != values_.size())
      throw DimensionError("SparseVector: index/value count mismatch");
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      if (indices_[k] >= dim_)
        throw DimensionError("SparseVector: index " + std::to_string(indices_[k]) +
                             " out of range for dim " + std::to_string(dim_));
      if (k > 0 && indices_[k] <= indices_[k - 1])
        throw DimensionError("SparseVector: indices not strictly increasing");
    }
  }

  /// Keeps only the entries that differ from the zero element.
  static SparseVector from_dense(std::span<const W> dense) {
    std::vector<Index> idx;
    std::vector<W> val;
    for (std::size_t i = 0; i < dense.size(); ++i) {
      if (!dense[i].is_zero()) {
        idx.push_back(static_cast<Index>(i));
        val.push_back(dense[i]);
      }
    }
    return SparseVector(dense.size(), std::move(idx), std::move(val));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return indices_.size(); }
  std::span<const Index> indices() const noexcept { return indices_; }
  std::span<const W> values() const noexcept { return values_; }

  W at(std::size_t i) const {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
    if (it == indices_.end() || *it != i) return W::zero();
    return values_[static_cast<std::size_t>(it - indices_.begin())];
  }

  std::vector<W> to_dense() const {
    std::vector<W> out(dim_, W::zero());
    for (std::size_t k = 0; k < indices_.size(); ++k) out[indices_[k]] = values_[k];
    return out;
  }

  /// True when some stored entry is not the zero element.
  bool has_nonzero() const noexcept {
    return std::any_of(values_.begin(), values_.end(),
                       [](W w) { return !w.is_zero(); });
  }

  friend bool operator==(const SparseVector &, const SparseVector &) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Index> indices_;
  std::vector<W> values_;
};

template <Semiring W>
struct Triplet {
  Index row;
  Index col;
  W weight;
};

/// Sparse matrix held in both compressed-row and compressed-column layouts,
/// so that y = M x and y = M^T x each traverse contiguous memory.
template <Semiring W>
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Duplicate (row, col) pairs are combined with oplus in input order.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::span<const Triplet<W>> triplets) {
    if (rows == 0 || cols == 0)
      throw DimensionError("SparseMatrix: dimensions must be positive");
    if (rows > std::numeric_limits<Index>::max() ||
        cols > std::numeric_limits<Index>::max())
      throw DimensionError("SparseMatrix: dimensions exceed index range");
    for (const auto &t : triplets) {
      if (t.row >= rows || t.col >= cols)
        throw DimensionError("SparseMatrix: entry (" + std::to_string(t.row) +
                             "," + std::to_string(t.col) + ") out of range for " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
    std::vector<Triplet<W>> sorted(triplets.begin(), triplets.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto &a, const auto &b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Triplet<W>> merged;
    merged.reserve(sorted.size());
    for (const auto &t : sorted) {
      if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col)
        merged.back().weight = oplus(merged.back().weight, t.weight);
      else
        merged.push_back(t);
    }
    return SparseMatrix(rows, cols, merged);
  }

  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::initializer_list<Triplet<W>> triplets) {
    return from_triplets(rows, cols,
                         std::span<const Triplet<W>>(triplets.begin(), triplets.size()));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return csr_cols_.size(); }

  // Compressed-row view.
  std::span<const std::size_t> row_offsets() const noexcept { return csr_offsets_; }
  std::span<const Index> col_indices() const noexcept { return csr_cols_; }
  std::span<const W> row_values() const noexcept { return csr_values_; }

  // Compressed-column view.
  std::span<const std::size_t> col_offsets() const noexcept { return csc_offsets_; }
  std::span<const Index> row_indices() const noexcept { return csc_rows_; }
  std::span<const W> col_values() const noexcept { return csc_values_; }

  W lookup(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) throw DimensionError("SparseMatrix::lookup out of range");
    auto first = csr_cols_.begin() + static_cast<std::ptrdiff_t>(csr_offsets_[r]);
    auto last = csr_cols_.begin() + static_cast<std::ptrdiff_t>(csr_offsets_[r + 1]);
    auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c) return W::zero();
    return csr_values_[static_cast<std::size_t>(it - csr_cols_.begin())];
  }

  /// Stored entries in row-major order.
  std::vector<Triplet<W>> triplets() const {
    std::vector<Triplet<W>> out;
    out.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = csr_offsets_[r]; k < csr_offsets_[r + 1]; ++k)
        out.push_back({static_cast<Index>(r), csr_cols_[k], csr_values_[k]});
    return out;
  }

  SparseMatrix transpose() const {
    SparseMatrix t;
    t.rows_ = cols_;
    t.cols_ = rows_;
    t.csr_offsets_ = csc_offsets_;
    t.csr_cols_ = csc_rows_;
    t.csr_values_ = csc_values_;
    t.csc_offsets_ = csr_offsets_;
    t.csc_rows_ = csr_cols_;
    t.csc_values_ = csr_values_;
    return t;
  }

  /// Copy without stored zero elements.
  SparseMatrix canonicalize() const {
    std::vector<Triplet<W>> kept;
    for (const auto &t : triplets())
      if (!t.weight.is_zero()) kept.push_back(t);
    return SparseMatrix(rows_, cols_, kept);
  }

  /// Applies f to every stored value, keeping the sparsity pattern.
  template <Semiring U, class F>
  SparseMatrix<U> map(F &&f) const {
    std::vector<Triplet<U>> out;
    out.reserve(nnz());
    for (const auto &t : triplets()) out.push_back({t.row, t.col, f(t.weight)});
    return SparseMatrix<U>::from_triplets(rows_, cols_, out);
  }

  friend bool operator==(const SparseMatrix &, const SparseMatrix &) = default;

 private:
  // `sorted` must be ordered by (row, col) without duplicates.
  SparseMatrix(std::size_t rows, std::size_t cols, const std::vector<Triplet<W>> &sorted)
      : rows_(rows), cols_(cols) {
    const std::size_t nnz = sorted.size();
    csr_offsets_.assign(rows + 1, 0);
    csc_offsets_.assign(cols + 1, 0);
    csr_cols_.resize(nnz);
    csr_values_.resize(nnz);
    csc_rows_.resize(nnz);
    csc_values_.resize(nnz);
    for (const auto &t : sorted) {
      ++csr_offsets_[t.row + 1];
      ++csc_offsets_[t.col + 1];
    }
    for (std::size_t r = 0; r < rows; ++r) csr_offsets_[r + 1] += csr_offsets_[r];
    for (std::size_t c = 0; c < cols; ++c) csc_offsets_[c + 1] += csc_offsets_[c];
    std::vector<std::size_t> fill(csc_offsets_.begin(), csc_offsets_.end() - 1);
    for (std::size_t k = 0; k < nnz; ++k) {
      const auto &t = sorted[k];
      csr_cols_[k] = t.col;
      csr_values_[k] = t.weight;
      const std::size_t pos = fill[t.col]++;
      csc_rows_[pos] = t.row;  // rows arrive ascending, so columns stay sorted
      csc_values_[pos] = t.weight;
    }
  }

  template <Semiring>
  friend class SparseMatrix;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> csr_offsets_;
  std::vector<Index> csr_cols_;
  std::vector<W> csr_values_;
  std::vector<std::size_t> csc_offsets_;
  std::vector<Index> csc_rows_;
  std::vector<W> csc_values_;
};

/// diag(blocks[0], ..., blocks[I-1]).
template <Semiring W>
SparseMatrix<W> block_diagonal(std::span<const SparseMatrix<W>> blocks) {
  if (blocks.empty()) throw DimensionError("block_diagonal: empty block list");
  std::size_t rows = 0, cols = 0, nnz = 0;
  for (const auto &b : blocks) {
    rows += b.rows();
    cols += b.cols();
    nnz += b.nnz();
  }
  std::vector<Triplet<W>> all;
  all.reserve(nnz);
  std::size_t row_off = 0, col_off = 0;
  for (const auto &b : blocks) {
    for (auto t : b.triplets()) {
      t.row += static_cast<Index>(row_off);
      t.col += static_cast<Index>(col_off);
      all.push_back(t);
    }
    row_off += b.rows();
    col_off += b.cols();
  }
  return SparseMatrix<W>::from_triplets(rows, cols, all);
}

template <Semiring W>
SparseVector<W> vstack(std::span<const SparseVector<W>> parts) {
  if (parts.empty()) throw DimensionError("vstack: empty vector list");
  std::size_t dim = 0;
  std::vector<Index> idx;
  std::vector<W> val;
  for (const auto &p : parts) {
    for (std::size_t k = 0; k < p.nnz(); ++k) {
      idx.push_back(static_cast<Index>(p.indices()[k] + dim));
      val.push_back(p.values()[k]);
    }
    dim += p.dim();
  }
  return SparseVector<W>(dim, std::move(idx), std::move(val));
}

template <class T>
std::vector<T> vstack(std::span<const std::vector<T>> parts) {
  if (parts.empty()) throw DimensionError("vstack: empty vector list");
  std::vector<T> out;
  for (const auto &p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace sfb

#endif  // SFB_SPARSE_H_
