// sfb/kernels.h

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

#ifndef SFB_KERNELS_H_
#define SFB_KERNELS_H_

// Sparse semiring matrix-vector kernels.
//
// Each output entry is produced by one call to a per-entry function
// (RowProduct / ColProduct / ...) that folds its terms in ascending index
// order.  kernels::serial loops over the outputs; kernels::parallel splits the
// same loop across OpenMP threads.  Because the per-entry function is shared,
// the two paths return bit-identical results; serial is kept as the reference
// for the tests and the benchmark.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sfb/errors.h"
#include "sfb/semiring.h"
#include "sfb/sparse.h"

namespace sfb {

/// Degree of parallelism handed to the kernels.  1 selects the serial path.
struct Exec {
  int threads = 1;
};

namespace kernels {

/// ⊕_k M(r, k) ⊗ x(k), over the stored entries of row r.
template <Semiring W>
inline W RowProduct(const SparseMatrix<W> &m, std::size_t r, const W *x) noexcept {
  const auto offsets = m.row_offsets();
  const Index *cols = m.col_indices().data();
  const W *vals = m.row_values().data();
  typename W::Accumulator acc;
  for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k)
    acc.add(otimes(vals[k], x[cols[k]]));
  return acc.result();
}

/// ⊕_k M(k, c) ⊗ x(k), over the stored entries of column c.
template <Semiring W>
inline W ColProduct(const SparseMatrix<W> &m, std::size_t c, const W *x) noexcept {
  const auto offsets = m.col_offsets();
  const Index *rows = m.row_indices().data();
  const W *vals = m.col_values().data();
  typename W::Accumulator acc;
  for (std::size_t k = offsets[c]; k < offsets[c + 1]; ++k)
    acc.add(otimes(vals[k], x[rows[k]]));
  return acc.result();
}

/// emit(j) ⊗ (M^T prev)(j); skips the column when emit(j) is zero.
template <Semiring W>
inline W ForwardEntry(const SparseMatrix<W> &m, std::size_t j, const W *prev,
                      const W *emit) noexcept {
  if (emit[j].is_zero()) return W::zero();
  return otimes(emit[j], ColProduct(m, j, prev));
}

/// Max-plus column product with arg-max.  Ties keep the lowest row index;
/// *best_row is -1 when every term is -inf.
template <std::floating_point Real>
inline TropicalWeightT<Real> ViterbiEntry(const SparseMatrix<TropicalWeightT<Real>> &m,
                                          std::size_t j,
                                          const TropicalWeightT<Real> *prev,
                                          const TropicalWeightT<Real> *emit,
                                          std::int32_t *best_row) noexcept {
  using W = TropicalWeightT<Real>;
  *best_row = -1;
  if (emit[j].is_zero()) return W::zero();
  const auto offsets = m.col_offsets();
  const Index *rows = m.row_indices().data();
  const W *vals = m.col_values().data();
  Real best = internal::kNegInf<Real>;
  for (std::size_t k = offsets[j]; k < offsets[j + 1]; ++k) {
    const Real cand = otimes(vals[k], prev[rows[k]]).value();
    if (cand > best) {
      best = cand;
      *best_row = static_cast<std::int32_t>(rows[k]);
    }
  }
  return otimes(emit[j], W::Unchecked(best));
}

namespace serial {

template <Semiring W>
void matvec(const SparseMatrix<W> &m, std::span<const W> x, std::span<W> y) {
  for (std::size_t i = 0; i < m.rows(); ++i) y[i] = RowProduct(m, i, x.data());
}

template <Semiring W>
void matvec_transposed(const SparseMatrix<W> &m, std::span<const W> x, std::span<W> y) {
  for (std::size_t j = 0; j < m.cols(); ++j) y[j] = ColProduct(m, j, x.data());
}

template <Semiring W>
void hadamard(std::span<const W> u, std::span<const W> v, std::span<W> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = otimes(u[i], v[i]);
}

template <Semiring W>
void forward_step(const SparseMatrix<W> &m, std::span<const W> prev,
                  std::span<const W> emit, std::span<W> out) {
  for (std::size_t j = 0; j < m.cols(); ++j)
    out[j] = ForwardEntry(m, j, prev.data(), emit.data());
}

template <Semiring W>
void backward_step(const SparseMatrix<W> &m, std::span<const W> next,
                   std::span<const W> emit_next, std::span<W> scratch,
                   std::span<W> out) {
  hadamard<W>(next, emit_next, scratch);
  matvec<W>(m, scratch, out);
}

template <std::floating_point Real>
void viterbi_step(const SparseMatrix<TropicalWeightT<Real>> &m,
                  std::span<const TropicalWeightT<Real>> prev,
                  std::span<const TropicalWeightT<Real>> emit,
                  std::span<TropicalWeightT<Real>> out,
                  std::span<std::int32_t> backpointers) {
  for (std::size_t j = 0; j < m.cols(); ++j)
    out[j] = ViterbiEntry(m, j, prev.data(), emit.data(), &backpointers[j]);
}

}  // namespace serial

namespace parallel {

// Loops are written with a signed induction variable for OpenMP.

template <Semiring W>
void matvec(const SparseMatrix<W> &m, std::span<const W> x, std::span<W> y,
            int threads) {
  const auto n = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    y[static_cast<std::size_t>(i)] = RowProduct(m, static_cast<std::size_t>(i), x.data());
}

template <Semiring W>
void matvec_transposed(const SparseMatrix<W> &m, std::span<const W> x,
                       std::span<W> y, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(m.cols());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t j = 0; j < n; ++j)
    y[static_cast<std::size_t>(j)] = ColProduct(m, static_cast<std::size_t>(j), x.data());
}

template <Semiring W>
void hadamard(std::span<const W> u, std::span<const W> v, std::span<W> out,
              int threads) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = otimes(u[k], v[k]);
  }
}

template <Semiring W>
void forward_step(const SparseMatrix<W> &m, std::span<const W> prev,
                  std::span<const W> emit, std::span<W> out, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(m.cols());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t j = 0; j < n; ++j)
    out[static_cast<std::size_t>(j)] =
        ForwardEntry(m, static_cast<std::size_t>(j), prev.data(), emit.data());
}

template <Semiring W>
void backward_step(const SparseMatrix<W> &m, std::span<const W> next,
                   std::span<const W> emit_next, std::span<W> scratch,
                   std::span<W> out, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(m.rows());
  const auto k = static_cast<std::ptrdiff_t>(next.size());
#pragma omp parallel num_threads(threads)
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < k; ++i) {
      const auto s = static_cast<std::size_t>(i);
      scratch[s] = otimes(next[s], emit_next[s]);
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] =
          RowProduct(m, static_cast<std::size_t>(i), scratch.data());
  }
}

template <std::floating_point Real>
void viterbi_step(const SparseMatrix<TropicalWeightT<Real>> &m,
                  std::span<const TropicalWeightT<Real>> prev,
                  std::span<const TropicalWeightT<Real>> emit,
                  std::span<TropicalWeightT<Real>> out,
                  std::span<std::int32_t> backpointers, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(m.cols());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto s = static_cast<std::size_t>(j);
    out[s] = ViterbiEntry(m, s, prev.data(), emit.data(), &backpointers[s]);
  }
}

}  // namespace parallel

inline void CheckDim(std::size_t got, std::size_t want, const char *what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(got) +
                         ", expected " + std::to_string(want));
}

}  // namespace kernels

// ----------------------------------------------------------------------------
// Checked entry points.  These validate shapes once and dispatch on Exec.

/// y(i) = ⊕_j M(i,j) ⊗ x(j).
template <Semiring W>
std::vector<W> matvec(const SparseMatrix<W> &m, std::type_identity_t<std::span<const W>> x,
                      Exec exec = {}) {
  kernels::CheckDim(x.size(), m.cols(), "matvec");
  std::vector<W> y(m.rows());
  if (exec.threads > 1)
    kernels::parallel::matvec<W>(m, x, y, exec.threads);
  else
    kernels::serial::matvec<W>(m, x, y);
  return y;
}

/// y(j) = ⊕_i M(i,j) ⊗ x(i).
template <Semiring W>
std::vector<W> matvec_transposed(const SparseMatrix<W> &m,
                                 std::type_identity_t<std::span<const W>> x,
                                 Exec exec = {}) {
  kernels::CheckDim(x.size(), m.rows(), "matvec_transposed");
  std::vector<W> y(m.cols());
  if (exec.threads > 1)
    kernels::parallel::matvec_transposed<W>(m, x, y, exec.threads);
  else
    kernels::serial::matvec_transposed<W>(m, x, y);
  return y;
}

template <Semiring W>
std::vector<W> hadamard(const std::vector<W> &u, const std::vector<W> &v, Exec exec = {}) {
  kernels::CheckDim(v.size(), u.size(), "hadamard");
  std::vector<W> out(u.size());
  if (exec.threads > 1)
    kernels::parallel::hadamard<W>(u, v, out, exec.threads);
  else
    kernels::serial::hadamard<W>(u, v, out);
  return out;
}

}  // namespace sfb

#endif  // SFB_KERNELS_H_
