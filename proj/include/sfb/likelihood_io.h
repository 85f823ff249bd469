// sfb/likelihood_io.h

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

#ifndef SFB_LIKELIHOOD_IO_H_
#define SFB_LIKELIHOOD_IO_H_

// Binary K x N matrix container, little-endian regardless of host:
//
//   offset  size  field
//   0       4     magic "SFBL"
//   4       4     u32 format version (1)
//   8       4     u32 scalar code: 0 = float32, 1 = float64
//   12      4     u32 K
//   16      4     u32 N
//   20      ...   K*N scalars, state-major (entry (i, n) at index i*N + n)
//
// -inf is stored as the scalar type's negative infinity; NaN is rejected on
// both read and write.  The same container carries log-likelihoods,
// posteriors and gradients.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sfb/inference.h"
#include "sfb/sparse.h"

namespace sfb {

enum class ScalarType : std::uint32_t { kFloat32 = 0, kFloat64 = 1 };

inline constexpr std::uint32_t kLikelihoodFormatVersion = 1;
inline constexpr std::size_t kLikelihoodHeaderBytes = 20;

void write_matrix(std::ostream &out, const DenseMatrix<double> &m, ScalarType type);
void write_matrix_file(const std::string &path, const DenseMatrix<double> &m,
                       ScalarType type);

/// Throws ParseError on a bad header, truncated or oversized payload, or NaN.
DenseMatrix<double> read_matrix(std::istream &in, ScalarType *type = nullptr);
DenseMatrix<double> read_matrix_file(const std::string &path, ScalarType *type = nullptr);

/// read_matrix plus log-likelihood validation (no +inf).
LikelihoodTensor read_likelihoods_file(const std::string &path);

}  // namespace sfb

#endif  // SFB_LIKELIHOOD_IO_H_
