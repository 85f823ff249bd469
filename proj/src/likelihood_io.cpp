// likelihood_io.cpp

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

#include "sfb/likelihood_io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "sfb/errors.h"

namespace sfb {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'B', 'L'};

template <class U>
void PutLE(std::vector<unsigned char> &buf, U v) {
  for (std::size_t b = 0; b < sizeof(U); ++b)
    buf.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xFF));
}

template <class U>
U GetLE(const unsigned char *p) {
  U v = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(p[b]) << (8 * b);
  return v;
}

std::size_t ScalarBytes(ScalarType t) { return t == ScalarType::kFloat32 ? 4 : 8; }

}  // namespace

void write_matrix(std::ostream &out, const DenseMatrix<double> &m, ScalarType type) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
      m.cols() > std::numeric_limits<std::uint32_t>::max())
    throw DimensionError("write_matrix: dimensions exceed u32");
  std::vector<unsigned char> buf;
  buf.reserve(kLikelihoodHeaderBytes + m.rows() * m.cols() * ScalarBytes(type));
  buf.insert(buf.end(), kMagic, kMagic + 4);
  PutLE<std::uint32_t>(buf, kLikelihoodFormatVersion);
  PutLE<std::uint32_t>(buf, static_cast<std::uint32_t>(type));
  PutLE<std::uint32_t>(buf, static_cast<std::uint32_t>(m.rows()));
  PutLE<std::uint32_t>(buf, static_cast<std::uint32_t>(m.cols()));
  for (double v : m.data()) {
    if (std::isnan(v)) throw InvalidWeightError("write_matrix: NaN entry");
    if (type == ScalarType::kFloat32)
      PutLE<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    else
      PutLE<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(v));
  }
  out.write(reinterpret_cast<const char *>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("write_matrix: stream error");
}

void write_matrix_file(const std::string &path, const DenseMatrix<double> &m,
                       ScalarType type) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_matrix(out, m, type);
}

DenseMatrix<double> read_matrix(std::istream &in, ScalarType *type_out) {
  unsigned char head[kLikelihoodHeaderBytes];
  in.read(reinterpret_cast<char *>(head), sizeof(head));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(head)))
    throw ParseError("likelihood container: truncated header");
  if (std::memcmp(head, kMagic, 4) != 0)
    throw ParseError("likelihood container: bad magic (expected SFBL)");
  const auto version = GetLE<std::uint32_t>(head + 4);
  if (version != kLikelihoodFormatVersion)
    throw ParseError("likelihood container: unsupported version " + std::to_string(version));
  const auto code = GetLE<std::uint32_t>(head + 8);
  if (code > 1) throw ParseError("likelihood container: bad scalar code " + std::to_string(code));
  const auto type = static_cast<ScalarType>(code);
  const std::size_t k = GetLE<std::uint32_t>(head + 12);
  const std::size_t n = GetLE<std::uint32_t>(head + 16);
  if (k == 0 || n == 0) throw ParseError("likelihood container: zero dimension");

  const std::size_t width = ScalarBytes(type);
  std::vector<unsigned char> payload(k * n * width);
  in.read(reinterpret_cast<char *>(payload.data()),
          static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size())
    throw ParseError("likelihood container: payload shorter than header declares");
  if (in.peek() != std::char_traits<char>::eof())
    throw ParseError("likelihood container: trailing bytes after payload");

  DenseMatrix<double> m(k, n);
  auto data = m.data();
  for (std::size_t e = 0; e < k * n; ++e) {
    const unsigned char *p = payload.data() + e * width;
    const double v = type == ScalarType::kFloat32
                         ? static_cast<double>(std::bit_cast<float>(GetLE<std::uint32_t>(p)))
                         : std::bit_cast<double>(GetLE<std::uint64_t>(p));
    if (std::isnan(v)) throw ParseError("likelihood container: NaN at entry " + std::to_string(e));
    data[e] = v;
  }
  if (type_out) *type_out = type;
  return m;
}

DenseMatrix<double> read_matrix_file(const std::string &path, ScalarType *type) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_matrix(in, type);
}

LikelihoodTensor read_likelihoods_file(const std::string &path) {
  auto m = read_matrix_file(path);
  for (double v : m.data())
    if (v == std::numeric_limits<double>::infinity())
      throw ParseError("'" + path + "': +inf is not a log-likelihood");
  return LikelihoodTensor(std::move(m));
}

}  // namespace sfb
