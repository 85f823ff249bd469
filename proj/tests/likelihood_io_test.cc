// tests/likelihood_io_test.cc

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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>
#include <string>

#include "sfb/errors.h"
#include "sfb/likelihood_io.h"
#include "test_util.h"

namespace sfb {
namespace {

DenseMatrix<double> Sample() {
  DenseMatrix<double> m(2, 3);
  m(0, 0) = -1.0;
  m(0, 1) = -test::kInf;
  m(0, 2) = 0.5;
  m(1, 0) = -1e-300;
  m(1, 1) = 3.25;
  m(1, 2) = -7.0;
  return m;
}

std::string Encode(const DenseMatrix<double> &m, ScalarType t) {
  std::ostringstream out;
  write_matrix(out, m, t);
  return out.str();
}

DenseMatrix<double> Decode(const std::string &bytes, ScalarType *t = nullptr) {
  std::istringstream in(bytes);
  return read_matrix(in, t);
}

TEST(LikelihoodIo, HeaderLayout) {
  const auto bytes = Encode(Sample(), ScalarType::kFloat64);
  ASSERT_EQ(bytes.size(), kLikelihoodHeaderBytes + 6 * 8);
  EXPECT_EQ(bytes.substr(0, 4), "SFBL");
  const unsigned char expect[16] = {1, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0};
  EXPECT_EQ(std::memcmp(bytes.data() + 4, expect, 16), 0);
  // First payload scalar is entry (0,0) = -1.0, little-endian.
  double first;
  std::memcpy(&first, bytes.data() + 20, 8);
  EXPECT_EQ(first, -1.0);
  double second;
  std::memcpy(&second, bytes.data() + 28, 8);
  EXPECT_EQ(second, -test::kInf);
}

TEST(LikelihoodIo, RoundTripFloat64) {
  ScalarType t;
  EXPECT_EQ(Decode(Encode(Sample(), ScalarType::kFloat64), &t), Sample());
  EXPECT_EQ(t, ScalarType::kFloat64);
}

TEST(LikelihoodIo, RoundTripFloat32) {
  const auto bytes = Encode(Sample(), ScalarType::kFloat32);
  EXPECT_EQ(bytes.size(), kLikelihoodHeaderBytes + 6 * 4);
  ScalarType t;
  const auto m = Decode(bytes, &t);
  EXPECT_EQ(t, ScalarType::kFloat32);
  EXPECT_EQ(m(0, 1), -test::kInf);
  EXPECT_EQ(m(0, 0), -1.0);
  EXPECT_EQ(m(1, 0), -0.0);  // flushes to zero in single precision
}

TEST(LikelihoodIo, Rejects) {
  const auto good = Encode(Sample(), ScalarType::kFloat64);
  EXPECT_THROW(Decode(good.substr(0, 10)), ParseError);
  EXPECT_THROW(Decode(good.substr(0, good.size() - 1)), ParseError);
  EXPECT_THROW(Decode(good + "x"), ParseError);
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(Decode(bad), ParseError);
  bad = good;
  bad[4] = 2;
  EXPECT_THROW(Decode(bad), ParseError);
  bad = good;
  bad[8] = 7;
  EXPECT_THROW(Decode(bad), ParseError);
  bad = good;
  bad[12] = 0;
  EXPECT_THROW(Decode(bad), ParseError);
  bad = good;
  const double nan = std::nan("");
  std::memcpy(bad.data() + 20, &nan, 8);
  EXPECT_THROW(Decode(bad), ParseError);
}

TEST(LikelihoodIo, WriteRejectsNan) {
  DenseMatrix<double> m(1, 1, std::nan(""));
  std::ostringstream out;
  EXPECT_THROW(write_matrix(out, m, ScalarType::kFloat64), InvalidWeightError);
}

TEST(LikelihoodIo, ErrorMessagesNameTheProblem) {
  try {
    Decode(Encode(Sample(), ScalarType::kFloat64) + "zz");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("trailing"), std::string::npos);
  }
}

}  // namespace
}  // namespace sfb
