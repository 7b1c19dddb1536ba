// Copyright 2026 The Permanent Engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "perm/errors.hpp"
#include "perm/matrix.hpp"
#include "test_support.hpp"

namespace perm {
namespace {

Matrix parse(const std::string &text) {
    std::istringstream in(text);
    return parse_matrix(in);
}

TEST(MatrixParse, RealTwoByTwo) {
    const Matrix a = parse("real 2 2\n1 2\n3 4\n");
    EXPECT_EQ(a.kind(), MatrixKind::real);
    ASSERT_EQ(a.order(), 2u);
    EXPECT_EQ(a(0, 0), Complex(1));
    EXPECT_EQ(a(0, 1), Complex(2));
    EXPECT_EQ(a(1, 0), Complex(3));
    EXPECT_EQ(a(1, 1), Complex(4));
}

TEST(MatrixParse, ComplexOneByOne) {
    const Matrix a = parse("complex 1 1\n0 1\n");
    EXPECT_EQ(a.kind(), MatrixKind::complex);
    EXPECT_EQ(a(0, 0), Complex(0, 1));
}

TEST(MatrixParse, CommentsBlankLinesAndScientificNotation) {
    const Matrix a = parse("# a comment\n\nreal 2 2\n# row one\n1e0 -2.5E-1\n\n+3 .5\n");
    EXPECT_EQ(a(0, 1), Complex(-0.25));
    EXPECT_EQ(a(1, 0), Complex(3));
    EXPECT_EQ(a(1, 1), Complex(0.5));
}

TEST(MatrixParse, NonSquareHeaderIsDimensionError) {
    EXPECT_THROW(parse("real 2 3\n1 2 3\n4 5 6\n"), DimensionError);
}

TEST(MatrixParse, ZeroOrderIsDimensionError) { EXPECT_THROW(parse("real 0 0\n"), DimensionError); }

TEST(MatrixParse, MalformedInputsAreParseErrors) {
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("# only a comment\n"), ParseError);
    EXPECT_THROW(parse("real 2\n"), ParseError);
    EXPECT_THROW(parse("quaternion 1 1\n1\n"), ParseError);
    EXPECT_THROW(parse("real x 2\n"), ParseError);
    EXPECT_THROW(parse("real 2 2\n1 2\n"), ParseError);
    EXPECT_THROW(parse("real 2 2\n1 2 3\n4 5\n"), ParseError);
    EXPECT_THROW(parse("real 2 2\n1 2\n3\n"), ParseError);
    EXPECT_THROW(parse("real 1 1\nabc\n"), ParseError);
    EXPECT_THROW(parse("real 1 1\n1\n2\n"), ParseError);
    EXPECT_THROW(parse("complex 1 1\n1\n"), ParseError);
}

TEST(MatrixParse, NonFiniteEntriesRejected) {
    EXPECT_THROW(parse("real 1 1\nnan\n"), ParseError);
    EXPECT_THROW(parse("real 1 1\ninf\n"), ParseError);
    EXPECT_THROW(parse("real 1 1\n1e400\n"), ParseError);
}

TEST(MatrixParse, MissingFileIsParseError) {
    EXPECT_THROW(read_matrix("/nonexistent/perm/matrix.txt"), ParseError);
}

TEST(MatrixConstruct, Invariants) {
    EXPECT_THROW(Matrix(MatrixKind::real, ComplexMatrix(2, 3)), DimensionError);
    EXPECT_THROW(Matrix(MatrixKind::real, ComplexMatrix(0, 0)), DimensionError);
    ComplexMatrix c(1, 1);
    c(0, 0) = Complex(1, 1);
    EXPECT_THROW(Matrix(MatrixKind::real, c), InvalidArgument);
    c(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0);
    EXPECT_THROW(Matrix(MatrixKind::complex, c), InvalidArgument);
}

TEST(MatrixConstruct, BandWidthIsCached) {
    RealMatrix a = RealMatrix::Zero(5, 5);
    EXPECT_EQ(Matrix::from_real(a).band_width(), 0u);
    a(0, 0) = 1.0;
    a(1, 3) = 2.0;
    EXPECT_EQ(Matrix::from_real(a).band_width(), 2u);
    a(4, 0) = -1.0;
    EXPECT_EQ(Matrix::from_real(a).band_width(), 4u);
    ComplexMatrix c = ComplexMatrix::Zero(3, 3);
    c(2, 1) = Complex(0.0, 1.0);
    EXPECT_EQ(Matrix::from_complex(c).band_width(), 1u);
}

TEST(AllOnes, Shape) {
    EXPECT_THROW(all_ones(0), DimensionError);
    const Matrix j1 = all_ones(1);
    EXPECT_EQ(j1.order(), 1u);
    EXPECT_EQ(j1(0, 0), Complex(1));
    const Matrix j3 = all_ones(3);
    EXPECT_EQ(j3.values().size(), 9);
    EXPECT_TRUE((j3.values().array() == Complex(1)).all());
    EXPECT_EQ(j3.kind(), MatrixKind::real);
}

TEST(MatrixIo, RoundTripIsBitExact) {
    RngStream rng(11);
    for (std::size_t n : {1u, 3u, 7u}) {
        for (const Matrix &a : {testing::real_gaussian(n, rng), testing::complex_gaussian(n, rng)}) {
            std::stringstream buffer;
            write_matrix(buffer, a);
            const Matrix b = parse_matrix(buffer);
            EXPECT_EQ(a, b);
        }
    }
    ComplexMatrix tricky(2, 2);
    tricky << Complex(0.1, -0.0), Complex(1e-308, 5e-324), Complex(-1.7976931348623157e308, 1.0 / 3.0),
        Complex(123456789.0, -2.5e-17);
    const Matrix a = Matrix::from_complex(tricky);
    std::stringstream buffer;
    write_matrix(buffer, a);
    EXPECT_EQ(parse_matrix(buffer), a);
}

TEST(MatrixIo, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "perm_matrix_roundtrip.txt";
    RngStream rng(3);
    const Matrix a = testing::complex_gaussian(4, rng);
    write_matrix(path, a);
    EXPECT_EQ(read_matrix(path), a);
    std::filesystem::remove(path);
}

TEST(AccumulationModeNames, RoundTrip) {
    for (auto mode : {AccumulationMode::plain, AccumulationMode::compensated, AccumulationMode::extended}) {
        EXPECT_EQ(parse_accumulation_mode(to_string(mode)), mode);
    }
    EXPECT_THROW(parse_accumulation_mode("kahan"), InvalidArgument);
}

}  // namespace
}  // namespace perm
