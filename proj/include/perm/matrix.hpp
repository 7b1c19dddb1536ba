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

#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string_view>

#include <Eigen/Dense>

namespace perm {

using Complex = std::complex<double>;

/// Row-major dense storage, the layout of the matrix text format.
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<Complex>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class MatrixKind { real, complex };

/// How long sums of products are accumulated.
///
/// `extended` keeps the running sum as an unevaluated pair of doubles
/// (double-double); products are always formed in plain double precision.
enum class AccumulationMode { plain, compensated, extended };

std::string_view to_string(MatrixKind kind);
std::string_view to_string(AccumulationMode mode);
AccumulationMode parse_accumulation_mode(std::string_view text);

/// Square matrix of finite entries, real or complex.
///
/// Entries are always held as complex doubles; a real-kind matrix has every
/// imaginary part equal to zero. Algorithms dispatch on `kind()` to run the
/// same templated code on `double` or `Complex`.
class Matrix {
  public:
    Matrix(MatrixKind kind, ComplexMatrix values);

    static Matrix from_real(const RealMatrix &values);
    static Matrix from_complex(ComplexMatrix values);

    MatrixKind kind() const noexcept { return kind_; }
    std::size_t order() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    const ComplexMatrix &values() const noexcept { return values_; }
    RealMatrix real_values() const { return values_.real(); }

    /// Smallest k with a_{i,j} = 0 whenever |i - j| > k; found while the
    /// entries are validated, so structure queries need no extra pass.
    std::size_t band_width() const noexcept { return band_width_; }

    Complex operator()(std::size_t row, std::size_t col) const {
        return values_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    bool operator==(const Matrix &other) const {
        return kind_ == other.kind_ && values_ == other.values_;
    }

  private:
    MatrixKind kind_;
    ComplexMatrix values_;
    std::size_t band_width_ = 0;
};

/// J_n, the all-ones matrix of order n.
Matrix all_ones(std::size_t n);

Matrix parse_matrix(std::istream &in);
Matrix read_matrix(const std::filesystem::path &path);

/// Writes the shortest text that parses back to the identical doubles.
void write_matrix(std::ostream &out, const Matrix &matrix);
void write_matrix(const std::filesystem::path &path, const Matrix &matrix);

/// Applies `fn` to the matrix viewed with its natural scalar type.
template <typename Fn>
decltype(auto) visit_scalar(const Matrix &matrix, Fn &&fn) {
    if (matrix.kind() == MatrixKind::real) {
        return fn(RealMatrix(matrix.real_values()));
    }
    return fn(matrix.values());
}

}  // namespace perm
