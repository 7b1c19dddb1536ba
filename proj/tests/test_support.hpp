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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>

#include "perm/ensembles.hpp"
#include "perm/matrix.hpp"
#include "perm/rng.hpp"

namespace perm::testing {

inline double rel_error(Complex got, Complex want) {
    const double scale = std::abs(want);
    return scale == 0.0 ? std::abs(got) : std::abs(got - want) / scale;
}

inline double factorial(std::size_t n) {
    double f = 1.0;
    for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
    return f;
}

inline double real_normal(RngStream &rng) { return gaussian_complex(rng).real() * std::sqrt(2.0); }

inline Matrix real_gaussian(std::size_t n, RngStream &rng) {
    const auto s = static_cast<Eigen::Index>(n);
    RealMatrix a(s, s);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = real_normal(rng);
    return Matrix::from_real(a);
}

inline Matrix complex_gaussian(std::size_t n, RngStream &rng) {
    return Matrix::from_complex(ginibre(n, n, rng));
}

inline Matrix plus_minus_one(std::size_t n, RngStream &rng) {
    const auto s = static_cast<Eigen::Index>(n);
    RealMatrix a(s, s);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = (rng() >> 63) ? 1.0 : -1.0;
    return Matrix::from_real(a);
}

/// Identity plus off-diagonal entries with probability `density`, keeping at
/// most `cap` non-zeros in every row and column. Non-zero entries are Gaussian.
inline Matrix sparse_identity(std::size_t n, double density, std::size_t cap, RngStream &rng) {
    const auto s = static_cast<Eigen::Index>(n);
    RealMatrix a = RealMatrix::Zero(s, s);
    std::vector<std::size_t> row_count(n, 1), col_count(n, 1);
    for (Eigen::Index i = 0; i < s; ++i) a(i, i) = real_normal(rng);
    for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) {
            if (i == j || rng.uniform() >= density) continue;
            const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
            if (row_count[ui] >= cap || col_count[uj] >= cap) continue;
            a(i, j) = real_normal(rng);
            ++row_count[ui];
            ++col_count[uj];
        }
    }
    return Matrix::from_real(a);
}

inline Matrix banded(std::size_t n, std::size_t k, RngStream &rng, bool complex_entries) {
    const auto s = static_cast<Eigen::Index>(n);
    ComplexMatrix a = ComplexMatrix::Zero(s, s);
    const auto kk = static_cast<Eigen::Index>(k);
    for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = std::max<Eigen::Index>(0, i - kk); j <= std::min<Eigen::Index>(s - 1, i + kk);
             ++j) {
            a(i, j) = complex_entries ? gaussian_complex(rng) : Complex(real_normal(rng));
        }
    }
    return complex_entries ? Matrix::from_complex(a) : Matrix::from_real(a.real());
}

/// n x n matrix whose columns are drawn from `distinct` Gaussian columns; the
/// column pattern cycles so every distinct column is used.
inline Matrix repeated_columns(std::size_t n, std::size_t distinct, RngStream &rng) {
    const auto s = static_cast<Eigen::Index>(n);
    ComplexMatrix base = ginibre(n, distinct, rng);
    ComplexMatrix a(s, s);
    for (Eigen::Index j = 0; j < s; ++j) a.col(j) = base.col(j % static_cast<Eigen::Index>(distinct));
    return Matrix::from_complex(a);
}

}  // namespace perm::testing
