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

#include "perm/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/QR>

#include "perm/errors.hpp"

namespace perm {

std::string_view to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::gaussian:
            return "gaussian";
        case EnsembleKind::circular:
            return "circular";
        case EnsembleKind::bernoulli:
            return "bernoulli";
        case EnsembleKind::unitary_minor:
            return "unitary-minor";
    }
    return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view text) {
    if (text == "gaussian") return EnsembleKind::gaussian;
    if (text == "circular") return EnsembleKind::circular;
    if (text == "bernoulli") return EnsembleKind::bernoulli;
    if (text == "unitary-minor" || text == "unitary_minor") return EnsembleKind::unitary_minor;
    throw InvalidArgument("unknown ensemble '" + std::string(text) + "'");
}

void EnsembleSpec::validate() const {
    if (n == 0) throw InvalidArgument("ensemble order must be at least 1");
    if (kind == EnsembleKind::unitary_minor) {
        if (!exponent) throw InvalidArgument("unitary-minor ensemble needs an exponent");
        if (!(*exponent >= 1.0) || !std::isfinite(*exponent)) {
            throw InvalidArgument("unitary-minor exponent must be at least 1");
        }
        (void)minor_dimension(n, *exponent);
    } else if (exponent) {
        throw InvalidArgument("exponent only applies to the unitary-minor ensemble");
    }
}

Complex gaussian_complex(RngStream &rng) {
    const double u1 = rng.uniform_positive();
    const double u2 = rng.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return Complex(radius * std::cos(angle), radius * std::sin(angle)) / std::numbers::sqrt2;
}

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, RngStream &rng) {
    ComplexMatrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = gaussian_complex(rng);
    }
    return a;
}

ComplexMatrix phase_fixed_q(const ComplexMatrix &a) {
    const Eigen::Index rows = a.rows();
    const Eigen::Index cols = a.cols();
    if (rows < cols) throw DimensionError("phase_fixed_q needs rows >= cols");
    using ColMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::HouseholderQR<ColMajor> qr(a);
    ColMajor q = qr.householderQ() * ColMajor::Identity(rows, cols);
    const auto &r = qr.matrixQR();
    for (Eigen::Index j = 0; j < cols; ++j) {
        const Complex rjj = r(j, j);
        const double modulus = std::abs(rjj);
        if (modulus == 0.0) throw InvalidArgument("QR factorization is rank deficient");
        q.col(j) *= rjj / modulus;
    }
    return q;
}

ComplexMatrix haar_unitary(std::size_t n, RngStream &rng) {
    if (n == 0) throw DimensionError("unitary order must be at least 1");
    // An exactly singular Ginibre draw has probability zero; redraw if it happens.
    for (;;) {
        try {
            return phase_fixed_q(ginibre(n, n, rng));
        } catch (const InvalidArgument &) {
        }
    }
}

std::size_t minor_dimension(std::size_t n, double a) {
    const double m = std::round(std::pow(static_cast<double>(n), a));
    if (!std::isfinite(m) || m > 1e9) throw InvalidArgument("unitary order n^a is too large");
    const auto result = static_cast<std::size_t>(m);
    if (result < n) throw InvalidArgument("round(n^a) must be at least n");
    return result;
}

ComplexMatrix scaled_minor(std::size_t n, double a, RngStream &rng) {
    if (n == 0) throw DimensionError("minor order must be at least 1");
    const std::size_t m = minor_dimension(n, a);
    for (;;) {
        try {
            const ComplexMatrix columns = phase_fixed_q(ginibre(m, n, rng));
            const auto size = static_cast<Eigen::Index>(n);
            return std::sqrt(static_cast<double>(m)) * columns.topLeftCorner(size, size);
        } catch (const InvalidArgument &) {
        }
    }
}

Matrix sample_matrix(const EnsembleSpec &spec, std::uint64_t index) {
    spec.validate();
    RngStream rng(spec.seed, index);
    const auto n = static_cast<Eigen::Index>(spec.n);
    switch (spec.kind) {
        case EnsembleKind::gaussian:
            return Matrix::from_complex(ginibre(spec.n, spec.n, rng));
        case EnsembleKind::circular: {
            ComplexMatrix a(n, n);
            for (Eigen::Index i = 0; i < a.size(); ++i) {
                a.data()[i] = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
            }
            return Matrix::from_complex(std::move(a));
        }
        case EnsembleKind::bernoulli: {
            RealMatrix a(n, n);
            for (Eigen::Index i = 0; i < a.size(); ++i) {
                a.data()[i] = (rng() >> 63) ? 1.0 : -1.0;
            }
            return Matrix::from_real(a);
        }
        case EnsembleKind::unitary_minor:
            return Matrix::from_complex(scaled_minor(spec.n, *spec.exponent, rng));
    }
    throw InvalidArgument("unknown ensemble");
}

}  // namespace perm
