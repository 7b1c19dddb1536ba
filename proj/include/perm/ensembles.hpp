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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "perm/matrix.hpp"
#include "perm/rng.hpp"

namespace perm {

/// Random-matrix families:
///   gaussian       i.i.d. complex Gaussian entries, mean 0, E|a|^2 = 1
///   circular       i.i.d. exp(i theta), theta uniform on [0, 2 pi)
///   bernoulli      i.i.d. real +-1 with equal probability
///   unitary_minor  sqrt(m) times the top-left n x n block of a Haar
///                  unitary of order m = round(n^a)
enum class EnsembleKind { gaussian, circular, bernoulli, unitary_minor };

std::string_view to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(std::string_view text);

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::gaussian;
    std::size_t n = 1;
    std::optional<double> exponent;  // unitary_minor only
    std::uint64_t seed = 0;

    /// Throws InvalidArgument if the fields are inconsistent.
    void validate() const;

    bool operator==(const EnsembleSpec &) const = default;
};

/// (g1 + i g2) / sqrt(2) with g1, g2 from one trigonometric Box-Muller draw.
Complex gaussian_complex(RngStream &rng);

/// rows x cols matrix of gaussian_complex draws, filled column by column.
ComplexMatrix ginibre(std::size_t rows, std::size_t cols, RngStream &rng);

/// Q * Lambda for the QR factorization of `a` (rows >= cols), where Lambda
/// rescales column j by r_jj / |r_jj|. The result has orthonormal columns
/// and does not depend on the phase convention of the QR routine.
ComplexMatrix phase_fixed_q(const ComplexMatrix &a);

/// Haar-distributed unitary of order n.
ComplexMatrix haar_unitary(std::size_t n, RngStream &rng);

/// round(n^a), halves rounded away from zero.
std::size_t minor_dimension(std::size_t n, double a);

/// sqrt(m) times the top-left n x n block of a Haar unitary of order
/// m = round(n^a).
///
/// Only the first n columns of the unitary are formed: they are the
/// phase-fixed orthonormalisation of the first n columns of the underlying
/// Ginibre matrix, which `ginibre` draws first. The result therefore equals
/// the corresponding block of haar_unitary(m, rng) for the same stream.
ComplexMatrix scaled_minor(std::size_t n, double a, RngStream &rng);

/// Sample number `index` of the ensemble; a pure function of (spec, index).
Matrix sample_matrix(const EnsembleSpec &spec, std::uint64_t index);

}  // namespace perm
