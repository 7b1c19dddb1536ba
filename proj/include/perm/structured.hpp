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
#include <span>
#include <utility>
#include <vector>

#include "perm/dense.hpp"
#include "perm/matrix.hpp"
#include "perm/rng.hpp"

namespace perm {

// ---------------------------------------------------------------------------
// Repeated columns
// ---------------------------------------------------------------------------

/// The distinct columns of a matrix, in order of first appearance, with the
/// number of times each occurs.
struct ColumnMultiplicity {
    MatrixKind kind = MatrixKind::complex;
    ComplexMatrix distinct_columns;  // n x R
    std::vector<std::uint64_t> counts;

    std::size_t order() const noexcept { return static_cast<std::size_t>(distinct_columns.rows()); }
    std::size_t distinct() const noexcept { return counts.size(); }
};

ColumnMultiplicity column_multiplicities(const Matrix &a);

/// Ryser's sum over column-multiplicity vectors 0 <= f_j <= m_j, weighted by
/// prod_j binom(m_j, f_j). Visits prod_j (m_j + 1) terms.
PermanentResult repeated_columns_permanent(const ColumnMultiplicity &cm,
                                           AccumulationMode mode = AccumulationMode::compensated,
                                           std::size_t workers = 1);

/// binom(n, k) in double by the multiplicative recurrence.
double binomial(std::uint64_t n, std::uint64_t k);

// ---------------------------------------------------------------------------
// Sparse matrices
// ---------------------------------------------------------------------------

/// Pairwise-disjoint row supports S_1..S_d plus the remaining columns T.
/// Every subset J with a non-vanishing Ryser product meets each S_l.
struct GreedyPartition {
    std::vector<std::vector<std::size_t>> restricting_sets;
    std::vector<std::size_t> remainder;

    /// 2^|T| * prod_l (2^|S_l| - 1), as a double.
    double enumeration_count() const;
};

/// True when some row or column of `a` is entirely zero.
bool has_zero_line(const Matrix &a);

inline constexpr std::size_t default_partition_trials = 8;

/// Greedy minimum-degree construction of a domination-restricting list,
/// repeated `trials` times with random tie-breaking; returns the partition
/// with the smallest enumeration count.
GreedyPartition greedy_partition(const Matrix &a, std::size_t trials, RngStream &rng);

/// Throws InvalidArgument unless `partition` is a partition of the columns of
/// `a` whose restricting sets are non-empty row supports.
void validate_partition(const Matrix &a, const GreedyPartition &partition);

/// Ryser's sum restricted to subsets that meet every restricting set.
/// Returns exactly zero without enumeration when `a` has a zero row or column.
PermanentResult sparse_permanent(const Matrix &a, const GreedyPartition &partition,
                                 AccumulationMode mode = AccumulationMode::compensated,
                                 std::size_t workers = 1);

/// Convenience overload building the partition from a seeded stream.
PermanentResult sparse_permanent(const Matrix &a, AccumulationMode mode, std::size_t workers,
                                 std::size_t trials, std::uint64_t seed);

/// Column subsets (as bit masks) visited by sparse_permanent, in visiting order.
std::vector<std::uint64_t> sparse_subsets(const GreedyPartition &partition, std::size_t n);

// ---------------------------------------------------------------------------
// Band-limited matrices
// ---------------------------------------------------------------------------

/// Smallest k with a(i, j) == 0 whenever |i - j| > k.
std::size_t band_width(const Matrix &a);

/// Largest window (2k + 2 live variables) the band algorithm will allocate.
inline constexpr std::size_t max_band_window = 24;

/// Multilinear polynomial in a sliding window of variables x_offset ..
/// x_offset+width-1. Monomials are bit masks over the window, so x_j^2 never
/// appears: multiplying a monomial that already holds x_j by x_j drops it.
template <typename Scalar>
class BandPoly {
  public:
    explicit BandPoly(std::size_t bandwidth)
        : width_(2 * bandwidth + 2),
          offset_(-static_cast<std::int64_t>(bandwidth) - 1),
          coeffs_(std::size_t{1} << width_, Scalar(0)),
          scratch_(coeffs_.size(), Scalar(0)) {
        coeffs_[0] = Scalar(1);
    }

    /// p <- p * sum_c entries[c] x_{first_column + c}, dropping squares.
    void multiply(std::int64_t first_column, std::span<const Scalar> entries) {
        std::fill(scratch_.begin(), scratch_.end(), Scalar(0));
        const std::size_t size = coeffs_.size();
        for (std::size_t m = 0; m < size; ++m) {
            const Scalar c = coeffs_[m];
            if (c == Scalar(0)) continue;
            for (std::size_t t = 0; t < entries.size(); ++t) {
                if (entries[t] == Scalar(0)) continue;
                const std::int64_t bit = first_column + static_cast<std::int64_t>(t) - offset_;
                const std::size_t mask = std::size_t{1} << bit;
                if (m & mask) continue;
                scratch_[m | mask] += c * entries[t];
                ++products_;
            }
        }
        coeffs_.swap(scratch_);
    }

    /// Substitutes x_offset = 1 and slides the window up by one variable.
    void retire_lowest() {
        const std::size_t half = coeffs_.size() / 2;
        for (std::size_t m = 0; m < half; ++m) {
            scratch_[m] = coeffs_[2 * m] + coeffs_[2 * m + 1];
        }
        std::fill(scratch_.begin() + static_cast<std::ptrdiff_t>(half), scratch_.end(), Scalar(0));
        coeffs_.swap(scratch_);
        ++offset_;
    }

    /// Value with every remaining variable set to 1.
    Scalar substitute_all_ones() const {
        accumulator_t<Scalar, AccumulationMode::compensated> acc;
        for (const Scalar &c : coeffs_) acc.add(c);
        return acc.value();
    }

    /// Number of distinct variables occurring in a monomial with a non-zero
    /// coefficient.
    std::size_t live_variables() const {
        std::size_t used = 0;
        for (std::size_t m = 0; m < coeffs_.size(); ++m) {
            if (coeffs_[m] != Scalar(0)) used |= m;
        }
        return static_cast<std::size_t>(std::popcount(used));
    }

    std::int64_t window_offset() const noexcept { return offset_; }
    std::size_t width() const noexcept { return width_; }
    std::uint64_t products() const noexcept { return products_; }
    std::span<const Scalar> coefficients() const noexcept { return coeffs_; }

  private:
    std::size_t width_;
    std::int64_t offset_;
    std::vector<Scalar> coeffs_;
    std::vector<Scalar> scratch_;
    std::uint64_t products_ = 0;
};

/// Permanent of a matrix of bandwidth at most `k` in time linear in n.
/// Throws InvalidArgument if `a` has a non-zero entry outside the band.
PermanentResult band_permanent(const Matrix &a, std::size_t k);

/// Same as band_permanent, reporting the maximum live-variable count seen.
PermanentResult band_permanent(const Matrix &a, std::size_t k, std::size_t &max_live_variables);

// ---------------------------------------------------------------------------
// Algorithm selection
// ---------------------------------------------------------------------------

struct PermanentOptions {
    std::size_t workers = 1;
    AccumulationMode mode = AccumulationMode::compensated;
    std::size_t partition_trials = default_partition_trials;
    std::uint64_t seed = 0;
};

/// Fraction of non-zero entries.
double nonzero_density(const Matrix &a);

/// Picks band, repeated-column, sparse or dense Ryser from the structure of `a`.
Algorithm select_algorithm(const Matrix &a);

/// Runs the named algorithm.
PermanentResult compute_permanent(const Matrix &a, Algorithm algorithm,
                                  const PermanentOptions &options = {});

namespace detail {

/// Reflected mixed-radix Gray code. Consecutive codes differ by +-1 in a
/// single digit.
class MixedRadixGray {
  public:
    explicit MixedRadixGray(std::vector<std::uint64_t> radices);

    /// Number of codes; throws OrderTooLarge if it does not fit in 64 bits.
    std::uint64_t total() const noexcept { return total_; }

    /// Positions the walker on the code of the given rank.
    void unrank(std::uint64_t rank);

    /// Moves to the next code and returns (digit, direction).
    std::pair<std::size_t, int> next();

    const std::vector<std::uint64_t> &digits() const noexcept { return digits_; }
    const std::vector<std::uint64_t> &radices() const noexcept { return radices_; }

  private:
    std::vector<std::uint64_t> radices_;
    std::vector<std::uint64_t> digits_;
    std::vector<int> directions_;
    std::uint64_t total_ = 1;
};

}  // namespace detail

}  // namespace perm
