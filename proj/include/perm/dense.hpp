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
#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "perm/accumulate.hpp"
#include "perm/errors.hpp"
#include "perm/matrix.hpp"

namespace perm {

enum class Algorithm { naive, ryser, repeated, sparse, band };

std::string_view to_string(Algorithm algorithm);

struct PermanentResult {
    Complex value{};
    /// Terms of the enumerated sum (2^(n-1) for dense Ryser). For the band
    /// algorithm this counts coefficient-times-entry products instead.
    std::uint64_t terms_evaluated = 0;
    AccumulationMode mode = AccumulationMode::compensated;
    Algorithm algorithm = Algorithm::ryser;
    double wall_seconds = 0.0;
};

/// Gray-code ranks are 64-bit words, so subset enumeration stops at n = 64.
inline constexpr std::size_t max_enumerated_order = 64;

/// Largest order accepted by the brute-force permutation sum.
inline constexpr std::size_t max_naive_order = 10;

/// A contiguous run of ranks in the Gray-code sequence.
struct PartitionRange {
    std::uint64_t start = 0;
    std::uint64_t length = 0;

    bool operator==(const PartitionRange &) const = default;
};

/// Splits `total` ranks into `workers` contiguous runs whose lengths differ by at
/// most one and returns run `index`.
PartitionRange distribute(std::uint64_t total, std::uint64_t workers, std::uint64_t index);

/// The rank-th binary reflected Gray code.
constexpr std::uint64_t gray_unrank(std::uint64_t rank) noexcept { return rank ^ (rank >> 1); }

/// Position in the Gray sequence: `code` plus the parity sign `t = (-1)^rank`.
struct GrayState {
    int parity = 1;
    std::uint64_t code = 0;
};

/// Advances to the next Gray code. Toggles `parity`, flips one bit of `code`
/// and returns its zero-based position.
inline unsigned next_gray(GrayState &state) noexcept {
    state.parity = -state.parity;
    unsigned j = 0;
    if (state.parity == 1) {
        j = static_cast<unsigned>(std::countr_zero(state.code)) + 1;
    }
    state.code ^= std::uint64_t{1} << j;
    return j;
}

void check_enumerable_order(std::size_t n);

/// Direct sum over all n! permutations. Only meant as a test oracle.
template <typename Derived>
typename Derived::Scalar naive_permanent(const Eigen::MatrixBase<Derived> &a) {
    using Scalar = typename Derived::Scalar;
    const auto n = static_cast<std::size_t>(a.rows());
    if (n != static_cast<std::size_t>(a.cols()) || n == 0) {
        throw DimensionError("naive permanent needs a non-empty square matrix");
    }
    if (n > max_naive_order) {
        throw OrderTooLarge("naive permanent is limited to n <= " + std::to_string(max_naive_order));
    }
    std::vector<Eigen::Index> sigma(n);
    std::iota(sigma.begin(), sigma.end(), Eigen::Index{0});
    accumulator_t<Scalar, AccumulationMode::compensated> acc;
    do {
        Scalar product(1);
        for (std::size_t i = 0; i < n; ++i) product *= a(static_cast<Eigen::Index>(i), sigma[i]);
        acc.add(product);
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return acc.value();
}

Complex naive_permanent(const Matrix &a);

namespace detail {

template <typename Scalar>
using ColumnMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

/// Ryser half-range sum over the ranks in `range`, kept in its accumulator so
/// that the ordered combine step sees the full partial state.
template <typename Scalar, AccumulationMode Mode>
accumulator_t<Scalar, Mode> ryser_partial(const ColumnMajor<Scalar> &a, PartitionRange range) {
    const Eigen::Index n = a.rows();
    accumulator_t<Scalar, Mode> acc;
    if (range.length == 0) return acc;

    // w_i = a_{i,n} - (1/2) sum_j a_{i,j}, then add the columns selected by
    // the first code of the range.
    DenseVector<Scalar> w = a.col(n - 1) - Scalar(0.5) * a.rowwise().sum();
    GrayState state{(range.start & 1U) ? -1 : 1, gray_unrank(range.start)};
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        if ((state.code >> j) & 1U) w += a.col(j);
    }

    for (std::uint64_t step = 0; step < range.length; ++step) {
        const Scalar product = w.prod();
        const unsigned j = next_gray(state);
        acc.add(static_cast<double>(state.parity) * product);
        if (step + 1 < range.length) {
            if ((state.code >> j) & 1U) {
                w += a.col(static_cast<Eigen::Index>(j));
            } else {
                w -= a.col(static_cast<Eigen::Index>(j));
            }
        }
    }
    return acc;
}

inline std::size_t worker_threads(std::size_t workers) {
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    return std::min(workers, hw);
}

/// Runs `job(k)` for every k in [0, workers) on a fixed pool of threads.
/// Each k is computed by exactly one thread; results must be written to
/// k-indexed storage so the outcome is independent of scheduling.
template <typename Job>
void run_partitions(std::size_t workers, Job &&job) {
    const std::size_t threads = worker_threads(workers);
    if (threads <= 1) {
        for (std::size_t k = 0; k < workers; ++k) job(k);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t k = t; k < workers; k += threads) job(k);
        });
    }
}

}  // namespace detail

/// Partial sum S_k of worker `index` out of `workers`, before the final
/// 2(-1)^n factor.
template <typename Derived>
typename Derived::Scalar subpermanent(const Eigen::MatrixBase<Derived> &a, std::uint64_t workers,
                                      std::uint64_t index, AccumulationMode mode) {
    using Scalar = typename Derived::Scalar;
    const auto n = static_cast<std::size_t>(a.rows());
    check_enumerable_order(n);
    const PartitionRange range = distribute(std::uint64_t{1} << (n - 1), workers, index);
    const detail::ColumnMajor<Scalar> columns = a;
    return dispatch_mode(mode, [&](auto tag) {
        return detail::ryser_partial<Scalar, decltype(tag)::value>(columns, range).value();
    });
}

Complex subpermanent(const Matrix &a, std::uint64_t workers, std::uint64_t index,
                     AccumulationMode mode);

/// Ryser permanent with Gray-code ordering over subsets of the first n-1
/// columns. The 2^(n-1) ranks are split into `workers` ranges; partial sums
/// are stored by worker index and combined serially in that order.
template <typename Derived>
typename Derived::Scalar ryser_permanent(const Eigen::MatrixBase<Derived> &a, std::size_t workers,
                                         AccumulationMode mode) {
    using Scalar = typename Derived::Scalar;
    const auto n = static_cast<std::size_t>(a.rows());
    if (n != static_cast<std::size_t>(a.cols()) || n == 0) {
        throw DimensionError("permanent needs a non-empty square matrix");
    }
    check_enumerable_order(n);
    if (workers == 0) throw InvalidArgument("worker count must be at least 1");
    const std::uint64_t total = std::uint64_t{1} << (n - 1);
    const detail::ColumnMajor<Scalar> columns = a;

    return dispatch_mode(mode, [&](auto tag) {
        constexpr AccumulationMode M = decltype(tag)::value;
        std::vector<accumulator_t<Scalar, M>> partials(workers);
        detail::run_partitions(workers, [&](std::size_t k) {
            partials[k] = detail::ryser_partial<Scalar, M>(columns, distribute(total, workers, k));
        });
        accumulator_t<Scalar, M> sum;
        for (const auto &partial : partials) sum.merge(partial);
        const double sign = (n % 2 == 0) ? 2.0 : -2.0;
        return Scalar(sign * sum.value());
    });
}

/// Dense permanent of `a`.
PermanentResult permanent(const Matrix &a, std::size_t workers = 1,
                          AccumulationMode mode = AccumulationMode::compensated);

}  // namespace perm
