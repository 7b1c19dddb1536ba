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

#include "perm/structured.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <type_traits>
#include <vector>

namespace perm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t checked_product(std::span<const std::uint64_t> factors) {
    std::uint64_t total = 1;
    for (std::uint64_t f : factors) {
        if (__builtin_mul_overflow(total, f, &total)) {
            throw OrderTooLarge("enumeration does not fit in 64-bit ranks");
        }
    }
    return total;
}

std::vector<std::uint64_t> row_supports(const Matrix &a) {
    const std::size_t n = a.order();
    std::vector<std::uint64_t> supports(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (a(i, j) != Complex(0.0)) supports[i] |= std::uint64_t{1} << j;
        }
    }
    return supports;
}

// Digit layout for the sparse enumeration: one digit per restricting set,
// whose value e selects the non-empty subset gray(e + 1) of that set, then one
// binary digit per remaining column.
class SparseLayout {
  public:
    explicit SparseLayout(const GreedyPartition &partition)
        : sets_(partition.restricting_sets), rest_(partition.remainder) {}

    std::vector<std::uint64_t> radices() const {
        std::vector<std::uint64_t> radices;
        radices.reserve(sets_.size() + rest_.size());
        for (const auto &set : sets_) {
            const std::size_t s = set.size();
            radices.push_back(s >= 64 ? std::numeric_limits<std::uint64_t>::max()
                                      : (std::uint64_t{1} << s) - 1);
        }
        radices.insert(radices.end(), rest_.size(), 2);
        return radices;
    }

    std::uint64_t column_mask(const std::vector<std::uint64_t> &digits) const {
        std::uint64_t mask = 0;
        for (std::size_t l = 0; l < sets_.size(); ++l) {
            const std::uint64_t local = gray_unrank(digits[l] + 1);
            for (std::size_t p = 0; p < sets_[l].size(); ++p) {
                if ((local >> p) & 1U) mask |= std::uint64_t{1} << sets_[l][p];
            }
        }
        for (std::size_t t = 0; t < rest_.size(); ++t) {
            if (digits[sets_.size() + t]) mask |= std::uint64_t{1} << rest_[t];
        }
        return mask;
    }

    /// The column toggled when digit `k` moves from `before` to `after`,
    /// and whether it joined the subset.
    std::pair<std::size_t, bool> toggled(std::size_t k, std::uint64_t before,
                                         std::uint64_t after) const {
        if (k < sets_.size()) {
            const std::uint64_t next = gray_unrank(after + 1);
            const auto p = static_cast<std::size_t>(std::countr_zero(gray_unrank(before + 1) ^ next));
            return {sets_[k][p], ((next >> p) & 1U) != 0};
        }
        return {rest_[k - sets_.size()], after == 1};
    }

  private:
    const std::vector<std::vector<std::size_t>> &sets_;
    const std::vector<std::size_t> &rest_;
};

template <typename Scalar, AccumulationMode Mode>
accumulator_t<Scalar, Mode> repeated_partial(const detail::ColumnMajor<Scalar> &columns,
                                             const std::vector<std::vector<double>> &binomials,
                                             const std::vector<std::uint64_t> &radices,
                                             PartitionRange range) {
    accumulator_t<Scalar, Mode> acc;
    if (range.length == 0) return acc;
    detail::MixedRadixGray walker(radices);
    walker.unrank(range.start);

    // Row sums are shifted by half the full row sum. The alternating sum
    // cancels any shift that does not depend on f, and centred terms lose
    // far less to cancellation.
    const auto &f = walker.digits();
    DenseVector<Scalar> w = DenseVector<Scalar>::Zero(columns.rows());
    std::uint64_t total_f = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double centred = static_cast<double>(f[k]) - 0.5 * static_cast<double>(radices[k] - 1);
        w += centred * columns.col(static_cast<Eigen::Index>(k));
        total_f += f[k];
    }
    bool odd = (total_f & 1U) != 0;

    for (std::uint64_t step = 0; step < range.length; ++step) {
        double weight = 1.0;
        for (std::size_t k = 0; k < f.size(); ++k) weight *= binomials[k][f[k]];
        acc.add((odd ? -weight : weight) * w.prod());
        if (step + 1 < range.length) {
            const auto [k, direction] = walker.next();
            if (direction > 0) {
                w += columns.col(static_cast<Eigen::Index>(k));
            } else {
                w -= columns.col(static_cast<Eigen::Index>(k));
            }
            odd = !odd;
        }
    }
    return acc;
}

template <typename Scalar, AccumulationMode Mode>
accumulator_t<Scalar, Mode> sparse_partial(const detail::ColumnMajor<Scalar> &columns,
                                           const SparseLayout &layout,
                                           const std::vector<std::uint64_t> &radices,
                                           const DenseVector<Scalar> &offset, PartitionRange range) {
    accumulator_t<Scalar, Mode> acc;
    if (range.length == 0) return acc;
    detail::MixedRadixGray walker(radices);
    walker.unrank(range.start);

    const std::uint64_t mask = layout.column_mask(walker.digits());
    DenseVector<Scalar> w = offset;
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        if ((mask >> j) & 1U) w += columns.col(j);
    }
    bool odd = (std::popcount(mask) & 1) != 0;

    for (std::uint64_t step = 0; step < range.length; ++step) {
        const Scalar product = w.prod();
        acc.add(odd ? Scalar(-product) : product);
        if (step + 1 < range.length) {
            const auto [k, direction] = walker.next();
            const std::uint64_t after = walker.digits()[k];
            const std::uint64_t before = direction > 0 ? after - 1 : after + 1;
            const auto [column, added] = layout.toggled(k, before, after);
            if (added) {
                w += columns.col(static_cast<Eigen::Index>(column));
            } else {
                w -= columns.col(static_cast<Eigen::Index>(column));
            }
            odd = !odd;
        }
    }
    return acc;
}

}  // namespace

// ---------------------------------------------------------------------------

namespace detail {

MixedRadixGray::MixedRadixGray(std::vector<std::uint64_t> radices)
    : radices_(std::move(radices)), digits_(radices_.size(), 0), directions_(radices_.size(), 1) {
    for (std::uint64_t r : radices_) {
        if (r == 0) throw InvalidArgument("mixed-radix digit needs a positive radix");
    }
    total_ = checked_product(radices_);
}

void MixedRadixGray::unrank(std::uint64_t rank) {
    if (rank >= total_) throw InvalidArgument("Gray rank out of range");
    std::uint64_t q = rank;
    for (std::size_t k = 0; k < radices_.size(); ++k) {
        const std::uint64_t r = radices_[k];
        const std::uint64_t a = q % r;
        q /= r;
        const bool reflected = (q & 1U) != 0;
        digits_[k] = reflected ? r - 1 - a : a;
        directions_[k] = reflected ? -1 : 1;
    }
}

std::pair<std::size_t, int> MixedRadixGray::next() {
    for (std::size_t k = 0; k < radices_.size(); ++k) {
        const int direction = directions_[k];
        const bool can_move = direction > 0 ? digits_[k] + 1 < radices_[k] : digits_[k] > 0;
        if (!can_move) continue;
        digits_[k] = direction > 0 ? digits_[k] + 1 : digits_[k] - 1;
        for (std::size_t j = 0; j < k; ++j) directions_[j] = -directions_[j];
        return {k, direction};
    }
    throw InvalidArgument("mixed-radix Gray code is already at its last code");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Repeated columns

ColumnMultiplicity column_multiplicities(const Matrix &a) {
    const auto n = static_cast<Eigen::Index>(a.order());
    const ComplexMatrix &values = a.values();
    std::vector<Eigen::Index> representatives;
    std::vector<std::uint64_t> counts;
    for (Eigen::Index j = 0; j < n; ++j) {
        bool found = false;
        for (std::size_t r = 0; r < representatives.size(); ++r) {
            if (values.col(j) == values.col(representatives[r])) {
                ++counts[r];
                found = true;
                break;
            }
        }
        if (!found) {
            representatives.push_back(j);
            counts.push_back(1);
        }
    }
    ColumnMultiplicity cm;
    cm.kind = a.kind();
    cm.distinct_columns.resize(n, static_cast<Eigen::Index>(representatives.size()));
    for (std::size_t r = 0; r < representatives.size(); ++r) {
        cm.distinct_columns.col(static_cast<Eigen::Index>(r)) = values.col(representatives[r]);
    }
    cm.counts = std::move(counts);
    return cm;
}

double binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    // Exact in 128-bit integers for every n <= 64, rounded once at the end.
    unsigned __int128 c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
    }
    return static_cast<double>(c);
}

PermanentResult repeated_columns_permanent(const ColumnMultiplicity &cm, AccumulationMode mode,
                                           std::size_t workers) {
    const auto start = Clock::now();
    const std::size_t n = cm.order();
    check_enumerable_order(n);
    if (workers == 0) throw InvalidArgument("worker count must be at least 1");
    std::uint64_t sum = 0;
    for (std::uint64_t m : cm.counts) {
        if (m == 0) throw InvalidArgument("column multiplicities must be positive");
        sum += m;
    }
    if (sum != n || static_cast<std::size_t>(cm.distinct_columns.cols()) != cm.counts.size()) {
        throw InvalidArgument("column multiplicities must sum to the matrix order");
    }

    std::vector<std::uint64_t> radices;
    std::vector<std::vector<double>> binomials;
    for (std::uint64_t m : cm.counts) {
        radices.push_back(m + 1);
        std::vector<double> row(m + 1);
        for (std::uint64_t f = 0; f <= m; ++f) row[f] = binomial(m, f);
        binomials.push_back(std::move(row));
    }
    const std::uint64_t total = checked_product(radices);

    auto run = [&](const auto &columns) {
        using Scalar = typename std::decay_t<decltype(columns)>::Scalar;
        return dispatch_mode(mode, [&](auto tag) {
            constexpr AccumulationMode M = decltype(tag)::value;
            std::vector<accumulator_t<Scalar, M>> partials(workers);
            detail::run_partitions(workers, [&](std::size_t k) {
                partials[k] = repeated_partial<Scalar, M>(columns, binomials, radices,
                                                          distribute(total, workers, k));
            });
            accumulator_t<Scalar, M> acc;
            for (const auto &partial : partials) acc.merge(partial);
            return Complex(n % 2 == 0 ? acc.value() : Scalar(-acc.value()));
        });
    };
    Complex value;
    if (cm.kind == MatrixKind::real) {
        value = run(detail::ColumnMajor<double>(cm.distinct_columns.real()));
    } else {
        value = run(detail::ColumnMajor<Complex>(cm.distinct_columns));
    }

    PermanentResult result;
    result.value = value;
    result.terms_evaluated = total;
    result.mode = mode;
    result.algorithm = Algorithm::repeated;
    result.wall_seconds = seconds_since(start);
    return result;
}

// ---------------------------------------------------------------------------
// Sparse

double GreedyPartition::enumeration_count() const {
    double count = std::ldexp(1.0, static_cast<int>(remainder.size()));
    for (const auto &set : restricting_sets) {
        count *= std::ldexp(1.0, static_cast<int>(set.size())) - 1.0;
    }
    return count;
}

bool has_zero_line(const Matrix &a) {
    const ComplexMatrix &values = a.values();
    const Complex zero(0.0);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        if ((values.row(i).array() == zero).all()) return true;
        if ((values.col(i).array() == zero).all()) return true;
    }
    return false;
}

GreedyPartition greedy_partition(const Matrix &a, std::size_t trials, RngStream &rng) {
    const std::size_t n = a.order();
    check_enumerable_order(n);
    if (trials == 0) throw InvalidArgument("greedy partition needs at least one trial");
    if (has_zero_line(a)) {
        throw InvalidArgument("matrix has a zero row or column; its permanent is 0");
    }
    const std::vector<std::uint64_t> supports = row_supports(a);

    GreedyPartition best;
    double best_count = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> candidates;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        std::vector<bool> open(n, true);
        std::size_t remaining = n;
        std::uint64_t covered = 0;
        GreedyPartition partition;
        while (remaining > 0) {
            int min_degree = std::numeric_limits<int>::max();
            candidates.clear();
            for (std::size_t i = 0; i < n; ++i) {
                if (!open[i]) continue;
                const int degree = std::popcount(supports[i]);
                if (degree < min_degree) {
                    min_degree = degree;
                    candidates.clear();
                }
                if (degree == min_degree) candidates.push_back(i);
            }
            const std::size_t k = candidates[rng.below(candidates.size())];
            const std::uint64_t neighbours = supports[k];
            std::vector<std::size_t> set;
            for (std::size_t j = 0; j < n; ++j) {
                if ((neighbours >> j) & 1U) set.push_back(j);
            }
            partition.restricting_sets.push_back(std::move(set));
            covered |= neighbours;
            for (std::size_t l = 0; l < n; ++l) {
                if (open[l] && (l == k || (supports[l] & neighbours) != 0)) {
                    open[l] = false;
                    --remaining;
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!((covered >> j) & 1U)) partition.remainder.push_back(j);
        }
        const double count = partition.enumeration_count();
        if (count < best_count) {
            best_count = count;
            best = std::move(partition);
        }
    }
    return best;
}

void validate_partition(const Matrix &a, const GreedyPartition &partition) {
    const std::size_t n = a.order();
    check_enumerable_order(n);
    const std::vector<std::uint64_t> supports = row_supports(a);
    std::uint64_t seen = 0;
    auto claim = [&](std::size_t j) {
        if (j >= n) throw InvalidArgument("partition refers to a column outside the matrix");
        const std::uint64_t bit = std::uint64_t{1} << j;
        if (seen & bit) throw InvalidArgument("partition sets overlap");
        seen |= bit;
        return bit;
    };
    for (const auto &set : partition.restricting_sets) {
        if (set.empty()) throw InvalidArgument("restricting sets must be non-empty");
        std::uint64_t mask = 0;
        for (std::size_t j : set) mask |= claim(j);
        if (std::find(supports.begin(), supports.end(), mask) == supports.end()) {
            throw InvalidArgument("restricting set is not the support of any row");
        }
    }
    for (std::size_t j : partition.remainder) claim(j);
    const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    if (seen != all) throw InvalidArgument("partition does not cover every column");
}

PermanentResult sparse_permanent(const Matrix &a, const GreedyPartition &partition,
                                 AccumulationMode mode, std::size_t workers) {
    const auto start = Clock::now();
    const std::size_t n = a.order();
    check_enumerable_order(n);
    if (workers == 0) throw InvalidArgument("worker count must be at least 1");

    PermanentResult result;
    result.mode = mode;
    result.algorithm = Algorithm::sparse;
    if (has_zero_line(a)) {
        result.value = Complex(0.0);
        result.wall_seconds = seconds_since(start);
        return result;
    }
    validate_partition(a, partition);

    const SparseLayout layout(partition);
    const std::vector<std::uint64_t> radices = layout.radices();
    const std::uint64_t total = checked_product(radices);

    // A skipped subset misses some restricting set, so a row owning that
    // support contributes a zero factor. One owner per set stays unshifted;
    // every other row is centred by half its sum, which cuts cancellation
    // without changing the alternating sum.
    std::vector<std::uint64_t> set_masks;
    for (const auto &set : partition.restricting_sets) {
        std::uint64_t mask = 0;
        for (std::size_t j : set) mask |= std::uint64_t{1} << j;
        set_masks.push_back(mask);
    }
    const std::vector<std::uint64_t> supports = row_supports(a);

    result.value = visit_scalar(a, [&](const auto &m) {
        using Scalar = typename std::decay_t<decltype(m)>::Scalar;
        const detail::ColumnMajor<Scalar> columns = m;
        DenseVector<Scalar> offset = Scalar(-0.5) * columns.rowwise().sum();
        for (std::uint64_t mask : set_masks) {
            const auto owner = std::find(supports.begin(), supports.end(), mask) - supports.begin();
            offset(static_cast<Eigen::Index>(owner)) = Scalar(0);
        }
        return dispatch_mode(mode, [&](auto tag) {
            constexpr AccumulationMode M = decltype(tag)::value;
            std::vector<accumulator_t<Scalar, M>> partials(workers);
            detail::run_partitions(workers, [&](std::size_t k) {
                partials[k] = sparse_partial<Scalar, M>(columns, layout, radices, offset,
                                                        distribute(total, workers, k));
            });
            accumulator_t<Scalar, M> acc;
            for (const auto &partial : partials) acc.merge(partial);
            return Complex(n % 2 == 0 ? acc.value() : Scalar(-acc.value()));
        });
    });
    result.terms_evaluated = total;
    result.wall_seconds = seconds_since(start);
    return result;
}

PermanentResult sparse_permanent(const Matrix &a, AccumulationMode mode, std::size_t workers,
                                 std::size_t trials, std::uint64_t seed) {
    if (has_zero_line(a)) {
        PermanentResult result;
        result.mode = mode;
        result.algorithm = Algorithm::sparse;
        return result;
    }
    RngStream rng(seed);
    const GreedyPartition partition = greedy_partition(a, trials, rng);
    return sparse_permanent(a, partition, mode, workers);
}

std::vector<std::uint64_t> sparse_subsets(const GreedyPartition &partition, std::size_t n) {
    check_enumerable_order(n);
    const SparseLayout layout(partition);
    detail::MixedRadixGray walker(layout.radices());
    std::vector<std::uint64_t> subsets;
    subsets.reserve(walker.total());
    std::uint64_t mask = layout.column_mask(walker.digits());
    subsets.push_back(mask);
    for (std::uint64_t step = 1; step < walker.total(); ++step) {
        const auto [k, direction] = walker.next();
        const std::uint64_t after = walker.digits()[k];
        const std::uint64_t before = direction > 0 ? after - 1 : after + 1;
        const auto [column, added] = layout.toggled(k, before, after);
        const std::uint64_t bit = std::uint64_t{1} << column;
        mask = added ? (mask | bit) : (mask & ~bit);
        subsets.push_back(mask);
    }
    return subsets;
}

// ---------------------------------------------------------------------------
// Band

std::size_t band_width(const Matrix &a) { return a.band_width(); }

namespace {

PermanentResult band_impl(const Matrix &a, std::size_t k, std::size_t *max_live_variables) {
    const auto start = Clock::now();
    const std::size_t n = a.order();
    if (band_width(a) > k) {
        throw InvalidArgument("matrix has non-zero entries outside bandwidth " + std::to_string(k));
    }
    const std::size_t kk = std::min(k, n - 1);
    if (2 * kk + 2 > max_band_window) {
        throw OrderTooLarge("bandwidth " + std::to_string(kk) + " exceeds the band algorithm limit");
    }
    if (max_live_variables != nullptr) *max_live_variables = 0;

    PermanentResult result;
    result.mode = AccumulationMode::plain;
    result.algorithm = Algorithm::band;
    // Only the band of each row is read, so the cost stays linear in n.
    auto run = [&](auto scalar_tag) {
        using Scalar = decltype(scalar_tag);
        BandPoly<Scalar> poly(kk);
        std::vector<Scalar> row(2 * kk + 1);
        const Complex *data = a.values().data();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = i > kk ? i - kk : 0;
            const std::size_t hi = std::min(n - 1, i + kk);
            for (std::size_t j = lo; j <= hi; ++j) {
                if constexpr (std::is_same_v<Scalar, double>) {
                    row[j - lo] = data[i * n + j].real();
                } else {
                    row[j - lo] = data[i * n + j];
                }
            }
            poly.multiply(static_cast<std::int64_t>(lo), std::span<const Scalar>(row.data(), hi - lo + 1));
            if (max_live_variables != nullptr) {
                *max_live_variables = std::max(*max_live_variables, poly.live_variables());
            }
            poly.retire_lowest();
        }
        result.terms_evaluated = poly.products();
        return Complex(poly.substitute_all_ones());
    };
    result.value = a.kind() == MatrixKind::real ? run(double{}) : run(Complex{});
    result.wall_seconds = seconds_since(start);
    return result;
}

}  // namespace

PermanentResult band_permanent(const Matrix &a, std::size_t k) { return band_impl(a, k, nullptr); }

PermanentResult band_permanent(const Matrix &a, std::size_t k, std::size_t &max_live_variables) {
    return band_impl(a, k, &max_live_variables);
}

// ---------------------------------------------------------------------------
// Selection

double nonzero_density(const Matrix &a) {
    const ComplexMatrix &values = a.values();
    const auto nonzero = (values.array() != Complex(0.0)).count();
    return static_cast<double>(nonzero) / static_cast<double>(values.size());
}

Algorithm select_algorithm(const Matrix &a) {
    const std::size_t n = a.order();
    const std::size_t bw = band_width(a);
    const auto log2_ceil = static_cast<std::size_t>(std::bit_width(n - 1));
    if (bw <= log2_ceil && 2 * std::min(bw, n - 1) + 2 <= max_band_window) {
        return Algorithm::band;
    }
    if (n > max_enumerated_order) {
        throw OrderTooLarge("order " + std::to_string(n) +
                            " is only supported for narrow band matrices");
    }
    if (4 * column_multiplicities(a).distinct() <= n) return Algorithm::repeated;
    if (nonzero_density(a) <= 0.05) return Algorithm::sparse;
    return Algorithm::ryser;
}

PermanentResult compute_permanent(const Matrix &a, Algorithm algorithm,
                                  const PermanentOptions &options) {
    switch (algorithm) {
        case Algorithm::naive: {
            const auto start = Clock::now();
            PermanentResult result;
            result.value = naive_permanent(a);
            std::uint64_t factorial = 1;
            for (std::uint64_t i = 2; i <= a.order(); ++i) factorial *= i;
            result.terms_evaluated = factorial;
            result.mode = AccumulationMode::compensated;
            result.algorithm = Algorithm::naive;
            result.wall_seconds = seconds_since(start);
            return result;
        }
        case Algorithm::ryser:
            return permanent(a, options.workers, options.mode);
        case Algorithm::repeated:
            return repeated_columns_permanent(column_multiplicities(a), options.mode,
                                              options.workers);
        case Algorithm::sparse:
            return sparse_permanent(a, options.mode, options.workers, options.partition_trials,
                                    options.seed);
        case Algorithm::band:
            return band_permanent(a, band_width(a));
    }
    throw InvalidArgument("unknown algorithm");
}

}  // namespace perm
