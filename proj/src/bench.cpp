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

#include "perm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "perm/ensembles.hpp"
#include "perm/stats.hpp"
#include "perm/structured.hpp"

namespace perm {
namespace {

double real_normal(RngStream &rng) { return gaussian_complex(rng).real() * std::numbers::sqrt2; }

}  // namespace

Matrix bench_matrix(const BenchConfig &config, std::size_t n, RngStream &rng) {
    const auto size = static_cast<Eigen::Index>(n);
    RealMatrix a = RealMatrix::Zero(size, size);
    switch (config.algorithm) {
        case Algorithm::sparse:
            for (Eigen::Index i = 0; i < size; ++i) {
                for (Eigen::Index j = 0; j < size; ++j) {
                    if (i == j || rng.uniform() < config.density) a(i, j) = 1.0;
                }
            }
            break;
        case Algorithm::band: {
            const auto k = static_cast<Eigen::Index>(config.bandwidth);
            for (Eigen::Index i = 0; i < size; ++i) {
                for (Eigen::Index j = std::max<Eigen::Index>(0, i - k);
                     j <= std::min<Eigen::Index>(size - 1, i + k); ++j) {
                    a(i, j) = real_normal(rng);
                }
            }
            break;
        }
        case Algorithm::repeated: {
            RealMatrix distinct(size, 4);
            for (Eigen::Index i = 0; i < distinct.size(); ++i) distinct.data()[i] = real_normal(rng);
            for (Eigen::Index j = 0; j < size; ++j) a.col(j) = distinct.col(j % 4);
            break;
        }
        case Algorithm::naive:
        case Algorithm::ryser:
            for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = real_normal(rng);
            break;
    }
    return Matrix::from_real(a);
}

BenchReport run_bench(const BenchConfig &config) {
    using Clock = std::chrono::steady_clock;
    BenchReport report;
    report.algorithm = config.algorithm;
    PermanentOptions options;
    options.workers = config.workers;
    options.mode = config.mode;
    options.seed = config.seed;
    const std::size_t reps = std::max<std::size_t>(1, config.repetitions);

    for (std::size_t n : config.orders) {
        RngStream rng(config.seed, n);
        const Matrix a = bench_matrix(config, n, rng);
        std::vector<double> times;
        std::uint64_t terms = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            std::size_t runs = 0;
            const auto start = Clock::now();
            double elapsed = 0.0;
            do {
                terms = compute_permanent(a, config.algorithm, options).terms_evaluated;
                ++runs;
                elapsed = std::chrono::duration<double>(Clock::now() - start).count();
            } while (elapsed < config.min_batch_seconds);
            times.push_back(elapsed / static_cast<double>(runs));
        }
        std::sort(times.begin(), times.end());
        const double median = times.size() % 2 == 1
                                  ? times[times.size() / 2]
                                  : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
        report.rows.push_back({n, median, reps, terms});
    }
    if (config.algorithm == Algorithm::ryser && report.rows.size() >= 3) {
        report.log2_slope = log2_time_slope(report.rows);
    }
    return report;
}

double log2_time_slope(const std::vector<BenchRow> &rows) {
    std::vector<FitPoint> points;
    points.reserve(rows.size());
    for (const BenchRow &row : rows) {
        points.push_back({static_cast<double>(row.n), std::log2(row.median_seconds)});
    }
    return fit_polynomial(points, 1, false).coefficients[1];
}

}  // namespace perm
