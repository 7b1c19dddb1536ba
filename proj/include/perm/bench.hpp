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
#include <vector>

#include "perm/dense.hpp"
#include "perm/matrix.hpp"
#include "perm/rng.hpp"

namespace perm {

struct BenchConfig {
    Algorithm algorithm = Algorithm::ryser;
    std::vector<std::size_t> orders;
    std::size_t repetitions = 3;
    /// Off-diagonal fill probability for sparse test matrices.
    double density = 0.01;
    /// Bandwidth for band test matrices.
    std::size_t bandwidth = 2;
    std::size_t workers = 1;
    AccumulationMode mode = AccumulationMode::compensated;
    std::uint64_t seed = 0;
    /// A repetition re-runs the computation until at least this much time
    /// has passed and reports the mean, so very fast cases are still timed.
    double min_batch_seconds = 0.02;
};

struct BenchRow {
    std::size_t n = 0;
    double median_seconds = 0.0;
    std::size_t repetitions = 0;
    std::uint64_t terms_evaluated = 0;
};

struct BenchReport {
    Algorithm algorithm = Algorithm::ryser;
    std::vector<BenchRow> rows;
    /// Least-squares slope of log2(median seconds) against n; dense Ryser only.
    std::optional<double> log2_slope;
};

/// Test matrix for timing `algorithm` at order n:
///   ryser, repeated, naive  real Gaussian entries (repeated: 4 distinct columns)
///   sparse                  identity plus off-diagonal ones with probability `density`
///   band                    real Gaussian entries inside `bandwidth`
Matrix bench_matrix(const BenchConfig &config, std::size_t n, RngStream &rng);

BenchReport run_bench(const BenchConfig &config);

/// Slope of the least-squares line through (n, log2 t).
double log2_time_slope(const std::vector<BenchRow> &rows);

}  // namespace perm
