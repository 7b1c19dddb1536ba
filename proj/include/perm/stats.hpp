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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "perm/ensembles.hpp"
#include "perm/matrix.hpp"
#include "perm/rng.hpp"

namespace perm {

/// Normalized permanent moduli X = |per(A)| / sqrt(n!) for one ensemble.
struct SampleSet {
    EnsembleSpec spec;
    std::vector<double> values;

    std::size_t count() const noexcept { return values.size(); }
};

/// Largest order whose factorial is a finite double.
inline constexpr std::size_t max_normalized_order = 170;

/// log(n!) summed term by term.
double log_factorial(std::size_t n);

/// X_i = |p_i| / sqrt(n!) with n! handled in log space.
SampleSet normalized_samples(std::span<const Complex> permanents, const EnsembleSpec &spec);

/// Draws `count` matrices from `spec` and normalizes their dense permanents.
/// Samples are split across `threads` workers; the output does not depend on
/// the thread count.
SampleSet generate_samples(const EnsembleSpec &spec, std::size_t count, std::size_t threads = 1);

/// Header `# ensemble=<kind> n=<n> [a=<a>] seed=<seed> count=<m>`, then one
/// value per line with 17 significant digits.
void write_sample_set(std::ostream &out, const SampleSet &samples);
void write_sample_set(const std::filesystem::path &path, const SampleSet &samples);
SampleSet parse_sample_set(std::istream &in);
SampleSet read_sample_set(const std::filesystem::path &path);

// ---------------------------------------------------------------------------

struct MomentEstimate {
    int order = 1;
    double value = 0.0;
    double bootstrap_err = 0.0;
};

inline constexpr std::size_t default_bootstrap_resamples = 200;

/// Sample mean of X^k with a bootstrap standard error. Resample r draws from
/// rng.derive(r), so the estimate is reproducible.
MomentEstimate moment(std::span<const double> values, int k, std::size_t resamples,
                      const RngStream &rng);

// ---------------------------------------------------------------------------

/// Empirical distribution on a geometric grid x_j = 10^(j / per_decade).
struct EmpiricalDistribution {
    std::vector<double> grid;
    std::vector<double> F;
    std::vector<double> F_err;
    std::vector<double> f;
    std::vector<double> f_err;
};

inline constexpr int default_points_per_decade = 16;

/// F(x) = fraction of samples <= x on every grid point between the smallest
/// positive and the largest sample, with error sqrt(F(1-F)/m). The density
/// is the central difference quotient of F (one-sided at the ends) with
/// independent-error propagation.
EmpiricalDistribution empirical_distribution(std::span<const double> values,
                                             int per_decade = default_points_per_decade);

// ---------------------------------------------------------------------------

/// Two-sample Kolmogorov-Smirnov distance sup_x |F(x) - G(x)|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Asymptotic rejection threshold sqrt(-ln(alpha/2)/2) * sqrt((m1+m2)/(m1 m2)).
double ks_threshold(double alpha, std::size_t m1, std::size_t m2);

struct KsResult {
    double D = 0.0;
    double threshold = 0.0;
    double alpha = 0.05;
    bool reject = false;
};

KsResult ks_test(std::span<const double> a, std::span<const double> b, double alpha);

// ---------------------------------------------------------------------------

struct FitPoint {
    double x = 0.0;
    double y = 0.0;
};

struct FitResult {
    std::vector<double> coefficients;     // c_0 + c_1 x + ... + c_p x^p
    std::vector<double> deletion_errors;  // max |c_i - c_i(without point k)|, or empty

    double operator()(double x) const;
};

/// Least-squares polynomial of the given degree. With `deletions`, every
/// point is left out in turn and the largest coefficient shift is reported.
FitResult fit_polynomial(std::span<const FitPoint> points, int degree, bool deletions = true);

}  // namespace perm
