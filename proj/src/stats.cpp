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

#include "perm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <Eigen/QR>

#include "perm/accumulate.hpp"
#include "perm/dense.hpp"
#include "perm/errors.hpp"
#include "text_util.hpp"

namespace perm {

double log_factorial(std::size_t n) {
    KahanAccumulator acc;
    for (std::size_t k = 2; k <= n; ++k) acc.add(std::log(static_cast<double>(k)));
    return acc.value();
}

SampleSet normalized_samples(std::span<const Complex> permanents, const EnsembleSpec &spec) {
    if (spec.n > max_normalized_order) {
        throw OrderTooLarge("n! overflows a double for n > " + std::to_string(max_normalized_order));
    }
    const double scale = std::exp(-0.5 * log_factorial(spec.n));
    SampleSet samples;
    samples.spec = spec;
    samples.values.reserve(permanents.size());
    for (const Complex &p : permanents) {
        const double x = std::abs(p) * scale;
        if (!std::isfinite(x)) throw InvalidArgument("permanent value is not finite");
        samples.values.push_back(x);
    }
    return samples;
}

SampleSet generate_samples(const EnsembleSpec &spec, std::size_t count, std::size_t threads) {
    spec.validate();
    if (threads == 0) threads = 1;
    std::vector<Complex> permanents(count);
    const std::size_t blocks = std::max<std::size_t>(1, std::min(threads, count));
    detail::run_partitions(blocks, [&](std::size_t b) {
        const PartitionRange range = distribute(count, blocks, b);
        for (std::uint64_t i = range.start; i < range.start + range.length; ++i) {
            permanents[i] = permanent(sample_matrix(spec, i), 1, AccumulationMode::compensated).value;
        }
    });
    return normalized_samples(permanents, spec);
}

// ---------------------------------------------------------------------------
// Serialization

void write_sample_set(std::ostream &out, const SampleSet &samples) {
    const EnsembleSpec &spec = samples.spec;
    out << "# ensemble=" << to_string(spec.kind) << " n=" << spec.n;
    if (spec.exponent) out << " a=" << detail::format_double(*spec.exponent);
    out << " seed=" << spec.seed << " count=" << samples.count() << '\n';
    for (double x : samples.values) out << detail::format_double17(x) << '\n';
}

void write_sample_set(const std::filesystem::path &path, const SampleSet &samples) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write sample file '" + path.string() + "'");
    write_sample_set(out, samples);
}

SampleSet parse_sample_set(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing sample-set header");
    const auto tokens = detail::split_whitespace(line);
    if (tokens.empty() || tokens.front() != "#") {
        throw ParseError("sample-set header must start with '# '");
    }
    SampleSet samples;
    bool have_kind = false;
    bool have_n = false;
    bool have_seed = false;
    bool have_count = false;
    std::size_t count = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
        const std::string_view token = tokens[t];
        const auto eq = token.find('=');
        if (eq == std::string_view::npos) throw ParseError("malformed header field '" + std::string(token) + "'");
        const std::string_view key = token.substr(0, eq);
        const std::string_view value = token.substr(eq + 1);
        bool ok = true;
        if (key == "ensemble") {
            try {
                samples.spec.kind = parse_ensemble_kind(value);
            } catch (const InvalidArgument &e) {
                throw ParseError(e.what());
            }
            have_kind = true;
        } else if (key == "n") {
            ok = detail::parse_unsigned(value, samples.spec.n);
            have_n = true;
        } else if (key == "a") {
            double a = 0.0;
            ok = detail::parse_double(value, a);
            samples.spec.exponent = a;
        } else if (key == "seed") {
            ok = detail::parse_unsigned(value, samples.spec.seed);
            have_seed = true;
        } else if (key == "count") {
            ok = detail::parse_unsigned(value, count);
            have_count = true;
        } else {
            throw ParseError("unknown header field '" + std::string(key) + "'");
        }
        if (!ok) throw ParseError("malformed value for header field '" + std::string(key) + "'");
    }
    if (!have_kind || !have_n || !have_seed || !have_count) {
        throw ParseError("sample-set header needs ensemble, n, seed and count");
    }
    try {
        samples.spec.validate();
    } catch (const InvalidArgument &e) {
        throw ParseError(std::string("inconsistent sample-set header: ") + e.what());
    }

    samples.values.reserve(std::min<std::size_t>(count, std::size_t{1} << 20));
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        const auto fields = detail::split_whitespace(line);
        if (fields.empty()) continue;
        double x = 0.0;
        if (fields.size() != 1 || !detail::parse_double(fields.front(), x)) {
            throw ParseError("line " + std::to_string(line_number) + ": malformed sample value");
        }
        if (!std::isfinite(x) || x < 0.0) {
            throw ParseError("line " + std::to_string(line_number) +
                             ": sample values must be finite and non-negative");
        }
        samples.values.push_back(x);
    }
    if (samples.values.size() != count) {
        throw ParseError("header declares " + std::to_string(count) + " samples, found " +
                         std::to_string(samples.values.size()));
    }
    return samples;
}

SampleSet read_sample_set(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sample file '" + path.string() + "'");
    return parse_sample_set(in);
}

// ---------------------------------------------------------------------------
// Moments

namespace {

double power_mean(std::span<const double> values, int k) {
    KahanAccumulator acc;
    for (double x : values) acc.add(std::pow(x, k));
    return acc.value() / static_cast<double>(values.size());
}

}  // namespace

MomentEstimate moment(std::span<const double> values, int k, std::size_t resamples,
                      const RngStream &rng) {
    if (values.empty()) throw InvalidArgument("moment of an empty sample set");
    if (k < 1) throw InvalidArgument("moment order must be at least 1");
    if (resamples < 100) throw InvalidArgument("bootstrap needs at least 100 resamples");

    MomentEstimate estimate;
    estimate.order = k;
    estimate.value = power_mean(values, k);

    const std::size_t m = values.size();
    std::vector<double> powers(m);
    for (std::size_t i = 0; i < m; ++i) powers[i] = std::pow(values[i], k);

    std::vector<double> replicas(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        RngStream stream = rng.derive(r);
        KahanAccumulator acc;
        for (std::size_t i = 0; i < m; ++i) acc.add(powers[stream.below(m)]);
        replicas[r] = acc.value() / static_cast<double>(m);
    }
    const double mean = kahan_sum(replicas) / static_cast<double>(resamples);
    KahanAccumulator spread;
    for (double v : replicas) spread.add((v - mean) * (v - mean));
    estimate.bootstrap_err = std::sqrt(spread.value() / static_cast<double>(resamples - 1));
    return estimate;
}

// ---------------------------------------------------------------------------
// Empirical distribution

EmpiricalDistribution empirical_distribution(std::span<const double> values, int per_decade) {
    if (per_decade < 4) throw InvalidArgument("need at least 4 grid points per decade");
    if (values.empty()) throw InvalidArgument("empirical distribution of an empty sample set");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0.0) throw InvalidArgument("samples must be non-negative");
    const auto first_positive = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
    if (first_positive == sorted.end()) throw InvalidArgument("all samples are zero");

    const double pd = per_decade;
    auto grid_point = [pd](long j) { return std::pow(10.0, static_cast<double>(j) / pd); };
    long j_lo = static_cast<long>(std::floor(pd * std::log10(*first_positive)));
    long j_hi = static_cast<long>(std::ceil(pd * std::log10(sorted.back())));
    while (grid_point(j_lo) > *first_positive) --j_lo;
    while (grid_point(j_hi) < sorted.back()) ++j_hi;

    const double m = static_cast<double>(sorted.size());
    EmpiricalDistribution d;
    for (long j = j_lo; j <= j_hi; ++j) {
        const double x = grid_point(j);
        const auto below = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
        const double F = static_cast<double>(below) / m;
        d.grid.push_back(x);
        d.F.push_back(F);
        d.F_err.push_back(std::sqrt(F * (1.0 - F)) / std::sqrt(m));
    }

    const std::size_t points = d.grid.size();
    d.f.assign(points, 0.0);
    d.f_err.assign(points, 0.0);
    if (points < 2) return d;
    for (std::size_t i = 0; i < points; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == points ? i : i + 1;
        const double dx = d.grid[hi] - d.grid[lo];
        d.f[i] = (d.F[hi] - d.F[lo]) / dx;
        d.f_err[i] = std::hypot(d.F_err[hi], d.F_err[lo]) / dx;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("KS statistic needs two non-empty samples");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double mx = static_cast<double>(x.size());
    const double my = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    // Both step functions only jump at sample values; after consuming every
    // sample equal to the current value, the gap is the right limit there.
    while (i < x.size() || j < y.size()) {
        double v;
        if (j == y.size() || (i < x.size() && x[i] <= y[j])) {
            v = x[i];
        } else {
            v = y[j];
        }
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / mx - static_cast<double>(j) / my));
    }
    return d;
}

double ks_threshold(double alpha, std::size_t m1, std::size_t m2) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (m1 == 0 || m2 == 0) throw InvalidArgument("sample counts must be positive");
    const double a = static_cast<double>(m1);
    const double b = static_cast<double>(m2);
    return std::sqrt(-std::log(alpha / 2.0) / 2.0) * std::sqrt((a + b) / (a * b));
}

KsResult ks_test(std::span<const double> a, std::span<const double> b, double alpha) {
    KsResult result;
    result.alpha = alpha;
    result.threshold = ks_threshold(alpha, a.size(), b.size());
    result.D = ks_statistic(a, b);
    result.reject = result.D > result.threshold;
    return result;
}

// ---------------------------------------------------------------------------
// Polynomial fits

double FitResult::operator()(double x) const {
    double y = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) y = y * x + *it;
    return y;
}

namespace {

std::vector<double> least_squares(std::span<const FitPoint> points, int degree,
                                  std::size_t skip) {
    const auto cols = static_cast<Eigen::Index>(degree + 1);
    const auto rows = static_cast<Eigen::Index>(points.size() - (skip < points.size() ? 1 : 0));
    Eigen::MatrixXd vandermonde(rows, cols);
    Eigen::VectorXd rhs(rows);
    Eigen::Index r = 0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (k == skip) continue;
        double power = 1.0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            vandermonde(r, c) = power;
            power *= points[k].x;
        }
        rhs(r) = points[k].y;
        ++r;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vandermonde);
    if (qr.rank() < cols) throw InvalidArgument("polynomial fit is degenerate (repeated x values)");
    const Eigen::VectorXd c = qr.solve(rhs);
    return {c.data(), c.data() + c.size()};
}

}  // namespace

FitResult fit_polynomial(std::span<const FitPoint> points, int degree, bool deletions) {
    if (degree < 0) throw InvalidArgument("polynomial degree must be non-negative");
    if (points.size() < static_cast<std::size_t>(degree) + 2) {
        throw InvalidArgument("polynomial fit needs at least degree + 2 points");
    }
    FitResult fit;
    fit.coefficients = least_squares(points, degree, points.size());
    if (deletions) {
        fit.deletion_errors.assign(fit.coefficients.size(), 0.0);
        for (std::size_t k = 0; k < points.size(); ++k) {
            const std::vector<double> reduced = least_squares(points, degree, k);
            for (std::size_t c = 0; c < reduced.size(); ++c) {
                fit.deletion_errors[c] =
                    std::max(fit.deletion_errors[c], std::abs(reduced[c] - fit.coefficients[c]));
            }
        }
    }
    return fit;
}

}  // namespace perm
