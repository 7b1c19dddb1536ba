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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "perm/bench.hpp"
#include "perm/errors.hpp"
#include "perm/matrix.hpp"
#include "perm/stats.hpp"
#include "perm/structured.hpp"

namespace perm::cli {
namespace {

using nlohmann::json;

std::size_t hardware_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Randomized commands take --seed. Without it a time-derived seed is used,
/// unless PERM_CI=1 demands reproducibility.
std::uint64_t resolve_seed(const std::optional<std::uint64_t> &seed, const std::string &command) {
    if (seed) return *seed;
    const char *ci = std::getenv("PERM_CI");
    if (ci != nullptr && std::string(ci) == "1") {
        throw InvalidArgument(command + " needs --seed when PERM_CI=1");
    }
    return static_cast<std::uint64_t>(
        std::chrono::system_clock::now().time_since_epoch().count());
}

Algorithm parse_algorithm(const std::string &name) {
    for (Algorithm a : {Algorithm::naive, Algorithm::ryser, Algorithm::repeated, Algorithm::sparse,
                        Algorithm::band}) {
        if (name == to_string(a)) return a;
    }
    throw InvalidArgument("unknown algorithm '" + name + "'");
}

json moments_json(std::span<const double> values, int max_order, std::size_t resamples,
                  const RngStream &rng) {
    json list = json::array();
    for (int k = 1; k <= max_order; ++k) {
        const MomentEstimate m = moment(values, k, resamples, rng.derive(static_cast<std::uint64_t>(k)));
        list.push_back({{"order", m.order}, {"value", m.value}, {"bootstrap_err", m.bootstrap_err}});
    }
    return list;
}

void put_distribution(json &target, std::span<const double> values, int per_decade) {
    EmpiricalDistribution d;
    if (std::any_of(values.begin(), values.end(), [](double x) { return x > 0.0; })) {
        d = empirical_distribution(values, per_decade);
    }
    target["grid"] = d.grid;
    target["F"] = d.F;
    target["F_err"] = d.F_err;
    target["f"] = d.f;
    target["f_err"] = d.f_err;
}

json spec_json(const EnsembleSpec &spec) {
    json j = {{"ensemble", std::string(to_string(spec.kind))}, {"n", spec.n}, {"seed", spec.seed}};
    if (spec.exponent) {
        j["a"] = *spec.exponent;
        j["m"] = minor_dimension(spec.n, *spec.exponent);
    }
    return j;
}

// ---------------------------------------------------------------------------

struct ComputeArgs {
    std::string matrix;
    std::string algorithm = "auto";
    std::string mode = "compensated";
    std::size_t threads = hardware_threads();
    std::uint64_t seed = 0;
    std::size_t trials = default_partition_trials;
};

int cmd_compute(const ComputeArgs &args, std::ostream &out) {
    const Matrix a = read_matrix(args.matrix);
    const Algorithm algorithm =
        args.algorithm == "auto" ? select_algorithm(a) : parse_algorithm(args.algorithm);
    PermanentOptions options;
    options.workers = args.threads;
    options.mode = parse_accumulation_mode(args.mode);
    options.partition_trials = args.trials;
    options.seed = args.seed;
    const PermanentResult r = compute_permanent(a, algorithm, options);
    const json j = {
        {"value_re", r.value.real()},
        {"value_im", r.value.imag()},
        {"algorithm", std::string(to_string(r.algorithm))},
        {"mode", std::string(to_string(r.mode))},
        {"terms_evaluated", r.terms_evaluated},
        {"wall_seconds", r.wall_seconds},
        {"n", a.order()},
        {"threads", args.threads},
    };
    out << j.dump(2) << '\n';
    return ok;
}

// ---------------------------------------------------------------------------

struct SampleArgs {
    std::string ensemble;
    std::size_t n = 0;
    std::optional<double> exponent;
    std::size_t samples = 0;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::size_t threads = hardware_threads();
};

int cmd_sample(const SampleArgs &args, std::ostream &out) {
    EnsembleSpec spec;
    spec.kind = parse_ensemble_kind(args.ensemble);
    spec.n = args.n;
    spec.exponent = args.exponent;
    spec.seed = resolve_seed(args.seed, "sample");
    spec.validate();

    const auto start = std::chrono::steady_clock::now();
    const SampleSet samples = generate_samples(spec, args.samples, args.threads);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (args.output.empty() || args.output == "-") {
        write_sample_set(out, samples);
        return ok;
    }
    write_sample_set(args.output, samples);
    json j = spec_json(spec);
    j["count"] = samples.count();
    j["output"] = args.output;
    j["wall_seconds"] = seconds;
    out << j.dump(2) << '\n';
    return ok;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::vector<std::string> inputs;
    int per_decade = default_points_per_decade;
    std::size_t resamples = default_bootstrap_resamples;
    std::optional<std::uint64_t> seed;
    int fit_degree = 1;
    int max_moment = 4;
};

int cmd_analyze(const AnalyzeArgs &args, std::ostream &out) {
    const std::uint64_t seed = resolve_seed(args.seed, "analyze");
    std::vector<SampleSet> sets;
    for (const std::string &path : args.inputs) sets.push_back(read_sample_set(path));
    for (std::size_t s = 0; s < sets.size(); ++s) {
        if (sets[s].values.empty()) throw InvalidArgument("sample set '" + args.inputs[s] + "' is empty");
    }

    json j;
    j["inputs"] = args.inputs;
    j["seed"] = seed;
    j["resamples"] = args.resamples;
    j["per_decade"] = args.per_decade;

    json set_list = json::array();
    std::vector<json> set_moments;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        json moments = moments_json(sets[s].values, args.max_moment, args.resamples, RngStream(seed, s));
        json entry = spec_json(sets[s].spec);
        entry["input"] = args.inputs[s];
        entry["count"] = sets[s].count();
        entry["moments"] = moments;
        set_list.push_back(entry);
        set_moments.push_back(std::move(moments));
    }

    const SampleSet &first = sets.front();
    j["moments"] = set_moments.front();
    put_distribution(j, first.values, args.per_decade);
    std::vector<double> squared(first.values.size());
    std::transform(first.values.begin(), first.values.end(), squared.begin(), [](double x) { return x * x; });
    json squared_json = json::object();
    put_distribution(squared_json, squared, args.per_decade);
    j["squared"] = squared_json;
    j["sets"] = set_list;

    // Finite-size fits of each moment against 1/n when enough orders are present.
    json fits = json::object();
    std::set<std::size_t> orders;
    for (const SampleSet &s : sets) orders.insert(s.spec.n);
    if (args.fit_degree >= 0 && orders.size() >= static_cast<std::size_t>(args.fit_degree) + 2) {
        fits["x"] = "1/n";
        fits["degree"] = args.fit_degree;
        json per_order = json::array();
        for (int k = 1; k <= args.max_moment; ++k) {
            std::vector<FitPoint> points;
            for (std::size_t s = 0; s < sets.size(); ++s) {
                points.push_back({1.0 / static_cast<double>(sets[s].spec.n),
                                  set_moments[s][static_cast<std::size_t>(k - 1)]["value"].get<double>()});
            }
            const FitResult fit = fit_polynomial(points, args.fit_degree);
            per_order.push_back(
                {{"order", k}, {"coefficients", fit.coefficients}, {"deletion_errors", fit.deletion_errors}});
        }
        fits["moments"] = per_order;
    }
    j["fits"] = fits;
    out << j.dump(2) << '\n';
    return ok;
}

// ---------------------------------------------------------------------------

struct KsArgs {
    std::string a;
    std::string b;
    double alpha = 0.05;
};

int cmd_kstest(const KsArgs &args, std::ostream &out) {
    const SampleSet a = read_sample_set(args.a);
    const SampleSet b = read_sample_set(args.b);
    const KsResult r = ks_test(a.values, b.values, args.alpha);
    const json j = {
        {"D", r.D},           {"threshold", r.threshold}, {"alpha", r.alpha},
        {"reject", r.reject}, {"count_a", a.count()},     {"count_b", b.count()},
    };
    out << j.dump(2) << '\n';
    return ok;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string algorithm = "ryser";
    std::vector<std::size_t> sizes;
    std::size_t n_min = 0;
    std::size_t n_max = 0;
    std::size_t n_step = 1;
    std::size_t reps = 3;
    double density = 0.01;
    std::size_t bandwidth = 2;
    std::optional<std::uint64_t> seed;
    std::size_t threads = hardware_threads();
    double min_batch = 0.02;
    bool json_output = false;
};

int cmd_bench(const BenchArgs &args, std::ostream &out) {
    BenchConfig config;
    config.algorithm = parse_algorithm(args.algorithm);
    if (!args.sizes.empty()) {
        config.orders = args.sizes;
    } else {
        if (args.n_min == 0 || args.n_max < args.n_min) {
            throw InvalidArgument("bench needs --sizes or 1 <= --n-min <= --n-max");
        }
        for (std::size_t n = args.n_min; n <= args.n_max; n += args.n_step) config.orders.push_back(n);
    }
    config.repetitions = args.reps;
    config.density = args.density;
    config.bandwidth = args.bandwidth;
    config.workers = args.threads;
    config.seed = resolve_seed(args.seed, "bench");
    config.min_batch_seconds = args.min_batch;
    const BenchReport report = run_bench(config);

    if (args.json_output) {
        json rows = json::array();
        for (const BenchRow &row : report.rows) {
            rows.push_back({{"n", row.n},
                            {"median_seconds", row.median_seconds},
                            {"repetitions", row.repetitions},
                            {"terms_evaluated", row.terms_evaluated}});
        }
        json j = {{"algorithm", std::string(to_string(report.algorithm))},
                  {"threads", config.workers},
                  {"seed", config.seed},
                  {"rows", rows}};
        j["log2_slope"] = report.log2_slope ? json(*report.log2_slope) : json(nullptr);
        if (config.algorithm == Algorithm::sparse) j["density"] = config.density;
        if (config.algorithm == Algorithm::band) j["bandwidth"] = config.bandwidth;
        out << j.dump(2) << '\n';
        return ok;
    }
    out << "# algorithm=" << to_string(report.algorithm) << " threads=" << config.workers
        << " seed=" << config.seed << '\n';
    out << std::setw(6) << "n" << std::setw(16) << "median_s" << std::setw(22) << "terms" << '\n';
    for (const BenchRow &row : report.rows) {
        out << std::setw(6) << row.n << std::setw(16) << std::setprecision(6) << row.median_seconds
            << std::setw(22) << row.terms_evaluated << '\n';
    }
    if (report.log2_slope) out << "log2 slope: " << std::setprecision(4) << *report.log2_slope << '\n';
    return ok;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Exact matrix permanents and permanent statistics of random matrices", "permtool"};
    app.require_subcommand(1);

    const std::vector<std::string> algorithms{"auto", "ryser", "repeated", "sparse", "band", "naive"};
    const std::vector<std::string> modes{"plain", "compensated", "extended"};

    ComputeArgs compute_args;
    CLI::App *compute = app.add_subcommand("compute", "Permanent of a matrix file");
    compute->add_option("--matrix", compute_args.matrix, "Matrix file")->required();
    compute->add_option("--algorithm", compute_args.algorithm, "Algorithm")
        ->check(CLI::IsMember(algorithms))
        ->capture_default_str();
    compute->add_option("--mode", compute_args.mode, "Accumulation mode")
        ->check(CLI::IsMember(modes))
        ->capture_default_str();
    compute->add_option("--threads", compute_args.threads, "Worker count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    compute->add_option("--seed", compute_args.seed, "Seed for sparse partition tie-breaks")
        ->capture_default_str();
    compute->add_option("--trials", compute_args.trials, "Greedy partition trials")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    SampleArgs sample_args;
    CLI::App *sample = app.add_subcommand("sample", "Normalized permanents of random matrices");
    sample->add_option("--ensemble", sample_args.ensemble, "gaussian, circular, bernoulli or unitary-minor")
        ->required()
        ->check(CLI::IsMember({"gaussian", "circular", "bernoulli", "unitary-minor", "unitary_minor"}));
    sample->add_option("--n", sample_args.n, "Matrix order")->required()->check(CLI::PositiveNumber);
    sample->add_option("--exponent", sample_args.exponent, "Exponent a of m = round(n^a), unitary-minor only");
    sample->add_option("--samples", sample_args.samples, "Number of samples")->required();
    sample->add_option("--seed", sample_args.seed, "Seed");
    sample->add_option("--output", sample_args.output, "Output file (default stdout)");
    sample->add_option("--threads", sample_args.threads, "Worker count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    AnalyzeArgs analyze_args;
    CLI::App *analyze = app.add_subcommand("analyze", "Moments, distribution and fits of sample sets");
    analyze->add_option("--input", analyze_args.inputs, "Sample file; repeat for finite-size fits")->required();
    analyze->add_option("--per-decade", analyze_args.per_decade, "Grid points per decade")
        ->check(CLI::Range(4, 1000))
        ->capture_default_str();
    analyze->add_option("--resamples", analyze_args.resamples, "Bootstrap resamples")
        ->check(CLI::Range(std::size_t{100}, std::size_t{1000000}))
        ->capture_default_str();
    analyze->add_option("--seed", analyze_args.seed, "Bootstrap seed");
    analyze->add_option("--fit-degree", analyze_args.fit_degree, "Degree of the fit in 1/n")
        ->check(CLI::Range(0, 8))
        ->capture_default_str();
    analyze->add_option("--max-moment", analyze_args.max_moment, "Highest moment order")
        ->check(CLI::Range(1, 16))
        ->capture_default_str();

    KsArgs ks_args;
    CLI::App *kstest = app.add_subcommand("kstest", "Two-sample Kolmogorov-Smirnov test");
    kstest->add_option("--a", ks_args.a, "First sample file")->required();
    kstest->add_option("--b", ks_args.b, "Second sample file")->required();
    kstest->add_option("--alpha", ks_args.alpha, "Significance level")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    BenchArgs bench_args;
    CLI::App *bench = app.add_subcommand("bench", "Timing of a permanent algorithm over matrix orders");
    bench->add_option("--algorithm", bench_args.algorithm, "Algorithm")
        ->check(CLI::IsMember({"ryser", "repeated", "sparse", "band", "naive"}))
        ->capture_default_str();
    CLI::Option *sizes = bench->add_option("--sizes", bench_args.sizes, "Orders, comma separated")->delimiter(',');
    CLI::Option *n_min = bench->add_option("--n-min", bench_args.n_min, "Smallest order");
    CLI::Option *n_max = bench->add_option("--n-max", bench_args.n_max, "Largest order");
    bench->add_option("--n-step", bench_args.n_step, "Order increment")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sizes->excludes(n_min)->excludes(n_max);
    n_min->needs(n_max);
    bench->add_option("--reps", bench_args.reps, "Repetitions per order")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench->add_option("--density", bench_args.density, "Off-diagonal density for sparse matrices")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    bench->add_option("--bandwidth", bench_args.bandwidth, "Bandwidth for band matrices")->capture_default_str();
    bench->add_option("--seed", bench_args.seed, "Seed");
    bench->add_option("--threads", bench_args.threads, "Worker count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench->add_option("--min-batch", bench_args.min_batch, "Minimum seconds per timed repetition")
        ->capture_default_str();
    bench->add_flag("--json", bench_args.json_output, "Emit JSON instead of a table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : invalid_arguments;
    }

    try {
        if (*compute) return cmd_compute(compute_args, out);
        if (*sample) return cmd_sample(sample_args, out);
        if (*analyze) return cmd_analyze(analyze_args, out);
        if (*kstest) return cmd_kstest(ks_args, out);
        if (*bench) return cmd_bench(bench_args, out);
    } catch (const ParseError &e) {
        err << "error: " << e.what() << '\n';
        return parse_error;
    } catch (const DimensionError &e) {
        err << "error: " << e.what() << '\n';
        return parse_error;
    } catch (const OrderTooLarge &e) {
        err << "error: " << e.what() << '\n';
        return unsupported_order;
    } catch (const InvalidArgument &e) {
        err << "error: " << e.what() << '\n';
        return invalid_arguments;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
    return failure;
}

}  // namespace perm::cli
