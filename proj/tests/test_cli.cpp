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

#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "perm/stats.hpp"

namespace perm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
    json parsed() const { return json::parse(out); }
};

Outcome run(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"permtool"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char *> argv;
    for (const std::string &s : storage) argv.push_back(s.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::string slurp(const fs::path &path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("permtool_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
        unsetenv("PERM_CI");
    }
    void TearDown() override {
        fs::remove_all(dir_);
        unsetenv("PERM_CI");
    }

    std::string write(const std::string &name, const std::string &text) {
        const fs::path path = dir_ / name;
        std::ofstream(path) << text;
        return path.string();
    }

    std::string matrix_file(const std::string &name, std::size_t n, double (*entry)(std::size_t, std::size_t)) {
        std::ostringstream text;
        text << "real " << n << ' ' << n << '\n';
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) text << entry(i, j) << (j + 1 < n ? ' ' : '\n');
        }
        return write(name, text.str());
    }

    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

double ones(std::size_t, std::size_t) { return 1.0; }
double eye(std::size_t i, std::size_t j) { return i == j ? 1.0 : 0.0; }
double tri(std::size_t i, std::size_t j) {
    const std::size_t d = i > j ? i - j : j - i;
    return d > 1 ? 0.0 : 1.0 + 0.1 * static_cast<double>(i) - 0.03 * static_cast<double>(j);
}

TEST_F(CliTest, ComputeOnesWithRyser) {
    const Outcome o = run({"compute", "--matrix", matrix_file("J5.txt", 5, ones), "--algorithm", "ryser"});
    ASSERT_EQ(o.code, 0) << o.err;
    const json j = o.parsed();
    EXPECT_EQ(j["value_re"].get<double>(), 120.0);
    EXPECT_EQ(j["value_im"].get<double>(), 0.0);
    EXPECT_EQ(j["algorithm"], "ryser");
    EXPECT_EQ(j["mode"], "compensated");
    EXPECT_EQ(j["terms_evaluated"], 16);
    EXPECT_GE(j["wall_seconds"].get<double>(), 0.0);
}

TEST_F(CliTest, ComputeIdentityAutoSelectsBand) {
    const Outcome o = run({"compute", "--matrix", matrix_file("I8.txt", 8, eye), "--algorithm", "auto"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.parsed()["value_re"].get<double>(), 1.0);
    EXPECT_EQ(o.parsed()["algorithm"], "band");
}

TEST_F(CliTest, ComputeBandMatchesRyser) {
    const std::string m = matrix_file("tri12.txt", 12, tri);
    const double band = run({"compute", "--matrix", m, "--algorithm", "band"}).parsed()["value_re"];
    const double ryser = run({"compute", "--matrix", m, "--algorithm", "ryser", "--threads", "3",
                              "--mode", "extended"})
                             .parsed()["value_re"];
    EXPECT_LE(std::abs(band - ryser) / std::abs(ryser), 1e-10);
    for (const char *alg : {"sparse", "repeated"}) {
        const double v = run({"compute", "--matrix", m, "--algorithm", alg}).parsed()["value_re"];
        EXPECT_LE(std::abs(v - ryser) / std::abs(ryser), 1e-10) << alg;
    }
}

TEST_F(CliTest, ComputeComplexMatrix) {
    const Outcome o = run({"compute", "--matrix", write("c.txt", "complex 1 1\n0 1\n")});
    ASSERT_EQ(o.code, 0);
    EXPECT_EQ(o.parsed()["value_im"].get<double>(), 1.0);
}

TEST_F(CliTest, ComputeExitCodes) {
    EXPECT_EQ(run({"compute", "--matrix", path("missing.txt")}).code, cli::parse_error);
    EXPECT_EQ(run({"compute", "--matrix", write("bad.txt", "real 2 2\n1 2\n3\n")}).code, cli::parse_error);
    EXPECT_EQ(run({"compute", "--matrix", write("rect.txt", "real 2 3\n1 2 3\n4 5 6\n")}).code,
              cli::parse_error);
    const std::string big = matrix_file("J65.txt", 65, ones);
    EXPECT_EQ(run({"compute", "--matrix", big, "--algorithm", "ryser"}).code, cli::unsupported_order);
    EXPECT_EQ(run({"compute", "--matrix", big}).code, cli::unsupported_order);
    EXPECT_EQ(run({"compute", "--matrix", matrix_file("J11.txt", 11, ones), "--algorithm", "naive"}).code,
              cli::unsupported_order);
    const std::string j3 = matrix_file("J3.txt", 3, ones);
    EXPECT_EQ(run({"compute", "--matrix", j3, "--algorithm", "fast"}).code, cli::invalid_arguments);
    EXPECT_EQ(run({"compute", "--matrix", j3, "--threads", "0"}).code, cli::invalid_arguments);
    EXPECT_EQ(run({"compute", "--matrix", j3, "--mode", "kahan"}).code, cli::invalid_arguments);
    EXPECT_EQ(run({"compute"}).code, cli::invalid_arguments);
    const std::string tri5 = matrix_file("tri5.txt", 5, tri);
    EXPECT_EQ(run({"compute", "--matrix", tri5, "--algorithm", "band"}).code, 0);
    EXPECT_EQ(run({"frobnicate"}).code, cli::invalid_arguments);
    EXPECT_EQ(run({}).code, cli::invalid_arguments);
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({"compute", "--help"}).code, 0);
}

TEST_F(CliTest, SampleIsDeterministic) {
    for (const char *name : {"a.txt", "b.txt"}) {
        const Outcome o = run({"sample", "--ensemble", "gaussian", "--n", "6", "--samples", "1000", "--seed", "7",
                               "--output", path(name), "--threads", "2"});
        ASSERT_EQ(o.code, 0) << o.err;
        EXPECT_EQ(o.parsed()["count"], 1000);
    }
    EXPECT_EQ(slurp(path("a.txt")), slurp(path("b.txt")));
    const Outcome stdout_run = run({"sample", "--ensemble", "gaussian", "--n", "6", "--samples", "1000", "--seed", "7"});
    EXPECT_EQ(stdout_run.out, slurp(path("a.txt")));
}

TEST_F(CliTest, SampleUnitaryMinorRecordsExponent) {
    const Outcome o = run({"sample", "--ensemble", "unitary-minor", "--n", "10", "--exponent", "2.25", "--samples",
                           "4", "--seed", "1", "--output", path("um.txt")});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.parsed()["m"], 178);
    EXPECT_EQ(o.parsed()["a"].get<double>(), 2.25);
    const SampleSet s = read_sample_set(path("um.txt"));
    EXPECT_EQ(s.spec.exponent, 2.25);
    EXPECT_EQ(s.count(), 4u);
}

TEST_F(CliTest, SampleBernoulliPermanentsAreIntegers) {
    ASSERT_EQ(run({"sample", "--ensemble", "bernoulli", "--n", "4", "--samples", "200", "--seed", "3", "--output",
                   path("b.txt")})
                  .code,
              0);
    for (double x : read_sample_set(path("b.txt")).values) {
        const double p = x * std::sqrt(24.0);
        EXPECT_NEAR(p, std::round(p), 1e-9);
    }
}

TEST_F(CliTest, SampleFlagConflicts) {
    EXPECT_EQ(run({"sample", "--ensemble", "gaussian", "--n", "4", "--samples", "3", "--seed", "1", "--exponent", "2"})
                  .code,
              cli::invalid_arguments);
    EXPECT_EQ(run({"sample", "--ensemble", "unitary-minor", "--n", "4", "--samples", "3", "--seed", "1"}).code,
              cli::invalid_arguments);
    EXPECT_EQ(run({"sample", "--ensemble", "wishart", "--n", "4", "--samples", "3", "--seed", "1"}).code,
              cli::invalid_arguments);
    EXPECT_EQ(run({"sample", "--ensemble", "gaussian", "--n", "0", "--samples", "3", "--seed", "1"}).code,
              cli::invalid_arguments);
    EXPECT_EQ(run({"sample", "--ensemble", "gaussian", "--n", "171", "--samples", "0", "--seed", "1"}).code,
              cli::unsupported_order);
}

TEST_F(CliTest, SeedPolicy) {
    const Outcome free_run = run({"sample", "--ensemble", "circular", "--n", "3", "--samples", "2"});
    ASSERT_EQ(free_run.code, 0);
    EXPECT_NE(free_run.out.find(" seed="), std::string::npos);

    setenv("PERM_CI", "1", 1);
    EXPECT_EQ(run({"sample", "--ensemble", "circular", "--n", "3", "--samples", "2"}).code, cli::invalid_arguments);
    EXPECT_EQ(run({"sample", "--ensemble", "circular", "--n", "3", "--samples", "2", "--seed", "4"}).code, 0);
    EXPECT_EQ(run({"bench", "--algorithm", "band", "--sizes", "10"}).code, cli::invalid_arguments);
}

TEST_F(CliTest, AnalyzeConstantSet) {
    std::string text = "# ensemble=gaussian n=3 seed=0 count=5\n";
    for (int i = 0; i < 5; ++i) text += "0.5\n";
    const Outcome o = run({"analyze", "--input", write("c.txt", text), "--seed", "1"});
    ASSERT_EQ(o.code, 0) << o.err;
    const json j = o.parsed();
    ASSERT_EQ(j["moments"].size(), 4u);
    for (int k = 1; k <= 4; ++k) {
        EXPECT_NEAR(j["moments"][k - 1]["value"].get<double>(), std::pow(0.5, k), 1e-15);
        EXPECT_EQ(j["moments"][k - 1]["bootstrap_err"].get<double>(), 0.0);
    }
    EXPECT_EQ(j["F"].back().get<double>(), 1.0);
    EXPECT_TRUE(j["fits"].empty());
}

TEST_F(CliTest, AnalyzeZeroSamplesHasEmptyDistribution) {
    const Outcome o = run({"analyze", "--input", write("z.txt", "# ensemble=gaussian n=3 seed=0 count=2\n0\n0\n"),
                           "--seed", "1"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_TRUE(o.parsed()["grid"].empty());
}

TEST_F(CliTest, AnalyzeGaussianMoments) {
    ASSERT_EQ(run({"sample", "--ensemble", "gaussian", "--n", "6", "--samples", "10000", "--seed", "11", "--output",
                   path("g.txt")})
                  .code,
              0);
    const json j = run({"analyze", "--input", path("g.txt"), "--seed", "2"}).parsed();
    const json &m2 = j["moments"][1];
    const json &m4 = j["moments"][3];
    EXPECT_LE(std::abs(m2["value"].get<double>() - 1.0), 5.0 * m2["bootstrap_err"].get<double>());
    EXPECT_LE(std::abs(m4["value"].get<double>() - 7.0), 5.0 * m4["bootstrap_err"].get<double>());

    // The squared-value distribution is the distribution of X read at sqrt(y).
    const std::vector<double> x = read_sample_set(path("g.txt")).values;
    const json &squared = j["squared"];
    ASSERT_FALSE(squared["grid"].empty());
    for (std::size_t i = 0; i < squared["grid"].size(); i += 7) {
        const double y = squared["grid"][i];
        const auto below = std::count_if(x.begin(), x.end(), [&](double v) { return v * v <= y; });
        EXPECT_NEAR(squared["F"][i].get<double>(), static_cast<double>(below) / static_cast<double>(x.size()),
                    1e-12);
    }
}

TEST_F(CliTest, AnalyzeFitsAcrossOrders) {
    for (const char *n : {"2", "3", "4"}) {
        ASSERT_EQ(run({"sample", "--ensemble", "gaussian", "--n", n, "--samples", "500", "--seed", "5", "--output",
                       path(std::string("g") + n + ".txt")})
                      .code,
                  0);
    }
    const Outcome o = run({"analyze", "--input", path("g2.txt"), "--input", path("g3.txt"), "--input",
                           path("g4.txt"), "--seed", "1", "--fit-degree", "1", "--max-moment", "2"});
    ASSERT_EQ(o.code, 0) << o.err;
    const json j = o.parsed();
    EXPECT_EQ(j["sets"].size(), 3u);
    EXPECT_EQ(j["fits"]["moments"].size(), 2u);
    EXPECT_EQ(j["fits"]["moments"][0]["coefficients"].size(), 2u);
    EXPECT_EQ(run({"analyze", "--input", path("g2.txt"), "--input", path("g3.txt"), "--input", path("g4.txt"),
                   "--seed", "1", "--fit-degree", "2"})
                  .parsed()["fits"]
                  .size(),
              0u);
}

TEST_F(CliTest, AnalyzeExitCodes) {
    EXPECT_EQ(run({"analyze", "--input", write("bad.txt", "# ensemble=gaussian n=3 seed=0 count=2\n0.5\n"),
                   "--seed", "1"})
                  .code,
              cli::parse_error);
    EXPECT_EQ(run({"analyze", "--input", path("missing.txt"), "--seed", "1"}).code, cli::parse_error);
    EXPECT_EQ(run({"analyze", "--input", write("empty.txt", "# ensemble=gaussian n=3 seed=0 count=0\n"), "--seed",
                   "1"})
                  .code,
              cli::invalid_arguments);
    EXPECT_EQ(run({"analyze", "--input", path("x.txt"), "--resamples", "10"}).code, cli::invalid_arguments);
}

TEST_F(CliTest, KsTest) {
    ASSERT_EQ(run({"sample", "--ensemble", "gaussian", "--n", "4", "--samples", "300", "--seed", "1", "--output",
                   path("a.txt")})
                  .code,
              0);
    const json self = run({"kstest", "--a", path("a.txt"), "--b", path("a.txt")}).parsed();
    EXPECT_EQ(self["D"].get<double>(), 0.0);
    EXPECT_FALSE(self["reject"].get<bool>());
    EXPECT_NEAR(self["threshold"].get<double>(), 1.358 * std::sqrt(2.0 / 300.0), 1e-3);
    EXPECT_EQ(run({"kstest", "--a", path("a.txt"), "--b", path("missing.txt")}).code, cli::parse_error);
    EXPECT_EQ(run({"kstest", "--a", path("a.txt"), "--b", path("a.txt"), "--alpha", "2"}).code,
              cli::invalid_arguments);
}

TEST_F(CliTest, KsTestIsDeterministicUnderFixedSeeds) {
    for (const char *name : {"g.txt", "u.txt"}) {
        const bool minor = std::string(name) == "u.txt";
        const Outcome o = minor ? run({"sample", "--ensemble", "unitary-minor", "--n", "8", "--exponent", "3",
                                       "--samples", "300", "--seed", "2", "--output", path(name)})
                                : run({"sample", "--ensemble", "gaussian", "--n", "8", "--samples", "300", "--seed",
                                       "2", "--output", path(name)});
        ASSERT_EQ(o.code, 0) << o.err;
    }
    const std::string first = run({"kstest", "--a", path("g.txt"), "--b", path("u.txt")}).out;
    EXPECT_EQ(first, run({"kstest", "--a", path("g.txt"), "--b", path("u.txt")}).out);
}

TEST_F(CliTest, Bench) {
    const Outcome o = run({"bench", "--algorithm", "ryser", "--n-min", "4", "--n-max", "8", "--reps", "1", "--seed",
                           "1", "--json", "--min-batch", "0.001", "--threads", "1"});
    ASSERT_EQ(o.code, 0) << o.err;
    const json j = o.parsed();
    EXPECT_EQ(j["rows"].size(), 5u);
    EXPECT_EQ(j["rows"][4]["terms_evaluated"], 128);
    EXPECT_TRUE(j["log2_slope"].is_number());

    const Outcome table = run({"bench", "--algorithm", "band", "--sizes", "20,40", "--seed", "1", "--min-batch",
                               "0.001"});
    ASSERT_EQ(table.code, 0);
    EXPECT_NE(table.out.find("median_s"), std::string::npos);

    EXPECT_EQ(run({"bench", "--sizes", "4", "--n-min", "4", "--n-max", "5", "--seed", "1"}).code,
              cli::invalid_arguments);
    EXPECT_EQ(run({"bench", "--seed", "1"}).code, cli::invalid_arguments);
    EXPECT_EQ(run({"bench", "--algorithm", "ryser", "--sizes", "70", "--seed", "1"}).code, cli::unsupported_order);
}

}  // namespace
}  // namespace perm
