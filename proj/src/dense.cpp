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

#include "perm/dense.hpp"

#include <chrono>

namespace perm {

std::string_view to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::naive:
            return "naive";
        case Algorithm::ryser:
            return "ryser";
        case Algorithm::repeated:
            return "repeated";
        case Algorithm::sparse:
            return "sparse";
        case Algorithm::band:
            return "band";
    }
    return "unknown";
}

PartitionRange distribute(std::uint64_t total, std::uint64_t workers, std::uint64_t index) {
    if (workers == 0) throw InvalidArgument("worker count must be at least 1");
    if (index >= workers) {
        throw InvalidArgument("worker index " + std::to_string(index) + " out of range for " +
                              std::to_string(workers) + " workers");
    }
    const std::uint64_t q = total / workers;
    const std::uint64_t r = total % workers;
    return {index * q + std::min(index, r), q + (index < r ? 1U : 0U)};
}

void check_enumerable_order(std::size_t n) {
    if (n == 0) throw DimensionError("matrix order must be at least 1");
    if (n > max_enumerated_order) {
        throw OrderTooLarge("order " + std::to_string(n) + " exceeds the supported maximum of " +
                            std::to_string(max_enumerated_order));
    }
}

Complex naive_permanent(const Matrix &a) {
    return visit_scalar(a, [](const auto &m) { return Complex(naive_permanent(m)); });
}

Complex subpermanent(const Matrix &a, std::uint64_t workers, std::uint64_t index,
                     AccumulationMode mode) {
    return visit_scalar(a, [&](const auto &m) { return Complex(subpermanent(m, workers, index, mode)); });
}

PermanentResult permanent(const Matrix &a, std::size_t workers, AccumulationMode mode) {
    check_enumerable_order(a.order());
    const auto start = std::chrono::steady_clock::now();
    const Complex value =
        visit_scalar(a, [&](const auto &m) { return Complex(ryser_permanent(m, workers, mode)); });
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    PermanentResult result;
    result.value = value;
    result.terms_evaluated = std::uint64_t{1} << (a.order() - 1);
    result.mode = mode;
    result.algorithm = Algorithm::ryser;
    result.wall_seconds = elapsed.count();
    return result;
}

}  // namespace perm
