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

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace perm {

/// Reproducible random stream identified by (seed, stream).
///
/// The engine is std::mt19937_64 initialised through std::seed_seq from the
/// four 32-bit halves of seed and stream; both are fully specified by the C++
/// standard, so the same pair yields the same sequence on every conforming
/// platform. Conversions to floating point are done here rather than through
/// <random> distributions, whose algorithms are implementation-defined.
class RngStream {
  public:
    using result_type = std::uint64_t;

    static constexpr std::string_view algorithm = "mt19937_64+seed_seq";

    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a logarithm argument.
    double uniform_positive() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    /// Unbiased integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    /// Independent child stream; a pure function of (seed, stream, child).
    RngStream derive(std::uint64_t child) const;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace perm
