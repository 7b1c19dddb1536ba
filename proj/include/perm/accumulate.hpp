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

#include <cmath>
#include <complex>
#include <span>
#include <type_traits>
#include <utility>

#include "perm/matrix.hpp"

// The compensated loops below are only correct under strict IEEE semantics.
// The build refuses -ffast-math and disables FMA contraction for this library.
#if defined(__FAST_MATH__)
#error "perm accumulators require IEEE semantics; do not build with -ffast-math"
#endif

namespace perm {

/// Ordinary left-to-right summation.
class PlainAccumulator {
  public:
    void add(double term) noexcept { sum_ += term; }
    void merge(const PlainAccumulator &other) noexcept { add(other.sum_); }
    double value() const noexcept { return sum_; }

  private:
    double sum_ = 0.0;
};

/// Compensated summation in the Kahan-Babuska form: the rounding error of
/// every addition is collected in a separate carry, whichever operand is
/// larger, and folded in when the value is read. The textbook Kahan loop
/// drops the carry when a later term dwarfs it ({1e16, 1, -1e16} sums to 0);
/// this form returns 1 there.
class KahanAccumulator {
  public:
    void add(double term) noexcept {
        const double t = sum_ + term;
        if (std::abs(sum_) >= std::abs(term)) {
            carry_ += (sum_ - t) + term;
        } else {
            carry_ += (term - t) + sum_;
        }
        sum_ = t;
    }
    /// Partial sums are combined by their value only.
    void merge(const KahanAccumulator &other) noexcept { add(other.value()); }
    double value() const noexcept { return sum_ + carry_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Double-double running sum: `hi + lo` carries about 106 significant bits.
class ExtendedAccumulator {
  public:
    void add(double term) noexcept {
        auto [s, e] = two_sum(hi_, term);
        e += lo_;
        hi_ = s + e;
        lo_ = e - (hi_ - s);
    }
    void merge(const ExtendedAccumulator &other) noexcept {
        add(other.hi_);
        add(other.lo_);
    }
    double value() const noexcept { return hi_ + lo_; }
    double high() const noexcept { return hi_; }
    double low() const noexcept { return lo_; }

  private:
    static std::pair<double, double> two_sum(double a, double b) noexcept {
        const double s = a + b;
        const double bb = s - a;
        const double err = (a - (s - bb)) + (b - bb);
        return {s, err};
    }

    double hi_ = 0.0;
    double lo_ = 0.0;
};

/// Applies a real accumulator independently to real and imaginary parts.
template <typename RealAccumulator>
class ComplexAccumulator {
  public:
    void add(const Complex &term) noexcept {
        re_.add(term.real());
        im_.add(term.imag());
    }
    void merge(const ComplexAccumulator &other) noexcept {
        re_.merge(other.re_);
        im_.merge(other.im_);
    }
    Complex value() const noexcept { return {re_.value(), im_.value()}; }

  private:
    RealAccumulator re_;
    RealAccumulator im_;
};

template <AccumulationMode Mode>
using real_accumulator_t =
    std::conditional_t<Mode == AccumulationMode::plain, PlainAccumulator,
                       std::conditional_t<Mode == AccumulationMode::compensated, KahanAccumulator,
                                          ExtendedAccumulator>>;

/// Accumulator for `Scalar` (double or Complex) under `Mode`.
template <typename Scalar, AccumulationMode Mode>
using accumulator_t = std::conditional_t<std::is_same_v<Scalar, double>, real_accumulator_t<Mode>,
                                         ComplexAccumulator<real_accumulator_t<Mode>>>;

/// Calls `fn(std::integral_constant<AccumulationMode, M>{})` for the runtime mode.
template <typename Fn>
decltype(auto) dispatch_mode(AccumulationMode mode, Fn &&fn) {
    switch (mode) {
        case AccumulationMode::plain:
            return fn(std::integral_constant<AccumulationMode, AccumulationMode::plain>{});
        case AccumulationMode::extended:
            return fn(std::integral_constant<AccumulationMode, AccumulationMode::extended>{});
        case AccumulationMode::compensated:
        default:
            return fn(std::integral_constant<AccumulationMode, AccumulationMode::compensated>{});
    }
}

/// Kahan sum of an ordered sequence, real and imaginary parts separately.
Complex kahan_sum(std::span<const Complex> terms);
double kahan_sum(std::span<const double> terms);

/// Sums an ordered sequence with the given accumulation mode.
Complex accumulate(std::span<const Complex> terms, AccumulationMode mode);

}  // namespace perm
