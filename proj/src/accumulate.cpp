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

#include "perm/accumulate.hpp"

namespace perm {

Complex kahan_sum(std::span<const Complex> terms) {
    ComplexAccumulator<KahanAccumulator> acc;
    for (const Complex &term : terms) acc.add(term);
    return acc.value();
}

double kahan_sum(std::span<const double> terms) {
    KahanAccumulator acc;
    for (double term : terms) acc.add(term);
    return acc.value();
}

Complex accumulate(std::span<const Complex> terms, AccumulationMode mode) {
    return dispatch_mode(mode, [&](auto tag) {
        accumulator_t<Complex, decltype(tag)::value> acc;
        for (const Complex &term : terms) acc.add(term);
        return acc.value();
    });
}

}  // namespace perm
