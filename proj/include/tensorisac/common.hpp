// SPDX-License-Identifier: Apache-2.0
//
// tensorisac - tensor-based channel and target parameter estimation
// for massive MIMO integrated sensing and communication
// Copyright (C) 2026 the tensorisac contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tisac
{

using cx = std::complex<double>;

/// Exact speed of light in m/s (SI definition).
inline constexpr double speed_of_light = 299792458.0;

/// Failure categories raised by the estimators at runtime. Input/configuration
/// problems throw std::invalid_argument instead; these kinds cover numerical
/// conditions discovered while an estimator is running.
enum class error_kind
{
    uniqueness_bound,  ///< requested model order exceeds the identifiability bound
    ill_conditioned,   ///< rank-deficient or near-singular system
    numerical_failure, ///< an underlying solver (SVD/eig/roots) did not converge
    degenerate,        ///< degenerate input (e.g. all-zero quadratic form)
    match_failure      ///< cross-factorization column alignment failed
};

/// Runtime estimation failure. Carries a kind so callers (and the CLI) can
/// distinguish estimator failures from usage errors.
class estimation_error : public std::runtime_error
{
  public:
    estimation_error(error_kind kind, const std::string &msg) : std::runtime_error(msg), kind_(kind) {}
    error_kind kind() const noexcept { return kind_; }

  private:
    error_kind kind_;
};

/// Stable per-stream RNG seed derivation (splitmix64 over mixed-in words).
/// Streams derived from (master, a, b, c) are independent of evaluation order,
/// so adding sweep points never reshuffles existing trials.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0)
{
    auto mix = [](std::uint64_t &s, std::uint64_t v) {
        s += 0x9E3779B97F4A7C15ULL + v;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        s = z ^ (z >> 31);
        return s;
    };
    std::uint64_t s = master;
    mix(s, a);
    mix(s, b);
    mix(s, c);
    return s;
}

} // namespace tisac
