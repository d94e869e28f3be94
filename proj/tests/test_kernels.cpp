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

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "tensorisac/kernels.hpp"

using namespace tisac::kernels;

namespace
{

std::vector<cx> random_vec(std::mt19937_64 &rng, std::size_t n)
{
    std::normal_distribution<double> g;
    std::vector<cx> v(n);
    for (cx &x : v)
        x = cx(g(rng), g(rng));
    return v;
}

// Sizes chosen to cover the vector-width remainder paths: below one SIMD
// lane, exact multiples, and odd tails.
const std::vector<std::size_t> sizes{1, 2, 3, 4, 7, 8, 15, 16, 31, 64, 257, 1000};

} // namespace

TEST_CASE("active variant reports a known instruction set")
{
    const std::string v = active_variant();
    const bool known = v == "scalar" || v == "avx2" || v == "neon";
    INFO("active_variant() = " << v);
    REQUIRE(known);

    if (const char *force = std::getenv("TISAC_KERNELS"))
        REQUIRE(v == force);
}

TEST_CASE("dispatched cdotc matches the reference path")
{
    std::mt19937_64 rng(101);
    for (std::size_t n : sizes)
    {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);
        const cx want = Base::cdotc(n, a.data(), b.data());
        const cx got = cdotc(n, a.data(), b.data());
        REQUIRE_THAT(std::abs(got - want), Catch::Matchers::WithinAbs(0.0, 1e-12 * (1.0 + std::abs(want))));
    }
    REQUIRE(cdotc(0, nullptr, nullptr) == cx(0.0, 0.0));
}

TEST_CASE("dispatched caxpy matches the reference path")
{
    std::mt19937_64 rng(102);
    for (std::size_t n : sizes)
    {
        const auto x = random_vec(rng, n);
        auto y_ref = random_vec(rng, n);
        auto y_dis = y_ref;
        const cx s(0.37, -1.21);
        Base::caxpy(n, s, x.data(), y_ref.data());
        caxpy(n, s, x.data(), y_dis.data());
        for (std::size_t i = 0; i < n; ++i)
            REQUIRE_THAT(std::abs(y_dis[i] - y_ref[i]),
                         Catch::Matchers::WithinAbs(0.0, 1e-12 * (1.0 + std::abs(y_ref[i]))));
    }
}

TEST_CASE("dispatched cmul_ew matches the reference path")
{
    std::mt19937_64 rng(103);
    for (std::size_t n : sizes)
    {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);
        std::vector<cx> out_ref(n), out_dis(n);
        Base::cmul_ew(n, a.data(), b.data(), out_ref.data());
        cmul_ew(n, a.data(), b.data(), out_dis.data());
        for (std::size_t i = 0; i < n; ++i)
            REQUIRE_THAT(std::abs(out_dis[i] - out_ref[i]),
                         Catch::Matchers::WithinAbs(0.0, 1e-12 * (1.0 + std::abs(out_ref[i]))));
    }
}

TEST_CASE("dispatched energy matches the reference path")
{
    std::mt19937_64 rng(104);
    for (std::size_t n : sizes)
    {
        const auto a = random_vec(rng, n);
        const double want = Base::energy(n, a.data());
        REQUIRE_THAT(energy(n, a.data()), Catch::Matchers::WithinRel(want, 1e-12));
    }
    REQUIRE(energy(0, nullptr) == 0.0);
}

TEST_CASE("dispatched phase_ramp matches the reference path and the analytic ramp")
{
    for (std::size_t n : sizes)
    {
        const double phi0 = 0.4117, dphi = -1.9;
        std::vector<cx> out_ref(n), out_dis(n);
        Base::phase_ramp(n, phi0, dphi, out_ref.data());
        phase_ramp(n, phi0, dphi, out_dis.data());
        for (std::size_t i = 0; i < n; ++i)
        {
            const cx want = std::polar(1.0, phi0 + static_cast<double>(i) * dphi);
            REQUIRE_THAT(std::abs(out_ref[i] - want), Catch::Matchers::WithinAbs(0.0, 1e-12));
            REQUIRE_THAT(std::abs(out_dis[i] - out_ref[i]), Catch::Matchers::WithinAbs(0.0, 1e-12));
        }
    }
}
