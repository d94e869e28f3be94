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

#include "tensorisac/signal_model.hpp"
#include "tensorisac/training.hpp"

using namespace tisac;

TEST_CASE("make derives the OFDM timing from bandwidth and subcarrier count")
{
    const ArrayConfig c = ArrayConfig::make(64, 8, 8, 28e9, 100e6, 128, 0.5);
    REQUIRE_THAT(c.delta_f, Catch::Matchers::WithinRel(100e6 / 128, 1e-15));
    REQUIRE_THAT(c.t_cp, Catch::Matchers::WithinRel(0.5 / c.delta_f, 1e-15));
    REQUIRE_THAT(c.t_sym, Catch::Matchers::WithinRel(1.0 / c.delta_f + c.t_cp, 1e-15));
    REQUIRE_NOTHROW(c.validate());
}

TEST_CASE("config validation rejects broken geometry")
{
    ArrayConfig c = ArrayConfig::make(64, 8, 8, 28e9, 100e6, 128);
    SECTION("zero antennas")
    {
        c.m_re = 0;
        REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SECTION("negative bandwidth")
    {
        REQUIRE_THROWS_AS(ArrayConfig::make(64, 8, 8, 28e9, -1.0, 128), std::invalid_argument);
    }
    SECTION("inconsistent spacing")
    {
        c.delta_f *= 1.001;
        REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
    }
}

TEST_CASE("steering vector has the documented phase progression")
{
    const double angle = 0.31, d = 0.5;
    SECTION("frequency-flat")
    {
        const arma::cx_vec a = steering_vector(8, angle, 0.0, d);
        REQUIRE(a.n_elem == 8);
        REQUIRE(a(0) == cx(1.0, 0.0));
        for (int m = 0; m < 8; ++m)
        {
            const cx want = std::exp(cx(0.0, -2.0 * M_PI * d * m * std::sin(angle)));
            REQUIRE_THAT(std::abs(a(m) - want), Catch::Matchers::WithinAbs(0.0, 1e-14));
            REQUIRE_THAT(std::abs(a(m)), Catch::Matchers::WithinAbs(1.0, 1e-14));
        }
    }
    SECTION("a fractional carrier offset scales the effective spacing")
    {
        const double ratio = 0.02;
        const arma::cx_vec a = steering_vector(8, angle, ratio, d);
        for (int m = 0; m < 8; ++m)
        {
            const cx want = std::exp(cx(0.0, -2.0 * M_PI * (1.0 + ratio) * d * m * std::sin(angle)));
            REQUIRE_THAT(std::abs(a(m) - want), Catch::Matchers::WithinAbs(0.0, 1e-14));
        }
    }
}

TEST_CASE("delay and Doppler phase vectors are one-based geometric progressions")
{
    const ArrayConfig c = ArrayConfig::make(64, 8, 8, 28e9, 100e6, 128);
    const double tau = 3.1e-7, nu = 1234.5;

    const arma::cx_vec dp = delay_phase_vector(6, tau, c);
    for (int k = 1; k <= 6; ++k)
        REQUIRE_THAT(std::abs(dp(k - 1) - std::exp(cx(0.0, -2.0 * M_PI * tau * c.f_s * k / c.k0))),
                     Catch::Matchers::WithinAbs(0.0, 1e-14));

    SECTION("a comb stride multiplies the per-tone phase step")
    {
        const arma::cx_vec dp4 = delay_phase_vector(6, tau, c, 4);
        for (int k = 1; k <= 6; ++k)
            REQUIRE_THAT(std::abs(dp4(k - 1) -
                                  std::exp(cx(0.0, -2.0 * M_PI * tau * c.f_s * 4.0 * k / c.k0))),
                         Catch::Matchers::WithinAbs(0.0, 1e-14));
    }

    const arma::cx_vec dv = doppler_phase_vector(5, nu, c.t_sym);
    for (int n = 1; n <= 5; ++n)
        REQUIRE_THAT(std::abs(dv(n - 1) - std::exp(cx(0.0, 2.0 * M_PI * n * nu * c.t_sym))),
                     Catch::Matchers::WithinAbs(0.0, 1e-14));
}

TEST_CASE("single-scatterer channel matrix is the expected rank-one product")
{
    const ArrayConfig c = ArrayConfig::make(64, 8, 8, 28e9, 100e6, 128);
    ScatterSet s;
    s.kind = scatter_kind::targets;
    s.scatterers.push_back({cx(0.7, -0.2), 0.4, -0.9, 2.2e-7, 3500.0});

    const int n = 3, k = 5;
    for (bool squint : {false, true})
    {
        const double ratio = squint ? k * c.delta_f / c.f_c : 0.0;
        const arma::cx_mat h = sensing_channel(s, n, k, c, squint);
        REQUIRE(h.n_rows == 8);
        REQUIRE(h.n_cols == 64);

        const Scatterer &sc = s.scatterers[0];
        const cx phase = sc.coeff * std::exp(cx(0.0, -2.0 * M_PI * sc.delay * c.f_s * k / c.k0)) *
                         std::exp(cx(0.0, 2.0 * M_PI * n * sc.doppler * c.t_sym));
        const arma::cx_mat want = phase * steering_vector(8, sc.aoa, ratio, c.d_over_lambda) *
                                  steering_vector(64, sc.aod, ratio, c.d_over_lambda).st();
        REQUIRE(arma::norm(h - want, "fro") / arma::norm(want, "fro") < 1e-13);
    }

    SECTION("the user-side channel swaps in the UE array")
    {
        const arma::cx_mat h = comm_channel(s, n, k, c);
        REQUIRE(h.n_rows == 8);
        REQUIRE(h.n_cols == 64);
    }
}

TEST_CASE("scatter-set validation enforces the physical bounds")
{
    const ArrayConfig c = ArrayConfig::make(64, 8, 8, 28e9, 100e6, 128);
    ScatterSet s;
    s.scatterers.push_back({cx(1.0, 0.0), 0.2, 0.3, 1e-7, 1000.0});
    REQUIRE_NOTHROW(s.validate(c));

    SECTION("empty set")
    {
        s.scatterers.clear();
        REQUIRE_THROWS_AS(s.validate(c), std::invalid_argument);
    }
    SECTION("delay beyond the cyclic prefix")
    {
        s.scatterers[0].delay = c.t_cp * 1.01;
        REQUIRE_THROWS_AS(s.validate(c), std::invalid_argument);
    }
    SECTION("coincident delay generators")
    {
        s.scatterers.push_back(s.scatterers[0]);
        s.scatterers[1].aoa = -0.4;
        REQUIRE_THROWS_AS(s.validate(c), std::invalid_argument);
    }
}

TEST_CASE("scenario generator respects its bounds and is seed-deterministic")
{
    const ArrayConfig c = ArrayConfig::make(64, 8, 8, 28e9, 100e6, 128);
    ScenarioBounds b;
    b.kind = scatter_kind::targets;

    const ScatterSet s1 = generate_scenario(77, 6, c, b);
    const ScatterSet s2 = generate_scenario(77, 6, c, b);
    const ScatterSet s3 = generate_scenario(78, 6, c, b);
    REQUIRE(s1.count() == 6);
    REQUIRE(s1.kind == scatter_kind::targets);
    bool identical = true, differs = false;
    for (int i = 0; i < 6; ++i)
    {
        identical = identical && s1.scatterers[i].coeff == s2.scatterers[i].coeff &&
                    s1.scatterers[i].delay == s2.scatterers[i].delay;
        differs = differs || s1.scatterers[i].delay != s3.scatterers[i].delay;
    }
    REQUIRE(identical);
    REQUIRE(differs);

    const double nu_cap = 2.0 * b.v_max * c.f_c / speed_of_light;
    for (const Scatterer &sc : s1.scatterers)
    {
        REQUIRE(std::abs(sc.aoa) <= b.angle_bound);
        REQUIRE(std::abs(sc.aod) <= b.angle_bound);
        REQUIRE(sc.delay >= 0.0);
        REQUIRE(sc.delay <= c.t_cp);
        REQUIRE(std::abs(sc.doppler) <= nu_cap);
    }

    SECTION("multipath draws use the Doppler-spread bound")
    {
        b.kind = scatter_kind::multipaths;
        const ScatterSet m = generate_scenario(99, 5, c, b);
        REQUIRE(m.kind == scatter_kind::multipaths);
        for (const Scatterer &sc : m.scatterers)
            REQUIRE(std::abs(sc.doppler) <= 0.5 * b.nu_max);
    }
    SECTION("a delay cap shrinks the delay support")
    {
        b.delay_max = 3.2e-8;
        const ScatterSet m = generate_scenario(13, 8, c, b);
        for (const Scatterer &sc : m.scatterers)
            REQUIRE(sc.delay <= b.delay_max);
    }
    SECTION("interferers are appended to the requested target count")
    {
        b.interferers = 2;
        const ScatterSet m = generate_scenario(5, 4, c, b);
        REQUIRE(m.count() == 6);
        REQUIRE(m.kind == scatter_kind::targets_with_interferers);
    }
}

TEST_CASE("training patterns are unit modulus and segment structure repeats the base block")
{
    const TrainingPattern tp = make_training(5, 64, 16, 16);
    REQUIRE(tp.precoder.n_rows == 64);
    REQUIRE(tp.precoder.n_cols == 16);
    REQUIRE(tp.pilots.n_elem == 16);
    REQUIRE_NOTHROW(tp.validate());
    for (const cx &v : tp.precoder)
        REQUIRE_THAT(std::abs(v), Catch::Matchers::WithinAbs(1.0, 1e-12));

    SECTION("comb placement maps training tone j to physical subcarrier stride*j")
    {
        const TrainingPattern comb = make_training(5, 64, 16, 32, 4);
        REQUIRE(comb.physical_subcarrier(1) == 4);
        REQUIRE(comb.physical_subcarrier(32) == 128);
    }

    SECTION("segmented pattern")
    {
        const TrainingPattern seg = make_segment_training(9, 64, 8, 8, 32, 4);
        REQUIRE(seg.segmented());
        REQUIRE(seg.n_symbols == 64);
        for (int l = 1; l < 8; ++l)
            REQUIRE(arma::norm(seg.precoder.cols(8 * l, 8 * l + 7) - seg.precoder.cols(0, 7), "fro") ==
                    0.0);
        REQUIRE_NOTHROW(seg.validate());

        TrainingPattern broken = seg;
        broken.precoder(0, 9) *= cx(-1.0, 0.0);
        REQUIRE_THROWS_AS(broken.validate(), std::invalid_argument);
    }

    SECTION("segment_precoder rejects bad shapes")
    {
        REQUIRE_THROWS_AS(segment_precoder(arma::cx_mat(), 3), std::invalid_argument);
        REQUIRE_THROWS_AS(segment_precoder(arma::cx_mat(4, 2, arma::fill::ones), 0),
                          std::invalid_argument);
    }
}
