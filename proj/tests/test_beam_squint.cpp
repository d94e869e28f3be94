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

#include <limits>

#include "tensorisac/beam_squint.hpp"
#include "tensorisac/metrics.hpp"

using namespace tisac;

namespace
{

const ArrayConfig wide = ArrayConfig::make(64, 8, 8, 28e9, 1e9, 128, 1.0);
const double inf = std::numeric_limits<double>::infinity();

/// Four echoes with segment-level Doppler generators spread far apart, so
/// component separation is far from its resolution limit and the recovery
/// accuracy itself is what gets measured.
ScatterSet spread_doppler_targets()
{
    ScatterSet s;
    s.kind = scatter_kind::targets;
    s.scatterers = {
        {cx(0.9, 0.4), -0.71, 0.24, 5.0e-9, -2.0e4},
        {cx(-0.3, 1.1), -0.18, -0.55, 1.3e-8, -8.0e3},
        {cx(0.6, -0.8), 0.33, 0.61, 2.1e-8, 5.0e3},
        {cx(-1.2, 0.2), 0.87, -0.95, 2.9e-8, 1.5e4},
    };
    return s;
}

} // namespace

TEST_CASE("per-subcarrier identifiability bound matches its closed form")
{
    REQUIRE(prop1_max_targets(8, 8, 8, 5) == 32);
    REQUIRE(prop1_max_targets(8, 8, 8, 2) == 8);   // min(8*1, 8*7)
    REQUIRE(prop1_max_targets(4, 16, 8, 3) == 24); // min(16*2, 4*6)
    REQUIRE_THROWS_AS(prop1_max_targets(8, 8, 8, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(prop1_max_targets(8, 8, 8, 9), std::invalid_argument);
}

TEST_CASE("segment carve-up is a pure reindexing of the full grid")
{
    arma::arma_rng::set_seed(61);
    const int m = 3, n_d = 4, l = 5, k = 6;
    Tensor3 full(arma::cx_cube(m, n_d * l, k, arma::fill::randn));

    const SegmentTensorSet ts = segment_view(full, n_d, l);
    REQUIRE(ts.n_subcarriers() == k);
    REQUIRE_NOTHROW(ts.validate());
    for (int kk = 0; kk < k; ++kk)
        for (int i = 0; i < m; ++i)
            for (int s = 0; s < l; ++s)
                for (int n = 0; n < n_d; ++n)
                    REQUIRE(ts.per_subcarrier[kk](i, n, s) == full(i, s * n_d + n, kk));

    SECTION("shape mismatches are rejected")
    {
        REQUIRE_THROWS_AS(segment_view(full, n_d, l + 1), std::invalid_argument);
        SegmentTensorSet broken = ts;
        broken.per_subcarrier[2] = Tensor3(m, n_d, l + 1);
        REQUIRE_THROWS_AS(broken.validate(), std::invalid_argument);
    }
}

TEST_CASE("noiseless segment tensors equal the carved squinted echo grid")
{
    const ScatterSet s = spread_doppler_targets();
    const TrainingPattern tp = make_segment_training(71, wide.m_bs, 8, 8, 32, 4);

    const SegmentTensorSet built = build_segment_tensors(s, tp, wide, inf, 1234);
    const SegmentTensorSet carved = segment_view(echo_grid(s, tp, wide, receiver::bs, true), 8, 8);
    REQUIRE(built.n_subcarriers() == 32);
    for (int k = 0; k < 32; ++k)
    {
        double diff = 0.0;
        for (arma::uword i = 0; i < built.per_subcarrier[k].numel(); ++i)
            diff += std::norm(built.per_subcarrier[k].memptr()[i] - carved.per_subcarrier[k].memptr()[i]);
        REQUIRE(diff == 0.0);
    }
}

TEST_CASE("wideband pipeline recovers a noiseless scenario across the whole comb")
{
    const ScatterSet s = spread_doppler_targets();
    const TrainingPattern tp = make_segment_training(72, wide.m_bs, 8, 8, 32, 4);
    const SegmentTensorSet ts = build_segment_tensors(s, tp, wide, inf, 0);

    const SubcarrierEstimates est = run_algorithm2(ts, tp, wide, 4);
    REQUIRE(est.q() == 4);
    REQUIRE(est.n_subcarriers() == 32);

    arma::vec aoa_t(4), aod_t(4), tau_t(4), nu_t(4);
    arma::cx_vec beta_t(4);
    for (int c = 0; c < 4; ++c)
    {
        aoa_t(c) = s.scatterers[c].aoa;
        aod_t(c) = s.scatterers[c].aod;
        tau_t(c) = s.scatterers[c].delay;
        nu_t(c) = s.scatterers[c].doppler;
        beta_t(c) = s.scatterers[c].coeff;
    }

    // one matching from the first subcarrier must hold across the band (the
    // cross-subcarrier alignment promise)
    const std::vector<int> mt = match_by_aoa(est.aoa.row(0).t(), aoa_t);
    for (int k = 0; k < 32; ++k)
        for (int c = 0; c < 4; ++c)
        {
            CHECK_THAT(std::sin(est.aoa(k, mt[c])),
                       Catch::Matchers::WithinAbs(std::sin(aoa_t(c)), 1e-6));
            CHECK_THAT(std::sin(est.aod(k, mt[c])),
                       Catch::Matchers::WithinAbs(std::sin(aod_t(c)), 1e-6));
            CHECK_THAT(est.doppler(k, mt[c]), Catch::Matchers::WithinRel(nu_t(c), 1e-6));
        }
    for (int c = 0; c < 4; ++c)
    {
        REQUIRE_THAT(est.delay(mt[c]), Catch::Matchers::WithinRel(tau_t(c), 1e-5));
        REQUIRE(std::abs(est.coeff(mt[c]) - beta_t(c)) / std::abs(beta_t(c)) < 1e-4);
    }

    SECTION("single-subcarrier view composes the per-tone and fused pieces")
    {
        const ParamEstimates p = est.at_subcarrier(7);
        REQUIRE(p.q() == 4);
        for (int c = 0; c < 4; ++c)
        {
            REQUIRE(p.aoa(c) == est.aoa(6, c));
            REQUIRE(p.aod(c) == est.aod(6, c));
            REQUIRE(p.doppler(c) == est.doppler(6, c));
            REQUIRE(p.delay(c) == est.delay(c));
            REQUIRE(p.coeff(c) == est.coeff(c));
        }
    }
}

TEST_CASE("a static single echo is recovered without Doppler diversity")
{
    ScatterSet s;
    s.kind = scatter_kind::targets;
    s.scatterers = {{cx(1.0, -0.5), 0.42, -0.37, 1.7e-8, 0.0}};
    const TrainingPattern tp = make_segment_training(73, wide.m_bs, 8, 8, 32, 4);
    const SegmentTensorSet ts = build_segment_tensors(s, tp, wide, inf, 0);

    const SubcarrierEstimates est = run_algorithm2(ts, tp, wide, 1);
    for (int k = 0; k < 32; ++k)
    {
        REQUIRE_THAT(std::sin(est.aoa(k, 0)), Catch::Matchers::WithinAbs(std::sin(0.42), 1e-6));
        REQUIRE_THAT(est.doppler(k, 0), Catch::Matchers::WithinAbs(0.0, 1e-3));
    }
    REQUIRE_THAT(est.delay(0), Catch::Matchers::WithinRel(1.7e-8, 1e-5));
}

TEST_CASE("requesting more components than the segment bound raises the guard")
{
    const TrainingPattern tp = make_segment_training(74, wide.m_bs, 8, 8, 32, 4);
    ScenarioBounds b;
    b.delay_max = 3.1e-8;
    const ScatterSet s = generate_scenario(75, 33, wide, b); // prop1 bound is 32
    const SegmentTensorSet ts = build_segment_tensors(s, tp, wide, inf, 0);
    try
    {
        run_algorithm2(ts, tp, wide, 33);
        FAIL("expected the identifiability guard to fire");
    }
    catch (const estimation_error &e)
    {
        REQUIRE(e.kind() == error_kind::uniqueness_bound);
    }
}

TEST_CASE("wideband pipeline needs segment-structured training")
{
    const ScatterSet s = spread_doppler_targets();
    const TrainingPattern flat = make_training(76, wide.m_bs, 64, 32, 4);
    REQUIRE_THROWS_AS(build_segment_tensors(s, flat, wide, inf, 0), std::invalid_argument);
}
