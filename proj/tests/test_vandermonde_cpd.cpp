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

#include <algorithm>
#include <random>

#include "tensorisac/vandermonde_cpd.hpp"

using namespace tisac;

namespace
{

/// Factor triple whose third mode is Vandermonde in unit-modulus generators
/// with well-separated phases, the structure the smoothing pipeline assumes.
FactorTriple vandermonde_factors(int i1, int i2, int i3, int q, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    FactorTriple f;
    f.b1.set_size(i1, q);
    f.b2.set_size(i2, q);
    f.b3.set_size(i3, q);
    for (auto &v : f.b1)
        v = cx(g(rng), g(rng));
    for (auto &v : f.b2)
        v = cx(g(rng), g(rng));
    for (int c = 0; c < q; ++c)
    {
        const double phase = -2.8 + 5.6 * c / q + 0.08 * std::uniform_real_distribution<>(0, 1)(rng);
        for (int k = 0; k < i3; ++k)
            f.b3(k, c) = std::polar(1.0, phase * (k + 1));
    }
    return f;
}

} // namespace

TEST_CASE("generic and smoothed resolvability bounds match hand-computed cases")
{
    // min(i1,Q) + min(i2,Q) + min(i3,Q) >= 2Q + 2, largest Q
    REQUIRE(kruskal_max_targets(8, 10, 16) == 16);
    REQUIRE(kruskal_max_targets(8, 16, 16) == 19);
    REQUIRE(kruskal_max_targets(2, 2, 2) == 2);

    // min(i2*(k3-1), i1*(i3-k3+1))
    REQUIRE(vandermonde_max_targets(8, 16, 16, 5) == 64);
    REQUIRE(vandermonde_max_targets(8, 10, 16, 3) == 20);
    REQUIRE(vandermonde_max_targets(8, 20, 16, 7) == 80);
    REQUIRE_THROWS_AS(vandermonde_max_targets(8, 16, 16, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(vandermonde_max_targets(8, 16, 16, 17), std::invalid_argument);

    REQUIRE(default_k3(16) == 9);
    REQUIRE(default_k3(8) == 5);
    REQUIRE(default_k3(3) == 2);
}

TEST_CASE("resolvable table layout and CSV rendering")
{
    const ResolvableTable t = resolvable_table(8, 16, {10, 16}, {3, 5});
    REQUIRE(t.baseline_row == std::vector<int>{16, 19});
    REQUIRE(t.rows.size() == 2);
    REQUIRE(t.rows[0] == std::vector<int>{20, 32});
    REQUIRE(t.rows[1] == std::vector<int>{40, 64});

    const std::string csv = table_csv(t);
    REQUIRE(csv == "n,10,16\nkruskal,16,19\nsmoothed_k3_3,20,32\nsmoothed_k3_5,40,64\n");
}

TEST_CASE("spatial smoothing stacks sliding third-mode windows")
{
    const int m = 3, n = 4, k = 6, k3 = 3;
    const FactorTriple f = vandermonde_factors(m, n, k, 2, 11);
    const Tensor3 t = cpd_reconstruct(f);
    const arma::cx_mat y1t = mode_unfold(t, 1).st(); // (n*k) x m
    const arma::cx_mat ys = spatial_smooth(y1t, n, k3);

    const int l3 = k - k3 + 1;
    REQUIRE(ys.n_rows == arma::uword(k3 * n));
    REQUIRE(ys.n_cols == arma::uword(l3 * m));
    // window w keeps blocks w..w+k3-1: entry check against the raw blocks
    for (int w = 0; w < l3; ++w)
        for (int b = 0; b < k3; ++b)
            REQUIRE(arma::norm(ys.submat(b * n, w * m, (b + 1) * n - 1, (w + 1) * m - 1) -
                                   y1t.rows((w + b) * n, (w + b + 1) * n - 1),
                               "fro") == 0.0);

    SECTION("the structural factorization identity holds")
    {
        // Each window scales the mixing rows by powers of the generators, so
        // every window block factors through khatri_rao(b3(1:k3), b2).
        const arma::cx_mat lhs = khatri_rao(f.b3.rows(0, k3 - 1), f.b2);
        double worst = 0.0;
        for (int w = 0; w < l3; ++w)
        {
            arma::cx_mat mix(f.q(), m);
            for (int c = 0; c < f.q(); ++c)
                mix.row(c) = std::pow(f.b3(1, c) / f.b3(0, c), w) * f.b1.col(c).st();
            const arma::cx_mat block = lhs * mix;
            worst = std::max(worst, arma::norm(ys.cols(w * m, (w + 1) * m - 1) - block, "fro") /
                                        arma::norm(block, "fro"));
        }
        REQUIRE(worst < 1e-12);
    }

    SECTION("k3 equal to the slice count is the identity")
    {
        REQUIRE(arma::norm(spatial_smooth(y1t, n, k) - y1t, "fro") == 0.0);
    }
    SECTION("shape guards")
    {
        REQUIRE_THROWS_AS(spatial_smooth(y1t, 5, 3), std::invalid_argument);
        REQUIRE_THROWS_AS(spatial_smooth(y1t, n, 1), std::invalid_argument);
        REQUIRE_THROWS_AS(spatial_smooth(y1t, n, k + 1), std::invalid_argument);
    }
}

TEST_CASE("shift-invariance recovery reproduces a noiseless Vandermonde factorization")
{
    const int m = 8, n = 16, k = 16, k3 = 9;
    for (int q : {1, 3, 6})
    {
        const FactorTriple f = vandermonde_factors(m, n, k, q, 200 + q);
        const Tensor3 t = cpd_reconstruct(f);
        const FactorEstimate est = esprit_factors(spatial_smooth(mode_unfold(t, 1).st(), n, k3), q, m,
                                                  n, k, k3);
        REQUIRE(est.factors.q() == q);
        REQUIRE(est.generators.n_elem == arma::uword(q));

        // generators match the truth set (order-free)
        arma::vec truth_ph(q), est_ph(q);
        for (int c = 0; c < q; ++c)
        {
            truth_ph(c) = std::arg(f.b3(1, c) / f.b3(0, c));
            est_ph(c) = std::arg(est.generators(c));
            REQUIRE_THAT(std::abs(est.generators(c)), Catch::Matchers::WithinAbs(1.0, 1e-9));
        }
        arma::vec ts = arma::sort(truth_ph), es = arma::sort(est_ph);
        for (int c = 0; c < q; ++c)
            REQUIRE_THAT(es(c), Catch::Matchers::WithinAbs(ts(c), 1e-8));

        // and the factorization reproduces the tensor
        const Tensor3 back = cpd_reconstruct(est.factors);
        double num = 0.0, den = 0.0;
        for (arma::uword i = 0; i < t.numel(); ++i)
        {
            num += std::norm(back.memptr()[i] - t.memptr()[i]);
            den += std::norm(t.memptr()[i]);
        }
        REQUIRE(std::sqrt(num / den) < 1e-8);
    }
}

TEST_CASE("recovery raises the resolvability guard instead of returning garbage")
{
    const int m = 2, n = 3, k = 6, k3 = 3;
    const FactorTriple f = vandermonde_factors(m, n, k, 2, 31);
    const Tensor3 t = cpd_reconstruct(f);
    const arma::cx_mat ys = spatial_smooth(mode_unfold(t, 1).st(), n, k3);
    const int bound = vandermonde_max_targets(m, n, k, k3); // min(3*2, 2*4) = 6

    try
    {
        esprit_factors(ys, bound + 1, m, n, k, k3);
        FAIL("expected the resolvability guard to fire");
    }
    catch (const estimation_error &e)
    {
        REQUIRE(e.kind() == error_kind::uniqueness_bound);
    }
}

TEST_CASE("the two-sided rank diagnostic accepts generic factors and flags collapsed ones")
{
    FactorTriple f = vandermonde_factors(8, 16, 16, 4, 57);
    REQUIRE(smoothing_rank_ok(f, 9));

    // duplicate generator on two columns collapses the Vandermonde side
    for (int k = 0; k < 16; ++k)
        f.b3(k, 1) = f.b3(k, 0);
    REQUIRE_FALSE(smoothing_rank_ok(f, 9));
}
