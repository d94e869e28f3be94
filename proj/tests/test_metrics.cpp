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
#include <numeric>
#include <random>

#include "tensorisac/metrics.hpp"

using namespace tisac;

TEST_CASE("minimum-cost assignment solves hand cases")
{
    arma::mat c(3, 3);
    c = {{1.0, 9.0, 9.0}, {9.0, 9.0, 1.0}, {9.0, 1.0, 9.0}};
    REQUIRE(assign_min_cost(c) == std::vector<int>{0, 2, 1});

    arma::mat id = arma::ones(4, 4) * 5.0;
    id.diag().zeros();
    REQUIRE(assign_min_cost(id) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("assignment matches brute force beyond the exhaustive cutoff")
{
    std::mt19937_64 rng(314);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial)
    {
        const int n = 7; // internal solver switches away from exhaustive here
        arma::mat c(n, n);
        for (auto &v : c)
            v = u(rng);

        const std::vector<int> got = assign_min_cost(c);
        double got_cost = 0.0;
        for (int i = 0; i < n; ++i)
            got_cost += c(i, got[i]);

        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do
        {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += c(i, perm[i]);
            best = std::min(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));

        REQUIRE_THAT(got_cost, Catch::Matchers::WithinAbs(best, 1e-12));
    }
}

TEST_CASE("angle matching pairs estimates with their nearest truth in sine space")
{
    const arma::vec truth{-0.8, 0.1, 0.9};
    const arma::vec est{0.11, 0.88, -0.79}; // permuted truth with small errors
    const std::vector<int> mt = match_by_aoa(est, truth);
    REQUIRE(mt == std::vector<int>{2, 0, 1});
}

TEST_CASE("rmse averages squared matched errors")
{
    const arma::vec truth{1.0, 2.0, 3.0};
    const arma::vec est{3.1, 0.9, 2.2};
    const std::vector<int> mt{1, 2, 0};
    // errors: -0.1, 0.2, 0.1
    REQUIRE_THAT(rmse(est, truth, mt),
                 Catch::Matchers::WithinRel(std::sqrt((0.01 + 0.04 + 0.01) / 3.0), 1e-12));
    REQUIRE_THROWS_AS(rmse(est, truth, {0, 1}), std::invalid_argument);
    REQUIRE_THROWS_AS(rmse(est, truth, {0, 1, 7}), std::invalid_argument);
}

TEST_CASE("channel error is normalized by the true energy across the set")
{
    std::vector<arma::cx_mat> h_true{arma::cx_mat(2, 2, arma::fill::ones),
                                     arma::cx_mat(2, 2, arma::fill::ones)};
    std::vector<arma::cx_mat> h_est = h_true;
    h_est[1] *= cx(0.5, 0.0);
    // error energy 4*0.25 = 1, truth energy 8
    REQUIRE_THAT(nmse(h_est, h_true), Catch::Matchers::WithinRel(1.0 / 8.0, 1e-12));

    REQUIRE_THROWS_AS(nmse(h_est, {arma::cx_mat(2, 2)}), std::invalid_argument);
    std::vector<arma::cx_mat> zero{arma::cx_mat(2, 2, arma::fill::zeros)};
    REQUIRE_THROWS_AS(nmse(zero, zero), std::invalid_argument);
}

TEST_CASE("trial success uses the half-beamwidth sine threshold")
{
    const int m_re = 8;
    const double thr = 1.0 / (2.0 * m_re);
    const arma::vec truth{0.0};

    arma::vec exact{0.0};
    REQUIRE(trial_success(exact, truth, m_re));

    arma::vec at_edge{std::asin(thr * 0.999)};
    REQUIRE(trial_success(at_edge, truth, m_re));

    arma::vec outside{std::asin(thr * 1.01)};
    REQUIRE_FALSE(trial_success(outside, truth, m_re));

    SECTION("rate is the plain success fraction")
    {
        std::vector<arma::vec> est{exact, outside, at_edge, outside};
        std::vector<arma::vec> tru(4, truth);
        REQUIRE_THAT(success_rate(est, tru, m_re), Catch::Matchers::WithinRel(0.5, 1e-12));
    }
}
