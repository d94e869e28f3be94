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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tensorisac/tensor3.hpp"

using namespace tisac;

namespace
{

FactorTriple random_factors(arma::uword i1, arma::uword i2, arma::uword i3, int q, unsigned seed)
{
    arma::arma_rng::set_seed(seed);
    FactorTriple f;
    f.b1 = arma::cx_mat(i1, q, arma::fill::randn);
    f.b2 = arma::cx_mat(i2, q, arma::fill::randn);
    f.b3 = arma::cx_mat(i3, q, arma::fill::randn);
    return f;
}

// The slow-but-obvious reconstruction the fast path must agree with.
Tensor3 triple_loop(const FactorTriple &f)
{
    Tensor3 t(f.b1.n_rows, f.b2.n_rows, f.b3.n_rows);
    for (arma::uword i = 0; i < t.i1(); ++i)
        for (arma::uword j = 0; j < t.i2(); ++j)
            for (arma::uword k = 0; k < t.i3(); ++k)
            {
                cx acc(0.0, 0.0);
                for (arma::uword q = 0; q < f.b1.n_cols; ++q)
                    acc += f.b1(i, q) * f.b2(j, q) * f.b3(k, q);
                t(i, j, k) = acc;
            }
    return t;
}

double rel_err(const arma::cx_mat &a, const arma::cx_mat &b)
{
    return arma::norm(a - b, "fro") / std::max(1e-300, arma::norm(b, "fro"));
}

} // namespace

TEST_CASE("memory layout runs mode-1 fastest, then mode-2, then mode-3")
{
    Tensor3 t(2, 3, 4);
    int v = 0;
    for (arma::uword k = 0; k < 4; ++k)
        for (arma::uword j = 0; j < 3; ++j)
            for (arma::uword i = 0; i < 2; ++i)
                t(i, j, k) = cx(v++, 0.0);

    const cx *p = t.memptr();
    for (arma::uword k = 0; k < 4; ++k)
        for (arma::uword j = 0; j < 3; ++j)
            for (arma::uword i = 0; i < 2; ++i)
                REQUIRE(p[i + 2 * j + 6 * k] == t(i, j, k));
}

TEST_CASE("cpd_reconstruct agrees with the triple-loop oracle")
{
    for (int c = 0; c < 20; ++c)
    {
        const FactorTriple f = random_factors(4 + c % 3, 5, 6, 1 + c % 4, 500 + c);
        const Tensor3 fast = cpd_reconstruct(f);
        const Tensor3 slow = triple_loop(f);
        double num = 0.0, den = 0.0;
        for (arma::uword i = 0; i < fast.numel(); ++i)
        {
            num += std::norm(fast.memptr()[i] - slow.memptr()[i]);
            den += std::norm(slow.memptr()[i]);
        }
        REQUIRE(std::sqrt(num / den) < 1e-12);
    }
}

TEST_CASE("khatri_rao column q is kron of the q-th columns")
{
    arma::arma_rng::set_seed(7);
    const arma::cx_mat a(3, 4, arma::fill::randn), b(5, 4, arma::fill::randn);
    const arma::cx_mat kr = khatri_rao(a, b);
    REQUIRE(kr.n_rows == 15);
    REQUIRE(kr.n_cols == 4);
    for (arma::uword q = 0; q < 4; ++q)
        REQUIRE(rel_err(kr.col(q), arma::kron(a.col(q), b.col(q))) < 1e-14);
}

TEST_CASE("mode unfoldings satisfy the Khatri-Rao factor identities")
{
    for (int c = 0; c < 30; ++c)
    {
        const FactorTriple f = random_factors(3 + c % 4, 4 + c % 3, 5 + c % 2, 2 + c % 3, 900 + c);
        const Tensor3 t = cpd_reconstruct(f);
        CHECK(rel_err(mode_unfold(t, 1).st(), khatri_rao(f.b3, f.b2) * f.b1.st()) < 1e-12);
        CHECK(rel_err(mode_unfold(t, 2).st(), khatri_rao(f.b1, f.b3) * f.b2.st()) < 1e-12);
        CHECK(rel_err(mode_unfold(t, 3).st(), khatri_rao(f.b2, f.b1) * f.b3.st()) < 1e-12);
    }
}

TEST_CASE("refold inverts mode_unfold in every mode")
{
    arma::arma_rng::set_seed(11);
    Tensor3 t(arma::cx_cube(4, 5, 6, arma::fill::randn));
    for (int mode : {1, 2, 3})
    {
        const Tensor3 back = refold(mode_unfold(t, mode), mode, 4, 5, 6);
        double diff = 0.0;
        for (arma::uword i = 0; i < t.numel(); ++i)
            diff += std::norm(back.memptr()[i] - t.memptr()[i]);
        REQUIRE(diff == 0.0);
    }
}

TEST_CASE("factor validation rejects inconsistent column counts")
{
    FactorTriple f = random_factors(3, 4, 5, 3, 2);
    REQUIRE_NOTHROW(f.validate());
    f.b2 = f.b2.cols(0, 1);
    REQUIRE_THROWS_AS(f.validate(), std::invalid_argument);
}

TEST_CASE("add_noise hits the requested signal-to-noise energy ratio")
{
    arma::arma_rng::set_seed(21);
    Tensor3 t(arma::cx_cube(16, 16, 8, arma::fill::randn));
    const double snr_db = 13.0;

    const auto [noisy, noise_energy] = add_noise(t, snr_db, 424242);
    double sig = 0.0, diff = 0.0;
    for (arma::uword i = 0; i < t.numel(); ++i)
    {
        sig += std::norm(t.memptr()[i]);
        diff += std::norm(noisy.memptr()[i] - t.memptr()[i]);
    }
    REQUIRE_THAT(diff, Catch::Matchers::WithinRel(noise_energy, 1e-12));
    // 2048 complex samples: the realized ratio concentrates within a few
    // percent of the target.
    REQUIRE_THAT(10.0 * std::log10(sig / diff), Catch::Matchers::WithinAbs(snr_db, 0.5));

    SECTION("deterministic in the seed")
    {
        const auto [again, e2] = add_noise(t, snr_db, 424242);
        REQUIRE(e2 == noise_energy);
        for (arma::uword i = 0; i < t.numel(); ++i)
            REQUIRE(again.memptr()[i] == noisy.memptr()[i]);
    }
    SECTION("a different seed draws different noise")
    {
        const auto [other, e3] = add_noise(t, snr_db, 424243);
        (void)e3;
        REQUIRE(other.memptr()[0] != noisy.memptr()[0]);
    }
    SECTION("infinite SNR passes the tensor through")
    {
        const auto [clean, e0] = add_noise(t, std::numeric_limits<double>::infinity(), 99);
        REQUIRE(e0 == 0.0);
        for (arma::uword i = 0; i < t.numel(); ++i)
            REQUIRE(clean.memptr()[i] == t.memptr()[i]);
    }
}

TEST_CASE("tensor save/load round-trips exactly and rejects corrupt headers")
{
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "tisac_tensor_roundtrip.bin";

    arma::arma_rng::set_seed(33);
    Tensor3 t(arma::cx_cube(3, 7, 5, arma::fill::randn));
    save_tensor(t, path.string());
    const Tensor3 back = load_tensor(path.string());
    REQUIRE(back.i1() == 3);
    REQUIRE(back.i2() == 7);
    REQUIRE(back.i3() == 5);
    for (arma::uword i = 0; i < t.numel(); ++i)
        REQUIRE(back.memptr()[i] == t.memptr()[i]);

    std::ofstream bad(path, std::ios::binary | std::ios::trunc);
    bad << "not a tensor file";
    bad.close();
    REQUIRE_THROWS(load_tensor(path.string()));
    fs::remove(path);
}
