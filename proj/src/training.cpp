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

#include "tensorisac/training.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace tisac
{

void TrainingPattern::validate() const
{
    if (n_symbols < 1 || n_subcarriers < 1)
        throw std::invalid_argument("TrainingPattern: symbol/subcarrier counts must be >= 1");
    if (precoder.n_cols != static_cast<arma::uword>(n_symbols) || precoder.n_rows < 1)
        throw std::invalid_argument("TrainingPattern: precoder must be m_bs x n_symbols");
    if (pilots.n_elem != static_cast<arma::uword>(n_subcarriers))
        throw std::invalid_argument("TrainingPattern: pilot count must equal n_subcarriers");
    if (subcarrier_stride < 1)
        throw std::invalid_argument("TrainingPattern: subcarrier stride must be >= 1");

    constexpr double tol = 1e-9;
    for (const cx &v : precoder)
        if (std::abs(std::abs(v) - 1.0) > tol)
            throw std::invalid_argument("TrainingPattern: precoder entries must be unit modulus");
    for (const cx &v : pilots)
        if (std::abs(std::abs(v) - 1.0) > tol)
            throw std::invalid_argument("TrainingPattern: pilots must be unit modulus");

    if (segment_nd != 0 || segment_l != 0)
    {
        if (segment_nd < 1 || segment_l < 1 || segment_nd * segment_l != n_symbols)
            throw std::invalid_argument("TrainingPattern: segment dims must satisfy n_d * l = n_symbols");
        const arma::cx_mat base = precoder.cols(0, segment_nd - 1);
        for (int l = 1; l < segment_l; ++l)
        {
            const arma::cx_mat block = precoder.cols(l * segment_nd, (l + 1) * segment_nd - 1);
            if (arma::abs(block - base).max() > tol)
                throw std::invalid_argument("TrainingPattern: segmented precoder must repeat the base block");
        }
    }
}

namespace
{

arma::cx_mat unit_circle_matrix(std::mt19937_64 &rng, int rows, int cols)
{
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    arma::cx_mat m(rows, cols, arma::fill::none);
    for (arma::uword c = 0; c < m.n_cols; ++c)
        for (arma::uword r = 0; r < m.n_rows; ++r)
            m(r, c) = std::polar(1.0, phase(rng));
    return m;
}

} // namespace

TrainingPattern make_training(std::uint64_t seed, int m_bs, int n_symbols, int n_subcarriers,
                              int subcarrier_stride)
{
    if (m_bs < 1 || n_symbols < 1 || n_subcarriers < 1)
        throw std::invalid_argument("make_training: all dimensions must be >= 1");
    std::mt19937_64 rng(derive_seed(seed, 0x7124111u));
    TrainingPattern t;
    t.precoder = unit_circle_matrix(rng, m_bs, n_symbols);
    t.pilots = unit_circle_matrix(rng, n_subcarriers, 1).col(0);
    t.n_symbols = n_symbols;
    t.n_subcarriers = n_subcarriers;
    t.subcarrier_stride = subcarrier_stride;
    t.validate();
    return t;
}

arma::cx_mat segment_precoder(const arma::cx_mat &base, int l)
{
    if (base.n_elem == 0 || l < 1)
        throw std::invalid_argument("segment_precoder: base must be non-empty and l >= 1");
    return arma::repmat(base, 1, l);
}

TrainingPattern make_segment_training(std::uint64_t seed, int m_bs, int n_d, int l, int n_subcarriers,
                                      int subcarrier_stride)
{
    if (m_bs < 1 || n_d < 1 || l < 1 || n_subcarriers < 1)
        throw std::invalid_argument("make_segment_training: all dimensions must be >= 1");
    std::mt19937_64 rng(derive_seed(seed, 0x7124112u));
    TrainingPattern t;
    t.precoder = segment_precoder(unit_circle_matrix(rng, m_bs, n_d), l);
    t.pilots = unit_circle_matrix(rng, n_subcarriers, 1).col(0);
    t.n_symbols = n_d * l;
    t.n_subcarriers = n_subcarriers;
    t.segment_nd = n_d;
    t.segment_l = l;
    t.subcarrier_stride = subcarrier_stride;
    t.validate();
    return t;
}

} // namespace tisac
