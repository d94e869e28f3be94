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

#include "tensorisac/vandermonde_cpd.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tensorisac/kernels.hpp"

namespace tisac
{

namespace
{
constexpr double two_pi = 2.0 * std::numbers::pi;
} // namespace

Tensor3 echo_grid(const ScatterSet &scatterers, const TrainingPattern &training, const ArrayConfig &cfg,
                  receiver rx, bool beam_squint)
{
    training.validate();
    scatterers.validate(cfg);
    if (training.precoder.n_rows != static_cast<arma::uword>(cfg.m_bs))
        throw std::invalid_argument("echo_grid: precoder row count must equal m_bs");
    if (training.subcarrier_stride * training.n_subcarriers > cfg.k0)
        throw std::invalid_argument("echo_grid: training comb extends past the subcarrier grid");

    const int m_rx = (rx == receiver::bs) ? cfg.m_re : cfg.m_ue;
    const int n_sym = training.n_symbols;
    const int k_sub = training.n_subcarriers;
    Tensor3 t(m_rx, n_sym, k_sub);

    for (const Scatterer &s : scatterers.scatterers)
    {
        const arma::cx_vec d2 = doppler_phase_vector(n_sym, s.doppler, cfg.t_sym);
        const arma::cx_vec d3 = delay_phase_vector(k_sub, s.delay, cfg, training.subcarrier_stride);
        if (!beam_squint)
        {
            const arma::cx_vec a_rx = steering_vector(m_rx, s.aoa, 0.0, cfg.d_over_lambda);
            const arma::cx_vec g = training.precoder.st() * steering_vector(cfg.m_bs, s.aod, 0.0, cfg.d_over_lambda);
            for (int k = 0; k < k_sub; ++k)
            {
                const cx sk = s.coeff * d3(k);
                for (int n = 0; n < n_sym; ++n)
                    kernels::caxpy(m_rx, sk * g(n) * d2(n), a_rx.memptr(), &t.cube()(0, n, k));
            }
        }
        else
        {
            for (int k = 0; k < k_sub; ++k)
            {
                const double fr = training.physical_subcarrier(k + 1) * cfg.delta_f / cfg.f_c;
                const arma::cx_vec a_rx = steering_vector(m_rx, s.aoa, fr, cfg.d_over_lambda);
                const arma::cx_vec g = training.precoder.st() * steering_vector(cfg.m_bs, s.aod, fr, cfg.d_over_lambda);
                const cx sk = s.coeff * d3(k);
                for (int n = 0; n < n_sym; ++n)
                    kernels::caxpy(m_rx, sk * g(n) * d2(n), a_rx.memptr(), &t.cube()(0, n, k));
            }
        }
    }
    return t;
}

Tensor3 build_echo_tensor(const ScatterSet &scatterers, const TrainingPattern &training, const ArrayConfig &cfg,
                          double snr_db, std::uint64_t seed, receiver rx, bool beam_squint)
{
    Tensor3 clean = echo_grid(scatterers, training, cfg, rx, beam_squint);
    return add_noise(clean, snr_db, seed).first;
}

arma::cx_mat spatial_smooth(const arma::cx_mat &y1t, int n, int k3)
{
    if (n < 1 || y1t.n_rows == 0 || y1t.n_rows % static_cast<arma::uword>(n) != 0)
        throw std::invalid_argument("spatial_smooth: row count must be a multiple of n");
    const int k_blocks = static_cast<int>(y1t.n_rows) / n;
    if (k3 < 2 || k3 > k_blocks)
        throw std::invalid_argument("spatial_smooth: k3 out of range");
    const int l3 = k_blocks - k3 + 1;

    arma::cx_mat out(static_cast<arma::uword>(k3) * n, static_cast<arma::uword>(l3) * y1t.n_cols,
                     arma::fill::none);
    for (int w = 0; w < l3; ++w)
        out.cols(static_cast<arma::uword>(w) * y1t.n_cols, static_cast<arma::uword>(w + 1) * y1t.n_cols - 1) =
            y1t.rows(static_cast<arma::uword>(w) * n, static_cast<arma::uword>(w + k3) * n - 1);
    return out;
}

namespace
{

/// out += conj(v_p) * block_p over the p-th length-m block of w: the
/// contraction (v^H kron I_m) w.
arma::cx_vec kron_block_contract(const arma::cx_vec &v, const arma::cx_vec &w, int m)
{
    arma::cx_vec out(m, arma::fill::zeros);
    for (arma::uword p = 0; p < v.n_elem; ++p)
        kernels::caxpy(m, std::conj(v(p)), w.memptr() + p * m, out.memptr());
    return out;
}

arma::cx_vec generator_powers(cx z, int count)
{
    arma::cx_vec v(count, arma::fill::none);
    cx acc = 1.0;
    for (int i = 0; i < count; ++i)
    {
        acc *= z;
        v(i) = acc;
    }
    return v;
}

} // namespace

FactorEstimate esprit_factors(const arma::cx_mat &ys, int q, int m_re, int n, int k, int k3)
{
    if (q < 1)
        throw std::invalid_argument("esprit_factors: rank must be >= 1");
    const int bound = vandermonde_max_targets(m_re, n, k, k3);
    if (q > bound)
        throw estimation_error(error_kind::uniqueness_bound,
                               "esprit_factors: rank " + std::to_string(q) + " exceeds the resolvable bound " +
                                   std::to_string(bound) + " for this geometry");
    const int l3 = k - k3 + 1;
    if (ys.n_rows != static_cast<arma::uword>(k3) * n || ys.n_cols != static_cast<arma::uword>(l3) * m_re)
        throw std::invalid_argument("esprit_factors: smoothed matrix has unexpected shape");

    arma::cx_mat u_full, v_full;
    arma::vec s_full;
    if (!arma::svd_econ(u_full, s_full, v_full, ys))
        throw estimation_error(error_kind::numerical_failure, "esprit_factors: SVD did not converge");
    if (s_full.n_elem < static_cast<arma::uword>(q) || s_full(q - 1) < 1e-12 * s_full(0))
        throw estimation_error(error_kind::ill_conditioned,
                               "esprit_factors: singular value " + std::to_string(q) + " collapsed");

    const arma::cx_mat us = u_full.cols(0, q - 1);
    const arma::vec sv = s_full.subvec(0, q - 1);
    const arma::cx_mat vs = v_full.cols(0, q - 1);

    // Shift invariance across the stacked blocks of the left singular basis.
    const arma::cx_mat u1 = us.rows(0, static_cast<arma::uword>(k3 - 1) * n - 1);
    const arma::cx_mat u2 = us.rows(n, static_cast<arma::uword>(k3) * n - 1);
    arma::cx_mat psi;
    if (!arma::solve(psi, u1, u2))
        throw estimation_error(error_kind::numerical_failure, "esprit_factors: shift-invariance solve failed");

    arma::cx_vec eigval;
    arma::cx_mat eigvec;
    if (!arma::eig_gen(eigval, eigvec, psi))
        throw estimation_error(error_kind::numerical_failure, "esprit_factors: eigendecomposition failed");
    arma::cx_mat eigvec_inv;
    if (!arma::inv(eigvec_inv, eigvec))
        throw estimation_error(error_kind::ill_conditioned, "esprit_factors: defective eigenvector matrix");

    FactorEstimate est;
    est.factors.b1.set_size(m_re, q);
    est.factors.b2.set_size(n, q);
    est.factors.b3.set_size(k, q);
    est.generators.set_size(q);

    for (int c = 0; c < q; ++c)
    {
        const double mag = std::abs(eigval(c));
        if (!(mag > 0.0))
            throw estimation_error(error_kind::numerical_failure, "esprit_factors: zero eigenvalue");
        const cx z = eigval(c) / mag;
        est.generators(c) = z;
        est.factors.b3.col(c) = generator_powers(z, k);

        // Third-mode columns share the eigen index, so the factor columns
        // pair up without any extra matching step.
        const arma::cx_vec u_coord = us * eigvec.col(c);
        est.factors.b2.col(c) = kron_block_contract(generator_powers(z, k3), u_coord, n);

        const arma::cx_vec t_coord = arma::conj(vs) * (sv % eigvec_inv.row(c).st());
        est.factors.b1.col(c) = kron_block_contract(generator_powers(z, l3), t_coord, m_re);
    }
    return est;
}

int kruskal_max_targets(int i1, int i2, int i3)
{
    if (i1 < 1 || i2 < 1 || i3 < 1)
        throw std::invalid_argument("kruskal_max_targets: dimensions must be >= 1");
    const int upper = (i1 + i2 + i3 - 2) / 2;
    for (int q = upper; q >= 1; --q)
        if (std::min(i1, q) + std::min(i2, q) + std::min(i3, q) >= 2 * q + 2)
            return q;
    return 0;
}

int vandermonde_max_targets(int i1, int i2, int i3, int k3)
{
    if (i1 < 1 || i2 < 1 || i3 < 1)
        throw std::invalid_argument("vandermonde_max_targets: dimensions must be >= 1");
    if (k3 < 2 || k3 > i3)
        throw std::invalid_argument("vandermonde_max_targets: k3 out of range");
    return std::min(i2 * (k3 - 1), i1 * (i3 - k3 + 1));
}

int default_k3(int k)
{
    if (k < 3)
        throw std::invalid_argument("default_k3: need at least 3 third-mode slices");
    return (k + 2) / 2; // ceil((k + 1) / 2)
}

ResolvableTable resolvable_table(int m_re, int k, const std::vector<int> &n_values,
                                 const std::vector<int> &k3_values)
{
    if (n_values.empty())
        throw std::invalid_argument("resolvable_table: need at least one symbol count");
    ResolvableTable t;
    t.n_values = n_values;
    t.k3_values = k3_values;
    for (int n : n_values)
        t.baseline_row.push_back(kruskal_max_targets(m_re, n, k));
    for (int k3 : k3_values)
    {
        std::vector<int> row;
        for (int n : n_values)
            row.push_back(vandermonde_max_targets(m_re, n, k, k3));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string table_csv(const ResolvableTable &t)
{
    std::ostringstream os;
    os << "n";
    for (int n : t.n_values)
        os << ',' << n;
    os << '\n';
    os << "kruskal";
    for (int v : t.baseline_row)
        os << ',' << v;
    os << '\n';
    for (std::size_t i = 0; i < t.rows.size(); ++i)
    {
        os << "smoothed_k3_" << t.k3_values[i];
        for (int v : t.rows[i])
            os << ',' << v;
        os << '\n';
    }
    return os.str();
}

bool smoothing_rank_ok(const FactorTriple &truth, int k3)
{
    truth.validate();
    const int k = static_cast<int>(truth.b3.n_rows);
    if (k3 < 2 || k3 > k)
        throw std::invalid_argument("smoothing_rank_ok: k3 out of range");
    const int l3 = k - k3 + 1;
    const int q = truth.q();

    auto full_col_rank = [q](const arma::cx_mat &m) {
        const arma::vec s = arma::svd(m);
        if (s.n_elem < static_cast<arma::uword>(q))
            return false;
        return s(q - 1) > 1e-9 * s(0);
    };
    const arma::cx_mat left = khatri_rao(truth.b3.rows(0, k3 - 1), truth.b2);
    const arma::cx_mat right = khatri_rao(truth.b3.rows(0, l3 - 1), truth.b1);
    return full_col_rank(left) && full_col_rank(right);
}

} // namespace tisac
