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

#include "tensorisac/param_extract.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tensorisac/detail/phase_fit.hpp"

namespace tisac
{

namespace
{

constexpr double two_pi = 2.0 * std::numbers::pi;

using detail::TrigPoly;
using detail::newton_ratio_min;
using detail::ratio_at;
using detail::superdiag_offsets;

/// On-circle stationary phases of the quadratic form: roots of
/// p(z) = sum_m m c_m z^{m + M - 1}, m = -(M-1) .. M-1.
std::vector<double> stationary_phases(const TrigPoly &tp)
{
    const arma::uword m_dim = tp.c.n_elem;
    arma::cx_vec asc(2 * m_dim - 1, arma::fill::zeros);
    for (arma::uword m = 1; m < m_dim; ++m)
    {
        asc(m_dim - 1 + m) = static_cast<double>(m) * tp.c(m);
        asc(m_dim - 1 - m) = -static_cast<double>(m) * std::conj(tp.c(m));
    }
    const double amax = asc.n_elem ? arma::abs(asc).max() : 0.0;
    if (!(amax > 0.0))
        throw estimation_error(error_kind::degenerate,
                               "polynomial_min_generator: objective has no phase dependence");

    arma::uword lo = 0, hi = asc.n_elem - 1;
    while (hi > lo && std::abs(asc(hi)) <= 1e-14 * amax)
        --hi;
    while (lo < hi && std::abs(asc(lo)) <= 1e-14 * amax)
        ++lo;
    if (hi == lo)
        throw estimation_error(error_kind::degenerate,
                               "polynomial_min_generator: stationary polynomial is constant");

    arma::cx_vec coef = arma::reverse(asc.subvec(lo, hi)); // descending powers
    arma::cx_vec r;
    if (!arma::roots(r, coef))
        throw estimation_error(error_kind::numerical_failure, "polynomial_min_generator: rooting failed");

    std::vector<double> phases;
    for (const cx &z : r)
    {
        const double mag = std::abs(z);
        if (mag > 1e-12 && mag <= 1.0 + 1e-6)
            phases.push_back(std::arg(z));
    }
    if (phases.empty())
        for (const cx &z : r)
            if (std::abs(z) > 1e-12)
                phases.push_back(std::arg(z));
    if (phases.empty())
        throw estimation_error(error_kind::degenerate, "polynomial_min_generator: no usable roots");
    return phases;
}

} // namespace

GeneratorFit polynomial_min_generator(const arma::cx_mat &w, const arma::cx_mat &denom, double scale)
{
    if (w.n_rows != w.n_cols || w.n_rows < 2)
        throw std::invalid_argument("polynomial_min_generator: need a square matrix of order >= 2");
    if (denom.n_rows != w.n_rows || denom.n_cols != w.n_cols)
        throw std::invalid_argument("polynomial_min_generator: denominator shape mismatch");
    if (!(scale > 0.0))
        throw std::invalid_argument("polynomial_min_generator: scale must be positive");

    const TrigPoly num = superdiag_offsets(w);
    const TrigPoly den = superdiag_offsets(denom);

    double best_theta = 0.0;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (double theta : stationary_phases(num))
    {
        const double v = ratio_at(num, den, theta);
        if (v < best_ratio)
        {
            best_ratio = v;
            best_theta = theta;
        }
    }
    if (!std::isfinite(best_ratio))
        throw estimation_error(error_kind::degenerate, "polynomial_min_generator: denominator vanished");

    const double polished =
        newton_ratio_min(num, den, best_theta, 8, std::numbers::pi / (2.0 * static_cast<double>(w.n_rows)));
    const double pv = ratio_at(num, den, polished);
    if (pv < best_ratio)
    {
        best_ratio = pv;
        best_theta = polished;
    }
    return {std::polar(1.0, best_theta), best_ratio / scale};
}

cx polynomial_min_generator(const arma::cx_mat &w)
{
    const arma::cx_mat id = arma::eye<arma::cx_mat>(w.n_rows, w.n_cols);
    return polynomial_min_generator(w, id, 1.0).z;
}

double estimate_aoa(const arma::cx_vec &b1_col, const ArrayConfig &cfg, double freq_ratio)
{
    const int m = static_cast<int>(b1_col.n_elem);
    if (m < 1)
        throw std::invalid_argument("estimate_aoa: empty column");
    if (!(1.0 + freq_ratio > 0.0))
        throw std::invalid_argument("estimate_aoa: freq_ratio must exceed -1");
    const double energy = std::real(arma::cdot(b1_col, b1_col));
    if (!(energy > 0.0))
        throw std::invalid_argument("estimate_aoa: zero column");
    if (m == 1)
        return 0.0; // a single element carries no angle information

    const double dol = cfg.d_over_lambda * (1.0 + freq_ratio);
    auto corr2 = [&](double s) {
        // |b^H a(theta)|^2 with a_i = e^{-j 2 pi dol i s}, s = sin(theta)
        const cx e = std::polar(1.0, -two_pi * dol * s);
        cx p = 1.0, acc = std::conj(b1_col(0));
        for (int i = 1; i < m; ++i)
        {
            p *= e;
            acc += std::conj(b1_col(i)) * p;
        }
        return std::norm(acc);
    };

    constexpr int grid_n = 2048;
    double best_s = 0.0, best_v = -1.0;
    for (int i = 0; i < grid_n; ++i)
    {
        const double s = -1.0 + (2.0 * i + 1.0) / grid_n;
        const double v = corr2(s);
        if (v > best_v)
        {
            best_v = v;
            best_s = s;
        }
    }

    // Local golden-section shrink around the best grid cell.
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_s - 2.0 / grid_n, hi = best_s + 2.0 / grid_n;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = corr2(x1), f2 = corr2(x2);
    for (int it = 0; it < 3; ++it)
    {
        if (f1 > f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = corr2(x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = corr2(x2);
        }
    }
    best_s = (f1 > f2) ? x1 : x2;

    // Curvature polish on the phase psi = -2 pi dol s of the correlation
    // ratio, expressed through the complementary quadratic form so the
    // shared Newton helper applies.
    arma::cx_mat wa = energy * arma::eye<arma::cx_mat>(m, m) - b1_col * b1_col.t();
    const TrigPoly num = superdiag_offsets(wa);
    TrigPoly den;
    den.c.set_size(m);
    den.c.zeros();
    den.c(0) = static_cast<double>(m);

    const double psi0 = -two_pi * dol * best_s;
    const double psi = newton_ratio_min(num, den, psi0, 8, two_pi * dol / grid_n);
    if (ratio_at(num, den, psi) < ratio_at(num, den, psi0))
        best_s = -psi / (two_pi * dol);

    best_s = std::clamp(best_s, -1.0 + 1e-12, 1.0 - 1e-12);
    return std::asin(best_s);
}

double estimate_delay(cx z_tau, const ArrayConfig &cfg, int stride)
{
    if (std::abs(std::abs(z_tau) - 1.0) > 1e-9)
        throw std::invalid_argument("estimate_delay: generator must be unit modulus");
    if (stride < 1)
        throw std::invalid_argument("estimate_delay: stride must be >= 1");
    const double period = static_cast<double>(cfg.k0) / (cfg.f_s * stride);
    double tau = -std::arg(z_tau) * period / two_pi;
    if (tau < 0.0)
        tau += period;
    if (tau >= period)
        tau -= period;
    return tau;
}

AlternationResult alternate_aod_doppler(const arma::cx_vec &b2_col, const TrainingPattern &training,
                                        const ArrayConfig &cfg, int i_iter)
{
    if (i_iter < 1)
        throw std::invalid_argument("alternate_aod_doppler: need at least one iteration");
    training.validate();
    const int n_sym = training.n_symbols;
    if (b2_col.n_elem != static_cast<arma::uword>(n_sym))
        throw std::invalid_argument("alternate_aod_doppler: column length must equal n_symbols");
    const double b2_energy = std::real(arma::cdot(b2_col, b2_col));
    if (!(b2_energy > 0.0))
        throw std::invalid_argument("alternate_aod_doppler: zero column");

    const arma::cx_mat &p = training.precoder;
    const arma::cx_mat p_conj = arma::conj(p);
    const arma::cx_mat d_mat = p_conj * p.st(); // a^H (P* P^T) a = ||P^T a||^2
    const double dol = cfg.d_over_lambda;

    AlternationResult res;
    double prev_phi = 0.0, prev_nu = 0.0;
    for (int it = 0; it < i_iter; ++it)
    {
        // Departure angle with the current Doppler rotation removed.
        const arma::cx_vec d = b2_col % arma::conj(doppler_phase_vector(n_sym, res.doppler, cfg.t_sym));
        const arma::cx_vec w = p_conj * d;
        const double d_energy = std::real(arma::cdot(d, d));
        const arma::cx_mat wp = d_energy * d_mat - w * w.t();
        const GeneratorFit fit_phi = polynomial_min_generator(wp, d_mat, d_energy);

        double s = -std::arg(fit_phi.z) / (two_pi * dol);
        if (std::abs(s) > 1.0)
        {
            s = std::clamp(s, -1.0, 1.0);
            res.clamped = true;
        }
        res.aod = std::asin(std::clamp(s, -1.0 + 1e-12, 1.0 - 1e-12));

        // Doppler generator given the refreshed angle.
        const arma::cx_vec g = p.st() * steering_vector(cfg.m_bs, res.aod, 0.0, dol);
        const arma::cx_vec u = arma::conj(g) % b2_col;
        const arma::cx_mat dq = arma::diagmat(arma::conv_to<arma::cx_vec>::from(arma::square(arma::abs(g))));
        const arma::cx_mat wq = b2_energy * dq - u * u.t();
        const GeneratorFit fit_nu = polynomial_min_generator(wq, dq, b2_energy);
        res.doppler = std::arg(fit_nu.z) / (two_pi * cfg.t_sym);
        res.trace.push_back(fit_nu.objective);

        if (it > 0 && std::abs(res.aod - prev_phi) + std::abs(res.doppler - prev_nu) * cfg.t_sym < 1e-10)
            break;
        prev_phi = res.aod;
        prev_nu = res.doppler;
    }
    return res;
}

arma::cx_vec estimate_coefficients(const Tensor3 &t, const ParamEstimates &params,
                                   const TrainingPattern &training, const ArrayConfig &cfg)
{
    const int q = params.q();
    if (q < 1 || params.aod.n_elem != static_cast<arma::uword>(q) ||
        params.doppler.n_elem != static_cast<arma::uword>(q) ||
        params.delay.n_elem != static_cast<arma::uword>(q))
        throw std::invalid_argument("estimate_coefficients: need all angle/delay/Doppler estimates");
    const int m = static_cast<int>(t.i1());
    const int n_sym = static_cast<int>(t.i2());
    const int k_sub = static_cast<int>(t.i3());
    if (n_sym != training.n_symbols || k_sub != training.n_subcarriers)
        throw std::invalid_argument("estimate_coefficients: tensor/training shape mismatch");

    arma::cx_mat design(t.numel(), q, arma::fill::none);
    for (int c = 0; c < q; ++c)
    {
        const arma::cx_vec b1 = steering_vector(m, params.aoa(c), 0.0, cfg.d_over_lambda);
        const arma::cx_vec b2 = doppler_phase_vector(n_sym, params.doppler(c), cfg.t_sym) %
                                (training.precoder.st() * steering_vector(cfg.m_bs, params.aod(c), 0.0, cfg.d_over_lambda));
        const arma::cx_vec b3 = delay_phase_vector(k_sub, params.delay(c), cfg, training.subcarrier_stride);
        cx *col = design.colptr(c);
        for (int k = 0; k < k_sub; ++k)
            for (int j = 0; j < n_sym; ++j)
            {
                const cx s23 = b2(j) * b3(k);
                for (int i = 0; i < m; ++i)
                    col[i + m * (j + n_sym * k)] = b1(i) * s23;
            }
    }

    const arma::cx_vec vec_y(const_cast<cx *>(t.memptr()), t.numel(), true, false);
    arma::cx_mat u, v;
    arma::vec s;
    if (!arma::svd_econ(u, s, v, design))
        throw estimation_error(error_kind::numerical_failure, "estimate_coefficients: SVD failed");
    if (s(q - 1) < 1e-10 * s(0))
        throw estimation_error(error_kind::ill_conditioned, "estimate_coefficients: rank-deficient design");
    return v * ((u.t() * vec_y) / arma::conv_to<arma::cx_vec>::from(s));
}

ParamEstimates run_algorithm1(const Tensor3 &t, const TrainingPattern &training, const ArrayConfig &cfg,
                              int q, const Algorithm1Options &opts)
{
    training.validate();
    if (t.i2() != static_cast<arma::uword>(training.n_symbols) ||
        t.i3() != static_cast<arma::uword>(training.n_subcarriers))
        throw std::invalid_argument("run_algorithm1: tensor/training shape mismatch");
    const int k_sub = static_cast<int>(t.i3());
    const int k3 = opts.k3 > 0 ? opts.k3 : default_k3(k_sub);

    const arma::cx_mat y1t = mode_unfold(t, 1).st();
    const arma::cx_mat ys = spatial_smooth(y1t, static_cast<int>(t.i2()), k3);
    const FactorEstimate fe = esprit_factors(ys, q, static_cast<int>(t.i1()), static_cast<int>(t.i2()), k_sub, k3);

    ParamEstimates out;
    out.aoa.set_size(q);
    out.delay.set_size(q);
    if (opts.with_aod_doppler)
    {
        out.aod.set_size(q);
        out.doppler.set_size(q);
    }
    for (int c = 0; c < q; ++c)
    {
        out.aoa(c) = estimate_aoa(fe.factors.b1.col(c), cfg);
        out.delay(c) = estimate_delay(fe.generators(c), cfg, training.subcarrier_stride);
        if (opts.with_aod_doppler)
        {
            const AlternationResult ar = alternate_aod_doppler(fe.factors.b2.col(c), training, cfg, opts.i_iter);
            out.aod(c) = ar.aod;
            out.doppler(c) = ar.doppler;
            out.any_clamped = out.any_clamped || ar.clamped;
            out.traces.push_back(ar.trace);
        }
    }
    if (opts.with_aod_doppler && opts.with_coefficients)
        out.coeff = estimate_coefficients(t, out, training, cfg);
    return out;
}

arma::cx_mat reconstruct_channel(const ParamEstimates &params, const ArrayConfig &cfg, int n, int k,
                                 bool beam_squint)
{
    if (params.q() < 1 || params.aod.n_elem != params.aoa.n_elem || params.coeff.n_elem != params.aoa.n_elem)
        throw std::invalid_argument("reconstruct_channel: need a complete estimate set");
    ScatterSet set;
    set.kind = scatter_kind::multipaths;
    for (int c = 0; c < params.q(); ++c)
        set.scatterers.push_back(
            {params.coeff(c), params.aoa(c), params.aod(c), params.delay(c), params.doppler(c)});
    return comm_channel(set, n, k, cfg, beam_squint);
}

} // namespace tisac
