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

#include "tensorisac/signal_model.hpp"

#include <cmath>
#include <random>

#include "tensorisac/kernels.hpp"

namespace tisac
{

// ---------- ArrayConfig ----------

ArrayConfig ArrayConfig::make(int m_bs, int m_re, int m_ue, double f_c, double f_s, int k0,
                              double cp_fraction)
{
    ArrayConfig c;
    c.m_bs = m_bs;
    c.m_re = m_re;
    c.m_ue = m_ue;
    c.f_c = f_c;
    c.f_s = f_s;
    c.k0 = k0;
    c.delta_f = f_s / static_cast<double>(k0);
    c.t_cp = cp_fraction / c.delta_f;
    c.t_sym = 1.0 / c.delta_f + c.t_cp;
    c.validate();
    return c;
}

void ArrayConfig::validate() const
{
    if (m_bs < 1 || m_re < 1 || m_ue < 1)
        throw std::invalid_argument("ArrayConfig: antenna counts must be >= 1");
    if (k0 < 1)
        throw std::invalid_argument("ArrayConfig: subcarrier count must be >= 1");
    if (!(f_s > 0.0) || !(f_c > 0.0))
        throw std::invalid_argument("ArrayConfig: f_c and f_s must be positive");
    if (std::abs(delta_f * k0 - f_s) > 1e-12 * f_s)
        throw std::invalid_argument("ArrayConfig: delta_f * k0 must equal f_s");
    if (!(t_sym > t_cp) || t_cp < 0.0)
        throw std::invalid_argument("ArrayConfig: need t_sym > t_cp >= 0");
    if (!(d_over_lambda > 0.0))
        throw std::invalid_argument("ArrayConfig: d_over_lambda must be positive");
}

// ---------- ScatterSet ----------

void ScatterSet::validate(const ArrayConfig &cfg) const
{
    if (scatterers.empty())
        throw std::invalid_argument("ScatterSet: empty");
    constexpr double half_pi = 1.5707963267948966;
    for (const auto &s : scatterers)
    {
        if (s.delay < 0.0 || s.delay > cfg.t_cp)
            throw std::invalid_argument("ScatterSet: delay outside [0, t_cp]");
        if (std::abs(s.aoa) >= half_pi || std::abs(s.aod) >= half_pi)
            throw std::invalid_argument("ScatterSet: angle outside (-pi/2, pi/2)");
        if (std::abs(s.doppler) * cfg.t_sym >= 0.5)
            throw std::invalid_argument("ScatterSet: Doppler ambiguous (|doppler|*t_sym >= 1/2)");
    }
    // pairwise generator separation; phases live in [0, 2*pi)
    const double scale = 2.0 * M_PI * cfg.f_s / cfg.k0;
    for (std::size_t i = 0; i < scatterers.size(); ++i)
        for (std::size_t j = i + 1; j < scatterers.size(); ++j)
        {
            double dp = std::remainder(scale * (scatterers[i].delay - scatterers[j].delay), 2.0 * M_PI);
            if (std::abs(dp) < 1e-9 * 2.0 * M_PI)
                throw std::invalid_argument("ScatterSet: coinciding delay generators");
        }
}

// ---------- steering / phase builders ----------

arma::cx_vec steering_vector(int m, double angle, double freq_ratio, double d_over_lambda)
{
    if (m < 1)
        throw std::invalid_argument("steering_vector: m must be >= 1");
    arma::cx_vec a(m);
    const double dphi = -2.0 * M_PI * (1.0 + freq_ratio) * d_over_lambda * std::sin(angle);
    kernels::phase_ramp(static_cast<std::size_t>(m), 0.0, dphi, a.memptr());
    return a;
}

arma::cx_vec delay_phase_vector(int k_sub, double delay, const ArrayConfig &cfg, int stride)
{
    if (stride < 1)
        throw std::invalid_argument("delay_phase_vector: stride must be >= 1");
    arma::cx_vec v(k_sub);
    const double dphi = -2.0 * M_PI * delay * cfg.f_s * stride / cfg.k0;
    kernels::phase_ramp(static_cast<std::size_t>(k_sub), dphi, dphi, v.memptr());
    return v;
}

arma::cx_vec doppler_phase_vector(int n, double doppler, double t_sym)
{
    arma::cx_vec v(n);
    const double dphi = 2.0 * M_PI * doppler * t_sym;
    kernels::phase_ramp(static_cast<std::size_t>(n), dphi, dphi, v.memptr());
    return v;
}

// ---------- channel matrices ----------

static arma::cx_mat channel_matrix(const ScatterSet &s, int n, int k, const ArrayConfig &cfg,
                                   bool beam_squint, int m_rx)
{
    if (k < 1 || k > cfg.k0)
        throw std::invalid_argument("channel: subcarrier index out of range");
    if (n < 1)
        throw std::invalid_argument("channel: symbol index must be >= 1");
    const double fr = beam_squint ? k * cfg.delta_f / cfg.f_c : 0.0;
    arma::cx_mat h(m_rx, cfg.m_bs, arma::fill::zeros);
    for (const auto &sc : s.scatterers)
    {
        const cx phase = sc.coeff *
                         std::polar(1.0, -2.0 * M_PI * sc.delay * cfg.f_s * k / cfg.k0) *
                         std::polar(1.0, 2.0 * M_PI * n * sc.doppler * cfg.t_sym);
        const arma::cx_vec a_rx = steering_vector(m_rx, sc.aoa, fr, cfg.d_over_lambda);
        const arma::cx_vec a_tx = steering_vector(cfg.m_bs, sc.aod, fr, cfg.d_over_lambda);
        // rank-one accumulation column by column
        for (int j = 0; j < cfg.m_bs; ++j)
            kernels::caxpy(static_cast<std::size_t>(m_rx), phase * a_tx(j), a_rx.memptr(),
                           h.colptr(j));
    }
    return h;
}

arma::cx_mat sensing_channel(const ScatterSet &s, int n, int k, const ArrayConfig &cfg, bool beam_squint)
{
    return channel_matrix(s, n, k, cfg, beam_squint, cfg.m_re);
}

arma::cx_mat comm_channel(const ScatterSet &s, int n, int k, const ArrayConfig &cfg, bool beam_squint)
{
    return channel_matrix(s, n, k, cfg, beam_squint, cfg.m_ue);
}

// ---------- scenario generation ----------

ScatterSet generate_scenario(std::uint64_t seed, int count, const ArrayConfig &cfg,
                             const ScenarioBounds &bounds)
{
    if (count < 1)
        throw std::invalid_argument("generate_scenario: count must be >= 1");
    if (bounds.delay_max < 0.0 || bounds.delay_max > cfg.t_cp)
        throw std::invalid_argument("generate_scenario: delay_max must lie in [0, t_cp]");
    std::mt19937_64 rng(derive_seed(seed, 0x5C0FFEEULL));
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::uniform_real_distribution<double> uangle(-bounds.angle_bound, bounds.angle_bound);
    std::uniform_real_distribution<double> udelay(0.0, bounds.delay_max > 0.0 ? bounds.delay_max : cfg.t_cp);
    std::uniform_real_distribution<double> uvel(-bounds.v_max, bounds.v_max);
    std::uniform_real_distribution<double> unupath(-0.5 * bounds.nu_max, 0.5 * bounds.nu_max);

    const bool is_target = bounds.kind != scatter_kind::multipaths;
    const int total = count + (is_target ? bounds.interferers : 0);

    ScatterSet set;
    set.kind = bounds.kind;
    if (is_target && bounds.interferers > 0)
        set.kind = scatter_kind::targets_with_interferers;
    set.scatterers.resize(total);
    for (auto &sc : set.scatterers)
    {
        sc.coeff = cx(gauss(rng), gauss(rng));
        sc.aoa = uangle(rng);
        sc.aod = uangle(rng);
        sc.doppler = is_target ? 2.0 * uvel(rng) * cfg.f_c / speed_of_light : unupath(rng);
    }

    // draw delays until every generator pair is separated (degenerate draws
    // are measure zero, but floating point makes them possible)
    const double scale = 2.0 * M_PI * cfg.f_s / cfg.k0;
    for (int attempt = 0; attempt < 256; ++attempt)
    {
        for (auto &sc : set.scatterers)
            sc.delay = udelay(rng);
        bool ok = true;
        for (int i = 0; i < total && ok; ++i)
            for (int j = i + 1; j < total && ok; ++j)
            {
                double dp = std::remainder(scale * (set.scatterers[i].delay - set.scatterers[j].delay),
                                           2.0 * M_PI);
                ok = std::abs(dp) >= 1e-9 * 2.0 * M_PI;
            }
        if (ok)
            break;
    }
    set.validate(cfg);
    return set;
}

} // namespace tisac
