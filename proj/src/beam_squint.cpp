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

#include "tensorisac/beam_squint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tensorisac/detail/phase_fit.hpp"
#include "tensorisac/metrics.hpp"

namespace tisac
{

namespace
{

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_pi(double a)
{
    a = std::fmod(a + std::numbers::pi, two_pi);
    if (a < 0.0)
        a += two_pi;
    return a - std::numbers::pi;
}

} // namespace

void SegmentTensorSet::validate() const
{
    if (n_d < 1 || l < 1)
        throw std::invalid_argument("SegmentTensorSet: segment shape must be positive");
    if (per_subcarrier.empty())
        throw std::invalid_argument("SegmentTensorSet: need at least one subcarrier");
    const arma::uword m = per_subcarrier.front().i1();
    for (const Tensor3 &t : per_subcarrier)
        if (t.i1() != m || t.i2() != static_cast<arma::uword>(n_d) || t.i3() != static_cast<arma::uword>(l))
            throw std::invalid_argument("SegmentTensorSet: inconsistently shaped subcarrier tensor");
}

int prop1_max_targets(int m_re, int n_d, int l, int k3)
{
    // Same identifiability formula as the narrowband smoothing bound with the
    // segment mode taking the Vandermonde role.
    return vandermonde_max_targets(m_re, n_d, l, k3);
}

SegmentTensorSet segment_view(const Tensor3 &full, int n_d, int l)
{
    if (n_d < 1 || l < 1)
        throw std::invalid_argument("segment_view: segment shape must be positive");
    if (full.i2() != static_cast<arma::uword>(n_d) * static_cast<arma::uword>(l))
        throw std::invalid_argument("segment_view: second dimension must equal n_d * l");

    SegmentTensorSet out;
    out.n_d = n_d;
    out.l = l;
    const int m = static_cast<int>(full.i1());
    const int k_sub = static_cast<int>(full.i3());
    out.per_subcarrier.reserve(k_sub);
    for (int k = 0; k < k_sub; ++k)
    {
        Tensor3 t(m, n_d, l);
        for (int s = 0; s < l; ++s)
            for (int n = 0; n < n_d; ++n)
                for (int i = 0; i < m; ++i)
                    t(i, n, s) = full(i, s * n_d + n, k);
        out.per_subcarrier.push_back(std::move(t));
    }
    return out;
}

SegmentTensorSet build_segment_tensors(const ScatterSet &scatterers, const TrainingPattern &training,
                                       const ArrayConfig &cfg, double snr_db, std::uint64_t seed,
                                       receiver rx)
{
    training.validate();
    if (!training.segmented())
        throw std::invalid_argument("build_segment_tensors: training must carry a segment layout");
    const Tensor3 full = echo_grid(scatterers, training, cfg, rx, true);
    const Tensor3 noisy = add_noise(full, snr_db, seed).first;
    return segment_view(noisy, training.segment_nd, training.segment_l);
}

ParamEstimates SubcarrierEstimates::at_subcarrier(int k) const
{
    if (k < 1 || k > n_subcarriers())
        throw std::invalid_argument("SubcarrierEstimates: subcarrier index out of range");
    ParamEstimates p;
    p.aoa = aoa.row(k - 1).t();
    p.aod = aod.row(k - 1).t();
    p.doppler = doppler.row(k - 1).t();
    p.delay = delay;
    p.coeff = coeff;
    return p;
}

SubcarrierEstimates run_algorithm2(const SegmentTensorSet &ts, const TrainingPattern &training,
                                   const ArrayConfig &cfg, int q, const Algorithm2Options &opts)
{
    ts.validate();
    training.validate();
    cfg.validate();
    if (!training.segmented() || training.segment_nd != ts.n_d || training.segment_l != ts.l)
        throw std::invalid_argument("run_algorithm2: training segment layout must match the tensor set");
    if (training.n_subcarriers != ts.n_subcarriers())
        throw std::invalid_argument("run_algorithm2: subcarrier count mismatch");
    if (ts.n_subcarriers() < 2)
        throw std::invalid_argument("run_algorithm2: delay fusion needs at least two subcarriers");
    if (q < 1)
        throw std::invalid_argument("run_algorithm2: need at least one component");
    if (opts.delay_grid < 16)
        throw std::invalid_argument("run_algorithm2: delay grid too coarse");
    if (opts.beta_subcarrier < 0 || opts.beta_subcarrier > ts.n_subcarriers())
        throw std::invalid_argument("run_algorithm2: beta_subcarrier out of range");

    const int m = static_cast<int>(ts.per_subcarrier.front().i1());
    const int n_d = ts.n_d;
    const int l = ts.l;
    const int k_sub = ts.n_subcarriers();
    const int k3 = opts.k3 > 0 ? opts.k3 : default_k3(l);
    const double dol = cfg.d_over_lambda;
    const double seg_t = static_cast<double>(n_d) * cfg.t_sym;

    const arma::cx_mat p_bar = training.precoder.cols(0, n_d - 1);
    const arma::cx_mat p_conj = arma::conj(p_bar);
    const arma::cx_mat d_bar = p_conj * p_bar.st();
    const detail::TrigPoly den_tp = detail::superdiag_offsets(d_bar);

    SubcarrierEstimates out;
    out.aoa.set_size(k_sub, q);
    out.aod.set_size(k_sub, q);
    out.doppler.set_size(k_sub, q);
    out.amp.set_size(k_sub, q);

    arma::vec ref_phase(q), ref_sin(q);
    for (int kk = 1; kk <= k_sub; ++kk)
    {
        const Tensor3 &tk = ts.per_subcarrier[kk - 1];
        const double fr = training.physical_subcarrier(kk) * cfg.delta_f / cfg.f_c;

        const arma::cx_mat y1t = mode_unfold(tk, 1).st();
        const arma::cx_mat ys = spatial_smooth(y1t, n_d, k3);
        const FactorEstimate fe = esprit_factors(ys, q, m, n_d, l, k3);

        arma::vec th(q), ph(q), nu(q), genp(q);
        for (int c = 0; c < q; ++c)
        {
            genp(c) = std::arg(fe.generators(c));
            nu(c) = genp(c) / (two_pi * seg_t);
            th(c) = estimate_aoa(fe.factors.b1.col(c), cfg, fr);

            // Departure angle from the normalized correlation of the segment
            // profile against the precoded squinted dictionary.
            const arma::cx_vec d = fe.factors.b2.col(c);
            const double d_energy = std::real(arma::cdot(d, d));
            if (!(d_energy > 0.0))
                throw estimation_error(error_kind::degenerate, "run_algorithm2: zero segment profile");
            const arma::cx_vec w = p_conj * d;
            const arma::cx_mat wp = d_energy * d_bar - w * w.t();
            const detail::TrigPoly num_tp = detail::superdiag_offsets(wp);
            const double c_psi = two_pi * dol * (1.0 + fr);
            const double psi = detail::grid_ratio_min(num_tp, den_tp, -c_psi, c_psi, 2048);
            const double s = std::clamp(-psi / c_psi, -1.0 + 1e-12, 1.0 - 1e-12);
            ph(c) = std::asin(s);
        }

        // Least-squares per-subcarrier amplitudes from the rebuilt profiles.
        arma::cx_mat design(tk.numel(), q, arma::fill::none);
        for (int c = 0; c < q; ++c)
        {
            const arma::cx_vec c1 = steering_vector(m, th(c), fr, dol);
            const arma::cx_vec c2 = p_bar.st() * steering_vector(cfg.m_bs, ph(c), fr, dol);
            const cx z_seg = std::polar(1.0, two_pi * nu(c) * seg_t);
            cx *col = design.colptr(c);
            cx zp = 1.0;
            for (int s = 0; s < l; ++s)
            {
                zp *= z_seg;
                for (int n = 0; n < n_d; ++n)
                {
                    const cx s23 = c2(n) * zp;
                    for (int i = 0; i < m; ++i)
                        col[i + m * (n + n_d * s)] = c1(i) * s23;
                }
            }
        }
        const arma::cx_vec vec_y(const_cast<cx *>(tk.memptr()), tk.numel(), true, false);
        arma::cx_mat u, v;
        arma::vec sv;
        if (!arma::svd_econ(u, sv, v, design))
            throw estimation_error(error_kind::numerical_failure, "run_algorithm2: amplitude SVD failed");
        if (sv(q - 1) < 1e-10 * sv(0))
            throw estimation_error(error_kind::ill_conditioned, "run_algorithm2: rank-deficient amplitude fit");
        const arma::cx_vec bbar = v * ((u.t() * vec_y) / arma::conv_to<arma::cx_vec>::from(sv));

        // Align to the first subcarrier's column order: nearest Doppler
        // generator phase, angle proximity separating near-equal generators.
        std::vector<int> perm(q);
        if (kk == 1)
        {
            for (int c = 0; c < q; ++c)
                perm[c] = c;
            ref_phase = genp;
            for (int c = 0; c < q; ++c)
                ref_sin(c) = std::sin(th(c));
        }
        else
        {
            arma::mat cost(q, q);
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j)
                    cost(i, j) = std::abs(wrap_pi(ref_phase(i) - genp(j))) +
                                 std::abs(ref_sin(i) - std::sin(th(j)));
            perm = assign_min_cost(cost);
            for (int i = 0; i < q; ++i)
                if (std::abs(wrap_pi(ref_phase(i) - genp(perm[i]))) > std::numbers::pi / 2.0)
                    throw estimation_error(error_kind::match_failure,
                                           "run_algorithm2: subcarrier column alignment failed");
        }

        for (int i = 0; i < q; ++i)
        {
            out.aoa(kk - 1, i) = th(perm[i]);
            out.aod(kk - 1, i) = ph(perm[i]);
            out.doppler(kk - 1, i) = nu(perm[i]);
            out.amp(kk - 1, i) = bbar(perm[i]);
        }
    }

    // Fuse the delay from the amplitude phase ramp across the band, then
    // de-rotate the amplitudes. With comb training the per-tone phase step
    // covers stride subcarriers, so the unambiguous span shrinks by stride
    // and the search range is capped to a single period.
    const int stride = training.subcarrier_stride;
    const double period = static_cast<double>(cfg.k0) / (cfg.f_s * stride);
    const double psi_lo = -std::min(two_pi, two_pi * cfg.t_cp * cfg.f_s * stride / cfg.k0);
    out.delay.set_size(q);
    out.coeff.set_size(q);
    for (int c = 0; c < q; ++c)
    {
        const arma::cx_vec r = out.amp.col(c);
        if (!(std::real(arma::cdot(r, r)) > 0.0))
            throw estimation_error(error_kind::degenerate, "run_algorithm2: zero amplitude row");
        const double psi = detail::peak_corr_phase(r, psi_lo, 0.0, opts.delay_grid);
        double tau = -psi * period / two_pi;
        tau = std::fmod(tau, period);
        if (tau < 0.0)
            tau += period;
        out.delay(c) = tau;

        const arma::cx_vec derot = r % arma::conj(delay_phase_vector(k_sub, tau, cfg, stride));
        out.coeff(c) = opts.beta_subcarrier == 0 ? cx(arma::mean(derot)) : derot(opts.beta_subcarrier - 1);
    }
    return out;
}

} // namespace tisac
