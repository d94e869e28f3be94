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

#include "tensorisac/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tensorisac/baselines.hpp"
#include "tensorisac/beam_squint.hpp"
#include "tensorisac/detail/phase_fit.hpp"
#include "tensorisac/metrics.hpp"
#include "tensorisac/param_extract.hpp"

namespace tisac
{

namespace
{

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double qnan = std::numeric_limits<double>::quiet_NaN();

const char *const metric_names[] = {"rmse_aoa",  "rmse_aod",     "rmse_range", "rmse_velocity",
                                    "nmse",      "success_rate", "runtime_s"};

/// Which of the error metrics an algorithm can produce for a problem.
struct MetricPlan
{
    bool aoa = false, aod = false, range = false, velocity = false, nmse = false, success = false;

    bool any_error_metric() const { return aoa || aod || range || velocity || nmse; }
};

bool allowed_by_filter(const std::vector<std::string> &filter, const char *name)
{
    if (filter.empty())
        return true;
    return std::find(filter.begin(), filter.end(), name) != filter.end();
}

MetricPlan plan_for(const std::string &alg, const SweepConfig &sc)
{
    MetricPlan p;
    if (sc.problem == problem_kind::channel)
    {
        if (alg == "alg1" || alg == "als" || alg == "alg2")
            p.nmse = allowed_by_filter(sc.metrics, "nmse");
        return p;
    }
    if (alg == "alg1" || alg == "als" || alg == "alg2")
    {
        p.aoa = allowed_by_filter(sc.metrics, "rmse_aoa");
        p.aod = allowed_by_filter(sc.metrics, "rmse_aod");
        p.range = allowed_by_filter(sc.metrics, "rmse_range");
        p.velocity = allowed_by_filter(sc.metrics, "rmse_velocity");
        p.success = allowed_by_filter(sc.metrics, "success_rate");
    }
    else if (alg == "music")
    {
        p.aoa = allowed_by_filter(sc.metrics, "rmse_aoa");
        p.aod = allowed_by_filter(sc.metrics, "rmse_aod");
        p.success = allowed_by_filter(sc.metrics, "success_rate");
    }
    else if (alg == "mf")
    {
        p.range = allowed_by_filter(sc.metrics, "rmse_range");
        p.velocity = allowed_by_filter(sc.metrics, "rmse_velocity");
    }
    return p;
}

/// Everything shared by all trials of a sweep.
struct SweepContext
{
    TrainingPattern training;
    arma::cx_mat music_aod_dict; ///< precoded departure dictionary (empty unless needed)
    arma::vec music_aod_angles;
};

/// Per-trial ground truth (the first q scatterers; interferers excluded).
struct TrialTruth
{
    arma::vec aoa, aod, delay, doppler;
};

/// Per-trial, per-algorithm outcome; NaN marks a metric not computed.
struct AlgoOutcome
{
    bool ok = false;
    bool success = false;
    double aoa = qnan, aod = qnan, range = qnan, velocity = qnan, nmse_v = qnan;
    double runtime = 0.0;
};

double to_range(double delay_s) { return speed_of_light * delay_s / 2.0; }

arma::vec to_range_vec(const arma::vec &delay_s) { return speed_of_light * delay_s / 2.0; }

double to_velocity_factor(const ArrayConfig &cfg) { return speed_of_light / (2.0 * cfg.f_c); }

/// Delay read off a third-mode profile by correlation against the delay
/// phase ramp over [0, t_cp] (capped to one unambiguous period on a comb),
/// grid plus refinement.
double delay_from_profile(const arma::cx_vec &b3_col, const ArrayConfig &cfg, int stride, int grid_n)
{
    const double psi_lo = -std::min(two_pi, two_pi * cfg.t_cp * cfg.f_s * stride / cfg.k0);
    const double psi = detail::peak_corr_phase(b3_col, psi_lo, 0.0, grid_n);
    const double period = static_cast<double>(cfg.k0) / (cfg.f_s * stride);
    double tau = -psi * period / two_pi;
    tau = std::fmod(tau, period);
    if (tau < 0.0)
        tau += period;
    return tau;
}

/// Departure angle by normalized correlation of a symbol profile against the
/// precoded dictionary, the Doppler rotation left untreated (the classical
/// coupling limitation of unstructured factor estimates).
double aod_from_profile(const arma::cx_vec &b2_col, const arma::cx_mat &p_conj, const arma::cx_mat &d_mat,
                        const detail::TrigPoly &den_tp, double dol)
{
    const double d_energy = std::real(arma::cdot(b2_col, b2_col));
    if (!(d_energy > 0.0))
        throw estimation_error(error_kind::degenerate, "aod_from_profile: zero column");
    const arma::cx_vec w = p_conj * b2_col;
    const arma::cx_mat wp = d_energy * d_mat - w * w.t();
    const detail::TrigPoly num_tp = detail::superdiag_offsets(wp);
    const double c_psi = two_pi * dol;
    const double psi = detail::grid_ratio_min(num_tp, den_tp, -c_psi, c_psi, 2048);
    return std::asin(std::clamp(-psi / c_psi, -1.0 + 1e-12, 1.0 - 1e-12));
}

/// Doppler by correlation against the symbol phase ramp with the departure
/// angle held fixed.
double doppler_from_profile(const arma::cx_vec &b2_col, double aod, const TrainingPattern &training,
                            const ArrayConfig &cfg)
{
    const arma::cx_vec g = training.precoder.st() * steering_vector(cfg.m_bs, aod, 0.0, cfg.d_over_lambda);
    const arma::cx_vec u = b2_col % arma::conj(g);
    const double psi = detail::peak_corr_phase(u, -std::numbers::pi, std::numbers::pi, 2048);
    return psi / (two_pi * cfg.t_sym);
}

std::vector<arma::cx_mat> reconstruct_band(const ParamEstimates &est, const ArrayConfig &cfg, int n_sym,
                                           int k_sub, int stride, bool beam_squint)
{
    std::vector<arma::cx_mat> h;
    h.reserve(k_sub);
    for (int k = 1; k <= k_sub; ++k)
        h.push_back(reconstruct_channel(est, cfg, n_sym, stride * k, beam_squint));
    return h;
}

/// Matched-filter peak assignment in normalized range/velocity coordinates.
std::vector<int> match_range_velocity(const std::vector<RangeVelocity> &peaks, const arma::vec &range_t,
                                      const arma::vec &vel_t, double range_span, double vel_span)
{
    const int q = static_cast<int>(range_t.n_elem);
    arma::mat cost(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            cost(i, j) = std::abs(range_t(i) - peaks[j].range) / range_span +
                         std::abs(vel_t(i) - peaks[j].velocity) / vel_span;
    return assign_min_cost(cost);
}

AlgoOutcome run_alg1(const Tensor3 &t, const SweepContext &ctx, const SweepConfig &sc, int q,
                     const TrialTruth &truth, const std::vector<arma::cx_mat> &h_true, const MetricPlan &plan)
{
    AlgoOutcome out;
    Algorithm1Options o;
    o.k3 = sc.k3;
    o.i_iter = sc.i_iter;
    o.with_aod_doppler = plan.aod || plan.velocity || plan.nmse;
    o.with_coefficients = plan.nmse;
    const ParamEstimates est = run_algorithm1(t, ctx.training, sc.cfg, q, o);

    if (plan.nmse)
    {
        out.nmse_v = nmse(reconstruct_band(est, sc.cfg, sc.n_symbols, sc.n_subcarriers,
                                           sc.subcarrier_stride, false),
                          h_true);
        out.ok = true;
        return out;
    }
    const std::vector<int> mt = match_by_aoa(est.aoa, truth.aoa);
    out.success = trial_success(est.aoa, truth.aoa, sc.cfg.m_re);
    if (plan.aoa)
        out.aoa = rmse(est.aoa, truth.aoa, mt);
    if (plan.aod)
        out.aod = rmse(est.aod, truth.aod, mt);
    if (plan.range)
        out.range = rmse(to_range_vec(est.delay), to_range_vec(truth.delay), mt);
    if (plan.velocity)
        out.velocity = rmse(to_velocity_factor(sc.cfg) * est.doppler, to_velocity_factor(sc.cfg) * truth.doppler, mt);
    out.ok = true;
    return out;
}

AlgoOutcome run_als(const Tensor3 &t, const SweepContext &ctx, const SweepConfig &sc, int q,
                    const TrialTruth &truth, const std::vector<arma::cx_mat> &h_true, const MetricPlan &plan,
                    std::uint64_t seed)
{
    AlgoOutcome out;
    const FactorTriple f = als_cpd(t, q, 200, 1e-8, 3, seed);

    ParamEstimates est;
    est.aoa.set_size(q);
    est.delay.set_size(q);
    for (int c = 0; c < q; ++c)
    {
        est.aoa(c) = estimate_aoa(f.b1.col(c), sc.cfg);
        est.delay(c) = delay_from_profile(f.b3.col(c), sc.cfg, sc.subcarrier_stride, 4096);
    }
    const bool need_aod = plan.aod || plan.velocity || plan.nmse;
    if (need_aod)
    {
        const arma::cx_mat p_conj = arma::conj(ctx.training.precoder);
        const arma::cx_mat d_mat = p_conj * ctx.training.precoder.st();
        const detail::TrigPoly den_tp = detail::superdiag_offsets(d_mat);
        est.aod.set_size(q);
        for (int c = 0; c < q; ++c)
            est.aod(c) = aod_from_profile(f.b2.col(c), p_conj, d_mat, den_tp, sc.cfg.d_over_lambda);
    }
    if (plan.velocity)
    {
        est.doppler.set_size(q);
        for (int c = 0; c < q; ++c)
            est.doppler(c) = doppler_from_profile(f.b2.col(c), est.aod(c), ctx.training, sc.cfg);
    }
    if (plan.nmse)
    {
        // The unstructured baseline rebuilds the channel without a Doppler
        // model; the phase accumulated by the evaluation symbol is the cost.
        est.doppler = arma::zeros(q);
        est.coeff = estimate_coefficients(t, est, ctx.training, sc.cfg);
        out.nmse_v = nmse(reconstruct_band(est, sc.cfg, sc.n_symbols, sc.n_subcarriers,
                                           sc.subcarrier_stride, false),
                          h_true);
        out.ok = true;
        return out;
    }
    const std::vector<int> mt = match_by_aoa(est.aoa, truth.aoa);
    out.success = trial_success(est.aoa, truth.aoa, sc.cfg.m_re);
    if (plan.aoa)
        out.aoa = rmse(est.aoa, truth.aoa, mt);
    if (plan.aod)
        out.aod = rmse(est.aod, truth.aod, mt);
    if (plan.range)
        out.range = rmse(to_range_vec(est.delay), to_range_vec(truth.delay), mt);
    if (plan.velocity)
        out.velocity = rmse(to_velocity_factor(sc.cfg) * est.doppler, to_velocity_factor(sc.cfg) * truth.doppler, mt);
    out.ok = true;
    return out;
}

AlgoOutcome run_music(const Tensor3 &t, const SweepContext &ctx, const SweepConfig &sc, int q,
                      const TrialTruth &truth, const MetricPlan &plan)
{
    AlgoOutcome out;
    const std::vector<double> aoa_list = music_1d(mode_unfold(t, 1), q, 4096, sc.cfg);
    if (static_cast<int>(aoa_list.size()) < q)
        return out; // unresolved spectrum: the trial fails
    arma::vec aoa(q);
    for (int c = 0; c < q; ++c)
        aoa(c) = aoa_list[c];

    arma::vec aod;
    if (plan.aod)
    {
        const std::vector<double> aod_list =
            music_1d(mode_unfold(t, 2), q, ctx.music_aod_dict, ctx.music_aod_angles);
        if (static_cast<int>(aod_list.size()) < q)
            return out;
        aod.set_size(q);
        for (int c = 0; c < q; ++c)
            aod(c) = aod_list[c];
    }

    out.success = trial_success(aoa, truth.aoa, sc.cfg.m_re);
    if (plan.aoa)
        out.aoa = rmse(aoa, truth.aoa, match_by_aoa(aoa, truth.aoa));
    // The two spectral searches are independent, so their peak lists carry no
    // pairing; the departure angles are matched to truth on their own.
    if (plan.aod)
        out.aod = rmse(aod, truth.aod, match_by_aoa(aod, truth.aod));
    out.ok = true;
    return out;
}

AlgoOutcome run_mf(const Tensor3 &t, const SweepConfig &sc, int q, const TrialTruth &truth,
                   const MetricPlan &plan)
{
    AlgoOutcome out;
    const int n_sym = static_cast<int>(t.i2());
    const int k_sub = static_cast<int>(t.i3());
    arma::cx_mat echo(n_sym, k_sub);
    for (int k = 0; k < k_sub; ++k)
        for (int n = 0; n < n_sym; ++n)
            echo(n, k) = t(0, n, k);

    MfGrids grids;
    grids.peaks = q;
    const std::vector<RangeVelocity> peaks = matched_filter_range_velocity(echo, sc.cfg, grids);
    if (static_cast<int>(peaks.size()) < q)
        return out; // merged or missing peaks: the trial fails

    const arma::vec range_t = to_range_vec(truth.delay);
    const arma::vec vel_t = to_velocity_factor(sc.cfg) * truth.doppler;
    const double range_span = to_range(sc.cfg.t_cp);
    const double vel_span = to_velocity_factor(sc.cfg) / sc.cfg.t_sym;
    const std::vector<int> mt = match_range_velocity(peaks, range_t, vel_t, range_span, vel_span);

    arma::vec range_e(q), vel_e(q);
    for (int c = 0; c < q; ++c)
    {
        range_e(c) = peaks[c].range;
        vel_e(c) = peaks[c].velocity;
    }
    if (plan.range)
        out.range = rmse(range_e, range_t, mt);
    if (plan.velocity)
        out.velocity = rmse(vel_e, vel_t, mt);
    out.ok = true;
    return out;
}

AlgoOutcome run_alg2(const SegmentTensorSet &segs, const SweepContext &ctx, const SweepConfig &sc, int q,
                     const TrialTruth &truth, const std::vector<arma::cx_mat> &h_true, const MetricPlan &plan)
{
    AlgoOutcome out;
    Algorithm2Options o;
    o.k3 = sc.segment_k3;
    const SubcarrierEstimates sub = run_algorithm2(segs, ctx.training, sc.cfg, q, o);
    const int k_sub = sub.n_subcarriers();

    // Per-subcarrier estimates are scored independently and the best
    // subcarrier is reported for each metric.
    if (plan.nmse)
    {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= k_sub; ++k)
        {
            const ParamEstimates pk = sub.at_subcarrier(k);
            best = std::min(best, nmse(reconstruct_band(pk, sc.cfg, sc.n_symbols, k_sub,
                                                        sc.subcarrier_stride, true),
                                       h_true));
        }
        out.nmse_v = best;
        out.ok = true;
        return out;
    }

    double best_aoa = qnan, best_aod = qnan, best_range = qnan, best_vel = qnan;
    for (int k = 1; k <= k_sub; ++k)
    {
        const ParamEstimates pk = sub.at_subcarrier(k);
        const std::vector<int> mt = match_by_aoa(pk.aoa, truth.aoa);
        out.success = out.success || trial_success(pk.aoa, truth.aoa, sc.cfg.m_re);
        if (plan.aoa)
        {
            const double v = rmse(pk.aoa, truth.aoa, mt);
            if (std::isnan(best_aoa) || v < best_aoa)
                best_aoa = v;
        }
        if (plan.aod)
        {
            const double v = rmse(pk.aod, truth.aod, mt);
            if (std::isnan(best_aod) || v < best_aod)
                best_aod = v;
        }
        if (plan.range)
        {
            const double v = rmse(to_range_vec(pk.delay), to_range_vec(truth.delay), mt);
            if (std::isnan(best_range) || v < best_range)
                best_range = v;
        }
        if (plan.velocity)
        {
            const double v =
                rmse(to_velocity_factor(sc.cfg) * pk.doppler, to_velocity_factor(sc.cfg) * truth.doppler, mt);
            if (std::isnan(best_vel) || v < best_vel)
                best_vel = v;
        }
    }
    out.aoa = best_aoa;
    out.aod = best_aod;
    out.range = best_range;
    out.velocity = best_vel;
    out.ok = true;
    return out;
}

std::vector<AlgoOutcome> run_trial(const SweepConfig &sc, const SweepContext &ctx, int q, double snr,
                                   int snr_idx, int trial, const std::vector<MetricPlan> &plans)
{
    std::vector<AlgoOutcome> outs(sc.algorithms.size());

    const std::uint64_t scen_seed = derive_seed(sc.seed, snr_idx + 1, trial + 1, 1);
    const std::uint64_t noise_seed = derive_seed(sc.seed, snr_idx + 1, trial + 1, 2);
    const std::uint64_t als_seed = derive_seed(sc.seed, snr_idx + 1, trial + 1, 3);

    Tensor3 noisy;
    SegmentTensorSet segs;
    TrialTruth truth;
    std::vector<arma::cx_mat> h_true;
    try
    {
        const ScatterSet scen = generate_scenario(scen_seed, q, sc.cfg, sc.bounds);
        const receiver rx = sc.problem == problem_kind::channel ? receiver::ue : receiver::bs;
        const Tensor3 clean = echo_grid(scen, ctx.training, sc.cfg, rx, sc.beam_squint);
        noisy = add_noise(clean, snr, noise_seed).first;

        const bool need_segs =
            std::find(sc.algorithms.begin(), sc.algorithms.end(), "alg2") != sc.algorithms.end();
        if (need_segs)
            segs = segment_view(noisy, sc.segment_nd, sc.segment_l);

        truth.aoa.set_size(q);
        truth.aod.set_size(q);
        truth.delay.set_size(q);
        truth.doppler.set_size(q);
        for (int c = 0; c < q; ++c)
        {
            truth.aoa(c) = scen.scatterers[c].aoa;
            truth.aod(c) = scen.scatterers[c].aod;
            truth.delay(c) = scen.scatterers[c].delay;
            truth.doppler(c) = scen.scatterers[c].doppler;
        }

        if (sc.problem == problem_kind::channel)
        {
            h_true.reserve(sc.n_subcarriers);
            for (int k = 1; k <= sc.n_subcarriers; ++k)
                h_true.push_back(
                    comm_channel(scen, sc.n_symbols, sc.subcarrier_stride * k, sc.cfg, sc.beam_squint));
        }
    }
    catch (const std::exception &)
    {
        return outs; // scenario construction failed: every algorithm fails
    }

    for (std::size_t a = 0; a < sc.algorithms.size(); ++a)
    {
        const std::string &alg = sc.algorithms[a];
        const auto t0 = std::chrono::steady_clock::now();
        try
        {
            if (alg == "alg1")
                outs[a] = run_alg1(noisy, ctx, sc, q, truth, h_true, plans[a]);
            else if (alg == "als")
                outs[a] = run_als(noisy, ctx, sc, q, truth, h_true, plans[a], als_seed);
            else if (alg == "music")
                outs[a] = run_music(noisy, ctx, sc, q, truth, plans[a]);
            else if (alg == "mf")
                outs[a] = run_mf(noisy, sc, q, truth, plans[a]);
            else if (alg == "alg2")
                outs[a] = run_alg2(segs, ctx, sc, q, truth, h_true, plans[a]);
        }
        catch (const std::exception &)
        {
            outs[a].ok = false; // recorded as a per-trial failure
        }
        outs[a].runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return outs;
}

/// Pooled root-mean-square of the kept per-trial values: the trim_n largest
/// are dropped first. Returns NaN when nothing survives.
double trimmed_rms(std::vector<double> vals, int trim_n)
{
    if (vals.empty() || trim_n >= static_cast<int>(vals.size()))
        return qnan;
    std::sort(vals.begin(), vals.end());
    vals.resize(vals.size() - trim_n);
    double acc = 0.0;
    for (double v : vals)
        acc += v * v;
    return std::sqrt(acc / static_cast<double>(vals.size()));
}

double trimmed_mean(std::vector<double> vals, int trim_n)
{
    if (vals.empty() || trim_n >= static_cast<int>(vals.size()))
        return qnan;
    std::sort(vals.begin(), vals.end());
    vals.resize(vals.size() - trim_n);
    double acc = 0.0;
    for (double v : vals)
        acc += v;
    return acc / static_cast<double>(vals.size());
}

} // namespace

void SweepConfig::validate() const
{
    cfg.validate();
    if (q < 1)
        throw std::invalid_argument("SweepConfig: q must be >= 1");
    for (int qq : q_list)
        if (qq < 1)
            throw std::invalid_argument("SweepConfig: q_list entries must be >= 1");
    if (n_symbols < 1 || n_subcarriers < 1)
        throw std::invalid_argument("SweepConfig: training shape must be positive");
    if (subcarrier_stride < 1)
        throw std::invalid_argument("SweepConfig: subcarrier_stride must be >= 1");
    if (subcarrier_stride * n_subcarriers > cfg.k0)
        throw std::invalid_argument("SweepConfig: training comb exceeds the subcarrier grid");
    if (trials < 1)
        throw std::invalid_argument("SweepConfig: trials must be >= 1");
    if (snr_db.empty())
        throw std::invalid_argument("SweepConfig: need at least one SNR point");
    if (!(trim >= 0.0 && trim < 0.5))
        throw std::invalid_argument("SweepConfig: trim must lie in [0, 0.5)");
    if (algorithms.empty())
        throw std::invalid_argument("SweepConfig: need at least one algorithm");
    for (const std::string &a : algorithms)
        if (a != "alg1" && a != "alg2" && a != "als" && a != "music" && a != "mf")
            throw std::invalid_argument("SweepConfig: unknown algorithm '" + a + "'");
    for (const std::string &m : metrics)
        if (std::find(std::begin(metric_names), std::end(metric_names), m) == std::end(metric_names))
            throw std::invalid_argument("SweepConfig: unknown metric '" + m + "'");
    if (jobs < 1)
        throw std::invalid_argument("SweepConfig: jobs must be >= 1");
    const bool has_alg2 =
        std::find(algorithms.begin(), algorithms.end(), "alg2") != algorithms.end();
    if (has_alg2 && !beam_squint)
        throw std::invalid_argument("SweepConfig: the segment pipeline requires beam_squint");
    const bool has_mf = std::find(algorithms.begin(), algorithms.end(), "mf") != algorithms.end();
    if (has_mf && subcarrier_stride > 1)
        throw std::invalid_argument("SweepConfig: matched filtering assumes contiguous subcarriers");
    if (beam_squint)
    {
        if (segment_nd < 1 || segment_l < 1 || segment_nd * segment_l != n_symbols)
            throw std::invalid_argument("SweepConfig: segment shape must tile n_symbols");
    }
    const bool want_channel = problem == problem_kind::channel;
    if (want_channel && bounds.kind != scatter_kind::multipaths)
        throw std::invalid_argument("SweepConfig: channel sweeps use multipath scenarios");
    if (!want_channel && bounds.kind == scatter_kind::multipaths)
        throw std::invalid_argument("SweepConfig: sensing sweeps use target scenarios");
}

std::vector<ResultRow> snr_sweep(const SweepConfig &sc)
{
    sc.validate();

    SweepContext ctx;
    if (sc.beam_squint)
        ctx.training = make_segment_training(derive_seed(sc.seed, 0, 0, 7), sc.cfg.m_bs, sc.segment_nd,
                                             sc.segment_l, sc.n_subcarriers, sc.subcarrier_stride);
    else
        ctx.training = make_training(derive_seed(sc.seed, 0, 0, 7), sc.cfg.m_bs, sc.n_symbols,
                                     sc.n_subcarriers, sc.subcarrier_stride);

    std::vector<MetricPlan> plans;
    for (const std::string &a : sc.algorithms)
        plans.push_back(plan_for(a, sc));

    const bool need_music_aod =
        [&] {
            for (std::size_t a = 0; a < plans.size(); ++a)
                if (sc.algorithms[a] == "music" && plans[a].aod)
                    return true;
            return false;
        }();
    if (need_music_aod)
    {
        constexpr int g_n = 4096;
        ctx.music_aod_dict.set_size(sc.n_symbols, g_n);
        ctx.music_aod_angles.set_size(g_n);
        for (int g = 0; g < g_n; ++g)
        {
            const double s = -1.0 + (2.0 * g + 1.0) / g_n;
            const double ang = std::asin(s);
            ctx.music_aod_angles(g) = ang;
            ctx.music_aod_dict.col(g) =
                ctx.training.precoder.st() * steering_vector(sc.cfg.m_bs, ang, 0.0, sc.cfg.d_over_lambda);
        }
    }

    std::vector<int> q_points = sc.q_list;
    const bool q_scan = !q_points.empty();
    if (!q_scan)
        q_points = {sc.q};

    // Rows are buffered per algorithm so the output groups by algorithm in
    // configuration order, then sweep point, then metric.
    std::vector<std::vector<ResultRow>> per_alg(sc.algorithms.size());
    const int trim_n = static_cast<int>(std::floor(sc.trim * sc.trials));

    for (std::size_t qi = 0; qi < q_points.size(); ++qi)
    {
        const int q = q_points[qi];
        for (std::size_t si = 0; si < sc.snr_db.size(); ++si)
        {
            const double snr = sc.snr_db[si];
            // Trials land in preassigned slots, so scheduling cannot
            // perturb the aggregation order.
            std::vector<std::vector<AlgoOutcome>> slots(sc.trials);
            const int snr_key = static_cast<int>(qi) * 1000 + static_cast<int>(si);
            auto work = [&](int first, int step) {
                for (int t = first; t < sc.trials; t += step)
                    slots[t] = run_trial(sc, ctx, q, snr, snr_key, t, plans);
            };
            const int n_workers = std::max(1, std::min(sc.jobs, sc.trials));
            if (n_workers == 1)
            {
                work(0, 1);
            }
            else
            {
                std::vector<std::thread> pool;
                pool.reserve(n_workers);
                for (int w = 0; w < n_workers; ++w)
                    pool.emplace_back(work, w, n_workers);
                for (std::thread &th : pool)
                    th.join();
            }

            for (std::size_t a = 0; a < sc.algorithms.size(); ++a)
            {
                const MetricPlan &plan = plans[a];
                std::vector<double> v_aoa, v_aod, v_range, v_vel, v_nmse;
                int failures = 0, successes = 0;
                double runtime_sum = 0.0;
                for (int t = 0; t < sc.trials; ++t)
                {
                    const AlgoOutcome &o = slots[t][a];
                    runtime_sum += o.runtime;
                    if (!o.ok)
                    {
                        ++failures;
                        continue;
                    }
                    if (o.success)
                        ++successes;
                    if (!std::isnan(o.aoa))
                        v_aoa.push_back(o.aoa);
                    if (!std::isnan(o.aod))
                        v_aod.push_back(o.aod);
                    if (!std::isnan(o.range))
                        v_range.push_back(o.range);
                    if (!std::isnan(o.velocity))
                        v_vel.push_back(o.velocity);
                    if (!std::isnan(o.nmse_v))
                        v_nmse.push_back(o.nmse_v);
                }

                const std::string suffix = q_scan ? "_q" + std::to_string(q) : "";
                auto emit = [&](const char *name, double value) {
                    if (std::isnan(value))
                        return;
                    per_alg[a].push_back({sc.algorithms[a], snr, std::string(name) + suffix, value,
                                          sc.trials, failures});
                };
                if (plan.aoa)
                    emit("rmse_aoa", trimmed_rms(v_aoa, trim_n));
                if (plan.aod)
                    emit("rmse_aod", trimmed_rms(v_aod, trim_n));
                if (plan.range)
                    emit("rmse_range", trimmed_rms(v_range, trim_n));
                if (plan.velocity)
                    emit("rmse_velocity", trimmed_rms(v_vel, trim_n));
                if (plan.nmse)
                    emit("nmse", trimmed_mean(v_nmse, trim_n));
                if (plan.success)
                    emit("success_rate", static_cast<double>(successes) / static_cast<double>(sc.trials));
                if (allowed_by_filter(sc.metrics, "runtime_s"))
                    emit("runtime_s", runtime_sum / static_cast<double>(sc.trials));
            }
        }
    }
    std::vector<ResultRow> rows;
    for (const std::vector<ResultRow> &bucket : per_alg)
        rows.insert(rows.end(), bucket.begin(), bucket.end());
    return rows;
}

SingleRun run_single(const SweepConfig &sc, const std::string &algorithm)
{
    sc.validate();
    static const std::vector<std::string> known{"alg1", "alg2", "als", "music", "mf"};
    if (std::find(known.begin(), known.end(), algorithm) == known.end())
        throw std::invalid_argument("run_single: unknown algorithm '" + algorithm + "'");
    if (algorithm == "alg2" && !sc.beam_squint)
        throw std::invalid_argument("run_single: the per-subcarrier pipeline needs beam_squint segment training");
    if (algorithm == "mf" && sc.subcarrier_stride != 1)
        throw std::invalid_argument("run_single: matched filtering assumes contiguous subcarriers");

    SweepContext ctx;
    if (sc.beam_squint)
        ctx.training = make_segment_training(derive_seed(sc.seed, 0, 0, 7), sc.cfg.m_bs, sc.segment_nd,
                                             sc.segment_l, sc.n_subcarriers, sc.subcarrier_stride);
    else
        ctx.training = make_training(derive_seed(sc.seed, 0, 0, 7), sc.cfg.m_bs, sc.n_symbols,
                                     sc.n_subcarriers, sc.subcarrier_stride);

    // The same streams the sweep derives for its first point, trial 0, so a
    // diverging sweep trial can be replayed here one estimator at a time.
    const std::uint64_t scen_seed = derive_seed(sc.seed, 1, 1, 1);
    const std::uint64_t noise_seed = derive_seed(sc.seed, 1, 1, 2);
    const std::uint64_t als_seed = derive_seed(sc.seed, 1, 1, 3);
    const double snr = sc.snr_db.front();
    const int q = sc.q;

    const ScatterSet scen = generate_scenario(scen_seed, q, sc.cfg, sc.bounds);
    const receiver rx = sc.problem == problem_kind::channel ? receiver::ue : receiver::bs;
    const Tensor3 noisy = add_noise(echo_grid(scen, ctx.training, sc.cfg, rx, sc.beam_squint),
                                    snr, noise_seed).first;

    SingleRun r;
    r.snr_db = snr;
    r.aoa_true.set_size(q);
    r.aod_true.set_size(q);
    r.delay_true.set_size(q);
    r.doppler_true.set_size(q);
    r.coeff_true.set_size(q);
    for (int c = 0; c < q; ++c)
    {
        r.aoa_true(c) = scen.scatterers[c].aoa;
        r.aod_true(c) = scen.scatterers[c].aod;
        r.delay_true(c) = scen.scatterers[c].delay;
        r.doppler_true(c) = scen.scatterers[c].doppler;
        r.coeff_true(c) = scen.scatterers[c].coeff;
    }

    const auto t0 = std::chrono::steady_clock::now();
    if (algorithm == "alg1")
    {
        Algorithm1Options o;
        o.k3 = sc.k3;
        o.i_iter = sc.i_iter;
        const ParamEstimates est = run_algorithm1(noisy, ctx.training, sc.cfg, q, o);
        r.aoa = est.aoa;
        r.aod = est.aod;
        r.delay = est.delay;
        r.doppler = est.doppler;
        r.coeff = est.coeff;
    }
    else if (algorithm == "als")
    {
        const FactorTriple f = als_cpd(noisy, q, 200, 1e-8, 3, als_seed);
        ParamEstimates est;
        est.aoa.set_size(q);
        est.aod.set_size(q);
        est.delay.set_size(q);
        est.doppler.set_size(q);
        const arma::cx_mat p_conj = arma::conj(ctx.training.precoder);
        const arma::cx_mat d_mat = p_conj * ctx.training.precoder.st();
        const detail::TrigPoly den_tp = detail::superdiag_offsets(d_mat);
        for (int c = 0; c < q; ++c)
        {
            est.aoa(c) = estimate_aoa(f.b1.col(c), sc.cfg);
            est.aod(c) = aod_from_profile(f.b2.col(c), p_conj, d_mat, den_tp, sc.cfg.d_over_lambda);
            est.doppler(c) = doppler_from_profile(f.b2.col(c), est.aod(c), ctx.training, sc.cfg);
            est.delay(c) = delay_from_profile(f.b3.col(c), sc.cfg, sc.subcarrier_stride, 4096);
        }
        est.coeff = estimate_coefficients(noisy, est, ctx.training, sc.cfg);
        r.aoa = est.aoa;
        r.aod = est.aod;
        r.delay = est.delay;
        r.doppler = est.doppler;
        r.coeff = est.coeff;
        r.note = "departure angle and Doppler stay coupled in the unstructured factorization; "
                 "both columns inherit that ambiguity";
    }
    else if (algorithm == "music")
    {
        const std::vector<double> aoa_list = music_1d(mode_unfold(noisy, 1), q, 4096, sc.cfg);
        if (static_cast<int>(aoa_list.size()) < q)
            throw estimation_error(error_kind::degenerate,
                                   "music: arrival pseudospectrum resolves fewer peaks than requested");
        constexpr int g_n = 4096;
        arma::cx_mat dict(sc.n_symbols, g_n);
        arma::vec angles(g_n);
        for (int g = 0; g < g_n; ++g)
        {
            const double s = -1.0 + (2.0 * g + 1.0) / g_n;
            angles(g) = std::asin(s);
            dict.col(g) = ctx.training.precoder.st() *
                          steering_vector(sc.cfg.m_bs, angles(g), 0.0, sc.cfg.d_over_lambda);
        }
        const std::vector<double> aod_list = music_1d(mode_unfold(noisy, 2), q, dict, angles);
        if (static_cast<int>(aod_list.size()) < q)
            throw estimation_error(error_kind::degenerate,
                                   "music: departure pseudospectrum resolves fewer peaks than requested");
        r.aoa.set_size(q);
        r.aod.set_size(q);
        for (int c = 0; c < q; ++c)
        {
            r.aoa(c) = aoa_list[c];
            r.aod(c) = aod_list[c];
        }
        r.note = "the two spectral searches are independent: arrival and departure angles "
                 "carry no pairing and are matched to the truth separately";
    }
    else if (algorithm == "mf")
    {
        const int n_sym = static_cast<int>(noisy.i2());
        const int k_sub = static_cast<int>(noisy.i3());
        arma::cx_mat echo(n_sym, k_sub);
        for (int k = 0; k < k_sub; ++k)
            for (int n = 0; n < n_sym; ++n)
                echo(n, k) = noisy(0, n, k);
        MfGrids grids;
        grids.peaks = q;
        const std::vector<RangeVelocity> peaks = matched_filter_range_velocity(echo, sc.cfg, grids);
        if (static_cast<int>(peaks.size()) < q)
            throw estimation_error(error_kind::degenerate,
                                   "matched filter: range-velocity map resolves fewer peaks than requested");
        r.delay.set_size(q);
        r.doppler.set_size(q);
        for (int c = 0; c < q; ++c)
        {
            r.delay(c) = 2.0 * peaks[c].range / speed_of_light;
            r.doppler(c) = peaks[c].velocity / to_velocity_factor(sc.cfg);
        }
        r.note = "single-antenna range-velocity map: no angle estimates";
    }
    else // alg2
    {
        const SegmentTensorSet segs = segment_view(noisy, sc.segment_nd, sc.segment_l);
        Algorithm2Options o;
        o.k3 = sc.segment_k3;
        const SubcarrierEstimates sub = run_algorithm2(segs, ctx.training, sc.cfg, q, o);
        // Report the training tone whose matched arrival angles sit closest
        // to the truth -- the same per-subcarrier selection the sweep metrics
        // apply -- together with the band-fused delay and amplitude.
        int k_best = 1;
        double best = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= sub.n_subcarriers(); ++k)
        {
            const ParamEstimates pk = sub.at_subcarrier(k);
            const std::vector<int> mt = match_by_aoa(pk.aoa, r.aoa_true);
            double cost = 0.0;
            for (int c = 0; c < q; ++c)
                cost += std::abs(std::sin(pk.aoa(mt[c])) - std::sin(r.aoa_true(c)));
            if (cost < best)
            {
                best = cost;
                k_best = k;
            }
        }
        const ParamEstimates est = sub.at_subcarrier(k_best);
        r.aoa = est.aoa;
        r.aod = est.aod;
        r.delay = est.delay;
        r.doppler = est.doppler;
        r.coeff = est.coeff;
        r.note = "per-subcarrier estimates; showing training tone " + std::to_string(k_best) +
                 " with the band-fused delay and amplitude";
    }
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (algorithm == "mf")
    {
        std::vector<RangeVelocity> peaks(q);
        for (int c = 0; c < q; ++c)
        {
            peaks[c].range = to_range(r.delay(c));
            peaks[c].velocity = to_velocity_factor(sc.cfg) * r.doppler(c);
        }
        r.matching = match_range_velocity(peaks, to_range_vec(r.delay_true),
                                          to_velocity_factor(sc.cfg) * r.doppler_true,
                                          to_range(sc.cfg.t_cp),
                                          to_velocity_factor(sc.cfg) / sc.cfg.t_sym);
    }
    else
    {
        r.matching = match_by_aoa(r.aoa, r.aoa_true);
    }
    return r;
}

std::string results_csv(const std::vector<ResultRow> &rows)
{
    std::string out = "algorithm,snr_db,metric,value,trials,failures\n";
    char buf[256];
    for (const ResultRow &r : rows)
    {
        std::snprintf(buf, sizeof(buf), "%s,%.12g,%s,%.12g,%d,%d\n", r.algorithm.c_str(), r.snr_db,
                      r.metric.c_str(), r.value, r.trials, r.failures);
        out += buf;
    }
    return out;
}

std::string config_json(const SweepConfig &sc)
{
    nlohmann::ordered_json j;
    j["array"] = {{"m_bs", sc.cfg.m_bs},         {"m_re", sc.cfg.m_re},   {"m_ue", sc.cfg.m_ue},
                  {"d_over_lambda", sc.cfg.d_over_lambda},
                  {"f_c_hz", sc.cfg.f_c},        {"f_s_hz", sc.cfg.f_s},  {"k0", sc.cfg.k0},
                  {"delta_f_hz", sc.cfg.delta_f},{"t_sym_s", sc.cfg.t_sym}, {"t_cp_s", sc.cfg.t_cp}};
    j["problem"] = sc.problem == problem_kind::channel ? "channel" : "sensing";
    j["scenario"] = {{"kind", sc.bounds.kind == scatter_kind::multipaths
                                  ? "multipaths"
                                  : (sc.bounds.kind == scatter_kind::targets_with_interferers
                                         ? "targets_with_interferers"
                                         : "targets")},
                     {"angle_bound_rad", sc.bounds.angle_bound},
                     {"v_max_mps", sc.bounds.v_max},
                     {"nu_max_hz", sc.bounds.nu_max},
                     {"delay_max_s", sc.bounds.delay_max},
                     {"interferers", sc.bounds.interferers}};
    j["q"] = sc.q;
    j["q_list"] = sc.q_list;
    j["n_symbols"] = sc.n_symbols;
    j["n_subcarriers"] = sc.n_subcarriers;
    j["subcarrier_stride"] = sc.subcarrier_stride;
    j["beam_squint"] = sc.beam_squint;
    j["segment_nd"] = sc.segment_nd;
    j["segment_l"] = sc.segment_l;
    j["snr_db"] = sc.snr_db;
    j["trials"] = sc.trials;
    j["algorithms"] = sc.algorithms;
    j["metrics"] = sc.metrics;
    j["seed"] = sc.seed;
    j["trim"] = sc.trim;
    j["k3"] = sc.k3;
    j["segment_k3"] = sc.segment_k3;
    j["i_iter"] = sc.i_iter;
    j["jobs"] = sc.jobs;
    return j.dump(2) + "\n";
}

} // namespace tisac
