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

#include "tensorisac/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace tisac
{

namespace
{

arma::cx_mat gaussian_factor(std::mt19937_64 &rng, arma::uword rows, arma::uword cols)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    arma::cx_mat m(rows, cols, arma::fill::none);
    for (cx &v : m)
        v = cx(g(rng), g(rng));
    return m;
}

/// One per-mode LS update: solve factor * kr(a, b)^T = unfolding^T through
/// the Gram trick (kr^H kr equals the Hadamard product of the two factor
/// Grams). Falls back to a pseudoinverse when the Gram system is singular.
/// Returns false when even the fallback fails.
bool als_update(arma::cx_mat &factor, const arma::cx_mat &kr_ab, const arma::cx_mat &gram,
                const arma::cx_mat &unfolding_t)
{
    const arma::cx_mat rhs = kr_ab.t() * unfolding_t; // q x dim
    arma::cx_mat sol;
    if (arma::solve(sol, gram, rhs, arma::solve_opts::no_approx))
    {
        factor = sol.st();
        return true;
    }
    arma::cx_mat gram_pinv;
    if (!arma::pinv(gram_pinv, gram))
        return false;
    factor = (gram_pinv * rhs).st();
    return true;
}

} // namespace

double cpd_residual(const Tensor3 &t, const FactorTriple &f)
{
    const double tn = t.norm();
    if (!(tn > 0.0))
        throw std::invalid_argument("cpd_residual: zero tensor");
    const Tensor3 recon = cpd_reconstruct(f);
    double acc = 0.0;
    const cx *a = t.memptr();
    const cx *b = recon.memptr();
    for (arma::uword i = 0; i < t.numel(); ++i)
        acc += std::norm(a[i] - b[i]);
    return std::sqrt(acc) / tn;
}

FactorTriple als_cpd(const Tensor3 &t, int q, int max_iter, double tol, int restarts, std::uint64_t seed)
{
    if (q < 1 || max_iter < 1 || restarts < 1 || !(tol >= 0.0))
        throw std::invalid_argument("als_cpd: bad arguments");
    const arma::uword i1 = t.i1(), i2 = t.i2(), i3 = t.i3();
    const double tnorm = t.norm();
    if (!(tnorm > 0.0))
        throw std::invalid_argument("als_cpd: zero tensor");

    // Fixed unfoldings, transposed once so each update is a plain LS solve.
    const arma::cx_mat y1t = mode_unfold(t, 1).st();
    const arma::cx_mat y2t = mode_unfold(t, 2).st();
    const arma::cx_mat y3t = mode_unfold(t, 3).st();

    FactorTriple best;
    double best_res = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r)
    {
        std::mt19937_64 rng(derive_seed(seed, 0xA7500u, static_cast<std::uint64_t>(r)));
        FactorTriple f;
        f.b1.set_size(i1, q);
        f.b2 = gaussian_factor(rng, i2, q);
        f.b3 = gaussian_factor(rng, i3, q);

        bool ok = true;
        double res = std::numeric_limits<double>::infinity();
        for (int it = 0; it < max_iter && ok; ++it)
        {
            arma::cx_mat g2 = f.b2.t() * f.b2;
            arma::cx_mat g3 = f.b3.t() * f.b3;
            ok = als_update(f.b1, khatri_rao(f.b3, f.b2), g3 % g2, y1t);
            if (!ok)
                break;
            const arma::cx_mat g1 = f.b1.t() * f.b1;
            ok = als_update(f.b2, khatri_rao(f.b1, f.b3), g1 % g3, y2t);
            if (!ok)
                break;
            g2 = f.b2.t() * f.b2;
            const arma::cx_mat kr21 = khatri_rao(f.b2, f.b1);
            ok = als_update(f.b3, kr21, g2 % g1, y3t);
            if (!ok)
                break;

            const double next = arma::norm(y3t - kr21 * f.b3.st(), "fro") / tnorm;
            const bool converged = (res - next) < tol * std::max(res, 1e-30) || next < 1e-14;
            res = next;
            if (converged)
                break;
        }
        if (ok && res < best_res)
        {
            best_res = res;
            best = f;
        }
    }
    if (!std::isfinite(best_res))
        throw estimation_error(error_kind::ill_conditioned, "als_cpd: every restart collapsed");
    return best;
}

namespace
{

/// Noise projector energies over an arbitrary response dictionary; shared by
/// both spectral-search variants. Returns up to q angles by descending peak.
std::vector<double> music_peaks(const arma::cx_mat &snapshots, int q, const arma::cx_mat &dict,
                                const arma::vec &grid_angles)
{
    const int m = static_cast<int>(snapshots.n_rows);
    if (q < 1 || q >= m)
        throw std::invalid_argument("music_1d: need 1 <= q < m");
    if (snapshots.n_cols < static_cast<arma::uword>(q))
        throw std::invalid_argument("music_1d: need at least q snapshots");
    if (dict.n_rows != snapshots.n_rows || dict.n_cols != grid_angles.n_elem || dict.n_cols < 3)
        throw std::invalid_argument("music_1d: dictionary shape mismatch");

    const arma::cx_mat cov = snapshots * snapshots.t() / static_cast<double>(snapshots.n_cols);
    arma::vec eval;
    arma::cx_mat evec;
    if (!arma::eig_sym(eval, evec, cov))
        throw estimation_error(error_kind::numerical_failure, "music_1d: eigendecomposition failed");
    const arma::cx_mat en = evec.cols(0, m - q - 1); // ascending order: smallest first

    const arma::uword gn = dict.n_cols;
    arma::vec spectrum(gn, arma::fill::none);
    for (arma::uword g = 0; g < gn; ++g)
    {
        const arma::cx_vec a = dict.col(g);
        const double denom = std::max(arma::norm(en.t() * a), 1e-300);
        const double acol = arma::norm(a);
        spectrum(g) = (acol * acol) / (denom * denom);
    }

    struct Peak
    {
        double angle, height;
    };
    std::vector<Peak> peaks;
    for (arma::uword g = 1; g + 1 < gn; ++g)
    {
        if (!(spectrum(g) > spectrum(g - 1) && spectrum(g) >= spectrum(g + 1)))
            continue;
        // Parabolic vertex through the three log-spectrum samples.
        const double y0 = std::log(spectrum(g - 1)), y1 = std::log(spectrum(g)), y2 = std::log(spectrum(g + 1));
        const double denom = y0 - 2.0 * y1 + y2;
        double frac = 0.0;
        if (denom < 0.0)
            frac = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
        const double angle =
            grid_angles(g) + frac * (frac >= 0.0 ? grid_angles(g + 1) - grid_angles(g)
                                                 : grid_angles(g) - grid_angles(g - 1));
        peaks.push_back({angle, spectrum(g)});
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak &a, const Peak &b) { return a.height > b.height; });
    if (peaks.size() > static_cast<std::size_t>(q))
        peaks.resize(q);

    std::vector<double> out;
    for (const Peak &p : peaks)
        out.push_back(p.angle);
    return out;
}

} // namespace

std::vector<double> music_1d(const arma::cx_mat &snapshots, int q, int grid_n, const ArrayConfig &cfg)
{
    if (grid_n < 3)
        throw std::invalid_argument("music_1d: grid too small");
    const int m = static_cast<int>(snapshots.n_rows);
    arma::vec angles(grid_n, arma::fill::none);
    arma::cx_mat dict(m, grid_n, arma::fill::none);
    for (int g = 0; g < grid_n; ++g)
    {
        const double s = -1.0 + (2.0 * g + 1.0) / grid_n;
        angles(g) = std::asin(s);
        dict.col(g) = steering_vector(m, angles(g), 0.0, cfg.d_over_lambda);
    }
    return music_peaks(snapshots, q, dict, angles);
}

std::vector<double> music_1d(const arma::cx_mat &snapshots, int q, const arma::cx_mat &dict,
                             const arma::vec &grid_angles)
{
    return music_peaks(snapshots, q, dict, grid_angles);
}

std::vector<RangeVelocity> matched_filter_range_velocity(const arma::cx_mat &echo_nk, const ArrayConfig &cfg,
                                                         const MfGrids &grids)
{
    const int n_sym = static_cast<int>(echo_nk.n_rows);
    const int k_sub = static_cast<int>(echo_nk.n_cols);
    if (n_sym < 1 || k_sub < 1)
        throw std::invalid_argument("matched_filter_range_velocity: empty echo grid");
    if (grids.n_delay < 3 || grids.n_doppler < 3 || grids.peaks < 1)
        throw std::invalid_argument("matched_filter_range_velocity: bad grid spec");

    const double tau_max = grids.tau_max > 0.0 ? grids.tau_max : cfg.t_cp;
    const double tau_min = grids.tau_min;
    double nu_min = grids.nu_min, nu_max = grids.nu_max;
    if (nu_min == 0.0 && nu_max == 0.0)
    {
        // default: symmetric span covering the unambiguous round-trip region
        nu_max = 0.5 / cfg.t_sym * (1.0 - 1e-9);
        nu_min = -nu_max;
    }

    arma::vec taus = arma::linspace(tau_min, tau_max, grids.n_delay);
    arma::vec nus = arma::linspace(nu_min, nu_max, grids.n_doppler);

    // Separable references: C = V^H * E * conj(U), rows Doppler, cols delay.
    arma::cx_mat u(k_sub, grids.n_delay, arma::fill::none);
    for (int i = 0; i < grids.n_delay; ++i)
        u.col(i) = delay_phase_vector(k_sub, taus(i), cfg);
    arma::cx_mat v(n_sym, grids.n_doppler, arma::fill::none);
    for (int i = 0; i < grids.n_doppler; ++i)
        v.col(i) = doppler_phase_vector(n_sym, nus(i), cfg.t_sym);
    const arma::mat level = arma::square(arma::abs(v.t() * echo_nk * arma::conj(u)));

    struct Peak
    {
        int r, c;
        double h;
    };
    std::vector<Peak> local;
    for (int r = 0; r < grids.n_doppler; ++r)
        for (int c = 0; c < grids.n_delay; ++c)
        {
            const double h = level(r, c);
            bool is_max = true;
            for (int dr = -1; dr <= 1 && is_max; ++dr)
                for (int dc = -1; dc <= 1 && is_max; ++dc)
                {
                    if (dr == 0 && dc == 0)
                        continue;
                    const int rr = r + dr, cc = c + dc;
                    if (rr < 0 || cc < 0 || rr >= grids.n_doppler || cc >= grids.n_delay)
                        continue;
                    if (level(rr, cc) > h || (level(rr, cc) == h && (dr < 0 || (dr == 0 && dc < 0))))
                        is_max = false;
                }
            if (is_max)
                local.push_back({r, c, h});
        }
    std::sort(local.begin(), local.end(), [](const Peak &a, const Peak &b) { return a.h > b.h; });

    // Non-maximum suppression: drop peaks within 2 bins of a stronger one.
    std::vector<Peak> kept;
    for (const Peak &p : local)
    {
        bool shadowed = false;
        for (const Peak &k : kept)
            if (std::abs(k.r - p.r) <= 2 && std::abs(k.c - p.c) <= 2)
            {
                shadowed = true;
                break;
            }
        if (!shadowed)
            kept.push_back(p);
        if (kept.size() == static_cast<std::size_t>(grids.peaks))
            break;
    }

    auto parabolic = [](double ym, double y0, double yp) {
        const double denom = ym - 2.0 * y0 + yp;
        if (!(denom < 0.0))
            return 0.0;
        return std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
    };

    std::vector<RangeVelocity> out;
    const double dtau = (grids.n_delay > 1) ? taus(1) - taus(0) : 0.0;
    const double dnu = (grids.n_doppler > 1) ? nus(1) - nus(0) : 0.0;
    for (const Peak &p : kept)
    {
        double tau = taus(p.c), nu = nus(p.r);
        if (p.c > 0 && p.c + 1 < grids.n_delay)
            tau += dtau * parabolic(level(p.r, p.c - 1), p.h, level(p.r, p.c + 1));
        if (p.r > 0 && p.r + 1 < grids.n_doppler)
            nu += dnu * parabolic(level(p.r - 1, p.c), p.h, level(p.r + 1, p.c));
        out.push_back({speed_of_light * tau / 2.0, speed_of_light * nu / (2.0 * cfg.f_c), p.h});
    }
    return out;
}

} // namespace tisac
