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

// Internal helpers for fitting unit-modulus generators: quadratic forms over
// geometric vectors a_n = z^n reduce to real trigonometric polynomials of the
// phase, which gives cheap exact derivatives for grid scoring, root-based
// candidate generation, and Newton refinement.

#pragma once

#include <armadillo>
#include <cmath>
#include <limits>

#include "tensorisac/common.hpp"

namespace tisac::detail
{

/// f(theta) = c(0) + 2 Re sum_{m>=1} c(m) e^{jm theta}; for Hermitian W and
/// a_n = z^n this equals a^H W a with c(m) the m-th superdiagonal sum.
struct TrigPoly
{
    arma::cx_vec c;
};

inline TrigPoly superdiag_offsets(const arma::cx_mat &w)
{
    const arma::uword m = w.n_rows;
    TrigPoly t;
    t.c.set_size(m);
    for (arma::uword off = 0; off < m; ++off)
    {
        cx s = 0.0;
        for (arma::uword i = 0; i + off < m; ++i)
            s += w(i, i + off);
        t.c(off) = s;
    }
    return t;
}

/// Offsets of the rank-one form v v^H without materializing the matrix:
/// c(m) = sum_i v(i) conj(v(i+m)).
inline TrigPoly rank_one_offsets(const arma::cx_vec &v)
{
    const arma::uword m = v.n_elem;
    TrigPoly t;
    t.c.set_size(m);
    for (arma::uword off = 0; off < m; ++off)
    {
        cx s = 0.0;
        for (arma::uword i = 0; i + off < m; ++i)
            s += v(i) * std::conj(v(i + off));
        t.c(off) = s;
    }
    return t;
}

struct TrigEval
{
    double f, d1, d2;
};

inline TrigEval trig_derivs(const TrigPoly &t, double theta)
{
    const cx e = std::polar(1.0, theta);
    cx p = 1.0, a0 = 0.0, a1 = 0.0, a2 = 0.0;
    for (arma::uword m = 1; m < t.c.n_elem; ++m)
    {
        p *= e;
        const cx term = t.c(m) * p;
        a0 += term;
        a1 += static_cast<double>(m) * term;
        a2 += static_cast<double>(m) * static_cast<double>(m) * term;
    }
    return {t.c(0).real() + 2.0 * a0.real(), -2.0 * a1.imag(), -2.0 * a2.real()};
}

inline double trig_eval(const TrigPoly &t, double theta) { return trig_derivs(t, theta).f; }

inline double ratio_at(const TrigPoly &num, const TrigPoly &den, double theta)
{
    const double d = trig_eval(den, theta);
    if (!(d > 0.0))
        return std::numeric_limits<double>::infinity();
    return trig_eval(num, theta) / d;
}

/// Newton steps on the phase minimizing num(theta)/den(theta). Root- or
/// grid-found candidates are accurate only to ~sqrt(eps) near flat double
/// extrema; the curvature step recovers the remaining digits.
inline double newton_ratio_min(const TrigPoly &num, const TrigPoly &den, double theta, int iters,
                               double max_step)
{
    for (int it = 0; it < iters; ++it)
    {
        const TrigEval nv = trig_derivs(num, theta);
        const TrigEval dv = trig_derivs(den, theta);
        if (!(dv.f > 0.0))
            break;
        const double r1 = (nv.d1 * dv.f - nv.f * dv.d1) / (dv.f * dv.f);
        const double r2 = (nv.d2 * dv.f - nv.f * dv.d2) / (dv.f * dv.f) - 2.0 * dv.d1 * r1 / dv.f;
        if (!(r2 > 0.0))
            break;
        const double step = -r1 / r2;
        if (!std::isfinite(step) || std::abs(step) > max_step)
            break;
        theta += step;
        if (std::abs(step) < 1e-15)
            break;
    }
    return theta;
}

/// Minimize num/den over [lo, hi]: uniform grid scan (cell centers), local
/// golden-section shrink, then the Newton polish. Returns the refined phase.
inline double grid_ratio_min(const TrigPoly &num, const TrigPoly &den, double lo, double hi, int grid_n)
{
    const double span = hi - lo;
    double best_t = lo, best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_n; ++i)
    {
        const double t = lo + span * (2.0 * i + 1.0) / (2.0 * grid_n);
        const double v = ratio_at(num, den, t);
        if (v < best_v)
        {
            best_v = v;
            best_t = t;
        }
    }
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_t - span / grid_n, b = best_t + span / grid_n;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = ratio_at(num, den, x1), f2 = ratio_at(num, den, x2);
    for (int it = 0; it < 3; ++it)
    {
        if (f1 < f2)
        {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = ratio_at(num, den, x1);
        }
        else
        {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = ratio_at(num, den, x2);
        }
    }
    double t0 = (f1 < f2) ? x1 : x2;
    if (std::min(f1, f2) > best_v)
        t0 = best_t;
    const double polished = newton_ratio_min(num, den, t0, 8, 2.0 * span / grid_n);
    return (ratio_at(num, den, polished) <= ratio_at(num, den, t0)) ? polished : t0;
}

/// Phase maximizing |sum_n conj(v(n)) z^{n+1}| over z = e^{j theta},
/// theta in [lo, hi] — the single-profile correlation peak. Cast as the
/// complementary minimization so grid_ratio_min applies.
inline double peak_corr_phase(const arma::cx_vec &v, double lo, double hi, int grid_n)
{
    const arma::uword m = v.n_elem;
    const TrigPoly rk = rank_one_offsets(v);
    TrigPoly num;
    num.c = -rk.c;
    num.c(0) = rk.c(0).real() * static_cast<double>(m - 1);
    TrigPoly den;
    den.c.zeros(m);
    den.c(0) = static_cast<double>(m);
    return grid_ratio_min(num, den, lo, hi, grid_n);
}

} // namespace tisac::detail
