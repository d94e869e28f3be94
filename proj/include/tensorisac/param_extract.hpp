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

#pragma once

#include <armadillo>
#include <vector>

#include "tensorisac/signal_model.hpp"
#include "tensorisac/tensor3.hpp"
#include "tensorisac/training.hpp"
#include "tensorisac/vandermonde_cpd.hpp"

namespace tisac
{

/// Per-scatterer estimates in ground-truth units (radians, seconds, hertz).
struct ParamEstimates
{
    arma::vec aoa;     ///< radians, in (-pi/2, pi/2)
    arma::vec delay;   ///< seconds, principal range [0, k0/f_s)
    arma::vec aod;     ///< radians (empty when the alternation stage is skipped)
    arma::vec doppler; ///< hertz  (empty when the alternation stage is skipped)
    arma::cx_vec coeff;///< complex amplitudes (empty when skipped)

    /// Normalized model-fit objective per alternation iteration, one trace
    /// per scatterer; shorter than the iteration cap when converged early.
    std::vector<std::vector<double>> traces;
    bool any_clamped = false; ///< some |sin| mapping had to be clamped into [-1, 1]

    int q() const { return static_cast<int>(aoa.n_elem); }
};

/// Correlation peak over arrival angle: argmax_theta |b1_col^H a(theta)|^2,
/// via a 2048-point grid in sin(theta), golden-section refinement, and a
/// final curvature (Newton) polish on the correlation ratio. freq_ratio is
/// the fractional carrier offset k * delta_f / f_c of the subcarrier the
/// column was measured on (0 when the array response is frequency-flat).
/// Throws std::invalid_argument on a zero column.
double estimate_aoa(const arma::cx_vec &b1_col, const ArrayConfig &cfg, double freq_ratio = 0.0);

/// Invert the delay generator: -(k0 / (2 pi f_s stride)) * arg(z), wrapped
/// into the principal range [0, k0/(f_s*stride)). With comb-type training the
/// generator advances stride subcarriers per training tone, which shrinks the
/// unambiguous delay span accordingly. Requires |z| = 1 within 1e-9.
double estimate_delay(cx z_tau, const ArrayConfig &cfg, int stride = 1);

/// Minimize a(z)^H w a(z) over unit-modulus generators z, where a(z) is the
/// geometric vector [1, z, ..., z^{m-1}] (up to an irrelevant common phase
/// offset). The stationary-phase condition is a polynomial of degree 2(m-1)
/// whose on-circle roots are the candidate generators; each candidate is
/// scored by the full objective and the best is polished by Newton steps on
/// the generator phase.
/// Throws estimation_error(degenerate) when the polynomial vanishes (w has no
/// phase-selective structure).
cx polynomial_min_generator(const arma::cx_mat &w);

/// As above but minimizing the normalized ratio
///   a^H w a / (scale * a^H denom a),
/// the form the alternation stages produce (denom positive definite on the
/// relevant directions, scale > 0). Returns the generator and the attained
/// objective value.
struct GeneratorFit
{
    cx z;
    double objective;
};
GeneratorFit polynomial_min_generator(const arma::cx_mat &w, const arma::cx_mat &denom, double scale);

/// Joint departure-angle / Doppler fit to one second-mode column by
/// coordinate descent: de-rotate by the current Doppler, solve the
/// departure-angle generator, then re-fit the Doppler generator given the
/// angle. Starts from zero Doppler; stops after i_iter rounds or when the
/// pair moves less than 1e-10.
struct AlternationResult
{
    double aod = 0.0;          ///< radians
    double doppler = 0.0;      ///< hertz
    std::vector<double> trace; ///< normalized residual after each round
    bool clamped = false;      ///< |sin| mapping clamped into [-1, 1]
};
AlternationResult alternate_aod_doppler(const arma::cx_vec &b2_col, const TrainingPattern &training,
                                        const ArrayConfig &cfg, int i_iter);

/// Least-squares amplitudes given all other parameters: solves
/// design * beta = vec of the tensor, where the design matrix is the
/// columnwise Khatri-Rao product of the rebuilt delay, symbol and array
/// profiles. Throws estimation_error(ill_conditioned) on a rank-deficient
/// design.
arma::cx_vec estimate_coefficients(const Tensor3 &t, const ParamEstimates &params,
                                   const TrainingPattern &training, const ArrayConfig &cfg);

struct Algorithm1Options
{
    int k3 = 0;                    ///< smoothing parameter; 0 = default_k3(K)
    int i_iter = 30;               ///< alternation rounds per scatterer
    bool with_aod_doppler = true;  ///< run the alternation stage
    bool with_coefficients = true; ///< run the amplitude fit (needs alternation)
};

/// Full single-carrier pipeline: unfold, smooth, factor, then per-column
/// angle/delay extraction, the alternation stage, and the amplitude fit.
ParamEstimates run_algorithm1(const Tensor3 &t, const TrainingPattern &training, const ArrayConfig &cfg,
                              int q, const Algorithm1Options &opts = {});

/// Channel matrix rebuilt from estimated parameters at symbol n, subcarrier k
/// (both 1-based), on the m_ue-element receive array. Set beam_squint when
/// the array responses should include the per-subcarrier carrier offset.
arma::cx_mat reconstruct_channel(const ParamEstimates &params, const ArrayConfig &cfg, int n, int k,
                                 bool beam_squint = false);

} // namespace tisac
