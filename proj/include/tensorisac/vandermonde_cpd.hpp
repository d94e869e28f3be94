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
#include <cstdint>
#include <string>
#include <vector>

#include "tensorisac/signal_model.hpp"
#include "tensorisac/tensor3.hpp"
#include "tensorisac/training.hpp"

namespace tisac
{

/// Which receive array observes the echo grid.
enum class receiver
{
    bs, ///< sensing receiver co-located with the transmitter (m_re elements)
    ue  ///< user-side receiver (m_ue elements)
};

/// Noiseless received grid after pilot removal: entry (m, n, k), with n and k
/// counted from 1 inside, is
///   sum_q beta_q e^{-j2pi tau_q f_s k / K0} [a_rx(theta_q)]_m
///         (a_bs(phi_q)^T p_n) e^{+j2pi n nu_q T_sym}.
/// With beam_squint set, both steering vectors become frequency dependent
/// (ratio k*delta_f/f_c) and the per-symbol Doppler phase is kept exact.
Tensor3 echo_grid(const ScatterSet &scatterers, const TrainingPattern &training, const ArrayConfig &cfg,
                  receiver rx, bool beam_squint = false);

/// echo_grid followed by add_noise at snr_db (+inf passes through unchanged).
Tensor3 build_echo_tensor(const ScatterSet &scatterers, const TrainingPattern &training, const ArrayConfig &cfg,
                          double snr_db, std::uint64_t seed, receiver rx, bool beam_squint = false);

/// Sliding-window augmentation of the transposed mode-1 unfolding.
///
/// Input rows are grouped in i3 = K blocks of n rows each; window l3 keeps
/// blocks l3 .. l3+k3-1. The output stacks the k3 kept blocks as rows and
/// concatenates the L3 = K - k3 + 1 windows side by side:
/// (k3*n) x (L3*m) for an m-column input. Requires 2 <= k3 <= K; the
/// boundary k3 = K keeps a single window and returns the input unchanged.
arma::cx_mat spatial_smooth(const arma::cx_mat &y1t, int n, int k3);

/// Result of the shift-invariance factor recovery.
struct FactorEstimate
{
    FactorTriple factors;    ///< estimated b1 (m_re x q), b2 (n x q), b3 (k x q)
    arma::cx_vec generators; ///< unit-modulus third-mode generator per column
};

/// Recover all three factor matrices from the smoothed matrix by the
/// shift-invariance (rotational) structure of the stacked Vandermonde blocks.
///
/// Throws estimation_error(uniqueness_bound) when q exceeds the resolvable
/// bound for (m_re, n, k, k3), estimation_error(ill_conditioned) when the
/// q-th singular value collapses (sigma_q/sigma_1 < 1e-12), and
/// estimation_error(numerical_failure) if the eigensolver fails.
FactorEstimate esprit_factors(const arma::cx_mat &ys, int q, int m_re, int n, int k, int k3);

/// Largest Q satisfying min(i1,Q) + min(i2,Q) + min(i3,Q) >= 2Q + 2.
int kruskal_max_targets(int i1, int i2, int i3);

/// min(i2*(k3-1), i1*(i3-k3+1)) — the smoothed-structure bound.
/// Requires 2 <= k3 <= i3.
int vandermonde_max_targets(int i1, int i2, int i3, int k3);

/// Default smoothing parameter ceil((k+1)/2): balances the two factors of
/// the resolvable bound.
int default_k3(int k);

/// Max-resolvable-target counts over a grid of symbol counts and smoothing
/// parameters, for a fixed receive-array size and subcarrier count.
struct ResolvableTable
{
    std::vector<int> n_values;           ///< columns
    std::vector<int> k3_values;          ///< one row per value, after the baseline row
    std::vector<int> baseline_row;       ///< unsmoothed (generic) bound per n
    std::vector<std::vector<int>> rows;  ///< smoothed bound, rows[i][j] for k3_values[i], n_values[j]
};

ResolvableTable resolvable_table(int m_re, int k, const std::vector<int> &n_values,
                                 const std::vector<int> &k3_values);

/// CSV rendering: header "n,<n_values...>", then one line per bound row.
std::string table_csv(const ResolvableTable &t);

/// Diagnostic for the exact two-sided rank condition behind the smoothed
/// bound: both stacked-block factors must have full column rank q.
/// Returns true when rank(khatri_rao(b3_rows(1..k3), b2)) == q and
/// rank(khatri_rao(b3_rows(1..l3), b1)) == q at relative tolerance 1e-9.
bool smoothing_rank_ok(const FactorTriple &truth, int k3);

} // namespace tisac
