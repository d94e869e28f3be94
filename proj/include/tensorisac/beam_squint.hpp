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

// Wideband operation with frequency-dependent (squinted) array responses.
//
// With a large fractional bandwidth the steering vectors change across
// subcarriers, so the three-mode factorization of the full grid no longer
// holds. The training is instead organized in L segments of n_d symbols
// that repeat the same precoder block; each subcarrier then admits its own
// m_re x n_d x L decomposition whose third mode is Vandermonde in the
// segment-level Doppler generator exp(j 2 pi nu n_d T_sym). Angles and
// Doppler are estimated per subcarrier; the delay and the amplitude are
// recovered afterwards from the phase progression of the per-subcarrier
// amplitudes across the band.

#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

#include "tensorisac/param_extract.hpp"
#include "tensorisac/signal_model.hpp"
#include "tensorisac/tensor3.hpp"
#include "tensorisac/training.hpp"
#include "tensorisac/vandermonde_cpd.hpp"

namespace tisac
{

/// One m_re x n_d x L tensor per subcarrier, sharing the segment layout.
struct SegmentTensorSet
{
    std::vector<Tensor3> per_subcarrier;
    int n_d = 0; ///< symbols per segment
    int l = 0;   ///< number of segments

    int n_subcarriers() const { return static_cast<int>(per_subcarrier.size()); }

    /// Checks n_d, l >= 1, at least one subcarrier, and that every tensor is
    /// shaped consistently (common first dimension, second n_d, third l).
    /// Throws std::invalid_argument on violation.
    void validate() const;
};

/// Identifiability bound of the per-subcarrier factorization with smoothing
/// parameter k3: min(n_d*(k3-1), m_re*(l-k3+1)). Requires 2 <= k3 <= l.
int prop1_max_targets(int m_re, int n_d, int l, int k3);

/// Carve a full m x (n_d*l) x K grid into per-subcarrier segment tensors:
/// out_k(i, n, s) = full(i, s*n_d + n, k). Pure reindexing, no data change.
SegmentTensorSet segment_view(const Tensor3 &full, int n_d, int l);

/// Build the received segment tensors for a scatter set: exact per-symbol
/// echo grid with squinted steering (the segment-level constant-Doppler
/// approximation is *not* applied to the data, so its mismatch is physically
/// present), complex white noise at snr_db (+inf = noiseless), then the
/// segment carve-up. Requires segment-structured training.
SegmentTensorSet build_segment_tensors(const ScatterSet &scatterers, const TrainingPattern &training,
                                       const ArrayConfig &cfg, double snr_db, std::uint64_t seed,
                                       receiver rx = receiver::bs);

/// Per-subcarrier parameter tuples with columns aligned to the first
/// subcarrier's ordering, plus the band-fused delay and amplitude.
struct SubcarrierEstimates
{
    arma::mat aoa;     ///< K x Q, radians
    arma::mat aod;     ///< K x Q, radians
    arma::mat doppler; ///< K x Q, hertz
    arma::cx_mat amp;  ///< K x Q per-subcarrier amplitudes (delay phase still attached)
    arma::vec delay;   ///< Q, seconds, fused across the band
    arma::cx_vec coeff;///< Q, de-rotated complex amplitudes

    int q() const { return static_cast<int>(aoa.n_cols); }
    int n_subcarriers() const { return static_cast<int>(aoa.n_rows); }

    /// Single-subcarrier view (k is 1-based): that subcarrier's angle and
    /// Doppler estimates combined with the fused delay and amplitude.
    ParamEstimates at_subcarrier(int k) const;
};

struct Algorithm2Options
{
    int k3 = 0;              ///< segment-mode smoothing parameter; 0 = default_k3(l)
    int delay_grid = 4096;   ///< fusion grid points over the delay range [0, t_cp]
    int beta_subcarrier = 0; ///< 0 = average de-rotated amplitudes over the band;
                             ///< otherwise use that single subcarrier (1-based)
};

/// Wideband pipeline: per subcarrier, factorize the segment tensor (third
/// mode Vandermonde in the segment Doppler generator), estimate the Doppler
/// from the generator phase over 2 pi n_d T_sym, the arrival angle by
/// squint-aware correlation, the departure angle by normalized correlation
/// against the precoded squinted dictionary, and the amplitudes by least
/// squares. Columns are then matched to subcarrier 1 by nearest Doppler
/// generator phase (angle proximity breaking near-ties); the delay is fused
/// from the amplitude phase ramp across subcarriers by a grid-plus-polish
/// correlation peak, and the amplitude is read off after de-rotation.
/// Throws estimation_error(match_failure) when the cross-subcarrier
/// alignment is inconsistent; factorization errors propagate.
SubcarrierEstimates run_algorithm2(const SegmentTensorSet &ts, const TrainingPattern &training,
                                   const ArrayConfig &cfg, int q, const Algorithm2Options &opts = {});

} // namespace tisac
