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

#include "tensorisac/common.hpp"
#include "tensorisac/signal_model.hpp"

namespace tisac
{

/// Training-phase resources shared by transmitter and receiver: the precoding
/// matrix applied across symbols and the per-subcarrier pilot symbols.
/// Pilot removal is modeled as exact, so downstream processing only ever sees
/// the precoder.
struct TrainingPattern
{
    arma::cx_mat precoder;  ///< m_bs x n_symbols, unit-modulus entries
    arma::cx_vec pilots;    ///< n_subcarriers unit-modulus symbols
    int n_symbols = 0;      ///< N
    int n_subcarriers = 0;  ///< K
    int segment_nd = 0;     ///< symbols per segment (0 = unsegmented)
    int segment_l = 0;      ///< number of segments (0 = unsegmented)

    /// Comb spacing of the training subcarriers. Training tone j (1-based)
    /// occupies physical subcarrier stride*j, so stride 1 is a contiguous
    /// block and stride s > 1 spreads K tones over s*K subcarriers of the
    /// full grid (comb-type placement).
    int subcarrier_stride = 1;

    bool segmented() const { return segment_nd > 0 && segment_l > 0; }

    /// Physical subcarrier index carrying training tone j (1-based).
    int physical_subcarrier(int j) const { return subcarrier_stride * j; }

    /// Throws std::invalid_argument when dimensions disagree, entries are not
    /// unit modulus (1e-9 tolerance), the stride is < 1, or a declared segment
    /// structure is not an L-fold repetition of the leading n_d columns.
    void validate() const;
};

/// Draw an unsegmented training pattern: precoder phases and pilot phases
/// i.i.d. uniform on the unit circle.
TrainingPattern make_training(std::uint64_t seed, int m_bs, int n_symbols, int n_subcarriers,
                              int subcarrier_stride = 1);

/// Repeat an m_bs x n_d base block l times side by side.
/// Throws std::invalid_argument on empty base or l < 1.
arma::cx_mat segment_precoder(const arma::cx_mat &base, int l);

/// Draw a segmented pattern: random base block of n_d columns repeated l
/// times, so n_symbols = n_d * l.
TrainingPattern make_segment_training(std::uint64_t seed, int m_bs, int n_d, int l, int n_subcarriers,
                                      int subcarrier_stride = 1);

} // namespace tisac
