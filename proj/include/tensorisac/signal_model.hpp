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
#include <vector>

#include "tensorisac/common.hpp"

namespace tisac
{

/// Antenna-array and OFDM geometry. All other modules read their dimensions
/// and timing from here.
struct ArrayConfig
{
    int m_bs = 64;               ///< transmit (base-station) antenna count
    int m_re = 8;                ///< base-station receive antenna count
    int m_ue = 8;                ///< user-equipment antenna count
    double d_over_lambda = 0.5;  ///< element spacing over carrier wavelength
    double f_c = 28e9;           ///< carrier frequency [Hz]
    double f_s = 100e6;          ///< occupied bandwidth [Hz]
    int k0 = 128;                ///< total subcarrier count
    double delta_f = 0.0;        ///< subcarrier spacing [Hz] (= f_s / k0)
    double t_sym = 0.0;          ///< OFDM symbol duration incl. cyclic prefix [s]
    double t_cp = 0.0;           ///< cyclic-prefix duration [s]

    /// Build a config with delta_f = f_s/k0, t_cp = cp_fraction/delta_f and
    /// t_sym = 1/delta_f + t_cp, then validate. cp_fraction 0.5 matches the
    /// narrowband simulation setup, 1.0 the wideband one.
    static ArrayConfig make(int m_bs, int m_re, int m_ue, double f_c, double f_s, int k0,
                            double cp_fraction = 0.5);

    /// Throws std::invalid_argument on any violated invariant
    /// (counts >= 1, f_s > 0, delta_f*k0 = f_s to 1e-12 relative, t_sym > t_cp >= 0).
    void validate() const;
};

/// One propagation path (communication channel) or one echo (sensing channel).
struct Scatterer
{
    cx coeff;       ///< complex reflection coefficient / path gain
    double aoa;     ///< angle of arrival [rad]
    double aod;     ///< angle of departure [rad]
    double delay;   ///< propagation delay [s]
    double doppler; ///< Doppler shift [Hz] (round trip for sensing targets)
};

enum class scatter_kind
{
    targets,
    multipaths,
    targets_with_interferers
};

/// Ordered collection of scatterers plus what they model.
struct ScatterSet
{
    std::vector<Scatterer> scatterers;
    scatter_kind kind = scatter_kind::targets;

    /// Throws std::invalid_argument if empty, any scatterer violates its bounds
    /// (delay in [0, t_cp], angles in (-pi/2, pi/2), |doppler|*t_sym < 1/2), or
    /// two delay generators exp(-j*2*pi*delay*f_s/k0) coincide within 1e-9
    /// relative phase.
    void validate(const ArrayConfig &cfg) const;

    int count() const { return static_cast<int>(scatterers.size()); }
};

/// Bounds the random scenario generator draws from.
struct ScenarioBounds
{
    double angle_bound = 1.0471975511965976; ///< pi/3; angles uniform on [-bound, bound]
    double v_max = 30.0;                     ///< max target speed [m/s]; round-trip Doppler 2*v*f_c/c
    double nu_max = 2.8e3;                   ///< max multipath Doppler spread [Hz]; draws on [-nu_max/2, nu_max/2]
    double delay_max = 0.0;                  ///< cap on delay draws [s]; 0 = full [0, t_cp]. Useful when
                                             ///< comb training shrinks the unambiguous delay span.
    int interferers = 0;                     ///< extra non-target echoes appended to a target set
    scatter_kind kind = scatter_kind::targets;
};

/// Uniform-linear-array steering vector; element i (0-based) is
/// exp(-j*2*pi*(1+freq_ratio)*d_over_lambda*i*sin(angle)), element 0 = 1.
/// freq_ratio = f/f_c: pass 0 for narrowband evaluation, k*delta_f/f_c for
/// frequency-dependent evaluation at subcarrier k.
arma::cx_vec steering_vector(int m, double angle, double freq_ratio = 0.0, double d_over_lambda = 0.5);

/// Delay phase progression over subcarriers 1..k_sub:
/// element k (1-based) = exp(-j*2*pi*delay*f_s*stride*k/k0). Pass stride > 1
/// to step over a comb of every stride-th subcarrier.
arma::cx_vec delay_phase_vector(int k_sub, double delay, const ArrayConfig &cfg, int stride = 1);

/// Doppler phase progression over symbols 1..n:
/// element n (1-based) = exp(+j*2*pi*n*doppler*t_sym).
arma::cx_vec doppler_phase_vector(int n, double doppler, double t_sym);

/// Sensing channel matrix (m_re x m_bs) at symbol n, subcarrier k (both 1-based):
/// sum_q coeff_q * exp(-j*2*pi*delay_q*f_s*k/k0) * a_re(aoa_q) a_bs(aod_q)^T
///       * exp(+j*2*pi*n*doppler_q*t_sym),
/// with steering vectors evaluated at freq_ratio = k*delta_f/f_c when
/// beam_squint is set, else 0.
arma::cx_mat sensing_channel(const ScatterSet &s, int n, int k, const ArrayConfig &cfg,
                             bool beam_squint = false);

/// Communication channel matrix (m_ue x m_bs); identical structure with the
/// UE-side steering vector replacing the receive-side one.
arma::cx_mat comm_channel(const ScatterSet &s, int n, int k, const ArrayConfig &cfg,
                          bool beam_squint = false);

/// Draw a random scenario: coefficients standard complex Gaussian, delays
/// uniform on [0, t_cp], angles uniform on [-angle_bound, angle_bound],
/// Doppler from velocity +-v_max (targets, round trip) or +-nu_max/2
/// (multipaths). Redraws delays until all generators are separated by at
/// least 1e-9 relative phase. Deterministic in the seed.
ScatterSet generate_scenario(std::uint64_t seed, int count, const ArrayConfig &cfg,
                             const ScenarioBounds &bounds);

} // namespace tisac
