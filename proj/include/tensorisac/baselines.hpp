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

#include "tensorisac/signal_model.hpp"
#include "tensorisac/tensor3.hpp"

namespace tisac
{

/// Unstructured CPD by alternating least squares: random complex Gaussian
/// initializations, exact per-mode block solves (Gram-matrix trick with a
/// pseudoinverse fallback), best fit kept across restarts.
/// Stops a sweep when the relative residual improves by less than tol.
/// Throws estimation_error(ill_conditioned) when every restart collapses.
FactorTriple als_cpd(const Tensor3 &t, int q, int max_iter = 200, double tol = 1e-8, int restarts = 3,
                     std::uint64_t seed = 1);

/// Relative Frobenius reconstruction residual of a factor triple against a
/// tensor; convenience for fit reporting.
double cpd_residual(const Tensor3 &t, const FactorTriple &f);

/// Subspace spectral search over a uniform linear array: sample covariance of
/// the snapshot columns, noise projector from the m-q smallest eigenvectors,
/// then peak picking on a grid_n-point pseudospectrum in sin(angle) with
/// parabolic peak interpolation. Returns up to q angles (radians), tallest
/// peaks first; fewer when the spectrum resolves fewer maxima.
/// Requires q < m and at least q snapshot columns.
std::vector<double> music_1d(const arma::cx_mat &snapshots, int q, int grid_n, const ArrayConfig &cfg);

/// Dictionary variant: column g of dict is the array response at
/// grid_angles(g) (any linear front end folded in). Same subspace machinery,
/// pseudospectrum normalized by dictionary column energy.
std::vector<double> music_1d(const arma::cx_mat &snapshots, int q, const arma::cx_mat &dict,
                             const arma::vec &grid_angles);

struct RangeVelocity
{
    double range = 0.0;    ///< meters
    double velocity = 0.0; ///< meters/second
    double level = 0.0;    ///< squared correlation magnitude at the peak
};

struct MfGrids
{
    int n_delay = 1024;    ///< delay grid points over [tau_min, tau_max]
    int n_doppler = 1024;  ///< Doppler grid points over [nu_min, nu_max]
    int peaks = 1;         ///< number of peaks to return
    double tau_min = 0.0;  ///< seconds
    double tau_max = 0.0;  ///< seconds; 0 = t_cp
    double nu_min = 0.0;   ///< hertz; together with nu_max, 0/0 = symmetric round-trip span
    double nu_max = 0.0;   ///< hertz
};

/// Classical separable correlation of one receive antenna's N x K echo grid
/// (rows = symbols, columns = subcarriers) against delay/Doppler references,
/// with non-maximum suppression and parabolic refinement of the top peaks.
/// Delay and Doppler peaks are reported as round-trip range c*tau/2 and
/// radial velocity c*nu/(2 f_c).
std::vector<RangeVelocity> matched_filter_range_velocity(const arma::cx_mat &echo_nk, const ArrayConfig &cfg,
                                                         const MfGrids &grids);

} // namespace tisac
