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

// Monte Carlo sweeps: scenario generation, estimator execution, metric
// accumulation with trimming, and CSV/JSON result serialization.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tensorisac/signal_model.hpp"

namespace tisac
{

/// What the trial data represents and which side receives it.
enum class problem_kind
{
    sensing, ///< target echoes at the sensing receive array; angle/range/velocity metrics
    channel  ///< downlink training at the user array; channel NMSE metric
};

struct SweepConfig
{
    ArrayConfig cfg = ArrayConfig::make(64, 8, 8, 28e9, 100e6, 128, 0.5);
    problem_kind problem = problem_kind::sensing;
    ScenarioBounds bounds;     ///< kind must agree with problem (targets vs multipaths)
    int q = 4;                 ///< components to estimate per trial
    std::vector<int> q_list;   ///< optional component-count scan (success-rate study);
                               ///< empty = single-q sweep using `q`
    int n_symbols = 16;
    int n_subcarriers = 16;
    int subcarrier_stride = 1; ///< comb spacing of the training tones over the full grid
    bool beam_squint = false;  ///< frequency-dependent steering + segment training
    int segment_nd = 0;        ///< symbols per segment (beam_squint only)
    int segment_l = 0;         ///< segments (beam_squint only)
    std::vector<double> snr_db{0.0, 10.0, 20.0, 30.0};
    int trials = 200;
    std::vector<std::string> algorithms{"alg1"};
    std::vector<std::string> metrics;  ///< subset filter; empty = all applicable
    std::uint64_t seed = 1;
    double trim = 0.05;        ///< fraction of worst trials dropped per error metric
    int k3 = 0;                ///< smoothing parameter for the full-grid pipeline; 0 = auto
    int segment_k3 = 0;        ///< smoothing parameter for the per-subcarrier pipeline; 0 = auto
    int i_iter = 30;           ///< alternation rounds (full-grid pipeline)
    int jobs = 1;              ///< worker threads for trials

    /// Structural checks (counts positive, trim in [0, 0.5), algorithm ids
    /// known, segment shape consistent with n_symbols when beam_squint, kind
    /// compatible with problem). Throws std::invalid_argument.
    void validate() const;
};

/// One output record. The metric name is one of rmse_aoa, rmse_aod,
/// rmse_range, rmse_velocity, nmse, success_rate, runtime_s; in a q_list
/// sweep the component count is appended, e.g. success_rate_q18.
struct ResultRow
{
    std::string algorithm;
    double snr_db = 0.0;
    std::string metric;
    double value = 0.0;
    int trials = 0;
    int failures = 0;
};

/// Run the sweep: for every SNR point (and component count, when q_list is
/// set) and every trial, draw a fresh scenario, build the received tensor
/// once, run each selected algorithm on the same data, and accumulate
/// metrics. Error metrics (rmse_*, nmse) drop the floor(trim*trials) worst
/// successful trials and exclude failed trials; success_rate counts failed
/// trials as unsuccessful over the full denominator; runtime_s is the mean
/// wall-clock per trial. Rows for error metrics are omitted when no trial
/// of that algorithm succeeded. Deterministic for a fixed config, including
/// under jobs > 1.
std::vector<ResultRow> snr_sweep(const SweepConfig &sc);

/// One scenario and one estimator, reported parameter-by-parameter next to
/// the generating truth. Vectors the estimator does not produce stay empty;
/// `matching[i]` is the estimate column paired with truth row i.
struct SingleRun
{
    arma::vec aoa_true, aod_true, delay_true, doppler_true;
    arma::cx_vec coeff_true;
    arma::vec aoa, aod, delay, doppler;
    arma::cx_vec coeff;
    std::vector<int> matching;
    double snr_db = 0.0;
    double runtime_s = 0.0;
    std::string note; ///< estimator caveat worth surfacing next to the numbers (may be empty)
};

/// Run one trial of `algorithm` on the scenario the sweep would draw for its
/// first SNR point and trial 0 (same seed streams), at sc.snr_db.front().
/// The estimator runs all of its stages regardless of sc.metrics. Throws
/// std::invalid_argument for an unknown algorithm or a config the algorithm
/// cannot run on; estimator failures propagate as estimation_error.
SingleRun run_single(const SweepConfig &sc, const std::string &algorithm);

/// Serialize rows as CSV with header `algorithm,snr_db,metric,value,trials,failures`.
std::string results_csv(const std::vector<ResultRow> &rows);

/// JSON document recording the full SweepConfig for provenance.
std::string config_json(const SweepConfig &sc);

} // namespace tisac
