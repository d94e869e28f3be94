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

namespace tisac
{

/// Minimum-total-cost assignment of columns (estimates) to rows (truth) of a
/// square cost matrix. Exhaustive for n <= 6, shortest-augmenting-path with
/// potentials beyond. Returns perm with perm[row] = assigned column.
std::vector<int> assign_min_cost(const arma::mat &cost);

/// Assignment minimizing the summed |sin(est) - sin(truth)| angle error; the
/// single matching reused by every per-trial metric.
std::vector<int> match_by_aoa(const arma::vec &aoa_est, const arma::vec &aoa_truth);

/// sqrt(mean over i of (est[matching[i]] - truth[i])^2).
/// Throws std::invalid_argument on size mismatch or out-of-range matching.
double rmse(const arma::vec &est, const arma::vec &truth, const std::vector<int> &matching);

/// sum_k ||h_true[k] - h_est[k]||_F^2 / sum_k ||h_true[k]||_F^2.
/// Throws std::invalid_argument when shapes differ or the true set is zero.
double nmse(const std::vector<arma::cx_mat> &h_est, const std::vector<arma::cx_mat> &h_true);

/// One trial succeeds when every truth angle has its matched estimate within
/// |sin(theta) - sin(theta_hat)| <= 1/(2 m_re).
bool trial_success(const arma::vec &aoa_est, const arma::vec &aoa_truth, int m_re);

/// Fraction of successful trials.
double success_rate(const std::vector<arma::vec> &est_trials, const std::vector<arma::vec> &truth_trials,
                    int m_re);

} // namespace tisac
