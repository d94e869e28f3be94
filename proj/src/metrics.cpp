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

#include "tensorisac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tisac
{

namespace
{

std::vector<int> assign_exhaustive(const arma::mat &cost)
{
    const int n = static_cast<int>(cost.n_rows);
    std::vector<int> perm(n), best(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best_cost = std::numeric_limits<double>::infinity();
    do
    {
        double c = 0.0;
        for (int i = 0; i < n; ++i)
            c += cost(i, perm[i]);
        if (c < best_cost)
        {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Shortest augmenting path with row/column potentials; O(n^3).
std::vector<int> assign_hungarian(const arma::mat &cost)
{
    const int n = static_cast<int>(cost.n_rows);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i)
    {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do
        {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j)
                if (!used[j])
                {
                    const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if (cur < minv[j])
                    {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if (minv[j] < delta)
                    {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            for (int j = 0; j <= n; ++j)
                if (used[j])
                {
                    u[p[j]] += delta;
                    v[j] -= delta;
                }
                else
                    minv[j] -= delta;
            j0 = j1;
        } while (p[j0] != 0);
        do
        {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> perm(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] >= 1)
            perm[p[j] - 1] = j - 1;
    return perm;
}

} // namespace

std::vector<int> assign_min_cost(const arma::mat &cost)
{
    if (cost.n_rows != cost.n_cols || cost.n_rows < 1)
        throw std::invalid_argument("assign_min_cost: cost matrix must be square and nonempty");
    if (!cost.is_finite())
        throw std::invalid_argument("assign_min_cost: cost matrix must be finite");
    return cost.n_rows <= 6 ? assign_exhaustive(cost) : assign_hungarian(cost);
}

std::vector<int> match_by_aoa(const arma::vec &aoa_est, const arma::vec &aoa_truth)
{
    if (aoa_est.n_elem != aoa_truth.n_elem)
        throw std::invalid_argument("match_by_aoa: length mismatch");
    const arma::uword n = aoa_truth.n_elem;
    arma::mat cost(n, n, arma::fill::none);
    for (arma::uword i = 0; i < n; ++i)
        for (arma::uword j = 0; j < n; ++j)
            cost(i, j) = std::abs(std::sin(aoa_truth(i)) - std::sin(aoa_est(j)));
    return assign_min_cost(cost);
}

double rmse(const arma::vec &est, const arma::vec &truth, const std::vector<int> &matching)
{
    if (matching.size() != truth.n_elem || truth.n_elem == 0)
        throw std::invalid_argument("rmse: matching/truth length mismatch");
    double acc = 0.0;
    for (arma::uword i = 0; i < truth.n_elem; ++i)
    {
        const int j = matching[i];
        if (j < 0 || j >= static_cast<int>(est.n_elem))
            throw std::invalid_argument("rmse: matching index out of range");
        const double d = est(j) - truth(i);
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(truth.n_elem));
}

double nmse(const std::vector<arma::cx_mat> &h_est, const std::vector<arma::cx_mat> &h_true)
{
    if (h_est.size() != h_true.size() || h_true.empty())
        throw std::invalid_argument("nmse: need matching nonempty channel lists");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < h_true.size(); ++k)
    {
        if (h_est[k].n_rows != h_true[k].n_rows || h_est[k].n_cols != h_true[k].n_cols)
            throw std::invalid_argument("nmse: channel shape mismatch");
        num += std::pow(arma::norm(h_true[k] - h_est[k], "fro"), 2);
        den += std::pow(arma::norm(h_true[k], "fro"), 2);
    }
    if (!(den > 0.0))
        throw std::invalid_argument("nmse: zero true channel");
    return num / den;
}

bool trial_success(const arma::vec &aoa_est, const arma::vec &aoa_truth, int m_re)
{
    if (m_re < 1)
        throw std::invalid_argument("trial_success: m_re must be >= 1");
    if (aoa_est.n_elem != aoa_truth.n_elem || aoa_truth.n_elem == 0)
        return false; // an incomplete estimate set cannot resolve every target
    const std::vector<int> matching = match_by_aoa(aoa_est, aoa_truth);
    const double threshold = 1.0 / (2.0 * m_re);
    for (arma::uword i = 0; i < aoa_truth.n_elem; ++i)
        if (std::abs(std::sin(aoa_truth(i)) - std::sin(aoa_est(matching[i]))) > threshold)
            return false;
    return true;
}

double success_rate(const std::vector<arma::vec> &est_trials, const std::vector<arma::vec> &truth_trials,
                    int m_re)
{
    if (est_trials.size() != truth_trials.size() || truth_trials.empty())
        throw std::invalid_argument("success_rate: need matching nonempty trial lists");
    int ok = 0;
    for (std::size_t t = 0; t < truth_trials.size(); ++t)
        ok += trial_success(est_trials[t], truth_trials[t], m_re) ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(truth_trials.size());
}

} // namespace tisac
