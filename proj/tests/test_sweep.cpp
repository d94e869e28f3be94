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

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "tensorisac/sweep.hpp"

using namespace tisac;

namespace
{

SweepConfig tiny_sensing()
{
    SweepConfig sc;
    sc.q = 4;
    sc.snr_db = {10.0, 20.0};
    sc.trials = 3;
    sc.algorithms = {"alg1", "mf"};
    sc.metrics = {"rmse_aoa", "rmse_range"};
    sc.seed = 7;
    sc.trim = 0.0;
    return sc;
}

const ResultRow *find_row(const std::vector<ResultRow> &rows, const std::string &alg, double snr,
                          const std::string &metric)
{
    for (const ResultRow &r : rows)
        if (r.algorithm == alg && r.snr_db == snr && r.metric == metric)
            return &r;
    return nullptr;
}

} // namespace

TEST_CASE("sweep bookkeeping: one row per algorithm, SNR and metric")
{
    const std::vector<ResultRow> rows = snr_sweep(tiny_sensing());

    // alg1 produces both metrics at both SNRs; the matched filter has no
    // angle estimate, so its angle rows are absent rather than zero
    REQUIRE(rows.size() == 6);
    for (double snr : {10.0, 20.0})
    {
        REQUIRE(find_row(rows, "alg1", snr, "rmse_aoa") != nullptr);
        REQUIRE(find_row(rows, "alg1", snr, "rmse_range") != nullptr);
        REQUIRE(find_row(rows, "mf", snr, "rmse_range") != nullptr);
        REQUIRE(find_row(rows, "mf", snr, "rmse_aoa") == nullptr);
    }
    for (const ResultRow &r : rows)
    {
        REQUIRE(r.trials == 3);
        REQUIRE(r.failures == 0);
        REQUIRE(r.value >= 0.0);
    }
}

TEST_CASE("sweep results are independent of the worker count and repeatable")
{
    SweepConfig sc = tiny_sensing();
    const std::vector<ResultRow> serial = snr_sweep(sc);
    sc.jobs = 2;
    const std::vector<ResultRow> parallel = snr_sweep(sc);

    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i)
    {
        REQUIRE(serial[i].algorithm == parallel[i].algorithm);
        REQUIRE(serial[i].metric == parallel[i].metric);
        REQUIRE(serial[i].value == parallel[i].value); // bit-identical
    }
}

TEST_CASE("component-count scans append the count to the metric name")
{
    SweepConfig sc;
    sc.q_list = {2, 4};
    sc.snr_db = {15.0};
    sc.trials = 2;
    sc.algorithms = {"alg1"};
    sc.metrics = {"success_rate"};
    sc.seed = 3;

    const std::vector<ResultRow> rows = snr_sweep(sc);
    REQUIRE(find_row(rows, "alg1", 15.0, "success_rate_q2") != nullptr);
    REQUIRE(find_row(rows, "alg1", 15.0, "success_rate_q4") != nullptr);
    REQUIRE(find_row(rows, "alg1", 15.0, "success_rate") == nullptr);
}

TEST_CASE("estimator failures are counted, not silently dropped")
{
    SweepConfig sc;
    sc.q = 8; // spectral search cannot separate 8 sources on an 8-element array
    sc.snr_db = {20.0};
    sc.trials = 3;
    sc.algorithms = {"music"};
    sc.metrics = {"success_rate", "rmse_aoa"};
    sc.seed = 5;

    const std::vector<ResultRow> rows = snr_sweep(sc);
    const ResultRow *sr = find_row(rows, "music", 20.0, "success_rate");
    REQUIRE(sr != nullptr);
    REQUIRE(sr->value == 0.0);
    REQUIRE(sr->failures == 3);
    // no surviving trials -> no angle-error row
    REQUIRE(find_row(rows, "music", 20.0, "rmse_aoa") == nullptr);
}

TEST_CASE("CSV rendering is stable and grouped by algorithm")
{
    const std::vector<ResultRow> rows = snr_sweep(tiny_sensing());
    const std::string csv = results_csv(rows);
    REQUIRE(csv.rfind("algorithm,snr_db,metric,value,trials,failures\n", 0) == 0);
    REQUIRE(csv.find("\nalg1,10,") != std::string::npos);
    REQUIRE(csv.find("\nmf,20,") != std::string::npos);
    // algorithm-major ordering: every alg1 line precedes the first mf line
    REQUIRE(csv.rfind("\nalg1,") < csv.find("\nmf,"));
}

TEST_CASE("config sidecar is valid JSON and round-trips the load-bearing fields")
{
    SweepConfig sc = tiny_sensing();
    sc.subcarrier_stride = 2;
    const nlohmann::json j = nlohmann::json::parse(config_json(sc));
    REQUIRE(j.at("q").get<int>() == 4);
    REQUIRE(j.at("trials").get<int>() == 3);
    REQUIRE(j.at("seed").get<std::uint64_t>() == 7);
    REQUIRE(j.at("subcarrier_stride").get<int>() == 2);
    REQUIRE(j.at("algorithms").size() == 2);
    REQUIRE(j.at("snr_db").size() == 2);
}

TEST_CASE("config validation rejects inconsistent requests")
{
    SweepConfig sc = tiny_sensing();
    SECTION("unknown algorithm")
    {
        sc.algorithms = {"alg9"};
        REQUIRE_THROWS_AS(sc.validate(), std::invalid_argument);
    }
    SECTION("trim fraction out of range")
    {
        sc.trim = 0.5;
        REQUIRE_THROWS_AS(sc.validate(), std::invalid_argument);
    }
    SECTION("segment shape must tile the symbol block")
    {
        sc.beam_squint = true;
        sc.segment_nd = 8;
        sc.segment_l = 3; // 24 != 16 symbols
        REQUIRE_THROWS_AS(sc.validate(), std::invalid_argument);
    }
    SECTION("problem and scatterer kind must agree")
    {
        sc.problem = problem_kind::channel;
        REQUIRE_THROWS_AS(sc.validate(), std::invalid_argument); // kind still targets
        sc.bounds.kind = scatter_kind::multipaths;
        REQUIRE_NOTHROW(sc.validate());
    }
}

TEST_CASE("single-run replay rejects requests the estimator cannot serve")
{
    SweepConfig sc = tiny_sensing();
    REQUIRE_THROWS_AS(run_single(sc, "alg9"), std::invalid_argument);
    REQUIRE_THROWS_AS(run_single(sc, "alg2"), std::invalid_argument); // needs segment training

    sc.subcarrier_stride = 4;
    REQUIRE_THROWS_AS(run_single(sc, "mf"), std::invalid_argument); // comb breaks the map

    SECTION("a served request reports matched estimates at the first sweep point")
    {
        const SingleRun r = run_single(tiny_sensing(), "alg1");
        REQUIRE(r.snr_db == 10.0);
        REQUIRE(r.aoa_true.n_elem == 4);
        REQUIRE(r.aoa.n_elem == 4);
        REQUIRE(r.matching.size() == 4);
        REQUIRE(r.runtime_s > 0.0);
    }
}
