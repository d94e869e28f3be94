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

// Command-line front end: the resolvable-target bound table, single-scenario
// estimation runs, and Monte Carlo sweeps with CSV/JSON output.
//
// Exit codes: 0 success, 1 estimator failure, 2 usage or config error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tensorisac/kv_config.hpp"
#include "tensorisac/sweep.hpp"
#include "tensorisac/vandermonde_cpd.hpp"

namespace
{

constexpr double rad2deg = 57.29577951308232;

/// One output file of a bundled experiment; `kv` is a complete config in the
/// documented key = value schema.
struct FigureEntry
{
    const char *stem;
    const char *kv;
};

struct FigureBundle
{
    const char *name;
    const char *blurb;
    std::vector<FigureEntry> entries;
};

// Desk-scale reproductions of the study shapes: trial counts are kept small
// enough for a coffee-break run on one core; raise `trials` in a copy of the
// printed config (see --print-config) for smoother curves.
const std::vector<FigureBundle> &figure_bundles()
{
    static const std::vector<FigureBundle> bundles{
        {"fig3", "success rate vs component count for the structured, unstructured, and spectral estimators",
         {{"fig3", R"(problem = sensing
q_list = 2,4,6,8,10,12,14,16,18,20
n_symbols = 16
n_subcarriers = 16
snr_db_list = 15
trials = 50
algorithms = alg1,als,music
metrics = success_rate
seed = 1
)"}}},
        {"fig4", "arrival/departure angle RMSE vs SNR at the narrowband numerology",
         {{"fig4", R"(problem = sensing
q = 4
n_symbols = 16
n_subcarriers = 16
snr_db_list = 0,5,10,15,20,25,30
trials = 50
algorithms = alg1,als,music
metrics = rmse_aoa,rmse_aod
seed = 1
)"}}},
        {"fig5", "range/velocity RMSE vs SNR at the narrowband numerology",
         {{"fig5", R"(problem = sensing
q = 4
n_symbols = 16
n_subcarriers = 16
snr_db_list = 0,5,10,15,20,25,30
trials = 50
algorithms = alg1,als,mf
metrics = rmse_range,rmse_velocity
seed = 1
)"}}},
        {"fig6", "channel NMSE vs SNR: structured pipeline on 16 training tones vs the unstructured baseline on 32",
         {{"fig6_proposed_k16", R"(problem = channel
q = 4
n_symbols = 16
n_subcarriers = 16
snr_db_list = 0,5,10,15,20,25,30
trials = 50
algorithms = alg1
metrics = nmse
seed = 1
)"},
          {"fig6_als_k32", R"(problem = channel
q = 4
n_symbols = 16
n_subcarriers = 32
snr_db_list = 0,5,10,15,20,25,30
trials = 50
algorithms = als
metrics = nmse
seed = 1
)"}}},
        {"fig7", "angle RMSE vs SNR under strong beam squint: per-subcarrier pipeline vs full-grid methods",
         {{"fig7", R"(problem = sensing
f_s_hz = 1e9
cp_fraction = 1.0
q = 4
n_symbols = 64
n_subcarriers = 32
subcarrier_stride = 4
delay_max_s = 3.2e-8
beam_squint = true
segment_nd = 8
segment_l = 8
snr_db_list = 0,10,20,30
trials = 50
algorithms = alg1,alg2,als,music
metrics = rmse_aoa,rmse_aod
seed = 1
)"}}},
        {"fig8", "channel NMSE vs SNR under beam squint at 600 MHz and 1 GHz",
         {{"fig8_600mhz", R"(problem = channel
f_s_hz = 600e6
cp_fraction = 1.0
q = 4
n_symbols = 64
n_subcarriers = 32
subcarrier_stride = 4
delay_max_s = 5.3333e-8
beam_squint = true
segment_nd = 8
segment_l = 8
snr_db_list = 0,10,20,30
trials = 50
algorithms = alg1,als,alg2
metrics = nmse
seed = 1
)"},
          {"fig8_1ghz", R"(problem = channel
f_s_hz = 1e9
cp_fraction = 1.0
q = 4
n_symbols = 64
n_subcarriers = 32
subcarrier_stride = 4
delay_max_s = 3.2e-8
beam_squint = true
segment_nd = 8
segment_l = 8
snr_db_list = 0,10,20,30
trials = 50
algorithms = alg1,als,alg2
metrics = nmse
seed = 1
)"}}},
    };
    return bundles;
}

const FigureBundle &find_bundle(const std::string &name)
{
    for (const FigureBundle &b : figure_bundles())
        if (name == b.name)
            return b;
    throw std::invalid_argument("unknown figure '" + name + "'");
}

void write_text(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::invalid_argument("cannot write '" + path + "'");
    out << text;
}

// ---------------------------------------------------------------- table ---

int cmd_table(int k, int m_re, const std::vector<int> &n_values, const std::vector<int> &k3_values,
              const std::string &out_path)
{
    const tisac::ResolvableTable t = tisac::resolvable_table(m_re, k, n_values, k3_values);
    const std::string csv = tisac::table_csv(t);
    if (out_path.empty())
        std::fputs(csv.c_str(), stdout);
    else
        write_text(out_path, csv);
    return 0;
}

// ------------------------------------------------------------- estimate ---

void print_cell(double v, const char *fmt)
{
    if (std::isnan(v))
        std::printf("%10s", "-");
    else
        std::printf(fmt, v);
}

int cmd_estimate(const tisac::SweepConfig &sc, const std::string &algorithm,
                 const std::string &json_path)
{
    const tisac::SingleRun r = tisac::run_single(sc, algorithm);
    const int q = static_cast<int>(r.aoa_true.n_elem);
    const bool channel = sc.problem == tisac::problem_kind::channel;

    std::printf("scenario: %d %s | snr %g dB | seed %llu | algorithm %s (%.3f s)\n\n", q,
                channel ? "paths" : "targets", r.snr_db,
                static_cast<unsigned long long>(sc.seed), algorithm.c_str(), r.runtime_s);

    const char *u_delay = channel ? "delay [ns]" : "range [m]";
    const char *u_dopp = channel ? "doppler [Hz]" : "vel [m/s]";
    std::printf("  #  %21s  %21s  %21s  %21s  %21s\n", "aoa [deg]", "aod [deg]", u_delay, u_dopp,
                "|coeff|");
    std::printf("     %10s %10s  %10s %10s  %10s %10s  %10s %10s  %10s %10s\n", "true", "est", "true",
                "est", "true", "est", "true", "est", "true", "est");

    const double vf = tisac::speed_of_light / (2.0 * sc.cfg.f_c);
    auto delay_disp = [&](double s) { return channel ? s * 1e9 : tisac::speed_of_light * s / 2.0; };
    auto dopp_disp = [&](double hz) { return channel ? hz : vf * hz; };

    for (int c = 0; c < q; ++c)
    {
        const int e = r.matching.empty() ? c : r.matching[c];
        auto est_of = [&](const arma::vec &v) { return v.n_elem ? v(e) : std::nan(""); };
        std::printf("%3d  ", c + 1);
        print_cell(rad2deg * r.aoa_true(c), "%10.4f");
        std::printf(" ");
        print_cell(rad2deg * est_of(r.aoa), "%10.4f");
        std::printf("  ");
        print_cell(rad2deg * r.aod_true(c), "%10.4f");
        std::printf(" ");
        print_cell(rad2deg * est_of(r.aod), "%10.4f");
        std::printf("  ");
        print_cell(delay_disp(r.delay_true(c)), "%10.4f");
        std::printf(" ");
        print_cell(delay_disp(est_of(r.delay)), "%10.4f");
        std::printf("  ");
        print_cell(dopp_disp(r.doppler_true(c)), "%10.3f");
        std::printf(" ");
        print_cell(dopp_disp(est_of(r.doppler)), "%10.3f");
        std::printf("  ");
        print_cell(std::abs(r.coeff_true(c)), "%10.4f");
        std::printf(" ");
        print_cell(r.coeff.n_elem ? std::abs(r.coeff(e)) : std::nan(""), "%10.4f");
        std::printf("\n");
    }
    if (!r.note.empty())
        std::printf("\nnote: %s\n", r.note.c_str());

    if (!json_path.empty())
    {
        nlohmann::ordered_json j;
        j["algorithm"] = algorithm;
        j["snr_db"] = r.snr_db;
        j["seed"] = sc.seed;
        j["runtime_s"] = r.runtime_s;
        if (!r.note.empty())
            j["note"] = r.note;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int c = 0; c < q; ++c)
        {
            const int e = r.matching.empty() ? c : r.matching[c];
            nlohmann::ordered_json row;
            auto put = [&](const char *t_name, const char *e_name, const arma::vec &tv,
                           const arma::vec &ev) {
                row[t_name] = tv(c);
                if (ev.n_elem)
                    row[e_name] = ev(e);
            };
            put("aoa_true_rad", "aoa_est_rad", r.aoa_true, r.aoa);
            put("aod_true_rad", "aod_est_rad", r.aod_true, r.aod);
            put("delay_true_s", "delay_est_s", r.delay_true, r.delay);
            put("doppler_true_hz", "doppler_est_hz", r.doppler_true, r.doppler);
            row["coeff_true_abs"] = std::abs(r.coeff_true(c));
            if (r.coeff.n_elem)
                row["coeff_est_abs"] = std::abs(r.coeff(e));
            rows.push_back(row);
        }
        j["scatterers"] = rows;
        write_text(json_path, j.dump(2) + "\n");
        std::printf("wrote %s\n", json_path.c_str());
    }
    return 0;
}

// ---------------------------------------------------------------- sweep ---

int run_one_sweep(tisac::SweepConfig sc, const std::string &out_dir, const std::string &stem)
{
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string csv_path = (fs::path(out_dir) / (stem + ".csv")).string();
    const std::string json_path = (fs::path(out_dir) / (stem + ".json")).string();

    const std::vector<tisac::ResultRow> rows = tisac::snr_sweep(sc);
    write_text(csv_path, tisac::results_csv(rows));
    write_text(json_path, tisac::config_json(sc));
    std::printf("wrote %s (%zu rows) and %s\n", csv_path.c_str(), rows.size(), json_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"tensor-based channel and target parameter estimation for massive MIMO "
                 "integrated sensing and communication"};
    app.require_subcommand(1);

    // table
    auto *table = app.add_subcommand("table", "resolvable-component bounds over a symbol-count and "
                                              "smoothing-parameter grid (CSV)");
    int tab_k = 16, tab_m_re = 8;
    std::vector<int> tab_n{10, 12, 14, 16, 18, 20};
    std::vector<int> tab_k3{3, 5, 7};
    std::string tab_out;
    table->add_option("--k", tab_k, "training subcarriers")->capture_default_str();
    table->add_option("--m-re", tab_m_re, "receive antennas")->capture_default_str();
    table->add_option("--n", tab_n, "symbol counts (comma list)")->delimiter(',')->capture_default_str();
    table->add_option("--k3", tab_k3, "smoothing parameters (comma list)")
        ->delimiter(',')
        ->capture_default_str();
    table->add_option("--out", tab_out, "output path (default: stdout)");

    // estimate
    auto *est = app.add_subcommand("estimate", "run one estimator on one drawn scenario and print "
                                               "the true-vs-estimated parameter table");
    std::string est_config, est_alg = "alg1", est_json;
    std::uint64_t est_seed = 0;
    bool est_seed_set = false;
    est->add_option("--config", est_config, "key = value config file (see sweep --help-config)")
        ->required()
        ->check(CLI::ExistingFile);
    est->add_option("--algorithm", est_alg, "estimator to run")
        ->check(CLI::IsMember({"alg1", "alg2", "als", "music", "mf"}))
        ->capture_default_str();
    est->add_option("--seed", est_seed, "override the config's master seed")
        ->each([&](const std::string &) { est_seed_set = true; });
    est->add_option("--json", est_json, "also write the result as JSON to this path");

    // sweep
    auto *sw = app.add_subcommand("sweep", "Monte Carlo metric sweep; writes CSV plus a JSON "
                                           "sidecar recording the full config");
    std::string sw_config, sw_figure, sw_out = ".";
    std::uint64_t sw_seed = 0;
    bool sw_seed_set = false, sw_print = false, sw_help_config = false;
    unsigned hw = std::thread::hardware_concurrency();
    int sw_jobs = hw ? static_cast<int>(hw) : 1;
    auto *opt_config = sw->add_option("--config", sw_config, "key = value config file")
                           ->check(CLI::ExistingFile);
    sw->add_option("--figure", sw_figure,
                   "bundled desk-scale experiment (fig3, fig4, fig5, fig6, fig7, fig8)")
        ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6", "fig7", "fig8"}))
        ->excludes(opt_config);
    sw->add_option("--out", sw_out, "output directory")->capture_default_str();
    sw->add_option("--jobs", sw_jobs, "worker threads (default: available cores)");
    sw->add_option("--seed", sw_seed, "override the config's master seed")
        ->each([&](const std::string &) { sw_seed_set = true; });
    sw->add_flag("--print-config", sw_print, "print the resolved config text and exit");
    sw->add_flag("--help-config", sw_help_config, "print the config schema and exit");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try
    {
        if (app.got_subcommand(table))
            return cmd_table(tab_k, tab_m_re, tab_n, tab_k3, tab_out);

        if (app.got_subcommand(est))
        {
            tisac::SweepConfig sc = tisac::sweep_config_from_kv(tisac::parse_kv_file(est_config));
            if (est_seed_set)
                sc.seed = est_seed;
            return cmd_estimate(sc, est_alg, est_json);
        }

        // sweep
        if (sw_help_config)
        {
            std::fputs(tisac::kv_schema().c_str(), stdout);
            return 0;
        }
        if (sw_config.empty() && sw_figure.empty())
            throw std::invalid_argument("sweep: pass --config or --figure");

        std::vector<std::pair<std::string, std::string>> jobs_kv; // (stem, kv text)
        if (!sw_figure.empty())
        {
            const FigureBundle &b = find_bundle(sw_figure);
            std::printf("# %s: %s\n", b.name, b.blurb);
            for (const FigureEntry &e : b.entries)
                jobs_kv.emplace_back(e.stem, e.kv);
        }
        else
        {
            std::ifstream in(sw_config, std::ios::binary);
            std::stringstream buf;
            buf << in.rdbuf();
            jobs_kv.emplace_back(std::filesystem::path(sw_config).stem().string(), buf.str());
        }

        if (sw_print)
        {
            for (const auto &[stem, kv] : jobs_kv)
                std::printf("# --- %s ---\n%s", stem.c_str(), kv.c_str());
            return 0;
        }

        for (const auto &[stem, kv] : jobs_kv)
        {
            tisac::SweepConfig sc = tisac::sweep_config_from_kv(tisac::parse_kv_text(kv, stem));
            if (sw_seed_set)
                sc.seed = sw_seed;
            sc.jobs = std::max(1, sw_jobs);
            run_one_sweep(sc, sw_out, stem);
        }
        return 0;
    }
    catch (const tisac::estimation_error &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    catch (const std::invalid_argument &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
