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

#include "tensorisac/kv_config.hpp"

#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tisac
{

namespace
{

std::string trim(const std::string &s)
{
    const std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string &origin, int line, const std::string &what)
{
    throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + what);
}

/// Consumes parsed entries by key and remembers what was asked for, so the
/// caller can reject everything left over in one message.
class KvReader
{
  public:
    explicit KvReader(const KvFile &kv) : kv_(kv)
    {
        for (const auto &e : kv.entries)
            pending_.insert(e.first);
    }

    bool has(const std::string &key)
    {
        for (const auto &e : kv_.entries)
            if (e.first == key)
            {
                pending_.erase(key);
                return true;
            }
        pending_.erase(key);
        return false;
    }

    std::string raw(const std::string &key)
    {
        for (const auto &e : kv_.entries)
            if (e.first == key)
                return e.second;
        throw std::logic_error("KvReader: raw() without has()");
    }

    long long integer(const std::string &key, const std::string &raw_v)
    {
        std::size_t used = 0;
        long long v = 0;
        try
        {
            v = std::stoll(raw_v, &used);
        }
        catch (const std::exception &)
        {
            used = 0;
        }
        if (used != raw_v.size() || raw_v.empty())
            bad(key, raw_v, "an integer");
        return v;
    }

    double real(const std::string &key, const std::string &raw_v)
    {
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(raw_v, &used);
        }
        catch (const std::exception &)
        {
            used = 0;
        }
        if (used != raw_v.size() || raw_v.empty())
            bad(key, raw_v, "a number");
        return v;
    }

    bool boolean(const std::string &key, const std::string &raw_v)
    {
        if (raw_v == "true" || raw_v == "1")
            return true;
        if (raw_v == "false" || raw_v == "0")
            return false;
        bad(key, raw_v, "true or false");
    }

    std::vector<std::string> list(const std::string &raw_v)
    {
        std::vector<std::string> out;
        std::stringstream ss(raw_v);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            item = trim(item);
            if (!item.empty())
                out.push_back(item);
        }
        return out;
    }

    const std::set<std::string> &pending() const { return pending_; }
    const std::string &origin() const { return kv_.origin; }

    [[noreturn]] void bad(const std::string &key, const std::string &raw_v, const std::string &want)
    {
        throw std::invalid_argument(kv_.origin + ": key '" + key + "': '" + raw_v + "' is not " + want);
    }

  private:
    const KvFile &kv_;
    std::set<std::string> pending_;
};

} // namespace

KvFile parse_kv_text(const std::string &text, const std::string &origin)
{
    KvFile kv;
    kv.origin = origin;
    std::map<std::string, int> seen;

    std::stringstream ss(text);
    std::string line;
    int n = 0;
    while (std::getline(ss, line))
    {
        ++n;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(origin, n, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            fail(origin, n, "empty key");
        if (value.empty())
            fail(origin, n, "key '" + key + "' has no value");
        const auto prev = seen.find(key);
        if (prev != seen.end())
            fail(origin, n, "key '" + key + "' already set on line " + std::to_string(prev->second));
        seen[key] = n;
        kv.entries.emplace_back(key, value);
    }
    return kv;
}

KvFile parse_kv_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_kv_text(buf.str(), path);
}

SweepConfig sweep_config_from_kv(const KvFile &kv)
{
    KvReader rd(kv);
    SweepConfig sc;

    // Array / waveform geometry: collected first because ArrayConfig::make
    // derives the timing from the full set.
    int m_bs = sc.cfg.m_bs, m_re = sc.cfg.m_re, m_ue = sc.cfg.m_ue, k0 = sc.cfg.k0;
    double f_c = sc.cfg.f_c, f_s = sc.cfg.f_s, cp_fraction = sc.cfg.t_cp * sc.cfg.delta_f;
    double dol = sc.cfg.d_over_lambda;
    if (rd.has("m_bs"))
        m_bs = static_cast<int>(rd.integer("m_bs", rd.raw("m_bs")));
    if (rd.has("m_re"))
        m_re = static_cast<int>(rd.integer("m_re", rd.raw("m_re")));
    if (rd.has("m_ue"))
        m_ue = static_cast<int>(rd.integer("m_ue", rd.raw("m_ue")));
    if (rd.has("k0"))
        k0 = static_cast<int>(rd.integer("k0", rd.raw("k0")));
    if (rd.has("f_c_hz"))
        f_c = rd.real("f_c_hz", rd.raw("f_c_hz"));
    if (rd.has("f_s_hz"))
        f_s = rd.real("f_s_hz", rd.raw("f_s_hz"));
    if (rd.has("cp_fraction"))
        cp_fraction = rd.real("cp_fraction", rd.raw("cp_fraction"));
    if (rd.has("d_over_lambda"))
        dol = rd.real("d_over_lambda", rd.raw("d_over_lambda"));
    sc.cfg = ArrayConfig::make(m_bs, m_re, m_ue, f_c, f_s, k0, cp_fraction);
    sc.cfg.d_over_lambda = dol;

    bool problem_set = false;
    if (rd.has("problem"))
    {
        const std::string v = rd.raw("problem");
        if (v == "sensing")
            sc.problem = problem_kind::sensing;
        else if (v == "channel")
            sc.problem = problem_kind::channel;
        else
            rd.bad("problem", v, "sensing or channel");
        problem_set = true;
    }
    if (rd.has("scatterers"))
    {
        const std::string v = rd.raw("scatterers");
        if (v == "targets")
            sc.bounds.kind = scatter_kind::targets;
        else if (v == "multipaths")
            sc.bounds.kind = scatter_kind::multipaths;
        else if (v == "targets_with_interferers")
            sc.bounds.kind = scatter_kind::targets_with_interferers;
        else
            rd.bad("scatterers", v, "targets, multipaths, or targets_with_interferers");
    }
    else if (problem_set)
    {
        sc.bounds.kind =
            sc.problem == problem_kind::channel ? scatter_kind::multipaths : scatter_kind::targets;
    }

    if (rd.has("q"))
        sc.q = static_cast<int>(rd.integer("q", rd.raw("q")));
    if (rd.has("q_list"))
        for (const std::string &item : rd.list(rd.raw("q_list")))
            sc.q_list.push_back(static_cast<int>(rd.integer("q_list", item)));
    if (rd.has("interferers"))
        sc.bounds.interferers = static_cast<int>(rd.integer("interferers", rd.raw("interferers")));
    if (rd.has("angle_bound_rad"))
        sc.bounds.angle_bound = rd.real("angle_bound_rad", rd.raw("angle_bound_rad"));
    if (rd.has("v_max_mps"))
        sc.bounds.v_max = rd.real("v_max_mps", rd.raw("v_max_mps"));
    if (rd.has("nu_max_hz"))
        sc.bounds.nu_max = rd.real("nu_max_hz", rd.raw("nu_max_hz"));
    if (rd.has("delay_max_s"))
        sc.bounds.delay_max = rd.real("delay_max_s", rd.raw("delay_max_s"));

    if (rd.has("n_symbols"))
        sc.n_symbols = static_cast<int>(rd.integer("n_symbols", rd.raw("n_symbols")));
    if (rd.has("n_subcarriers"))
        sc.n_subcarriers = static_cast<int>(rd.integer("n_subcarriers", rd.raw("n_subcarriers")));
    if (rd.has("subcarrier_stride"))
        sc.subcarrier_stride =
            static_cast<int>(rd.integer("subcarrier_stride", rd.raw("subcarrier_stride")));
    if (rd.has("beam_squint"))
        sc.beam_squint = rd.boolean("beam_squint", rd.raw("beam_squint"));
    if (rd.has("segment_nd"))
        sc.segment_nd = static_cast<int>(rd.integer("segment_nd", rd.raw("segment_nd")));
    if (rd.has("segment_l"))
        sc.segment_l = static_cast<int>(rd.integer("segment_l", rd.raw("segment_l")));

    if (rd.has("k3"))
        sc.k3 = static_cast<int>(rd.integer("k3", rd.raw("k3")));
    if (rd.has("segment_k3"))
        sc.segment_k3 = static_cast<int>(rd.integer("segment_k3", rd.raw("segment_k3")));
    if (rd.has("i_iter"))
        sc.i_iter = static_cast<int>(rd.integer("i_iter", rd.raw("i_iter")));

    if (rd.has("snr_db_list"))
    {
        sc.snr_db.clear();
        for (const std::string &item : rd.list(rd.raw("snr_db_list")))
            sc.snr_db.push_back(rd.real("snr_db_list", item));
    }
    if (rd.has("trials"))
        sc.trials = static_cast<int>(rd.integer("trials", rd.raw("trials")));
    if (rd.has("algorithms"))
        sc.algorithms = rd.list(rd.raw("algorithms"));
    if (rd.has("metrics"))
        sc.metrics = rd.list(rd.raw("metrics"));
    if (rd.has("seed"))
    {
        const std::string v = rd.raw("seed");
        std::size_t used = 0;
        unsigned long long s = 0;
        try
        {
            s = std::stoull(v, &used);
        }
        catch (const std::exception &)
        {
            used = 0;
        }
        if (used != v.size() || v.empty())
            rd.bad("seed", v, "a non-negative integer");
        sc.seed = s;
    }
    if (rd.has("trim"))
        sc.trim = rd.real("trim", rd.raw("trim"));

    if (!rd.pending().empty())
    {
        std::string msg = kv.origin + ": unknown key(s):";
        for (const std::string &k : rd.pending())
            msg += " '" + k + "'";
        throw std::invalid_argument(msg);
    }

    sc.validate();
    return sc;
}

std::string kv_schema()
{
    return "Config keys (flat `key = value` lines, '#' comments; every key optional):\n"
           "  m_bs (64)                  transmit antennas\n"
           "  m_re (8)                   sensing receive antennas\n"
           "  m_ue (8)                   user antennas\n"
           "  d_over_lambda (0.5)        element spacing over carrier wavelength\n"
           "  f_c_hz (28e9)              carrier frequency\n"
           "  f_s_hz (100e6)             occupied bandwidth\n"
           "  k0 (128)                   total subcarriers\n"
           "  cp_fraction (0.5)          cyclic prefix as a fraction of 1/delta_f\n"
           "  problem (sensing)          sensing | channel\n"
           "  scatterers                 targets | multipaths | targets_with_interferers\n"
           "                             (default follows `problem`)\n"
           "  q (4)                      scatterers per trial\n"
           "  q_list ()                  comma list: scan over scatterer counts\n"
           "  interferers (0)            extra non-target echoes per trial\n"
           "  angle_bound_rad (pi/3)     angles drawn uniform on [-bound, bound]\n"
           "  v_max_mps (30)             max target speed\n"
           "  nu_max_hz (2800)           multipath Doppler spread (two-sided)\n"
           "  delay_max_s (0)            cap on delay draws; 0 = full [0, t_cp]\n"
           "  n_symbols (16)             training OFDM symbols\n"
           "  n_subcarriers (16)         training subcarriers\n"
           "  subcarrier_stride (1)      comb spacing of training tones over the grid\n"
           "  beam_squint (false)        frequency-dependent steering + segment training\n"
           "  segment_nd (0)             symbols per segment (beam_squint only)\n"
           "  segment_l (0)              segments (beam_squint only)\n"
           "  k3 (0)                     smoothing parameter, full-grid pipeline; 0 = auto\n"
           "  segment_k3 (0)             smoothing parameter, per-subcarrier pipeline; 0 = auto\n"
           "  i_iter (30)                alternation rounds, full-grid pipeline\n"
           "  snr_db_list (0,10,20,30)   comma list of SNR points\n"
           "  trials (200)               Monte Carlo trials per point\n"
           "  algorithms (alg1)          comma list of alg1,alg2,als,music,mf\n"
           "  metrics ()                 comma filter (rmse_aoa, rmse_aod, rmse_range,\n"
           "                             rmse_velocity, nmse, success_rate, runtime_s);\n"
           "                             empty = all applicable\n"
           "  seed (1)                   master RNG seed\n"
           "  trim (0.05)                worst-trial fraction dropped per error metric\n";
}

} // namespace tisac
