// SPDX-License-Identifier: Apache-2.0
//
// irsrobust: worst-case robust precoder / IRS reflection design
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

// JSON reading and writing. Needs nlohmann/json ("json.hpp") on the include path.

#ifndef IRSROBUST_CONFIG_IO_HPP
#define IRSROBUST_CONFIG_IO_HPP

#include "channel.hpp"
#include "evaluation.hpp"
#include "optimizer.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace irsrobust
{

using json = nlohmann::json;

namespace detail
{
inline Point2 point_from_json(const json &j, const char *name)
{
    if (j.is_array() && j.size() == 2)
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object() && j.contains("x") && j.contains("y"))
        return {j["x"].get<double>(), j["y"].get<double>()};
    throw std::invalid_argument(std::string("config: '") + name + "' must be [x, y] or {\"x\":..,\"y\":..}");
}

// scalar (broadcast to K entries) or array of K
inline std::vector<double> per_user(const json &j, int K, const char *name)
{
    if (j.is_number())
        return std::vector<double>(K, j.get<double>());
    if (j.is_array())
    {
        auto v = j.get<std::vector<double>>();
        if (static_cast<int>(v.size()) != K)
            throw std::invalid_argument(std::string("config: '") + name + "' needs " + std::to_string(K) + " entries");
        return v;
    }
    throw std::invalid_argument(std::string("config: '") + name + "' must be a number or an array");
}
} // namespace detail

/**
 * Reads a SystemConfig. Keys are the field names of SystemConfig; absent keys
 * keep the value from `base`. sigma2, p_active and p_passive are given in dBm.
 * Keys "ccp" and "ao" are accepted here and read by `ao_options_from_json`.
 */
inline SystemConfig config_from_json(const json &j, SystemConfig base = SystemConfig::desk())
{
    static const std::set<std::string> known{
        "N",        "M",        "K",          "iota",        "sigma2",   "targets",       "delta",
        "bs",       "irs",      "user_center", "user_radius", "alpha_bi", "alpha_bu",      "alpha_iu",
        "rician_kappa", "p_active", "p_passive", "rng_seed",   "ccp",      "ao"};
    if (!j.is_object())
        throw std::invalid_argument("config: expected a JSON object");
    for (const auto &[key, _] : j.items())
        if (!known.count(key))
            throw std::invalid_argument("config: unknown key '" + key + "'");

    SystemConfig c = base;
    const int K_old = c.K;
    if (j.contains("N"))
        c.N = j["N"].get<int>();
    if (j.contains("M"))
        c.M = j["M"].get<int>();
    if (j.contains("K"))
        c.K = j["K"].get<int>();
    if (c.K != K_old)
    {
        // resize the per-user vectors from the base's first entry
        if (c.K < 1)
            throw std::invalid_argument("config: K must be >= 1");
        c.sigma2.assign(c.K, base.sigma2.empty() ? dbm_to_watt(-100.0) : base.sigma2.front());
        c.targets.assign(c.K, base.targets.empty() ? 2.0 : base.targets.front());
    }
    if (j.contains("iota"))
        c.iota = j["iota"].get<double>();
    if (j.contains("sigma2"))
    {
        c.sigma2 = detail::per_user(j["sigma2"], c.K, "sigma2");
        for (double &s : c.sigma2)
            s = dbm_to_watt(s);
    }
    if (j.contains("targets"))
        c.targets = detail::per_user(j["targets"], c.K, "targets");
    if (j.contains("delta"))
        c.delta = j["delta"].get<double>();
    if (j.contains("bs"))
        c.bs = detail::point_from_json(j["bs"], "bs");
    if (j.contains("irs"))
        c.irs = detail::point_from_json(j["irs"], "irs");
    if (j.contains("user_center"))
        c.user_center = detail::point_from_json(j["user_center"], "user_center");
    if (j.contains("user_radius"))
        c.user_radius = j["user_radius"].get<double>();
    if (j.contains("alpha_bi"))
        c.alpha_bi = j["alpha_bi"].get<double>();
    if (j.contains("alpha_bu"))
        c.alpha_bu = j["alpha_bu"].get<double>();
    if (j.contains("alpha_iu"))
        c.alpha_iu = j["alpha_iu"].get<double>();
    if (j.contains("rician_kappa"))
        c.rician_kappa = j["rician_kappa"].get<double>();
    if (j.contains("p_active"))
        c.p_active = dbm_to_watt(j["p_active"].get<double>());
    if (j.contains("p_passive"))
        c.p_passive = dbm_to_watt(j["p_passive"].get<double>());
    if (j.contains("rng_seed"))
        c.rng_seed = j["rng_seed"].get<std::uint64_t>();
    c.validate();
    return c;
}

/// Optional "ccp" {lambda0, gamma, lambda_max, chi, nu, t_max, max_restarts} and "ao" {max_outer, rel_tol} blocks.
inline AoOptions ao_options_from_json(const json &j, AoOptions o = {})
{
    if (j.contains("ccp"))
    {
        const json &c = j["ccp"];
        o.ccp.lambda0 = c.value("lambda0", o.ccp.lambda0);
        o.ccp.gamma = c.value("gamma", o.ccp.gamma);
        o.ccp.lambda_max = c.value("lambda_max", o.ccp.lambda_max);
        o.ccp.chi = c.value("chi", o.ccp.chi);
        o.ccp.nu = c.value("nu", o.ccp.nu);
        o.ccp.t_max = c.value("t_max", o.ccp.t_max);
        o.ccp.max_restarts = c.value("max_restarts", o.ccp.max_restarts);
        o.ccp.validate();
    }
    if (j.contains("ao"))
    {
        const json &a = j["ao"];
        o.max_outer = a.value("max_outer", o.max_outer);
        o.rel_tol = a.value("rel_tol", o.rel_tol);
        if (o.max_outer < 1 || !(o.rel_tol > 0.0))
            throw std::invalid_argument("config: ao.max_outer must be >= 1 and ao.rel_tol > 0");
    }
    return o;
}

inline json load_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

/// Inverse of config_from_json (powers back in dBm).
inline json config_to_json(const SystemConfig &c)
{
    json j;
    j["N"] = c.N;
    j["M"] = c.M;
    j["K"] = c.K;
    j["iota"] = c.iota;
    std::vector<double> s;
    for (double w : c.sigma2)
        s.push_back(watt_to_dbm(w));
    j["sigma2"] = s;
    j["targets"] = c.targets;
    j["delta"] = c.delta;
    j["bs"] = {c.bs.x, c.bs.y};
    j["irs"] = {c.irs.x, c.irs.y};
    j["user_center"] = {c.user_center.x, c.user_center.y};
    j["user_radius"] = c.user_radius;
    j["alpha_bi"] = c.alpha_bi;
    j["alpha_bu"] = c.alpha_bu;
    j["alpha_iu"] = c.alpha_iu;
    j["rician_kappa"] = c.rician_kappa;
    j["p_active"] = watt_to_dbm(c.p_active);
    j["p_passive"] = watt_to_dbm(c.p_passive);
    j["rng_seed"] = c.rng_seed;
    return j;
}

/// Per-run report: config echo, trace, iteration counts, CCP diagnostics, worst-case margins.
inline json run_report(const SystemConfig &cfg, const AoResult &r, const EvaluatedDesign &ev, const std::string &scheme)
{
    json j;
    j["scheme"] = scheme;
    j["config"] = config_to_json(cfg);
    j["status"] = to_string(r.status);
    j["power_w"] = r.power();
    j["power_dbm"] = r.power() > 0.0 ? watt_to_dbm(r.power()) : -std::numeric_limits<double>::infinity();
    j["trace_w"] = r.trace;
    j["outer_iterations"] = r.outer_iterations;
    j["ccp_restarts"] = r.ccp_restarts;
    j["ccp_stalled"] = r.ccp_stalled;
    json ccp = json::array();
    for (const auto &c : r.ccp)
        ccp.push_back({{"iterations", c.iterations},
                       {"restarts", c.restarts},
                       {"progressed", c.progressed},
                       {"accepted", c.accepted},
                       {"b_norm", c.b_norm},
                       {"modulus_dev_before", c.modulus_dev_before},
                       {"modulus_dev_after", c.modulus_dev_after}});
    j["ccp"] = ccp;
    j["certificate"] = r.certificate;
    std::vector<double> margins;
    for (int k = 0; k < static_cast<int>(ev.wc_rates.size()); ++k)
        margins.push_back(ev.wc_rates[k] - cfg.targets[k]);
    j["worst_case_rates"] = ev.wc_rates;
    j["worst_case_margins"] = margins;
    j["outage"] = ev.outage;
    std::vector<double> phases;
    for (Eigen::Index m = 0; m < r.design.e.size(); ++m)
        phases.push_back(std::arg(r.design.e[m]));
    j["phases_rad"] = phases;
    j["seconds"] = r.seconds;
    return j;
}

inline json summary_json(const ExperimentSpec &spec, const ExperimentResult &res)
{
    json j;
    j["axis"] = spec.axis == ExperimentSpec::Axis::delta ? "delta" : "rate";
    j["grid"] = spec.grid;
    j["trials"] = spec.trials;
    j["master_seed"] = spec.master_seed;
    j["budget"] = spec.budget;
    j["config"] = config_to_json(spec.base);
    json pts = json::array();
    for (const auto &p : res.summary)
        pts.push_back({{"scheme", p.scheme},
                       {"delta", p.delta},
                       {"r", p.r},
                       {"trials", p.trials},
                       {"failures", p.failures},
                       {"mean_power_w", p.mean_power_w},
                       {"mean_ee", p.mean_ee},
                       {"outage", p.outage},
                       {"outage_ball", p.outage_ball},
                       {"outage_sphere", p.outage_sphere}});
    j["points"] = pts;
    j["log"] = res.log;
    return j;
}

} // namespace irsrobust

#endif
