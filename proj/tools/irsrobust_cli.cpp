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

#include "irsrobust.hpp"
#include "irsrobust/config_io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace irsrobust;

namespace
{

struct Common
{
    std::string config;
    std::optional<std::uint64_t> seed;
    int trials = 20;
    std::string scale = "desk";
    std::string out;
    std::string summary;
    std::optional<double> rate;
    std::optional<double> delta;
    std::vector<double> grid;
    std::vector<std::string> schemes;
    int budget = 10000;
    unsigned threads = 0;
    bool no_timing = false;
};

void add_common(CLI::App *app, Common &c, bool sweep)
{
    app->add_option("--config", c.config, "JSON scenario file (powers in dBm)")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "master seed (channel seed for 'run')");
    app->add_option("--scale", c.scale, "default scenario size")->check(CLI::IsMember({"desk", "paper"}));
    app->add_option("--out", c.out, "CSV output path");
    app->add_option("--rate", c.rate, "common rate target [bit/s/Hz]");
    app->add_option("--delta", c.delta, "relative CSI uncertainty");
    app->add_option("--budget", c.budget, "falsifier samples per user")->check(CLI::PositiveNumber);
    if (!sweep)
        return;
    app->add_option("--trials", c.trials, "Monte Carlo trials per grid point")->check(CLI::PositiveNumber);
    app->add_option("--grid", c.grid, "grid values (sorted)");
    app->add_option("--schemes", c.schemes, "subset of robust-iota1 robust-iota0.5 nonrobust no-irs");
    app->add_option("--summary", c.summary, "JSON summary path (default: <out>.summary.json)");
    app->add_option("--threads", c.threads, "worker threads (0: all cores)");
    app->add_flag("--no-timing", c.no_timing, "write 0 in the seconds column");
}

SystemConfig make_config(const Common &c, AoOptions &ao)
{
    const double rate = c.rate.value_or(c.scale == "paper" ? 4.0 : 2.0);
    SystemConfig cfg = c.scale == "paper" ? SystemConfig::full_scale(rate) : SystemConfig::desk(rate);
    if (!c.config.empty())
    {
        const json j = load_json_file(c.config);
        cfg = config_from_json(j, cfg);
        ao = ao_options_from_json(j, ao);
    }
    if (c.rate)
        cfg.set_rate(*c.rate);
    if (c.delta)
        cfg.delta = *c.delta;
    cfg.validate();
    return cfg;
}

int run_sweep(const Common &c, ExperimentSpec::Axis axis, std::vector<double> default_grid,
              std::vector<Scheme> default_schemes)
{
    ExperimentSpec spec;
    spec.base = make_config(c, spec.ao);
    spec.axis = axis;
    spec.grid = c.grid.empty() ? default_grid : c.grid;
    spec.trials = c.trials;
    spec.master_seed = c.seed.value_or(1);
    spec.budget = c.budget;
    spec.threads = c.threads;
    spec.timing = !c.no_timing;
    if (!c.schemes.empty())
    {
        spec.schemes.clear();
        for (const auto &s : c.schemes)
            spec.schemes.push_back(scheme_from_string(s));
    }
    else
        spec.schemes = default_schemes;

    const std::size_t total = spec.schemes.size() * spec.grid.size() * static_cast<std::size_t>(spec.trials);
    std::size_t done = 0;
    const ExperimentResult res = run_experiment(spec, [&](const TrialRecord &r) {
        ++done;
        std::fprintf(stderr, "[%zu/%zu] %s delta=%g r=%g trial=%d P=%.4g W wc=%.4f %s\n", done, total,
                     r.scheme.c_str(), r.delta, r.r, r.trial, r.power_w, r.min_wc_rate, r.status.c_str());
    });

    if (c.out.empty())
        write_csv(res.records, std::cout);
    else
    {
        std::ofstream os(c.out);
        if (!os)
            throw std::runtime_error("cannot write " + c.out);
        write_csv(res.records, os);
    }
    const std::string sum_path = !c.summary.empty() ? c.summary : (c.out.empty() ? "" : c.out + ".summary.json");
    const json sj = summary_json(spec, res);
    if (!sum_path.empty())
    {
        std::ofstream os(sum_path);
        os << sj.dump(2) << '\n';
    }

    std::FILE *tab = c.out.empty() ? stderr : stdout;
    std::fprintf(tab, "%-15s %7s %5s %12s %10s %8s %8s %8s %5s\n", "scheme", "delta", "r", "mean_P_W", "mean_EE",
                 "outage", "ball", "sphere", "fail");
    for (const auto &p : res.summary)
        std::fprintf(tab, "%-15s %7.3f %5.2f %12.5g %10.4g %8.3f %8.3f %8.3f %5d\n", p.scheme.c_str(), p.delta, p.r,
                     p.mean_power_w, p.mean_ee, p.outage, p.outage_ball, p.outage_sphere, p.failures);
    for (const auto &l : res.log)
        std::fprintf(stderr, "failed: %s\n", l.c_str());
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Robust precoder and IRS reflection design"};
    app.require_subcommand(1);

    Common run_c, sd_c, sr_c, out_c;
    std::string scheme_name = "robust-iota1";
    std::string dump_sdp, report_path;

    auto *run = app.add_subcommand("run", "design one channel draw and print a JSON report");
    add_common(run, run_c, false);
    run->add_option("--scheme", scheme_name, "robust-iota1 | robust-iota0.5 | nonrobust | no-irs");
    run->add_option("--dump-sdp", dump_sdp, "write the first precoder SDP in sparse text form");
    run->add_option("--report", report_path, "also write the JSON report to this path");

    auto *sd = app.add_subcommand("sweep-delta", "sweep the CSI uncertainty");
    add_common(sd, sd_c, true);
    auto *sr = app.add_subcommand("sweep-rate", "sweep the rate target");
    add_common(sr, sr_c, true);
    auto *og = app.add_subcommand("outage", "outage of robust vs non-robust designs over delta");
    add_common(og, out_c, true);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed())
        {
            AoOptions ao;
            SystemConfig cfg = make_config(run_c, ao);
            if (run_c.seed)
                cfg.rng_seed = *run_c.seed;
            const Scheme scheme = scheme_from_string(scheme_name);
            const double iota = scheme_iota(scheme);
            const ChannelSet ch = generate_channels(cfg);
            const ScaledLink sl = scale_link(ch, cfg, scheme_is_robust(scheme) && iota > 0.0, iota);
            if (!dump_sdp.empty())
            {
                const Eigen::VectorXcd e0 = Eigen::VectorXcd::Ones(cfg.M);
                std::ofstream os(dump_sdp);
                dump_sparse(build_precoder_problem(sl.link, e0, rzf_precoder(sl.link, e0)), os);
            }
            ao.seed = cfg.rng_seed;
            const AoResult r = run_ao(sl, ao);
            Rng frng(cfg.rng_seed ^ 0x9e3779b97f4a7c15ULL);
            const EvaluatedDesign ev = evaluate_design(r.design, ch, cfg, iota, run_c.budget, 1e-6, frng);
            const json rep = run_report(cfg, r, ev, scheme_name);
            std::cout << rep.dump(2) << '\n';
            if (!report_path.empty())
                std::ofstream(report_path) << rep.dump(2) << '\n';
            if (!run_c.out.empty())
            {
                TrialRecord rec;
                rec.scheme = scheme_name;
                rec.delta = cfg.delta;
                rec.r = cfg.targets[0];
                rec.seed = cfg.rng_seed;
                rec.power_w = r.power();
                rec.min_wc_rate = ev.min_rate;
                rec.outage = ev.outage || !r.feasible();
                rec.ee = energy_efficiency(r.power(), std::max(0.0, ev.min_rate), cfg, scheme_uses_irs(scheme));
                rec.iters = r.outer_iterations;
                rec.seconds = r.seconds;
                std::ofstream os(run_c.out);
                write_csv({rec}, os);
            }
            return r.feasible() ? 0 : 2;
        }
        const std::vector<Scheme> all{Scheme::robust_iota1, Scheme::robust_iota05, Scheme::nonrobust, Scheme::no_irs};
        if (sd->parsed())
            return run_sweep(sd_c, ExperimentSpec::Axis::delta, {0.0, 0.01, 0.02, 0.03, 0.04, 0.05}, all);
        if (sr->parsed())
            return run_sweep(sr_c, ExperimentSpec::Axis::rate, {1.0, 2.0, 3.0, 4.0}, all);
        if (og->parsed())
            return run_sweep(out_c, ExperimentSpec::Axis::delta, {0.01, 0.02, 0.03, 0.04, 0.05},
                             {Scheme::robust_iota1, Scheme::nonrobust});
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
