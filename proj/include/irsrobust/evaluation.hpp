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

#ifndef IRSROBUST_EVALUATION_HPP
#define IRSROBUST_EVALUATION_HPP

#include "channel.hpp"
#include "optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace irsrobust
{

// ---------------------------------------------------------------------------
// Worst-case rate falsifier
// ---------------------------------------------------------------------------

/// Rate of user k as a function of the reflection-channel error, with the design fixed.
class RateMap
{
  public:
    RateMap(const DesignPoint &design, const Eigen::VectorXcd &h_d, const Eigen::VectorXcd &h_r_hat,
            const Eigen::MatrixXcd &H_dr, double sigma2, double iota, int k)
        : sigma2_(sigma2), k_(k)
    {
        if (design.F.rows() != H_dr.cols() || design.e.size() != H_dr.rows() || k < 0 || k >= design.F.cols())
            throw std::invalid_argument("RateMap: dimension mismatch");
        B_ = iota * design.e.asDiagonal() * H_dr * design.F; // M x K
        a_ = h_d.adjoint() * design.F + h_r_hat.adjoint() * B_;
    }

    /// log2(1 + SINR) at h_r = h_r_hat + delta.
    double operator()(const Eigen::VectorXcd &delta) const
    {
        const Eigen::RowVectorXcd gf = a_ + delta.adjoint() * B_;
        const double s = std::norm(gf[k_]);
        return std::log2(1.0 + s / (gf.squaredNorm() - s + sigma2_));
    }

    int dim() const { return static_cast<int>(B_.rows()); }

  private:
    Eigen::MatrixXcd B_;
    Eigen::RowVectorXcd a_;
    double sigma2_;
    int k_;
};

namespace detail
{
inline Eigen::VectorXcd project_ball(Eigen::VectorXcd d, double eps)
{
    const double n = d.norm();
    if (n > eps)
        d *= eps / n;
    return d;
}
} // namespace detail

struct WorstCaseResult
{
    double rate = 0.0;        // smallest rate found
    double sample_rate = 0.0; // smallest rate among the raw samples
    Eigen::VectorXcd delta;   // error attaining `rate`
};

/**
 * Upper estimate of min_{||delta|| <= eps} R_k: `budget` uniform samples on
 * the sphere ||delta|| = eps, then projected descent from the best sample
 * (central-difference gradient, normalized step with backtracking).
 */
inline WorstCaseResult worst_case_search(const RateMap &rate, double eps, int budget, Rng &rng, int steps = 100)
{
    if (budget < 1)
        throw std::invalid_argument("worst_case_rate: budget must be >= 1");
    if (eps < 0.0)
        throw std::invalid_argument("worst_case_rate: eps must be >= 0");
    const int M = rate.dim();
    WorstCaseResult res;
    res.delta = Eigen::VectorXcd::Zero(M);
    res.rate = rate(res.delta);
    if (eps == 0.0)
    {
        res.sample_rate = res.rate;
        return res;
    }
    res.rate = std::numeric_limits<double>::infinity();
    for (int s = 0; s < budget; ++s)
    {
        const Eigen::VectorXcd d = perturb_channel(eps, M, rng, true);
        const double r = rate(d);
        if (r < res.rate)
        {
            res.rate = r;
            res.delta = d;
        }
    }
    res.sample_rate = res.rate;

    Eigen::VectorXcd x = res.delta;
    double fx = res.rate;
    double step = 0.1 * eps;
    const double h = 1e-6 * eps;
    Eigen::VectorXcd g(M);
    for (int it = 0; it < steps; ++it)
    {
        for (int m = 0; m < M; ++m)
        {
            Eigen::VectorXcd xp = x, xm = x;
            xp[m] += h;
            xm[m] -= h;
            const double gr = (rate(xp) - rate(xm)) / (2.0 * h);
            xp = x;
            xm = x;
            xp[m] += cplx(0.0, h);
            xm[m] -= cplx(0.0, h);
            const double gi = (rate(xp) - rate(xm)) / (2.0 * h);
            g[m] = cplx(gr, gi);
        }
        const double gn = g.norm();
        if (!(gn > 0.0))
            break;
        const Eigen::VectorXcd cand = detail::project_ball(x - (step / gn) * g, eps);
        const double fc = rate(cand);
        if (fc < fx)
        {
            x = cand;
            fx = fc;
            step *= 1.5;
        }
        else
            step *= 0.5;
        if (step < 1e-12 * eps)
            break;
    }
    if (fx < res.rate)
    {
        res.rate = fx;
        res.delta = x;
    }
    return res;
}

inline double worst_case_rate(const DesignPoint &design, const ChannelSet &ch, const SystemConfig &cfg, double iota,
                              int k, double eps, int budget, Rng &rng)
{
    if (eps == 0.0)
        return achievable_rate(design, ch.h_d[k], ch.h_r_hat[k], ch.H_dr, cfg.sigma2[k], iota, k);
    const RateMap rate(design, ch.h_d[k], ch.h_r_hat[k], ch.H_dr, cfg.sigma2[k], iota, k);
    return worst_case_search(rate, eps, budget, rng).rate;
}

// ---------------------------------------------------------------------------
// Schemes and energy efficiency
// ---------------------------------------------------------------------------

enum class Scheme
{
    robust_iota1,
    robust_iota05,
    nonrobust,
    no_irs
};

inline const char *to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::robust_iota1: return "robust-iota1";
    case Scheme::robust_iota05: return "robust-iota0.5";
    case Scheme::nonrobust: return "nonrobust";
    case Scheme::no_irs: return "no-irs";
    }
    return "unknown";
}

inline Scheme scheme_from_string(const std::string &s)
{
    for (Scheme c : {Scheme::robust_iota1, Scheme::robust_iota05, Scheme::nonrobust, Scheme::no_irs})
        if (s == to_string(c))
            return c;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

inline double scheme_iota(Scheme s)
{
    switch (s)
    {
    case Scheme::robust_iota05: return 0.5;
    case Scheme::no_irs: return 0.0;
    default: return 1.0;
    }
}

inline bool scheme_uses_irs(Scheme s) { return s != Scheme::no_irs; }
inline bool scheme_is_robust(Scheme s) { return s == Scheme::robust_iota1 || s == Scheme::robust_iota05; }

/// min rate / (||F||^2 + N P_active [+ M P_passive]).
inline double energy_efficiency(double power_tx, double min_rate, const SystemConfig &cfg, bool with_irs)
{
    if (!(power_tx >= 0.0))
        throw std::invalid_argument("energy_efficiency: transmit power must be >= 0");
    double total = power_tx + cfg.N * cfg.p_active;
    if (with_irs)
        total += cfg.M * cfg.p_passive;
    return min_rate / total;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ExperimentSpec
{
    enum class Axis
    {
        delta,
        rate
    };

    SystemConfig base = SystemConfig::desk();
    Axis axis = Axis::delta;
    std::vector<double> grid{0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
    int trials = 20;
    std::vector<Scheme> schemes{Scheme::robust_iota1, Scheme::robust_iota05, Scheme::nonrobust, Scheme::no_irs};
    std::uint64_t master_seed = 1;
    int budget = 10000;       // falsifier samples per user
    double outage_tol = 1e-6; // rate below r - tol counts as outage
    AoOptions ao;
    unsigned threads = 0;     // 0: hardware concurrency
    bool timing = true;       // false writes 0 in the seconds column (byte-stable output)

    void validate() const
    {
        base.validate();
        if (trials < 1)
            throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
        if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()))
            throw std::invalid_argument("ExperimentSpec: grid must be non-empty and sorted");
        if (schemes.empty())
            throw std::invalid_argument("ExperimentSpec: no schemes");
        if (budget < 1)
            throw std::invalid_argument("ExperimentSpec: budget must be >= 1");
        for (double g : grid)
        {
            if (axis == Axis::delta && !(g >= 0.0 && g < 1.0))
                throw std::invalid_argument("ExperimentSpec: delta grid values must lie in [0, 1)");
            if (axis == Axis::rate && !(g > 0.0))
                throw std::invalid_argument("ExperimentSpec: rate grid values must be > 0");
        }
    }
};

struct TrialRecord
{
    std::string scheme;
    double delta = 0.0;
    double r = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    double power_w = 0.0;
    std::vector<double> wc_rates; // per-user falsifier estimates
    double min_wc_rate = 0.0;
    bool outage = false;          // falsifier (sphere samples + descent)
    bool outage_ball = false;     // realized error drawn uniformly in the ball
    bool outage_sphere = false;   // one realized error drawn on the sphere
    double ee = 0.0;
    int iters = 0;
    double seconds = 0.0;
    std::string status;
    bool failed = false;
    double trace_rise = 0.0;   // largest increase between consecutive objective values [W]
    double modulus_dev = 0.0;  // max_m ||e_m| - 1| of the returned design
    double ccp_b_norm = 0.0;   // largest ||b||_1 over reflection updates that made progress
};

/// Per-trial channel seed from (master seed, trial index).
inline std::uint64_t trial_seed(std::uint64_t master, int trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline Rng stream(std::uint64_t seed, std::uint32_t a, std::uint32_t b, std::uint32_t c)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), a, b, c};
    return Rng(seq);
}

struct EvaluatedDesign
{
    std::vector<double> wc_rates;
    double min_rate = 0.0;
    bool outage = false;
    bool outage_ball = false;
    bool outage_sphere = false;
};

/// Falsifier and realized-error outage checks of a design on one channel draw.
inline EvaluatedDesign evaluate_design(const DesignPoint &design, const ChannelSet &ch, const SystemConfig &cfg,
                                       double iota, int budget, double tol, Rng &rng)
{
    EvaluatedDesign ev;
    ev.min_rate = std::numeric_limits<double>::infinity();
    for (int k = 0; k < ch.K(); ++k)
    {
        const RateMap rate(design, ch.h_d[k], ch.h_r_hat[k], ch.H_dr, cfg.sigma2[k], iota, k);
        const double wc = worst_case_rate(design, ch, cfg, iota, k, ch.eps[k], budget, rng);
        ev.wc_rates.push_back(wc);
        ev.min_rate = std::min(ev.min_rate, wc);
        ev.outage = ev.outage || wc < cfg.targets[k] - tol;
        const double rb = rate(ch.h_r_true[k] - ch.h_r_hat[k]);
        ev.outage_ball = ev.outage_ball || rb < cfg.targets[k] - tol;
        const double rs = rate(perturb_channel(ch.eps[k], ch.M(), rng, true));
        ev.outage_sphere = ev.outage_sphere || rs < cfg.targets[k] - tol;
    }
    return ev;
}

struct PointSummary
{
    std::string scheme;
    double delta = 0.0;
    double r = 0.0;
    int trials = 0;
    int failures = 0;
    double mean_power_w = 0.0; // over non-failed trials
    double mean_ee = 0.0;
    double outage = 0.0;       // falsifier outage, failures counted as outage
    double outage_ball = 0.0;
    double outage_sphere = 0.0;
};

struct ExperimentResult
{
    std::vector<TrialRecord> records; // ordered by (scheme, point, trial)
    std::vector<PointSummary> summary;
    std::vector<std::string> log;
};

namespace detail
{
struct DesignOutcome
{
    DesignPoint design;
    std::string status;
    bool failed = false;
    int iters = 0;
    double seconds = 0.0;
    double trace_rise = 0.0;
    double modulus_dev = 0.0;
    double ccp_b_norm = 0.0;
};

inline DesignOutcome design_for(Scheme scheme, const ChannelSet &ch, const SystemConfig &cfg, const AoOptions &opt)
{
    const double iota = scheme_iota(scheme);
    const bool robust = scheme_is_robust(scheme) || (scheme == Scheme::no_irs);
    // without an IRS the reflection error has no effect
    const AoResult r = run_ao(scale_link(ch, cfg, robust && iota > 0.0, iota), opt);
    DesignOutcome o;
    o.design = r.design;
    o.status = to_string(r.status);
    o.failed = !r.feasible();
    o.iters = r.outer_iterations;
    o.seconds = r.seconds;
    for (std::size_t i = 1; i < r.trace.size(); ++i)
        o.trace_rise = std::max(o.trace_rise, r.trace[i] - r.trace[i - 1]);
    for (Eigen::Index m = 0; m < r.design.e.size(); ++m)
        o.modulus_dev = std::max(o.modulus_dev, std::abs(std::abs(r.design.e[m]) - 1.0));
    for (const auto &c : r.ccp)
        if (c.progressed)
            o.ccp_b_norm = std::max(o.ccp_b_norm, c.b_norm);
    return o;
}
} // namespace detail

/**
 * Runs every (scheme, grid point, trial). Channels depend only on
 * (master seed, trial), so all grid points of a trial share the same draw;
 * non-robust and no-IRS designs do not depend on delta and are computed once
 * per (trial, rate). Output order and content are independent of `threads`.
 */
inline ExperimentResult run_experiment(const ExperimentSpec &spec,
                                       const std::function<void(const TrialRecord &)> &progress = {})
{
    spec.validate();
    const int P = static_cast<int>(spec.grid.size());
    const int S = static_cast<int>(spec.schemes.size());
    const int T = spec.trials;
    ExperimentResult res;
    res.records.resize(static_cast<std::size_t>(S) * P * T);
    std::mutex mtx;

    // one task per trial keeps the per-trial design cache local
    auto run_trial = [&](int t) {
        const std::uint64_t seed = trial_seed(spec.master_seed, t);
        std::map<std::pair<int, double>, detail::DesignOutcome> nominal_cache; // keyed by (scheme, rate)
        for (int p = 0; p < P; ++p)
        {
            SystemConfig cfg = spec.base;
            cfg.rng_seed = seed;
            if (spec.axis == ExperimentSpec::Axis::delta)
                cfg.delta = spec.grid[p];
            else
                cfg.set_rate(spec.grid[p]);
            const ChannelSet ch = generate_channels(cfg);
            for (int s = 0; s < S; ++s)
            {
                const Scheme scheme = spec.schemes[s];
                AoOptions opt = spec.ao;
                opt.seed = stream(seed, 1, static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(p))();
                detail::DesignOutcome d;
                if (scheme == Scheme::nonrobust || scheme == Scheme::no_irs)
                {
                    const std::pair<int, double> key{s, cfg.targets[0]};
                    auto it = nominal_cache.find(key);
                    if (it == nominal_cache.end())
                    {
                        opt.seed = stream(seed, 2, static_cast<std::uint32_t>(s), 0)();
                        it = nominal_cache.emplace(key, detail::design_for(scheme, ch, cfg, opt)).first;
                    }
                    d = it->second;
                }
                else
                    d = detail::design_for(scheme, ch, cfg, opt);

                Rng frng = stream(seed, 3, static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(p));
                const double iota = scheme_iota(scheme);
                const EvaluatedDesign ev = evaluate_design(d.design, ch, cfg, iota, spec.budget, spec.outage_tol, frng);

                TrialRecord rec;
                rec.scheme = to_string(scheme);
                rec.delta = cfg.delta;
                rec.r = cfg.targets[0];
                rec.trial = t;
                rec.seed = seed;
                rec.power_w = d.design.power();
                rec.wc_rates = ev.wc_rates;
                rec.min_wc_rate = ev.min_rate;
                rec.failed = d.failed;
                rec.outage = ev.outage || d.failed;
                rec.outage_ball = ev.outage_ball || d.failed;
                rec.outage_sphere = ev.outage_sphere || d.failed;
                rec.ee = energy_efficiency(rec.power_w, std::max(0.0, ev.min_rate), cfg, scheme_uses_irs(scheme));
                rec.iters = d.iters;
                rec.seconds = spec.timing ? d.seconds : 0.0;
                rec.status = d.status;
                rec.trace_rise = d.trace_rise;
                rec.modulus_dev = d.modulus_dev;
                rec.ccp_b_norm = d.ccp_b_norm;
                const std::size_t idx = (static_cast<std::size_t>(s) * P + p) * T + t;
                std::lock_guard<std::mutex> lock(mtx);
                res.records[idx] = rec;
                if (d.failed)
                {
                    std::ostringstream os;
                    os << "trial " << t << " scheme " << rec.scheme << " delta " << rec.delta << " r " << rec.r << ": "
                       << d.status;
                    res.log.push_back(os.str());
                }
                if (progress)
                    progress(rec);
            }
        }
    };

    unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(T));
    if (threads <= 1)
        for (int t = 0; t < T; ++t)
            run_trial(t);
    else
    {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (int t = next++; t < T; t = next++)
                    run_trial(t);
            });
        for (auto &th : pool)
            th.join();
    }
    std::sort(res.log.begin(), res.log.end());

    for (int s = 0; s < S; ++s)
        for (int p = 0; p < P; ++p)
        {
            PointSummary ps;
            ps.scheme = to_string(spec.schemes[s]);
            int ok = 0;
            for (int t = 0; t < T; ++t)
            {
                const TrialRecord &r = res.records[(static_cast<std::size_t>(s) * P + p) * T + t];
                ps.delta = r.delta;
                ps.r = r.r;
                ++ps.trials;
                if (r.failed)
                    ++ps.failures;
                else
                {
                    ++ok;
                    ps.mean_power_w += r.power_w;
                    ps.mean_ee += r.ee;
                }
                ps.outage += r.outage ? 1.0 : 0.0;
                ps.outage_ball += r.outage_ball ? 1.0 : 0.0;
                ps.outage_sphere += r.outage_sphere ? 1.0 : 0.0;
            }
            if (ok > 0)
            {
                ps.mean_power_w /= ok;
                ps.mean_ee /= ok;
            }
            else
                ps.mean_power_w = ps.mean_ee = std::numeric_limits<double>::quiet_NaN();
            ps.outage /= ps.trials;
            ps.outage_ball /= ps.trials;
            ps.outage_sphere /= ps.trials;
            res.summary.push_back(ps);
        }
    return res;
}

/// Fraction of trials in outage for one scheme and grid point.
inline double outage_probability(const ExperimentResult &res, const std::string &scheme, double point_value,
                                 ExperimentSpec::Axis axis)
{
    for (const auto &s : res.summary)
        if (s.scheme == scheme && (axis == ExperimentSpec::Axis::delta ? s.delta : s.r) == point_value)
            return s.outage;
    throw std::invalid_argument("outage_probability: no such point");
}

inline const char *csv_header() { return "scheme,delta,r,trial,seed,power_w,min_wc_rate,outage,ee,iters,seconds"; }

inline void write_csv(const std::vector<TrialRecord> &records, std::ostream &os)
{
    os << csv_header() << '\n';
    std::ostringstream line;
    for (const auto &r : records)
    {
        line.str({});
        line << std::setprecision(10) << r.scheme << ',' << r.delta << ',' << r.r << ',' << r.trial << ',' << r.seed
             << ',' << r.power_w << ',' << r.min_wc_rate << ',' << (r.outage ? 1 : 0) << ',' << r.ee << ',' << r.iters
             << ',' << std::setprecision(4) << r.seconds;
        os << line.str() << '\n';
    }
}

} // namespace irsrobust

#endif
