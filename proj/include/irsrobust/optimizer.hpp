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

#ifndef IRSROBUST_OPTIMIZER_HPP
#define IRSROBUST_OPTIMIZER_HPP

#include "channel.hpp"
#include "lmi.hpp"
#include "sdp.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace irsrobust
{

// ---------------------------------------------------------------------------
// Problem scaling
// ---------------------------------------------------------------------------

/**
 * Link data rescaled so that every noise power is 1, the BS-IRS matrix has
 * unit RMS entries and a unit-norm precoder delivers O(1) SNR. Rates and the
 * feasible set are unchanged; precoders map as F = sqrt(power_scale) F_n.
 */
struct ScaledLink
{
    LinkModel link;
    double power_scale = 1.0;

    Eigen::MatrixXcd to_natural(const Eigen::MatrixXcd &Fn) const { return Fn * std::sqrt(power_scale); }
    Eigen::MatrixXcd to_scaled(const Eigen::MatrixXcd &F) const { return F / std::sqrt(power_scale); }
};

/// `robust = false` designs against the estimate only (eps = 0).
inline ScaledLink scale_link(const ChannelSet &ch, const SystemConfig &cfg, bool robust, double iota)
{
    const int K = ch.K();
    ScaledLink s;
    double gain = 0.0;
    for (int k = 0; k < K; ++k)
    {
        double g = ch.h_d[k].squaredNorm();
        if (iota > 0.0)
            g += iota * iota * (ch.h_r_hat[k].conjugate().asDiagonal() * ch.H_dr).squaredNorm();
        gain += g / cfg.sigma2[k];
    }
    gain /= K;
    s.power_scale = gain > 0.0 ? 1.0 / gain : 1.0;
    const double hn = ch.H_dr.norm();
    const double c = hn > 0.0 ? std::sqrt(static_cast<double>(ch.H_dr.size())) / hn : 1.0;

    LinkModel &L = s.link;
    L.iota = iota;
    L.H = c * ch.H_dr;
    for (int k = 0; k < K; ++k)
    {
        const double w = std::sqrt(s.power_scale / cfg.sigma2[k]);
        L.hd.push_back(w * ch.h_d[k]);
        L.hr.push_back((w / c) * ch.h_r_hat[k]);
        L.eps.push_back(robust ? (w / c) * ch.eps[k] : 0.0);
        L.sigma2.push_back(1.0);
        L.rate.push_back(cfg.targets[k]);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Precoder subproblem
// ---------------------------------------------------------------------------

struct PrecoderResult
{
    SdpStatus status = SdpStatus::numerical_failure;
    Eigen::MatrixXcd F; // scaled units
    double power = 0.0; // ||F||_F^2, scaled units
    Eigen::VectorXd beta;
    int sdp_iterations = 0;

    bool ok() const { return status == SdpStatus::optimal; }
};

namespace detail
{
// Index map of the per-user multiplier blocks (only robust users carry one).
inline std::vector<int> robust_slots(const LinkModel &link)
{
    std::vector<int> slot(link.K(), -1);
    int n = 0;
    for (int k = 0; k < link.K(); ++k)
        if (link.robust(k))
            slot[k] = n++;
    return slot;
}

inline int count_robust(const LinkModel &link)
{
    int n = 0;
    for (int k = 0; k < link.K(); ++k)
        n += link.robust(k) ? 1 : 0;
    return n;
}

inline Eigen::MatrixXcd extract_matrix(const Eigen::VectorXd &x, const VarBlock &re, const VarBlock &im, int rows,
                                       int cols)
{
    Eigen::MatrixXcd F(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            F(r, c) = cplx(x[re[c * rows + r]], x[im[c * rows + r]]);
    return F;
}

// Adds the QoS constraints of every user for the given design expression.
inline void add_qos_constraints(SdpProblem &p, const LinkModel &link, const ActiveDesign &design,
                                const Eigen::MatrixXcd &F_anchor, const Eigen::VectorXcd &e_anchor,
                                const VarBlock &beta, const VarBlock &varpi, const VarBlock &xi, double rate_scale,
                                const VarBlock *residual)
{
    const auto slot = robust_slots(link);
    for (int k = 0; k < link.K(); ++k)
    {
        const SignalBoundTerms terms = signal_bound_terms(design, F_anchor, e_anchor, link, k);
        const RealAffine b = RealAffine::variable(beta[k]);
        std::optional<RealAffine> a;
        if (residual)
            a = RealAffine::variable((*residual)[k]);
        const double r = rate_scale * link.rate[k];
        if (slot[k] >= 0)
        {
            const RealAffine w = RealAffine::variable(varpi[slot[k]]);
            p.add_psd(signal_lmi(terms, b, w, link.eps[k], r, a), "signal_" + std::to_string(k));
            p.add_psd(in_nemirovski_lmi(design, link, b, RealAffine::variable(xi[slot[k]]), k),
                      "in_" + std::to_string(k));
        }
        else
        {
            p.add_scalar(signal_scalar(terms, b, r, a), "signal_" + std::to_string(k));
            p.add_psd(in_schur_lmi(design, link, b, k), "in_" + std::to_string(k));
        }
    }
    p.add_nonneg(varpi);
    p.add_nonneg(xi);
}
} // namespace detail

/**
 * Builds the precoder SDP: minimize t subject to the epigraph LMI
 * [[t, z^T], [z, I]] >= 0 (z = real embedding of vec F) and, per user, the
 * robust signal and interference constraints linearized at F_anchor with the
 * reflection fixed to e_fixed. `rate_scale` multiplies every rate target.
 */
inline SdpProblem build_precoder_problem(const LinkModel &link, const Eigen::VectorXcd &e_fixed,
                                         const Eigen::MatrixXcd &F_anchor, double rate_scale = 1.0)
{
    const int N = link.N(), K = link.K();
    const int nr = detail::count_robust(link);
    VarSpace vs;
    const VarBlock Fre = vs.add("F_re", N * K);
    const VarBlock Fim = vs.add("F_im", N * K);
    const VarBlock beta = vs.add("beta", K);
    const VarBlock varpi = vs.add("varpi", nr);
    const VarBlock xi = vs.add("xi", nr);
    const VarBlock t = vs.add("t", 1);

    SdpProblem p(vs);
    p.objective[t[0]] = 1.0;

    const ActiveDesign design = ActiveDesign::precoder(Fre, Fim, N, K, e_fixed);
    detail::add_qos_constraints(p, link, design, F_anchor, e_fixed, beta, varpi, xi, rate_scale, nullptr);

    // epigraph of ||F||_F^2
    const int nz = 2 * N * K;
    RealAffine epi(nz + 1, nz + 1);
    epi.mutable_constant().bottomRightCorner(nz, nz).setIdentity();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(nz + 1, nz + 1);
    c(0, 0) = 1.0;
    epi.add_coeff(t[0], c);
    for (int i = 0; i < nz; ++i)
    {
        Eigen::MatrixXd ci = Eigen::MatrixXd::Zero(nz + 1, nz + 1);
        ci(0, i + 1) = ci(i + 1, 0) = 1.0;
        epi.add_coeff(i < N * K ? Fre[i] : Fim[i - N * K], ci);
    }
    p.add_psd(std::move(epi), "epigraph");
    return p;
}

inline PrecoderResult solve_precoder(const LinkModel &link, const Eigen::VectorXcd &e_fixed,
                                     const Eigen::MatrixXcd &F_anchor, const SolverSettings &settings = {},
                                     double rate_scale = 1.0)
{
    const SdpProblem p = build_precoder_problem(link, e_fixed, F_anchor, rate_scale);
    const SdpSolution s = solve(p, settings);
    PrecoderResult r;
    r.status = s.status;
    r.sdp_iterations = s.iterations;
    if (!s.ok())
        return r;
    const int N = link.N(), K = link.K();
    r.F = detail::extract_matrix(s.x, p.space.block("F_re"), p.space.block("F_im"), N, K);
    r.power = r.F.squaredNorm();
    const VarBlock &beta = p.space.block("beta");
    r.beta = s.x.segment(beta.offset, beta.size);
    return r;
}

// ---------------------------------------------------------------------------
// Reflection update: penalty convex-concave procedure
// ---------------------------------------------------------------------------

struct CcpParams
{
    double lambda0 = 0.1;
    double gamma = 2.0;
    double lambda_max = 1e4;
    double chi = 1e-5;   // ||b||_1 tolerance
    double nu = 1e-4;    // ||e[t] - e[t-1]||_1 tolerance
    int t_max = 40;
    int max_restarts = 5;

    void validate() const
    {
        if (!(gamma > 1.0) || !(lambda0 > 0.0) || !(lambda_max >= lambda0) || !(chi > 0.0) || !(nu > 0.0) ||
            t_max < 1 || max_restarts < 0)
            throw std::invalid_argument("CcpParams: invalid parameters");
    }
};

struct CcpStep
{
    SdpStatus status = SdpStatus::numerical_failure;
    Eigen::VectorXcd e;
    Eigen::VectorXd a; // SINR residuals
    Eigen::VectorXd b; // unit-modulus slacks (lower cuts then upper cuts)
    double objective = 0.0; // ||a||_1 - lambda ||b||_1

    bool ok() const { return status == SdpStatus::optimal; }
};

/**
 * Reflection SDP of one penalty-CCP iteration: maximize ||a||_1 - lambda ||b||_1
 * over e with F fixed, the QoS constraints linearized at (F_fixed, e_t) with
 * residuals a added to the signal corner, and the unit-modulus cuts
 *
 *   |e_t,m|^2 - 2 Re(conj(e_m) e_t,m) <= b_m - 1,   |e_m|^2 <= 1 + b_{M+m}.
 */
inline SdpProblem build_reflection_problem(const LinkModel &link, const Eigen::MatrixXcd &F_fixed,
                                           const Eigen::VectorXcd &e_t, double lambda)
{
    const int M = link.M(), K = link.K();
    const int nr = detail::count_robust(link);
    VarSpace vs;
    const VarBlock ere = vs.add("e_re", M);
    const VarBlock eim = vs.add("e_im", M);
    const VarBlock a = vs.add("a", K);
    const VarBlock b = vs.add("b", 2 * M);
    const VarBlock beta = vs.add("beta", K);
    const VarBlock varpi = vs.add("varpi", nr);
    const VarBlock xi = vs.add("xi", nr);

    SdpProblem p(vs);
    for (int k = 0; k < K; ++k)
        p.objective[a[k]] = -1.0;
    for (int m = 0; m < 2 * M; ++m)
        p.objective[b[m]] = lambda;

    const ActiveDesign design = ActiveDesign::reflector(ere, eim, M, F_fixed);
    detail::add_qos_constraints(p, link, design, F_fixed, e_t, beta, varpi, xi, 1.0, &a);

    for (int m = 0; m < M; ++m)
    {
        // b_m - 1 - |e_t|^2 + 2 (Re e Re e_t + Im e Im e_t) >= 0
        RealAffine lower = RealAffine::scalar(-1.0 - std::norm(e_t[m]));
        lower += RealAffine::variable(b[m]);
        lower += RealAffine::variable(ere[m]) * (2.0 * e_t[m].real());
        lower += RealAffine::variable(eim[m]) * (2.0 * e_t[m].imag());
        p.add_scalar(lower, "unit_lower_" + std::to_string(m));

        // [[1 + b, conj(e)], [e, 1]] >= 0
        ComplexAffine up(2, 2);
        up.mutable_constant() << 1.0, 0.0, 0.0, 1.0;
        Eigen::MatrixXcd cb = Eigen::MatrixXcd::Zero(2, 2);
        cb(0, 0) = 1.0;
        up.add_coeff(b[M + m], cb);
        Eigen::MatrixXcd cre(2, 2), cim(2, 2);
        cre << 0.0, 1.0, 1.0, 0.0;
        cim << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
        up.add_coeff(ere[m], cre);
        up.add_coeff(eim[m], cim);
        p.add_psd(embed_hermitian(up), "unit_upper_" + std::to_string(m));
    }
    p.add_nonneg(a);
    p.add_nonneg(b);
    return p;
}

inline CcpStep ccp_step(const LinkModel &link, const Eigen::MatrixXcd &F_fixed, const Eigen::VectorXcd &e_t,
                        double lambda, const SolverSettings &settings = {})
{
    const SdpProblem p = build_reflection_problem(link, F_fixed, e_t, lambda);
    const SdpSolution s = solve(p, settings);
    CcpStep r;
    r.status = s.status;
    if (!s.ok())
        return r;
    const int M = link.M();
    r.e = detail::extract_matrix(s.x, p.space.block("e_re"), p.space.block("e_im"), M, 1).col(0);
    const VarBlock &a = p.space.block("a");
    const VarBlock &b = p.space.block("b");
    // clip the interior-point noise on the nonnegative slacks
    r.a = s.x.segment(a.offset, a.size).cwiseMax(0.0);
    r.b = s.x.segment(b.offset, b.size).cwiseMax(0.0);
    r.objective = r.a.sum() - lambda * r.b.sum();
    return r;
}

/// exp(j theta), nudged by at most two ulps per component so that std::abs returns exactly 1.
inline cplx unit_phasor(double theta)
{
    const cplx z = std::polar(1.0, theta);
    if (std::abs(z) == 1.0)
        return z;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
        {
            double re = z.real(), im = z.imag();
            for (int i = 0; i < std::abs(a); ++i)
                re = std::nextafter(re, a > 0 ? 2.0 : -2.0);
            for (int i = 0; i < std::abs(b); ++i)
                im = std::nextafter(im, b > 0 ? 2.0 : -2.0);
            if (std::abs(cplx(re, im)) == 1.0)
                return {re, im};
        }
    return z;
}

inline Eigen::VectorXcd project_unit_modulus(const Eigen::VectorXcd &e)
{
    Eigen::VectorXcd p(e.size());
    for (Eigen::Index m = 0; m < e.size(); ++m)
        p[m] = std::abs(e[m]) > 0.0 ? unit_phasor(std::arg(e[m])) : cplx(1.0, 0.0);
    return p;
}

inline Eigen::VectorXcd random_unit_modulus(int M, Rng &rng)
{
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    Eigen::VectorXcd e(M);
    for (int m = 0; m < M; ++m)
        e[m] = unit_phasor(ph(rng));
    return e;
}

struct CcpOutcome
{
    Eigen::VectorXcd e;            // projected output (or e_init when no progress)
    bool progressed = false;
    int iterations = 0;            // SDP solves across all restarts
    int restarts = 0;
    double b_norm = 0.0;           // ||b||_1 at the accepted iterate, before projection
    double modulus_dev_before = 0.0; // max_m ||e_m| - 1| before projection
    double modulus_dev_after = 0.0;  // same, after projection
    double lambda = 0.0;
};

/**
 * Penalty CCP loop: repeat ccp_step with lambda <- min(gamma lambda, lambda_max)
 * until ||b||_1 <= chi and ||e[t] - e[t-1]||_1 <= nu. After t_max iterations
 * a run that already meets the slack tolerance is accepted; otherwise the
 * loop restarts from a random unit-modulus point. The result is projected
 * onto the unit circle.
 */
inline CcpOutcome penalty_ccp(const LinkModel &link, const Eigen::MatrixXcd &F_fixed, const Eigen::VectorXcd &e_init,
                              const CcpParams &params, Rng &rng, const SolverSettings &settings = {})
{
    params.validate();
    CcpOutcome out;
    out.e = e_init;
    Eigen::VectorXcd e_t = e_init;
    double lambda = params.lambda0;
    int t = 0;
    for (;;)
    {
        bool accept = false;
        bool restart = false;
        double bnorm = 0.0;
        if (t < params.t_max)
        {
            const CcpStep step = ccp_step(link, F_fixed, e_t, lambda, settings);
            ++out.iterations;
            if (!step.ok())
                restart = true;
            else
            {
                bnorm = step.b.sum();
                const double moved = (step.e - e_t).cwiseAbs().sum();
                e_t = step.e;
                lambda = std::min(params.gamma * lambda, params.lambda_max);
                ++t;
                out.b_norm = bnorm;
                if (bnorm <= params.chi && moved <= params.nu)
                    accept = true;
            }
        }
        else if (out.b_norm <= params.chi)
            accept = true;
        else
            restart = true;

        if (accept)
        {
            out.lambda = lambda;
            out.progressed = true;
            double dev = 0.0;
            for (Eigen::Index m = 0; m < e_t.size(); ++m)
                dev = std::max(dev, std::abs(std::abs(e_t[m]) - 1.0));
            out.modulus_dev_before = dev;
            out.e = project_unit_modulus(e_t);
            dev = 0.0;
            for (Eigen::Index m = 0; m < out.e.size(); ++m)
                dev = std::max(dev, std::abs(std::abs(out.e[m]) - 1.0));
            out.modulus_dev_after = dev;
            return out;
        }
        if (restart)
        {
            if (out.restarts >= params.max_restarts)
            {
                out.e = e_init;
                out.progressed = false;
                return out;
            }
            ++out.restarts;
            e_t = random_unit_modulus(link.M(), rng);
            lambda = params.lambda0;
            t = 0;
            out.b_norm = std::numeric_limits<double>::infinity();
        }
    }
}

// ---------------------------------------------------------------------------
// Initial point
// ---------------------------------------------------------------------------

/// Regularized zero-forcing directions on the estimated effective channels, scaled to meet each target nominally.
inline Eigen::MatrixXcd rzf_precoder(const LinkModel &link, const Eigen::VectorXcd &e)
{
    const int N = link.N(), K = link.K();
    Eigen::MatrixXcd G(K, N);
    for (int k = 0; k < K; ++k)
        G.row(k) = effective_channel(link.hd[k], link.hr[k], link.H, e, link.iota).adjoint();
    const Eigen::MatrixXcd W =
        G.adjoint() * (G * G.adjoint() + Eigen::MatrixXcd::Identity(K, K)).inverse();
    Eigen::MatrixXcd F(N, K);
    for (int k = 0; k < K; ++k)
    {
        Eigen::VectorXcd w = W.col(k);
        if (w.norm() == 0.0)
            w = G.row(k).adjoint();
        if (w.norm() == 0.0)
            w = Eigen::VectorXcd::Ones(N);
        w /= w.norm();
        const double g = std::norm((G.row(k) * w)(0));
        const double need = std::exp2(link.rate[k]) - 1.0;
        F.col(k) = w * std::sqrt(need / std::max(g, 1e-12));
    }
    return F;
}

struct InitResult
{
    bool feasible = false;
    Eigen::MatrixXcd F; // scaled units
    double phi = 0.0;   // largest common target scaling reached
    int solves = 0;
};

/**
 * Initial precoder for e0: maximize a common target scaling phi by bisection
 * on a fixed grid, re-linearizing at the best solution found, until phi = 1
 * is feasible. The accepted F is then refined by re-anchored solves at the
 * full targets.
 */
inline InitResult initialize_precoder(const LinkModel &link, const Eigen::VectorXcd &e0,
                                      const SolverSettings &settings = {}, int max_rounds = 8, int grid = 16,
                                      int refine_solves = 20)
{
    InitResult res;
    Eigen::MatrixXcd anchor = rzf_precoder(link, e0);
    int lo = 0;
    for (int round = 0; round < max_rounds; ++round)
    {
        PrecoderResult full = solve_precoder(link, e0, anchor, settings, 1.0);
        ++res.solves;
        if (full.ok())
        {
            res.feasible = true;
            res.phi = 1.0;
            res.F = full.F;
            double prev = full.power;
            for (int i = 0; i < refine_solves; ++i)
            {
                PrecoderResult next = solve_precoder(link, e0, res.F, settings, 1.0);
                ++res.solves;
                if (!next.ok() || next.power > prev)
                    break;
                res.F = next.F;
                const double change = (prev - next.power) / std::max(prev, 1e-300);
                prev = next.power;
                if (change <= 1e-9)
                    break;
            }
            return res;
        }
        // bisection for the largest feasible phi on the grid
        int hi = grid;
        int best = lo;
        std::optional<Eigen::MatrixXcd> best_F;
        int left = lo;
        while (hi - left > 1)
        {
            const int mid = (left + hi) / 2;
            PrecoderResult r = solve_precoder(link, e0, anchor, settings, static_cast<double>(mid) / grid);
            ++res.solves;
            if (r.ok())
            {
                left = mid;
                best = mid;
                best_F = r.F;
            }
            else
                hi = mid;
        }
        if (!best_F || (best <= lo && round > 0))
            break;
        lo = best;
        res.phi = static_cast<double>(best) / grid;
        anchor = *best_F;
    }
    res.feasible = false;
    res.F = anchor;
    return res;
}

// ---------------------------------------------------------------------------
// Post-hoc certification
// ---------------------------------------------------------------------------

/**
 * Certifies a fixed design against both robust constraint families by
 * searching the multipliers (beta, varpi, xi) that maximize the smallest
 * eigenvalue margin s. Linearizing at the design itself makes the signal
 * bound exact. Returns the per-user margins (>= 0 means certified).
 */
inline std::vector<double> certify_design(const LinkModel &link, const Eigen::MatrixXcd &F, const Eigen::VectorXcd &e,
                                          const SolverSettings &settings = {})
{
    std::vector<double> margins;
    const ActiveDesign design = ActiveDesign::fixed(F, e);
    for (int k = 0; k < link.K(); ++k)
    {
        const bool rob = link.robust(k);
        VarSpace vs;
        const VarBlock beta = vs.add("beta", 1);
        const VarBlock s = vs.add("s", 1);
        const VarBlock varpi = vs.add("varpi", rob ? 1 : 0);
        const VarBlock xi = vs.add("xi", rob ? 1 : 0);
        SdpProblem p(vs);
        p.objective[s[0]] = -1.0;
        // margin relative to the signal size so users are comparable
        const cplx gf = effective_channel(link.hd[k], link.hr[k], link.H, e, link.iota).dot(F.col(k));
        const double scale = std::max(1.0, std::norm(gf));
        const SignalBoundTerms terms = signal_bound_terms(design, F, e, link, k);
        const RealAffine b = RealAffine::variable(beta[0]);
        const RealAffine sv = RealAffine::variable(s[0]);
        RealAffine sig = rob ? signal_lmi(terms, b, RealAffine::variable(varpi[0]), link.eps[k], link.rate[k])
                             : signal_scalar(terms, b, link.rate[k]);
        RealAffine in = rob ? in_nemirovski_lmi(design, link, b, RealAffine::variable(xi[0]), k)
                            : in_schur_lmi(design, link, b, k);
        sig -= scaled_identity(sv * scale, sig.rows());
        in -= scaled_identity(sv, in.rows());
        p.add_psd(sig);
        p.add_psd(in);
        p.add_scalar(RealAffine::scalar(1.0) - sv);
        p.add_nonneg(varpi);
        p.add_nonneg(xi);
        const SdpSolution sol = solve(p, settings);
        margins.push_back(sol.ok() ? sol.x[s[0]] : -std::numeric_limits<double>::infinity());
    }
    return margins;
}

// ---------------------------------------------------------------------------
// Alternating optimization
// ---------------------------------------------------------------------------

enum class AoStatus
{
    converged,
    max_iters,
    infeasible_start
};

inline const char *to_string(AoStatus s)
{
    switch (s)
    {
    case AoStatus::converged: return "converged";
    case AoStatus::max_iters: return "max-iters";
    case AoStatus::infeasible_start: return "infeasible-start";
    }
    return "unknown";
}

struct AoOptions
{
    CcpParams ccp;
    SolverSettings sdp;
    int max_outer = 30;
    double rel_tol = 1e-4;
    std::uint64_t seed = 0; // CCP restart stream
    bool certify = true;
};

struct CcpDiagnostics
{
    int iterations = 0;
    int restarts = 0;
    bool progressed = false;
    bool accepted = false;       // the following precoder solve kept the objective non-increasing
    double b_norm = 0.0;
    double modulus_dev_before = 0.0;
    double modulus_dev_after = 0.0;
};

struct AoResult
{
    DesignPoint design;              // natural units
    std::vector<double> trace;       // ||F^(n)||_F^2 in watts, starting with the initial point
    AoStatus status = AoStatus::infeasible_start;
    int outer_iterations = 0;
    int ccp_restarts = 0;
    bool ccp_stalled = false;
    std::vector<CcpDiagnostics> ccp;
    std::vector<double> certificate; // per-user eigenvalue margins of the final design
    double seconds = 0.0;

    double power() const { return design.F.squaredNorm(); }
    bool feasible() const { return status != AoStatus::infeasible_start; }
};

/**
 * Alternating optimization on scaled link data: initial point, then precoder
 * updates alternating with penalty-CCP reflection updates. A reflection update
 * is kept only if the following precoder solve succeeds without increasing
 * the objective, so the trace is non-increasing.
 */
inline AoResult run_ao(const ScaledLink &scaled, const AoOptions &opt = {})
{
    const auto t0 = std::chrono::steady_clock::now();
    const LinkModel &link = scaled.link;
    const int M = link.M();
    AoResult res;
    Rng rng(opt.seed);

    Eigen::VectorXcd e = Eigen::VectorXcd::Ones(M);
    const InitResult init = initialize_precoder(link, e, opt.sdp);
    auto finish = [&](const Eigen::MatrixXcd &F) {
        res.design.F = scaled.to_natural(F);
        res.design.e = e;
        if (opt.certify && res.status != AoStatus::infeasible_start)
            res.certificate = certify_design(link, F, e, opt.sdp);
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    };
    if (!init.feasible)
    {
        res.status = AoStatus::infeasible_start;
        return finish(init.F);
    }
    Eigen::MatrixXcd F = init.F;
    double obj = F.squaredNorm();
    res.trace.push_back(obj * scaled.power_scale);

    const bool reflect = link.iota > 0.0;
    res.status = AoStatus::max_iters;
    for (int n = 1; n <= opt.max_outer; ++n)
    {
        res.outer_iterations = n;
        // reflection update for the current precoder (skipped on the first pass,
        // which re-solves the precoder at e^(0))
        Eigen::VectorXcd e_next = e;
        CcpDiagnostics diag;
        if (reflect && n > 1)
        {
            const CcpOutcome c = penalty_ccp(link, F, e, opt.ccp, rng, opt.sdp);
            diag.iterations = c.iterations;
            diag.restarts = c.restarts;
            diag.progressed = c.progressed;
            diag.b_norm = c.b_norm;
            diag.modulus_dev_before = c.modulus_dev_before;
            diag.modulus_dev_after = c.modulus_dev_after;
            res.ccp_restarts += c.restarts;
            if (!c.progressed)
            {
                res.ccp.push_back(diag);
                res.ccp_stalled = true;
                res.status = AoStatus::converged;
                break;
            }
            e_next = c.e;
        }
        const PrecoderResult pr = solve_precoder(link, e_next, F, opt.sdp);
        const bool better = pr.ok() && pr.power <= obj * (1.0 + 1e-9);
        if (reflect && n > 1)
        {
            diag.accepted = better;
            res.ccp.push_back(diag);
        }
        if (!better)
        {
            if (reflect && n > 1)
                res.ccp_stalled = true;
            res.status = AoStatus::converged;
            break;
        }
        e = e_next;
        F = pr.F;
        const double change = (obj - pr.power) / std::max(obj, 1e-300);
        obj = pr.power;
        res.trace.push_back(obj * scaled.power_scale);
        if (change <= opt.rel_tol)
        {
            // without an IRS there is nothing left to alternate with
            if (!reflect || n > 1)
            {
                res.status = AoStatus::converged;
                break;
            }
        }
    }
    return finish(F);
}

/// Convenience overload on raw channels: robust (eps from the channel set) or nominal design.
inline AoResult run_ao(const ChannelSet &ch, const SystemConfig &cfg, bool robust = true,
                       std::optional<double> iota = std::nullopt, const AoOptions &opt = {})
{
    return run_ao(scale_link(ch, cfg, robust, iota.value_or(cfg.iota)), opt);
}

} // namespace irsrobust

#endif
