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

#ifndef IRSROBUST_CHANNEL_HPP
#define IRSROBUST_CHANNEL_HPP

#include "affine.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace irsrobust
{

using Rng = std::mt19937_64;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

struct Point2
{
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point2 &a, const Point2 &b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double bearing(const Point2 &from, const Point2 &to) { return std::atan2(to.y - from.y, to.x - from.x); }

/// Scenario constants. Powers are linear watts; conversion from dBm happens at load time.
struct SystemConfig
{
    int N = 4;          // BS antennas
    int M = 8;          // IRS elements
    int K = 2;          // users
    double iota = 1.0;  // reflection efficiency
    std::vector<double> sigma2;  // per-user noise power [W]
    std::vector<double> targets; // per-user rate targets [bit/s/Hz]
    double delta = 0.02;         // relative CSI uncertainty

    Point2 bs{0.0, 0.0};
    Point2 irs{50.0, 10.0};
    Point2 user_center{70.0, 0.0};
    double user_radius = 5.0;

    double alpha_bi = 2.2;
    double alpha_bu = 4.0;
    double alpha_iu = 2.0;
    double rician_kappa = 5.0;

    double p_active = 0.01;   // per active antenna [W]
    double p_passive = 0.005; // per passive element [W]
    std::uint64_t rng_seed = 1;

    /// Desk-scale default (N=4, M=8, K=2).
    static SystemConfig desk(double rate = 2.0)
    {
        SystemConfig c;
        c.sigma2.assign(c.K, dbm_to_watt(-100.0));
        c.targets.assign(c.K, rate);
        return c;
    }

    /// Full evaluation scale (N=6, M=16, K=4).
    static SystemConfig full_scale(double rate = 4.0)
    {
        SystemConfig c;
        c.N = 6;
        c.M = 16;
        c.K = 4;
        c.sigma2.assign(c.K, dbm_to_watt(-100.0));
        c.targets.assign(c.K, rate);
        return c;
    }

    void set_rate(double r) { targets.assign(K, r); }

    void validate() const
    {
        auto fail = [](const std::string &m) { throw std::invalid_argument("SystemConfig: " + m); };
        if (N < 1 || M < 1 || K < 1)
            fail("N, M, K must be >= 1");
        if (!(iota >= 0.0 && iota <= 1.0))
            fail("iota must lie in [0, 1]");
        if (!(delta >= 0.0 && delta < 1.0))
            fail("delta must lie in [0, 1)");
        if (static_cast<int>(sigma2.size()) != K || static_cast<int>(targets.size()) != K)
            fail("sigma2 and targets need one entry per user");
        for (double s : sigma2)
            if (!(s > 0.0))
                fail("noise powers must be > 0");
        for (double r : targets)
            if (!(r > 0.0))
                fail("rate targets must be > 0");
        if (!(p_active > 0.0) || !(p_passive > 0.0))
            fail("circuit powers must be > 0");
        if (!(user_radius >= 0.0) || !(rician_kappa >= 0.0))
            fail("user radius and Rician factor must be >= 0");
    }
};

/// Channel realization for one scenario draw.
struct ChannelSet
{
    Eigen::MatrixXcd H_dr;                // M x N, BS -> IRS
    std::vector<Eigen::VectorXcd> h_d;    // K x (N), BS -> user
    std::vector<Eigen::VectorXcd> h_r_hat; // K x (M), estimated IRS -> user
    std::vector<double> eps;              // uncertainty radii
    std::vector<Eigen::VectorXcd> h_r_true; // K x (M), h_r_hat + error
    std::vector<Point2> users;

    int N() const { return static_cast<int>(H_dr.cols()); }
    int M() const { return static_cast<int>(H_dr.rows()); }
    int K() const { return static_cast<int>(h_d.size()); }
};

/// Precoder plus reflection vector.
struct DesignPoint
{
    Eigen::MatrixXcd F; // N x K
    Eigen::VectorXcd e; // M

    double power() const { return F.squaredNorm(); }
};

/// Linear power gain of PL = -30 - 10 alpha log10(d) dB.
inline double path_loss_gain(double d, double alpha)
{
    if (!(d > 0.0))
        throw std::domain_error("path_loss_gain: distance must be > 0");
    const double pl_db = -30.0 - 10.0 * alpha * std::log10(d);
    return std::pow(10.0, pl_db / 10.0);
}

/// Half-wavelength ULA response: element i is exp(j pi i sin(angle)).
inline Eigen::VectorXcd steering_vector(double angle, int n)
{
    Eigen::VectorXcd a(n);
    const double s = std::sin(angle);
    for (int i = 0; i < n; ++i)
        a[i] = std::polar(1.0, std::numbers::pi * i * s);
    return a;
}

/// i.i.d. CN(0, 1) matrix.
inline Eigen::MatrixXcd complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd g(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
        {
            const double re = nd(rng);
            const double im = nd(rng);
            g(r, c) = cplx(re, im);
        }
    return g;
}

/**
 * Error vector with ||delta|| <= radius. Uniform over the complex ball of
 * dimension `dim` (a 2*dim real ball), or uniform on its boundary sphere when
 * `on_sphere` is set. Always consumes the same number of draws.
 */
inline Eigen::VectorXcd perturb_channel(double radius, int dim, Rng &rng, bool on_sphere = false)
{
    if (radius < 0.0)
        throw std::invalid_argument("perturb_channel: radius must be >= 0");
    Eigen::VectorXcd g = complex_gaussian(dim, 1, rng);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const double u = ud(rng);
    if (radius == 0.0 || dim == 0)
        return Eigen::VectorXcd::Zero(dim);
    const double n = g.norm();
    if (n == 0.0)
        return Eigen::VectorXcd::Zero(dim);
    const double r = on_sphere ? radius : radius * std::pow(u, 1.0 / (2.0 * dim));
    Eigen::VectorXcd d = g * (r / n);
    // guard against last-ulp overshoot
    const double dn = d.norm();
    if (dn > radius)
        d *= radius / dn;
    return d;
}

namespace detail
{
inline Eigen::MatrixXcd rician(const Eigen::MatrixXcd &los, double gain, double kappa, Rng &rng)
{
    Eigen::MatrixXcd nlos = complex_gaussian(los.rows(), los.cols(), rng);
    double w_los = 1.0, w_nlos = 0.0;
    if (std::isfinite(kappa))
    {
        w_los = std::sqrt(kappa / (1.0 + kappa));
        w_nlos = std::sqrt(1.0 / (1.0 + kappa));
    }
    return std::sqrt(gain) * (w_los * los + w_nlos * nlos);
}
} // namespace detail

/**
 * Draws one scenario: user positions on the circle, Rician channels for every
 * link, error radii eps_k = delta ||h_r_hat_k|| and ball-uniform true channels.
 * Pure function of the config (including rng_seed).
 */
inline ChannelSet generate_channels(const SystemConfig &cfg)
{
    cfg.validate();
    Rng rng(cfg.rng_seed);
    ChannelSet ch;
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < cfg.K; ++k)
    {
        const double phi = ang(rng);
        ch.users.push_back({cfg.user_center.x + cfg.user_radius * std::cos(phi),
                            cfg.user_center.y + cfg.user_radius * std::sin(phi)});
    }

    const double d_bi = distance(cfg.bs, cfg.irs);
    const Eigen::MatrixXcd los_bi = steering_vector(bearing(cfg.irs, cfg.bs), cfg.M) *
                                    steering_vector(bearing(cfg.bs, cfg.irs), cfg.N).adjoint();
    ch.H_dr = detail::rician(los_bi, path_loss_gain(d_bi, cfg.alpha_bi), cfg.rician_kappa, rng);

    for (int k = 0; k < cfg.K; ++k)
    {
        const Point2 &u = ch.users[k];
        ch.h_d.push_back(detail::rician(steering_vector(bearing(cfg.bs, u), cfg.N),
                                        path_loss_gain(distance(cfg.bs, u), cfg.alpha_bu), cfg.rician_kappa, rng));
    }
    for (int k = 0; k < cfg.K; ++k)
    {
        const Point2 &u = ch.users[k];
        ch.h_r_hat.push_back(detail::rician(steering_vector(bearing(cfg.irs, u), cfg.M),
                                            path_loss_gain(distance(cfg.irs, u), cfg.alpha_iu), cfg.rician_kappa,
                                            rng));
        ch.eps.push_back(cfg.delta * ch.h_r_hat.back().norm());
    }
    for (int k = 0; k < cfg.K; ++k)
        ch.h_r_true.push_back(ch.h_r_hat[k] + perturb_channel(ch.eps[k], cfg.M, rng));
    return ch;
}

/// Effective row channel h_d^H + h_r^H E H_dr with E = iota diag(e), returned as a column (its adjoint).
inline Eigen::VectorXcd effective_channel(const Eigen::VectorXcd &h_d, const Eigen::VectorXcd &h_r,
                                          const Eigen::MatrixXcd &H_dr, const Eigen::VectorXcd &e, double iota)
{
    if (h_d.size() != H_dr.cols() || h_r.size() != H_dr.rows() || e.size() != H_dr.rows())
        throw std::invalid_argument("effective_channel: dimension mismatch");
    const Eigen::VectorXcd refl = iota * (h_r.conjugate().cwiseProduct(e)); // row h_r^H E as a column of coefficients
    Eigen::RowVectorXcd row = h_d.adjoint() + refl.transpose() * H_dr;
    return row.adjoint();
}

/// log2(1 + |g f_k|^2 / (||g F_{-k}||^2 + sigma2)) with g = h_d^H + h_r^H E H_dr.
inline double achievable_rate(const DesignPoint &design, const Eigen::VectorXcd &h_d, const Eigen::VectorXcd &h_r,
                              const Eigen::MatrixXcd &H_dr, double sigma2, double iota, int k)
{
    if (design.F.rows() != H_dr.cols() || k < 0 || k >= design.F.cols())
        throw std::invalid_argument("achievable_rate: dimension mismatch");
    const Eigen::VectorXcd g = effective_channel(h_d, h_r, H_dr, design.e, iota);
    const Eigen::RowVectorXcd gf = g.adjoint() * design.F;
    const double signal = std::norm(gf[k]);
    const double in = gf.squaredNorm() - signal + sigma2;
    return std::log2(1.0 + signal / in);
}

} // namespace irsrobust

#endif
