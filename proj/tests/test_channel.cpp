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


#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

using namespace irsrobust;
using std::numbers::pi;

namespace
{
// Direct re-implementation of the rate formula with explicit loops.
double rate_oracle(const Eigen::MatrixXcd &F, const Eigen::VectorXcd &e, const Eigen::VectorXcd &hd,
                   const Eigen::VectorXcd &hr, const Eigen::MatrixXcd &H, double sigma2, double iota, int k)
{
    const Eigen::Index N = F.rows(), K = F.cols(), M = e.size();
    std::vector<cplx> g(N, 0.0);
    for (Eigen::Index n = 0; n < N; ++n)
    {
        g[n] = std::conj(hd[n]);
        for (Eigen::Index m = 0; m < M; ++m)
            g[n] += std::conj(hr[m]) * iota * e[m] * H(m, n);
    }
    double sig = 0.0, in = sigma2;
    for (Eigen::Index j = 0; j < K; ++j)
    {
        cplx acc = 0.0;
        for (Eigen::Index n = 0; n < N; ++n)
            acc += g[n] * F(n, j);
        (j == k ? sig : in) += std::norm(acc);
    }
    return std::log2(1.0 + sig / in);
}
} // namespace

TEST_CASE("dBm conversion", "[channel]")
{
    CHECK(dbm_to_watt(-100.0) == Catch::Approx(1e-13).epsilon(1e-12));
    CHECK(dbm_to_watt(30.0) == Catch::Approx(1.0));
    CHECK(watt_to_dbm(0.01) == Catch::Approx(10.0));
    CHECK(dbm_to_watt(watt_to_dbm(0.37)) == Catch::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("path loss examples", "[channel]")
{
    CHECK(path_loss_gain(1.0, 2.0) == Catch::Approx(1e-3).epsilon(1e-14));
    CHECK(path_loss_gain(50.0, 2.2) == Catch::Approx(std::pow(10.0, (-30.0 - 22.0 * std::log10(50.0)) / 10.0)).epsilon(1e-14));
    CHECK(path_loss_gain(10.0, 4.0) == Catch::Approx(1e-7).epsilon(1e-12));
    CHECK_THROWS_AS(path_loss_gain(0.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(path_loss_gain(-1.0, 2.0), std::domain_error);
}

TEST_CASE("steering vector examples", "[channel]")
{
    const Eigen::VectorXcd a = steering_vector(0.0, 4);
    CHECK((a - Eigen::VectorXcd::Ones(4)).norm() < 1e-15);
    const Eigen::VectorXcd b = steering_vector(pi / 2, 2);
    CHECK(std::abs(b[0] - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(b[1] - cplx(-1, 0)) < 1e-15);
    const Eigen::VectorXcd c = steering_vector(pi / 6, 3);
    CHECK(std::abs(c[1] - std::polar(1.0, pi / 2)) < 1e-15);
    CHECK(std::abs(c[2] - std::polar(1.0, pi)) < 1e-15);
    for (Eigen::Index i = 0; i < 3; ++i)
        CHECK(std::abs(std::abs(c[i]) - 1.0) < 1e-15);
}

TEST_CASE("perturb_channel radius contracts", "[channel]")
{
    Rng rng(1);
    CHECK(perturb_channel(0.0, 5, rng).norm() == 0.0);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i)
        worst = std::max(worst, perturb_channel(1.0, 8, rng).norm());
    CHECK(worst <= 1.0 + 1e-12);
    for (int i = 0; i < 1000; ++i)
        CHECK(std::abs(perturb_channel(0.3, 8, rng, true).norm() - 0.3) <= 1e-12);
    CHECK_THROWS_AS(perturb_channel(-1.0, 3, rng), std::invalid_argument);
}

TEST_CASE("ball sampler is radially uniform", "[channel]")
{
    // for uniform samples in the 2M-dimensional ball, (|d|/r)^(2M) is U(0,1)
    Rng rng(2);
    const int M = 4, n = 20000;
    double mean = 0.0, below = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double u = std::pow(perturb_channel(2.0, M, rng).norm() / 2.0, 2.0 * M);
        mean += u;
        below += u < 0.25 ? 1.0 : 0.0;
    }
    CHECK(std::abs(mean / n - 0.5) < 0.01);
    CHECK(std::abs(below / n - 0.25) < 0.015);
}

TEST_CASE("generate_channels invariants", "[channel]")
{
    SystemConfig cfg = SystemConfig::desk();
    cfg.delta = 0.04;
    cfg.rng_seed = 17;
    const ChannelSet ch = generate_channels(cfg);
    REQUIRE(ch.N() == cfg.N);
    REQUIRE(ch.M() == cfg.M);
    REQUIRE(ch.K() == cfg.K);
    for (int k = 0; k < cfg.K; ++k)
    {
        CHECK(ch.h_d[k].size() == cfg.N);
        CHECK(ch.h_r_hat[k].size() == cfg.M);
        CHECK(ch.eps[k] / ch.h_r_hat[k].norm() == Catch::Approx(cfg.delta).epsilon(1e-14));
        CHECK((ch.h_r_true[k] - ch.h_r_hat[k]).norm() <= ch.eps[k] * (1.0 + 1e-12));
        CHECK(distance(ch.users[k], cfg.user_center) == Catch::Approx(cfg.user_radius).epsilon(1e-12));
    }
}

TEST_CASE("generate_channels is deterministic in the seed", "[channel]")
{
    SystemConfig cfg = SystemConfig::full_scale();
    cfg.rng_seed = 5;
    const ChannelSet a = generate_channels(cfg), b = generate_channels(cfg);
    CHECK(a.H_dr == b.H_dr);
    for (int k = 0; k < cfg.K; ++k)
    {
        CHECK(a.h_d[k] == b.h_d[k]);
        CHECK(a.h_r_hat[k] == b.h_r_hat[k]);
        CHECK(a.h_r_true[k] == b.h_r_true[k]);
    }
    cfg.rng_seed = 6;
    CHECK(generate_channels(cfg).H_dr != a.H_dr);
}

TEST_CASE("delta only scales the error, not the estimate", "[channel]")
{
    SystemConfig cfg = SystemConfig::desk();
    cfg.rng_seed = 9;
    cfg.delta = 0.0;
    const ChannelSet a = generate_channels(cfg);
    cfg.delta = 0.03;
    const ChannelSet b = generate_channels(cfg);
    for (int k = 0; k < cfg.K; ++k)
    {
        CHECK(a.eps[k] == 0.0);
        CHECK(a.h_r_true[k] == a.h_r_hat[k]);
        CHECK(a.h_r_hat[k] == b.h_r_hat[k]);
        CHECK(a.h_d[k] == b.h_d[k]);
    }
}

TEST_CASE("infinite Rician factor leaves the line-of-sight component", "[channel]")
{
    SystemConfig cfg = SystemConfig::desk();
    cfg.rician_kappa = std::numeric_limits<double>::infinity();
    cfg.rng_seed = 3;
    const ChannelSet ch = generate_channels(cfg);
    const Eigen::MatrixXcd los = steering_vector(bearing(cfg.irs, cfg.bs), cfg.M) *
                                 steering_vector(bearing(cfg.bs, cfg.irs), cfg.N).adjoint();
    const double g = path_loss_gain(distance(cfg.bs, cfg.irs), cfg.alpha_bi);
    CHECK((ch.H_dr - std::sqrt(g) * los).norm() <= 1e-12 * ch.H_dr.norm());
    for (int k = 0; k < cfg.K; ++k)
    {
        const Eigen::VectorXcd l = steering_vector(bearing(cfg.bs, ch.users[k]), cfg.N);
        const double gk = path_loss_gain(distance(cfg.bs, ch.users[k]), cfg.alpha_bu);
        CHECK((ch.h_d[k] - std::sqrt(gk) * l).norm() <= 1e-12 * ch.h_d[k].norm());
    }
}

TEST_CASE("Rician channels have the configured mean power", "[channel]")
{
    // E|h|^2 per entry = path gain, independent of kappa
    SystemConfig cfg = SystemConfig::desk();
    cfg.user_radius = 0.0; // fixed user position
    double acc = 0.0;
    const int n = 3000;
    for (int i = 0; i < n; ++i)
    {
        cfg.rng_seed = static_cast<std::uint64_t>(i + 1);
        acc += generate_channels(cfg).h_r_hat[0].squaredNorm() / cfg.M;
    }
    const double g = path_loss_gain(distance(cfg.irs, cfg.user_center), cfg.alpha_iu);
    CHECK(acc / n / g == Catch::Approx(1.0).epsilon(0.02));
}

TEST_CASE("config validation", "[channel]")
{
    SystemConfig c = SystemConfig::desk();
    CHECK_NOTHROW(c.validate());
    auto bad = [](auto mutate) {
        SystemConfig x = SystemConfig::desk();
        mutate(x);
        return x;
    };
    CHECK_THROWS_AS(bad([](SystemConfig &x) { x.N = 0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SystemConfig &x) { x.iota = 1.5; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SystemConfig &x) { x.delta = 1.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SystemConfig &x) { x.sigma2[0] = 0.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SystemConfig &x) { x.targets[1] = 0.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SystemConfig &x) { x.targets.pop_back(); }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SystemConfig &x) { x.p_passive = 0.0; }).validate(), std::invalid_argument);
}

TEST_CASE("achievable rate examples", "[channel]")
{
    Rng rng(4);
    const int N = 4, M = 6, K = 3;
    const Eigen::MatrixXcd H = testing::random_complex(M, N, rng);
    const Eigen::VectorXcd hd = testing::random_complex(N, 1, rng), hr = testing::random_complex(M, 1, rng);
    DesignPoint d{Eigen::MatrixXcd::Zero(N, K), testing::random_complex(M, 1, rng)};
    for (int k = 0; k < K; ++k)
        CHECK(achievable_rate(d, hd, hr, H, 1.0, 1.0, k) == 0.0);

    // single user, no IRS, MRT
    const double p = 2.5, s2 = 0.3;
    DesignPoint mrt{hd * (std::sqrt(p) / hd.norm()), Eigen::VectorXcd::Ones(M)};
    CHECK(achievable_rate(mrt, hd, hr, H, s2, 0.0, 0) ==
          Catch::Approx(std::log2(1.0 + p * hd.squaredNorm() / s2)).epsilon(1e-13));

    // independent re-implementation
    for (int t = 0; t < 20; ++t)
    {
        d.F = testing::random_complex(N, K, rng);
        d.e = testing::random_complex(M, 1, rng);
        const double iota = t % 2 ? 0.5 : 1.0;
        for (int k = 0; k < K; ++k)
            CHECK(std::abs(achievable_rate(d, hd, hr, H, 0.7, iota, k) - rate_oracle(d.F, d.e, hd, hr, H, 0.7, iota, k)) <
                  1e-12);
    }
    CHECK_THROWS_AS(achievable_rate(d, hd, hr, H, 1.0, 1.0, K), std::invalid_argument);
    CHECK_THROWS_AS(achievable_rate(d, Eigen::VectorXcd::Ones(N + 1), hr, H, 1.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("single-user rate is nondecreasing in the beam norm", "[channel]")
{
    Rng rng(5);
    const Eigen::MatrixXcd H = testing::random_complex(6, 3, rng);
    const Eigen::VectorXcd hd = testing::random_complex(3, 1, rng), hr = testing::random_complex(6, 1, rng);
    const Eigen::VectorXcd f = testing::random_complex(3, 1, rng), e = testing::random_complex(6, 1, rng);
    double prev = -1.0;
    for (double s = 0.0; s <= 4.0; s += 0.25)
    {
        const double r = achievable_rate(DesignPoint{f * s, e}, hd, hr, H, 1.0, 1.0, 0);
        CHECK(r >= 0.0);
        CHECK(r >= prev);
        prev = r;
    }
}
