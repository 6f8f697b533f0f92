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

#ifndef IRSROBUST_LMI_HPP
#define IRSROBUST_LMI_HPP

#include "affine.hpp"
#include "channel.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace irsrobust
{

/// Per-user link data the constraint builders work on (any consistent unit system).
struct LinkModel
{
    double iota = 1.0;
    Eigen::MatrixXcd H;                // M x N
    std::vector<Eigen::VectorXcd> hd;  // N each
    std::vector<Eigen::VectorXcd> hr;  // M each, estimated reflection channels
    std::vector<double> eps;           // uncertainty radii
    std::vector<double> sigma2;
    std::vector<double> rate;          // targets

    int N() const { return static_cast<int>(H.cols()); }
    int M() const { return static_cast<int>(H.rows()); }
    int K() const { return static_cast<int>(hd.size()); }
    bool robust(int k) const { return eps[k] > 0.0; }
};

enum class ActiveBlock
{
    precoder,
    reflector
};

/**
 * The design (F, e) with exactly one block free. The free block is a complex
 * affine expression over the SDP variables; the other is a constant. Every
 * product of the two blocks is therefore affine.
 */
class ActiveDesign
{
  public:
    /// Precoder free (columns from re/im variable blocks laid out column-major), e fixed.
    static ActiveDesign precoder(const VarBlock &re, const VarBlock &im, int N, int K, Eigen::VectorXcd e_fixed)
    {
        ActiveDesign d;
        d.active_ = ActiveBlock::precoder;
        d.e_ = std::move(e_fixed);
        for (int k = 0; k < K; ++k)
            d.f_.push_back(complex_variable(re, im, k * N, N));
        d.N_ = N;
        d.K_ = K;
        return d;
    }

    /// Reflection free, F fixed.
    static ActiveDesign reflector(const VarBlock &re, const VarBlock &im, int M, Eigen::MatrixXcd F_fixed)
    {
        ActiveDesign d;
        d.active_ = ActiveBlock::reflector;
        d.F_ = std::move(F_fixed);
        d.evar_ = complex_variable(re, im, 0, M);
        d.N_ = static_cast<int>(d.F_.rows());
        d.K_ = static_cast<int>(d.F_.cols());
        return d;
    }

    /// Both blocks constant (evaluation / diagnostics).
    static ActiveDesign fixed(Eigen::MatrixXcd F, Eigen::VectorXcd e)
    {
        ActiveDesign d;
        d.active_ = ActiveBlock::precoder;
        d.e_ = std::move(e);
        d.N_ = static_cast<int>(F.rows());
        d.K_ = static_cast<int>(F.cols());
        for (int k = 0; k < d.K_; ++k)
            d.f_.emplace_back(ComplexAffine::Mat(F.col(k)));
        return d;
    }

    ActiveBlock active() const { return active_; }
    int K() const { return K_; }

    /// f_k as an expression.
    ComplexAffine column(int k) const
    {
        if (active_ == ActiveBlock::precoder)
            return f_.at(k);
        return ComplexAffine(ComplexAffine::Mat(F_.col(k)));
    }

    /// E H f_k with E = iota diag(e).
    ComplexAffine reflected(int k, const Eigen::MatrixXcd &H, double iota) const
    {
        if (active_ == ActiveBlock::precoder)
        {
            const Eigen::MatrixXcd EH = iota * e_.asDiagonal() * H;
            return EH * f_.at(k);
        }
        const Eigen::VectorXcd Hf = H * F_.col(k);
        const Eigen::MatrixXcd D = iota * Hf.asDiagonal();
        return D * evar_;
    }

  private:
    ActiveBlock active_ = ActiveBlock::precoder;
    int N_ = 0, K_ = 0;
    Eigen::MatrixXcd F_;
    Eigen::VectorXcd e_;
    std::vector<ComplexAffine> f_;
    ComplexAffine evar_;
};

/**
 * First-order lower bound of |(h_d^H + h^H E H) f_k|^2 around the anchor
 * (f_k^(n), E^(n)), written as a quadratic form in the reflection channel h:
 *
 *     h^H X h + h^H x + x^H h + c
 *
 * and d = the same form evaluated at the estimate h_hat.
 */
struct SignalBoundTerms
{
    ComplexAffine X; // M x M, Hermitian
    ComplexAffine x; // M x 1
    RealAffine c;    // 1 x 1
    RealAffine d;    // 1 x 1
    Eigen::VectorXcd h_hat;
};

inline SignalBoundTerms signal_bound_terms(const ActiveDesign &design, const Eigen::MatrixXcd &F_anchor,
                                const Eigen::VectorXcd &e_anchor, const LinkModel &link, int k)
{
    const int M = link.M();
    if (F_anchor.rows() != link.N() || F_anchor.cols() != link.K() || e_anchor.size() != M)
        throw std::invalid_argument("signal_bound_terms: anchor dimension mismatch");
    const Eigen::VectorXcd &hd = link.hd[k];
    const Eigen::VectorXcd f_n = F_anchor.col(k);

    const ComplexAffine u = design.reflected(k, link.H, link.iota);
    const Eigen::VectorXcd v = link.iota * e_anchor.cwiseProduct(link.H * f_n);
    const cplx s_n = hd.dot(f_n); // hd^H f_n
    const ComplexAffine s = ComplexAffine::Mat(hd.adjoint()) * design.column(k);

    SignalBoundTerms t;
    t.h_hat = link.hr[k];
    t.X = hermitian_outer(u, v) - ComplexAffine::Mat(v * v.adjoint());
    t.X = t.X.hermitian_part();
    // x = u conj(s_n) + v conj(s) - v conj(s_n)
    t.x = u * std::conj(s_n) + scale_by(s.conjugate(), ComplexAffine::Mat(v)) - ComplexAffine::Mat(v * std::conj(s_n));
    // c = 2 Re(s conj(s_n)) - |s_n|^2
    t.c = real_part(s * (2.0 * std::conj(s_n)));
    t.c.mutable_constant()(0, 0) -= std::norm(s_n);
    const Eigen::MatrixXcd hh = t.h_hat;
    const ComplexAffine quad = ComplexAffine::Mat(hh.adjoint()) * (t.X * hh);
    const ComplexAffine lin = ComplexAffine::Mat(hh.adjoint()) * t.x;
    t.d = real_part(quad) + real_part(lin) * 2.0 + t.c;
    return t;
}

/// Value of the lower bound at channel h for an assignment x of the free block.
inline double signal_bound(const SignalBoundTerms &t, const Eigen::VectorXd &assignment, const Eigen::VectorXcd &h)
{
    const Eigen::MatrixXcd X = t.X.evaluate(assignment);
    const Eigen::VectorXcd x = t.x.evaluate(assignment);
    const double c = t.c.evaluate(assignment)(0, 0);
    return (h.adjoint() * X * h)(0, 0).real() + 2.0 * h.dot(x).real() + c;
}

/// Real LMI for a Hermitian-valued expression: 1x1 stays scalar, otherwise real-embedded.
inline RealAffine hermitian_lmi(const ComplexAffine &h)
{
    const ComplexAffine sym = h.hermitian_part();
    if (sym.rows() == 1)
        return real_part(sym);
    return embed_hermitian(sym);
}

/**
 * S-procedure form of the robust signal constraint:
 *
 *   [ varpi I + X            x + X h_hat                             ]
 *   [ (x + X h_hat)^H   d - beta (2^r - 1) - varpi eps^2 - residual  ]  >= 0
 *
 * Returned in complex Hermitian form; `signal_lmi` embeds it.
 */
inline ComplexAffine signal_lmi_hermitian(const SignalBoundTerms &t, const RealAffine &beta, const RealAffine &varpi,
                                          double eps, double rate, const std::optional<RealAffine> &residual = {})
{
    if (eps < 0.0)
        throw std::invalid_argument("signal_lmi: eps must be >= 0");
    const Eigen::Index M = t.X.rows();
    const Eigen::MatrixXcd hh = t.h_hat;
    ComplexAffine top_left = scaled_identity(to_complex(varpi), M) + t.X;
    ComplexAffine off = t.x + t.X * hh;
    RealAffine corner = t.d - beta * (std::exp2(rate) - 1.0) - varpi * (eps * eps);
    if (residual)
        corner -= *residual;
    std::vector<std::vector<std::optional<ComplexAffine>>> grid{{top_left, off}, {off.adjoint(), to_complex(corner)}};
    return block_compose(grid, {M, 1}, {M, 1}).hermitian_part();
}

inline RealAffine signal_lmi(const SignalBoundTerms &t, const RealAffine &beta, const RealAffine &varpi, double eps,
                             double rate, const std::optional<RealAffine> &residual = {})
{
    return embed_hermitian(signal_lmi_hermitian(t, beta, varpi, eps, rate, residual));
}

/// Scalar form d - beta (2^r - 1) - residual >= 0 (the eps = 0 case without multiplier).
inline RealAffine signal_scalar(const SignalBoundTerms &t, const RealAffine &beta, double rate,
                                const std::optional<RealAffine> &residual = {})
{
    RealAffine corner = t.d - beta * (std::exp2(rate) - 1.0);
    if (residual)
        corner -= *residual;
    return corner;
}

/// Columns f_j, j != k, as expressions.
inline std::vector<int> other_users(int K, int k)
{
    std::vector<int> o;
    for (int j = 0; j < K; ++j)
        if (j != k)
            o.push_back(j);
    return o;
}

/// t_hat = ((h_d^H + h^H E H) F_{-k})^H as a (K-1) x 1 expression.
inline ComplexAffine interference_vector(const ActiveDesign &design, const LinkModel &link, const Eigen::VectorXcd &h,
                                         int k)
{
    const auto others = other_users(link.K(), k);
    ComplexAffine t(static_cast<Eigen::Index>(others.size()), 1);
    const Eigen::MatrixXcd hd_row = link.hd[k].adjoint();
    const Eigen::MatrixXcd h_row = h.adjoint();
    for (std::size_t i = 0; i < others.size(); ++i)
    {
        const int j = others[i];
        ComplexAffine g = hd_row * design.column(j) + h_row * design.reflected(j, link.H, link.iota);
        // place conj(g) at row i
        Eigen::MatrixXcd sel = Eigen::MatrixXcd::Zero(others.size(), 1);
        sel(i, 0) = 1.0;
        t += sel * g.conjugate();
    }
    return t;
}

/// E H F_{-k} as an M x (K-1) expression.
inline ComplexAffine reflected_interference(const ActiveDesign &design, const LinkModel &link, int k)
{
    const auto others = other_users(link.K(), k);
    const Eigen::Index M = link.M();
    ComplexAffine P(M, static_cast<Eigen::Index>(others.size()));
    for (std::size_t i = 0; i < others.size(); ++i)
    {
        Eigen::MatrixXcd sel = Eigen::MatrixXcd::Zero(1, others.size());
        sel(0, i) = 1.0;
        P += design.reflected(others[i], link.H, link.iota) * sel;
    }
    return P;
}

/**
 * Numeric Schur form of the interference-plus-noise constraint at channel h:
 *   [[beta - sigma2, t^H], [t, I]],  t = ((h_d^H + h^H E H) F_{-k})^H.
 */
inline Eigen::MatrixXcd in_schur_form(const DesignPoint &design, const LinkModel &link, const Eigen::VectorXcd &h,
                                      double beta, int k)
{
    const ActiveDesign fixed = ActiveDesign::fixed(design.F, design.e);
    const Eigen::VectorXcd t = interference_vector(fixed, link, h, k).constant();
    const Eigen::Index n = t.size();
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(n + 1, n + 1);
    S(0, 0) = beta - link.sigma2[k];
    S.block(1, 0, n, 1) = t;
    S.block(0, 1, 1, n) = t.adjoint();
    return S;
}

/// Affine Schur form at the estimated channel (the IN constraint when eps = 0).
inline ComplexAffine in_schur_hermitian(const ActiveDesign &design, const LinkModel &link, const RealAffine &beta,
                                        int k)
{
    const ComplexAffine t = interference_vector(design, link, link.hr[k], k);
    const Eigen::Index n = t.rows();
    ComplexAffine corner = to_complex(beta) - ComplexAffine::Mat(ComplexAffine::Mat::Constant(1, 1, link.sigma2[k]));
    std::vector<std::vector<std::optional<ComplexAffine>>> grid{
        {corner, t.adjoint()}, {t, ComplexAffine(ComplexAffine::Mat(Eigen::MatrixXcd::Identity(n, n)))}};
    return block_compose(grid, {1, n}, {1, n}).hermitian_part();
}

inline RealAffine in_schur_lmi(const ActiveDesign &design, const LinkModel &link, const RealAffine &beta, int k)
{
    return hermitian_lmi(in_schur_hermitian(design, link, beta, k));
}

/**
 * Robust counterpart of the IN constraint over ||Delta|| <= eps:
 *
 *   [ beta - sigma2 - xi   t_hat^H              0          ]
 *   [ t_hat                I_{K-1}              eps P^H    ]  >= 0,   P = E H F_{-k}
 *   [ 0                    eps P                xi I_M     ]
 */
inline ComplexAffine in_nemirovski_hermitian(const ActiveDesign &design, const LinkModel &link, const RealAffine &beta,
                                             const RealAffine &xi, int k)
{
    const double eps = link.eps[k];
    if (eps < 0.0)
        throw std::invalid_argument("in_nemirovski_lmi: eps must be >= 0");
    const ComplexAffine t = interference_vector(design, link, link.hr[k], k);
    const ComplexAffine P = reflected_interference(design, link, k) * cplx(eps);
    const Eigen::Index n = t.rows();
    const Eigen::Index M = link.M();
    ComplexAffine corner = to_complex(beta - xi) - ComplexAffine::Mat(ComplexAffine::Mat::Constant(1, 1, link.sigma2[k]));
    std::vector<std::vector<std::optional<ComplexAffine>>> grid{
        {corner, t.adjoint(), std::nullopt},
        {t, ComplexAffine(ComplexAffine::Mat(Eigen::MatrixXcd::Identity(n, n))), P.adjoint()},
        {std::nullopt, P, scaled_identity(to_complex(xi), M)}};
    return block_compose(grid, {1, n, M}, {1, n, M}).hermitian_part();
}

inline RealAffine in_nemirovski_lmi(const ActiveDesign &design, const LinkModel &link, const RealAffine &beta,
                                    const RealAffine &xi, int k)
{
    return embed_hermitian(in_nemirovski_hermitian(design, link, beta, xi, k));
}

} // namespace irsrobust

#endif
