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

#ifndef IRSROBUST_SDP_HPP
#define IRSROBUST_SDP_HPP

#include "affine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace irsrobust
{

/**
 * Standard-form conic program over a real decision vector x:
 *
 *     minimize    c^T x
 *     subject to  F_j(x) >= 0 (PSD)   for every psd constraint j
 *                 x_i >= 0            for every i in nonneg
 */
struct SdpProblem
{
    VarSpace space;
    Eigen::VectorXd objective;
    std::vector<RealAffine> psd;
    std::vector<std::string> labels; // optional, parallel to psd
    std::vector<int> nonneg;

    explicit SdpProblem(VarSpace s = {}) : space(std::move(s)), objective(Eigen::VectorXd::Zero(space.dim())) {}

    void add_psd(RealAffine expr, std::string label = {})
    {
        if (expr.rows() != expr.cols())
            throw std::invalid_argument("SdpProblem::add_psd: constraint is not square");
        psd.push_back(std::move(expr));
        labels.push_back(std::move(label));
    }

    /// Scalar affine inequality expr >= 0.
    void add_scalar(const RealAffine &expr, std::string label = {})
    {
        if (expr.rows() != 1 || expr.cols() != 1)
            throw std::invalid_argument("SdpProblem::add_scalar: expected 1x1 expression");
        add_psd(expr, std::move(label));
    }

    void add_nonneg(const VarBlock &b)
    {
        for (int i = 0; i < b.size; ++i)
            nonneg.push_back(b[i]);
    }

    /// Throws std::out_of_range if any constraint references a variable outside the space.
    void validate() const
    {
        if (objective.size() != space.dim())
            throw std::out_of_range("SdpProblem: objective size does not match VarSpace");
        for (const auto &c : psd)
            if (c.max_index() >= space.dim())
                throw std::out_of_range("SdpProblem: constraint references variable outside VarSpace");
        for (int i : nonneg)
            if (i < 0 || i >= space.dim())
                throw std::out_of_range("SdpProblem: nonnegativity index outside VarSpace");
    }
};

/**
 * Plain-text sparse dump, one nonzero per line:
 *
 *     <constraint id> <coefficient index> <row> <col> <value>
 *
 * Constraint 0 is the objective (row = col = 1). PSD constraints follow as
 * 1..P, then one 1x1 constraint per nonnegative variable. Coefficient index 0
 * is the constant term and index i+1 belongs to variable i. Rows and columns
 * are 1-based; only the upper triangle is written. Lines starting with '#' are
 * comments.
 */
inline void dump_sparse(const SdpProblem &p, std::ostream &os)
{
    os << "# vars " << p.space.dim() << " constraints " << p.psd.size() + p.nonneg.size() << '\n';
    for (const auto &b : p.space.blocks())
        os << "# block " << b.name << ' ' << b.offset << ' ' << b.size << '\n';
    os << std::setprecision(17);
    for (int i = 0; i < p.objective.size(); ++i)
        if (p.objective[i] != 0.0)
            os << 0 << ' ' << i + 1 << ' ' << 1 << ' ' << 1 << ' ' << p.objective[i] << '\n';
    auto write = [&](std::size_t id, int coeff, const Eigen::MatrixXd &m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r <= c; ++r)
                if (m(r, c) != 0.0)
                    os << id << ' ' << coeff << ' ' << r + 1 << ' ' << c + 1 << ' ' << m(r, c) << '\n';
    };
    std::size_t id = 1;
    for (const auto &c : p.psd)
    {
        write(id, 0, c.constant());
        for (const auto &[i, m] : c.coeffs())
            write(id, i + 1, m);
        ++id;
    }
    for (int i : p.nonneg)
        os << id++ << ' ' << i + 1 << ' ' << 1 << ' ' << 1 << ' ' << 1.0 << '\n';
}

inline std::string dump_sparse(const SdpProblem &p)
{
    std::ostringstream os;
    dump_sparse(p, os);
    return os.str();
}

enum class SdpStatus
{
    optimal,
    infeasible,
    unbounded,
    numerical_failure,
    iteration_limit
};

inline const char *to_string(SdpStatus s)
{
    switch (s)
    {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::unbounded: return "unbounded";
    case SdpStatus::numerical_failure: return "numerical-failure";
    case SdpStatus::iteration_limit: return "iteration-limit";
    }
    return "unknown";
}

struct SolverSettings
{
    double feas_tol = 1e-8;
    double rel_gap_tol = 1e-8;
    int max_iters = 200;
    // Farkas-ratio threshold used to declare (primal or dual) infeasibility.
    double infeas_tol = 1e-8;
    // On stagnation the best iterate is returned as optimal (flagged inaccurate)
    // when its residuals and gap are below this and it passes the eigenvalue check.
    double fallback_tol = 1e-6;
};

struct SdpSolution
{
    SdpStatus status = SdpStatus::numerical_failure;
    Eigen::VectorXd x;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double primal_residual = std::numeric_limits<double>::infinity(); // max over constraints of max(0, -lambda_min)
    double dual_residual = std::numeric_limits<double>::infinity();   // relative dual equality residual
    int iterations = 0;
    bool inaccurate = false;

    bool ok() const { return status == SdpStatus::optimal; }
};

/// Smallest eigenvalue of every PSD constraint (and of each nonnegative scalar) at x.
inline double min_constraint_eigenvalue(const SdpProblem &p, const Eigen::VectorXd &x)
{
    double lo = std::numeric_limits<double>::infinity();
    for (const auto &c : p.psd)
    {
        Eigen::MatrixXd v = c.evaluate(x);
        v = 0.5 * (v + v.transpose());
        if (v.rows() == 0)
            continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v, Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues()[0]);
    }
    for (int i : p.nonneg)
        lo = std::min(lo, x[i]);
    return lo;
}

namespace detail
{

// Block of the conic form  C - sum_i y_i A_i = Z >= 0, with A_i = -F_i.
struct ConeBlock
{
    Eigen::MatrixXd C;
    std::vector<int> vars;
    std::vector<Eigen::MatrixXd> A;

    // A[j] = Q.middleCols(start[j], rank[j]) diag(lam) (...)^T, used when cheaper than dense products
    bool factored = false;
    Eigen::MatrixXd Q;
    Eigen::VectorXd lam;
    std::vector<int> start, rank;

    void factorize()
    {
        const Eigen::Index d = C.rows();
        std::vector<Eigen::VectorXd> cols;
        std::vector<double> vals;
        start.clear();
        rank.clear();
        for (const auto &a : A)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
            const double top = es.eigenvalues().cwiseAbs().maxCoeff();
            start.push_back(static_cast<int>(vals.size()));
            int r = 0;
            for (Eigen::Index i = 0; i < d; ++i)
                if (std::abs(es.eigenvalues()[i]) > 1e-14 * top)
                {
                    cols.push_back(es.eigenvectors().col(i));
                    vals.push_back(es.eigenvalues()[i]);
                    ++r;
                }
            rank.push_back(r);
        }
        const double R = static_cast<double>(vals.size());
        const double dd = static_cast<double>(d);
        const double nv = static_cast<double>(A.size());
        const double cost_lr = 2.0 * dd * dd * R + 2.0 * dd * R * R;
        const double cost_dense = 2.0 * nv * dd * dd * dd + 0.5 * nv * nv * dd * dd;
        factored = cost_lr < cost_dense;
        if (!factored)
            return;
        Q.resize(d, static_cast<Eigen::Index>(vals.size()));
        lam.resize(static_cast<Eigen::Index>(vals.size()));
        for (std::size_t i = 0; i < vals.size(); ++i)
        {
            Q.col(static_cast<Eigen::Index>(i)) = cols[i];
            lam[static_cast<Eigen::Index>(i)] = vals[i];
        }
    }
};

struct LinearPart
{
    Eigen::VectorXd C;  // n_l
    Eigen::MatrixXd A;  // n_l x m (column i = A_i restricted to the LP rows)
};

// max alpha in [0, inf) with X + alpha dX >= 0, given Cholesky-able X > 0.
inline double max_step_psd(const Eigen::MatrixXd &X, const Eigen::MatrixXd &dX, bool &ok)
{
    Eigen::LLT<Eigen::MatrixXd> llt(X);
    if (llt.info() != Eigen::Success)
    {
        ok = false;
        return 0.0;
    }
    Eigen::MatrixXd W = llt.matrixL().solve(dX);
    W = llt.matrixL().solve(W.transpose()).eval();
    W = 0.5 * (W + W.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()[0];
    return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

inline double max_step_lp(const Eigen::VectorXd &x, const Eigen::VectorXd &dx)
{
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (dx[i] < 0.0)
            a = std::min(a, -x[i] / dx[i]);
    return a;
}

inline bool inverse_spd(const Eigen::MatrixXd &Z, Eigen::MatrixXd &inv)
{
    Eigen::LLT<Eigen::MatrixXd> llt(Z);
    if (llt.info() != Eigen::Success)
        return false;
    inv = llt.solve(Eigen::MatrixXd::Identity(Z.rows(), Z.cols()));
    inv = 0.5 * (inv + inv.transpose());
    return true;
}

} // namespace detail

/**
 * Infeasible primal-dual path-following method (HKM direction, Mehrotra
 * predictor-corrector) for the pair
 *
 *   (P)  min <C, X>   s.t. <A_i, X> = b_i,  X >= 0
 *   (D)  max b^T y    s.t. C - sum_i y_i A_i = Z >= 0
 *
 * where (D) is the user's problem with y = x, b = -c, C = F_0, A_i = -F_i.
 * Scalar constraints and nonnegative variables form a separate LP cone.
 */
inline SdpSolution solve(const SdpProblem &problem, const SolverSettings &settings = {})
{
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    using detail::ConeBlock;

    problem.validate();
    const int m = problem.space.dim();
    SdpSolution sol;
    sol.x = VectorXd::Zero(m);

    // ---- assemble cone data -------------------------------------------------
    std::vector<ConeBlock> blocks;
    std::vector<std::pair<double, std::vector<std::pair<int, double>>>> lp_rows;
    for (const auto &c : problem.psd)
    {
        if (c.rows() == 0)
            continue;
        if (c.rows() == 1)
        {
            std::vector<std::pair<int, double>> row;
            for (const auto &[i, v] : c.coeffs())
                if (v(0, 0) != 0.0)
                    row.emplace_back(i, v(0, 0));
            lp_rows.emplace_back(c.constant()(0, 0), std::move(row));
            continue;
        }
        ConeBlock b;
        b.C = 0.5 * (c.constant() + c.constant().transpose());
        for (const auto &[i, v] : c.coeffs())
        {
            b.vars.push_back(i);
            b.A.push_back(-0.5 * (v + v.transpose()));
        }
        b.factorize();
        blocks.push_back(std::move(b));
    }
    for (int i : problem.nonneg)
        lp_rows.push_back({0.0, {{i, 1.0}}});

    detail::LinearPart lp;
    const int nl = static_cast<int>(lp_rows.size());
    lp.C = VectorXd::Zero(nl);
    lp.A = MatrixXd::Zero(nl, m);
    for (int l = 0; l < nl; ++l)
    {
        lp.C[l] = lp_rows[l].first;
        for (const auto &[i, v] : lp_rows[l].second)
            lp.A(l, i) -= v;
    }

    const VectorXd b = -problem.objective;

    // variables that never appear in any constraint
    std::vector<bool> used(m, false);
    for (const auto &blk : blocks)
        for (int i : blk.vars)
            used[i] = true;
    for (int i = 0; i < m; ++i)
        if (nl > 0 && lp.A.col(i).cwiseAbs().maxCoeff() > 0.0)
            used[i] = true;
    for (int i = 0; i < m; ++i)
        if (!used[i] && b[i] != 0.0)
        {
            sol.status = SdpStatus::unbounded;
            return sol;
        }

    // ---- operators ----------------------------------------------------------
    auto apply_A = [&](const std::vector<MatrixXd> &X, const VectorXd &xl) {
        VectorXd r = lp.A.transpose() * xl;
        for (std::size_t k = 0; k < blocks.size(); ++k)
            for (std::size_t j = 0; j < blocks[k].vars.size(); ++j)
                r[blocks[k].vars[j]] += blocks[k].A[j].cwiseProduct(X[k]).sum();
        return r;
    };
    auto apply_AT = [&](const VectorXd &y, std::vector<MatrixXd> &S, VectorXd &sl) {
        S.resize(blocks.size());
        for (std::size_t k = 0; k < blocks.size(); ++k)
        {
            S[k] = MatrixXd::Zero(blocks[k].C.rows(), blocks[k].C.cols());
            for (std::size_t j = 0; j < blocks[k].vars.size(); ++j)
                S[k] += y[blocks[k].vars[j]] * blocks[k].A[j];
        }
        sl = lp.A * y;
    };

    // ---- starting point -----------------------------------------------------
    const std::size_t nb = blocks.size();
    std::vector<MatrixXd> X(nb), Z(nb);
    VectorXd xl(nl), zl(nl);
    VectorXd y = VectorXd::Zero(m);
    double n_total = nl;
    for (std::size_t k = 0; k < nb; ++k)
    {
        const double d = static_cast<double>(blocks[k].C.rows());
        n_total += d;
        double zeta = std::max(10.0, std::sqrt(d));
        double eta = std::max({10.0, std::sqrt(d), blocks[k].C.norm()});
        for (std::size_t j = 0; j < blocks[k].vars.size(); ++j)
        {
            const double an = blocks[k].A[j].norm();
            zeta = std::max(zeta, d * (1.0 + std::abs(b[blocks[k].vars[j]])) / (1.0 + an));
            eta = std::max(eta, an);
        }
        X[k] = zeta * MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        Z[k] = eta * MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    }
    if (nl > 0)
    {
        const double d = nl;
        double zeta = std::max(10.0, std::sqrt(d));
        double eta = std::max({10.0, std::sqrt(d), lp.C.norm()});
        for (int i = 0; i < m; ++i)
        {
            const double an = lp.A.col(i).norm();
            if (an == 0.0)
                continue;
            zeta = std::max(zeta, d * (1.0 + std::abs(b[i])) / (1.0 + an));
            eta = std::max(eta, an);
        }
        xl.setConstant(zeta);
        zl.setConstant(eta);
    }

    double normC = lp.C.squaredNorm();
    for (const auto &blk : blocks)
        normC += blk.C.squaredNorm();
    normC = std::sqrt(normC);
    const double normb = b.norm();

    std::vector<MatrixXd> Rd(nb), ATy(nb), Zinv(nb), dX(nb), dZ(nb), dXa(nb), dZa(nb);
    VectorXd Rdl, ATyl, dxl, dzl, dxla, dzla;
    double step_factor = 0.9;

    VectorXd best_y;
    double best_merit = std::numeric_limits<double>::infinity();

    auto finish = [&](SdpStatus st, int it) {
        if ((st == SdpStatus::numerical_failure || st == SdpStatus::iteration_limit) &&
            best_merit <= settings.fallback_tol)
        {
            const double lo = min_constraint_eigenvalue(problem, best_y);
            if (lo >= -settings.feas_tol)
            {
                y = best_y;
                st = SdpStatus::optimal;
                sol.inaccurate = true;
                sol.primal_residual = std::max(0.0, -lo);
            }
        }
        sol.status = st;
        sol.x = y;
        sol.objective = problem.objective.dot(y);
        sol.iterations = it;
        return sol;
    };

    for (int it = 0; it < settings.max_iters; ++it)
    {
        // residuals
        apply_AT(y, ATy, ATyl);
        double rd2 = 0.0, gapXZ = 0.0, pobj = lp.C.dot(xl);
        for (std::size_t k = 0; k < nb; ++k)
        {
            Rd[k] = blocks[k].C - Z[k] - ATy[k];
            rd2 += Rd[k].squaredNorm();
            gapXZ += X[k].cwiseProduct(Z[k]).sum();
            pobj += blocks[k].C.cwiseProduct(X[k]).sum();
        }
        Rdl = lp.C - zl - ATyl;
        rd2 += Rdl.squaredNorm();
        gapXZ += xl.dot(zl);
        const VectorXd AX = apply_A(X, xl);
        const VectorXd rp = b - AX;
        const double dobj = b.dot(y);
        const double pinf = rp.norm() / (1.0 + normb);
        const double dinf = std::sqrt(rd2) / (1.0 + normC);
        const double relgap = std::max(std::abs(pobj - dobj), gapXZ) / (1.0 + std::abs(pobj) + std::abs(dobj));
        const double mu = gapXZ / n_total;

        if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu))
            return finish(SdpStatus::numerical_failure, it);

        sol.dual_residual = pinf;
        const double merit = std::max({pinf, dinf, relgap});
        if (merit < best_merit)
        {
            best_merit = merit;
            best_y = y;
        }
        if (pinf <= settings.feas_tol && dinf <= settings.feas_tol && relgap <= settings.rel_gap_tol)
        {
            const double lo = min_constraint_eigenvalue(problem, y);
            if (lo >= -settings.feas_tol)
            {
                sol.primal_residual = std::max(0.0, -lo);
                return finish(SdpStatus::optimal, it);
            }
        }

        // Farkas certificates. (D) infeasible: X >= 0 with A(X) ~ 0, <C,X> < 0.
        if (pobj < 0.0 && AX.norm() <= settings.infeas_tol * (-pobj))
            return finish(SdpStatus::infeasible, it);
        // (P) infeasible -> (D) unbounded: b^T y > 0 with A^T y + Z ~ C bounded.
        {
            double s2 = (lp.C - Rdl).squaredNorm();
            for (std::size_t k = 0; k < nb; ++k)
                s2 += (blocks[k].C - Rd[k]).squaredNorm();
            if (dobj > 0.0 && std::sqrt(s2) <= settings.infeas_tol * dobj && dinf <= 1e-6)
                return finish(SdpStatus::unbounded, it);
        }

        // ---- Schur complement ----------------------------------------------
        MatrixXd M = MatrixXd::Zero(m, m);
        bool okinv = true;
        for (std::size_t k = 0; k < nb; ++k)
        {
            okinv = okinv && detail::inverse_spd(Z[k], Zinv[k]);
            if (!okinv)
                break;
            const auto &blk = blocks[k];
            const std::size_t nv = blk.vars.size();
            if (blk.factored)
            {
                // Tr(A_i X A_j Z^-1) = sum_ab lam_a lam_b (q_a' X q_b)(q_b' Z^-1 q_a)
                const MatrixXd XQ = blk.Q.transpose() * (X[k] * blk.Q);
                const MatrixXd ZQ = blk.Q.transpose() * (Zinv[k] * blk.Q);
                const MatrixXd Hd = (blk.lam * blk.lam.transpose()).cwiseProduct(XQ).cwiseProduct(ZQ);
                for (std::size_t j = 0; j < nv; ++j)
                    for (std::size_t i = 0; i <= j; ++i)
                    {
                        const double v = Hd.block(blk.start[i], blk.start[j], blk.rank[i], blk.rank[j]).sum();
                        M(blk.vars[i], blk.vars[j]) += v;
                        if (i != j)
                            M(blk.vars[j], blk.vars[i]) += v;
                    }
                continue;
            }
            MatrixXd G;
            for (std::size_t j = 0; j < nv; ++j)
            {
                G.noalias() = X[k] * blk.A[j];
                G = (G * Zinv[k]).transpose().eval();
                for (std::size_t i = 0; i <= j; ++i)
                {
                    const double v = blk.A[i].cwiseProduct(G).sum();
                    M(blk.vars[i], blk.vars[j]) += v;
                    if (i != j)
                        M(blk.vars[j], blk.vars[i]) += v;
                }
            }
        }
        if (!okinv || (zl.array() <= 0.0).any() || (xl.array() <= 0.0).any())
            return finish(SdpStatus::numerical_failure, it);
        if (nl > 0)
            M.noalias() += lp.A.transpose() * (xl.cwiseQuotient(zl)).asDiagonal() * lp.A;
        for (int i = 0; i < m; ++i)
            if (!used[i])
                M(i, i) += 1.0;

        Eigen::LLT<MatrixXd> chol(M);
        Eigen::LDLT<MatrixXd> ldlt;
        bool use_ldlt = false;
        if (chol.info() != Eigen::Success)
        {
            MatrixXd Mr = M;
            Mr.diagonal().array() += 1e-12 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
            chol.compute(Mr);
            if (chol.info() != Eigen::Success)
            {
                ldlt.compute(Mr);
                use_ldlt = true;
                if (ldlt.info() != Eigen::Success)
                    return finish(SdpStatus::numerical_failure, it);
            }
        }
        auto solveM = [&](const VectorXd &r) -> VectorXd { return use_ldlt ? VectorXd(ldlt.solve(r)) : VectorXd(chol.solve(r)); };

        // direction for a given sigma and optional second-order correction
        auto direction = [&](double sigma, bool corrector, std::vector<MatrixXd> &DX, std::vector<MatrixXd> &DZ,
                             VectorXd &dxl_, VectorXd &dzl_, VectorXd &dy_) {
            std::vector<MatrixXd> T(nb);
            VectorXd Tl(nl);
            for (std::size_t k = 0; k < nb; ++k)
            {
                T[k] = -sigma * mu * Zinv[k] + X[k] * Rd[k] * Zinv[k];
                if (corrector)
                    T[k] += dXa[k] * dZa[k] * Zinv[k];
            }
            for (int l = 0; l < nl; ++l)
            {
                Tl[l] = (-sigma * mu + xl[l] * Rdl[l]) / zl[l];
                if (corrector)
                    Tl[l] += dxla[l] * dzla[l] / zl[l];
            }
            VectorXd rhs = b + lp.A.transpose() * Tl;
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t j = 0; j < blocks[k].vars.size(); ++j)
                    rhs[blocks[k].vars[j]] += blocks[k].A[j].cwiseProduct(T[k]).sum();
            dy_ = solveM(rhs);
            std::vector<MatrixXd> ATdy;
            VectorXd ATdyl;
            apply_AT(dy_, ATdy, ATdyl);
            DX.resize(nb);
            DZ.resize(nb);
            for (std::size_t k = 0; k < nb; ++k)
            {
                DZ[k] = Rd[k] - ATdy[k];
                MatrixXd dx = sigma * mu * Zinv[k] - X[k] - X[k] * DZ[k] * Zinv[k];
                if (corrector)
                    dx -= dXa[k] * dZa[k] * Zinv[k];
                DX[k] = 0.5 * (dx + dx.transpose());
            }
            dzl_ = Rdl - ATdyl;
            dxl_ = VectorXd(nl);
            for (int l = 0; l < nl; ++l)
            {
                dxl_[l] = sigma * mu / zl[l] - xl[l] - xl[l] * dzl_[l] / zl[l];
                if (corrector)
                    dxl_[l] -= dxla[l] * dzla[l] / zl[l];
            }
        };

        auto step_lengths = [&](const std::vector<MatrixXd> &DX, const std::vector<MatrixXd> &DZ, const VectorXd &dxl_,
                                const VectorXd &dzl_, double &ap, double &ad) {
            bool ok = true;
            ap = detail::max_step_lp(xl, dxl_);
            ad = detail::max_step_lp(zl, dzl_);
            for (std::size_t k = 0; k < nb && ok; ++k)
            {
                ap = std::min(ap, detail::max_step_psd(X[k], DX[k], ok));
                ad = std::min(ad, detail::max_step_psd(Z[k], DZ[k], ok));
            }
            return ok;
        };

        // predictor
        VectorXd dya;
        direction(0.0, false, dXa, dZa, dxla, dzla, dya);
        double apa = 0.0, ada = 0.0;
        if (!step_lengths(dXa, dZa, dxla, dzla, apa, ada))
            return finish(SdpStatus::numerical_failure, it);
        apa = std::min(1.0, step_factor * apa);
        ada = std::min(1.0, step_factor * ada);
        double mua = (xl + apa * dxla).dot(zl + ada * dzla);
        for (std::size_t k = 0; k < nb; ++k)
            mua += (X[k] + apa * dXa[k]).cwiseProduct(Z[k] + ada * dZa[k]).sum();
        mua /= n_total;
        double sigma = std::pow(std::max(0.0, mua) / mu, 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // corrector
        VectorXd dy;
        direction(sigma, true, dX, dZ, dxl, dzl, dy);
        double ap = 0.0, ad = 0.0;
        if (!step_lengths(dX, dZ, dxl, dzl, ap, ad))
            return finish(SdpStatus::numerical_failure, it);
        ap = std::min(1.0, step_factor * ap);
        ad = std::min(1.0, step_factor * ad);
        if (!(ap > 0.0) || !(ad > 0.0) || (ap < 1e-12 && ad < 1e-12))
            return finish(SdpStatus::numerical_failure, it);

        for (std::size_t k = 0; k < nb; ++k)
        {
            X[k] += ap * dX[k];
            Z[k] += ad * dZ[k];
        }
        xl += ap * dxl;
        zl += ad * dzl;
        y += ad * dy;
        step_factor = std::min(0.99, 0.9 + 0.09 * std::min(ap, ad));
    }
    sol.primal_residual = std::max(0.0, -min_constraint_eigenvalue(problem, y));
    return finish(SdpStatus::iteration_limit, settings.max_iters);
}

} // namespace irsrobust

#endif
