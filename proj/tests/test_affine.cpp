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

using namespace irsrobust;
using testing::min_eig;
using testing::random_hermitian;

namespace
{
RealAffine random_expr(int n, int nvars, Rng &rng, double density = 0.5)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RealAffine e(RealAffine::Mat(testing::random_real(n * n, rng).reshaped(n, n)));
    for (int i = 0; i < nvars; ++i)
        if (u(rng) < density)
            e.add_coeff(i, testing::random_real(n * n, rng).reshaped(n, n));
    return e;
}

Eigen::MatrixXd dense_eval(const RealAffine &e, const Eigen::VectorXd &x)
{
    Eigen::MatrixXd out = e.constant();
    for (int i = 0; i < x.size(); ++i)
    {
        auto it = e.coeffs().find(i);
        if (it == e.coeffs().end())
            continue;
        for (Eigen::Index r = 0; r < out.rows(); ++r)
            for (Eigen::Index c = 0; c < out.cols(); ++c)
                out(r, c) += x[i] * it->second(r, c);
    }
    return out;
}
} // namespace

TEST_CASE("VarSpace lays out disjoint contiguous blocks", "[expr]")
{
    VarSpace vs;
    const VarBlock a = vs.add("a", 3);
    const VarBlock b = vs.add("b", 0);
    const VarBlock c = vs.add("c", 2);
    CHECK(vs.dim() == 5);
    CHECK(a.offset == 0);
    CHECK(b.offset == 3);
    CHECK(c.offset == 3);
    CHECK(c[1] == 4);
    CHECK(vs.block("c").size == 2);
    CHECK_THROWS_AS(vs.block("zz"), std::out_of_range);
    CHECK_THROWS_AS(vs.add("neg", -1), std::invalid_argument);
}

TEST_CASE("evaluate at zero returns the constant term", "[expr]")
{
    Rng rng(1);
    const RealAffine e = random_expr(4, 6, rng);
    CHECK(e.evaluate(Eigen::VectorXd::Zero(6)).isApprox(e.constant()));
}

TEST_CASE("evaluate is affine", "[expr]")
{
    Rng rng(2);
    const RealAffine e = random_expr(5, 8, rng);
    const Eigen::VectorXd x = testing::random_real(8, rng), y = testing::random_real(8, rng);
    const Eigen::MatrixXd lhs = e.evaluate(x + y);
    const Eigen::MatrixXd rhs = e.evaluate(x) + e.evaluate(y) - e.constant();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sparse evaluation matches dense recomputation", "[expr]")
{
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial)
    {
        const RealAffine e = random_expr(6, 30, rng, 0.2);
        const Eigen::VectorXd x = testing::random_real(30, rng);
        CHECK((e.evaluate(x) - dense_eval(e, x)).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + x.cwiseAbs().sum()) * 10);
    }
}

TEST_CASE("evaluate rejects assignments that do not cover the variables", "[expr]")
{
    RealAffine e = RealAffine::variable(4);
    CHECK_THROWS_AS(e.evaluate(Eigen::VectorXd::Zero(3)), std::out_of_range);
}

TEST_CASE("addition and scaling follow matrix algebra", "[expr]")
{
    Rng rng(4);
    const RealAffine a = random_expr(3, 5, rng), b = random_expr(3, 5, rng);
    const Eigen::VectorXd x = testing::random_real(5, rng);
    CHECK((a + b).evaluate(x).isApprox(a.evaluate(x) + b.evaluate(x)));
    CHECK((a - b).evaluate(x).isApprox(a.evaluate(x) - b.evaluate(x)));
    CHECK((a * 2.5).evaluate(x).isApprox(2.5 * a.evaluate(x)));
    CHECK((-a).evaluate(x).isApprox(-a.evaluate(x)));
    const Eigen::MatrixXd L = testing::random_real(6, rng).reshaped(2, 3);
    CHECK((L * a).evaluate(x).isApprox(L * a.evaluate(x)));
    CHECK((a * L.transpose()).evaluate(x).isApprox(a.evaluate(x) * L.transpose()));
    RealAffine wrong(2, 2);
    CHECK_THROWS_AS(a + wrong, std::invalid_argument);
}

TEST_CASE("hermitian_outer with a constant u is the constant u v^H + v u^H", "[expr]")
{
    Rng rng(5);
    const Eigen::VectorXcd u = testing::random_complex(4, 1, rng), v = testing::random_complex(4, 1, rng);
    const ComplexAffine h = hermitian_outer(ComplexAffine(ComplexAffine::Mat(u)), v);
    CHECK(h.is_constant());
    CHECK(h.constant().isApprox(u * v.adjoint() + v * u.adjoint()));
}

TEST_CASE("hermitian_outer is Hermitian for every assignment", "[expr]")
{
    Rng rng(6);
    VarSpace vs;
    const VarBlock re = vs.add("re", 4), im = vs.add("im", 4);
    const ComplexAffine u = ComplexAffine::Mat(testing::random_complex(4, 4, rng)) * complex_variable(re, im, 0, 4);
    const Eigen::VectorXcd v = testing::random_complex(4, 1, rng);
    const ComplexAffine h = hermitian_outer(u, v);
    for (int t = 0; t < 10; ++t)
    {
        const Eigen::VectorXd x = testing::random_real(8, rng);
        const Eigen::MatrixXcd H = h.evaluate(x);
        const Eigen::VectorXcd uv = u.evaluate(x);
        CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((H - (uv * v.adjoint() + v * uv.adjoint())).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(hermitian_outer(u, Eigen::VectorXcd::Ones(3)), std::invalid_argument);
}

TEST_CASE("complex_variable maps re/im blocks to complex entries", "[expr]")
{
    VarSpace vs;
    const VarBlock re = vs.add("re", 3), im = vs.add("im", 3);
    const ComplexAffine z = complex_variable(re, im, 1, 2);
    Eigen::VectorXd x(6);
    x << 1, 2, 3, 4, 5, 6;
    const Eigen::MatrixXcd v = z.evaluate(x);
    REQUIRE(v.rows() == 2);
    CHECK(v(0, 0) == cplx(2, 5));
    CHECK(v(1, 0) == cplx(3, 6));
}

TEST_CASE("block_compose of 1x1 diagonal blocks gives diag(a, b)", "[expr]")
{
    const RealAffine a = RealAffine::variable(0), b = RealAffine::variable(1) * 3.0;
    const RealAffine d = block_diag<double>({a, b});
    Eigen::Vector2d x(2.0, -1.0);
    Eigen::Matrix2d want;
    want << 2.0, 0.0, 0.0, -3.0;
    CHECK(d.evaluate(x).isApprox(want));
}

TEST_CASE("block_compose places blocks and checks sizes", "[expr]")
{
    Rng rng(7);
    const RealAffine a = random_expr(2, 3, rng), c = random_expr(3, 3, rng);
    const RealAffine b(RealAffine::Mat(testing::random_real(6, rng).reshaped(2, 3)));
    std::vector<std::vector<std::optional<RealAffine>>> grid{{a, b}, {b.adjoint(), c}};
    const RealAffine m = block_compose(grid, {2, 3}, {2, 3});
    const Eigen::VectorXd x = testing::random_real(3, rng);
    const Eigen::MatrixXd v = m.evaluate(x);
    CHECK(v.topLeftCorner(2, 2).isApprox(a.evaluate(x)));
    CHECK(v.topRightCorner(2, 3).isApprox(b.constant()));
    CHECK(v.bottomRightCorner(3, 3).isApprox(c.evaluate(x)));
    std::vector<std::vector<std::optional<RealAffine>>> bad{{a, std::nullopt}, {std::nullopt, a}};
    CHECK_THROWS_AS(block_compose(bad, {2, 3}, {2, 3}), std::invalid_argument);
}

TEST_CASE("embed_hermitian of a real scalar", "[expr]")
{
    Eigen::MatrixXcd h(1, 1);
    h(0, 0) = 2.0;
    Eigen::Matrix2d want;
    want << 2, 0, 0, 2;
    CHECK(embed_hermitian(h).isApprox(want));
}

TEST_CASE("embed_hermitian of [[0,-j],[j,0]] has eigenvalues -1,-1,1,1", "[expr]")
{
    Eigen::MatrixXcd h(2, 2);
    h << 0.0, cplx(0, -1), cplx(0, 1), 0.0;
    const Eigen::MatrixXd e = embed_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e);
    const Eigen::Vector4d want(-1, -1, 1, 1);
    CHECK((es.eigenvalues() - want).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("embed_hermitian keeps the spectrum with doubled multiplicity", "[expr]")
{
    Rng rng(8);
    for (int t = 0; t < 25; ++t)
    {
        const Eigen::MatrixXcd h = random_hermitian(6, rng);
        const Eigen::MatrixXd e = embed_hermitian(h);
        CHECK((e - e.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e, Eigen::EigenvaluesOnly);
        for (int i = 0; i < 6; ++i)
        {
            CHECK(std::abs(es.eigenvalues()[2 * i] - hs.eigenvalues()[i]) < 1e-9);
            CHECK(std::abs(es.eigenvalues()[2 * i + 1] - hs.eigenvalues()[i]) < 1e-9);
        }
        // PSD iff PSD, trace doubles
        CHECK((min_eig(e) >= -1e-9) == (min_eig(h) >= -1e-9));
        CHECK(std::abs(e.trace() - 2.0 * h.trace().real()) < 1e-10);
    }
}

TEST_CASE("embedding of a random PSD matrix is PSD", "[expr]")
{
    Rng rng(9);
    for (int t = 0; t < 25; ++t)
        CHECK(min_eig(embed_hermitian(testing::random_psd(5, rng))) >= -1e-10);
}

TEST_CASE("embed_hermitian rejects non-Hermitian input", "[expr]")
{
    Eigen::MatrixXcd h(2, 2);
    h << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(embed_hermitian(h), std::invalid_argument);
    Eigen::MatrixXcd nearly = Eigen::MatrixXcd::Identity(2, 2);
    nearly(0, 1) = 1e-12;
    CHECK_NOTHROW(embed_hermitian(nearly));
}

TEST_CASE("embedding an affine expression commutes with evaluation", "[expr]")
{
    Rng rng(10);
    VarSpace vs;
    const VarBlock re = vs.add("re", 3), im = vs.add("im", 3);
    const ComplexAffine u = complex_variable(re, im, 0, 3);
    const ComplexAffine h = hermitian_outer(u, testing::random_complex(3, 1, rng).col(0)) +
                            ComplexAffine::Mat(random_hermitian(3, rng));
    const RealAffine e = embed_hermitian(h);
    for (int t = 0; t < 5; ++t)
    {
        const Eigen::VectorXd x = testing::random_real(6, rng);
        CHECK((e.evaluate(x) - embed_hermitian(Eigen::MatrixXcd(h.evaluate(x)))).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("coefficients stay symmetric through algebraic operations", "[expr]")
{
    Rng rng(11);
    VarSpace vs;
    const VarBlock re = vs.add("re", 4), im = vs.add("im", 4);
    const ComplexAffine u = complex_variable(re, im, 0, 4);
    ComplexAffine h = hermitian_outer(u, testing::random_complex(4, 1, rng).col(0));
    h += scaled_identity(to_complex(RealAffine::variable(2)), 4);
    h = h * cplx(0.7) - ComplexAffine::Mat(random_hermitian(4, rng));
    const RealAffine e = embed_hermitian(h);
    const RealAffine s = e + e * 3.0 - RealAffine(RealAffine::Mat(Eigen::MatrixXd::Identity(8, 8)));
    CHECK((s.constant() - s.constant().transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    for (const auto &[i, c] : s.coeffs())
        CHECK((c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("SdpProblem validates variable indices", "[expr]")
{
    VarSpace vs;
    const VarBlock x = vs.add("x", 2);
    SdpProblem p(vs);
    p.add_psd(RealAffine::variable(x[1]));
    CHECK_NOTHROW(p.validate());
    p.add_psd(RealAffine::variable(5));
    CHECK_THROWS_AS(p.validate(), std::out_of_range);
    CHECK_THROWS_AS(p.add_psd(RealAffine(2, 3)), std::invalid_argument);
    CHECK_THROWS_AS(p.add_scalar(RealAffine(2, 2)), std::invalid_argument);
}

TEST_CASE("sparse dump lists every nonzero once", "[expr]")
{
    VarSpace vs;
    const VarBlock t = vs.add("t", 1);
    const VarBlock y = vs.add("y", 1);
    SdpProblem p(vs);
    p.objective[t[0]] = 1.0;
    RealAffine m(2, 2);
    m.mutable_constant() << 0.0, 1.0, 1.0, 0.0;
    Eigen::MatrixXd c(2, 2);
    c << 1.0, 0.0, 0.0, 1.0;
    m.add_coeff(t[0], c);
    p.add_psd(m);
    p.add_nonneg(y);
    const std::string d = dump_sparse(p);
    CHECK(d.find("0 1 1 1 1\n") != std::string::npos);   // objective
    CHECK(d.find("1 0 1 2 1\n") != std::string::npos);   // constant off-diagonal, upper triangle only
    CHECK(d.find("1 0 2 1") == std::string::npos);
    CHECK(d.find("1 1 1 1 1\n") != std::string::npos);
    CHECK(d.find("1 1 2 2 1\n") != std::string::npos);
    CHECK(d.find("2 2 1 1 1\n") != std::string::npos);   // y >= 0
    CHECK(d.rfind("# vars 2", 0) == 0);
}
