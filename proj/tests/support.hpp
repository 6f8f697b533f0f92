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


// Shared helpers for the test suite.

#ifndef IRSROBUST_TEST_SUPPORT_HPP
#define IRSROBUST_TEST_SUPPORT_HPP

#include "irsrobust.hpp"

#include <random>

namespace testing
{

using irsrobust::cplx;
using irsrobust::Rng;

inline Eigen::MatrixXcd random_complex(Eigen::Index r, Eigen::Index c, Rng &rng)
{
    return irsrobust::complex_gaussian(r, c, rng);
}

inline Eigen::MatrixXcd random_hermitian(Eigen::Index n, Rng &rng)
{
    const Eigen::MatrixXcd a = random_complex(n, n, rng);
    return 0.5 * (a + a.adjoint());
}

inline Eigen::MatrixXcd random_psd(Eigen::Index n, Rng &rng)
{
    const Eigen::MatrixXcd a = random_complex(n, n, rng);
    return a * a.adjoint();
}

inline Eigen::VectorXd random_real(Eigen::Index n, Rng &rng, double scale = 1.0)
{
    std::normal_distribution<double> nd(0.0, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = nd(rng);
    return v;
}

inline double min_eig(const Eigen::MatrixXd &m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

inline double min_eig(const Eigen::MatrixXcd &m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

// Random link data on the unit scale used inside the optimizer.
inline irsrobust::LinkModel random_link(int N, int M, int K, Rng &rng, double eps = 0.1, double rate = 1.0,
                                        double iota = 1.0)
{
    irsrobust::LinkModel l;
    l.iota = iota;
    l.H = random_complex(M, N, rng);
    for (int k = 0; k < K; ++k)
    {
        l.hd.push_back(random_complex(N, 1, rng).col(0) * 0.3);
        l.hr.push_back(random_complex(M, 1, rng).col(0) * 0.3);
        l.eps.push_back(eps * l.hr.back().norm());
        l.sigma2.push_back(1.0);
        l.rate.push_back(rate);
    }
    return l;
}

} // namespace testing

#endif
