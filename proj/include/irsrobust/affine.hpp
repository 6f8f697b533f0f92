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

#ifndef IRSROBUST_AFFINE_HPP
#define IRSROBUST_AFFINE_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace irsrobust
{

using cplx = std::complex<double>;

/// A named contiguous range of real decision scalars.
struct VarBlock
{
    std::string name;
    int offset = 0;
    int size = 0;

    int operator[](int i) const { return offset + i; }
};

/// Layout of the real decision vector as a list of disjoint blocks.
class VarSpace
{
  public:
    VarBlock add(std::string name, int size)
    {
        if (size < 0)
            throw std::invalid_argument("VarSpace::add: negative block size");
        VarBlock b{std::move(name), dim_, size};
        dim_ += size;
        blocks_.push_back(b);
        return b;
    }

    int dim() const { return dim_; }
    const std::vector<VarBlock> &blocks() const { return blocks_; }

    const VarBlock &block(const std::string &name) const
    {
        for (const auto &b : blocks_)
            if (b.name == name)
                return b;
        throw std::out_of_range("VarSpace: unknown block '" + name + "'");
    }

  private:
    std::vector<VarBlock> blocks_;
    int dim_ = 0;
};

/**
 * Matrix-valued affine function of a real decision vector x:
 *
 *     A(x) = A0 + sum_i x_i * A_i
 *
 * Coefficients are stored sparsely by variable index. The scalar type is
 * either double (real symmetric LMIs) or std::complex<double> (Hermitian
 * LMIs prior to real embedding, and affine complex vectors).
 */
template <typename T>
class AffineMatrix
{
  public:
    using Scalar = T;
    using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

    AffineMatrix() = default;
    AffineMatrix(Eigen::Index rows, Eigen::Index cols) : constant_(Mat::Zero(rows, cols)) {}
    explicit AffineMatrix(Mat constant) : constant_(std::move(constant)) {}

    static AffineMatrix zero(Eigen::Index rows, Eigen::Index cols) { return AffineMatrix(rows, cols); }

    static AffineMatrix scalar(T value)
    {
        Mat m(1, 1);
        m(0, 0) = value;
        return AffineMatrix(std::move(m));
    }

    /// 1x1 expression equal to the single variable x_index.
    static AffineMatrix variable(int index)
    {
        AffineMatrix r(1, 1);
        Mat c(1, 1);
        c(0, 0) = T(1);
        r.coeffs_.emplace(index, std::move(c));
        return r;
    }

    Eigen::Index rows() const { return constant_.rows(); }
    Eigen::Index cols() const { return constant_.cols(); }
    const Mat &constant() const { return constant_; }
    const std::map<int, Mat> &coeffs() const { return coeffs_; }
    bool is_constant() const { return coeffs_.empty(); }

    /// Adds `value * E` to the coefficient of variable `index`.
    void add_coeff(int index, const Mat &value)
    {
        check_same_shape(value.rows(), value.cols(), "add_coeff");
        auto it = coeffs_.find(index);
        if (it == coeffs_.end())
            coeffs_.emplace(index, value);
        else
            it->second += value;
    }

    Mat &mutable_constant() { return constant_; }

    /// Largest variable index referenced, or -1.
    int max_index() const { return coeffs_.empty() ? -1 : coeffs_.rbegin()->first; }

    Mat evaluate(const Eigen::Ref<const Eigen::VectorXd> &x) const
    {
        Mat out = constant_;
        for (const auto &[i, c] : coeffs_)
        {
            if (i >= x.size())
                throw std::out_of_range("AffineMatrix::evaluate: assignment does not cover variable " +
                                        std::to_string(i));
            out += T(x[i]) * c;
        }
        return out;
    }

    AffineMatrix &operator+=(const AffineMatrix &o)
    {
        check_same_shape(o.rows(), o.cols(), "operator+");
        constant_ += o.constant_;
        for (const auto &[i, c] : o.coeffs_)
            add_coeff(i, c);
        return *this;
    }

    AffineMatrix &operator-=(const AffineMatrix &o) { return *this += (-o); }

    AffineMatrix &operator*=(T s)
    {
        constant_ *= s;
        for (auto &[i, c] : coeffs_)
            c *= s;
        return *this;
    }

    AffineMatrix operator-() const
    {
        AffineMatrix r = *this;
        r *= T(-1);
        return r;
    }

    friend AffineMatrix operator+(AffineMatrix a, const AffineMatrix &b) { return a += b; }
    friend AffineMatrix operator-(AffineMatrix a, const AffineMatrix &b) { return a -= b; }
    friend AffineMatrix operator*(AffineMatrix a, T s) { return a *= s; }
    friend AffineMatrix operator*(T s, AffineMatrix a) { return a *= s; }

    /// Adds a constant matrix.
    AffineMatrix &operator+=(const Mat &m)
    {
        check_same_shape(m.rows(), m.cols(), "operator+ (constant)");
        constant_ += m;
        return *this;
    }
    friend AffineMatrix operator+(AffineMatrix a, const Mat &m) { return a += m; }
    friend AffineMatrix operator-(AffineMatrix a, const Mat &m) { return a += Mat(-m); }

    /// Left multiplication by a constant matrix: L * A(x).
    friend AffineMatrix operator*(const Mat &left, const AffineMatrix &a)
    {
        if (left.cols() != a.rows())
            throw std::invalid_argument("AffineMatrix: dimension mismatch in left product");
        AffineMatrix r(Mat(left * a.constant_));
        for (const auto &[i, c] : a.coeffs_)
            r.coeffs_.emplace(i, left * c);
        return r;
    }

    /// Right multiplication by a constant matrix: A(x) * R.
    friend AffineMatrix operator*(const AffineMatrix &a, const Mat &right)
    {
        if (a.cols() != right.rows())
            throw std::invalid_argument("AffineMatrix: dimension mismatch in right product");
        AffineMatrix r(Mat(a.constant_ * right));
        for (const auto &[i, c] : a.coeffs_)
            r.coeffs_.emplace(i, c * right);
        return r;
    }

    /// Conjugate transpose (transpose for real T). Valid since x is real.
    AffineMatrix adjoint() const
    {
        AffineMatrix r(Mat(constant_.adjoint()));
        for (const auto &[i, c] : coeffs_)
            r.coeffs_.emplace(i, c.adjoint());
        return r;
    }

    AffineMatrix conjugate() const
    {
        AffineMatrix r(Mat(constant_.conjugate()));
        for (const auto &[i, c] : coeffs_)
            r.coeffs_.emplace(i, c.conjugate());
        return r;
    }

    /// Sub-block (rows [r0, r0+nr), cols [c0, c0+nc)).
    AffineMatrix block(Eigen::Index r0, Eigen::Index c0, Eigen::Index nr, Eigen::Index nc) const
    {
        AffineMatrix r(Mat(constant_.block(r0, c0, nr, nc)));
        for (const auto &[i, c] : coeffs_)
        {
            Mat b = c.block(r0, c0, nr, nc);
            if (!b.isZero(0.0))
                r.coeffs_.emplace(i, std::move(b));
        }
        return r;
    }

    /// (A + A^H) / 2 applied to every term.
    AffineMatrix hermitian_part() const
    {
        AffineMatrix r(Mat((constant_ + constant_.adjoint()) * T(0.5)));
        for (const auto &[i, c] : coeffs_)
            r.coeffs_.emplace(i, (c + c.adjoint()) * T(0.5));
        return r;
    }

    /// Drops coefficient matrices that are identically zero.
    void prune()
    {
        for (auto it = coeffs_.begin(); it != coeffs_.end();)
        {
            if (it->second.isZero(0.0))
                it = coeffs_.erase(it);
            else
                ++it;
        }
    }

  private:
    void check_same_shape(Eigen::Index r, Eigen::Index c, const char *what) const
    {
        if (r != rows() || c != cols())
            throw std::invalid_argument(std::string("AffineMatrix: dimension mismatch in ") + what);
    }

    Mat constant_;
    std::map<int, Mat> coeffs_;
};

using RealAffine = AffineMatrix<double>;
using ComplexAffine = AffineMatrix<cplx>;

/// Complex column vector whose entry i is x[re[i]] + j x[im[i]].
inline ComplexAffine complex_variable(const VarBlock &re, const VarBlock &im, int offset, int n)
{
    ComplexAffine v(n, 1);
    for (int i = 0; i < n; ++i)
    {
        ComplexAffine::Mat c = ComplexAffine::Mat::Zero(n, 1);
        c(i, 0) = cplx(1.0, 0.0);
        v.add_coeff(re[offset + i], c);
        c(i, 0) = cplx(0.0, 1.0);
        v.add_coeff(im[offset + i], c);
    }
    return v;
}

/// Real-valued expression lifted to complex scalars.
inline ComplexAffine to_complex(const RealAffine &a)
{
    ComplexAffine r(ComplexAffine::Mat(a.constant().cast<cplx>()));
    for (const auto &[i, c] : a.coeffs())
        r.add_coeff(i, c.cast<cplx>());
    return r;
}

/// Entrywise real part.
inline RealAffine real_part(const ComplexAffine &a)
{
    RealAffine r(RealAffine::Mat(a.constant().real()));
    for (const auto &[i, c] : a.coeffs())
        r.add_coeff(i, c.real());
    r.prune();
    return r;
}

/// u v^H + v u^H for affine column u and constant column v; Hermitian by construction.
inline ComplexAffine hermitian_outer(const ComplexAffine &u, const Eigen::VectorXcd &v)
{
    if (u.cols() != 1 || u.rows() != v.size())
        throw std::invalid_argument("hermitian_outer: dimension mismatch");
    auto term = [&](const Eigen::MatrixXcd &uc) -> Eigen::MatrixXcd {
        Eigen::MatrixXcd p = uc * v.adjoint();
        return p + p.adjoint();
    };
    ComplexAffine r(ComplexAffine::Mat(term(u.constant())));
    for (const auto &[i, c] : u.coeffs())
        r.add_coeff(i, term(c));
    return r;
}

/// Scalar (1x1) times matrix where at most one side is non-constant.
template <typename T>
AffineMatrix<T> scale_by(const AffineMatrix<T> &scalar, const typename AffineMatrix<T>::Mat &m)
{
    if (scalar.rows() != 1 || scalar.cols() != 1)
        throw std::invalid_argument("scale_by: expected 1x1 expression");
    AffineMatrix<T> r(typename AffineMatrix<T>::Mat(scalar.constant()(0, 0) * m));
    for (const auto &[i, c] : scalar.coeffs())
        r.add_coeff(i, c(0, 0) * m);
    return r;
}

/**
 * Assemble a block matrix. `grid[r][c]` may be empty (zero block); block row
 * heights and column widths are taken from `row_sizes` / `col_sizes`.
 */
template <typename T>
AffineMatrix<T> block_compose(const std::vector<std::vector<std::optional<AffineMatrix<T>>>> &grid,
                              const std::vector<Eigen::Index> &row_sizes, const std::vector<Eigen::Index> &col_sizes)
{
    using Mat = typename AffineMatrix<T>::Mat;
    if (grid.size() != row_sizes.size())
        throw std::invalid_argument("block_compose: row count mismatch");
    Eigen::Index nr = 0, nc = 0;
    for (auto s : row_sizes)
        nr += s;
    for (auto s : col_sizes)
        nc += s;
    AffineMatrix<T> out(nr, nc);
    Eigen::Index r0 = 0;
    for (std::size_t br = 0; br < grid.size(); ++br)
    {
        if (grid[br].size() != col_sizes.size())
            throw std::invalid_argument("block_compose: column count mismatch");
        Eigen::Index c0 = 0;
        for (std::size_t bc = 0; bc < grid[br].size(); ++bc)
        {
            const auto &blk = grid[br][bc];
            if (blk)
            {
                if (blk->rows() != row_sizes[br] || blk->cols() != col_sizes[bc])
                    throw std::invalid_argument("block_compose: block dimension mismatch");
                out.mutable_constant().block(r0, c0, blk->rows(), blk->cols()) = blk->constant();
                for (const auto &[i, c] : blk->coeffs())
                {
                    Mat full = Mat::Zero(nr, nc);
                    full.block(r0, c0, c.rows(), c.cols()) = c;
                    out.add_coeff(i, full);
                }
            }
            c0 += col_sizes[bc];
        }
        r0 += row_sizes[br];
    }
    return out;
}

/// Block-diagonal assembly.
template <typename T>
AffineMatrix<T> block_diag(const std::vector<AffineMatrix<T>> &blocks)
{
    std::vector<std::vector<std::optional<AffineMatrix<T>>>> grid(blocks.size(),
                                                                  std::vector<std::optional<AffineMatrix<T>>>(blocks.size()));
    std::vector<Eigen::Index> sizes;
    for (std::size_t i = 0; i < blocks.size(); ++i)
    {
        grid[i][i] = blocks[i];
        sizes.push_back(blocks[i].rows());
    }
    return block_compose(grid, sizes, sizes);
}

/// Identity expression scaled by a 1x1 expression.
template <typename T>
AffineMatrix<T> scaled_identity(const AffineMatrix<T> &scalar, Eigen::Index n)
{
    return scale_by(scalar, AffineMatrix<T>::Mat::Identity(n, n));
}

/// [[Re H, -Im H], [Im H, Re H]] for a constant Hermitian matrix.
inline Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd &h, double tol = 1e-10)
{
    if (h.rows() != h.cols())
        throw std::invalid_argument("embed_hermitian: matrix is not square");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
        throw std::invalid_argument("embed_hermitian: matrix is not Hermitian");
    const Eigen::Index n = h.rows();
    Eigen::MatrixXd r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = h.real();
    r.topRightCorner(n, n) = -h.imag();
    r.bottomLeftCorner(n, n) = h.imag();
    r.bottomRightCorner(n, n) = h.real();
    return 0.5 * (r + r.transpose());
}

/// Real embedding of a Hermitian-valued affine expression (every term embedded).
inline RealAffine embed_hermitian(const ComplexAffine &a, double tol = 1e-10)
{
    RealAffine r(embed_hermitian(a.constant(), tol));
    for (const auto &[i, c] : a.coeffs())
        r.add_coeff(i, embed_hermitian(c, tol));
    r.prune();
    return r;
}

} // namespace irsrobust

#endif
