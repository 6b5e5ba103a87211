#include "mreg/wsvd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mreg {

double rank_tolerance(Eigen::Index m, Eigen::Index n)
{
    return static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon();
}

WsvdFactorization wsvd(const Matrix& A, const WeightMatrix& M)
{
    if (A.cols() != M.order()) {
        std::ostringstream os;
        os << "wsvd: A has " << A.cols() << " columns but M has order " << M.order();
        throw std::invalid_argument(os.str());
    }
    if (!A.allFinite())
        throw std::invalid_argument("wsvd: A has non-finite entries");

    const Matrix C = M.right_solve_factor(A);
    Eigen::BDCSVD<Matrix> svd(C, Eigen::ComputeThinU | Eigen::ComputeFullV);

    WsvdFactorization f;
    f.weight = M;
    f.U = svd.matrixU();
    f.V = M.solve_factor(Matrix(svd.matrixV()));

    const Vector& s = svd.singularValues();
    const double s1 = s.size() > 0 ? s[0] : 0.0;
    const double cut = rank_tolerance(A.rows(), A.cols()) * s1;
    Eigen::Index r = 0;
    while (r < s.size() && s[r] > cut && s[r] > 0.0)
        ++r;
    f.rank = r;
    f.sigma = s.head(r);

    for (Eigen::Index i = 0; i < f.U.cols(); ++i) {
        auto u = f.U.col(i);
        const double big = u.cwiseAbs().maxCoeff();
        if (big == 0.0)
            continue;
        Eigen::Index j = 0;
        while (std::abs(u[j]) <= 1e-8 * big)
            ++j;
        if (u[j] < 0.0) {
            u = -u;
            f.V.col(i) = -f.V.col(i);
        }
    }
    return f;
}

double weighted_operator_norm(const Matrix& A, const WeightMatrix& M)
{
    const auto f = wsvd(A, M);
    return f.rank > 0 ? f.sigma[0] : 0.0;
}

Matrix low_rank_approx(const WsvdFactorization& f, Eigen::Index k)
{
    if (k < 1 || k >= f.rank)
        throw std::out_of_range("low_rank_approx: k must satisfy 1 <= k < rank");
    const Matrix MVk = f.weight.apply(Matrix(f.V.leftCols(k)));
    return f.U.leftCols(k) * f.sigma.head(k).asDiagonal() * MVk.transpose();
}

Vector wsvd_coefficients(const WsvdFactorization& f, const Vector& b)
{
    if (b.size() != f.rows())
        throw std::invalid_argument("wsvd: right-hand side has wrong length");
    return f.U.leftCols(f.rank).transpose() * b;
}

Vector min_m_norm_ls(const WsvdFactorization& f, const Vector& b)
{
    const Vector c = wsvd_coefficients(f, b);
    return f.V.leftCols(f.rank) * c.cwiseQuotient(f.sigma);
}

Vector twsvd_solution(const WsvdFactorization& f, const Vector& b, Eigen::Index k)
{
    if (k < 1 || k > f.rank)
        throw std::out_of_range("twsvd_solution: k must satisfy 1 <= k <= rank");
    const Vector c = wsvd_coefficients(f, b).head(k);
    return f.V.leftCols(k) * c.cwiseQuotient(f.sigma.head(k));
}

Vector tikhonov_wsvd(const WsvdFactorization& f, const Vector& b, double lambda)
{
    if (!(lambda >= 0.0))
        throw std::invalid_argument("tikhonov_wsvd: lambda must be nonnegative");
    const Vector c = wsvd_coefficients(f, b);
    // sigma^2/(sigma^2+lambda) * c/sigma
    const Vector coeff = (f.sigma.array() * c.array() / (f.sigma.array().square() + lambda)).matrix();
    return f.V.leftCols(f.rank) * coeff;
}

}  // namespace mreg
