#include "mreg/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace mreg::kernels {

namespace {

// Row chunk for gemv. Fixed so results are identical for any thread count.
constexpr Eigen::Index kRowChunk = 256;

void check_cols(const Matrix& B, Eigen::Index cols)
{
    if (cols < 0 || cols > B.cols())
        throw std::invalid_argument("kernels: column count out of range");
}

}  // namespace

void gemv(const Matrix& A, const ConstVectorRef& x, Vector& y)
{
    if (x.size() != A.cols())
        throw std::invalid_argument("gemv: dimension mismatch");
    const Eigen::Index m = A.rows();
    y.resize(m);
    const Eigen::Index chunks = (m + kRowChunk - 1) / kRowChunk;

#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < chunks; ++c) {
        const Eigen::Index r0 = c * kRowChunk;
        const Eigen::Index len = std::min(kRowChunk, m - r0);
        y.segment(r0, len).noalias() = A.middleRows(r0, len) * x;
    }
}

void gemv_t(const Matrix& A, const ConstVectorRef& y, Vector& x)
{
    if (y.size() != A.rows())
        throw std::invalid_argument("gemv_t: dimension mismatch");
    const Eigen::Index n = A.cols();
    x.resize(n);

#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < n; ++j)
        x[j] = A.col(j).dot(y);
}

void dots(const Matrix& B, Eigen::Index cols, const ConstVectorRef& v, Vector& coeffs)
{
    check_cols(B, cols);
    if (v.size() != B.rows())
        throw std::invalid_argument("dots: dimension mismatch");
    coeffs.resize(cols);

#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j)
        coeffs[j] = B.col(j).dot(v);
}

void subtract_combination(const Matrix& B, Eigen::Index cols, const Vector& coeffs, Vector& v)
{
    check_cols(B, cols);
    if (v.size() != B.rows() || coeffs.size() != cols)
        throw std::invalid_argument("subtract_combination: dimension mismatch");
    if (cols == 0)
        return;
    const Eigen::Index m = B.rows();
    const Eigen::Index chunks = (m + kRowChunk - 1) / kRowChunk;

#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < chunks; ++c) {
        const Eigen::Index r0 = c * kRowChunk;
        const Eigen::Index len = std::min(kRowChunk, m - r0);
        v.segment(r0, len).noalias() -= B.block(r0, 0, len, cols) * coeffs;
    }
}

namespace serial {

void gemv(const Matrix& A, const ConstVectorRef& x, Vector& y)
{
    if (x.size() != A.cols())
        throw std::invalid_argument("gemv: dimension mismatch");
    y = Vector::Zero(A.rows());
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        const double xj = x[j];
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            y[i] += A(i, j) * xj;
    }
}

void gemv_t(const Matrix& A, const ConstVectorRef& y, Vector& x)
{
    if (y.size() != A.rows())
        throw std::invalid_argument("gemv_t: dimension mismatch");
    x.resize(A.cols());
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            s += A(i, j) * y[i];
        x[j] = s;
    }
}

void dots(const Matrix& B, Eigen::Index cols, const ConstVectorRef& v, Vector& coeffs)
{
    check_cols(B, cols);
    if (v.size() != B.rows())
        throw std::invalid_argument("dots: dimension mismatch");
    coeffs.resize(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < B.rows(); ++i)
            s += B(i, j) * v[i];
        coeffs[j] = s;
    }
}

void subtract_combination(const Matrix& B, Eigen::Index cols, const Vector& coeffs, Vector& v)
{
    check_cols(B, cols);
    if (v.size() != B.rows() || coeffs.size() != cols)
        throw std::invalid_argument("subtract_combination: dimension mismatch");
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < B.rows(); ++i)
            v[i] -= B(i, j) * coeffs[j];
}

}  // namespace serial
}  // namespace mreg::kernels
