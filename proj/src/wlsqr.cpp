#include "mreg/wlsqr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mreg {

WlsqrState wlsqr_init(const Matrix& A, const WeightMatrix& M, const Vector& b, WlsqrOptions options)
{
    WlsqrState st;
    st.bidiag_ = wgkb_init(A, M, b, options.bidiag);
    st.keep_iterates_ = options.keep_iterates;
    st.x_ = Vector::Zero(A.cols());
    st.w_ = st.bidiag_.q(1);
    st.phibar_ = st.bidiag_.beta(1);
    st.rhobar_ = st.bidiag_.alpha(1);
    st.complete_ = st.bidiag_.terminated();
    st.history_.push_back({0, st.phibar_, 0.0});
    return st;
}

void wlsqr_step(WlsqrState& st, const Matrix& A, const WeightMatrix& M)
{
    if (st.complete_)
        throw std::logic_error("wlsqr_step: solver already reached the least squares solution");

    wgkb_step(st.bidiag_, A, M);
    const Eigen::Index i = st.bidiag_.steps();
    const double beta = st.bidiag_.beta(i + 1);
    const double alpha = st.bidiag_.alpha(i + 1);

    const double rho = std::hypot(st.rhobar_, beta);
    const double c = st.rhobar_ / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    st.rhobar_ = -c * alpha;
    const double phi = c * st.phibar_;
    st.phibar_ = s * st.phibar_;

    st.x_ += (phi / rho) * st.w_;
    st.w_ = st.bidiag_.q(i + 1) - (theta / rho) * st.w_;
    st.k_ = i;
    st.complete_ = st.bidiag_.terminated();

    st.history_.push_back({i, st.phibar_, m_norm(M, st.x_)});
    if (st.keep_iterates_)
        st.iterates_.push_back(st.x_);
}

WlsqrState wlsqr_run(const Matrix& A, const WeightMatrix& M, const Vector& b, Eigen::Index max_iter,
                     const IterationCallback& callback, WlsqrOptions options)
{
    if (max_iter < 1)
        throw std::invalid_argument("wlsqr_run: max_iter must be at least 1");
    WlsqrState st = wlsqr_init(A, M, b, options);
    while (!st.complete() && st.k() < max_iter) {
        wlsqr_step(st, A, M);
        if (callback && callback(st))
            break;
    }
    return st;
}

Eigen::Index default_max_iter(Eigen::Index m, Eigen::Index n)
{
    return std::min<Eigen::Index>({m, n, 200});
}

}  // namespace mreg
