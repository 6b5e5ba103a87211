#include "mreg/wgkb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mreg {

namespace {

// Two classical Gram-Schmidt passes of v against the first `cols` columns of
// `basis` in the 2-inner product.
void reorthogonalize(const Matrix& basis, Eigen::Index cols, Vector& v)
{
    Vector c;
    for (int pass = 0; pass < 2; ++pass) {
        kernels::dots(basis, cols, v, c);
        kernels::subtract_combination(basis, cols, c, v);
    }
}

// M-inner product version. With s = M^{-1} s_bar the coefficients Q^T M s are
// Q^T s_bar, and s_bar is kept equal to M s by updating it with M Q.
void m_reorthogonalize(const Matrix& Q, const Matrix& MQ, Eigen::Index cols, Vector& s, Vector& s_bar)
{
    Vector c;
    for (int pass = 0; pass < 2; ++pass) {
        kernels::dots(Q, cols, s_bar, c);
        kernels::subtract_combination(Q, cols, c, s);
        kernels::subtract_combination(MQ, cols, c, s_bar);
    }
}

}  // namespace

void BidiagState::reserve(Eigen::Index cols)
{
    if (cols <= P_.cols())
        return;
    const Eigen::Index grown = std::max(cols, 2 * P_.cols());
    P_.conservativeResize(Eigen::NoChange, grown);
    Q_.conservativeResize(Eigen::NoChange, grown);
    MQ_.conservativeResize(Eigen::NoChange, grown);
}

void BidiagState::terminate_at(Eigen::Index k)
{
    terminated_ = true;
    termination_step_ = k;
}

BidiagState wgkb_init(const Matrix& A, const WeightMatrix& M, const Vector& b, BidiagOptions options)
{
    if (A.cols() != M.order() || b.size() != A.rows())
        throw std::invalid_argument("wgkb_init: dimension mismatch");
    const double beta1 = b.norm();
    if (!(beta1 > 0.0))
        throw std::invalid_argument("wgkb_init: right-hand side is zero");

    BidiagState st;
    st.options_ = options;
    st.P_.resize(A.rows(), 16);
    st.Q_.resize(A.cols(), 16);
    st.MQ_.resize(A.cols(), 16);

    st.betas_.push_back(beta1);
    st.P_.col(0) = b / beta1;

    Vector s_bar;
    kernels::gemv_t(A, st.P_.col(0), s_bar);
    Vector s = M.solve(s_bar);
    const double alpha1 = std::sqrt(std::max(0.0, s.dot(s_bar)));
    st.norm_estimate_ = alpha1;
    st.p_drift_ = std::numeric_limits<double>::epsilon();

    // No scale is known yet, so only an exact zero counts as breakdown here.
    if (!(alpha1 > 0.0)) {
        st.alphas_.push_back(0.0);
        st.Q_.col(0).setZero();
        st.MQ_.col(0).setZero();
        st.terminate_at(0);
        return st;
    }
    st.alphas_.push_back(alpha1);
    st.Q_.col(0) = s / alpha1;
    st.MQ_.col(0) = s_bar / alpha1;
    st.q_drift_ = std::numeric_limits<double>::epsilon();
    return st;
}

// Rounding out of the Krylov space is carried into the next vector by the
// recurrence coefficient and divided by the new normalization, plus a fresh
// unit-roundoff contribution at the scale of ||B_k||.
void BidiagState::update_drift(double& drift, double previous_coefficient, double coefficient) const
{
    constexpr double u = std::numeric_limits<double>::epsilon();
    drift = (u * norm_estimate_ + previous_coefficient * drift) / coefficient;
}

void wgkb_step(BidiagState& st, const Matrix& A, const WeightMatrix& M)
{
    if (st.terminated_)
        throw std::logic_error("wgkb_step: bidiagonalization already terminated");
    const Eigen::Index i = st.steps_ + 1;  // producing beta_{i+1}, alpha_{i+1}
    st.reserve(i + 1);

    const double alpha_i = st.alphas_.back();

    Vector r;
    kernels::gemv(A, st.Q_.col(i - 1), r);
    r -= alpha_i * st.P_.col(i - 1);
    if (st.options_.reorth)
        reorthogonalize(st.P_, i, r);
    const double beta = r.norm();
    st.norm_estimate_ = std::max(st.norm_estimate_, std::hypot(alpha_i, beta));
    st.steps_ = i;

    if (beta <= st.break_tol() + st.options_.drift_factor * alpha_i * st.p_drift_) {
        st.betas_.push_back(0.0);
        st.alphas_.push_back(0.0);
        st.P_.col(i).setZero();
        st.Q_.col(i).setZero();
        st.MQ_.col(i).setZero();
        st.terminate_at(i);
        return;
    }
    st.betas_.push_back(beta);
    st.P_.col(i) = r / beta;
    st.update_drift(st.p_drift_, alpha_i, beta);

    Vector s_bar;
    kernels::gemv_t(A, st.P_.col(i), s_bar);
    s_bar -= beta * st.MQ_.col(i - 1);
    Vector s = M.solve(s_bar);
    if (st.options_.reorth)
        m_reorthogonalize(st.Q_, st.MQ_, i, s, s_bar);
    const double alpha = std::sqrt(std::max(0.0, s.dot(s_bar)));
    st.norm_estimate_ = std::max(st.norm_estimate_, std::hypot(beta, alpha));

    if (alpha <= st.break_tol() + st.options_.drift_factor * beta * st.q_drift_) {
        st.alphas_.push_back(0.0);
        st.Q_.col(i).setZero();
        st.MQ_.col(i).setZero();
        st.terminate_at(i);
        return;
    }
    st.alphas_.push_back(alpha);
    st.Q_.col(i) = s / alpha;
    st.MQ_.col(i) = s_bar / alpha;
    st.update_drift(st.q_drift_, beta, alpha);
}

BidiagState wgkb_run(const Matrix& A, const WeightMatrix& M, const Vector& b, Eigen::Index k,
                     BidiagOptions options)
{
    BidiagState st = wgkb_init(A, M, b, options);
    while (st.steps() < k && !st.terminated())
        wgkb_step(st, A, M);
    return st;
}

Matrix project_bidiagonal(const BidiagState& st)
{
    const Eigen::Index k = st.steps();
    Matrix B = Matrix::Zero(k + 1, k);
    for (Eigen::Index i = 1; i <= k; ++i) {
        B(i - 1, i - 1) = st.alpha(i);
        B(i, i - 1) = st.beta(i + 1);
    }
    return B;
}

std::vector<ApproxTriplet> approx_triplets(const BidiagState& st, Eigen::Index count)
{
    const Eigen::Index k = st.steps();
    if (count < 1 || count > k)
        throw std::out_of_range("approx_triplets: count must satisfy 1 <= count <= k");

    const Matrix B = project_bidiagonal(st);
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix Pk1 = st.P(k + 1);
    const Matrix Qk = st.Q(k);
    const double alpha_next = st.alpha(k + 1);

    std::vector<ApproxTriplet> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
        ApproxTriplet t;
        t.sigma_bar = svd.singularValues()[i];
        t.y = svd.matrixU().col(i);
        t.u_bar = Pk1 * t.y;
        t.v_bar = Qk * svd.matrixV().col(i);
        t.residual_bound = std::abs(alpha_next * t.y[k]);
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace mreg
