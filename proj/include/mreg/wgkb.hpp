#ifndef MREG_WGKB_HPP
#define MREG_WGKB_HPP

#include <vector>

#include "mreg/weights.hpp"

namespace mreg {

struct BidiagOptions {
    /// Full reorthogonalization of both bases (two Gram-Schmidt passes).
    bool reorth = true;
    /// Breakdown threshold relative to the running estimate of ||B_k||.
    double break_factor = 1e-14;
    /// Multiplier on the propagated rounding estimate of the basis vectors.
    /// A new coefficient below drift_factor * (rounding carried into it by
    /// the recurrence) is treated as breakdown: the vector it would
    /// normalize is noise rather than a new Krylov direction.
    double drift_factor = 100.0;
};

/// State of the weighted Golub-Kahan bidiagonalization after k steps.
///
/// Holds alpha_1..alpha_{k+1}, beta_1..beta_{k+1}, the 2-orthonormal left
/// vectors p_1..p_{k+1} and the M-orthonormal right vectors q_1..q_{k+1}.
/// On breakdown at step k the trailing coefficient is stored as an exact zero
/// and the matching basis vector is zero.
class BidiagState {
public:
    Eigen::Index steps() const { return steps_; }
    bool terminated() const { return terminated_; }
    /// k_t: the last step with alpha_i beta_i > 0 (meaningful when terminated).
    Eigen::Index termination_step() const { return termination_step_; }
    bool reorth() const { return options_.reorth; }

    /// alpha_i, beta_i with the 1-based indexing of the recursion.
    double alpha(Eigen::Index i) const { return alphas_.at(static_cast<std::size_t>(i - 1)); }
    double beta(Eigen::Index i) const { return betas_.at(static_cast<std::size_t>(i - 1)); }
    const std::vector<double>& alphas() const { return alphas_; }
    const std::vector<double>& betas() const { return betas_; }

    /// p_i, q_i, M q_i, 1-based.
    Eigen::Ref<const Vector> p(Eigen::Index i) const { return P_.col(i - 1); }
    Eigen::Ref<const Vector> q(Eigen::Index i) const { return Q_.col(i - 1); }
    Eigen::Ref<const Vector> mq(Eigen::Index i) const { return MQ_.col(i - 1); }

    /// P_{cols} and Q_{cols}: the leading `cols` basis vectors.
    Matrix P(Eigen::Index cols) const { return P_.leftCols(cols); }
    Matrix Q(Eigen::Index cols) const { return Q_.leftCols(cols); }

    /// Running estimate of ||B_k||_2 used for the breakdown test.
    double norm_estimate() const { return norm_estimate_; }

private:
    friend BidiagState wgkb_init(const Matrix&, const WeightMatrix&, const Vector&, BidiagOptions);
    friend void wgkb_step(BidiagState&, const Matrix&, const WeightMatrix&);

    void reserve(Eigen::Index cols);
    double break_tol() const { return options_.break_factor * norm_estimate_; }
    void update_drift(double& drift, double previous_coefficient, double coefficient) const;
    void terminate_at(Eigen::Index k);

    BidiagOptions options_;
    Eigen::Index steps_ = 0;
    bool terminated_ = false;
    Eigen::Index termination_step_ = 0;
    double norm_estimate_ = 0.0;
    // Estimated norms of the rounding components of the newest p and q that
    // lie outside the exact Krylov spaces.
    double p_drift_ = 0.0;
    double q_drift_ = 0.0;
    std::vector<double> alphas_;
    std::vector<double> betas_;
    Matrix P_;
    Matrix Q_;
    Matrix MQ_;
};

/// beta_1 p_1 = b,  alpha_1 q_1 = M^{-1} A^T p_1. Throws for b = 0. If
/// A^T b = 0 the state is returned terminated with k_t = 0.
BidiagState wgkb_init(const Matrix& A, const WeightMatrix& M, const Vector& b, BidiagOptions options = {});

/// One step of the recursion:
///   beta_{i+1} p_{i+1}  = A q_i - alpha_i p_i
///   alpha_{i+1} q_{i+1} = M^{-1} (A^T p_{i+1} - beta_{i+1} M q_i)
/// Throws std::logic_error if the state is already terminated.
void wgkb_step(BidiagState& state, const Matrix& A, const WeightMatrix& M);

/// Initializes and runs up to k steps (fewer on breakdown).
BidiagState wgkb_run(const Matrix& A, const WeightMatrix& M, const Vector& b, Eigen::Index k,
                     BidiagOptions options = {});

/// The (k+1) x k lower bidiagonal projection B_k for k = state.steps().
Matrix project_bidiagonal(const BidiagState& state);

/// Approximate WSVD triplet from the SVD of B_k.
struct ApproxTriplet {
    double sigma_bar = 0.0;
    Vector u_bar;
    Vector v_bar;
    /// |alpha_{k+1} e_{k+1}^T y_i|
    double residual_bound = 0.0;
    /// Left singular vector y_i of B_k, length k+1.
    Vector y;
};

/// The `count` largest approximate triplets, in decreasing sigma_bar order.
std::vector<ApproxTriplet> approx_triplets(const BidiagState& state, Eigen::Index count);

}  // namespace mreg

#endif  // MREG_WGKB_HPP
