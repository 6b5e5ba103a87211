#ifndef MREG_WLSQR_HPP
#define MREG_WLSQR_HPP

#include <functional>
#include <vector>

#include "mreg/wgkb.hpp"

namespace mreg {

/// One entry of the solver history. Entry k holds ||A x_k - b||_2 (the
/// recurrence value phibar_{k+1}) and ||x_k||_M. Entry 0 is x_0 = 0.
struct IterationRecord {
    Eigen::Index k = 0;
    double residual_norm = 0.0;
    double solution_norm = 0.0;
};

struct WlsqrOptions {
    BidiagOptions bidiag{};
    /// Retain every iterate x_1..x_k (needed for retrospective stopping rules).
    bool keep_iterates = false;
};

/// Running state of the weighted LSQR recursion.
class WlsqrState {
public:
    const Vector& x() const { return x_; }
    const Vector& w() const { return w_; }
    double phibar() const { return phibar_; }
    double rhobar() const { return rhobar_; }
    Eigen::Index k() const { return k_; }
    /// True once the bidiagonalization has terminated; x() is then the
    /// minimum-M-norm least squares solution.
    bool complete() const { return complete_; }

    const std::vector<IterationRecord>& history() const { return history_; }
    /// x_1..x_k when keep_iterates is set; iterates()[k-1] is x_k.
    const std::vector<Vector>& iterates() const { return iterates_; }
    const BidiagState& bidiag() const { return bidiag_; }

private:
    friend WlsqrState wlsqr_init(const Matrix&, const WeightMatrix&, const Vector&, WlsqrOptions);
    friend void wlsqr_step(WlsqrState&, const Matrix&, const WeightMatrix&);

    BidiagState bidiag_;
    bool keep_iterates_ = false;
    Vector x_;
    Vector w_;
    double phibar_ = 0.0;
    double rhobar_ = 0.0;
    Eigen::Index k_ = 0;
    bool complete_ = false;
    std::vector<IterationRecord> history_;
    std::vector<Vector> iterates_;
};

/// x_0 = 0, w_1 = q_1, phibar_1 = beta_1, rhobar_1 = alpha_1. Throws for b = 0.
WlsqrState wlsqr_init(const Matrix& A, const WeightMatrix& M, const Vector& b, WlsqrOptions options = {});

/// One bidiagonalization step followed by one Givens rotation:
///   rho_i = hypot(rhobar_i, beta_{i+1}),  c_i = rhobar_i/rho_i,  s_i = beta_{i+1}/rho_i
///   theta_{i+1} = s_i alpha_{i+1},  rhobar_{i+1} = -c_i alpha_{i+1}
///   phi_i = c_i phibar_i,  phibar_{i+1} = s_i phibar_i
///   x_i = x_{i-1} + (phi_i/rho_i) w_i,  w_{i+1} = q_{i+1} - (theta_{i+1}/rho_i) w_i
/// Throws std::logic_error when called on a complete state.
void wlsqr_step(WlsqrState& state, const Matrix& A, const WeightMatrix& M);

/// Called after every step with the updated state; return true to stop.
using IterationCallback = std::function<bool(const WlsqrState&)>;

/// Iterates until completion, max_iter steps, or the callback asks to stop.
WlsqrState wlsqr_run(const Matrix& A, const WeightMatrix& M, const Vector& b, Eigen::Index max_iter,
                     const IterationCallback& callback = {}, WlsqrOptions options = {});

/// min(m, n, 200)
Eigen::Index default_max_iter(Eigen::Index m, Eigen::Index n);

}  // namespace mreg

#endif  // MREG_WLSQR_HPP
