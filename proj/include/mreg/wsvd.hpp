#ifndef MREG_WSVD_HPP
#define MREG_WSVD_HPP

#include "mreg/weights.hpp"

namespace mreg {

/// Weighted SVD  A = U diag(sigma) V^T M  with U^T U = I and V^T M V = I.
///
/// `U` is the economy left basis (m x min(m,n)), `V` the full n x n
/// M-orthonormal right basis, so columns r..n-1 of V span the null space
/// of A. `sigma` holds only the r retained (strictly positive) values.
struct WsvdFactorization {
    Matrix U;
    Vector sigma;
    Matrix V;
    Eigen::Index rank = 0;
    WeightMatrix weight = WeightMatrix::identity(1);

    Eigen::Index rows() const { return U.rows(); }
    Eigen::Index cols() const { return V.rows(); }
    /// Null-space basis v_{r+1}, ..., v_n.
    Matrix null_space() const { return V.rightCols(V.cols() - rank); }
};

/// Relative rank cutoff: sigma_i > max(m,n) * eps * sigma_1.
double rank_tolerance(Eigen::Index m, Eigen::Index n);

/// Computes the weighted SVD by the factor transform: the standard SVD of
/// A L^{-1} = U S W^T gives V = L^{-1} W. Signs are fixed so the first
/// significant entry of each u_i is positive.
WsvdFactorization wsvd(const Matrix& A, const WeightMatrix& M);

/// ||A||_{M,2} = max ||A x||_2 / ||x||_M  (0 for the zero matrix).
double weighted_operator_norm(const Matrix& A, const WeightMatrix& M);

/// A_k = sum_{i<=k} sigma_i u_i v_i^T M, for 1 <= k < rank.
Matrix low_rank_approx(const WsvdFactorization& f, Eigen::Index k);

/// Minimum-M-norm least squares solution sum_{i<=r} (u_i^T b / sigma_i) v_i.
Vector min_m_norm_ls(const WsvdFactorization& f, const Vector& b);

/// Truncated expansion with the first k terms, 1 <= k <= rank.
Vector twsvd_solution(const WsvdFactorization& f, const Vector& b, Eigen::Index k);

/// Tikhonov solution of min ||A x - b||^2 + lambda ||x||_M^2 via the filtered
/// expansion with factors sigma_i^2 / (sigma_i^2 + lambda).
Vector tikhonov_wsvd(const WsvdFactorization& f, const Vector& b, double lambda);

/// Coefficients u_i^T b for i < rank.
Vector wsvd_coefficients(const WsvdFactorization& f, const Vector& b);

}  // namespace mreg

#endif  // MREG_WSVD_HPP
