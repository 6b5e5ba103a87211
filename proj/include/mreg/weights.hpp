#ifndef MREG_WEIGHTS_HPP
#define MREG_WEIGHTS_HPP

#include <memory>
#include <stdexcept>
#include <string>

#include "mreg/kernels.hpp"

namespace mreg {

/// Raised when a weight matrix fails the positive definiteness check.
/// `pivot()` is the zero-based row/column of the failing pivot.
class NotPositiveDefinite : public std::runtime_error {
public:
    NotPositiveDefinite(Eigen::Index pivot, double value);
    Eigen::Index pivot() const { return pivot_; }

private:
    Eigen::Index pivot_;
};

/// Symmetric positive definite weight matrix M defining the inner product
/// <x, y>_M = x^T M y on R^n.
///
/// Two storage kinds: a diagonal fast path (quadrature weights) and a dense
/// SPD matrix. Instances are immutable and cheap to copy; copies share the
/// cached factor.
///
/// The triangular factor L is lower triangular with M = L^T L, so that
/// ||x||_M = ||L x||_2. For a dense M this is computed as an ordinary
/// Cholesky factorization of the index-reversed matrix.
class WeightMatrix {
public:
    enum class Kind { diagonal, dense };

    static WeightMatrix identity(Eigen::Index n);
    /// Throws NotPositiveDefinite if any entry is <= 0.
    static WeightMatrix diagonal(Vector weights);
    /// Symmetrizes (M + M^T)/2 and factors eagerly. Throws NotPositiveDefinite.
    static WeightMatrix dense(const Matrix& M);

    Kind kind() const { return kind_; }
    bool is_diagonal() const { return kind_ == Kind::diagonal; }
    Eigen::Index order() const { return n_; }

    /// Diagonal entries; for the dense kind this is diag(M).
    Vector diagonal_entries() const;
    Matrix to_dense() const;

    /// M x
    Vector apply(const Vector& x) const;
    Matrix apply(const Matrix& X) const;
    /// M^{-1} v
    Vector solve(const Vector& v) const;
    Matrix solve(const Matrix& V) const;
    /// L x
    Vector apply_factor(const Vector& x) const;
    /// L^{-1} x
    Vector solve_factor(const Vector& x) const;
    Matrix solve_factor(const Matrix& X) const;
    /// A L^{-1} for an m x n matrix A.
    Matrix right_solve_factor(const Matrix& A) const;

    /// Lower-triangular L with M = L^T L. Materialized once and cached;
    /// safe under concurrent first access.
    const Matrix& factor() const;

    /// Condition number estimate from the factor diagonal, squared.
    double condition_estimate() const;
    /// True when condition_estimate() > 1e12. Not an error.
    bool near_singular() const { return condition_estimate() > 1e12; }

private:
    struct State;
    WeightMatrix(Kind kind, Eigen::Index n, std::shared_ptr<State> state);

    void check_dim(Eigen::Index size, const char* what) const;

    Kind kind_;
    Eigen::Index n_;
    std::shared_ptr<State> state_;
};

double m_inner(const WeightMatrix& M, const Vector& x, const Vector& y);
double m_norm(const WeightMatrix& M, const Vector& x);
Vector solve_m(const WeightMatrix& M, const Vector& v);
const Matrix& factor(const WeightMatrix& M);

}  // namespace mreg

#endif  // MREG_WEIGHTS_HPP
