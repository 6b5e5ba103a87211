#include "mreg/weights.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

namespace mreg {

namespace {

std::string pivot_message(Eigen::Index pivot, double value)
{
    std::ostringstream os;
    os << "weight matrix is not positive definite: pivot " << pivot << " is " << value;
    return os.str();
}

// Lower-triangular L with M = L^T L. Runs a left-looking Cholesky on the
// index-reversed matrix J M J = G G^T and returns L = J G^T J. Failing pivots
// are reported in the original indexing.
Matrix reversed_cholesky(const Matrix& M)
{
    const Eigen::Index n = M.rows();
    const Matrix R = M.reverse();  // J M J
    Matrix G = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = R(j, j) - G.row(j).head(j).squaredNorm();
        if (!(d > 0.0) || !std::isfinite(d))
            throw NotPositiveDefinite(n - 1 - j, d);
        const double gjj = std::sqrt(d);
        G(j, j) = gjj;
        const Eigen::Index rest = n - j - 1;
        if (rest > 0) {
            G.col(j).tail(rest) = (R.col(j).tail(rest) - G.bottomLeftCorner(rest, j) * G.row(j).head(j).transpose()) / gjj;
        }
    }
    return G.transpose().reverse();
}

}  // namespace

NotPositiveDefinite::NotPositiveDefinite(Eigen::Index pivot, double value)
    : std::runtime_error(pivot_message(pivot, value)), pivot_(pivot)
{
}

struct WeightMatrix::State {
    Vector diag;    // diagonal kind: the weights; dense kind: unused
    Vector sqrt_diag;
    Matrix dense;   // dense kind: symmetric M
    Matrix lower;   // dense kind: factor, filled at construction
    mutable std::once_flag factor_once;
    mutable Matrix factor_cache;  // diagonal kind: materialized on demand
};

WeightMatrix::WeightMatrix(Kind kind, Eigen::Index n, std::shared_ptr<State> state)
    : kind_(kind), n_(n), state_(std::move(state))
{
}

WeightMatrix WeightMatrix::identity(Eigen::Index n)
{
    return diagonal(Vector::Ones(n));
}

WeightMatrix WeightMatrix::diagonal(Vector weights)
{
    if (weights.size() == 0)
        throw std::invalid_argument("weight matrix must have positive order");
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw NotPositiveDefinite(i, weights[i]);
    }
    auto st = std::make_shared<State>();
    st->sqrt_diag = weights.cwiseSqrt();
    st->diag = std::move(weights);
    const Eigen::Index n = st->diag.size();
    return WeightMatrix(Kind::diagonal, n, std::move(st));
}

WeightMatrix WeightMatrix::dense(const Matrix& M)
{
    if (M.rows() != M.cols() || M.rows() == 0)
        throw std::invalid_argument("weight matrix must be square with positive order");
    if (!M.allFinite())
        throw std::invalid_argument("weight matrix has non-finite entries");
    auto st = std::make_shared<State>();
    st->dense = 0.5 * (M + M.transpose());
    st->lower = reversed_cholesky(st->dense);
    return WeightMatrix(Kind::dense, M.rows(), std::move(st));
}

void WeightMatrix::check_dim(Eigen::Index size, const char* what) const
{
    if (size != n_) {
        std::ostringstream os;
        os << what << ": dimension mismatch (expected " << n_ << ", got " << size << ")";
        throw std::invalid_argument(os.str());
    }
}

Vector WeightMatrix::diagonal_entries() const
{
    return is_diagonal() ? state_->diag : Vector(state_->dense.diagonal());
}

Matrix WeightMatrix::to_dense() const
{
    if (is_diagonal())
        return state_->diag.asDiagonal();
    return state_->dense;
}

Vector WeightMatrix::apply(const Vector& x) const
{
    check_dim(x.size(), "apply");
    if (is_diagonal())
        return state_->diag.cwiseProduct(x);
    return state_->dense * x;
}

Matrix WeightMatrix::apply(const Matrix& X) const
{
    check_dim(X.rows(), "apply");
    if (is_diagonal())
        return state_->diag.asDiagonal() * X;
    return state_->dense * X;
}

Vector WeightMatrix::solve(const Vector& v) const
{
    check_dim(v.size(), "solve");
    if (is_diagonal())
        return v.cwiseQuotient(state_->diag);
    // M = L^T L  =>  M^{-1} v = L^{-1} (L^{-T} v)
    const auto& L = state_->lower;
    Vector z = L.triangularView<Eigen::Lower>().transpose().solve(v);
    L.triangularView<Eigen::Lower>().solveInPlace(z);
    return z;
}

Matrix WeightMatrix::solve(const Matrix& V) const
{
    check_dim(V.rows(), "solve");
    if (is_diagonal())
        return state_->diag.cwiseInverse().asDiagonal() * V;
    const auto& L = state_->lower;
    Matrix Z = L.triangularView<Eigen::Lower>().transpose().solve(V);
    L.triangularView<Eigen::Lower>().solveInPlace(Z);
    return Z;
}

Vector WeightMatrix::apply_factor(const Vector& x) const
{
    check_dim(x.size(), "apply_factor");
    if (is_diagonal())
        return state_->sqrt_diag.cwiseProduct(x);
    return state_->lower.triangularView<Eigen::Lower>() * x;
}

Vector WeightMatrix::solve_factor(const Vector& x) const
{
    check_dim(x.size(), "solve_factor");
    if (is_diagonal())
        return x.cwiseQuotient(state_->sqrt_diag);
    return state_->lower.triangularView<Eigen::Lower>().solve(x);
}

Matrix WeightMatrix::solve_factor(const Matrix& X) const
{
    check_dim(X.rows(), "solve_factor");
    if (is_diagonal())
        return state_->sqrt_diag.cwiseInverse().asDiagonal() * X;
    return state_->lower.triangularView<Eigen::Lower>().solve(X);
}

Matrix WeightMatrix::right_solve_factor(const Matrix& A) const
{
    check_dim(A.cols(), "right_solve_factor");
    if (is_diagonal())
        return A * state_->sqrt_diag.cwiseInverse().asDiagonal();
    // C L = A  <=>  L^T C^T = A^T
    Matrix Ct = state_->lower.triangularView<Eigen::Lower>().transpose().solve(A.transpose());
    return Ct.transpose();
}

const Matrix& WeightMatrix::factor() const
{
    if (!is_diagonal())
        return state_->lower;
    std::call_once(state_->factor_once, [this] { state_->factor_cache = state_->sqrt_diag.asDiagonal(); });
    return state_->factor_cache;
}

double WeightMatrix::condition_estimate() const
{
    const Vector d = is_diagonal() ? state_->sqrt_diag : Vector(state_->lower.diagonal());
    const double r = d.maxCoeff() / d.minCoeff();
    return r * r;
}

double m_inner(const WeightMatrix& M, const Vector& x, const Vector& y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("m_inner: dimension mismatch");
    return x.dot(M.apply(y));
}

double m_norm(const WeightMatrix& M, const Vector& x)
{
    return std::sqrt(std::max(0.0, m_inner(M, x, x)));
}

Vector solve_m(const WeightMatrix& M, const Vector& v)
{
    return M.solve(v);
}

const Matrix& factor(const WeightMatrix& M)
{
    return M.factor();
}

}  // namespace mreg
