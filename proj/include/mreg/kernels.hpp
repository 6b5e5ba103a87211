#ifndef MREG_KERNELS_HPP
#define MREG_KERNELS_HPP

#include <Eigen/Dense>

namespace mreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstVectorRef = Eigen::Ref<const Vector>;

/// Dense kernels behind every matrix-vector product in the Krylov solvers.
///
/// The parallel versions split work into fixed-size chunks so the floating
/// point result does not depend on the thread count. Each output entry is
/// produced by a single thread, so there are no cross-thread reductions.
namespace kernels {

/// y = A x
void gemv(const Matrix& A, const ConstVectorRef& x, Vector& y);

/// x = A^T y
void gemv_t(const Matrix& A, const ConstVectorRef& y, Vector& x);

/// coeffs = B^T v over the leading `cols` columns of B.
void dots(const Matrix& B, Eigen::Index cols, const ConstVectorRef& v, Vector& coeffs);

/// v -= B(:, 0:cols) * coeffs
void subtract_combination(const Matrix& B, Eigen::Index cols, const Vector& coeffs, Vector& v);

/// Plain loop versions of the kernels above. Kept as the reference the
/// parallel kernels are tested and benchmarked against.
namespace serial {
void gemv(const Matrix& A, const ConstVectorRef& x, Vector& y);
void gemv_t(const Matrix& A, const ConstVectorRef& y, Vector& x);
void dots(const Matrix& B, Eigen::Index cols, const ConstVectorRef& v, Vector& coeffs);
void subtract_combination(const Matrix& B, Eigen::Index cols, const Vector& coeffs, Vector& v);
}  // namespace serial

}  // namespace kernels
}  // namespace mreg

#endif  // MREG_KERNELS_HPP
