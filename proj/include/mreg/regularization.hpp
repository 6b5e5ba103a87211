#ifndef MREG_REGULARIZATION_HPP
#define MREG_REGULARIZATION_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mreg/wlsqr.hpp"
#include "mreg/wsvd.hpp"

namespace mreg {

enum class RuleKind { dp, lc, oracle, max_iter };

/// "dp", "lc", "oracle", "maxiter"
RuleKind parse_rule(std::string_view name);
std::string to_string(RuleKind kind);

/// Early stopping rule for subspace projection regularization.
struct StoppingRule {
    RuleKind kind = RuleKind::max_iter;
    /// Discrepancy principle safety factor, > 1.
    double tau = 1.01;
    /// ||e||_2, required by the discrepancy principle.
    double noise_norm = 0.0;
    /// Required by the oracle rule.
    std::optional<Vector> x_true;

    static StoppingRule discrepancy(double noise_norm, double tau = 1.01);
    static StoppingRule lcurve();
    static StoppingRule oracle(Vector x_true);
    static StoppingRule max_iterations();

    /// Throws std::invalid_argument when a required field is missing or out of range.
    void validate() const;
};

struct DpStop {
    Eigen::Index k = 0;
    /// tau ||e|| >= phibar_1: no crossing exists and k = 1 is returned.
    bool degenerate = false;
};

/// phibar[0] = phibar_1 = ||b||, phibar[k] = ||A x_k - b||. Returns the first
/// k >= 1 with phibar_{k+1} <= tau ||e|| < phibar_k, or nothing if the
/// threshold is never reached.
std::optional<DpStop> stop_dp(std::span<const double> phibar, double tau, double noise_norm);

struct LcurveCorner {
    /// Zero-based index into the input point sequence.
    Eigen::Index index = 0;
    /// Signed Menger curvature per input point; NaN where undefined (ends
    /// and points removed as duplicates). Positive means the curve turns
    /// the way an L-curve corner does.
    std::vector<double> curvature;
    /// Largest curvature is not positive, i.e. there is no L-shaped corner.
    bool no_corner = false;
};

/// Maximum-curvature point of a discrete curve given in log-log coordinates
/// in iteration order. Points closer than 1e-12 to the previously kept one are
/// dropped. Throws for fewer than 5 points.
LcurveCorner lcurve_corner(std::span<const double> log_res, std::span<const double> log_norm);

/// Corner of (log ||A x_k - b||, log ||x_k||_M) over k >= 1 of a solver
/// history. Returns the iteration number k (1-based).
struct LcurveStop {
    Eigen::Index k = 0;
    bool no_corner = false;
    LcurveCorner corner;
};
LcurveStop stop_lcurve(const std::vector<IterationRecord>& history);

/// errors[k-1] is the relative error of x_k. Returns the minimizing k,
/// ties toward the smaller k.
Eigen::Index stop_oracle(std::span<const double> errors);

/// Per-run record shared by the iterative methods.
struct RunRecord {
    /// k = 0..K
    std::vector<IterationRecord> iterations;
    /// Same length as iterations when a reference solution was supplied
    /// (entry 0 is 1 for x_0 = 0), otherwise empty.
    std::vector<double> relative_error;
    Eigen::Index stop_k = 0;
    bool degenerate_stop = false;
    bool dp_not_reached = false;
    bool no_corner = false;
    bool complete = false;
    double wall_ms = 0.0;
};

struct SprOptions {
    bool reorth = true;
    /// Used only to fill RunRecord::relative_error.
    std::optional<Vector> reference;
};

struct SprResult {
    Vector solution;
    RunRecord record;
};

/// WLSQR with early stopping. The discrepancy principle stops the loop at the
/// first crossing; L-curve and oracle run to max_iter (or termination) and
/// pick the iterate retrospectively.
SprResult spr_solve(const Matrix& A, const WeightMatrix& M, const Vector& b, const StoppingRule& rule,
                    Eigen::Index max_iter, const SprOptions& options = {});

/// Standard LSQR (identity weight) with the same stopping rules; the
/// recorded solution norms are 2-norms.
SprResult lsqr_baseline(const Matrix& A, const Vector& b, const StoppingRule& rule, Eigen::Index max_iter,
                        const SprOptions& options = {});

/// Truncated WSVD path x_1..x_K treated as an iteration, with the same rules.
SprResult twsvd_solve(const WsvdFactorization& f, const Matrix& A, const Vector& b, const StoppingRule& rule,
                      Eigen::Index max_terms, const SprOptions& options = {});

struct TikhonovOptimum {
    double lambda = 0.0;
    Vector solution;
    double relative_error = 0.0;
};

/// Minimizes ||x_lambda - x_true||_2 / ||x_true||_2 by golden-section search
/// on log(lambda) over [1e-16 sigma_1^2, sigma_1^2], to 1e-3 relative in lambda.
TikhonovOptimum tikhonov_opt(const WsvdFactorization& f, const Vector& b, const Vector& x_true);

/// Relative error ||x - x_true||_2 / ||x_true||_2.
double relative_error(const Vector& x, const Vector& x_true);

}  // namespace mreg

#endif  // MREG_REGULARIZATION_HPP
