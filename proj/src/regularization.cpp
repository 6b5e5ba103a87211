#include "mreg/regularization.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Selection {
    Eigen::Index k = 0;
    bool degenerate = false;
    bool dp_not_reached = false;
    bool no_corner = false;
};

// Applies a rule to a completed history. errors[k] is the error of x_k, k >= 0.
Selection select(const StoppingRule& rule, const std::vector<IterationRecord>& history,
                 const std::vector<double>& errors)
{
    Selection sel;
    const auto last = static_cast<Eigen::Index>(history.size()) - 1;
    sel.k = last;
    if (last < 1)
        return sel;

    switch (rule.kind) {
    case RuleKind::dp: {
        std::vector<double> phibar;
        phibar.reserve(history.size());
        for (const auto& r : history)
            phibar.push_back(r.residual_norm);
        if (const auto hit = stop_dp(phibar, rule.tau, rule.noise_norm)) {
            sel.k = hit->k;
            sel.degenerate = hit->degenerate;
        } else {
            sel.dp_not_reached = true;
        }
        break;
    }
    case RuleKind::lc: {
        const auto lc = stop_lcurve(history);
        sel.k = lc.k;
        sel.no_corner = lc.no_corner;
        break;
    }
    case RuleKind::oracle:
        sel.k = stop_oracle(std::span<const double>(errors).subspan(1));
        break;
    case RuleKind::max_iter: break;
    }
    return sel;
}

void apply_selection(RunRecord& rec, const Selection& sel)
{
    rec.stop_k = sel.k;
    rec.degenerate_stop = sel.degenerate;
    rec.dp_not_reached = sel.dp_not_reached;
    rec.no_corner = sel.no_corner;
}

const Vector* reference_of(const StoppingRule& rule, const SprOptions& options)
{
    if (options.reference)
        return &*options.reference;
    if (rule.x_true)
        return &*rule.x_true;
    return nullptr;
}

double elapsed_ms(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

RuleKind parse_rule(std::string_view name)
{
    if (name == "dp")
        return RuleKind::dp;
    if (name == "lc")
        return RuleKind::lc;
    if (name == "oracle")
        return RuleKind::oracle;
    if (name == "maxiter")
        return RuleKind::max_iter;
    throw std::invalid_argument("unknown stopping rule: " + std::string(name));
}

std::string to_string(RuleKind kind)
{
    switch (kind) {
    case RuleKind::dp: return "dp";
    case RuleKind::lc: return "lc";
    case RuleKind::oracle: return "oracle";
    case RuleKind::max_iter: return "maxiter";
    }
    return "unknown";
}

StoppingRule StoppingRule::discrepancy(double noise_norm, double tau)
{
    StoppingRule r;
    r.kind = RuleKind::dp;
    r.noise_norm = noise_norm;
    r.tau = tau;
    return r;
}

StoppingRule StoppingRule::lcurve()
{
    StoppingRule r;
    r.kind = RuleKind::lc;
    return r;
}

StoppingRule StoppingRule::oracle(Vector x_true)
{
    StoppingRule r;
    r.kind = RuleKind::oracle;
    r.x_true = std::move(x_true);
    return r;
}

StoppingRule StoppingRule::max_iterations()
{
    return StoppingRule{};
}

void StoppingRule::validate() const
{
    if (kind == RuleKind::dp) {
        if (!(tau > 1.0))
            throw std::invalid_argument("discrepancy principle needs tau > 1");
        if (!(noise_norm > 0.0))
            throw std::invalid_argument("discrepancy principle needs a positive noise norm");
    }
    if (kind == RuleKind::oracle && !x_true)
        throw std::invalid_argument("oracle stopping needs the true solution");
}

std::optional<DpStop> stop_dp(std::span<const double> phibar, double tau, double noise_norm)
{
    if (phibar.empty())
        return std::nullopt;
    const double threshold = tau * noise_norm;
    if (phibar[0] <= threshold)
        return DpStop{1, true};
    for (std::size_t k = 1; k < phibar.size(); ++k) {
        if (phibar[k] <= threshold && threshold < phibar[k - 1])
            return DpStop{static_cast<Eigen::Index>(k), false};
    }
    return std::nullopt;
}

LcurveCorner lcurve_corner(std::span<const double> log_res, std::span<const double> log_norm)
{
    if (log_res.size() != log_norm.size())
        throw std::invalid_argument("lcurve_corner: coordinate sequences differ in length");
    if (log_res.size() < 5)
        throw std::invalid_argument("L-curve needs at least 5 points");

    const std::size_t n = log_res.size();
    std::vector<std::size_t> kept;
    kept.push_back(0);
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t j = kept.back();
        if (std::hypot(log_res[i] - log_res[j], log_norm[i] - log_norm[j]) >= 1e-12)
            kept.push_back(i);
    }

    LcurveCorner out;
    out.curvature.assign(n, kNaN);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_at = kept.size() > 2 ? kept[1] : kept.front();
    for (std::size_t t = 1; t + 1 < kept.size(); ++t) {
        const std::size_t i0 = kept[t - 1], i1 = kept[t], i2 = kept[t + 1];
        const double ax = log_res[i1] - log_res[i0], ay = log_norm[i1] - log_norm[i0];
        const double bx = log_res[i2] - log_res[i1], by = log_norm[i2] - log_norm[i1];
        const double cx = log_res[i2] - log_res[i0], cy = log_norm[i2] - log_norm[i0];
        const double cross = ax * by - ay * bx;
        const double denom = std::hypot(ax, ay) * std::hypot(bx, by) * std::hypot(cx, cy);
        // Residuals decrease and norms grow along the curve, so the corner is
        // a clockwise turn: negative cross product.
        const double kappa = denom > 0.0 ? -2.0 * cross / denom : 0.0;
        out.curvature[i1] = kappa;
        if (kappa > best) {
            best = kappa;
            best_at = i1;
        }
    }
    out.index = static_cast<Eigen::Index>(best_at);
    out.no_corner = !(best > 1e-8);
    return out;
}

LcurveStop stop_lcurve(const std::vector<IterationRecord>& history)
{
    std::vector<double> xs, ys;
    std::vector<Eigen::Index> ks;
    for (const auto& r : history) {
        if (r.k < 1)
            continue;
        xs.push_back(std::log(r.residual_norm));
        ys.push_back(std::log(r.solution_norm));
        ks.push_back(r.k);
    }
    LcurveStop out;
    out.corner = lcurve_corner(xs, ys);
    out.k = ks[static_cast<std::size_t>(out.corner.index)];
    out.no_corner = out.corner.no_corner;
    return out;
}

Eigen::Index stop_oracle(std::span<const double> errors)
{
    if (errors.empty())
        throw std::invalid_argument("stop_oracle: no errors recorded");
    std::size_t best = 0;
    for (std::size_t i = 1; i < errors.size(); ++i)
        if (errors[i] < errors[best])
            best = i;
    return static_cast<Eigen::Index>(best) + 1;
}

double relative_error(const Vector& x, const Vector& x_true)
{
    const double denom = x_true.norm();
    return denom > 0.0 ? (x - x_true).norm() / denom : (x - x_true).norm();
}

SprResult spr_solve(const Matrix& A, const WeightMatrix& M, const Vector& b, const StoppingRule& rule,
                    Eigen::Index max_iter, const SprOptions& options)
{
    rule.validate();
    const auto start = std::chrono::steady_clock::now();
    const Vector* ref = reference_of(rule, options);

    WlsqrOptions wo;
    wo.bidiag.reorth = options.reorth;
    wo.keep_iterates = rule.kind == RuleKind::lc || rule.kind == RuleKind::oracle;

    std::vector<double> errors;
    if (ref)
        errors.push_back(1.0);
    const double threshold = rule.tau * rule.noise_norm;
    auto callback = [&](const WlsqrState& st) {
        if (ref)
            errors.push_back(relative_error(st.x(), *ref));
        return rule.kind == RuleKind::dp && st.history().back().residual_norm <= threshold;
    };
    const WlsqrState st = wlsqr_run(A, M, b, max_iter, callback, wo);

    SprResult out;
    out.record.iterations = st.history();
    out.record.relative_error = std::move(errors);
    out.record.complete = st.complete();
    apply_selection(out.record, select(rule, st.history(), out.record.relative_error));

    const Eigen::Index k = out.record.stop_k;
    if (k == st.k())
        out.solution = st.x();
    else if (k == 0)
        out.solution = Vector::Zero(A.cols());
    else
        out.solution = st.iterates()[static_cast<std::size_t>(k - 1)];
    out.record.wall_ms = elapsed_ms(start);
    return out;
}

SprResult lsqr_baseline(const Matrix& A, const Vector& b, const StoppingRule& rule, Eigen::Index max_iter,
                        const SprOptions& options)
{
    return spr_solve(A, WeightMatrix::identity(A.cols()), b, rule, max_iter, options);
}

SprResult twsvd_solve(const WsvdFactorization& f, const Matrix& A, const Vector& b, const StoppingRule& rule,
                      Eigen::Index max_terms, const SprOptions& options)
{
    rule.validate();
    if (max_terms < 1)
        throw std::invalid_argument("twsvd_solve: max_terms must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    const Vector* ref = reference_of(rule, options);
    const Eigen::Index K = std::min(max_terms, f.rank);
    const Vector coeff = wsvd_coefficients(f, b);

    SprResult out;
    RunRecord& rec = out.record;
    rec.iterations.push_back({0, b.norm(), 0.0});
    if (ref)
        rec.relative_error.push_back(1.0);

    std::vector<Vector> iterates;
    Vector x = Vector::Zero(A.cols());
    for (Eigen::Index k = 1; k <= K; ++k) {
        x += (coeff[k - 1] / f.sigma[k - 1]) * f.V.col(k - 1);
        rec.iterations.push_back({k, (A * x - b).norm(), m_norm(f.weight, x)});
        if (ref)
            rec.relative_error.push_back(relative_error(x, *ref));
        iterates.push_back(x);
    }
    rec.complete = K == f.rank;
    apply_selection(rec, select(rule, rec.iterations, rec.relative_error));
    out.solution = rec.stop_k > 0 ? iterates[static_cast<std::size_t>(rec.stop_k - 1)] : Vector::Zero(A.cols());
    rec.wall_ms = elapsed_ms(start);
    return out;
}

TikhonovOptimum tikhonov_opt(const WsvdFactorization& f, const Vector& b, const Vector& x_true)
{
    if (x_true.size() != f.cols())
        throw std::invalid_argument("tikhonov_opt: true solution has wrong length");
    TikhonovOptimum best;
    if (f.rank == 0) {
        best.solution = Vector::Zero(f.cols());
        best.relative_error = relative_error(best.solution, x_true);
        return best;
    }

    const Vector c = wsvd_coefficients(f, b);
    const auto Vr = f.V.leftCols(f.rank);
    const auto s = f.sigma.array();
    auto solve_at = [&](double log_lambda) -> Vector {
        const double lambda = std::exp(log_lambda);
        return Vr * (s * c.array() / (s.square() + lambda)).matrix();
    };
    auto error_at = [&](double log_lambda) { return relative_error(solve_at(log_lambda), x_true); };

    const double s1sq = f.sigma[0] * f.sigma[0];
    double lo = std::log(1e-16 * s1sq);
    double hi = std::log(s1sq);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = hi - golden * (hi - lo);
    double c2 = lo + golden * (hi - lo);
    double e1 = error_at(c1);
    double e2 = error_at(c2);
    const double width = std::log(1.001);
    while (hi - lo > width) {
        if (e1 <= e2) {
            hi = c2;
            c2 = c1;
            e2 = e1;
            c1 = hi - golden * (hi - lo);
            e1 = error_at(c1);
        } else {
            lo = c1;
            c1 = c2;
            e1 = e2;
            c2 = lo + golden * (hi - lo);
            e2 = error_at(c2);
        }
    }
    const double at = e1 <= e2 ? c1 : c2;
    best.lambda = std::exp(at);
    best.solution = solve_at(at);
    best.relative_error = relative_error(best.solution, x_true);
    return best;
}

}  // namespace mreg
