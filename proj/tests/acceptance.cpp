// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "mreg/problems.hpp"
#include "mreg/regularization.hpp"
#include "mreg/wgkb.hpp"
#include "mreg/wlsqr.hpp"
#include "mreg/wsvd.hpp"
#include "test_support.hpp"

namespace {

using namespace mreg;
using mreg::testing::max_abs;
using mreg::testing::random_matrix;
using mreg::testing::random_spd;
using mreg::testing::random_vector;
using mreg::testing::rel_diff;
using mreg::testing::weighted_norm_oracle;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

WeightMatrix random_weight(std::mt19937_64& gen, Eigen::Index n, bool dense)
{
    std::uniform_real_distribution<double> u(0.0, 4.0);
    const double cond = std::pow(10.0, u(gen));
    return dense ? WeightMatrix::dense(random_spd(gen, n, cond))
                 : WeightMatrix::diagonal(mreg::testing::random_weights(gen, n, cond));
}

TestProblem desk_problem(ProblemName name, Eigen::Index n)
{
    const auto [m, nn] = scaled_dims(name, n);
    return build_problem(name, m, nn);
}

// 1. Factorization invariants on random instances.
Outcome wsvd_suite()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(1001);
    std::uniform_int_distribution<int> dim(1, 100);
    double worst = 0.0;
    bool ordered = true;
    for (int trial = 0; trial < 200; ++trial) {
        const int m = dim(gen), n = dim(gen);
        const Matrix A = random_matrix(gen, m, n);
        const auto M = random_weight(gen, n, trial % 2 == 0);
        const auto r = mreg::testing::wsvd_residuals(A, wsvd(A, M));
        worst = std::max({worst, r.u_orth, r.v_orth, r.av_us, r.reassembly});
        ordered = ordered && r.sigma_ok;
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-10 && ordered && secs < 30.0,
            fmt("200 instances, worst invariant residual %.2e, sigma ordered=%d, %.1f s", worst, ordered, secs)};
}

// 2. Identity weight reproduces a standard SVD.
Outcome reduction_to_svd()
{
    std::mt19937_64 gen(1002);
    std::uniform_int_distribution<int> dim(1, 60);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix A = random_matrix(gen, dim(gen), dim(gen));
        const auto f = wsvd(A, WeightMatrix::identity(A.cols()));
        Eigen::JacobiSVD<Matrix> ref(A);
        const Vector& s = ref.singularValues();
        if (f.rank != s.size())
            return {false, fmt("rank %ld differs from reference count %ld", long(f.rank), long(s.size()))};
        for (Eigen::Index i = 0; i < s.size(); ++i)
            worst = std::max(worst, std::abs(f.sigma[i] - s[i]) / s[i]);
    }
    return {worst <= 1e-12, fmt("50 matrices, worst per-value relative difference %.2e", worst)};
}

// 3. Weighted Eckart-Young: attained value and sampled lower bound.
Outcome eckart_young()
{
    std::mt19937_64 gen(1003);
    double worst_attained = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 3; ++k) {
        for (int inst = 0; inst < 20; ++inst) {
            const Matrix A = random_matrix(gen, 10, 8);
            const Matrix Md = random_spd(gen, 8, 1e3);
            const auto M = WeightMatrix::dense(Md);
            const auto f = wsvd(A, M);
            const Matrix Ak = low_rank_approx(f, k);
            const double attained = weighted_norm_oracle(A - Ak, Md);
            worst_attained = std::max(worst_attained, std::abs(attained - f.sigma[k]) / f.sigma[k]);
            for (int trial = 0; trial < 1000; ++trial) {
                Matrix X = random_matrix(gen, 10, k) * random_matrix(gen, k, 8);
                if (trial % 2 == 1) {
                    // Competitors near the optimum: rank-k truncation of a perturbed A_k.
                    X = low_rank_approx(wsvd(Ak + 1e-3 * X / max_abs(X), M), k);
                }
                worst_margin = std::min(worst_margin, weighted_norm_oracle(A - X, Md) - f.sigma[k]);
            }
        }
    }
    return {worst_attained <= 1e-10 && worst_margin >= -1e-12,
            fmt("worst attained relative gap %.2e, smallest competitor margin %.3e", worst_attained, worst_margin)};
}

// 4. Optimality conditions of the minimum-M-norm least squares solution.
Outcome min_norm_optimality()
{
    std::mt19937_64 gen(1004);
    std::uniform_int_distribution<int> dim(4, 40);
    double worst_normal = 0.0, worst_orth = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const int m = dim(gen), n = dim(gen);
        const int r = std::max(1, std::min(m, n) / 2);
        const Matrix A = mreg::testing::random_rank(gen, m, n, r);
        const auto M = random_weight(gen, n, trial % 2 == 0);
        const Vector b = random_vector(gen, m);
        const auto f = wsvd(A, M);
        if (f.rank != r)
            return {false, fmt("computed rank %ld, constructed %d", long(f.rank), r)};
        const Vector x = min_m_norm_ls(f, b);
        const double scale = f.sigma[0] * b.norm();
        worst_normal = std::max(worst_normal, (A.transpose() * (A * x - b)).norm() / (f.sigma[0] * scale));
        const Matrix N = f.null_space();
        for (Eigen::Index j = 0; j < N.cols(); ++j)
            worst_orth = std::max(worst_orth, std::abs(m_inner(M, N.col(j), x)) / m_norm(M, x));
    }
    return {worst_normal <= 1e-10 && worst_orth <= 1e-10,
            fmt("40 rank-deficient instances, normal-equation residual %.2e, M-orthogonality %.2e", worst_normal,
                worst_orth)};
}

// 5. Bidiagonalization relations on phillips.
Outcome wgkb_relations()
{
    const auto p = desk_problem(ProblemName::phillips, 501);
    const auto d = add_noise(p, 1e-3, 1);
    const auto st = wgkb_run(p.A, p.M, d.b, 30);
    const Eigen::Index k = st.steps();
    const double s1 = weighted_operator_norm(p.A, p.M);
    const Matrix B = project_bidiagonal(st);
    const Matrix P = st.P(k + 1), Q = st.Q(k + 1);
    const double gkb1 = max_abs(p.A * Q.leftCols(k) - P * B);
    Matrix rhs = Q.leftCols(k) * B.transpose();
    rhs.col(k) += st.alpha(k + 1) * Q.col(k);
    const double gkb2 = max_abs(p.M.solve(Matrix(p.A.transpose() * P)) - rhs);
    return {k == 30 && gkb1 <= 1e-10 * s1 && gkb2 <= 1e-10 * s1,
            fmt("phillips %ldx%ld, %ld steps, residuals %.2e / %.2e (x sigma_1 = %.3g)", long(p.m), long(p.n),
                long(k), gkb1 / s1, gkb2 / s1, s1)};
}

// 6. Second residual relation of the approximate triplets.
Outcome triplet_identity()
{
    bool pass = true;
    std::string detail;
    for (auto name : kAllProblems) {
        const auto p = desk_problem(name, 501);
        const auto d = add_noise(p, 1e-3, 1);
        const auto st = wgkb_run(p.A, p.M, d.b, 20);
        const Eigen::Index k = st.steps();
        const auto tr = approx_triplets(st, std::min<Eigen::Index>(5, k));
        const Vector Mq = p.M.apply(Vector(st.q(k + 1)));
        double worst = 0.0;
        for (const auto& t : tr) {
            const Vector r = p.A.transpose() * t.u_bar - t.sigma_bar * p.M.apply(t.v_bar)
                             - st.alpha(k + 1) * t.y[k] * Mq;
            worst = std::max(worst, r.norm() / tr[0].sigma_bar);
        }
        pass = pass && worst <= 1e-10;
        detail += fmt("%s k=%ld %.1e; ", to_string(name).c_str(), long(k), worst);
    }
    return {pass, detail};
}

// 7. Weighted iterates equal back-transformed standard LSQR iterates.
Outcome cholesky_equivalence()
{
    bool pass = true;
    std::string detail;
    for (auto name : kAllProblems) {
        const auto p = desk_problem(name, 501);
        const auto d = add_noise(p, 1e-3, 1);
        WlsqrOptions keep;
        keep.keep_iterates = true;
        const auto w = wlsqr_run(p.A, p.M, d.b, 20, {}, keep);
        const Matrix C = p.M.right_solve_factor(p.A);
        const auto s = wlsqr_run(C, WeightMatrix::identity(p.n), d.b, 20, {}, keep);
        const std::size_t K = std::min(w.iterates().size(), s.iterates().size());
        double worst = 0.0;
        long first_bad = 0;
        for (std::size_t k = 0; k < K; ++k) {
            const double diff = rel_diff(w.iterates()[k], p.M.solve_factor(s.iterates()[k]));
            worst = std::max(worst, diff);
            if (diff > 1e-8 && first_bad == 0)
                first_bad = static_cast<long>(k + 1);
        }
        pass = pass && worst <= 1e-8 && K > 0;
        detail += fmt("%s k=1..%zu max %.1e", to_string(name).c_str(), K, worst);
        detail += first_bad ? fmt(" (exceeds from k=%ld); ", first_bad) : std::string("; ");
    }
    return {pass, detail};
}

// 8. Exact solution at termination on a rank-deficient system.
Outcome termination_exactness()
{
    std::mt19937_64 gen(1008);
    const Matrix A = mreg::testing::random_rank(gen, 60, 40, 17);
    const auto M = WeightMatrix::dense(random_spd(gen, 40, 1e3));
    const Vector b = random_vector(gen, 60);
    const auto st = wlsqr_run(A, M, b, 200);
    const double diff = rel_diff(st.x(), min_m_norm_ls(wsvd(A, M), b));
    return {st.complete() && diff <= 1e-8,
            fmt("rank 17, terminated=%d at k_t=%ld, relative difference %.2e", st.complete(),
                long(st.bidiag().termination_step()), diff)};
}

// 9. Filtered expansion against the regularized normal equations.
Outcome tikhonov_normal_equations()
{
    std::mt19937_64 gen(1009);
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
        const Matrix A = random_matrix(gen, 40, 30);
        const Matrix Md = random_spd(gen, 30, 1e3);
        const auto f = wsvd(A, WeightMatrix::dense(Md));
        const Vector b = random_vector(gen, 40);
        for (int j = 0; j <= 8; ++j) {
            const double lambda = f.sigma[0] * f.sigma[0] * std::pow(10.0, -j);
            const Vector x = tikhonov_wsvd(f, b, lambda);
            const Vector ref = (A.transpose() * A + lambda * Md).llt().solve(A.transpose() * b);
            worst = std::max(worst, rel_diff(x, ref));
        }
    }
    return {worst <= 1e-8, fmt("5 instances x 9 values of lambda, worst relative difference %.2e", worst)};
}

// 10. Desk-scale reproduction of the method comparison at eps = 1e-3.
Outcome method_comparison()
{
    const double published_err[4] = {0.031, 0.0057, 0.0037, 0.0029};
    const long published_dp[4] = {7, 8, 2, 5};
    bool pass = true;
    std::string detail;
    for (std::size_t pi = 0; pi < kAllProblems.size(); ++pi) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto p = desk_problem(kAllProblems[pi], 1001);
        std::vector<double> wl, ls;
        long dp_min = 1 << 30, dp_max = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto d = add_noise(p, 1e-3, seed);
            wl.push_back(relative_error(spr_solve(p.A, p.M, d.b, StoppingRule::oracle(p.x_true), 200).solution,
                                        p.x_true));
            ls.push_back(relative_error(lsqr_baseline(p.A, d.b, StoppingRule::oracle(p.x_true), 200).solution,
                                        p.x_true));
            const long k = spr_solve(p.A, p.M, d.b, StoppingRule::discrepancy(d.e.norm()), 200).record.stop_k;
            dp_min = std::min(dp_min, k);
            dp_max = std::max(dp_max, k);
        }
        const double secs = seconds_since(t0);
        const double mw = median(wl), ml = median(ls);
        const bool ok = mw <= 3.0 * published_err[pi] && ml >= 0.1 && dp_min >= published_dp[pi] - 5
                        && dp_max <= published_dp[pi] + 5 && secs < 30.0;
        pass = pass && ok;
        detail += fmt("%s wlsqr %.4f (<=%.4f) lsqr %.3f dp k in [%ld,%ld] %.1fs; ",
                      to_string(kAllProblems[pi]).c_str(), mw, 3.0 * published_err[pi], ml, dp_min, dp_max, secs);
    }
    return {pass, detail};
}

// 11. Semi-convergence at eps = 1e-2.
Outcome semi_convergence()
{
    bool pass = true;
    std::string detail;
    for (auto name : kAllProblems) {
        const auto p = desk_problem(name, 1001);
        const auto d = add_noise(p, 1e-2, 1);
        const auto r = spr_solve(p.A, p.M, d.b, StoppingRule::oracle(p.x_true), 200);
        const auto& err = r.record.relative_error;
        const auto k = static_cast<std::size_t>(r.record.stop_k);
        // Past termination every later iterate equals the final one.
        const std::size_t later = std::min(k + 20, err.size() - 1);
        const bool ok = k > 1 && k < 60 && err[later] >= 1.2 * err[k];
        pass = pass && ok;
        detail += fmt("%s k*=%zu err %.3g -> %.3g at k=%zu; ", to_string(name).c_str(), k, err[k], err[later], later);
    }
    return {pass, detail};
}

// 12. Convergence as the noise level decreases.
Outcome noise_sweep()
{
    const double levels[6] = {3.2e-2, 1.6e-2, 8e-3, 4e-3, 2e-3, 1e-3};
    bool pass = true;
    std::string detail;
    for (auto name : kAllProblems) {
        const auto p = desk_problem(name, 1001);
        std::vector<double> wl, ls;
        for (double eps : levels) {
            const auto d = add_noise(p, eps, 1);
            wl.push_back(relative_error(spr_solve(p.A, p.M, d.b, StoppingRule::oracle(p.x_true), 200).solution,
                                        p.x_true));
            ls.push_back(relative_error(lsqr_baseline(p.A, d.b, StoppingRule::oracle(p.x_true), 200).solution,
                                        p.x_true));
        }
        int inversions = 0;
        for (std::size_t i = 1; i < wl.size(); ++i)
            inversions += wl[i] > wl[i - 1];
        const double spread = *std::max_element(ls.begin(), ls.end()) / *std::min_element(ls.begin(), ls.end());
        pass = pass && inversions <= 1 && spread < 1.2;
        detail += fmt("%s wlsqr %.4f..%.4f (%d inversions) lsqr spread %.3f; ", to_string(name).c_str(), wl.front(),
                      wl.back(), inversions, spread);
    }
    return {pass, detail};
}

// 13. Simpson quadrature.
Outcome quadrature()
{
    double worst = 0.0;
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{-6.0, 6.0}, std::pair{-1.5, 2.5}}) {
        for (Eigen::Index n : {3, 5, 101, 2001}) {
            const Vector w = simpson_weights(n, a, b);
            const Vector t = uniform_grid(n, a, b);
            for (int deg = 0; deg <= 3; ++deg) {
                const double exact = (std::pow(b, deg + 1) - std::pow(a, deg + 1)) / (deg + 1);
                const double approx = w.dot(t.array().pow(deg).matrix());
                const double scale = std::max(std::abs(exact), std::pow(std::max(std::abs(a), std::abs(b)), deg + 1));
                worst = std::max(worst, std::abs(approx - exact) / scale);
            }
        }
    }
    constexpr double pi = std::numbers::pi;
    const Vector w = simpson_weights(2001, -pi / 2, pi / 2);
    const Vector t = uniform_grid(2001, -pi / 2, pi / 2);
    const double cos_err = std::abs(w.dot(t.array().cos().matrix()) - 2.0);
    return {worst < 1e-12 && cos_err <= 1e-10, fmt("cubic error %.2e, cosine integral error %.2e", worst, cos_err)};
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"wsvd factorization suite", wsvd_suite},
        {"reduction to standard SVD", reduction_to_svd},
        {"weighted Eckart-Young", eckart_young},
        {"minimum M-norm optimality", min_norm_optimality},
        {"bidiagonalization relations", wgkb_relations},
        {"approximate triplet residual identity", triplet_identity},
        {"Cholesky-transform equivalence", cholesky_equivalence},
        {"exact solution at termination", termination_exactness},
        {"Tikhonov normal equations", tikhonov_normal_equations},
        {"method comparison at eps=1e-3", method_comparison},
        {"semi-convergence at eps=1e-2", semi_convergence},
        {"noise sweep convergence", noise_sweep},
        {"Simpson quadrature", quadrature},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
