#include "mreg/problems.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "mreg/wsvd.hpp"

namespace mreg {

namespace {

constexpr double kPi = std::numbers::pi;

double phillips_phi(double x)
{
    return std::abs(x) < 3.0 ? 1.0 + std::cos(kPi * x / 3.0) : 0.0;
}

void require_odd(Eigen::Index n)
{
    if (n < 3 || n % 2 == 0) {
        std::ostringstream os;
        os << "number of quadrature nodes must be odd and at least 3, got " << n;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

ProblemName parse_problem_name(std::string_view name)
{
    if (name == "shaw")
        return ProblemName::shaw;
    if (name == "phillips")
        return ProblemName::phillips;
    if (name == "expst")
        return ProblemName::expst;
    if (name == "green")
        return ProblemName::green;
    throw std::invalid_argument("unknown problem name: " + std::string(name));
}

std::string to_string(ProblemName name)
{
    switch (name) {
    case ProblemName::shaw: return "shaw";
    case ProblemName::phillips: return "phillips";
    case ProblemName::expst: return "expst";
    case ProblemName::green: return "green";
    }
    return "unknown";
}

Domain problem_domain(ProblemName name)
{
    switch (name) {
    case ProblemName::shaw: return {-kPi / 2, kPi / 2, -kPi / 2, kPi / 2};
    case ProblemName::phillips: return {-6.0, 6.0, -6.0, 6.0};
    case ProblemName::expst:
    case ProblemName::green: return {0.0, 1.0, 0.0, 1.0};
    }
    return {};
}

std::pair<Eigen::Index, Eigen::Index> default_dims(ProblemName name)
{
    switch (name) {
    case ProblemName::shaw: return {2500, 2001};
    case ProblemName::phillips: return {3000, 2501};
    case ProblemName::expst: return {3500, 3001};
    case ProblemName::green: return {4000, 3501};
    }
    return {0, 0};
}

std::pair<Eigen::Index, Eigen::Index> scaled_dims(ProblemName name, Eigen::Index n)
{
    require_odd(n);
    const auto [m0, n0] = default_dims(name);
    const double ratio = static_cast<double>(m0) / static_cast<double>(n0 - 1);
    return {static_cast<Eigen::Index>(std::lround(ratio * static_cast<double>(n - 1))), n};
}

Vector simpson_weights(Eigen::Index n, double t1, double t2, bool paper_h)
{
    require_odd(n);
    const double h = (t2 - t1) / static_cast<double>(paper_h ? n : n - 1);
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i)
        w[i] = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    return (h / 3.0) * w;
}

Vector uniform_grid(Eigen::Index n, double a, double b)
{
    if (n < 1)
        throw std::invalid_argument("uniform_grid: n must be positive");
    if (n == 1)
        return Vector::Constant(1, 0.5 * (a + b));
    Vector g(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (Eigen::Index i = 0; i < n; ++i)
        g[i] = a + h * static_cast<double>(i);
    g[n - 1] = b;
    return g;
}

double kernel_eval(ProblemName name, double s, double t)
{
    switch (name) {
    case ProblemName::shaw: {
        const double c = std::cos(s) + std::cos(t);
        const double u = kPi * (std::sin(s) + std::sin(t));
        const double sinc = u == 0.0 ? 1.0 : std::sin(u) / u;
        return c * c * sinc * sinc;
    }
    case ProblemName::phillips: return phillips_phi(s - t);
    case ProblemName::expst: return std::exp(s * t);
    case ProblemName::green: return s < t ? s * (1.0 - t) : t * (1.0 - s);
    }
    return 0.0;
}

double kernel_eval(std::string_view name, double s, double t)
{
    return kernel_eval(parse_problem_name(name), s, t);
}

double true_solution(ProblemName name, double t)
{
    switch (name) {
    case ProblemName::shaw: return 2.0 * std::exp(-6.0 * (t - 0.8) * (t - 0.8)) + std::exp(-2.0 * (t + 0.5) * (t + 0.5));
    case ProblemName::phillips: return phillips_phi(t);
    case ProblemName::expst: return std::exp(t) * std::cos(t);
    case ProblemName::green: return t - 2.0 * t * t + t * t * t;
    }
    return 0.0;
}

double true_solution(std::string_view name, double t)
{
    return true_solution(parse_problem_name(name), t);
}

Matrix assemble_serial(ProblemName name, const Vector& s_grid, const Vector& t_grid, const Vector& weights)
{
    Matrix A(s_grid.size(), t_grid.size());
    for (Eigen::Index j = 0; j < s_grid.size(); ++j)
        for (Eigen::Index i = 0; i < t_grid.size(); ++i)
            A(j, i) = kernel_eval(name, s_grid[j], t_grid[i]) * weights[i];
    return A;
}

TestProblem build_problem(ProblemName name, Eigen::Index m, Eigen::Index n, bool paper_h)
{
    require_odd(n);
    if (m < 1)
        throw std::invalid_argument("build_problem: m must be positive");

    TestProblem p;
    p.name = name;
    p.m = m;
    p.n = n;
    p.paper_h = paper_h;
    p.domain = problem_domain(name);
    p.t_grid = uniform_grid(n, p.domain.t1, p.domain.t2);
    p.s_grid = uniform_grid(m, p.domain.s1, p.domain.s2);
    p.weights = simpson_weights(n, p.domain.t1, p.domain.t2, paper_h);
    p.M = WeightMatrix::diagonal(p.weights);

    p.A.resize(m, n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            p.A(j, i) = kernel_eval(name, p.s_grid[j], p.t_grid[i]) * p.weights[i];

    p.x_true.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        p.x_true[i] = true_solution(name, p.t_grid[i]);
    p.b_exact = p.A * p.x_true;
    return p;
}

TestProblem build_problem(ProblemName name)
{
    const auto [m, n] = default_dims(name);
    return build_problem(name, m, n);
}

NoisyData add_noise(const TestProblem& problem, double epsilon, std::uint64_t seed)
{
    if (!(epsilon >= 0.0))
        throw std::invalid_argument("add_noise: epsilon must be nonnegative");
    NoisyData d;
    d.epsilon = epsilon;
    d.seed = seed;
    d.e = Vector::Zero(problem.m);
    if (epsilon > 0.0) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index i = 0; i < problem.m; ++i)
            d.e[i] = normal(gen);
        d.e *= epsilon * problem.b_exact.norm() / d.e.norm();
    }
    d.b = problem.b_exact + d.e;
    return d;
}

double condition_estimate(const Matrix& A)
{
    Eigen::BDCSVD<Matrix> svd(A);
    const Vector& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0)
        return std::numeric_limits<double>::infinity();
    const double cut = rank_tolerance(A.rows(), A.cols()) * s[0];
    double smallest = s[0];
    for (Eigen::Index i = 0; i < s.size() && s[i] > cut; ++i)
        smallest = s[i];
    return s[0] / smallest;
}

double condition_estimate(const TestProblem& problem)
{
    return condition_estimate(problem.A);
}

}  // namespace mreg
