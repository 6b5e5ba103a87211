#ifndef MREG_PROBLEMS_HPP
#define MREG_PROBLEMS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "mreg/weights.hpp"

namespace mreg {

/// First-kind Fredholm test problems discretized with composite Simpson.
enum class ProblemName { shaw, phillips, expst, green };

inline constexpr std::array<ProblemName, 4> kAllProblems{ProblemName::shaw, ProblemName::phillips,
                                                         ProblemName::expst, ProblemName::green};

/// Throws std::invalid_argument for an unknown name.
ProblemName parse_problem_name(std::string_view name);
std::string to_string(ProblemName name);

/// t in [t1, t2], s in [s1, s2].
struct Domain {
    double t1 = 0.0;
    double t2 = 1.0;
    double s1 = 0.0;
    double s2 = 1.0;
};

Domain problem_domain(ProblemName name);

/// Default (m, n): 2500x2001, 3000x2501, 3500x3001, 4000x3501.
std::pair<Eigen::Index, Eigen::Index> default_dims(ProblemName name);

/// (m, n) for an odd n keeping the default aspect ratio m/(n-1).
std::pair<Eigen::Index, Eigen::Index> scaled_dims(ProblemName name, Eigen::Index n);

/// Composite Simpson weights (h/3)(1,4,2,4,...,2,4,1) on n = 2l+1 nodes with
/// h = (t2-t1)/(n-1). With `paper_h` the spacing constant is (t2-t1)/n
/// instead (nodes are unchanged, weights shrink by (n-1)/n).
Vector simpson_weights(Eigen::Index n, double t1, double t2, bool paper_h = false);

/// n uniform nodes on [a, b] including both endpoints.
Vector uniform_grid(Eigen::Index n, double a, double b);

double kernel_eval(ProblemName name, double s, double t);
double kernel_eval(std::string_view name, double s, double t);
double true_solution(ProblemName name, double t);
double true_solution(std::string_view name, double t);

struct TestProblem {
    ProblemName name = ProblemName::shaw;
    Eigen::Index m = 0;
    Eigen::Index n = 0;
    Domain domain;
    bool paper_h = false;
    Vector s_grid;
    Vector t_grid;
    Vector weights;
    /// A_{ji} = K(s_j, t_i) w_i
    Matrix A;
    WeightMatrix M = WeightMatrix::identity(1);
    Vector x_true;
    Vector b_exact;
};

/// Assembles A (rows in parallel), M = diag(w), x_true and b_exact = A x_true.
TestProblem build_problem(ProblemName name, Eigen::Index m, Eigen::Index n, bool paper_h = false);
TestProblem build_problem(ProblemName name);

/// Row-by-row reference assembly of A, kept for testing the parallel path.
Matrix assemble_serial(ProblemName name, const Vector& s_grid, const Vector& t_grid, const Vector& weights);

struct NoisyData {
    Vector b;
    Vector e;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
};

/// Gaussian noise from a seeded generator, rescaled so that
/// ||e||_2 = epsilon ||b_exact||_2 exactly.
NoisyData add_noise(const TestProblem& problem, double epsilon, std::uint64_t seed);

/// sigma_max / sigma_min over the numerically nonzero standard singular values.
double condition_estimate(const Matrix& A);
double condition_estimate(const TestProblem& problem);

}  // namespace mreg

#endif  // MREG_PROBLEMS_HPP
