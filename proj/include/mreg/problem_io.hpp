#ifndef MREG_PROBLEM_IO_HPP
#define MREG_PROBLEM_IO_HPP

#include <filesystem>
#include <map>
#include <string>

#include "mreg/problems.hpp"

namespace mreg {

/// On-disk problem directory:
///
///   A        uint64 rows, uint64 cols, then rows*cols float64, row-major
///   M.diag   n float64
///   x_true   n float64 (optional on load; empty when absent)
///   b_exact  m float64
///   b        m float64
///   e        m float64
///   meta     key=value lines (name, m, n, epsilon, seed, t1, t2, s1, s2, paper_h)
///
/// All binary data is little-endian IEEE double with no padding.
struct ProblemData {
    TestProblem problem;
    NoisyData data;
};

void save_problem(const std::filesystem::path& dir, const TestProblem& problem, const NoisyData& data);
ProblemData load_problem(const std::filesystem::path& dir);

void write_vector(const std::filesystem::path& file, const Vector& v);
Vector read_vector(const std::filesystem::path& file);
void write_matrix(const std::filesystem::path& file, const Matrix& A);
Matrix read_matrix(const std::filesystem::path& file);

std::map<std::string, std::string> read_meta(const std::filesystem::path& file);

}  // namespace mreg

#endif  // MREG_PROBLEM_IO_HPP
