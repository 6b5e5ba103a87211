#ifndef MREG_TOOLS_CLI_HPP
#define MREG_TOOLS_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mreg/problem_io.hpp"
#include "mreg/regularization.hpp"

namespace mreg::cli {

enum class Method { wlsqr, lsqr, tikh_opt, twsvd };

Method parse_method(std::string_view name);
std::string to_string(Method method);

/// Everything a command needs; validated before any run starts.
struct ExperimentConfig {
    std::vector<ProblemName> problems{ProblemName::shaw};
    std::optional<Eigen::Index> m;
    std::optional<Eigen::Index> n;
    std::vector<double> epsilons{1e-3};
    std::vector<std::uint64_t> seeds{1};
    std::vector<RuleKind> rules{RuleKind::dp};
    std::vector<Method> methods{Method::wlsqr};
    double tau = 1.01;
    Eigen::Index max_iter = 200;
    bool reorth = true;
    bool paper_h = false;
    int jobs = 1;
    std::string out;
    std::string input;

    /// Throws std::invalid_argument on the first inconsistent field.
    void validate() const;

    /// key=value lines; parse_config(to_text()) reproduces the config exactly.
    std::string to_text() const;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(const std::string& text);

/// Problem dimensions for a config: explicit m and n, or n alone scaled with
/// the default aspect ratio, or the default sizes.
std::pair<Eigen::Index, Eigen::Index> resolve_dims(const ExperimentConfig& config, ProblemName name);

/// Problem and data for the first (problem, epsilon, seed) of the config,
/// loaded from config.input when set.
ProblemData prepare(const ExperimentConfig& config);

struct SolveOutcome {
    std::string problem;
    std::string rule;
    std::string method;
    Eigen::Index stop_k = 0;
    double rel_err = 0.0;
    double wall_ms = 0.0;
    RunRecord record;
    std::optional<double> lambda;
};

/// One method/rule run on prepared data.
SolveOutcome run_one(const TestProblem& problem, const NoisyData& data, Method method, RuleKind rule,
                     const ExperimentConfig& config);

void write_iterations_csv(std::ostream& os, const RunRecord& record);
void write_summary_header(std::ostream& os);
void write_summary_row(std::ostream& os, const SolveOutcome& outcome);

struct SweepRow {
    std::string problem;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::string method;
    std::string rule;
    Eigen::Index stop_k = 0;
    double rel_err = 0.0;
    std::string status;
    auto key() const { return std::tie(problem, epsilon, seed, method, rule); }
};

/// All (problem, epsilon, seed, method, rule) cells, sorted; failed cells are
/// reported through the status field.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// L-curve points (k >= 1) with curvature and the selected corner.
struct LcurveTable {
    std::vector<Eigen::Index> k;
    std::vector<double> log_res;
    std::vector<double> log_norm;
    LcurveCorner corner;
};
LcurveTable lcurve_from_history(const std::vector<IterationRecord>& history);
LcurveTable lcurve_from_points(const std::vector<double>& log_res, const std::vector<double>& log_norm);
void write_lcurve_csv(std::ostream& os, const LcurveTable& table);

/// Full command-line entry point. Returns 0 on success, 1 on usage or
/// configuration errors, 2 on runtime failures.
int run(int argc, char** argv);

}  // namespace mreg::cli

#endif  // MREG_TOOLS_CLI_HPP
