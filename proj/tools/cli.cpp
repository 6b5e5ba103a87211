#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <tuple>

#include "mreg/wgkb.hpp"

namespace mreg::cli {

namespace fs = std::filesystem;

namespace {

/// Bad flags or an inconsistent configuration: exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string fmt(double v, int digits = 12)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    if (s.empty())
        return out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep))
        out.push_back(item);
    return out;
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& to_text)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0)
            out += ',';
        out += to_text(items[i]);
    }
    return out;
}

double parse_double(const std::string& s)
{
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
        throw ConfigError("not a number: " + s);
    return v;
}

long long parse_int(const std::string& s)
{
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size())
        throw ConfigError("not an integer: " + s);
    return v;
}

template <class F>
auto as_config_error(F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

StoppingRule make_rule(RuleKind kind, const TestProblem& problem, const NoisyData& data, double tau)
{
    switch (kind) {
    case RuleKind::dp: return StoppingRule::discrepancy(data.e.norm(), tau);
    case RuleKind::lc: return StoppingRule::lcurve();
    case RuleKind::oracle:
        if (problem.x_true.size() == 0)
            throw ConfigError("oracle stopping needs the true solution, which this problem does not provide");
        return StoppingRule::oracle(problem.x_true);
    case RuleKind::max_iter: return StoppingRule::max_iterations();
    }
    return StoppingRule::max_iterations();
}

double elapsed_ms(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void warn_if_near_singular(const WeightMatrix& M)
{
    if (M.near_singular())
        std::cerr << "warning: weight matrix is nearly singular (condition estimate "
                  << fmt(M.condition_estimate(), 3) << ")\n";
}

SolveOutcome run_with(const TestProblem& problem, const NoisyData& data, Method method, RuleKind rule_kind,
                      const ExperimentConfig& config, const WsvdFactorization* cached)
{
    SolveOutcome out;
    out.problem = to_string(problem.name);
    out.method = to_string(method);
    out.rule = to_string(method == Method::tikh_opt ? RuleKind::oracle : rule_kind);

    SprOptions opts;
    opts.reorth = config.reorth;
    if (problem.x_true.size() != 0)
        opts.reference = problem.x_true;

    const auto start = std::chrono::steady_clock::now();
    std::optional<WsvdFactorization> local;
    auto factorization = [&]() -> const WsvdFactorization& {
        if (cached)
            return *cached;
        local = wsvd(problem.A, problem.M);
        return *local;
    };

    Vector solution;
    switch (method) {
    case Method::wlsqr:
    case Method::lsqr:
    case Method::twsvd: {
        const StoppingRule rule = make_rule(rule_kind, problem, data, config.tau);
        SprResult r;
        if (method == Method::wlsqr)
            r = spr_solve(problem.A, problem.M, data.b, rule, config.max_iter, opts);
        else if (method == Method::lsqr)
            r = lsqr_baseline(problem.A, data.b, rule, config.max_iter, opts);
        else
            r = twsvd_solve(factorization(), problem.A, data.b, rule, config.max_iter, opts);
        out.stop_k = r.record.stop_k;
        out.record = std::move(r.record);
        solution = std::move(r.solution);
        break;
    }
    case Method::tikh_opt: {
        if (problem.x_true.size() == 0)
            throw ConfigError("tikh-opt needs the true solution, which this problem does not provide");
        const auto t = tikhonov_opt(factorization(), data.b, problem.x_true);
        out.lambda = t.lambda;
        solution = t.solution;
        break;
    }
    }
    out.wall_ms = elapsed_ms(start);
    out.record.wall_ms = out.wall_ms;
    out.rel_err = problem.x_true.size() != 0 ? relative_error(solution, problem.x_true)
                                             : std::numeric_limits<double>::quiet_NaN();
    return out;
}

std::ofstream open_output(const fs::path& file)
{
    std::ofstream os(file, std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot write " + file.string());
    return os;
}

}  // namespace

Method parse_method(std::string_view name)
{
    if (name == "wlsqr")
        return Method::wlsqr;
    if (name == "lsqr")
        return Method::lsqr;
    if (name == "tikh-opt")
        return Method::tikh_opt;
    if (name == "twsvd")
        return Method::twsvd;
    throw ConfigError("unknown method: " + std::string(name));
}

std::string to_string(Method method)
{
    switch (method) {
    case Method::wlsqr: return "wlsqr";
    case Method::lsqr: return "lsqr";
    case Method::tikh_opt: return "tikh-opt";
    case Method::twsvd: return "twsvd";
    }
    return "unknown";
}

void ExperimentConfig::validate() const
{
    if (problems.empty())
        throw ConfigError("at least one problem is required");
    if (epsilons.empty())
        throw ConfigError("at least one noise level is required");
    for (double e : epsilons)
        if (!(e >= 0.0) || !std::isfinite(e))
            throw ConfigError("noise levels must be finite and nonnegative, got " + fmt(e));
    if (seeds.empty())
        throw ConfigError("at least one seed is required");
    if (rules.empty())
        throw ConfigError("at least one stopping rule is required");
    if (methods.empty())
        throw ConfigError("at least one method is required");
    if (!(tau > 1.0))
        throw ConfigError("--tau must exceed 1");
    if (max_iter < 1)
        throw ConfigError("--max-iter must be at least 1");
    if (jobs < 1)
        throw ConfigError("--jobs must be at least 1");
    if (n && (*n < 3 || *n % 2 == 0))
        throw ConfigError("--n must be odd and at least 3");
    if (m && *m < 1)
        throw ConfigError("--m must be positive");
    const bool dp = std::find(rules.begin(), rules.end(), RuleKind::dp) != rules.end();
    if (dp && std::find(epsilons.begin(), epsilons.end(), 0.0) != epsilons.end())
        throw ConfigError("the discrepancy principle needs a positive noise level");
}

std::string ExperimentConfig::to_text() const
{
    std::ostringstream os;
    os << "problems=" << join(problems, [](ProblemName p) { return mreg::to_string(p); }) << '\n'
       << "m=" << (m ? std::to_string(*m) : "") << '\n'
       << "n=" << (n ? std::to_string(*n) : "") << '\n'
       << "epsilons=" << join(epsilons, [](double e) { return fmt(e, 17); }) << '\n'
       << "seeds=" << join(seeds, [](std::uint64_t s) { return std::to_string(s); }) << '\n'
       << "rules=" << join(rules, [](RuleKind r) { return mreg::to_string(r); }) << '\n'
       << "methods=" << join(methods, [](Method x) { return to_string(x); }) << '\n'
       << "tau=" << fmt(tau, 17) << '\n'
       << "max_iter=" << max_iter << '\n'
       << "reorth=" << (reorth ? "on" : "off") << '\n'
       << "paper_h=" << (paper_h ? 1 : 0) << '\n'
       << "jobs=" << jobs << '\n'
       << "out=" << out << '\n'
       << "input=" << input << '\n';
    return os.str();
}

ExperimentConfig parse_config(const std::string& text)
{
    ExperimentConfig c;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("malformed config line: " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        as_config_error([&] {
            if (key == "problems") {
                c.problems.clear();
                for (const auto& s : split(value, ','))
                    c.problems.push_back(parse_problem_name(s));
            } else if (key == "m") {
                c.m = value.empty() ? std::nullopt : std::optional<Eigen::Index>(parse_int(value));
            } else if (key == "n") {
                c.n = value.empty() ? std::nullopt : std::optional<Eigen::Index>(parse_int(value));
            } else if (key == "epsilons") {
                c.epsilons.clear();
                for (const auto& s : split(value, ','))
                    c.epsilons.push_back(parse_double(s));
            } else if (key == "seeds") {
                c.seeds.clear();
                for (const auto& s : split(value, ','))
                    c.seeds.push_back(static_cast<std::uint64_t>(std::stoull(s)));
            } else if (key == "rules") {
                c.rules.clear();
                for (const auto& s : split(value, ','))
                    c.rules.push_back(parse_rule(s));
            } else if (key == "methods") {
                c.methods.clear();
                for (const auto& s : split(value, ','))
                    c.methods.push_back(parse_method(s));
            } else if (key == "tau") {
                c.tau = parse_double(value);
            } else if (key == "max_iter") {
                c.max_iter = parse_int(value);
            } else if (key == "reorth") {
                if (value != "on" && value != "off")
                    throw ConfigError("reorth must be on or off");
                c.reorth = value == "on";
            } else if (key == "paper_h") {
                c.paper_h = value == "1";
            } else if (key == "jobs") {
                c.jobs = static_cast<int>(parse_int(value));
            } else if (key == "out") {
                c.out = value;
            } else if (key == "input") {
                c.input = value;
            } else {
                throw ConfigError("unknown config key: " + key);
            }
        });
    }
    return c;
}

std::pair<Eigen::Index, Eigen::Index> resolve_dims(const ExperimentConfig& config, ProblemName name)
{
    auto dims = config.n ? scaled_dims(name, *config.n) : default_dims(name);
    if (config.m)
        dims.first = *config.m;
    return dims;
}

ProblemData prepare(const ExperimentConfig& config)
{
    ProblemData pd;
    if (!config.input.empty()) {
        pd = load_problem(config.input);
    } else {
        const ProblemName name = config.problems.front();
        const auto [m, n] = resolve_dims(config, name);
        pd.problem = build_problem(name, m, n, config.paper_h);
        pd.data = add_noise(pd.problem, config.epsilons.front(), config.seeds.front());
    }
    warn_if_near_singular(pd.problem.M);
    return pd;
}

SolveOutcome run_one(const TestProblem& problem, const NoisyData& data, Method method, RuleKind rule,
                     const ExperimentConfig& config)
{
    return run_with(problem, data, method, rule, config, nullptr);
}

void write_iterations_csv(std::ostream& os, const RunRecord& record)
{
    os << "k,res_norm,sol_mnorm,rel_err\n";
    for (std::size_t i = 0; i < record.iterations.size(); ++i) {
        const auto& r = record.iterations[i];
        const double err = i < record.relative_error.size() ? record.relative_error[i]
                                                            : std::numeric_limits<double>::quiet_NaN();
        os << r.k << ',' << fmt(r.residual_norm) << ',' << fmt(r.solution_norm) << ',' << fmt(err) << '\n';
    }
}

void write_summary_header(std::ostream& os)
{
    os << "problem,rule,method,stop_k,rel_err,wall_ms\n";
}

void write_summary_row(std::ostream& os, const SolveOutcome& o)
{
    os << o.problem << ',' << o.rule << ',' << o.method << ',' << o.stop_k << ',' << fmt(o.rel_err) << ','
       << fmt(o.wall_ms, 6) << '\n';
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config)
{
    struct Cell {
        std::size_t problem;
        std::size_t data;
        Method method;
        RuleKind rule;
    };

    std::vector<TestProblem> problems;
    std::vector<std::vector<NoisyData>> data;
    std::vector<std::optional<WsvdFactorization>> factorizations;
    std::vector<Cell> cells;
    const bool needs_wsvd = std::any_of(config.methods.begin(), config.methods.end(),
                                        [](Method m) { return m == Method::tikh_opt || m == Method::twsvd; });

    for (std::size_t pi = 0; pi < config.problems.size(); ++pi) {
        const auto [m, n] = resolve_dims(config, config.problems[pi]);
        problems.push_back(build_problem(config.problems[pi], m, n, config.paper_h));
        warn_if_near_singular(problems.back().M);
        factorizations.emplace_back();
        if (needs_wsvd)
            factorizations.back() = wsvd(problems.back().A, problems.back().M);
        data.emplace_back();
        for (double eps : config.epsilons)
            for (std::uint64_t seed : config.seeds) {
                data.back().push_back(add_noise(problems.back(), eps, seed));
                for (Method method : config.methods) {
                    if (method == Method::tikh_opt) {
                        cells.push_back({pi, data.back().size() - 1, method, RuleKind::oracle});
                        continue;
                    }
                    for (RuleKind rule : config.rules)
                        cells.push_back({pi, data.back().size() - 1, method, rule});
                }
            }
    }

    std::vector<SweepRow> rows(cells.size());
    const auto count = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for num_threads(config.jobs) schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const Cell& c = cells[static_cast<std::size_t>(i)];
        const TestProblem& p = problems[c.problem];
        const NoisyData& d = data[c.problem][c.data];
        SweepRow& row = rows[static_cast<std::size_t>(i)];
        row.problem = mreg::to_string(p.name);
        row.epsilon = d.epsilon;
        row.seed = d.seed;
        row.method = to_string(c.method);
        row.rule = mreg::to_string(c.rule);
        try {
            const auto& f = factorizations[c.problem];
            const auto o = run_with(p, d, c.method, c.rule, config, f ? &*f : nullptr);
            row.stop_k = o.stop_k;
            row.rel_err = o.rel_err;
            row.status = "ok";
            if (o.record.dp_not_reached)
                row.status = "dp-not-reached";
            else if (o.record.degenerate_stop)
                row.status = "dp-degenerate";
            else if (o.record.no_corner)
                row.status = "no-corner";
        } catch (const std::exception& e) {
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            row.stop_k = 0;
            row.rel_err = std::numeric_limits<double>::quiet_NaN();
            row.status = "failed: " + msg;
        }
    }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.key() < b.key(); });
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << "problem,epsilon,seed,method,rule,stop_k,rel_err,status\n";
    for (const auto& r : rows)
        os << r.problem << ',' << fmt(r.epsilon) << ',' << r.seed << ',' << r.method << ',' << r.rule << ','
           << r.stop_k << ',' << fmt(r.rel_err) << ',' << r.status << '\n';
}

LcurveTable lcurve_from_points(const std::vector<double>& log_res, const std::vector<double>& log_norm)
{
    LcurveTable t;
    t.log_res = log_res;
    t.log_norm = log_norm;
    for (std::size_t i = 0; i < log_res.size(); ++i)
        t.k.push_back(static_cast<Eigen::Index>(i + 1));
    t.corner = lcurve_corner(t.log_res, t.log_norm);
    return t;
}

LcurveTable lcurve_from_history(const std::vector<IterationRecord>& history)
{
    LcurveTable t;
    for (const auto& r : history) {
        if (r.k < 1)
            continue;
        t.k.push_back(r.k);
        t.log_res.push_back(std::log(r.residual_norm));
        t.log_norm.push_back(std::log(r.solution_norm));
    }
    t.corner = lcurve_corner(t.log_res, t.log_norm);
    return t;
}

void write_lcurve_csv(std::ostream& os, const LcurveTable& t)
{
    os << "k,log_res,log_mnorm,curvature,is_corner\n";
    for (std::size_t i = 0; i < t.k.size(); ++i)
        os << t.k[i] << ',' << fmt(t.log_res[i]) << ',' << fmt(t.log_norm[i]) << ',' << fmt(t.corner.curvature[i])
           << ',' << (static_cast<Eigen::Index>(i) == t.corner.index ? "true" : "false") << '\n';
}

namespace {

int cmd_gen(const ExperimentConfig& c)
{
    if (c.out.empty())
        throw ConfigError("gen needs --out DIR");
    const ProblemData pd = prepare(c);
    save_problem(c.out, pd.problem, pd.data);
    std::cout << "wrote " << mreg::to_string(pd.problem.name) << ' ' << pd.problem.m << 'x' << pd.problem.n
              << " to " << c.out << '\n';
    return 0;
}

int cmd_solve(const ExperimentConfig& c)
{
    const ProblemData pd = prepare(c);
    const auto o = run_one(pd.problem, pd.data, c.methods.front(), c.rules.front(), c);
    if (c.out.empty()) {
        write_iterations_csv(std::cout, o.record);
        std::cout << '\n';
        write_summary_header(std::cout);
        write_summary_row(std::cout, o);
    } else {
        fs::create_directories(c.out);
        auto it = open_output(fs::path(c.out) / "iterations.csv");
        write_iterations_csv(it, o.record);
        auto sum = open_output(fs::path(c.out) / "summary.csv");
        write_summary_header(sum);
        write_summary_row(sum, o);
        open_output(fs::path(c.out) / "config.txt") << c.to_text();
        write_summary_header(std::cout);
        write_summary_row(std::cout, o);
    }
    if (o.lambda)
        std::cerr << "lambda=" << fmt(*o.lambda) << '\n';
    if (o.record.dp_not_reached)
        std::cerr << "warning: discrepancy threshold not reached within " << c.max_iter << " iterations\n";
    if (o.record.degenerate_stop)
        std::cerr << "warning: discrepancy threshold exceeds the data norm; returning the first iterate\n";
    if (o.record.no_corner)
        std::cerr << "warning: L-curve has no distinct corner\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& c)
{
    if (!c.input.empty())
        throw ConfigError("sweep generates its own data; --input is not supported");
    const auto rows = run_sweep(c);
    if (c.out.empty()) {
        write_sweep_csv(std::cout, rows);
    } else {
        fs::create_directories(c.out);
        auto os = open_output(fs::path(c.out) / "sweep.csv");
        write_sweep_csv(os, rows);
        open_output(fs::path(c.out) / "config.txt") << c.to_text();
    }
    return 0;
}

std::pair<std::vector<double>, std::vector<double>> read_points(const std::string& file)
{
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot read points file " + file);
    std::vector<double> xs, ys;
    std::string line;
    while (std::getline(in, line)) {
        const auto parts = split(line, ',');
        if (parts.size() != 2)
            throw ConfigError("points file lines must be 'log_res,log_norm': " + line);
        try {
            const double x = parse_double(parts[0]);
            const double y = parse_double(parts[1]);
            xs.push_back(x);
            ys.push_back(y);
        } catch (const std::exception&) {
            if (!xs.empty())
                throw ConfigError("bad number in points file: " + line);
        }
    }
    return {xs, ys};
}

int cmd_lcurve(const ExperimentConfig& c, const std::string& points)
{
    LcurveTable t;
    if (!points.empty()) {
        const auto [xs, ys] = read_points(points);
        if (xs.size() < 5)
            throw ConfigError("L-curve needs at least 5 points");
        t = lcurve_from_points(xs, ys);
    } else {
        const ProblemData pd = prepare(c);
        const Method method = c.methods.front();
        if (method != Method::wlsqr && method != Method::lsqr)
            throw ConfigError("lcurve supports --method wlsqr or lsqr");
        const auto o = run_one(pd.problem, pd.data, method, RuleKind::max_iter, c);
        t = lcurve_from_history(o.record.iterations);
    }
    if (c.out.empty()) {
        write_lcurve_csv(std::cout, t);
    } else {
        fs::create_directories(c.out);
        auto os = open_output(fs::path(c.out) / "lcurve.csv");
        write_lcurve_csv(os, t);
    }
    if (t.corner.no_corner)
        std::cerr << "warning: L-curve has no distinct corner\n";
    return 0;
}

int cmd_wsvd(ExperimentConfig c)
{
    if (!c.n && !c.m && c.input.empty())
        c.n = 101;
    const ProblemData pd = prepare(c);
    const auto f = wsvd(pd.problem.A, pd.problem.M);
    std::cout << "i,sigma\n";
    for (Eigen::Index i = 0; i < f.rank; ++i)
        std::cout << i + 1 << ',' << fmt(f.sigma[i], 17) << '\n';
    if (!c.out.empty()) {
        fs::create_directories(c.out);
        write_matrix(fs::path(c.out) / "U", f.U);
        write_matrix(fs::path(c.out) / "V", f.V);
        write_vector(fs::path(c.out) / "sigma", f.sigma);
    }
    return 0;
}

int cmd_triplets(const ExperimentConfig& c, Eigen::Index steps, Eigen::Index count, double tol)
{
    if (steps < 1 || count < 1)
        throw ConfigError("--steps and --count must be positive");
    if (!(tol > 0.0))
        throw ConfigError("--tol must be positive");
    const ProblemData pd = prepare(c);
    BidiagOptions opts;
    opts.reorth = c.reorth;
    const auto st = wgkb_run(pd.problem.A, pd.problem.M, pd.data.b, steps, opts);
    if (st.steps() < 1)
        throw std::runtime_error("bidiagonalization terminated before the first step");
    const auto tr = approx_triplets(st, std::min(count, st.steps()));
    std::cout << "i,sigma_bar,residual_bound,converged\n";
    for (std::size_t i = 0; i < tr.size(); ++i)
        std::cout << i + 1 << ',' << fmt(tr[i].sigma_bar) << ',' << fmt(tr[i].residual_bound) << ','
                  << (tr[i].residual_bound <= tol * tr[0].sigma_bar ? "true" : "false") << '\n';
    if (st.steps() < steps)
        std::cerr << "note: bidiagonalization terminated after " << st.steps() << " steps\n";
    return 0;
}

}  // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Weighted SVD, weighted LSQR and early-stopping regularization experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    ExperimentConfig def;
    std::vector<std::string> problems{"shaw"}, rules{"dp"}, methods{"wlsqr"};
    std::vector<double> epsilons = def.epsilons;
    std::vector<std::uint64_t> seeds = def.seeds;
    long long m = 0, n = 0;
    double tau = def.tau;
    long long max_iter = def.max_iter;
    std::string reorth = "on";
    int jobs = std::max(1, omp_get_max_threads());
    std::string out, input, config_file;
    bool paper_h = false;

    std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> flags;
    auto track = [&](CLI::Option* opt, std::function<void(ExperimentConfig&)> apply) {
        flags.emplace_back(opt, std::move(apply));
        return opt;
    };

    const std::vector<std::string> problem_names{"shaw", "phillips", "expst", "green"};
    track(app.add_option("--problem", problems, "Test problem(s)")
              ->delimiter(',')
              ->check(CLI::IsMember(problem_names)),
          [&](ExperimentConfig& c) {
              c.problems.clear();
              for (const auto& p : problems)
                  c.problems.push_back(parse_problem_name(p));
          });
    track(app.add_option("--m", m, "Number of observation points")->check(CLI::PositiveNumber),
          [&](ExperimentConfig& c) { c.m = m; });
    track(app.add_option("--n", n, "Number of quadrature nodes (odd)")->check(CLI::PositiveNumber),
          [&](ExperimentConfig& c) { c.n = n; });
    track(app.add_option("--epsilon", epsilons, "Noise level(s)")->delimiter(','),
          [&](ExperimentConfig& c) { c.epsilons = epsilons; });
    track(app.add_option("--seed", seeds, "Noise seed(s)")->delimiter(','),
          [&](ExperimentConfig& c) { c.seeds = seeds; });
    track(app.add_option("--rule", rules, "Stopping rule(s)")
              ->delimiter(',')
              ->check(CLI::IsMember({"dp", "lc", "oracle", "maxiter"})),
          [&](ExperimentConfig& c) {
              c.rules.clear();
              for (const auto& r : rules)
                  c.rules.push_back(parse_rule(r));
          });
    track(app.add_option("--method", methods, "Solver(s)")
              ->delimiter(',')
              ->check(CLI::IsMember({"wlsqr", "lsqr", "tikh-opt", "twsvd"})),
          [&](ExperimentConfig& c) {
              c.methods.clear();
              for (const auto& x : methods)
                  c.methods.push_back(parse_method(x));
          });
    track(app.add_option("--tau", tau, "Discrepancy principle safety factor")->capture_default_str(),
          [&](ExperimentConfig& c) { c.tau = tau; });
    track(app.add_option("--max-iter", max_iter, "Iteration cap")->capture_default_str(),
          [&](ExperimentConfig& c) { c.max_iter = max_iter; });
    track(app.add_option("--reorth", reorth, "Full reorthogonalization")
              ->check(CLI::IsMember({"on", "off"}))
              ->capture_default_str(),
          [&](ExperimentConfig& c) { c.reorth = reorth == "on"; });
    track(app.add_option("--out", out, "Output directory"), [&](ExperimentConfig& c) { c.out = out; });
    track(app.add_option("--input", input, "Problem directory written by gen"),
          [&](ExperimentConfig& c) { c.input = input; });
    track(app.add_option("--jobs", jobs, "Concurrent sweep cells")->check(CLI::PositiveNumber),
          [&](ExperimentConfig& c) { c.jobs = jobs; });
    track(app.add_flag("--paper-h", paper_h, "Use quadrature spacing (t2-t1)/n"),
          [&](ExperimentConfig& c) { c.paper_h = paper_h; });
    app.add_option("--config", config_file, "Start from a saved config.txt; explicit flags override it");

    auto* gen = app.add_subcommand("gen", "Generate a test problem and write it to --out");
    auto* solve = app.add_subcommand("solve", "Run one method with one stopping rule");
    auto* sweep = app.add_subcommand("sweep", "Run every problem/noise/seed/method/rule combination");
    auto* lcurve = app.add_subcommand("lcurve", "Emit the L-curve and its corner");
    std::string points;
    lcurve->add_option("--points", points, "CSV of log_res,log_norm pairs instead of a solver run");
    auto* wsvd_cmd = app.add_subcommand("wsvd", "Print the weighted singular values of a small problem");
    auto* triplets = app.add_subcommand("triplets", "Approximate weighted singular triplets from bidiagonalization");
    long long steps = 20, count = 5;
    double tol = 1e-8;
    triplets->add_option("--steps", steps, "Bidiagonalization steps")->capture_default_str();
    triplets->add_option("--count", count, "Number of triplets")->capture_default_str();
    triplets->add_option("--tol", tol, "Acceptance tolerance relative to the largest value")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        ExperimentConfig c;
        c.jobs = jobs;
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in)
                throw ConfigError("cannot read config file " + config_file);
            std::stringstream ss;
            ss << in.rdbuf();
            c = parse_config(ss.str());
        }
        for (auto& [opt, apply] : flags)
            if (opt->count() > 0)
                as_config_error([&] { apply(c); });
        c.validate();

        if (gen->parsed())
            return cmd_gen(c);
        if (solve->parsed())
            return cmd_solve(c);
        if (sweep->parsed())
            return cmd_sweep(c);
        if (lcurve->parsed())
            return cmd_lcurve(c, points);
        if (wsvd_cmd->parsed())
            return cmd_wsvd(c);
        if (triplets->parsed())
            return cmd_triplets(c, steps, count, tol);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace mreg::cli
