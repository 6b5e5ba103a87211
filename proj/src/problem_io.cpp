#include "mreg/problem_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mreg {

static_assert(std::endian::native == std::endian::little, "problem files are written in native little-endian order");

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& file)
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
    return out;
}

std::ifstream open_in(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + file.string());
    return in;
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_vector(const fs::path& file, const Vector& v)
{
    auto out = open_out(file);
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!out)
        throw std::runtime_error("write failed: " + file.string());
}

Vector read_vector(const fs::path& file)
{
    const auto bytes = fs::file_size(file);
    if (bytes % sizeof(double) != 0)
        throw std::runtime_error("corrupt vector file: " + file.string());
    Vector v(static_cast<Eigen::Index>(bytes / sizeof(double)));
    auto in = open_in(file);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
    if (!in)
        throw std::runtime_error("read failed: " + file.string());
    return v;
}

void write_matrix(const fs::path& file, const Matrix& A)
{
    auto out = open_out(file);
    const std::uint64_t dims[2] = {static_cast<std::uint64_t>(A.rows()), static_cast<std::uint64_t>(A.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = A;
    out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
    if (!out)
        throw std::runtime_error("write failed: " + file.string());
}

Matrix read_matrix(const fs::path& file)
{
    auto in = open_in(file);
    std::uint64_t dims[2] = {0, 0};
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!in)
        throw std::runtime_error("corrupt matrix header: " + file.string());
    const auto expected = sizeof dims + dims[0] * dims[1] * sizeof(double);
    if (fs::file_size(file) != expected)
        throw std::runtime_error("matrix file size does not match its header: " + file.string());
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(static_cast<Eigen::Index>(dims[0]),
                                                                               static_cast<Eigen::Index>(dims[1]));
    in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
    if (!in)
        throw std::runtime_error("read failed: " + file.string());
    return rm;
}

std::map<std::string, std::string> read_meta(const fs::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot read " + file.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("malformed meta line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

void save_problem(const fs::path& dir, const TestProblem& p, const NoisyData& d)
{
    fs::create_directories(dir);
    write_matrix(dir / "A", p.A);
    write_vector(dir / "M.diag", p.weights);
    write_vector(dir / "x_true", p.x_true);
    write_vector(dir / "b_exact", p.b_exact);
    write_vector(dir / "b", d.b);
    write_vector(dir / "e", d.e);

    std::ofstream meta(dir / "meta", std::ios::trunc);
    if (!meta)
        throw std::runtime_error("cannot write " + (dir / "meta").string());
    meta << "name=" << to_string(p.name) << '\n'
         << "m=" << p.m << '\n'
         << "n=" << p.n << '\n'
         << "epsilon=" << format_double(d.epsilon) << '\n'
         << "seed=" << d.seed << '\n'
         << "t1=" << format_double(p.domain.t1) << '\n'
         << "t2=" << format_double(p.domain.t2) << '\n'
         << "s1=" << format_double(p.domain.s1) << '\n'
         << "s2=" << format_double(p.domain.s2) << '\n'
         << "paper_h=" << (p.paper_h ? 1 : 0) << '\n';
}

ProblemData load_problem(const fs::path& dir)
{
    const auto meta = read_meta(dir / "meta");
    auto get = [&](const std::string& key) -> const std::string& {
        const auto it = meta.find(key);
        if (it == meta.end())
            throw std::runtime_error("meta is missing key '" + key + "' in " + dir.string());
        return it->second;
    };

    ProblemData out;
    TestProblem& p = out.problem;
    p.name = parse_problem_name(get("name"));
    p.m = std::stoll(get("m"));
    p.n = std::stoll(get("n"));
    p.domain = {std::stod(get("t1")), std::stod(get("t2")), std::stod(get("s1")), std::stod(get("s2"))};
    p.paper_h = get("paper_h") == "1";
    p.t_grid = uniform_grid(p.n, p.domain.t1, p.domain.t2);
    p.s_grid = uniform_grid(p.m, p.domain.s1, p.domain.s2);
    p.A = read_matrix(dir / "A");
    p.weights = read_vector(dir / "M.diag");
    p.M = WeightMatrix::diagonal(p.weights);
    // The true solution is optional so that measured data can be solved too.
    if (fs::exists(dir / "x_true"))
        p.x_true = read_vector(dir / "x_true");
    p.b_exact = read_vector(dir / "b_exact");

    NoisyData& d = out.data;
    d.b = read_vector(dir / "b");
    d.e = read_vector(dir / "e");
    d.epsilon = std::stod(get("epsilon"));
    d.seed = std::stoull(get("seed"));

    if (p.A.rows() != p.m || p.A.cols() != p.n || p.weights.size() != p.n || (p.x_true.size() != 0 && p.x_true.size() != p.n)
        || p.b_exact.size() != p.m || d.b.size() != p.m || d.e.size() != p.m)
        throw std::runtime_error("problem files have inconsistent dimensions in " + dir.string());
    return out;
}

}  // namespace mreg
