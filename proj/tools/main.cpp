#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chebpint/chebpint.h"
#include "results_io.hpp"

namespace
{

using chebpint::cli::ResultRow;
using chebpint::cli::ResultSet;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum ExitCode
{
    exit_ok = 0,
    exit_usage = 1,
    exit_numerical = 2
};

struct RunConfig
{
    std::vector<int> n;
    long long m = 0;
    double T = 0.0;
    double dt_last = 1e-2;
    double tau = 1.15;
    double tol = 1e-10;
    int max_iter = 50;
    std::vector<int> workers;
    std::string kind = "heat";
    std::string out;
    std::string format = "csv";
    std::string dump;
    bool skip_reference = false;
    int reps = 3;
};

// Thrown after a failing library call; carries the exit code.
struct Failure
{
    int code;
};

struct UsageError
{
    std::string message;
};

void check(chebpint_status status, const char* what)
{
    if (status == CHEBPINT_OK)
        return;
    std::fprintf(stderr, "chebpint: %s failed (%s): %s\n", what, chebpint_status_string(status),
                 chebpint_last_error());
    const bool usage = status == CHEBPINT_INVALID_ARGUMENT || status == CHEBPINT_UNSUPPORTED_KIND
                       || status == CHEBPINT_INVALID_GRID;
    throw Failure{usage ? exit_usage : exit_numerical};
}

void validate_n(const RunConfig& cfg)
{
    for (int n : cfg.n)
        if (n < 1)
            throw UsageError{"--n values must be >= 1"};
}

int single_workers(const RunConfig& cfg)
{
    return cfg.workers.empty() ? chebpint_resolve_workers(0) : cfg.workers.front();
}

int points_per_dim(long long m)
{
    const auto p = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(m))));
    if (m < 1 || p * p != m)
        throw UsageError{"--m must be a positive perfect square for 2D benchmarks (got " + std::to_string(m) + ")"};
    return static_cast<int>(p);
}

chebpint_benchmark_kind parse_kind(const std::string& name)
{
    chebpint_benchmark_kind kind{};
    if (chebpint_parse_benchmark_kind(name.c_str(), &kind) != CHEBPINT_OK)
        throw UsageError{"unknown benchmark kind '" + name + "' (expected heat, wave or semilinear)"};
    return kind;
}

void set_phases(ResultRow& row, const chebpint_phase_times& p)
{
    row.t_assembly = p.assembly;
    row.t_step_a = p.step_a;
    row.t_step_b = p.step_b;
    row.t_step_c = p.step_c;
}

std::vector<ResultRow> cmd_decompose(const RunConfig& cfg)
{
    validate_n(cfg);
    const int workers = single_workers(cfg);
    if (!cfg.dump.empty() && cfg.n.size() != 1)
        throw UsageError{"--dump needs exactly one --n"};
    std::vector<ResultRow> rows;
    for (int n : cfg.n) {
        const double dt = cfg.T / n;
        chebpint_decompose_report rep{};
        check(chebpint_run_decompose_report(n, dt, cfg.tol, cfg.max_iter, workers, cfg.skip_reference ? 0 : 1, &rep),
              "decompose");
        ResultRow row;
        row.experiment = "decompose";
        row.n = n;
        row.m = 0;
        row.workers = workers;
        row.cond2 = rep.cond2;
        row.residual = rep.omega_fast;
        row.iterations = rep.max_newton_iters;
        row.t_wall = rep.fast_seconds;
        row.set_extra("dt", dt);
        row.set_extra("omega_ref", rep.omega_ref);
        row.set_extra("eta", rep.eta);
        row.set_extra("t_fast", rep.fast_seconds);
        row.set_extra("t_ref", cfg.skip_reference ? kNaN : rep.ref_seconds);
        rows.push_back(row);

        if (!cfg.dump.empty()) {
            chebpint_decomposition* d = nullptr;
            check(chebpint_decompose(n, dt, cfg.tol, cfg.max_iter, CHEBPINT_DECOMP_COND2 | CHEBPINT_DECOMP_RESIDUAL,
                                     workers, &d),
                  "decompose");
            const chebpint_status st = chebpint_decomposition_save(d, cfg.dump.c_str());
            chebpint_decomposition_destroy(d);
            check(st, "dump");
        }
    }
    return rows;
}

std::vector<ResultRow> cmd_convergence(const RunConfig& cfg)
{
    validate_n(cfg);
    const chebpint_benchmark_kind kind = parse_kind(cfg.kind);
    const int p = points_per_dim(cfg.m);
    const int workers = single_workers(cfg);
    std::vector<ResultRow> rows;
    double prev = kNaN, prev_semi = kNaN;
    for (int n : cfg.n) {
        chebpint_benchmark_result r{};
        check(chebpint_run_benchmark(kind, p, n, cfg.T, cfg.tol, cfg.max_iter, workers, 0, &r), "convergence");
        ResultRow row;
        row.experiment = std::string("convergence-") + chebpint_benchmark_kind_name(kind);
        row.n = n;
        row.m = r.m;
        row.workers = r.workers;
        row.error = r.error;
        row.residual = r.residual;
        row.iterations = r.iterations;
        set_phases(row, r.phases);
        row.t_wall = r.wall_seconds;
        row.set_extra("dt", cfg.T / n);
        row.set_extra("error_semi_discrete", r.error_semi_discrete);
        row.set_extra("order", std::log2(prev / r.error));
        row.set_extra("order_semi_discrete", std::log2(prev_semi / r.error_semi_discrete));
        prev = r.error;
        prev_semi = r.error_semi_discrete;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ResultRow> cmd_compare_geometric(const RunConfig& cfg)
{
    validate_n(cfg);
    const int n_max = *std::max_element(cfg.n.begin(), cfg.n.end());
    if (n_max < 4)
        throw UsageError{"--n must be >= 4 for compare-geometric"};
    if (cfg.m < 3)
        throw UsageError{"--m must be >= 3 for compare-geometric"};
    std::vector<ResultRow> rows;
    for (int n = 4; n <= n_max; ++n) {
        chebpint_geometric_row g{};
        check(chebpint_compare_geometric(cfg.tau, cfg.dt_last, n, static_cast<int>(cfg.m), &g), "compare-geometric");
        if (g.status_geometric != CHEBPINT_OK)
            std::fprintf(stderr, "chebpint: n=%d geometric baseline: %s\n", n,
                         chebpint_status_string(g.status_geometric));
        if (g.status_new != CHEBPINT_OK)
            std::fprintf(stderr, "chebpint: n=%d new method: %s\n", n, chebpint_status_string(g.status_new));
        ResultRow row;
        row.experiment = "compare-geometric";
        row.n = n;
        row.m = g.m;
        row.workers = 1;
        row.error = g.error_geometric;
        row.cond2 = g.cond2_geometric;
        row.set_extra("T", g.T);
        row.set_extra("error_tr", g.error_tr);
        row.set_extra("error_new", g.error_new);
        row.set_extra("cond2_new", g.cond2_new);
        row.set_extra("status_geometric", static_cast<double>(g.status_geometric));
        row.set_extra("status_new", static_cast<double>(g.status_new));
        rows.push_back(row);
    }
    return rows;
}

// Median of `reps` runs by wall time.
chebpint_benchmark_result timed_run(chebpint_benchmark_kind kind, int p, int n, const RunConfig& cfg, int workers)
{
    std::vector<chebpint_benchmark_result> runs(cfg.reps);
    for (auto& r : runs)
        check(chebpint_run_benchmark(kind, p, n, cfg.T, cfg.tol, cfg.max_iter, workers, 0, &r), "bench");
    std::sort(runs.begin(), runs.end(),
              [](const auto& a, const auto& b) { return a.wall_seconds < b.wall_seconds; });
    return runs[runs.size() / 2];
}

std::vector<ResultRow> cmd_bench(const RunConfig& cfg)
{
    validate_n(cfg);
    const chebpint_benchmark_kind kind = parse_kind(cfg.kind);
    const int p = points_per_dim(cfg.m);
    if (cfg.n.size() != 1)
        throw UsageError{"bench takes exactly one --n"};
    if (cfg.reps < 1)
        throw UsageError{"--reps must be >= 1"};
    std::vector<int> workers = cfg.workers.empty() ? std::vector<int>{1, 2, 4} : cfg.workers;
    if (workers.front() != 1 || !std::is_sorted(workers.begin(), workers.end())
        || std::adjacent_find(workers.begin(), workers.end()) != workers.end())
        throw UsageError{"--workers for bench must be strictly ascending and start at 1"};
    const int n = cfg.n.front();

    std::vector<ResultRow> rows;
    double strong_base = 0.0, weak_base = 0.0;
    for (int s : workers) {
        const auto strong = timed_run(kind, p, n, cfg, s);
        const auto weak = timed_run(kind, p, 2 * s, cfg, s);
        if (s == 1) {
            strong_base = strong.wall_seconds;
            weak_base = weak.wall_seconds;
        }
        ResultRow row;
        row.experiment = std::string("bench-") + chebpint_benchmark_kind_name(kind);
        row.n = n;
        row.m = strong.m;
        row.workers = s;
        row.error = strong.error;
        row.residual = strong.residual;
        row.iterations = strong.iterations;
        set_phases(row, strong.phases);
        row.t_wall = strong.wall_seconds;
        row.speedup = strong_base / strong.wall_seconds;
        row.strong_eff = row.speedup / s;
        row.weak_eff = weak_base / weak.wall_seconds;
        row.set_extra("t_decompose", strong.decompose_seconds);
        row.set_extra("weak_n", 2.0 * s);
        row.set_extra("t_wall_weak", weak.wall_seconds);
        rows.push_back(row);
        if (s == 2 && n >= 64 && strong.m >= 64 * 64 && row.speedup < 1.0)
            std::fprintf(stderr, "chebpint: note: speedup below 1 at 2 workers (%.3f)\n", row.speedup);
    }
    return rows;
}

std::string join(const std::vector<int>& v)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? "," : "") << v[i];
    return os.str();
}

ResultSet make_result_set(const std::string& command, const RunConfig& cfg, std::vector<ResultRow> rows)
{
    ResultSet set;
    set.command = command;
    set.config = {{"n", join(cfg.n)},
                  {"m", std::to_string(cfg.m)},
                  {"T", chebpint::cli::format_double(cfg.T)},
                  {"tol", chebpint::cli::format_double(cfg.tol)},
                  {"max_iter", std::to_string(cfg.max_iter)},
                  {"workers", cfg.workers.empty() ? std::to_string(chebpint_resolve_workers(0)) : join(cfg.workers)}};
    if (command == "compare-geometric") {
        set.config.emplace_back("tau", chebpint::cli::format_double(cfg.tau));
        set.config.emplace_back("dt_last", chebpint::cli::format_double(cfg.dt_last));
    }
    if (command == "convergence" || command == "bench")
        set.config.emplace_back("kind", cfg.kind);
    set.rows = std::move(rows);
    return set;
}

void emit(const RunConfig& cfg, const ResultSet& set)
{
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!cfg.out.empty()) {
        file.open(cfg.out);
        if (!file) {
            std::fprintf(stderr, "chebpint: cannot open '%s' for writing\n", cfg.out.c_str());
            throw Failure{exit_numerical};
        }
        os = &file;
    }
    if (cfg.format == "json")
        chebpint::cli::write_json(*os, set);
    else
        chebpint::cli::write_csv(*os, set.rows);
    os->flush();
    if (!*os) {
        std::fprintf(stderr, "chebpint: write failed\n");
        throw Failure{exit_numerical};
    }
}

CLI::App* add_command(CLI::App& app, const char* name, const char* help, RunConfig& cfg)
{
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--n", cfg.n, "Time steps (comma-separated list where accepted)")->delimiter(',');
    sub->add_option("--tol", cfg.tol, "Tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", cfg.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
    sub->add_option("--workers", cfg.workers, "Worker count (list for bench); default $CHEBPINT_WORKERS or 1")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    return sub;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Parallel-in-time diagonalization solver experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", chebpint_version());

    RunConfig cfg;
    auto* decompose = add_command(app, "decompose", "Fast spectral decomposition vs eigensolver reference", cfg);
    decompose->add_option("--T", cfg.T, "Interval length; dt = T/n")->check(CLI::PositiveNumber);
    decompose->add_option("--dump", cfg.dump, "Write the decomposition to this file");
    decompose->add_flag("--skip-reference", cfg.skip_reference, "Skip the O(n^3) reference path");

    auto* convergence = add_command(app, "convergence", "Temporal error study on a benchmark", cfg);
    convergence->add_option("--kind", cfg.kind, "heat, wave or semilinear");
    convergence->add_option("--m", cfg.m, "Spatial unknowns (perfect square)");
    convergence->add_option("--T", cfg.T, "Final time")->check(CLI::PositiveNumber);

    auto* geometric = add_command(app, "compare-geometric", "Geometric-step baseline on the 1D periodic wave", cfg);
    geometric->add_option("--tau", cfg.tau, "Step growth factor (> 1)");
    geometric->add_option("--dt-last", cfg.dt_last, "Last step size")->check(CLI::PositiveNumber);
    geometric->add_option("--m", cfg.m, "Spatial points on [-1, 1)");

    auto* bench = add_command(app, "bench", "Strong and weak scaling over worker counts", cfg);
    bench->add_option("--kind", cfg.kind, "heat, wave or semilinear");
    bench->add_option("--m", cfg.m, "Spatial unknowns (perfect square)");
    bench->add_option("--T", cfg.T, "Final time")->check(CLI::PositiveNumber);
    bench->add_option("--reps", cfg.reps, "Repetitions per timing (median is reported)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        std::vector<ResultRow> rows;
        std::string command;
        if (decompose->parsed()) {
            command = "decompose";
            if (cfg.n.empty())
                cfg.n = {64};
            if (cfg.T == 0.0)
                cfg.T = 1.0;
            rows = cmd_decompose(cfg);
        } else if (convergence->parsed()) {
            command = "convergence";
            if (cfg.n.empty())
                cfg.n = {16, 32, 64, 128, 256};
            if (cfg.m == 0)
                cfg.m = 64 * 64;
            if (cfg.T == 0.0)
                cfg.T = 2.0;
            if (convergence->count("--tol") == 0)
                cfg.tol = 1e-8;
            rows = cmd_convergence(cfg);
        } else if (geometric->parsed()) {
            command = "compare-geometric";
            if (cfg.n.empty())
                cfg.n = {50};
            if (cfg.m == 0)
                cfg.m = 128;
            rows = cmd_compare_geometric(cfg);
        } else {
            command = "bench";
            if (cfg.n.empty())
                cfg.n = {64};
            if (cfg.m == 0)
                cfg.m = 64 * 64;
            if (cfg.T == 0.0)
                cfg.T = 2.0;
            if (bench->count("--tol") == 0)
                cfg.tol = 1e-8;
            rows = cmd_bench(cfg);
        }
        emit(cfg, make_result_set(command, cfg, std::move(rows)));
        return exit_ok;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "chebpint: %s\n", e.message.c_str());
        return exit_usage;
    } catch (const Failure& f) {
        return f.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "chebpint: %s\n", e.what());
        return exit_numerical;
    }
}
