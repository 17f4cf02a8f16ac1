#include "chebpint/experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "chebpint/timedisc.hpp"
#include "chebpint/worker_pool.hpp"

namespace chebpint
{

namespace
{

using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Pairs every fast eigenvalue with its nearest unused reference eigenvalue.
double eigenvalue_mismatch(const CVector& fast, const CVector& ref)
{
    const Eigen::Index n = ref.size();
    std::vector<bool> used(n, false);
    double diff2 = 0.0;
    for (Eigen::Index j = 0; j < fast.size(); ++j) {
        Eigen::Index best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < n; ++k) {
            if (used[k])
                continue;
            const double d = std::abs(fast(j) - ref(k));
            if (d < best_dist) {
                best_dist = d;
                best = k;
            }
        }
        used[best] = true;
        diff2 += best_dist * best_dist;
    }
    return std::sqrt(diff2) / ref.norm();
}

} // namespace

DecomposeReport decompose_report(int n, double dt, double tol, int max_iter, int workers, bool with_reference)
{
    const WorkerPool pool(resolve_worker_count(workers));
    DecomposeOptions options;
    options.tol = tol;
    options.max_iter = max_iter;
    options.compute_cond2 = false;
    options.compute_residual = false;
    options.pool = &pool;

    DecomposeReport report;
    report.n = n;
    report.dt = dt;

    auto start = Clock::now();
    SpectralDecomposition decomp = decompose(n, dt, options);
    report.fast_seconds = seconds_since(start);
    report.max_newton_iters = decomp.max_newton_iters;
    report.cond2 = cond2_estimate(decomp.V);

    const CMatrix B = assemble_B(n, dt).toDense().cast<Complex>();
    report.omega_fast = decomposition_residual(B, decomp);

    report.omega_ref = kNaN;
    report.eta = kNaN;
    if (with_reference) {
        start = Clock::now();
        Eigen::EigenSolver<RMatrix> eig(B.real());
        if (eig.info() != Eigen::Success)
            fail(ErrorCode::non_convergence, "decompose_report: reference eigensolver failed");
        SpectralDecomposition ref;
        ref.n = n;
        ref.dt = dt;
        ref.eigenvalues = eig.eigenvalues();
        ref.V = eig.eigenvectors();
        ref.Vinv = build_Vinv_reference(ref.V);
        report.ref_seconds = seconds_since(start);
        report.omega_ref = decomposition_residual(B, ref);
        report.eta = eigenvalue_mismatch(decomp.eigenvalues, ref.eigenvalues);
    }
    return report;
}

namespace
{

BlockVector sampled_blocks(int n, double dt, const std::function<RVector(double)>& fn)
{
    const RVector first = fn(dt);
    BlockVector out(n, static_cast<int>(first.size()));
    out.block(0) = first.cast<Complex>();
    for (int j = 2; j <= n; ++j)
        out.block(j - 1) = fn(j * dt).cast<Complex>();
    return out;
}

double linear_residual(const BlockVector& b, const BlockVector& u, const SpatialOperator& op, double dt,
                       bool second_order)
{
    BlockVector Bu = apply_B(u, dt);
    if (second_order)
        Bu = apply_B(Bu, dt);
    CVector Au(u.block_size());
    for (int j = 0; j < u.blocks(); ++j) {
        op.apply_into(u.block(j), Au);
        Bu.block(j) += Au;
    }
    return (b.data() - Bu.data()).norm() / b.norm();
}

} // namespace

BenchmarkResult run_benchmark(BenchmarkKind kind, int points_per_dim, int n, double T, double tol,
                              int max_iter, int workers, bool compute_cond2)
{
    const auto wall_start = Clock::now();
    const int resolved = resolve_worker_count(workers);
    const WorkerPool pool(resolved);
    const BenchmarkProblem problem = make_benchmark(kind, points_per_dim, n, T);

    BenchmarkResult result;
    result.kind = kind;
    result.points_per_dim = points_per_dim;
    result.n = n;
    result.T = T;
    result.workers = resolved;
    result.cond2 = kNaN;

    auto start = Clock::now();
    DecomposeOptions options;
    options.compute_cond2 = compute_cond2;
    options.compute_residual = false;
    options.pool = &pool;
    const SpectralDecomposition decomp = decompose(n, problem.dt, options);
    result.decompose_seconds = seconds_since(start);
    if (compute_cond2)
        result.cond2 = decomp.cond2;

    SolveReport report;
    switch (kind) {
    case BenchmarkKind::heat: {
        start = Clock::now();
        const BlockVector b = rhs_first_order(problem.u0, problem.source, problem.dt);
        const double assembly = seconds_since(start);
        report = solve_first_order_linear(decomp, *problem.op, b, resolved);
        report.phase_times.assembly += assembly;
        result.residual = linear_residual(b, report.solution, *problem.op, problem.dt, false);
        break;
    }
    case BenchmarkKind::wave: {
        start = Clock::now();
        const BlockVector b = rhs_second_order(problem.u0, problem.u0dot, problem.source, problem.dt);
        const double assembly = seconds_since(start);
        report = solve_second_order_linear(decomp, *problem.op, b, resolved);
        report.phase_times.assembly += assembly;
        result.residual = linear_residual(b, report.solution, *problem.op, problem.dt, true);
        break;
    }
    case BenchmarkKind::semilinear:
        report = solve_semilinear_sni(problem.semilinear(), decomp, tol, max_iter, resolved);
        result.residual = report.residual_history.back();
        break;
    }
    result.iterations = report.iterations;
    result.phases = report.phase_times;
    result.wall_seconds = seconds_since(wall_start);

    const BlockVector exact = sampled_blocks(n, problem.dt, [&](double t) { return problem.exact_at(t); });
    result.error = global_error(report.solution, exact);
    const BlockVector semi
        = sampled_blocks(n, problem.dt, [&](double t) { return problem.semi_discrete_exact_at(t); });
    result.error_semi_discrete = global_error(report.solution, semi);
    return result;
}

std::vector<double> observed_orders(const std::vector<double>& errors)
{
    std::vector<double> out;
    for (std::size_t k = 1; k < errors.size(); ++k)
        out.push_back(std::log2(errors[k - 1] / errors[k]));
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size() && x.size() >= 2, ErrorCode::invalid_argument,
            "loglog_slope: need at least two matching points");
    const std::size_t k = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = k * sxx - sx * sx;
    require(denom != 0.0, ErrorCode::invalid_argument, "loglog_slope: x values must differ");
    return (k * sxy - sx * sy) / denom;
}

GeometricComparisonRow compare_geometric(double tau, double dt_last, int n, int m)
{
    require(n >= 2, ErrorCode::invalid_grid, "compare_geometric: n must be >= 2");
    const GeometricGrid grid = geometric_grid(n, tau, dt_last);
    const double dx = 2.0 / m;
    const auto A = make_laplacian_1d_periodic(m, dx);
    RVector u0(m);
    for (int i = 0; i < m; ++i)
        u0(i) = std::sin(2.0 * std::numbers::pi * (-1.0 + (i + 1) * dx));
    // u0 is the k = 2 discrete Fourier mode, so u(t) = cos(sqrt(mu) t) u0.
    const double omega = std::sqrt(A->eigenvalue(2));
    auto reference = [&](const std::vector<double>& times) {
        BlockVector out(static_cast<int>(times.size()), m);
        for (std::size_t j = 0; j < times.size(); ++j)
            out.block(static_cast<int>(j)) = (std::cos(omega * times[j]) * u0).cast<Complex>();
        return out;
    };
    auto u_part = [m](const BlockVector& w) { return BlockVector(CMatrix(w.data().topRows(m))); };

    GeometricComparisonRow row;
    row.n = n;
    row.m = m;
    row.T = grid.T;

    const auto Q = std::make_shared<FirstOrderSystemOperator>(A);
    CVector w0 = CVector::Zero(2 * m);
    w0.head(m) = u0.cast<Complex>();
    const BlockVector ref_geometric = reference(grid.t_points());

    row.error_tr = global_error(u_part(timestep_trapezoidal(*Q, grid, w0)), ref_geometric);

    row.error_geometric = kNaN;
    row.cond2_geometric = kNaN;
    try {
        const SpectralDecomposition geo = geometric_decomposition(grid);
        row.cond2_geometric = geo.cond2;
        // b = (B2^{-1} kron I) (w0/dt_1 - Q w0/2, 0, ...); B2^{-1} has entries 2 (-1)^{i-j}.
        const CVector first = w0 / grid.steps[0] - 0.5 * Q->apply(w0);
        BlockVector b(n, 2 * m);
        for (int j = 0; j < n; ++j)
            b.block(j) = ((j % 2 == 0) ? 2.0 : -2.0) * first;
        const SolveReport sol = solve_first_order_linear(geo, *Q, b);
        row.error_geometric = global_error(u_part(sol.solution), ref_geometric);
    } catch (const Error& e) {
        row.status_geometric = e.code();
    }

    row.error_new = kNaN;
    row.cond2_new = kNaN;
    try {
        const double dt = grid.T / n;
        const SpectralDecomposition decomp = decompose(n, dt);
        row.cond2_new = decomp.cond2;
        const std::vector<RVector> zero(n, RVector::Zero(m));
        const BlockVector b = rhs_second_order(u0, RVector::Zero(m), zero, dt);
        const SolveReport sol = solve_second_order_linear(decomp, *A, b);
        std::vector<double> times(n);
        for (int j = 0; j < n; ++j)
            times[j] = (j + 1) * dt;
        row.error_new = global_error(sol.solution, reference(times));
    } catch (const Error& e) {
        row.status_new = e.code();
    }
    return row;
}

} // namespace chebpint
