#include "chebpint/pint.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "chebpint/worker_pool.hpp"

namespace chebpint
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Y.col(j) = sum_k M(j, k) X.col(k). Every column is one gemv with a fixed
// summation order, so the split across workers never changes the result.
void block_transform(const CMatrix& M, const CMatrix& X, CMatrix& Y, const WorkerPool& pool)
{
    Y.resize(X.rows(), M.rows());
    pool.parallel_for(static_cast<int>(M.rows()), [&](int j) {
        Y.col(j).noalias() = X * M.row(j).transpose();
    });
}

void check_linear_inputs(const SpectralDecomposition& decomp, const SpatialOperator& op,
                         const BlockVector& rhs, const char* where)
{
    if (rhs.blocks() != decomp.n)
        fail(ErrorCode::dimension_mismatch, std::string(where) + ": rhs has " + std::to_string(rhs.blocks())
                                                + " blocks, decomposition has n = " + std::to_string(decomp.n));
    if (rhs.block_size() != op.dim())
        fail(ErrorCode::dimension_mismatch, std::string(where) + ": block size " + std::to_string(rhs.block_size())
                                                + " does not match operator dimension " + std::to_string(op.dim()));
}

// Drops the imaginary part and returns ||Im u|| / ||u||.
double project_real(CMatrix& U)
{
    const double total = U.norm();
    const double imag = U.imag().norm();
    U.imag().setZero();
    return total > 0.0 ? imag / total : imag;
}

SolveReport diagonalized_solve(const SpectralDecomposition& decomp, const SpatialOperator& op,
                               const BlockVector& rhs, const CVector& shifts, int workers)
{
    const WorkerPool pool(resolve_worker_count(workers));
    SolveReport report;
    report.worker_count = pool.size();

    auto start = Clock::now();
    CMatrix G;
    block_transform(decomp.Vinv, rhs.data(), G, pool);
    report.phase_times.step_a = seconds_since(start);

    start = Clock::now();
    CMatrix W(G.rows(), G.cols());
    pool.parallel_for(static_cast<int>(shifts.size()), [&](int j) {
        op.shifted_solve_into(shifts(j), G.col(j), W.col(j));
    });
    report.phase_times.step_b = seconds_since(start);

    start = Clock::now();
    CMatrix U;
    block_transform(decomp.V, W, U, pool);
    report.phase_times.step_c = seconds_since(start);

    report.imag_residue = project_real(U);
    if (!U.allFinite())
        fail(ErrorCode::singular_shift, "diagonalized solve produced non-finite values");
    if (report.imag_residue > 1e-6)
        fail(ErrorCode::non_real_solution,
             "imaginary residue " + std::to_string(report.imag_residue) + " exceeds 1e-6 relative");
    report.solution = BlockVector(std::move(U));
    return report;
}

} // namespace

SolveReport solve_first_order_linear(const SpectralDecomposition& decomp, const SpatialOperator& op,
                                     const BlockVector& rhs, int workers)
{
    check_linear_inputs(decomp, op, rhs, "solve_first_order_linear");
    return diagonalized_solve(decomp, op, rhs, decomp.eigenvalues, workers);
}

SolveReport solve_second_order_linear(const SpectralDecomposition& decomp, const SpatialOperator& op,
                                      const BlockVector& rhs, int workers)
{
    check_linear_inputs(decomp, op, rhs, "solve_second_order_linear");
    require(decomp.n >= 2, ErrorCode::invalid_grid, "solve_second_order_linear: need n >= 2");
    const CVector shifts = decomp.eigenvalues.array().square();
    return diagonalized_solve(decomp, op, rhs, shifts, workers);
}

BlockVector recover_velocity(const SpectralDecomposition& decomp, const BlockVector& u, const RVector& u0)
{
    require(u.blocks() == decomp.n, ErrorCode::dimension_mismatch, "recover_velocity: block count mismatch");
    require(u.block_size() == u0.size(), ErrorCode::dimension_mismatch, "recover_velocity: u0 size mismatch");
    BlockVector v = apply_B(u, decomp.dt);
    v.block(0) -= (u0 / (2.0 * decomp.dt)).cast<Complex>();
    return v;
}

namespace
{

BlockVector nonlinear_term(const SemilinearProblem& problem, const BlockVector& u)
{
    BlockVector out(u.blocks(), u.block_size());
    const auto& f = problem.f;
    out.data() = u.data().real().unaryExpr([&](double x) { return f(x); }).cast<Complex>();
    return out;
}

RVector averaged_jacobian(const SemilinearProblem& problem, const BlockVector& u)
{
    const auto& df = problem.df;
    const RMatrix J = u.data().real().unaryExpr([&](double x) { return df(x); });
    return J.rowwise().mean();
}

// (B kron I) u + (I kron A) u + F(u).
BlockVector semilinear_apply(const SemilinearProblem& problem, const SpectralDecomposition& decomp,
                             const BlockVector& u)
{
    BlockVector out = apply_B(u, decomp.dt);
    CVector tmp(u.block_size());
    for (int j = 0; j < u.blocks(); ++j) {
        problem.op->apply_into(u.block(j), tmp);
        out.block(j) += tmp;
    }
    out.data() += nonlinear_term(problem, u).data();
    return out;
}

} // namespace

double semilinear_residual(const SemilinearProblem& problem, const SpectralDecomposition& decomp,
                           const BlockVector& b, const BlockVector& u)
{
    const double bnorm = b.norm();
    const double r = (b.data() - semilinear_apply(problem, decomp, u).data()).norm();
    return bnorm > 0.0 ? r / bnorm : r;
}

SolveReport solve_semilinear_sni(const SemilinearProblem& problem, const SpectralDecomposition& decomp,
                                 double tol, int max_iter, int workers, const SniOptions& options)
{
    require(tol > 0.0, ErrorCode::invalid_argument, "solve_semilinear_sni: tol must be > 0");
    require(max_iter >= 1, ErrorCode::invalid_argument, "solve_semilinear_sni: max_iter must be >= 1");
    require(problem.op && problem.f && problem.df && problem.source, ErrorCode::invalid_argument,
            "solve_semilinear_sni: incomplete problem");
    const int n = decomp.n;
    const int m = problem.op->dim();
    require(problem.u0.size() == m, ErrorCode::dimension_mismatch, "solve_semilinear_sni: u0 size mismatch");

    SolveReport report;
    report.worker_count = resolve_worker_count(workers);
    report.iterations = 0;

    auto start = Clock::now();
    std::vector<RVector> g;
    g.reserve(n);
    for (int j = 1; j <= n; ++j)
        g.push_back(problem.source(j * decomp.dt));
    const BlockVector b = rhs_first_order(problem.u0, g, decomp.dt);
    std::optional<SparseMatrix> A_lap;
    if (options.mode == JacobianMode::exact) {
        A_lap = problem.op->sparse_matrix();
        require(A_lap.has_value(), ErrorCode::invalid_argument,
                "solve_semilinear_sni: exact Jacobian mode needs an assembled operator");
    }
    BlockVector u = options.initial_guess.value_or(BlockVector(n, m));
    require(u.blocks() == n && u.block_size() == m, ErrorCode::dimension_mismatch,
            "solve_semilinear_sni: initial guess has wrong shape");
    report.residual_history.push_back(semilinear_residual(problem, decomp, b, u));
    report.phase_times.assembly += seconds_since(start);
    if (report.residual_history.back() <= tol) {
        report.solution = std::move(u);
        return report;
    }

    for (int k = 1; k <= max_iter; ++k) {
        start = Clock::now();
        const RVector a = averaged_jacobian(problem, u);
        BlockVector rhs = b;
        rhs.data() -= nonlinear_term(problem, u).data();
        OperatorPtr op_k = problem.op;
        CVector shifts = decomp.eigenvalues;
        if (options.mode == JacobianMode::exact) {
            rhs.data() += a.cast<Complex>().asDiagonal() * u.data();
            SparseMatrix shifted = *A_lap;
            for (int i = 0; i < m; ++i)
                shifted.coeffRef(i, i) += a(i);
            op_k = make_sparse_operator(shifted);
        } else {
            // A constant shift folds into the time eigenvalues.
            const double abar = a.mean();
            rhs.data() += abar * u.data();
            shifts.array() += abar;
        }
        report.phase_times.assembly += seconds_since(start);

        SolveReport step = diagonalized_solve(decomp, *op_k, rhs, shifts, report.worker_count);
        report.phase_times.step_a += step.phase_times.step_a;
        report.phase_times.step_b += step.phase_times.step_b;
        report.phase_times.step_c += step.phase_times.step_c;
        report.imag_residue = std::max(report.imag_residue, step.imag_residue);
        u = std::move(step.solution);

        start = Clock::now();
        report.residual_history.push_back(semilinear_residual(problem, decomp, b, u));
        report.phase_times.assembly += seconds_since(start);
        report.iterations = k;
        if (!std::isfinite(report.residual_history.back()))
            break;
        if (report.residual_history.back() <= tol) {
            report.solution = std::move(u);
            return report;
        }
    }
    fail(ErrorCode::max_iter_exceeded,
         "simplified Newton iteration did not reach tol " + std::to_string(tol) + " in "
             + std::to_string(report.iterations) + " iterations (last residual "
             + std::to_string(report.residual_history.back()) + ")");
}

BlockVector timestep_trapezoidal(const SpatialOperator& op, const std::vector<double>& steps,
                                 const CVector& u0, const SourceFn& source)
{
    const int n = static_cast<int>(steps.size());
    require(n >= 1, ErrorCode::invalid_grid, "timestep_trapezoidal: need at least one step");
    require(u0.size() == op.dim(), ErrorCode::dimension_mismatch, "timestep_trapezoidal: u0 size mismatch");
    BlockVector out(n, op.dim());
    CVector prev = u0;
    CVector Au(op.dim());
    double t = 0.0;
    CVector g_prev = source ? source(0.0) : CVector();
    for (int j = 0; j < n; ++j) {
        const double dt = steps[j];
        require(dt > 0.0 && std::isfinite(dt), ErrorCode::invalid_grid, "timestep_trapezoidal: bad step");
        t += dt;
        // (I + dt/2 A) u_j = (I - dt/2 A) u_{j-1} + dt/2 (g_{j-1} + g_j), scaled by 2/dt.
        op.apply_into(prev, Au);
        CVector rhs = (2.0 / dt) * prev - Au;
        if (source) {
            CVector g = source(t);
            rhs += g_prev + g;
            g_prev = std::move(g);
        }
        op.shifted_solve_into(Complex(2.0 / dt, 0.0), rhs, out.block(j));
        prev = out.block(j);
    }
    return out;
}

BlockVector timestep_trapezoidal(const SpatialOperator& op, const TimeGrid& grid, const CVector& u0,
                                 const SourceFn& source)
{
    return timestep_trapezoidal(op, std::vector<double>(grid.n, grid.dt), u0, source);
}

BlockVector timestep_trapezoidal(const SpatialOperator& op, const GeometricGrid& grid, const CVector& u0,
                                 const SourceFn& source)
{
    return timestep_trapezoidal(op, grid.steps, u0, source);
}

double global_error(const BlockVector& solution, const BlockVector& reference)
{
    require(solution.blocks() == reference.blocks() && solution.block_size() == reference.block_size(),
            ErrorCode::dimension_mismatch, "global_error: shape mismatch");
    if (solution.blocks() == 0 || solution.block_size() == 0)
        return 0.0;
    return (solution.data() - reference.data()).cwiseAbs().maxCoeff();
}

CMatrix all_at_once_matrix(const CMatrix& Bt, const CMatrix& A)
{
    require(Bt.rows() == Bt.cols() && A.rows() == A.cols(), ErrorCode::invalid_argument,
            "all_at_once_matrix: square inputs required");
    const Eigen::Index n = Bt.rows(), m = A.rows();
    CMatrix K = CMatrix::Zero(n * m, n * m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            K.block(i * m, j * m, m, m) = Bt(i, j) * CMatrix::Identity(m, m);
        K.block(i * m, i * m, m, m) += A;
    }
    return K;
}

} // namespace chebpint
