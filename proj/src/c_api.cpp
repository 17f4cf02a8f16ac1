#include "chebpint/chebpint.h"

#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "chebpint/experiments.hpp"
#include "chebpint/pint.hpp"
#include "chebpint/spatial.hpp"
#include "chebpint/spectral.hpp"
#include "chebpint/timedisc.hpp"
#include "chebpint/worker_pool.hpp"

struct chebpint_decomposition
{
    chebpint::SpectralDecomposition value;
};

struct chebpint_operator
{
    chebpint::OperatorPtr value;
};

namespace
{

using namespace chebpint;

thread_local std::string last_error;

chebpint_status to_status(ErrorCode code)
{
    return static_cast<chebpint_status>(static_cast<int>(code));
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
chebpint_status guarded(Fn&& fn)
{
    try {
        last_error.clear();
        fn();
        return CHEBPINT_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return CHEBPINT_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return CHEBPINT_INTERNAL;
    } catch (...) {
        last_error = "unknown exception";
        return CHEBPINT_INTERNAL;
    }
}

void require_ptr(const void* p, const char* name)
{
    if (p == nullptr)
        fail(ErrorCode::invalid_argument, std::string(name) + " is null");
}

int decomposition_flags_ok(int flags)
{
    return (flags & ~(CHEBPINT_DECOMP_COND2 | CHEBPINT_DECOMP_RESIDUAL)) == 0;
}

CVector read_complex(const double* data, int size)
{
    CVector out(size);
    for (int i = 0; i < size; ++i)
        out(i) = Complex(data[2 * i], data[2 * i + 1]);
    return out;
}

void write_complex(const CVector& v, double* data)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        data[2 * i] = v(i).real();
        data[2 * i + 1] = v(i).imag();
    }
}

BlockVector read_blocks(const double* data, int n, int m)
{
    BlockVector out(n, m);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i)
            out.block(j)(i) = data[static_cast<std::size_t>(j) * m + i];
    return out;
}

void write_blocks(const BlockVector& b, double* data)
{
    const int n = b.blocks(), m = b.block_size();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i)
            data[static_cast<std::size_t>(j) * m + i] = b.block(j)(i).real();
}

chebpint_status linear_solve(const chebpint_decomposition* decomp, const chebpint_operator* op,
                             const double* rhs, int workers, double* solution, bool second_order)
{
    return guarded([&] {
        require_ptr(decomp, "decomp");
        require_ptr(op, "op");
        require_ptr(rhs, "rhs");
        require_ptr(solution, "solution");
        const auto& d = decomp->value;
        const BlockVector b = read_blocks(rhs, d.n, op->value->dim());
        const SolveReport report = second_order ? solve_second_order_linear(d, *op->value, b, workers)
                                                : solve_first_order_linear(d, *op->value, b, workers);
        write_blocks(report.solution, solution);
    });
}

} // namespace

extern "C" {

const char* chebpint_version(void)
{
    return "0.1.0";
}

const char* chebpint_status_string(chebpint_status status)
{
    if (status < CHEBPINT_OK || status > CHEBPINT_INTERNAL)
        return "unknown status";
    return chebpint::to_string(static_cast<ErrorCode>(status));
}

const char* chebpint_last_error(void)
{
    return last_error.c_str();
}

chebpint_status chebpint_decompose(int n, double dt, double tol, int max_iter, int flags, int workers,
                                   chebpint_decomposition** out)
{
    return guarded([&] {
        require_ptr(out, "out");
        *out = nullptr;
        require(decomposition_flags_ok(flags), ErrorCode::invalid_argument, "chebpint_decompose: unknown flags");
        const WorkerPool pool(resolve_worker_count(workers));
        DecomposeOptions options;
        options.tol = tol;
        options.max_iter = max_iter;
        options.compute_cond2 = (flags & CHEBPINT_DECOMP_COND2) != 0;
        options.compute_residual = (flags & CHEBPINT_DECOMP_RESIDUAL) != 0;
        options.pool = &pool;
        auto handle = std::make_unique<chebpint_decomposition>();
        handle->value = decompose(n, dt, options);
        *out = handle.release();
    });
}

chebpint_status chebpint_decompose_geometric(int n, double tau, double dt_last, int flags,
                                             chebpint_decomposition** out)
{
    return guarded([&] {
        require_ptr(out, "out");
        *out = nullptr;
        require(decomposition_flags_ok(flags), ErrorCode::invalid_argument,
                "chebpint_decompose_geometric: unknown flags");
        auto handle = std::make_unique<chebpint_decomposition>();
        handle->value = geometric_decomposition(geometric_grid(n, tau, dt_last),
                                                (flags & CHEBPINT_DECOMP_COND2) != 0);
        *out = handle.release();
    });
}

chebpint_status chebpint_decomposition_load(const char* path, chebpint_decomposition** out)
{
    return guarded([&] {
        require_ptr(out, "out");
        require_ptr(path, "path");
        *out = nullptr;
        auto handle = std::make_unique<chebpint_decomposition>();
        handle->value = load_decomposition(path);
        *out = handle.release();
    });
}

chebpint_status chebpint_decomposition_save(const chebpint_decomposition* decomp, const char* path)
{
    return guarded([&] {
        require_ptr(decomp, "decomp");
        require_ptr(path, "path");
        save_decomposition(decomp->value, path);
    });
}

void chebpint_decomposition_destroy(chebpint_decomposition* decomp)
{
    delete decomp;
}

chebpint_status chebpint_decomposition_get_info(const chebpint_decomposition* decomp,
                                                chebpint_decomposition_info* info)
{
    return guarded([&] {
        require_ptr(decomp, "decomp");
        require_ptr(info, "info");
        info->n = decomp->value.n;
        info->dt = decomp->value.dt;
        info->cond2 = decomp->value.cond2;
        info->residual = decomp->value.residual;
        info->max_newton_iters = decomp->value.max_newton_iters;
    });
}

chebpint_status chebpint_decomposition_eigenvalues(const chebpint_decomposition* decomp, double* out,
                                                   size_t capacity)
{
    return guarded([&] {
        require_ptr(decomp, "decomp");
        require_ptr(out, "out");
        const auto& ev = decomp->value.eigenvalues;
        require(capacity >= static_cast<size_t>(2 * ev.size()), ErrorCode::dimension_mismatch,
                "chebpint_decomposition_eigenvalues: buffer too small");
        write_complex(ev, out);
    });
}

chebpint_status chebpint_decomposition_matrix(const chebpint_decomposition* decomp, int inverse, double* out,
                                              size_t capacity)
{
    return guarded([&] {
        require_ptr(decomp, "decomp");
        require_ptr(out, "out");
        const CMatrix& M = inverse ? decomp->value.Vinv : decomp->value.V;
        require(capacity >= static_cast<size_t>(2 * M.size()), ErrorCode::dimension_mismatch,
                "chebpint_decomposition_matrix: buffer too small");
        size_t k = 0;
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            for (Eigen::Index c = 0; c < M.cols(); ++c) {
                out[k++] = M(r, c).real();
                out[k++] = M(r, c).imag();
            }
    });
}

chebpint_status chebpint_operator_laplacian_2d(int points_per_dim, double h, chebpint_operator** out)
{
    return guarded([&] {
        require_ptr(out, "out");
        *out = nullptr;
        auto handle = std::make_unique<chebpint_operator>();
        handle->value = make_laplacian_2d_dirichlet(points_per_dim, h);
        *out = handle.release();
    });
}

chebpint_status chebpint_operator_laplacian_1d_periodic(int m, double h, chebpint_operator** out)
{
    return guarded([&] {
        require_ptr(out, "out");
        *out = nullptr;
        auto handle = std::make_unique<chebpint_operator>();
        handle->value = make_laplacian_1d_periodic(m, h);
        *out = handle.release();
    });
}

chebpint_status chebpint_operator_dense(int m, const double* row_major, chebpint_operator** out)
{
    return guarded([&] {
        require_ptr(out, "out");
        require_ptr(row_major, "row_major");
        *out = nullptr;
        require(m >= 1, ErrorCode::invalid_argument, "chebpint_operator_dense: m must be >= 1");
        RMatrix A(m, m);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
                A(r, c) = row_major[static_cast<std::size_t>(r) * m + c];
        auto handle = std::make_unique<chebpint_operator>();
        handle->value = make_dense_operator(A);
        *out = handle.release();
    });
}

void chebpint_operator_destroy(chebpint_operator* op)
{
    delete op;
}

int chebpint_operator_dim(const chebpint_operator* op)
{
    return op ? op->value->dim() : 0;
}

chebpint_status chebpint_operator_apply(const chebpint_operator* op, const double* x, double* y)
{
    return guarded([&] {
        require_ptr(op, "op");
        require_ptr(x, "x");
        require_ptr(y, "y");
        const int m = op->value->dim();
        write_complex(op->value->apply(read_complex(x, m)), y);
    });
}

chebpint_status chebpint_operator_shifted_solve(const chebpint_operator* op, double sigma_re, double sigma_im,
                                                const double* g, double* w)
{
    return guarded([&] {
        require_ptr(op, "op");
        require_ptr(g, "g");
        require_ptr(w, "w");
        const int m = op->value->dim();
        write_complex(op->value->shifted_solve(Complex(sigma_re, sigma_im), read_complex(g, m)), w);
    });
}

chebpint_status chebpint_solve_first_order(const chebpint_decomposition* decomp, const chebpint_operator* op,
                                           const double* rhs, int workers, double* solution)
{
    return linear_solve(decomp, op, rhs, workers, solution, false);
}

chebpint_status chebpint_solve_second_order(const chebpint_decomposition* decomp, const chebpint_operator* op,
                                            const double* rhs, int workers, double* solution)
{
    return linear_solve(decomp, op, rhs, workers, solution, true);
}

chebpint_status chebpint_parse_benchmark_kind(const char* name, chebpint_benchmark_kind* kind)
{
    return guarded([&] {
        require_ptr(name, "name");
        require_ptr(kind, "kind");
        *kind = static_cast<chebpint_benchmark_kind>(parse_benchmark_kind(name));
    });
}

const char* chebpint_benchmark_kind_name(chebpint_benchmark_kind kind)
{
    if (kind < CHEBPINT_BENCH_HEAT || kind > CHEBPINT_BENCH_SEMILINEAR)
        return "unknown";
    return chebpint::to_string(static_cast<BenchmarkKind>(kind));
}

chebpint_status chebpint_run_benchmark(chebpint_benchmark_kind kind, int points_per_dim, int n, double T,
                                       double tol, int max_iter, int workers, int compute_cond2,
                                       chebpint_benchmark_result* result)
{
    return guarded([&] {
        require_ptr(result, "result");
        require(kind >= CHEBPINT_BENCH_HEAT && kind <= CHEBPINT_BENCH_SEMILINEAR, ErrorCode::unsupported_kind,
                "chebpint_run_benchmark: unsupported kind");
        const BenchmarkResult r = run_benchmark(static_cast<BenchmarkKind>(kind), points_per_dim, n, T, tol,
                                                max_iter, workers, compute_cond2 != 0);
        result->n = r.n;
        result->m = r.points_per_dim * r.points_per_dim;
        result->workers = r.workers;
        result->T = r.T;
        result->error = r.error;
        result->error_semi_discrete = r.error_semi_discrete;
        result->iterations = r.iterations;
        result->residual = r.residual;
        result->cond2 = r.cond2;
        result->decompose_seconds = r.decompose_seconds;
        result->phases = {r.phases.assembly, r.phases.step_a, r.phases.step_b, r.phases.step_c};
        result->wall_seconds = r.wall_seconds;
    });
}

chebpint_status chebpint_run_decompose_report(int n, double dt, double tol, int max_iter, int workers,
                                              int with_reference, chebpint_decompose_report* report)
{
    return guarded([&] {
        require_ptr(report, "report");
        const DecomposeReport r = decompose_report(n, dt, tol, max_iter, workers, with_reference != 0);
        *report = {r.n, r.dt, r.max_newton_iters, r.cond2, r.omega_fast, r.omega_ref, r.eta,
                   r.fast_seconds, r.ref_seconds};
    });
}

chebpint_status chebpint_compare_geometric(double tau, double dt_last, int n, int m, chebpint_geometric_row* row)
{
    return guarded([&] {
        require_ptr(row, "row");
        const GeometricComparisonRow r = compare_geometric(tau, dt_last, n, m);
        *row = {r.n, r.m, r.T, r.error_geometric, r.error_tr, r.error_new, r.cond2_geometric, r.cond2_new,
                to_status(r.status_geometric), to_status(r.status_new)};
    });
}

int chebpint_resolve_workers(int requested)
{
    try {
        return resolve_worker_count(requested);
    } catch (...) {
        return 1;
    }
}

} // extern "C"
