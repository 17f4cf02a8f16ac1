#ifndef CHEBPINT_CHEBPINT_H
#define CHEBPINT_CHEBPINT_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(CHEBPINT_BUILDING_LIBRARY)
#    define CHEBPINT_API __declspec(dllexport)
#  else
#    define CHEBPINT_API __declspec(dllimport)
#  endif
#else
#  define CHEBPINT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning chebpint_status leaves a
 * thread-local message retrievable with chebpint_last_error() on failure. */
typedef enum chebpint_status
{
    CHEBPINT_OK = 0,
    CHEBPINT_INVALID_ARGUMENT,
    CHEBPINT_NON_CONVERGENCE,
    CHEBPINT_DUPLICATE_ROOTS,
    CHEBPINT_DEGENERATE_ROOT,
    CHEBPINT_ZERO_PIVOT,
    CHEBPINT_SINGULAR_MATRIX,
    CHEBPINT_SINGULAR_SHIFT,
    CHEBPINT_DIMENSION_MISMATCH,
    CHEBPINT_NON_REAL_SOLUTION,
    CHEBPINT_MAX_ITER_EXCEEDED,
    CHEBPINT_OVERFLOW,
    CHEBPINT_UNSUPPORTED_KIND,
    CHEBPINT_INVALID_GRID,
    CHEBPINT_IO,
    CHEBPINT_INTERNAL
} chebpint_status;

/* Complex numbers are passed as interleaved (re, im) double pairs. */

CHEBPINT_API const char* chebpint_version(void);
CHEBPINT_API const char* chebpint_status_string(chebpint_status status);
CHEBPINT_API const char* chebpint_last_error(void);

/* ---- spectral decomposition B = V D V^{-1} ---------------------------- */

typedef struct chebpint_decomposition chebpint_decomposition;

enum
{
    CHEBPINT_DECOMP_COND2 = 1,   /* estimate cond2(V) */
    CHEBPINT_DECOMP_RESIDUAL = 2 /* compute ||B - V D V^{-1}||_F / ||B||_F */
};

typedef struct chebpint_decomposition_info
{
    int n;
    double dt;
    double cond2;    /* NaN when not computed */
    double residual; /* NaN when not computed */
    int max_newton_iters;
} chebpint_decomposition_info;

/* Hybrid centered / backward-Euler time matrix on a uniform grid. workers <= 0
 * falls back to CHEBPINT_WORKERS, then 1. */
CHEBPINT_API chebpint_status chebpint_decompose(int n, double dt, double tol, int max_iter, int flags,
                                                int workers, chebpint_decomposition** out);

/* Trapezoidal-rule matrix on the grid dt_j = dt_last * tau^(j - n). */
CHEBPINT_API chebpint_status chebpint_decompose_geometric(int n, double tau, double dt_last, int flags,
                                                          chebpint_decomposition** out);

CHEBPINT_API chebpint_status chebpint_decomposition_load(const char* path, chebpint_decomposition** out);
CHEBPINT_API chebpint_status chebpint_decomposition_save(const chebpint_decomposition* decomp, const char* path);
CHEBPINT_API void chebpint_decomposition_destroy(chebpint_decomposition* decomp);

CHEBPINT_API chebpint_status chebpint_decomposition_get_info(const chebpint_decomposition* decomp,
                                                             chebpint_decomposition_info* info);
/* Copies n complex eigenvalues (2n doubles). */
CHEBPINT_API chebpint_status chebpint_decomposition_eigenvalues(const chebpint_decomposition* decomp,
                                                                double* out, size_t capacity);
/* Copies V or V^{-1} row-major (2 n^2 doubles). */
CHEBPINT_API chebpint_status chebpint_decomposition_matrix(const chebpint_decomposition* decomp, int inverse,
                                                           double* out, size_t capacity);

/* ---- spatial operators ------------------------------------------------ */

typedef struct chebpint_operator chebpint_operator;

/* -Delta_h, Dirichlet, p x p interior points with spacing h. */
CHEBPINT_API chebpint_status chebpint_operator_laplacian_2d(int points_per_dim, double h, chebpint_operator** out);
/* Periodic second difference on m points with spacing h. */
CHEBPINT_API chebpint_status chebpint_operator_laplacian_1d_periodic(int m, double h, chebpint_operator** out);
/* Dense real m x m matrix, row-major. */
CHEBPINT_API chebpint_status chebpint_operator_dense(int m, const double* row_major, chebpint_operator** out);
CHEBPINT_API void chebpint_operator_destroy(chebpint_operator* op);

CHEBPINT_API int chebpint_operator_dim(const chebpint_operator* op);
/* y = A x on complex vectors of length dim. */
CHEBPINT_API chebpint_status chebpint_operator_apply(const chebpint_operator* op, const double* x, double* y);
/* (sigma I + A) w = g. */
CHEBPINT_API chebpint_status chebpint_operator_shifted_solve(const chebpint_operator* op, double sigma_re,
                                                             double sigma_im, const double* g, double* w);

/* ---- linear all-at-once solves ---------------------------------------- */

/* Block arrays are real, n blocks of m values, block-major (value i of block
 * j at j*m + i). rhs and solution may not alias. */

/* (B kron I + I kron A) u = b. */
CHEBPINT_API chebpint_status chebpint_solve_first_order(const chebpint_decomposition* decomp,
                                                        const chebpint_operator* op, const double* rhs,
                                                        int workers, double* solution);
/* (B^2 kron I + I kron A) u = b. */
CHEBPINT_API chebpint_status chebpint_solve_second_order(const chebpint_decomposition* decomp,
                                                         const chebpint_operator* op, const double* rhs,
                                                         int workers, double* solution);

/* ---- experiments ------------------------------------------------------ */

typedef enum chebpint_benchmark_kind
{
    CHEBPINT_BENCH_HEAT = 0,
    CHEBPINT_BENCH_WAVE = 1,
    CHEBPINT_BENCH_SEMILINEAR = 2
} chebpint_benchmark_kind;

typedef struct chebpint_phase_times
{
    double assembly;
    double step_a;
    double step_b;
    double step_c;
} chebpint_phase_times;

typedef struct chebpint_benchmark_result
{
    int n;
    int m;
    int workers;
    double T;
    double error;               /* against the manufactured solution */
    double error_semi_discrete; /* against the exact spatially discrete solution */
    int iterations;
    double residual;
    double cond2; /* NaN unless requested */
    double decompose_seconds;
    chebpint_phase_times phases;
    double wall_seconds;
} chebpint_benchmark_result;

CHEBPINT_API chebpint_status chebpint_parse_benchmark_kind(const char* name, chebpint_benchmark_kind* kind);
CHEBPINT_API const char* chebpint_benchmark_kind_name(chebpint_benchmark_kind kind);

CHEBPINT_API chebpint_status chebpint_run_benchmark(chebpint_benchmark_kind kind, int points_per_dim, int n,
                                                    double T, double tol, int max_iter, int workers,
                                                    int compute_cond2, chebpint_benchmark_result* result);

typedef struct chebpint_decompose_report
{
    int n;
    double dt;
    int max_newton_iters;
    double cond2;
    double omega_fast;
    double omega_ref; /* NaN when the reference path is skipped */
    double eta;       /* NaN when the reference path is skipped */
    double fast_seconds;
    double ref_seconds;
} chebpint_decompose_report;

CHEBPINT_API chebpint_status chebpint_run_decompose_report(int n, double dt, double tol, int max_iter,
                                                           int workers, int with_reference,
                                                           chebpint_decompose_report* report);

typedef struct chebpint_geometric_row
{
    int n;
    int m;
    double T;
    double error_geometric; /* NaN when status_geometric != CHEBPINT_OK */
    double error_tr;
    double error_new;
    double cond2_geometric;
    double cond2_new;
    chebpint_status status_geometric;
    chebpint_status status_new;
} chebpint_geometric_row;

CHEBPINT_API chebpint_status chebpint_compare_geometric(double tau, double dt_last, int n, int m,
                                                        chebpint_geometric_row* row);

/* Positive values as-is, otherwise CHEBPINT_WORKERS, otherwise 1. */
CHEBPINT_API int chebpint_resolve_workers(int requested);

#ifdef __cplusplus
}
#endif

#endif /* CHEBPINT_CHEBPINT_H */
