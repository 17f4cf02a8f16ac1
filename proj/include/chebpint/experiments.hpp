#ifndef CHEBPINT_EXPERIMENTS_HPP
#define CHEBPINT_EXPERIMENTS_HPP

#include <vector>

#include "chebpint/pint.hpp"
#include "chebpint/spatial.hpp"

namespace chebpint
{

/// Fast decomposition against an eigensolver + LU reference path.
struct DecomposeReport
{
    int n = 0;
    double dt = 0.0;
    int max_newton_iters = 0;
    double cond2 = 0.0;
    double omega_fast = 0.0; ///< ||B - V D V^{-1}||_F / ||B||_F, fast path
    double omega_ref = 0.0;  ///< same for the reference path (NaN when skipped)
    double eta = 0.0;        ///< ||D_ref - D_fast||_F / ||D_ref||_F after matching (NaN when skipped)
    double fast_seconds = 0.0;
    double ref_seconds = 0.0;
};

DecomposeReport decompose_report(int n, double dt, double tol, int max_iter, int workers,
                                 bool with_reference = true);

struct BenchmarkResult
{
    BenchmarkKind kind = BenchmarkKind::heat;
    int points_per_dim = 0;
    int n = 0;
    double T = 0.0;
    int workers = 1;
    double error = 0.0;               ///< against the manufactured solution
    double error_semi_discrete = 0.0; ///< against the exact semi-discrete solution
    int iterations = 1;
    double residual = 0.0; ///< relative all-at-once residual
    double cond2 = 0.0;    ///< NaN unless requested
    double decompose_seconds = 0.0;
    PhaseTimes phases;
    double wall_seconds = 0.0; ///< decomposition + solve
};

BenchmarkResult run_benchmark(BenchmarkKind kind, int points_per_dim, int n, double T, double tol,
                              int max_iter, int workers, bool compute_cond2 = false);

/// log2(e_{k-1} / e_k) for consecutive errors on a doubling sequence.
std::vector<double> observed_orders(const std::vector<double>& errors);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// One n of the geometric-step comparison on the periodic 1D wave equation
/// u'' + A u = 0, u(0) = sin(2 pi x), u'(0) = 0 with m points on [-1, 1).
struct GeometricComparisonRow
{
    int n = 0;
    int m = 0;
    double T = 0.0;
    double error_geometric = 0.0; ///< NaN when status_geometric != ok
    double error_tr = 0.0;
    double error_new = 0.0;
    double cond2_geometric = 0.0;
    double cond2_new = 0.0;
    ErrorCode status_geometric = ErrorCode::ok;
    ErrorCode status_new = ErrorCode::ok;
};

GeometricComparisonRow compare_geometric(double tau, double dt_last, int n, int m);

} // namespace chebpint

#endif // CHEBPINT_EXPERIMENTS_HPP
