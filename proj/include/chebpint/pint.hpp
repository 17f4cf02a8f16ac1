#ifndef CHEBPINT_PINT_HPP
#define CHEBPINT_PINT_HPP

#include <functional>
#include <optional>
#include <vector>

#include "chebpint/common.hpp"
#include "chebpint/spatial.hpp"
#include "chebpint/spectral.hpp"
#include "chebpint/timedisc.hpp"

namespace chebpint
{

/// Wall-clock seconds per phase, summed over iterations.
struct PhaseTimes
{
    double assembly = 0.0;
    double step_a = 0.0;
    double step_b = 0.0;
    double step_c = 0.0;

    double total() const { return assembly + step_a + step_b + step_c; }
};

struct SolveReport
{
    BlockVector solution;
    int iterations = 1;
    std::vector<double> residual_history;
    PhaseTimes phase_times;
    int worker_count = 1;
    /// ||Im u|| / ||u|| before the imaginary part was discarded (max over
    /// iterations for SNI).
    double imag_residue = 0.0;
};

/// (B kron I + I kron A) u = b by u = (V kron I) (D kron I + I kron A)^{-1} (V^{-1} kron I) b.
/// The returned solution is real (imaginary parts are dropped).
SolveReport solve_first_order_linear(const SpectralDecomposition& decomp, const SpatialOperator& op,
                                     const BlockVector& rhs, int workers = 1);

/// (B^2 kron I + I kron A) u = b: same pipeline with shifts lambda_j^2.
SolveReport solve_second_order_linear(const SpectralDecomposition& decomp, const SpatialOperator& op,
                                      const BlockVector& rhs, int workers = 1);

/// v = (B kron I) u - b_1 with b_1 = (u0 / (2 dt), 0, ..., 0).
BlockVector recover_velocity(const SpectralDecomposition& decomp, const BlockVector& u, const RVector& u0);

enum class JacobianMode
{
    exact,     ///< A + diag(a_k), factored per shift
    mean_shift ///< A + mean(a_k) I; approximate, reuses the fast shifted solver
};

struct SniOptions
{
    JacobianMode mode = JacobianMode::exact;
    std::optional<BlockVector> initial_guess; ///< zero when empty
};

/// Simplified Newton iteration for u' + A u + f(u) = r on the uniform grid of
/// `decomp`. Stops when ||b - (B kron I) u - (I kron A) u - F(u)||_2 / ||b||_2
/// <= tol. residual_history[0] belongs to the initial guess. Throws
/// Error(max_iter_exceeded) on failure.
SolveReport solve_semilinear_sni(const SemilinearProblem& problem, const SpectralDecomposition& decomp,
                                 double tol, int max_iter, int workers = 1,
                                 const SniOptions& options = {});

/// Relative residual of the semilinear all-at-once system at u.
double semilinear_residual(const SemilinearProblem& problem, const SpectralDecomposition& decomp,
                           const BlockVector& b, const BlockVector& u);

using SourceFn = std::function<CVector(double)>;

/// Sequential trapezoidal rule for u' + A u = g(t) with the given steps;
/// returns u_1..u_n.
BlockVector timestep_trapezoidal(const SpatialOperator& op, const std::vector<double>& steps,
                                 const CVector& u0, const SourceFn& source = {});
BlockVector timestep_trapezoidal(const SpatialOperator& op, const TimeGrid& grid, const CVector& u0,
                                 const SourceFn& source = {});
BlockVector timestep_trapezoidal(const SpatialOperator& op, const GeometricGrid& grid, const CVector& u0,
                                 const SourceFn& source = {});

/// max_j ||u_j - ref_j||_inf.
double global_error(const BlockVector& solution, const BlockVector& reference);

/// Dense all-at-once matrix B_t kron I + I kron A (x index fastest within a
/// block). Intended for small oracle checks.
CMatrix all_at_once_matrix(const CMatrix& Bt, const CMatrix& A);

} // namespace chebpint

#endif // CHEBPINT_PINT_HPP
