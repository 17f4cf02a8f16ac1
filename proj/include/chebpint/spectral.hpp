#ifndef CHEBPINT_SPECTRAL_HPP
#define CHEBPINT_SPECTRAL_HPP

#include <limits>
#include <span>
#include <string>

#include "chebpint/cheb_core.hpp"
#include "chebpint/common.hpp"

namespace chebpint
{

class WorkerPool;

/// B = V diag(eigenvalues) V^{-1} for an n x n time-discretization matrix.
///
/// Columns of V are eigenvectors. Both V and its inverse are stored
/// explicitly because the solver applies them as dense block transforms.
/// Immutable after construction and safe to share across workers.
struct SpectralDecomposition
{
    int n = 0;
    double dt = 0.0;
    CVector eigenvalues;
    CMatrix V;
    CMatrix Vinv;
    double cond2 = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    int max_newton_iters = 0;
};

/// Row k of column j is i^k U_k(x_j), k = 0..n-1.
CMatrix build_V(const RootSet& roots);

/// Thomas algorithm. `lower` and `upper` hold the n-1 off-diagonal entries.
/// Throws Error(zero_pivot) when a pivot magnitude drops below 1e-300.
CVector thomas_tridiagonal(std::span<const Complex> lower, std::span<const Complex> diag,
                           std::span<const Complex> upper, std::span<const Complex> rhs);

/// The vector b with S_n b = (0, ..., 0, i, 2)^T.
struct PentaSolution
{
    CVector b;
};

/// Applies the symmetric pentadiagonal S_n (stencil -1, 0, 2, 0, -1 with 3 in
/// the corners; S_1 = [4]) to x.
CVector apply_S(std::span<const Complex> x);

/// O(n): the even and odd unknowns of S_n decouple into two tridiagonal
/// systems.
PentaSolution solve_pentadiagonal_S(int n);

/// V^{-1} in O(n^2): W = Phi^{-1} = Psi S_n / 2 where row j of Psi solves
/// Tridiag{1, -2 x_j, 1} psi_j = (2 / p_n'(x_j)) b, then
/// V^{-1} = W diag((-i)^k).
CMatrix build_Vinv_fast(const RootSet& roots, const WorkerPool* pool = nullptr);

/// O(n^3) LU inverse, used as a cross-check. Throws Error(singular_matrix).
CMatrix build_Vinv_reference(const CMatrix& V);

/// 2-norm condition number. Full SVD up to n = 2048, power and inverse
/// iteration beyond. Throws Error(singular_matrix).
double cond2_estimate(const CMatrix& V);

/// ||B - V D V^{-1}||_F / ||B||_F.
double decomposition_residual(const CMatrix& B, const SpectralDecomposition& decomp);

struct DecomposeOptions
{
    double tol = 1e-10;
    int max_iter = 50;
    bool compute_cond2 = true;
    bool compute_residual = true;
    const WorkerPool* pool = nullptr;
};

/// Fast spectral decomposition of the hybrid centered/backward-Euler matrix.
SpectralDecomposition decompose(int n, double dt, const DecomposeOptions& options);
SpectralDecomposition decompose(int n, double dt, double tol = 1e-10);

/// Versioned dump: one text header line followed by little-endian IEEE-754
/// doubles (eigenvalues, V, V^{-1}; complex pairs, row-major).
void save_decomposition(const SpectralDecomposition& decomp, const std::string& path);
SpectralDecomposition load_decomposition(const std::string& path);

} // namespace chebpint

#endif // CHEBPINT_SPECTRAL_HPP
