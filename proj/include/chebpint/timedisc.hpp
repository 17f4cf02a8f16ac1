#ifndef CHEBPINT_TIMEDISC_HPP
#define CHEBPINT_TIMEDISC_HPP

#include <vector>

#include <Eigen/SparseCore>

#include "chebpint/common.hpp"
#include "chebpint/spectral.hpp"

namespace chebpint
{

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Uniform grid t_j = j dt, j = 0..n.
struct TimeGrid
{
    int n = 0;
    double dt = 0.0;

    double T() const { return n * dt; }
    double t(int j) const { return j * dt; }
};

TimeGrid uniform_grid(int n, double T);

/// Geometrically growing steps dt_j = dt_last * tau^(j - n), j = 1..n.
struct GeometricGrid
{
    int n = 0;
    double tau = 0.0;
    double dt_last = 0.0;
    std::vector<double> steps;
    double T = 0.0;

    /// t_1..t_n (cumulative sums of steps).
    std::vector<double> t_points() const;
};

GeometricGrid geometric_grid(int n, double tau, double dt_last);

/// n blocks of m unknowns. Stored as an m x n matrix whose column j is the
/// spatial vector at t_{j+1}.
class BlockVector
{
public:
    BlockVector() = default;
    BlockVector(int n, int m) : data_(CMatrix::Zero(m, n)) {}
    explicit BlockVector(CMatrix data) : data_(std::move(data)) {}

    int blocks() const { return static_cast<int>(data_.cols()); }
    int block_size() const { return static_cast<int>(data_.rows()); }

    auto block(int j) { return data_.col(j); }
    auto block(int j) const { return data_.col(j); }

    CMatrix& data() { return data_; }
    const CMatrix& data() const { return data_; }

    double norm() const { return data_.norm(); }

private:
    CMatrix data_;
};

/// Hybrid centered / backward-Euler time matrix:
/// rows 1..n-1 are (-1/(2dt), 0, 1/(2dt)), the last row is (-1/dt, 1/dt).
SparseMatrix assemble_B(int n, double dt);

/// out = (B kron I) in, evaluated by the stencil.
BlockVector apply_B(const BlockVector& in, double dt);

/// Blocks (u0/(2dt) + g_1, g_2, ..., g_n).
BlockVector rhs_first_order(const RVector& u0, const std::vector<RVector>& g, double dt);

/// Right-hand side of (B^2 kron I + I kron A) u = b for u'' + A u = g:
/// b = b_2 + (B kron I) b_1 + g with b_1 = (u0/(2dt), 0, ...) and
/// b_2 = (u0dot/(2dt), 0, ...). For n >= 3 this is
/// (u0dot/(2dt) + g_1, -u0/(4dt^2) + g_2, g_3, ..., g_n).
BlockVector rhs_second_order(const RVector& u0, const RVector& u0dot,
                             const std::vector<RVector>& g, double dt);

/// Trapezoidal-rule all-at-once matrices on a geometric grid:
/// B1 lower bidiagonal (1/dt_j on the diagonal, -1/dt_j below), B2 lower
/// bidiagonal of 1/2, and B = B2^{-1} B1.
struct TrSystem
{
    RMatrix B;
    SparseMatrix B1;
    SparseMatrix B2;
};

TrSystem assemble_TR_system(const GeometricGrid& grid);

/// Closed-form diagonalization of the trapezoidal B: eigenvalues 2/dt_j and
/// V = Vt Dt with Vt unit lower-triangular Toeplitz built from
/// p_j = prod_{l<=j} (1 + tau^l)/(1 - tau^l) and Dt normalizing each column.
/// V^{-1} comes from inverting the Toeplitz factor by substitution.
/// Throws Error(overflow) when p_j or the column norms are not representable.
SpectralDecomposition geometric_decomposition(const GeometricGrid& grid, bool compute_cond2 = true);

} // namespace chebpint

#endif // CHEBPINT_TIMEDISC_HPP
