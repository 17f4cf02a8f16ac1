#include "chebpint/timedisc.hpp"

#include <cmath>
#include <string>

namespace chebpint
{

TimeGrid uniform_grid(int n, double T)
{
    require(n >= 1, ErrorCode::invalid_grid, "uniform_grid: n must be >= 1");
    require(T > 0.0 && std::isfinite(T), ErrorCode::invalid_grid, "uniform_grid: T must be > 0");
    return TimeGrid{n, T / n};
}

std::vector<double> GeometricGrid::t_points() const
{
    std::vector<double> t(steps.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < steps.size(); ++j) {
        acc += steps[j];
        t[j] = acc;
    }
    return t;
}

GeometricGrid geometric_grid(int n, double tau, double dt_last)
{
    require(n >= 1, ErrorCode::invalid_grid, "geometric_grid: n must be >= 1");
    require(tau > 1.0 && std::isfinite(tau), ErrorCode::invalid_grid, "geometric_grid: tau must be > 1");
    require(dt_last > 0.0 && std::isfinite(dt_last), ErrorCode::invalid_grid,
            "geometric_grid: dt_last must be > 0");
    GeometricGrid grid;
    grid.n = n;
    grid.tau = tau;
    grid.dt_last = dt_last;
    grid.steps.resize(n);
    for (int j = 1; j <= n; ++j)
        grid.steps[j - 1] = dt_last * std::pow(tau, static_cast<double>(j - n));
    grid.T = dt_last * (1.0 - std::pow(tau, -static_cast<double>(n))) / (1.0 - 1.0 / tau);
    return grid;
}

SparseMatrix assemble_B(int n, double dt)
{
    require(n >= 1, ErrorCode::invalid_argument, "assemble_B: n must be >= 1");
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::invalid_argument, "assemble_B: dt must be > 0");
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(2 * n);
    const double half = 0.5 / dt;
    for (int r = 0; r + 1 < n; ++r) {
        if (r > 0)
            entries.emplace_back(r, r - 1, -half);
        entries.emplace_back(r, r + 1, half);
    }
    if (n >= 2)
        entries.emplace_back(n - 1, n - 2, -1.0 / dt);
    entries.emplace_back(n - 1, n - 1, 1.0 / dt);
    SparseMatrix B(n, n);
    B.setFromTriplets(entries.begin(), entries.end());
    return B;
}

BlockVector apply_B(const BlockVector& in, double dt)
{
    const int n = in.blocks();
    require(n >= 1, ErrorCode::invalid_argument, "apply_B: empty block vector");
    BlockVector out(n, in.block_size());
    const double half = 0.5 / dt;
    for (int j = 0; j + 1 < n; ++j) {
        out.block(j) = half * in.block(j + 1);
        if (j > 0)
            out.block(j) -= half * in.block(j - 1);
    }
    out.block(n - 1) = in.block(n - 1) / dt;
    if (n >= 2)
        out.block(n - 1) -= in.block(n - 2) / dt;
    return out;
}

namespace
{

void check_sources(const std::vector<RVector>& g, Eigen::Index m)
{
    for (std::size_t j = 0; j < g.size(); ++j)
        if (g[j].size() != m)
            fail(ErrorCode::dimension_mismatch,
                 "rhs: source block " + std::to_string(j + 1) + " has wrong size");
}

} // namespace

BlockVector rhs_first_order(const RVector& u0, const std::vector<RVector>& g, double dt)
{
    const int n = static_cast<int>(g.size());
    require(n >= 1, ErrorCode::invalid_argument, "rhs_first_order: need at least one block");
    require(dt > 0.0, ErrorCode::invalid_argument, "rhs_first_order: dt must be > 0");
    check_sources(g, u0.size());
    BlockVector b(n, static_cast<int>(u0.size()));
    for (int j = 0; j < n; ++j)
        b.block(j) = g[j].cast<Complex>();
    b.block(0) += (u0 / (2.0 * dt)).cast<Complex>();
    return b;
}

BlockVector rhs_second_order(const RVector& u0, const RVector& u0dot,
                             const std::vector<RVector>& g, double dt)
{
    const int n = static_cast<int>(g.size());
    require(n >= 2, ErrorCode::invalid_grid, "rhs_second_order: need n >= 2");
    require(dt > 0.0, ErrorCode::invalid_argument, "rhs_second_order: dt must be > 0");
    require(u0dot.size() == u0.size(), ErrorCode::dimension_mismatch,
            "rhs_second_order: u0 and u0dot differ in size");
    check_sources(g, u0.size());
    const int m = static_cast<int>(u0.size());

    BlockVector b1(n, m);
    b1.block(0) = (u0 / (2.0 * dt)).cast<Complex>();
    BlockVector b = apply_B(b1, dt);
    b.block(0) += (u0dot / (2.0 * dt)).cast<Complex>();
    for (int j = 0; j < n; ++j)
        b.block(j) += g[j].cast<Complex>();
    return b;
}

TrSystem assemble_TR_system(const GeometricGrid& grid)
{
    const int n = grid.n;
    require(n >= 1 && static_cast<int>(grid.steps.size()) == n, ErrorCode::invalid_grid,
            "assemble_TR_system: malformed grid");
    std::vector<Eigen::Triplet<double>> e1, e2;
    for (int i = 0; i < n; ++i) {
        const double inv = 1.0 / grid.steps[i];
        e1.emplace_back(i, i, inv);
        e2.emplace_back(i, i, 0.5);
        if (i > 0) {
            e1.emplace_back(i, i - 1, -inv);
            e2.emplace_back(i, i - 1, 0.5);
        }
    }
    TrSystem sys;
    sys.B1.resize(n, n);
    sys.B1.setFromTriplets(e1.begin(), e1.end());
    sys.B2.resize(n, n);
    sys.B2.setFromTriplets(e2.begin(), e2.end());

    // B2 X = B1 by forward substitution: X_i = 2 B1_i - X_{i-1}.
    const RMatrix B1 = sys.B1.toDense();
    sys.B = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        sys.B.row(i) = 2.0 * B1.row(i);
        if (i > 0)
            sys.B.row(i) -= sys.B.row(i - 1);
    }
    return sys;
}

SpectralDecomposition geometric_decomposition(const GeometricGrid& grid, bool compute_cond2)
{
    const int n = grid.n;
    require(n >= 1 && static_cast<int>(grid.steps.size()) == n, ErrorCode::invalid_grid,
            "geometric_decomposition: malformed grid");

    std::vector<double> p(n, 1.0);
    for (int k = 1; k < n; ++k) {
        const double tk = std::pow(grid.tau, static_cast<double>(k));
        p[k] = p[k - 1] * (1.0 + tk) / (1.0 - tk);
        if (!std::isfinite(p[k]))
            fail(ErrorCode::overflow, "geometric_decomposition: p_" + std::to_string(k) + " overflows");
    }
    // Inverse of the unit lower-triangular Toeplitz factor is Toeplitz too.
    std::vector<double> q(n, 0.0);
    q[0] = 1.0;
    for (int k = 1; k < n; ++k) {
        double acc = 0.0;
        for (int i = 1; i <= k; ++i)
            acc -= p[i] * q[k - i];
        q[k] = acc;
        if (!std::isfinite(q[k]))
            fail(ErrorCode::overflow, "geometric_decomposition: inverse entry overflows");
    }
    // Column j of Vt holds p_0..p_{n-1-j}; prefix sums give its squared norm.
    std::vector<double> col_norm2(n + 1, 0.0);
    for (int k = 0; k < n; ++k)
        col_norm2[k + 1] = col_norm2[k] + p[k] * p[k];
    std::vector<double> scale(n);
    for (int j = 0; j < n; ++j) {
        const double s2 = col_norm2[n - j];
        if (!std::isfinite(s2))
            fail(ErrorCode::overflow, "geometric_decomposition: column norm overflows");
        scale[j] = 1.0 / std::sqrt(s2);
    }

    SpectralDecomposition out;
    out.n = n;
    out.dt = grid.dt_last;
    out.eigenvalues.resize(n);
    for (int j = 0; j < n; ++j)
        out.eigenvalues(j) = 2.0 / grid.steps[j];
    out.V = CMatrix::Zero(n, n);
    out.Vinv = CMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) {
            out.V(i, j) = p[i - j] * scale[j];
            out.Vinv(i, j) = q[i - j] / scale[i];
        }
    if (compute_cond2)
        out.cond2 = cond2_estimate(out.V);
    out.residual = decomposition_residual(assemble_TR_system(grid).B.cast<Complex>(), out);
    return out;
}

} // namespace chebpint
