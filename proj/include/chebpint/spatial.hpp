#ifndef CHEBPINT_SPATIAL_HPP
#define CHEBPINT_SPATIAL_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "chebpint/common.hpp"

namespace chebpint
{

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Linear spatial operator A with complex-shifted solves (sigma I + A) w = g.
///
/// Implementations are immutable after construction; shifted solves use
/// per-call scratch and may run concurrently for different shifts.
class SpatialOperator
{
public:
    virtual ~SpatialOperator() = default;

    virtual int dim() const = 0;
    virtual void apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const = 0;
    virtual void shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                                    Eigen::Ref<CVector> w) const = 0;

    /// Assembled real matrix, when the operator has one.
    virtual std::optional<SparseMatrix> sparse_matrix() const { return std::nullopt; }

    CVector apply(const CVector& x) const;
    CVector shifted_solve(Complex sigma, const CVector& g) const;
};

using OperatorPtr = std::shared_ptr<const SpatialOperator>;

/// -Delta_h with homogeneous Dirichlet conditions on a p x p interior grid
/// (x index fastest). Shifted solves diagonalize with the separable discrete
/// sine transform.
class DirichletLaplacian2D final : public SpatialOperator
{
public:
    DirichletLaplacian2D(int points_per_dim, double h);

    int dim() const override { return p_ * p_; }
    int points_per_dim() const { return p_; }
    double h() const { return h_; }

    /// 1D eigenvalue (4/h^2) sin^2(k pi / (2 (p + 1))), k = 1..p.
    double eigenvalue_1d(int k) const { return mu_(k - 1); }

    void apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const override;
    void shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                            Eigen::Ref<CVector> w) const override;
    std::optional<SparseMatrix> sparse_matrix() const override;

private:
    int p_;
    double h_;
    RMatrix sine_; // sin(i k pi / (p + 1)), symmetric
    RVector mu_;
};

/// Circulant second difference (2 u_i - u_{i-1} - u_{i+1}) / h^2 on m
/// periodic points. Shifted solves use the discrete Fourier basis.
class PeriodicLaplacian1D final : public SpatialOperator
{
public:
    PeriodicLaplacian1D(int m, double h);

    int dim() const override { return m_; }
    double h() const { return h_; }
    /// (4/h^2) sin^2(pi k / m), k = 0..m-1.
    double eigenvalue(int k) const { return mu_(k); }

    void apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const override;
    void shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                            Eigen::Ref<CVector> w) const override;
    std::optional<SparseMatrix> sparse_matrix() const override;

private:
    int m_;
    double h_;
    CMatrix fourier_; // exp(-2 pi i j k / m)
    RVector mu_;
};

/// Dense matrix operator; shifted solves factor sigma I + A per call.
class DenseOperator final : public SpatialOperator
{
public:
    explicit DenseOperator(CMatrix A);

    int dim() const override { return static_cast<int>(A_.rows()); }
    const CMatrix& matrix() const { return A_; }

    void apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const override;
    void shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                            Eigen::Ref<CVector> w) const override;
    std::optional<SparseMatrix> sparse_matrix() const override;

private:
    CMatrix A_;
};

/// Sparse real matrix operator; shifted solves use a sparse LU per call.
class SparseOperator final : public SpatialOperator
{
public:
    explicit SparseOperator(SparseMatrix A);

    int dim() const override { return static_cast<int>(A_.rows()); }

    void apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const override;
    void shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                            Eigen::Ref<CVector> w) const override;
    std::optional<SparseMatrix> sparse_matrix() const override { return A_; }

private:
    SparseMatrix A_;
};

/// Q = [[0, -I], [A, 0]] acting on w = (u, v), the first-order form of
/// u'' + A u = g. (sigma I + Q) is solved through (sigma^2 I + A).
class FirstOrderSystemOperator final : public SpatialOperator
{
public:
    explicit FirstOrderSystemOperator(OperatorPtr A);

    int dim() const override { return 2 * A_->dim(); }

    void apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const override;
    void shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                            Eigen::Ref<CVector> w) const override;

private:
    OperatorPtr A_;
};

std::shared_ptr<DirichletLaplacian2D> make_laplacian_2d_dirichlet(int points_per_dim, double h);
std::shared_ptr<PeriodicLaplacian1D> make_laplacian_1d_periodic(int m, double h);
std::shared_ptr<DenseOperator> make_dense_operator(const CMatrix& A);
std::shared_ptr<DenseOperator> make_dense_operator(const RMatrix& A);
std::shared_ptr<SparseOperator> make_sparse_operator(const SparseMatrix& A);

/// u' + A u + f(u) = r(t) with a pointwise nonlinearity f.
struct SemilinearProblem
{
    OperatorPtr op;
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<RVector(double)> source;
    RVector u0;

    RVector apply_f(const RVector& u) const;
    /// Diagonal of the Jacobian of u -> f(u).
    RVector jac_diag(const RVector& u) const;
};

enum class BenchmarkKind
{
    heat,
    wave,
    semilinear
};

const char* to_string(BenchmarkKind kind) noexcept;
BenchmarkKind parse_benchmark_kind(const std::string& name);

/// Manufactured-solution problems on a square with p x p interior points:
///  - heat: u_t - Delta u = r on (0, pi)^2, u = sin x sin y e^{-t}
///  - wave: u_tt - Delta u = r on (0, 1)^2, u = x(x-1) y(y-1) sin(2 pi t)
///  - semilinear: u_t - Delta u + u^3 - u = r on (-1, 1)^2,
///    u = (x^2-1)(y^2-1) e^{-t}
struct BenchmarkProblem
{
    BenchmarkKind kind = BenchmarkKind::heat;
    int points_per_dim = 0;
    int n = 0;
    double T = 0.0;
    double dt = 0.0;
    double lower = 0.0; ///< domain is (lower, upper)^2
    double upper = 0.0;
    double h = 0.0;
    std::shared_ptr<const DirichletLaplacian2D> op;
    RVector u0;
    RVector u0dot;                    ///< wave only
    std::vector<RVector> source;      ///< r(t_j), j = 1..n
    std::function<double(double, double, double)> exact;
    std::function<double(double, double, double)> rhs; ///< r(x, y, t)
    std::function<double(double)> f;  ///< semilinear only
    std::function<double(double)> df; ///< semilinear only

    int dim() const { return points_per_dim * points_per_dim; }
    double coordinate(int i) const { return lower + (i + 1) * h; }
    RVector sample(const std::function<double(double, double, double)>& fn, double t) const;
    RVector exact_at(double t) const { return sample(exact, t); }

    /// Exact solution of the spatially discretized system. Equals exact_at
    /// for the wave and semilinear problems (the 5-point stencil is exact on
    /// their biquadratic profiles); for heat the profile is a discrete
    /// eigenvector and the amplitude ODE is solved in closed form.
    RVector semi_discrete_exact_at(double t) const;

    SemilinearProblem semilinear() const;
};

BenchmarkProblem make_benchmark(BenchmarkKind kind, int points_per_dim, int n, double T);

} // namespace chebpint

#endif // CHEBPINT_SPATIAL_HPP
