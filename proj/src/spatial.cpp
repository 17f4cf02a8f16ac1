#include "chebpint/spatial.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>
#include <Eigen/SparseLU>

namespace chebpint
{

namespace
{

constexpr double kShiftFloor = 1e-12;
constexpr double pi = std::numbers::pi;

void check_dims(const SpatialOperator& op, Eigen::Index in, Eigen::Index out, const char* where)
{
    if (in != op.dim() || out != op.dim())
        fail(ErrorCode::dimension_mismatch, std::string(where) + ": vector size does not match operator");
}

} // namespace

CVector SpatialOperator::apply(const CVector& x) const
{
    CVector y(dim());
    apply_into(x, y);
    return y;
}

CVector SpatialOperator::shifted_solve(Complex sigma, const CVector& g) const
{
    CVector w(dim());
    shifted_solve_into(sigma, g, w);
    return w;
}

// ---------------------------------------------------------------------------
// DirichletLaplacian2D

DirichletLaplacian2D::DirichletLaplacian2D(int points_per_dim, double h)
    : p_(points_per_dim), h_(h)
{
    require(points_per_dim >= 1, ErrorCode::invalid_argument, "laplacian_2d: points_per_dim must be >= 1");
    require(h > 0.0 && std::isfinite(h), ErrorCode::invalid_argument, "laplacian_2d: h must be > 0");
    sine_.resize(p_, p_);
    mu_.resize(p_);
    const double scale = pi / (p_ + 1);
    for (int i = 0; i < p_; ++i) {
        for (int k = 0; k < p_; ++k)
            sine_(i, k) = std::sin((i + 1) * (k + 1) * scale);
        const double s = std::sin(0.5 * (i + 1) * scale);
        mu_(i) = 4.0 / (h_ * h_) * s * s;
    }
}

void DirichletLaplacian2D::apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const
{
    check_dims(*this, x.size(), y.size(), "laplacian_2d::apply");
    const double inv_h2 = 1.0 / (h_ * h_);
    for (int iy = 0; iy < p_; ++iy)
        for (int ix = 0; ix < p_; ++ix) {
            const int c = ix + p_ * iy;
            Complex v = 4.0 * x(c);
            if (ix > 0)
                v -= x(c - 1);
            if (ix + 1 < p_)
                v -= x(c + 1);
            if (iy > 0)
                v -= x(c - p_);
            if (iy + 1 < p_)
                v -= x(c + p_);
            y(c) = v * inv_h2;
        }
}

void DirichletLaplacian2D::shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                                              Eigen::Ref<CVector> w) const
{
    check_dims(*this, g.size(), w.size(), "laplacian_2d::shifted_solve");
    // Real and imaginary parts go through the (real) sine transform separately.
    const Eigen::Map<const Eigen::MatrixXcd> G(g.data(), p_, p_);
    RMatrix re = sine_ * G.real() * sine_;
    RMatrix im = sine_ * G.imag() * sine_;
    CMatrix hat(p_, p_);
    for (int b = 0; b < p_; ++b)
        for (int a = 0; a < p_; ++a) {
            const Complex denom = sigma + mu_(a) + mu_(b);
            if (std::abs(denom) < kShiftFloor)
                fail(ErrorCode::singular_shift,
                     "laplacian_2d: shift collides with mode (" + std::to_string(a + 1) + ", "
                         + std::to_string(b + 1) + ")");
            hat(a, b) = Complex(re(a, b), im(a, b)) / denom;
        }
    const double norm = 2.0 / (p_ + 1);
    re = sine_ * hat.real() * sine_;
    im = sine_ * hat.imag() * sine_;
    Eigen::Map<Eigen::MatrixXcd> W(w.data(), p_, p_);
    W.real() = (norm * norm) * re;
    W.imag() = (norm * norm) * im;
}

std::optional<SparseMatrix> DirichletLaplacian2D::sparse_matrix() const
{
    const int m = p_ * p_;
    const double inv_h2 = 1.0 / (h_ * h_);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(5 * m);
    for (int iy = 0; iy < p_; ++iy)
        for (int ix = 0; ix < p_; ++ix) {
            const int c = ix + p_ * iy;
            entries.emplace_back(c, c, 4.0 * inv_h2);
            if (ix > 0)
                entries.emplace_back(c, c - 1, -inv_h2);
            if (ix + 1 < p_)
                entries.emplace_back(c, c + 1, -inv_h2);
            if (iy > 0)
                entries.emplace_back(c, c - p_, -inv_h2);
            if (iy + 1 < p_)
                entries.emplace_back(c, c + p_, -inv_h2);
        }
    SparseMatrix A(m, m);
    A.setFromTriplets(entries.begin(), entries.end());
    return A;
}

// ---------------------------------------------------------------------------
// PeriodicLaplacian1D

PeriodicLaplacian1D::PeriodicLaplacian1D(int m, double h) : m_(m), h_(h)
{
    require(m >= 3, ErrorCode::invalid_argument, "laplacian_1d_periodic: m must be >= 3");
    require(h > 0.0 && std::isfinite(h), ErrorCode::invalid_argument, "laplacian_1d_periodic: h must be > 0");
    fourier_.resize(m_, m_);
    mu_.resize(m_);
    for (int j = 0; j < m_; ++j) {
        for (int k = 0; k < m_; ++k) {
            // Reduce j*k mod m before scaling to keep the phase exact.
            const double phase = -2.0 * pi * static_cast<double>((static_cast<long>(j) * k) % m_) / m_;
            fourier_(j, k) = Complex(std::cos(phase), std::sin(phase));
        }
        const double s = std::sin(pi * j / m_);
        mu_(j) = 4.0 / (h_ * h_) * s * s;
    }
}

void PeriodicLaplacian1D::apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const
{
    check_dims(*this, x.size(), y.size(), "laplacian_1d_periodic::apply");
    const double inv_h2 = 1.0 / (h_ * h_);
    for (int i = 0; i < m_; ++i) {
        const int left = (i + m_ - 1) % m_;
        const int right = (i + 1) % m_;
        y(i) = (2.0 * x(i) - x(left) - x(right)) * inv_h2;
    }
}

void PeriodicLaplacian1D::shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                                             Eigen::Ref<CVector> w) const
{
    check_dims(*this, g.size(), w.size(), "laplacian_1d_periodic::shifted_solve");
    for (int k = 0; k < m_; ++k)
        if (std::abs(sigma + mu_(k)) < kShiftFloor)
            fail(ErrorCode::singular_shift,
                 "laplacian_1d_periodic: shift collides with mode " + std::to_string(k));
    auto solve = [&](const CVector& rhs) {
        CVector hat = fourier_ * rhs;
        for (int k = 0; k < m_; ++k)
            hat(k) /= sigma + mu_(k);
        CVector out = fourier_.adjoint() * hat;
        return CVector(out / static_cast<double>(m_));
    };
    if (sigma.imag() != 0.0) {
        w = solve(g);
        return;
    }
    // Real shift: the operator is real, so real and imaginary parts of g map
    // to real and imaginary parts of w exactly.
    const RVector re = solve(g.real().cast<Complex>()).real();
    const RVector im = solve(g.imag().cast<Complex>()).real();
    w.real() = re;
    w.imag() = im;
}

std::optional<SparseMatrix> PeriodicLaplacian1D::sparse_matrix() const
{
    const double inv_h2 = 1.0 / (h_ * h_);
    std::vector<Eigen::Triplet<double>> entries;
    for (int i = 0; i < m_; ++i) {
        entries.emplace_back(i, i, 2.0 * inv_h2);
        entries.emplace_back(i, (i + m_ - 1) % m_, -inv_h2);
        entries.emplace_back(i, (i + 1) % m_, -inv_h2);
    }
    SparseMatrix A(m_, m_);
    A.setFromTriplets(entries.begin(), entries.end());
    return A;
}

// ---------------------------------------------------------------------------
// DenseOperator / SparseOperator

DenseOperator::DenseOperator(CMatrix A) : A_(std::move(A))
{
    require(A_.rows() == A_.cols() && A_.rows() > 0, ErrorCode::invalid_argument,
            "dense_operator: matrix must be square and non-empty");
}

void DenseOperator::apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const
{
    check_dims(*this, x.size(), y.size(), "dense_operator::apply");
    y.noalias() = A_ * x;
}

void DenseOperator::shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                                       Eigen::Ref<CVector> w) const
{
    check_dims(*this, g.size(), w.size(), "dense_operator::shifted_solve");
    CMatrix shifted = A_;
    shifted.diagonal().array() += sigma;
    Eigen::PartialPivLU<CMatrix> lu(shifted);
    const auto& U = lu.matrixLU();
    for (Eigen::Index i = 0; i < U.rows(); ++i)
        if (std::abs(U(i, i)) < kShiftFloor)
            fail(ErrorCode::singular_shift, "dense_operator: sigma I + A is singular");
    w = lu.solve(g);
}

std::optional<SparseMatrix> DenseOperator::sparse_matrix() const
{
    if (A_.imag().cwiseAbs().maxCoeff() != 0.0)
        return std::nullopt;
    return RMatrix(A_.real()).sparseView();
}

SparseOperator::SparseOperator(SparseMatrix A) : A_(std::move(A))
{
    require(A_.rows() == A_.cols() && A_.rows() > 0, ErrorCode::invalid_argument,
            "sparse_operator: matrix must be square and non-empty");
    A_.makeCompressed();
}

void SparseOperator::apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const
{
    check_dims(*this, x.size(), y.size(), "sparse_operator::apply");
    y.noalias() = A_.cast<Complex>() * x;
}

void SparseOperator::shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                                        Eigen::Ref<CVector> w) const
{
    check_dims(*this, g.size(), w.size(), "sparse_operator::shifted_solve");
    Eigen::SparseMatrix<Complex> shifted = A_.cast<Complex>();
    for (int i = 0; i < shifted.rows(); ++i)
        shifted.coeffRef(i, i) += sigma;
    shifted.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success)
        fail(ErrorCode::singular_shift, "sparse_operator: sigma I + A is singular");
    w = lu.solve(CVector(g));
    if (lu.info() != Eigen::Success || !w.allFinite())
        fail(ErrorCode::singular_shift, "sparse_operator: shifted solve failed");
}

// ---------------------------------------------------------------------------
// FirstOrderSystemOperator

FirstOrderSystemOperator::FirstOrderSystemOperator(OperatorPtr A) : A_(std::move(A))
{
    require(A_ != nullptr, ErrorCode::invalid_argument, "first_order_system: null operator");
}

void FirstOrderSystemOperator::apply_into(const Eigen::Ref<const CVector>& x, Eigen::Ref<CVector> y) const
{
    check_dims(*this, x.size(), y.size(), "first_order_system::apply");
    const int m = A_->dim();
    CVector au(m);
    A_->apply_into(x.head(m), au);
    y.head(m) = -x.tail(m);
    y.tail(m) = au;
}

void FirstOrderSystemOperator::shifted_solve_into(Complex sigma, const Eigen::Ref<const CVector>& g,
                                                  Eigen::Ref<CVector> w) const
{
    check_dims(*this, g.size(), w.size(), "first_order_system::shifted_solve");
    // [sigma I, -I; A, sigma I] (u, v) = (g1, g2):
    // (sigma^2 I + A) u = g2 + sigma g1, v = sigma u - g1.
    const int m = A_->dim();
    const CVector rhs = g.tail(m) + sigma * g.head(m);
    CVector u(m);
    A_->shifted_solve_into(sigma * sigma, rhs, u);
    w.tail(m) = sigma * u - g.head(m);
    w.head(m) = u;
}

std::shared_ptr<DirichletLaplacian2D> make_laplacian_2d_dirichlet(int points_per_dim, double h)
{
    return std::make_shared<DirichletLaplacian2D>(points_per_dim, h);
}

std::shared_ptr<PeriodicLaplacian1D> make_laplacian_1d_periodic(int m, double h)
{
    return std::make_shared<PeriodicLaplacian1D>(m, h);
}

std::shared_ptr<DenseOperator> make_dense_operator(const CMatrix& A)
{
    return std::make_shared<DenseOperator>(A);
}

std::shared_ptr<DenseOperator> make_dense_operator(const RMatrix& A)
{
    return std::make_shared<DenseOperator>(A.cast<Complex>());
}

std::shared_ptr<SparseOperator> make_sparse_operator(const SparseMatrix& A)
{
    return std::make_shared<SparseOperator>(A);
}

// ---------------------------------------------------------------------------
// Problems

RVector SemilinearProblem::apply_f(const RVector& u) const
{
    RVector out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        out(i) = f(u(i));
    return out;
}

RVector SemilinearProblem::jac_diag(const RVector& u) const
{
    RVector out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        out(i) = df(u(i));
    return out;
}

const char* to_string(BenchmarkKind kind) noexcept
{
    switch (kind) {
    case BenchmarkKind::heat: return "heat";
    case BenchmarkKind::wave: return "wave";
    case BenchmarkKind::semilinear: return "semilinear";
    }
    return "unknown";
}

BenchmarkKind parse_benchmark_kind(const std::string& name)
{
    if (name == "heat")
        return BenchmarkKind::heat;
    if (name == "wave")
        return BenchmarkKind::wave;
    if (name == "semilinear")
        return BenchmarkKind::semilinear;
    fail(ErrorCode::unsupported_kind, "unsupported benchmark kind '" + name + "'");
}

RVector BenchmarkProblem::sample(const std::function<double(double, double, double)>& fn, double t) const
{
    RVector out(dim());
    for (int iy = 0; iy < points_per_dim; ++iy)
        for (int ix = 0; ix < points_per_dim; ++ix)
            out(ix + points_per_dim * iy) = fn(coordinate(ix), coordinate(iy), t);
    return out;
}

RVector BenchmarkProblem::semi_discrete_exact_at(double t) const
{
    if (kind != BenchmarkKind::heat)
        return exact_at(t);
    // u_h(t) = c(t) sin x sin y with c' + lambda_h c = e^{-t}, c(0) = 1.
    const double lambda = 2.0 * op->eigenvalue_1d(1);
    const double c = std::exp(-t) / (lambda - 1.0)
                     + (1.0 - 1.0 / (lambda - 1.0)) * std::exp(-lambda * t);
    return c * sample([](double x, double y, double) { return std::sin(x) * std::sin(y); }, 0.0);
}

SemilinearProblem BenchmarkProblem::semilinear() const
{
    require(kind == BenchmarkKind::semilinear, ErrorCode::unsupported_kind,
            "semilinear(): benchmark is not semilinear");
    SemilinearProblem out;
    out.op = op;
    out.f = f;
    out.df = df;
    out.u0 = u0;
    BenchmarkProblem grid_only;
    grid_only.points_per_dim = points_per_dim;
    grid_only.lower = lower;
    grid_only.h = h;
    grid_only.rhs = rhs;
    out.source = [grid_only](double t) { return grid_only.sample(grid_only.rhs, t); };
    return out;
}

BenchmarkProblem make_benchmark(BenchmarkKind kind, int points_per_dim, int n, double T)
{
    require(points_per_dim >= 1, ErrorCode::invalid_argument, "make_benchmark: points_per_dim must be >= 1");
    require(n >= 2, ErrorCode::invalid_grid, "make_benchmark: n must be >= 2");
    require(T > 0.0 && std::isfinite(T), ErrorCode::invalid_grid, "make_benchmark: T must be > 0");

    BenchmarkProblem p;
    p.kind = kind;
    p.points_per_dim = points_per_dim;
    p.n = n;
    p.T = T;
    p.dt = T / n;
    switch (kind) {
    case BenchmarkKind::heat:
        p.lower = 0.0;
        p.upper = pi;
        p.exact = [](double x, double y, double t) { return std::sin(x) * std::sin(y) * std::exp(-t); };
        p.rhs = p.exact;
        break;
    case BenchmarkKind::wave:
        p.lower = 0.0;
        p.upper = 1.0;
        p.exact = [](double x, double y, double t) {
            return x * (x - 1.0) * y * (y - 1.0) * std::sin(2.0 * pi * t);
        };
        p.rhs = [](double x, double y, double t) {
            const double s = std::sin(2.0 * pi * t);
            return -4.0 * pi * pi * x * (x - 1.0) * y * (y - 1.0) * s
                   - 2.0 * s * (x * (x - 1.0) + y * (y - 1.0));
        };
        break;
    case BenchmarkKind::semilinear:
        p.lower = -1.0;
        p.upper = 1.0;
        p.exact = [](double x, double y, double t) {
            return (x * x - 1.0) * (y * y - 1.0) * std::exp(-t);
        };
        p.rhs = [](double x, double y, double t) {
            const double px = x * x - 1.0, py = y * y - 1.0, e = std::exp(-t);
            return -2.0 * px * py * e + std::pow(px, 3) * std::pow(py, 3) * std::exp(-3.0 * t)
                   - 2.0 * e * (px + py);
        };
        p.f = [](double u) { return u * u * u - u; };
        p.df = [](double u) { return 3.0 * u * u - 1.0; };
        break;
    default:
        fail(ErrorCode::unsupported_kind, "make_benchmark: unsupported kind");
    }
    p.h = (p.upper - p.lower) / (points_per_dim + 1);
    p.op = make_laplacian_2d_dirichlet(points_per_dim, p.h);
    p.u0 = p.exact_at(0.0);
    if (kind == BenchmarkKind::wave)
        p.u0dot = p.sample([](double x, double y, double) {
            return 2.0 * pi * x * (x - 1.0) * y * (y - 1.0);
        }, 0.0);
    p.source.reserve(n);
    for (int j = 1; j <= n; ++j)
        p.source.push_back(p.sample(p.rhs, j * p.dt));
    return p;
}

} // namespace chebpint
