#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "chebpint/pint.hpp"
#include "test_util.hpp"

using namespace chebpint;

namespace
{

CVector flatten(const BlockVector& b)
{
    return Eigen::Map<const CVector>(b.data().data(), b.data().size());
}

CMatrix dense_B(int n, double dt)
{
    return RMatrix(assemble_B(n, dt)).cast<Complex>();
}

struct SmallCase
{
    int n;
    int m;
    double dt;
    RMatrix A;
    BlockVector rhs;
};

SmallCase random_case(std::mt19937& rng)
{
    std::uniform_int_distribution<int> nn(2, 8), mm(1, 4);
    std::uniform_real_distribution<double> dd(0.05, 0.5);
    SmallCase c;
    c.n = nn(rng);
    c.m = mm(rng);
    c.dt = dd(rng);
    c.A = test::random_spd(c.m, rng);
    c.rhs = BlockVector(test::random_real(c.m, c.n, rng).cast<Complex>());
    return c;
}

TEST(AllAtOnceMatrix, Layout)
{
    CMatrix Bt(2, 2), A(1, 1);
    Bt << 1.0, 2.0, 3.0, 4.0;
    A << 10.0;
    const CMatrix K = all_at_once_matrix(Bt, A);
    EXPECT_EQ(K(0, 0), Complex(11.0));
    EXPECT_EQ(K(0, 1), Complex(2.0));
    EXPECT_EQ(K(1, 1), Complex(14.0));
    const CMatrix K2 = all_at_once_matrix(CMatrix::Identity(2, 2), CMatrix::Constant(2, 2, 1.0));
    EXPECT_EQ(K2(0, 1), Complex(1.0));
    EXPECT_EQ(K2(0, 2), Complex(0.0));
}

TEST(FirstOrderLinear, MatchesDenseAllAtOnce)
{
    std::mt19937 rng(20);
    for (int seed = 0; seed < 20; ++seed) {
        const SmallCase c = random_case(rng);
        const SpectralDecomposition d = decompose(c.n, c.dt);
        const auto op = make_dense_operator(c.A);
        const SolveReport r = solve_first_order_linear(d, *op, c.rhs);
        const CMatrix K = all_at_once_matrix(dense_B(c.n, c.dt), c.A.cast<Complex>());
        const CVector ref = K.partialPivLu().solve(flatten(c.rhs));
        EXPECT_LE(test::rel_diff(flatten(r.solution), ref), 1e-9) << "n=" << c.n << " m=" << c.m;
        EXPECT_EQ(r.solution.data().imag().norm(), 0.0);
    }
}

TEST(SecondOrderLinear, MatchesDenseAllAtOnce)
{
    std::mt19937 rng(21);
    for (int seed = 0; seed < 20; ++seed) {
        const SmallCase c = random_case(rng);
        const SpectralDecomposition d = decompose(c.n, c.dt);
        const auto op = make_dense_operator(c.A);
        const SolveReport r = solve_second_order_linear(d, *op, c.rhs);
        const CMatrix B = dense_B(c.n, c.dt);
        const CMatrix K = all_at_once_matrix(B * B, c.A.cast<Complex>());
        const CVector ref = K.partialPivLu().solve(flatten(c.rhs));
        EXPECT_LE(test::rel_diff(flatten(r.solution), ref), 1e-9) << "n=" << c.n << " m=" << c.m;
    }
}

// Solves u'' + A u = g as the doubled first-order system w' + Q w = (0, g).
BlockVector order_reduction_oracle(const SpectralDecomposition& d, const RMatrix& A, const RVector& u0,
                                   const RVector& u0dot, const std::vector<RVector>& g)
{
    const int m = static_cast<int>(A.rows());
    RVector w0(2 * m);
    w0 << u0, u0dot;
    std::vector<RVector> gw;
    for (const auto& gj : g) {
        RVector v = RVector::Zero(2 * m);
        v.tail(m) = gj;
        gw.push_back(v);
    }
    const FirstOrderSystemOperator Q(make_dense_operator(A));
    return solve_first_order_linear(d, Q, rhs_first_order(w0, gw, d.dt)).solution;
}

TEST(SecondOrderLinear, MatchesOrderReductionOracle)
{
    std::mt19937 rng(22);
    for (int seed = 0; seed < 20; ++seed) {
        const SmallCase c = random_case(rng);
        const RVector u0 = test::random_real(c.m, 1, rng), u0dot = test::random_real(c.m, 1, rng);
        std::vector<RVector> g;
        for (int j = 0; j < c.n; ++j)
            g.push_back(test::random_real(c.m, 1, rng));
        const SpectralDecomposition d = decompose(c.n, c.dt);
        const auto op = make_dense_operator(c.A);
        const BlockVector u = solve_second_order_linear(d, *op, rhs_second_order(u0, u0dot, g, c.dt)).solution;
        const BlockVector w = order_reduction_oracle(d, c.A, u0, u0dot, g);
        const CMatrix wu = w.data().topRows(c.m), wv = w.data().bottomRows(c.m);
        EXPECT_LE(test::rel_diff(u.data(), wu), 1e-8) << "n=" << c.n << " m=" << c.m;
        const BlockVector v = recover_velocity(d, u, u0);
        EXPECT_LE(test::rel_diff(v.data(), wv), 1e-8) << "n=" << c.n << " m=" << c.m;
    }
}

TEST(FirstOrderLinear, ConstantSolution)
{
    const int n = 10;
    const double dt = 0.1;
    const SpectralDecomposition d = decompose(n, dt);
    const auto op = make_dense_operator(RMatrix(RMatrix::Zero(1, 1)));
    const BlockVector b = rhs_first_order(RVector::Ones(1), std::vector<RVector>(n, RVector::Zero(1)), dt);
    const BlockVector u = solve_first_order_linear(d, *op, b).solution;
    for (int j = 0; j < n; ++j)
        EXPECT_NEAR(u.block(j)(0).real(), 1.0, 1e-12);
}

TEST(SecondOrderLinear, LinearSolution)
{
    const int n = 12;
    const double dt = 0.05;
    const SpectralDecomposition d = decompose(n, dt);
    const auto op = make_dense_operator(RMatrix(RMatrix::Zero(1, 1)));
    const BlockVector b = rhs_second_order(RVector::Zero(1), RVector::Ones(1), std::vector<RVector>(n, RVector::Zero(1)), dt);
    const BlockVector u = solve_second_order_linear(d, *op, b).solution;
    for (int j = 0; j < n; ++j)
        EXPECT_NEAR(u.block(j)(0).real(), (j + 1) * dt, 10 * dt * dt);
}

TEST(SecondOrderLinear, RequiresTwoSteps)
{
    const SpectralDecomposition d = decompose(1, 0.1);
    const auto op = make_dense_operator(RMatrix(RMatrix::Identity(1, 1)));
    EXPECT_THROW(solve_second_order_linear(d, *op, BlockVector(1, 1)), Error);
}

TEST(Linear, DimensionMismatch)
{
    const SpectralDecomposition d = decompose(4, 0.1);
    const auto op = make_dense_operator(RMatrix(RMatrix::Identity(2, 2)));
    try {
        solve_first_order_linear(d, *op, BlockVector(4, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
    }
    EXPECT_THROW(solve_first_order_linear(d, *op, BlockVector(5, 2)), Error);
}

TEST(Linear, WorkerCountDoesNotChangeResults)
{
    std::mt19937 rng(23);
    const int n = 33, p = 6;
    const SpectralDecomposition d = decompose(n, 0.03);
    const auto op = make_laplacian_2d_dirichlet(p, 0.1);
    const BlockVector b(test::random_real(p * p, n, rng).cast<Complex>());
    const SolveReport ref = solve_first_order_linear(d, *op, b, 1);
    for (int w : {2, 4, 8}) {
        const SolveReport r = solve_first_order_linear(d, *op, b, w);
        EXPECT_EQ(r.worker_count, w);
        EXPECT_EQ((r.solution.data() - ref.solution.data()).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(RecoverVelocity, Constant)
{
    const int n = 5;
    const double dt = 0.2;
    const SpectralDecomposition d = decompose(n, dt);
    const BlockVector u(CMatrix::Constant(1, n, 3.0));
    const BlockVector v = recover_velocity(d, u, RVector::Constant(1, 3.0));
    EXPECT_LE(v.data().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(RecoverVelocity, LinearInTime)
{
    const int n = 6;
    const double dt = 0.25;
    const SpectralDecomposition d = decompose(n, dt);
    BlockVector u(n, 1);
    for (int j = 0; j < n; ++j)
        u.block(j)(0) = (j + 1) * dt;
    const BlockVector v = recover_velocity(d, u, RVector::Zero(1));
    for (int j = 0; j < n; ++j)
        EXPECT_NEAR(v.block(j)(0).real(), 1.0, 1e-14);
}

SemilinearProblem linear_problem(OperatorPtr op, std::function<double(double)> f,
                                 std::function<double(double)> df, const RVector& u0)
{
    SemilinearProblem p;
    p.op = std::move(op);
    p.f = std::move(f);
    p.df = std::move(df);
    p.u0 = u0;
    const int m = static_cast<int>(u0.size());
    p.source = [m](double t) { return RVector::Constant(m, std::cos(t)); };
    return p;
}

std::vector<RVector> sample_source(const SemilinearProblem& p, const SpectralDecomposition& d)
{
    std::vector<RVector> g;
    for (int j = 1; j <= d.n; ++j)
        g.push_back(p.source(j * d.dt));
    return g;
}

TEST(Sni, ZeroNonlinearityTakesOneIteration)
{
    const auto op = make_laplacian_2d_dirichlet(4, 0.2);
    const RVector u0 = RVector::LinSpaced(16, 0.0, 1.0);
    const SemilinearProblem p = linear_problem(op, [](double) { return 0.0; }, [](double) { return 0.0; }, u0);
    const SpectralDecomposition d = decompose(8, 0.1);
    const SolveReport r = solve_semilinear_sni(p, d, 1e-10, 10);
    EXPECT_EQ(r.iterations, 1);
    ASSERT_EQ(r.residual_history.size(), 2u);
    EXPECT_DOUBLE_EQ(r.residual_history[0], 1.0);
    const BlockVector lin = solve_first_order_linear(d, *op, rhs_first_order(u0, sample_source(p, d), d.dt)).solution;
    EXPECT_LE(test::rel_diff(r.solution.data(), lin.data()), 1e-12);
}

TEST(Sni, LinearNonlinearityMatchesShiftedOperator)
{
    const int pts = 4;
    const auto op = make_laplacian_2d_dirichlet(pts, 0.2);
    const RVector u0 = RVector::LinSpaced(pts * pts, -1.0, 1.0);
    const SemilinearProblem p = linear_problem(op, [](double u) { return u; }, [](double) { return 1.0; }, u0);
    const SpectralDecomposition d = decompose(8, 0.1);
    for (JacobianMode mode : {JacobianMode::exact, JacobianMode::mean_shift}) {
        SniOptions o;
        o.mode = mode;
        const SolveReport r = solve_semilinear_sni(p, d, 1e-10, 10, 1, o);
        EXPECT_LE(r.iterations, 2);
        const RMatrix A = RMatrix(*op->sparse_matrix()) + RMatrix::Identity(pts * pts, pts * pts);
        const auto shifted = make_dense_operator(A);
        const BlockVector lin =
            solve_first_order_linear(d, *shifted, rhs_first_order(u0, sample_source(p, d), d.dt)).solution;
        EXPECT_LE(test::rel_diff(r.solution.data(), lin.data()), 1e-9);
    }
}

TEST(Sni, ResidualBelowToleranceOnSuccess)
{
    const BenchmarkProblem bp = make_benchmark(BenchmarkKind::semilinear, 8, 16, 2.0);
    const SemilinearProblem p = bp.semilinear();
    const SpectralDecomposition d = decompose(bp.n, bp.dt);
    const SolveReport r = solve_semilinear_sni(p, d, 1e-8, 30);
    EXPECT_LE(r.residual_history.back(), 1e-8);
    EXPECT_EQ(static_cast<int>(r.residual_history.size()), r.iterations + 1);
    const BlockVector b = rhs_first_order(p.u0, sample_source(p, d), d.dt);
    EXPECT_LE(semilinear_residual(p, d, b, r.solution), 1e-8);
}

TEST(Sni, MaxIterExceeded)
{
    const BenchmarkProblem bp = make_benchmark(BenchmarkKind::semilinear, 6, 8, 2.0);
    const SpectralDecomposition d = decompose(bp.n, bp.dt);
    try {
        solve_semilinear_sni(bp.semilinear(), d, 1e-14, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::max_iter_exceeded);
    }
}

TEST(Sni, WarmStartFromSolution)
{
    const BenchmarkProblem bp = make_benchmark(BenchmarkKind::semilinear, 6, 8, 2.0);
    const SpectralDecomposition d = decompose(bp.n, bp.dt);
    const SemilinearProblem p = bp.semilinear();
    const SolveReport cold = solve_semilinear_sni(p, d, 1e-10, 30);
    SniOptions o;
    o.initial_guess = cold.solution;
    const SolveReport warm = solve_semilinear_sni(p, d, 1e-10, 30, 1, o);
    EXPECT_LE(warm.iterations, 1);
}

TEST(Trapezoidal, ScalarStep)
{
    const auto op = make_dense_operator(RMatrix(RMatrix::Identity(1, 1)));
    for (double dt : {0.1, 0.05}) {
        const BlockVector u = timestep_trapezoidal(*op, std::vector<double>{dt}, CVector::Ones(1));
        const double expected = (1 - dt / 2) / (1 + dt / 2);
        EXPECT_NEAR(u.block(0)(0).real(), expected, 1e-15);
        EXPECT_LE(std::abs(expected - std::exp(-dt)), dt * dt * dt);
    }
}

TEST(Trapezoidal, SkewSymmetricConservesNorm)
{
    std::mt19937 rng(24);
    const RMatrix G = test::random_real(5, 5, rng);
    const auto op = make_dense_operator(RMatrix(G - G.transpose()));
    const CVector u0 = test::random_real(5, 1, rng).cast<Complex>();
    const BlockVector u = timestep_trapezoidal(*op, uniform_grid(40, 4.0), u0);
    for (int j = 0; j < 40; ++j)
        EXPECT_NEAR(u.block(j).norm(), u0.norm(), 1e-12);
}

TEST(Trapezoidal, SecondOrderWithSource)
{
    // u' + u = cos t, u(0) = 0 has u = (cos t + sin t - e^{-t}) / 2.
    const auto op = make_dense_operator(RMatrix(RMatrix::Identity(1, 1)));
    const SourceFn src = [](double t) { return CVector::Constant(1, std::cos(t)); };
    auto err = [&](int n) {
        const BlockVector u = timestep_trapezoidal(*op, uniform_grid(n, 1.0), CVector::Zero(1), src);
        const double exact = (std::cos(1.0) + std::sin(1.0) - std::exp(-1.0)) / 2;
        return std::abs(u.block(n - 1)(0).real() - exact);
    };
    const double ratio = err(20) / err(40);
    EXPECT_NEAR(ratio, 4.0, 0.2);
}

TEST(GlobalError, Basics)
{
    std::mt19937 rng(25);
    const BlockVector a(test::random_complex(3, 4, rng));
    EXPECT_EQ(global_error(a, a), 0.0);
    BlockVector b = a;
    b.block(2)(1) += 1e-3;
    EXPECT_NEAR(global_error(b, a), 1e-3, 1e-15);
    EXPECT_THROW(global_error(a, BlockVector(4, 4)), Error);
}

} // namespace
