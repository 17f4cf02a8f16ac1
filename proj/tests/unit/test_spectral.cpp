#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "chebpint/spectral.hpp"
#include "chebpint/timedisc.hpp"
#include "chebpint/worker_pool.hpp"
#include "test_util.hpp"

using namespace chebpint;

namespace
{

// Dense S_n built entry by entry.
CMatrix dense_S(int n)
{
    if (n == 1)
        return CMatrix::Constant(1, 1, 4.0);
    CMatrix S = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        S(i, i) = (i == 0 || i == n - 1) ? 3.0 : 2.0;
        if (i + 2 < n) {
            S(i, i + 2) = -1.0;
            S(i + 2, i) = -1.0;
        }
    }
    return S;
}

CVector s_rhs(int n)
{
    CVector r = CVector::Zero(n);
    if (n >= 2)
        r(n - 2) = kImag;
    r(n - 1) += 2.0;
    return r;
}

CMatrix dense_B(int n, double dt)
{
    return CMatrix(RMatrix(assemble_B(n, dt)).cast<Complex>());
}

TEST(BuildV, RowStructure)
{
    const RootSet rs = find_roots(9);
    const CMatrix V = build_V(rs);
    for (int j = 0; j < 9; ++j) {
        EXPECT_EQ(V(0, j), Complex(1.0));
        EXPECT_LT(std::abs(V(1, j) - 2.0 * kImag * rs.roots[j].x), 1e-15);
        EXPECT_LT(std::abs(V(4, j) - cheb_eval(ChebKind::second, 4, rs.roots[j].x)), 1e-13);
    }
}

TEST(BuildV, EigenvectorsOfBForNTwo)
{
    const RootSet rs = find_roots(2, 1e-12);
    const CMatrix V = build_V(rs);
    CMatrix B(2, 2);
    B << 0.0, 0.5, -1.0, 1.0;
    CVector lambda(2);
    for (int j = 0; j < 2; ++j)
        lambda(j) = rs.roots[j].lambda_unit;
    EXPECT_LT((B * V - V * lambda.asDiagonal()).norm(), 1e-12);
}

TEST(Thomas, IdentityReturnsRhs)
{
    const std::vector<Complex> lo(4, 0.0), up(4, 0.0), d(5, 1.0);
    const std::vector<Complex> r = {1.0, Complex(2, 1), -3.0, 0.5, kImag};
    const CVector x = thomas_tridiagonal(lo, d, up, r);
    for (int i = 0; i < 5; ++i)
        EXPECT_EQ(x(i), r[i]);
}

TEST(Thomas, QuadraticSequence)
{
    const int n = 10;
    std::vector<Complex> psi(n), lo(n - 1, 1.0), up(n - 1, 1.0), d(n, -2.0), rhs(n);
    for (int i = 0; i < n; ++i)
        psi[i] = double(i * i) - 3.0 * i + 1.0;
    for (int i = 0; i < n; ++i)
        rhs[i] = -2.0 * psi[i] + (i > 0 ? psi[i - 1] : 0.0) + (i + 1 < n ? psi[i + 1] : 0.0);
    const CVector x = thomas_tridiagonal(lo, d, up, rhs);
    for (int i = 0; i < n; ++i)
        EXPECT_LT(std::abs(x(i) - psi[i]), 1e-11);
}

TEST(Thomas, RandomComplexMatchesDenseSolve)
{
    std::mt19937 rng(3);
    const int n = 8;
    const CMatrix R = test::random_complex(4, n, rng);
    std::vector<Complex> lo(n - 1), up(n - 1), d(n), rhs(n);
    CMatrix M = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        d[i] = R(0, i) + 4.0;
        rhs[i] = R(3, i);
        M(i, i) = d[i];
        if (i + 1 < n) {
            lo[i] = R(1, i);
            up[i] = R(2, i);
            M(i + 1, i) = lo[i];
            M(i, i + 1) = up[i];
        }
    }
    const CVector x = thomas_tridiagonal(lo, d, up, rhs);
    const CVector ref = M.partialPivLu().solve(Eigen::Map<const CVector>(rhs.data(), n));
    EXPECT_LT((x - ref).norm() / ref.norm(), 1e-12);
}

TEST(Thomas, ZeroPivot)
{
    const std::vector<Complex> lo(1, 1.0), up(1, 1.0), d = {0.0, 1.0}, r = {1.0, 1.0};
    try {
        thomas_tridiagonal(lo, d, up, r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::zero_pivot);
    }
}

TEST(Thomas, SizeMismatch)
{
    const std::vector<Complex> lo(2, 1.0), up(1, 1.0), d(2, 1.0), r(2, 1.0);
    EXPECT_THROW(thomas_tridiagonal(lo, d, up, r), Error);
}

TEST(PentaS, ApplyMatchesDense)
{
    std::mt19937 rng(5);
    for (int n : {1, 2, 3, 4, 7, 12}) {
        const CVector x = test::random_complex(n, 1, rng);
        const CVector y = apply_S(std::span<const Complex>(x.data(), n));
        EXPECT_LT((y - dense_S(n) * x).norm(), 1e-14) << "n=" << n;
    }
}

TEST(PentaS, HandSolutionNThree)
{
    const CVector b = solve_pentadiagonal_S(3).b;
    EXPECT_LT(std::abs(b(0) - 0.25), 1e-15);
    EXPECT_LT(std::abs(b(1) - 0.5 * kImag), 1e-15);
    EXPECT_LT(std::abs(b(2) - 0.75), 1e-15);
}

TEST(PentaS, ResidualLargeN)
{
    for (int n : {1, 2, 5, 512, 513}) {
        const CVector b = solve_pentadiagonal_S(n).b;
        const CVector r = apply_S(std::span<const Complex>(b.data(), n)) - s_rhs(n);
        EXPECT_LE(r.norm(), 1e-13 * std::max(1.0, b.norm())) << "n=" << n;
    }
}

TEST(PentaS, ParityDecoupling)
{
    // Entries in the parity class of index n-1 are real; the other class is purely imaginary.
    for (int n : {6, 7}) {
        const CVector b = solve_pentadiagonal_S(n).b;
        for (int k = 0; k < n; ++k) {
            if ((n - 1 - k) % 2 == 0)
                EXPECT_EQ(b(k).imag(), 0.0);
            else
                EXPECT_EQ(b(k).real(), 0.0);
        }
    }
}

TEST(VinvFast, NOne)
{
    const RootSet rs = find_roots(1, 1e-12);
    const CMatrix V = build_V(rs);
    const CMatrix W = build_Vinv_fast(rs);
    ASSERT_EQ(W.rows(), 1);
    EXPECT_LT(std::abs(V(0, 0) - 1.0), 1e-15);
    EXPECT_LT(std::abs(W(0, 0) - 1.0), 1e-12);
}

TEST(VinvFast, MatchesReferenceAtSixtyFour)
{
    const RootSet rs = find_roots(64);
    const CMatrix V = build_V(rs);
    const CMatrix W = build_Vinv_fast(rs);
    EXPECT_LE((V * W - CMatrix::Identity(64, 64)).norm(), 1e-10);
    const CMatrix R = build_Vinv_reference(V);
    EXPECT_LE((W - R).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(VinvFast, ParallelEqualsSerial)
{
    const RootSet rs = find_roots(100);
    const WorkerPool pool(4);
    const CMatrix a = build_Vinv_fast(rs);
    const CMatrix b = build_Vinv_fast(rs, &pool);
    EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
}

TEST(VinvReference, SimpleCases)
{
    EXPECT_LT((build_Vinv_reference(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm(), 1e-15);
    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 4.0;
    const CMatrix Di = build_Vinv_reference(D);
    EXPECT_LT(std::abs(Di(0, 0) - 0.5), 1e-15);
    EXPECT_LT(std::abs(Di(1, 1) - 0.25), 1e-15);
    std::mt19937 rng(11);
    const CMatrix M = test::random_complex(16, 16, rng) + 8.0 * CMatrix::Identity(16, 16);
    EXPECT_LE((M * build_Vinv_reference(M) - CMatrix::Identity(16, 16)).norm(), 1e-12);
    try {
        build_Vinv_reference(CMatrix::Zero(2, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::singular_matrix);
    }
}

TEST(Cond2, SimpleCases)
{
    EXPECT_NEAR(cond2_estimate(CMatrix::Identity(4, 4)), 1.0, 1e-14);
    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0) = 1.0;
    D(1, 1) = 10.0;
    EXPECT_NEAR(cond2_estimate(D), 10.0, 1e-12);
}

TEST(Decompose, NOne)
{
    const SpectralDecomposition d = decompose(1, 1.0);
    EXPECT_LT(std::abs(d.eigenvalues(0) - 1.0), 1e-12);
    EXPECT_LT(std::abs(d.V(0, 0) - 1.0), 1e-15);
    EXPECT_NEAR(d.cond2, 1.0, 1e-14);
    EXPECT_LE(d.residual, 1e-15);
}

TEST(Decompose, NTwoTraceDeterminant)
{
    const SpectralDecomposition d = decompose(2, 1.0);
    // lambda^2 - lambda + 1/2 for B = [[0, 1/2], [-1, 1]].
    EXPECT_LT(std::abs(d.eigenvalues.sum() - 1.0), 1e-12);
    EXPECT_LT(std::abs(d.eigenvalues.prod() - 0.5), 1e-12);
    EXPECT_LT(std::abs(d.eigenvalues(0) - Complex(0.5, 0.5)), 1e-12);
    EXPECT_LT(std::abs(d.eigenvalues(1) - Complex(0.5, -0.5)), 1e-12);
}

TEST(Decompose, ScalesWithDt)
{
    const SpectralDecomposition a = decompose(16, 1.0);
    const SpectralDecomposition b = decompose(16, 0.25);
    EXPECT_LT((b.eigenvalues - 4.0 * a.eigenvalues).norm(), 1e-12 * b.eigenvalues.norm());
    EXPECT_LE(b.residual, 1e-12);
}

TEST(Decompose, EigenvaluesMatchDenseEigensolver)
{
    const int n = 24;
    const SpectralDecomposition d = decompose(n, 0.1);
    Eigen::ComplexEigenSolver<CMatrix> es(dense_B(n, 0.1));
    std::vector<bool> used(n, false);
    for (int j = 0; j < n; ++j) {
        double best = 1e300;
        int at = -1;
        for (int k = 0; k < n; ++k)
            if (!used[k] && std::abs(es.eigenvalues()(k) - d.eigenvalues(j)) < best) {
                best = std::abs(es.eigenvalues()(k) - d.eigenvalues(j));
                at = k;
            }
        used[at] = true;
        EXPECT_LT(best, 1e-9);
    }
}

TEST(Decompose, ResidualAt256)
{
    const SpectralDecomposition d = decompose(256, 1.0 / 256);
    EXPECT_LE(d.residual, 1e-9);
    EXPECT_LE(decomposition_residual(RMatrix(assemble_B(256, 1.0 / 256)).cast<Complex>(), d), 1e-9);
    EXPECT_LE((d.V * d.Vinv - CMatrix::Identity(256, 256)).norm(), 1e-8 * 256);
}

TEST(Decompose, ResidualAt1024)
{
    DecomposeOptions o;
    o.compute_cond2 = false;
    const SpectralDecomposition d = decompose(1024, 1e-3, o);
    EXPECT_LE(d.residual, 1e-8);
    EXPECT_LE((d.V * d.Vinv - CMatrix::Identity(1024, 1024)).norm(), 1e-8 * 1024);
}

TEST(Decompose, InvalidArguments)
{
    EXPECT_THROW(decompose(0, 1.0), Error);
    EXPECT_THROW(decompose(4, 0.0), Error);
    EXPECT_THROW(decompose(4, -1.0), Error);
}

TEST(Decompose, SaveLoadRoundTrip)
{
    const SpectralDecomposition d = decompose(12, 0.3);
    const auto path = (std::filesystem::temp_directory_path() / "chebpint_roundtrip.bin").string();
    save_decomposition(d, path);
    const SpectralDecomposition e = load_decomposition(path);
    std::filesystem::remove(path);
    EXPECT_EQ(e.n, d.n);
    EXPECT_EQ(e.dt, d.dt);
    EXPECT_EQ((e.eigenvalues - d.eigenvalues).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((e.V - d.V).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((e.Vinv - d.Vinv).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Decompose, LoadRejectsGarbage)
{
    const auto path = (std::filesystem::temp_directory_path() / "chebpint_garbage.bin").string();
    {
        std::ofstream out(path);
        out << "not a decomposition\n";
    }
    try {
        load_decomposition(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::io);
    }
    std::filesystem::remove(path);
    EXPECT_THROW(load_decomposition(path), Error);
}

} // namespace
