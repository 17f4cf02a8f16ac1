#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "chebpint/experiments.hpp"

using namespace chebpint;

namespace
{

TEST(Orders, ObservedOrders)
{
    const auto o = observed_orders({1.0, 0.25, 0.0625});
    ASSERT_EQ(o.size(), 2u);
    EXPECT_NEAR(o[0], 2.0, 1e-14);
    EXPECT_NEAR(o[1], 2.0, 1e-14);
    EXPECT_TRUE(observed_orders({1.0}).empty());
}

TEST(Orders, LogLogSlope)
{
    const std::vector<double> x = {1, 2, 4, 8};
    std::vector<double> y;
    for (double v : x)
        y.push_back(3.0 * std::pow(v, 1.5));
    EXPECT_NEAR(loglog_slope(x, y), 1.5, 1e-13);
    EXPECT_THROW(loglog_slope({1.0}, {1.0}), Error);
}

TEST(DecomposeReport, SmallN)
{
    const DecomposeReport r = decompose_report(1, 1.0, 1e-10, 50, 1);
    EXPECT_NEAR(r.cond2, 1.0, 1e-14);
    EXPECT_LE(r.omega_fast, 1e-15);
    const DecomposeReport s = decompose_report(64, 1.0 / 64, 1e-10, 50, 1);
    EXPECT_LE(s.max_newton_iters, 7);
    EXPECT_LE(s.omega_fast, 1e-11);
    EXPECT_LE(s.omega_ref, 1e-11);
    EXPECT_LE(s.eta, 1e-12);
    const DecomposeReport t = decompose_report(16, 0.1, 1e-10, 50, 1, false);
    EXPECT_TRUE(std::isnan(t.omega_ref));
    EXPECT_TRUE(std::isnan(t.eta));
}

TEST(RunBenchmark, HeatSmall)
{
    const BenchmarkResult r = run_benchmark(BenchmarkKind::heat, 8, 16, 1.0, 1e-8, 20, 1, true);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_LT(r.error, 1e-2);
    EXPECT_LT(r.error_semi_discrete, r.error);
    EXPECT_LE(r.residual, 1e-12);
    EXPECT_GT(r.cond2, 1.0);
    EXPECT_GE(r.wall_seconds, 0.0);
}

TEST(RunBenchmark, WaveAndSemilinearSmall)
{
    const BenchmarkResult w = run_benchmark(BenchmarkKind::wave, 8, 16, 2.0, 1e-8, 20, 1);
    EXPECT_LT(w.error, 0.2);
    EXPECT_TRUE(std::isnan(w.cond2));
    const BenchmarkResult s = run_benchmark(BenchmarkKind::semilinear, 8, 16, 2.0, 1e-8, 20, 2);
    EXPECT_GE(s.iterations, 2);
    EXPECT_LE(s.residual, 1e-8);
    EXPECT_EQ(s.workers, 2);
}

TEST(RunBenchmark, WaveOrderFromSemiDiscreteProfile)
{
    // The 5-point stencil is exact on the wave profile, so the error is purely temporal.
    std::vector<double> e;
    for (int n : {32, 64, 128})
        e.push_back(run_benchmark(BenchmarkKind::wave, 8, n, 2.0, 1e-8, 20, 1).error);
    for (double o : observed_orders(e)) {
        EXPECT_GE(o, 1.7);
        EXPECT_LE(o, 2.3);
    }
}

TEST(CompareGeometric, SmallNAgreement)
{
    const GeometricComparisonRow r = compare_geometric(1.15, 1e-2, 4, 32);
    EXPECT_EQ(r.status_geometric, ErrorCode::ok);
    EXPECT_EQ(r.status_new, ErrorCode::ok);
    // All three approximate the same smooth solution over a short horizon;
    // with four steps the errors are at the O(dt^2) level.
    EXPECT_LT(r.error_geometric, 5e-3);
    EXPECT_LT(r.error_tr, 5e-3);
    EXPECT_LT(r.error_new, 5e-3);
    EXPECT_NEAR(r.error_geometric, r.error_tr, 1e-8);
}

TEST(CompareGeometric, InvalidTau)
{
    EXPECT_THROW(compare_geometric(0.9, 1e-2, 8, 16), Error);
}

} // namespace
