#include "implreg/errors.hpp"
#include "implreg/experiments.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace implreg;
using Eigen::VectorXd;

TEST(Tuning, HugeLambdaRecoversNullRisk) {
    const auto p = make_power_law_problem(2.0, 1.0, 200, 1.0);
    const std::vector<double> grid{1e12};
    const auto s = tune_and_measure(p, Algorithm::ridge, 50, grid, 4, 1);
    EXPECT_NEAR(s.risks[0].mean, p.signal_energy(), 1e-9);
}

TEST(Tuning, ZeroStepsIsExactlyNullRisk) {
    const auto p = make_power_law_problem(2.0, 1.0, 200, 1.0);
    const std::vector<double> grid{0.0};
    const auto s = tune_and_measure(p, Algorithm::gd, 50, grid, 4, 1);
    EXPECT_DOUBLE_EQ(s.risks[0].mean, p.signal_energy());
}

TEST(Tuning, InteriorOptimumAroundTheoryValue) {
    const auto p = make_power_law_problem(2.0, 1.0, 1000, 1.0);
    const double center = std::pow(200.0, -0.4);
    std::vector<double> grid;
    for (int k = -14; k <= 14; ++k) grid.push_back(center * std::pow(10.0, k / 7.0));
    const auto s = tune_and_measure(p, Algorithm::ridge, 200, grid, 8, 3);
    EXPECT_TRUE(s.interior);
    EXPECT_GT(s.best_index, 0u);
    EXPECT_LT(s.best_index, grid.size() - 1);
    for (const auto& r : s.risks) EXPECT_GE(r.mean, s.risks[s.best_index].mean);
}

TEST(Tuning, SgdUsesExactRecursion) {
    const auto p = make_power_law_problem(2.0, 1.0, 300, 1.0);
    const double eta = 1.0 / (4.0 * p.spectrum.trace());
    const std::vector<double> grid{eta / 4, eta / 2, eta};
    const auto s = tune_and_measure(p, Algorithm::sgd, 100, grid, 2, 1);
    for (std::size_t g = 0; g < grid.size(); ++g)
        EXPECT_DOUBLE_EQ(s.risks[g].mean, sgd_exact_risk_gaussian(p, 100, grid[g]).mean);
}

TEST(RidgeDominance, DegenerateConventions) {
    // t = ceil(1/(ηλ)) never drops below one step, so huge λ pairs ridge's null fit with a single GD step
    const auto p = make_power_law_problem(2.0, 1.0, 100, 1.0);
    const std::vector<double> big{1e9};
    const auto rows = dominance_gd_vs_ridge(p, 50, big, default_gd_stepsize(p), 4, 1);
    EXPECT_EQ(rows[0].t, 1.0);
    EXPECT_NEAR(rows[0].ridge_mean, p.signal_energy(), 1e-6);
    EXPECT_LE(rows[0].ratio_max, 1.0);

    const auto q = make_power_law_problem(2.0, 1.0, 10, 0.0);
    const std::vector<double> zero{0.0};
    ExperimentOptions opt;
    opt.constants.c3 = 1.0;  // keep the D/n > 1/c3 fallback out of the way
    const auto z = dominance_gd_vs_ridge(q, 40, zero, default_gd_stepsize(q), 4, 1, opt);
    EXPECT_FALSE(z[0].zero_fallback);
    EXPECT_NEAR(z[0].ridge_mean, 0.0, 1e-12);
    EXPECT_NEAR(z[0].gd_mean, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(z[0].ratio_mean, 1.0);
    EXPECT_TRUE(std::isinf(z[0].t));
}

TEST(RidgeDominance, BoundedAndDeterministic) {
    const auto p = make_power_law_problem(2.0, 1.0, 500, 1.0);
    std::vector<double> grid;
    for (int k = 0; k < 8; ++k) grid.push_back(std::pow(10.0, -4.0 + 0.5 * k));
    const auto a = dominance_gd_vs_ridge(p, 100, grid, default_gd_stepsize(p), 6, 11);
    const auto b = dominance_gd_vs_ridge(p, 100, grid, default_gd_stepsize(p), 6, 11, {.threads = 3});
    ASSERT_EQ(a.size(), grid.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].ratio_mean, b[i].ratio_mean);
        EXPECT_EQ(a[i].ratio_max, b[i].ratio_max);
        EXPECT_TRUE(std::isfinite(a[i].ratio_max));
        EXPECT_LT(a[i].ratio_max, 5.0);
    }
}

TEST(SgdDominance, ZeroSignalAndSmallRatio) {
    const auto z = make_custom_problem(Spectrum::power_law(2.0, 200), VectorXd::Zero(200), 1.0);
    const double ez = 1.0 / (4.0 * z.spectrum.trace());
    const std::vector<double> gz{ez};
    const auto rz = dominance_gd_vs_sgd(z, 200, gz, 4, 1);
    EXPECT_GT(rz[0].gd_mean, 0.0);
    EXPECT_GT(rz[0].sgd_risk, 0.0);
    EXPECT_TRUE(std::isfinite(rz[0].ratio));

    const auto p = make_power_law_problem(2.0, 1.0, 400, 1.0);
    const double e = 1.0 / (4.0 * p.spectrum.trace());
    const std::vector<double> grid{e / 8, e / 4, e / 2, e};
    const auto rows = dominance_gd_vs_sgd(p, 200, grid, 6, 2);
    for (const auto& r : rows) {
        EXPECT_EQ(r.gd_t, static_cast<std::int64_t>(std::ceil(4.0 * 200 / std::log(200.0))));
        EXPECT_LT(r.ratio, 3.0);
    }
    const std::vector<double> too_big{2 * e};
    EXPECT_THROW(dominance_gd_vs_sgd(p, 200, too_big, 4, 1), ValidationError);
}

TEST(Separation, MemoryGuardAndSmallRun) {
    EXPECT_THROW(check_memory_budget(512, 512 * 512, 1e6), GuardError);
    EXPECT_NO_THROW(check_memory_budget(64, 4096, default_memory_budget));
    const std::vector<std::size_t> n_grid{64};
    const auto rows = hard_instance_separation(n_grid, 0.0, 3, 5);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].d, 4096u);
    EXPECT_EQ(rows[0].ell_star, 1u);
    EXPECT_GT(rows[0].gd_best_risk, 0.0);
    EXPECT_NEAR(rows[0].gd_normalized, rows[0].gd_best_risk * std::pow(64.0, 0.2), 1e-12);
    EXPECT_NEAR(rows[0].sgd_normalized, rows[0].sgd_risk * 64 / std::log(64.0), 1e-12);
    const auto grid = separation_t_grid();
    EXPECT_EQ(grid.front(), 0.0);
    EXPECT_TRUE(std::isinf(grid.back()));
}

TEST(RateFit, ExactLines) {
    std::vector<std::pair<double, double>> a, b;
    for (double n : {100.0, 200.0, 400.0, 800.0}) {
        a.emplace_back(n, 1.0 / n);
        b.emplace_back(n, 3.0 * std::pow(n, -0.8));
    }
    const auto fa = rate_fit(a);
    EXPECT_NEAR(fa.slope, -1.0, 1e-12);
    EXPECT_NEAR(fa.slope_stderr, 0.0, 1e-12);
    const auto fb = rate_fit(b);
    EXPECT_NEAR(fb.slope, -0.8, 1e-12);
    EXPECT_NEAR(fb.intercept, std::log(3.0), 1e-12);
    std::vector<std::pair<double, double>> bad{{1.0, 1.0}, {2.0, 0.0}};
    EXPECT_THROW(rate_fit(bad), ValidationError);
}

TEST(RateFit, PerturbedPoints) {
    std::mt19937_64 eng(4);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    std::vector<std::pair<double, double>> pts;
    std::vector<double> xs, ys;
    for (double n = 100; n <= 3200; n *= 2) {
        pts.emplace_back(n, std::pow(n, -0.5) * (1 + u(eng)));
        xs.push_back(pts.back().first);
        ys.push_back(pts.back().second);
    }
    const auto f = rate_fit(pts);
    EXPECT_NEAR(f.slope, -0.5, 3 * f.slope_stderr);
    EXPECT_NEAR(f.slope, oracle::fit_slope(xs, ys), 1e-12);
}

TEST(RateTable, TheoryGridAndSmallRun) {
    const auto g = theory_grid(0.5, 15, 0);
    ASSERT_EQ(g.size(), 15u);
    EXPECT_NEAR(g[7], 0.5, 1e-15);
    EXPECT_NEAR(g.back() / g.front(), 100.0, 1e-9);
    EXPECT_EQ(theory_grid(0.5, 15, 4).size(), 15u + 2 * 28);

    const std::vector<double> r{1.0};
    const std::vector<Algorithm> algs{Algorithm::gd};
    const std::vector<std::size_t> ns{64, 128, 256};
    RateOptions opt;
    opt.extension_decades = 1;
    const auto rows = rate_table(2.0, r, algs, ns, 3, 1, opt);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].theory, -0.8, 1e-15);
    EXPECT_EQ(rows[0].points.size(), 3u);
    EXPECT_LT(rows[0].fit.slope, 0.0);
}
