#include "implreg/dataset.hpp"
#include "implreg/errors.hpp"
#include "implreg/problem.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace implreg;

TEST(PowerLaw, LeadingEigenvaluesAndDecayOfSignal) {
    const auto p = make_power_law_problem(2.0, 1.0, 1000, 1.0, 0.1);
    EXPECT_DOUBLE_EQ(p.spectrum[0], 1.0);
    EXPECT_DOUBLE_EQ(p.spectrum[1], 0.25);
    // λ_i w*_i² ∝ i^{-b} with b = 1 + 2ar + δ = 5.1
    const double c = p.spectrum[0] * p.wstar[0] * p.wstar[0];
    for (int i : {2, 7, 50, 999}) {
        const double v = p.spectrum[i - 1] * p.wstar[i - 1] * p.wstar[i - 1];
        EXPECT_NEAR(v / c, std::pow(i, -5.1), 1e-12 * std::pow(i, -5.1));
    }
}

TEST(PowerLaw, SourceNormalisationByDirectSum) {
    const auto p = make_power_law_problem(2.0, 1.0, 1000, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) s += p.wstar[i] * p.wstar[i] / p.spectrum[i];
    EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(PowerLaw, ZeroSourceMeansUnitSignal) {
    for (std::size_t d : {10, 500}) {
        const auto p = make_power_law_problem(2.0, 0.0, d, 1.0);
        EXPECT_NEAR(p.signal_energy(), 1.0, 1e-12);
    }
}

TEST(PowerLaw, RejectsDivergentTrace) {
    EXPECT_THROW(make_power_law_problem(1.0, 0.5, 100, 1.0), ValidationError);
    EXPECT_THROW(make_power_law_problem(0.5, 0.5, 100, 1.0), ValidationError);
}

TEST(Spike, ConstructionValues) {
    const auto p = make_spike_problem(100, 10000, 1.0);
    EXPECT_NEAR(p.wstar[0], 7.9433, 1e-4);
    EXPECT_NEAR(p.spectrum[0], 0.015849, 1e-6);
    EXPECT_DOUBLE_EQ(p.spectrum[1], 1e-4);
    EXPECT_DOUBLE_EQ(p.spectrum[9999], 1e-4);
    EXPECT_NEAR(p.spectrum.trace(), 1.0158, 1e-4);
    EXPECT_LE(p.spectrum.trace(), 2.0);
}

TEST(Spike, UnitSignalForAnyN) {
    for (std::size_t n : {4, 10, 32}) EXPECT_NEAR(make_spike_problem(n, n * n, 0.5).signal_energy(), 1.0, 1e-12);
}

TEST(Spike, RejectsSmallDimension) {
    try {
        make_spike_problem(10, 10, 1.0);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("d ≥ n² required"), std::string::npos);
    }
}

TEST(Custom, OneDimensionalAndZeroSignal) {
    const auto p = make_custom_problem(Spectrum({1.0}), Eigen::VectorXd::Ones(1), 1.0);
    EXPECT_EQ(p.dim(), 1u);
    EXPECT_DOUBLE_EQ(p.signal_energy(), 1.0);
    const auto z = make_custom_problem(Spectrum({2.0, 1.0}), Eigen::VectorXd::Zero(2), 1.0);
    EXPECT_DOUBLE_EQ(z.signal_energy(), 0.0);
}

TEST(Custom, RejectsBadSpectra) {
    EXPECT_THROW(Spectrum({1.0, 2.0}), ValidationError);
    EXPECT_THROW(Spectrum({1.0, 0.0}), ValidationError);
    EXPECT_THROW(Spectrum({-1.0}), ValidationError);
    EXPECT_THROW(make_custom_problem(Spectrum({1.0}), Eigen::VectorXd::Ones(2), 1.0), ValidationError);
}

TEST(SpectrumCondition, ExponentialHoldsOnDyadicGrid) {
    const auto s = Spectrum::exponential(2.0, 30);
    for (int k = 1; k < 30; ++k) {
        const auto pt = spectrum_condition_at(s, std::ldexp(1.0, k));
        EXPECT_EQ(pt.count, static_cast<std::size_t>(k));
        EXPECT_NEAR(pt.lhs, 1.0 - std::ldexp(1.0, k - 30), 1e-12);
        EXPECT_LE(pt.lhs, static_cast<double>(pt.count) * (1 + 1e-9));
    }
    EXPECT_TRUE(check_spectrum_condition(s, 1.0, 30).holds);
}

TEST(SpectrumCondition, InverseSquareAtTau100) {
    const auto s = Spectrum::power_law(2.0, 100000);
    const auto pt = spectrum_condition_at(s, 100.0);
    EXPECT_EQ(pt.count, 10u);
    double tail = 0.0;
    for (int i = 11; i <= 100000; ++i) tail += 1.0 / (double(i) * i);
    EXPECT_NEAR(pt.lhs, 100.0 * tail, 1e-9);
    EXPECT_NEAR(pt.lhs, 9.52, 0.01);
    EXPECT_LE(pt.lhs, 1.0 * pt.count);
}

TEST(SpectrumCondition, SpikeViolates) {
    const auto p = make_spike_problem(100, 10000, 1.0);
    const auto pt = spectrum_condition_at(p.spectrum, std::pow(100.0, 0.9));
    EXPECT_EQ(pt.count, 1u);
    EXPECT_NEAR(pt.lhs, 63.1, 0.05);
    EXPECT_FALSE(check_spectrum_condition(p.spectrum, 1.0, 200).holds);
}

TEST(SpectrumCondition, PolylogFlagged) {
    const auto s = Spectrum::polylog(2.0, 10000);
    EXPECT_FALSE(check_spectrum_condition(s, 3.0, 200).holds);
}

TEST(Membership, SpikeAndPowerLaw) {
    BoundConstants c;
    const auto spike = class_membership(make_spike_problem(100, 10000, 1.0), c);
    EXPECT_TRUE(spike.well_specified);
    EXPECT_FALSE(spike.fast_decay);

    c.sigma_lambda = 3.0;
    const auto pl = class_membership(make_power_law_problem(2.0, 0.0, 2000, 1.0), c);
    EXPECT_TRUE(pl.well_specified);
    EXPECT_TRUE(pl.fast_decay);

    const auto zero = class_membership(make_custom_problem(Spectrum({1.0, 0.5}), Eigen::VectorXd::Zero(2), 0.0), c);
    EXPECT_TRUE(zero.well_specified);
}

TEST(Dataset, NoiselessResponse) {
    auto p = make_power_law_problem(2.0, 1.0, 30, 0.0);
    const auto ds = sample_dataset(p, 20, 7);
    EXPECT_LE((ds.y() - ds.X() * p.wstar).norm(), 1e-12);
}

TEST(Dataset, SecondMomentOneDimension) {
    const auto p = make_custom_problem(Spectrum({1.0}), Eigen::VectorXd::Ones(1), 1.0);
    const std::size_t n = 10000;
    const auto X = sample_design(p, n, 11);
    EXPECT_NEAR(X.squaredNorm() / n, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(Dataset, RademacherEntries) {
    auto p = make_custom_problem(Spectrum({4.0, 1.0}), Eigen::VectorXd::Ones(2), 1.0, Design::rademacher);
    const auto X = sample_design(p, 50, 3);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        EXPECT_DOUBLE_EQ(std::abs(X(i, 0)), 2.0);
        EXPECT_DOUBLE_EQ(std::abs(X(i, 1)), 1.0);
    }
}

TEST(Dataset, SameSeedIsBitIdentical) {
    const auto p = make_power_law_problem(2.0, 1.0, 300, 1.0);
    const auto a = sample_dataset(p, 40, 99), b = sample_dataset(p, 40, 99);
    EXPECT_EQ(a.X(), b.X());
    EXPECT_EQ(a.y(), b.y());
    const auto c = sample_dataset(p, 40, 100);
    EXPECT_NE(a.X(), c.X());
}
