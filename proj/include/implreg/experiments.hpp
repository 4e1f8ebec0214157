#pragma once

#include "implreg/bounds.hpp"
#include "implreg/problem.hpp"
#include "implreg/risk.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace implreg {

struct ExperimentOptions {
    std::size_t threads = 0;
    BoundConstants constants;
    // GD stepsize; defaults to 1/(2 tr Σ), lowered per draw to n/‖A‖ if needed.
    std::optional<double> gd_eta;
    // If set, GD uses this fraction of each draw's stability limit n/‖A‖ instead.
    std::optional<double> gd_stability_fraction;
    // Designs with min(n,d)²·max(n,d) above this use the streaming Gram route.
    double exact_route_flops = 5e8;
    // Re-evaluate a draw through the SVD when the Gram route cannot resolve a grid point.
    bool exact_fallback = true;
};

double default_gd_stepsize(const ProblemInstance& problem);

struct SweepResult {
    Algorithm algorithm = Algorithm::ridge;
    std::vector<double> grid;  // λ, stopping time t, or initial SGD stepsize
    std::vector<RiskEstimate> risks;
    std::vector<bool> reliable;  // unresolved points are excluded from the argmin
    std::size_t best_index = 0;
    bool interior = false;
};

SweepResult tune_and_measure(const ProblemInstance& problem, Algorithm algorithm, std::size_t n,
                             std::span<const double> grid, std::size_t trials, std::uint64_t seed,
                             const ExperimentOptions& options = {});

struct RidgeDominanceRow {
    double lambda = 0.0;
    double t = 0.0;  // ceil(1/(ηλ)); +inf for λ = 0
    bool zero_fallback = false;  // ridge D/n > 1/c₃: GD compared at t = 0
    double ridge_mean = 0.0;
    double gd_mean = 0.0;
    double ratio_mean = 0.0;
    double ratio_max = 0.0;
    std::size_t unreliable_draws = 0;
};

std::vector<RidgeDominanceRow> dominance_gd_vs_ridge(const ProblemInstance& problem, std::size_t n,
                                                     std::span<const double> lambda_grid, double eta,
                                                     std::size_t trials, std::uint64_t seed,
                                                     const ExperimentOptions& options = {});

struct SgdDominanceRow {
    double eta = 0.0;
    double sgd_risk = 0.0;
    double gd_eta = 0.0;
    std::int64_t gd_t = 0;
    double gd_mean = 0.0;
    double gd_stderr = 0.0;
    double ratio = 0.0;
};

std::vector<SgdDominanceRow> dominance_gd_vs_sgd(const ProblemInstance& problem, std::size_t n,
                                                 std::span<const double> eta_grid, std::size_t trials,
                                                 std::uint64_t seed, const ExperimentOptions& options = {});

struct SeparationRow {
    std::size_t n = 0;
    std::size_t d = 0;
    double gd_best_risk = 0.0;
    double gd_stderr = 0.0;
    double gd_best_t = 0.0;
    bool gd_interior = false;
    double sgd_risk = 0.0;
    double ratio = 0.0;
    double gd_normalized = 0.0;   // gd_best_risk·n^0.2
    double sgd_normalized = 0.0;  // sgd_risk·n/ln n
    std::size_t ell_star = 0;
};

inline constexpr double default_memory_budget = 1024.0 * 1024.0 * 1024.0;

// Spike-size guard: a materialized n×n² design must fit the budget.
void check_memory_budget(std::size_t n, std::size_t d, double budget_bytes);

std::vector<double> separation_t_grid();

std::vector<SeparationRow> hard_instance_separation(std::span<const std::size_t> n_grid, double sigma2,
                                                    std::size_t trials, std::uint64_t seed,
                                                    const ExperimentOptions& options = {},
                                                    double memory_budget = default_memory_budget);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::vector<std::pair<double, double>> points;
};

RateFit rate_fit(std::span<const std::pair<double, double>> points);

struct RateOptions {
    std::size_t d = 0;  // 0: max(2·max n, 1000), shared by all n
    double sigma2 = 1.0;
    double delta = 0.1;
    std::size_t core_points = 15;       // spanning ×10² around the theory value
    std::size_t extension_decades = 4;  // extra decades on each side, same spacing
    std::size_t threads = 0;
};

struct RatePoint {
    std::size_t n = 0;
    double risk = 0.0;
    double std_error = 0.0;
    double best_hyper = 0.0;  // λ, ηt, or η
    double center = 0.0;      // theory-centred grid value
    bool interior = false;
};

struct RateRow {
    Algorithm algorithm = Algorithm::gd;
    double a = 0.0;
    double r = 0.0;
    RateFit fit;
    double theory = 0.0;
    bool valid = false;
    std::vector<RatePoint> points;
};

std::vector<double> theory_grid(double center, std::size_t core_points, std::size_t extension_decades);

std::vector<RateRow> rate_table(double a, std::span<const double> r_list, std::span<const Algorithm> algorithms,
                                std::span<const std::size_t> n_grid, std::size_t trials, std::uint64_t seed,
                                const RateOptions& options = {});

}  // namespace implreg
