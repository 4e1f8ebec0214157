#pragma once

#include "implreg/dataset.hpp"
#include "implreg/problem.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace implreg {

struct RidgeConfig {
    double lambda = 0.0;
};
struct GdConfig {
    double eta = 0.0;
    std::int64_t t = 0;
};
struct SgdConfig {
    double eta0 = 0.0;
};
using EstimatorConfig = std::variant<RidgeConfig, GdConfig, SgdConfig>;

void validate(const EstimatorConfig& config);

Eigen::VectorXd ridge_fit(const Dataset& data, double lambda);

std::vector<Eigen::VectorXd> gd_path(const Dataset& data, double eta,
                                     std::span<const std::int64_t> checkpoints);

// Unrolled GD in the SVD basis; needs the retained noise and w*.
Eigen::VectorXd gd_analytic(const Dataset& data, const ProblemInstance& problem, double eta,
                            std::int64_t t);

// n/‖XXᵀ‖, or +inf for an all-zero design.
double max_stable_stepsize(const Dataset& data);

std::vector<double> sgd_schedule(std::size_t n, double eta0);

// Halving stage of step s (1-based): floor(s·ln(n)/n).
std::size_t sgd_stage(std::size_t s, std::size_t n);

Eigen::VectorXd sgd_run(const ProblemInstance& problem, std::size_t n, double eta0, std::uint64_t seed);

}  // namespace implreg
