#pragma once

#include "implreg/dataset.hpp"
#include "implreg/estimators.hpp"
#include "implreg/problem.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace implreg {

enum class RiskMethod { exact_conditional, exact_recursion, fixed_design_closed_form, monte_carlo };

std::string to_string(RiskMethod m);

struct RiskEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 1;
    RiskMethod method = RiskMethod::exact_conditional;
    std::optional<double> bias;
    std::optional<double> variance;
};

// ‖w − w*‖²_Σ
double excess_risk(const Eigen::VectorXd& w, const ProblemInstance& problem);

RiskEstimate gd_conditional_risk(const Dataset& data, const ProblemInstance& problem, double eta,
                                 std::int64_t t);
RiskEstimate ridge_conditional_risk(const Dataset& data, const ProblemInstance& problem, double lambda);

// Exact E‖w_n − w*‖²_Σ for Gaussian design via the diagonal second-moment
// recursion. Divergent runs return +inf.
RiskEstimate sgd_exact_risk_gaussian(const ProblemInstance& problem, std::size_t n, double eta0);

// Fixed design: the covariance is the empirical XᵀX/n of the frozen design.
RiskEstimate fixed_design_ridge_risk(const Dataset& data, const ProblemInstance& problem, double lambda);
RiskEstimate fixed_design_gd_risk(const Dataset& data, const ProblemInstance& problem, double eta,
                                  std::int64_t t);

// Averages over fresh designs (noise integrated exactly) for ridge/GD, over
// full SGD paths for SGD. GD stepsizes above a draw's stability limit are
// lowered to that limit.
RiskEstimate monte_carlo_risk(const ProblemInstance& problem, const EstimatorConfig& config,
                              std::size_t n, std::size_t trials, std::uint64_t seed,
                              std::size_t threads = 0);

}  // namespace implreg
