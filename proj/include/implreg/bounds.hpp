#pragma once

#include "implreg/problem.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace implreg {

struct BoundReport {
    std::string kind;
    std::size_t k_star = 0;
    std::optional<std::size_t> ell_star;
    double tilde_lambda = 0.0;
    double D = 0.0;
    std::optional<double> D1;
    std::optional<double> N;
    double bias_head = 0.0;
    double bias_tail = 0.0;
    double variance_term = 0.0;
    std::optional<double> eff_bias;
    std::optional<double> eff_var;
    double upper_total = 0.0;
    std::optional<double> lower_total;
    std::vector<std::pair<std::string, bool>> preconditions;

    bool precondition(const std::string& name) const;
};

// Critical-index scans. `offset` is the λ-like additive term (may be +inf);
// `tail_weight` multiplies the averaged tail Σ_{i>k}λ_i/n (0 or 1).
struct IndexScan {
    std::size_t index = 0;
    bool met = true;  // false when the cap was hit
};
IndexScan scan_critical_index(const Spectrum& spectrum, std::size_t n, double offset, double tail_weight,
                              double c2);

BoundReport ridge_bound(const ProblemInstance& problem, std::size_t n, double lambda,
                        const BoundConstants& constants = {});
BoundReport sgd_bound(const ProblemInstance& problem, std::size_t n, double eta0,
                      const BoundConstants& constants = {});
BoundReport gd_ridge_type_bound(const ProblemInstance& problem, std::size_t n, double eta, std::int64_t t,
                                const BoundConstants& constants = {});
BoundReport gd_lower_bound(const ProblemInstance& problem, std::size_t n, double eta, std::int64_t t,
                           const BoundConstants& constants = {});
BoundReport gd_sgd_type_bound(const ProblemInstance& problem, std::size_t n, double eta, std::int64_t t,
                              const BoundConstants& constants = {}, bool gaussian = false);

// Ã = (I − (I − (η/n)A)ᵗ)⁻¹ A through the eigendecomposition of A.
Eigen::MatrixXd shrinkage_matrix(const Eigen::MatrixXd& gram, double eta, std::int64_t t);

enum class Algorithm { ridge, gd, sgd, minimax };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

double power_law_exponent(Algorithm algorithm, double a, double r);

}  // namespace implreg
