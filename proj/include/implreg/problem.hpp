#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace implreg {

// Nonincreasing, strictly positive population eigenvalues (diagonal Σ).
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(std::vector<double> values);

    static Spectrum power_law(double a, std::size_t d);
    static Spectrum exponential(double base, std::size_t d);  // λ_i = base^{-i}
    static Spectrum polylog(double power, std::size_t d);     // λ_i = 1/((i+1) ln^power(i+1))

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    Eigen::Map<const Eigen::VectorXd> vector() const {
        return {values_.data(), static_cast<Eigen::Index>(values_.size())};
    }

    double trace() const { return suffix_.empty() ? 0.0 : suffix_[0]; }
    // Sum of λ_i over 1-based i > k (0-based indices k..d-1).
    double tail_sum(std::size_t k) const;
    double tail_sq_sum(std::size_t k) const;
    // λ_{k+1} in 1-based terms; 0 beyond the truncation.
    double next_after(std::size_t k) const { return k < values_.size() ? values_[k] : 0.0; }

private:
    std::vector<double> values_;
    std::vector<double> suffix_;
    std::vector<double> suffix_sq_;
};

enum class Design { gaussian, rademacher };

std::string to_string(Design d);
Design design_from_string(const std::string& s);

// How the spectrum was generated, kept for compact serialization.
struct SpectrumOrigin {
    std::string kind = "explicit";
    std::map<std::string, double> params;
};

struct ProblemInstance {
    Spectrum spectrum;
    Eigen::VectorXd wstar;
    double sigma2 = 1.0;
    Design design = Design::gaussian;
    double sigma_x2 = 1.0;
    SpectrumOrigin origin;

    std::size_t dim() const { return spectrum.size(); }
    double signal_energy() const;  // ‖w*‖²_Σ
    void validate() const;
};

struct BoundConstants {
    double c0 = 1.0;
    double c1 = 1.0;
    double c2 = 2.0;
    double c3 = 10.0;
    double sigma_lambda = 1.0;
    double b = 1.0;

    void validate() const;
};

ProblemInstance make_power_law_problem(double a, double r, std::size_t d, double sigma2,
                                       double delta = 0.1);
ProblemInstance make_spike_problem(std::size_t n, std::size_t d, double sigma2);
ProblemInstance make_custom_problem(Spectrum spectrum, Eigen::VectorXd wstar, double sigma2,
                                    Design design = Design::gaussian);

struct SpectrumConditionReport {
    bool holds = true;
    double worst_ratio = 0.0;  // max over the τ grid of LHS/(σ_λ·count)
    double worst_tau = 0.0;
    double sup_ratio = 0.0;    // exact sup over τ ∈ [1/λ₁, 1/λ_d] of LHS/count
};

// τ·Σ_{λ_i<1/τ} λ_i ≤ σ_λ·#{λ_i ≥ 1/τ} on a log grid τ ∈ [1/λ₁, 1/λ_d].
SpectrumConditionReport check_spectrum_condition(const Spectrum& spectrum, double sigma_lambda,
                                                 std::size_t tau_count);

struct SpectrumConditionPoint {
    double lhs = 0.0;
    std::size_t count = 0;
};
SpectrumConditionPoint spectrum_condition_at(const Spectrum& spectrum, double tau);

struct MembershipReport {
    double snr_ratio = 0.0;  // ‖w*‖²_Σ / σ²
    bool well_specified = false;  // in 𝕃_b
    SpectrumConditionReport spectrum_condition;
    bool fast_decay = false;  // in 𝕊_b
};

MembershipReport class_membership(const ProblemInstance& problem, const BoundConstants& constants,
                                  std::size_t tau_count = 200);

}  // namespace implreg
