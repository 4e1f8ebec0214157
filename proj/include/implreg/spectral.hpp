#pragma once

// Conditional-on-X risk machinery shared by ridge and GD.
//
// Both estimators have the form ŵ = V diag(f/s) Uᵀy in the SVD basis of X, with
// a filter f ∈ [0,1] per retained direction. Writing a = Vᵀw*, b = VᵀΣw* and
// G = VᵀΣV, the exact conditional risk is
//   bias     = ‖w*‖²_Σ − 2 Σ f a b + (f∘a)ᵀ G (f∘a)
//   variance = σ² Σ f²/e · G_jj,      e = s².

#include "implreg/dataset.hpp"
#include "implreg/problem.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace implreg {

struct DesignSpectrum {
    std::size_t n = 0;
    Eigen::VectorXd eig;  // retained Gram eigenvalues, descending
    Eigen::MatrixXd cov;  // VᵀΣV on the retained directions
    double gram_norm = 0.0;
    // Relative accuracy floor of the factorization; see reliable().
    double tolerance = 0.0;

    // Whether the risk at regularization level ρ (nλ or n/(ηt)) is resolved
    // to working accuracy by this factorization.
    bool reliable(double rho) const;
    double max_stable_stepsize() const;
};

struct SignalCoords {
    Eigen::VectorXd a;  // Vᵀw*
    Eigen::VectorXd b;  // VᵀΣw*
    double energy = 0.0;
};

struct BiasVariance {
    double bias = 0.0;
    double variance = 0.0;
    double total() const { return bias + variance; }
};

// Accurate route through the dataset's cached SVD.
DesignSpectrum design_spectrum(const Dataset& data, const Spectrum& spectrum);
SignalCoords signal_coords(const Dataset& data, const ProblemInstance& problem);

// Fast route: accumulates XXᵀ and XΣXᵀ block by block without keeping X, then
// eigendecomposes the n×n Gram matrix. X matches sample_design(problem, n, seed).
struct StreamedDesign {
    DesignSpectrum spectrum;
    std::vector<SignalCoords> signals;  // one per requested w*
};

inline constexpr double gram_route_tolerance = 1e-6;

StreamedDesign stream_design(const ProblemInstance& problem, std::size_t n, std::uint64_t seed,
                             std::span<const Eigen::VectorXd> wstars);

Eigen::VectorXd ridge_filter(const DesignSpectrum& ds, double lambda);
// t < 0 is not allowed; t = +inf gives the interpolating limit.
Eigen::VectorXd gd_filter(const DesignSpectrum& ds, double eta, double t);

BiasVariance filtered_risk(const DesignSpectrum& ds, const SignalCoords& sc, double sigma2,
                           const Eigen::VectorXd& f);

inline double ridge_level(std::size_t n, double lambda) { return static_cast<double>(n) * lambda; }
double gd_level(std::size_t n, double eta, double t);

}  // namespace implreg
