#include "implreg/problem.hpp"

#include "implreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace implreg {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

}  // namespace

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
    require(!values_.empty(), "spectrum must have at least one eigenvalue");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        require(std::isfinite(values_[i]) && values_[i] > 0.0,
                "eigenvalue " + std::to_string(i + 1) + " is not strictly positive");
        require(i == 0 || values_[i] <= values_[i - 1],
                "eigenvalues must be nonincreasing (violated at index " + std::to_string(i + 1) + ")");
    }
    const std::size_t d = values_.size();
    suffix_.assign(d + 1, 0.0);
    suffix_sq_.assign(d + 1, 0.0);
    // accumulate from the smallest values up
    for (std::size_t i = d; i-- > 0;) {
        suffix_[i] = suffix_[i + 1] + values_[i];
        suffix_sq_[i] = suffix_sq_[i + 1] + values_[i] * values_[i];
    }
}

Spectrum Spectrum::power_law(double a, std::size_t d) {
    require(a > 0.0, "power-law exponent must be positive");
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = std::pow(static_cast<double>(i + 1), -a);
    return Spectrum(std::move(v));
}

Spectrum Spectrum::exponential(double base, std::size_t d) {
    require(base > 1.0, "exponential base must exceed 1");
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = std::pow(base, -static_cast<double>(i + 1));
    return Spectrum(std::move(v));
}

Spectrum Spectrum::polylog(double power, std::size_t d) {
    require(power > 0.0, "polylog power must be positive");
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double x = static_cast<double>(i + 2);
        v[i] = 1.0 / (x * std::pow(std::log(x), power));
    }
    return Spectrum(std::move(v));
}

double Spectrum::tail_sum(std::size_t k) const { return k < values_.size() ? suffix_[k] : 0.0; }

double Spectrum::tail_sq_sum(std::size_t k) const { return k < values_.size() ? suffix_sq_[k] : 0.0; }

std::string to_string(Design d) { return d == Design::gaussian ? "gaussian" : "rademacher"; }

Design design_from_string(const std::string& s) {
    if (s == "gaussian") return Design::gaussian;
    if (s == "rademacher") return Design::rademacher;
    throw ValidationError("unknown design '" + s + "' (expected gaussian or rademacher)");
}

double ProblemInstance::signal_energy() const {
    double s = 0.0;
    for (std::size_t i = dim(); i-- > 0;) s += spectrum[i] * wstar[static_cast<Eigen::Index>(i)] * wstar[static_cast<Eigen::Index>(i)];
    return s;
}

void ProblemInstance::validate() const {
    require(spectrum.size() > 0, "problem has an empty spectrum");
    require(static_cast<std::size_t>(wstar.size()) == spectrum.size(),
            "wstar length " + std::to_string(wstar.size()) + " does not match spectrum length " +
                std::to_string(spectrum.size()));
    require(wstar.allFinite(), "wstar must be finite");
    require(std::isfinite(sigma2) && sigma2 >= 0.0, "sigma2 must be finite and nonnegative");
    require(std::isfinite(sigma_x2) && sigma_x2 > 0.0, "sigma_x2 must be positive");
    require(design != Design::gaussian || sigma_x2 == 1.0, "gaussian design requires sigma_x2 = 1");
    require(std::isfinite(signal_energy()), "‖w*‖²_Σ must be finite");
}

void BoundConstants::validate() const {
    require(c0 >= 1.0 && c1 >= 1.0 && c2 >= 1.0 && c3 >= 1.0, "bound constants c0..c3 must be ≥ 1");
    require(sigma_lambda > 0.0, "sigma_lambda must be positive");
    require(b > 0.0, "b must be positive");
}

ProblemInstance make_power_law_problem(double a, double r, std::size_t d, double sigma2, double delta) {
    require(a > 1.0, "power-law problems need a > 1 (trace diverges otherwise)");
    require(r >= 0.0, "source exponent r must be nonnegative");
    require(delta > 0.0, "delta must be positive");
    require(d >= 1, "d must be positive");
    ProblemInstance p;
    p.spectrum = Spectrum::power_law(a, d);
    const double b = 1.0 + 2.0 * a * r + delta;
    p.wstar.resize(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i)
        p.wstar[static_cast<Eigen::Index>(i)] = std::pow(static_cast<double>(i + 1), 0.5 * (a - b));
    double source = 0.0;
    for (std::size_t i = d; i-- > 0;) {
        const double w = p.wstar[static_cast<Eigen::Index>(i)];
        source += std::pow(p.spectrum[i], 1.0 - 2.0 * r) * w * w;
    }
    p.wstar /= std::sqrt(source);
    p.sigma2 = sigma2;
    p.origin = {"power_law", {{"a", a}, {"r", r}, {"delta", delta}}};
    p.validate();
    return p;
}

ProblemInstance make_spike_problem(std::size_t n, std::size_t d, double sigma2) {
    require(n >= 1, "n must be positive");
    require(d >= n * n, "d ≥ n² required for the spike construction (got n=" + std::to_string(n) +
                            ", d=" + std::to_string(d) + ")");
    require(sigma2 >= 0.0 && sigma2 <= 1.0, "spike construction needs 0 ≤ sigma2 ≤ 1");
    const double nn = static_cast<double>(n);
    std::vector<double> v(d, 1.0 / static_cast<double>(d));
    v[0] = std::pow(nn, -0.9);
    ProblemInstance p;
    p.spectrum = Spectrum(std::move(v));
    p.wstar = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    p.wstar[0] = std::pow(nn, 0.45);
    p.sigma2 = sigma2;
    p.origin = {"spike", {{"n", nn}}};
    p.validate();
    return p;
}

ProblemInstance make_custom_problem(Spectrum spectrum, Eigen::VectorXd wstar, double sigma2, Design design) {
    ProblemInstance p;
    p.spectrum = std::move(spectrum);
    p.wstar = std::move(wstar);
    p.sigma2 = sigma2;
    p.design = design;
    p.validate();
    return p;
}

SpectrumConditionPoint spectrum_condition_at(const Spectrum& spectrum, double tau) {
    // values at or above the threshold, with a relative tolerance so that grid
    // points landing exactly on an eigenvalue count it
    const double threshold = (1.0 / tau) * (1.0 - 1e-12);
    auto vals = spectrum.values();
    auto it = std::partition_point(vals.begin(), vals.end(), [&](double v) { return v >= threshold; });
    SpectrumConditionPoint pt;
    pt.count = static_cast<std::size_t>(it - vals.begin());
    pt.lhs = tau * spectrum.tail_sum(pt.count);
    return pt;
}

SpectrumConditionReport check_spectrum_condition(const Spectrum& spectrum, double sigma_lambda,
                                                 std::size_t tau_count) {
    require(tau_count >= 1, "tau_count must be at least 1");
    require(sigma_lambda > 0.0, "sigma_lambda must be positive");
    SpectrumConditionReport rep;
    const std::size_t d = spectrum.size();
    const double lo = std::log(1.0 / spectrum[0]);
    const double hi = std::log(1.0 / spectrum[d - 1]);
    rep.worst_ratio = 0.0;
    rep.worst_tau = std::exp(lo);
    for (std::size_t g = 0; g < tau_count; ++g) {
        const double frac = tau_count == 1 ? 0.0 : static_cast<double>(g) / static_cast<double>(tau_count - 1);
        const double tau = std::exp(lo + (hi - lo) * frac);
        const auto pt = spectrum_condition_at(spectrum, tau);
        const double ratio = pt.count == 0 ? std::numeric_limits<double>::infinity()
                                           : pt.lhs / (sigma_lambda * static_cast<double>(pt.count));
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_tau = tau;
        }
    }
    rep.holds = rep.worst_ratio <= 1.0 + 1e-12;

    double sup = 0.0;
    for (std::size_t k = 1; k < d; ++k) {
        if (spectrum[k] < spectrum[k - 1])
            sup = std::max(sup, spectrum.tail_sum(k) / (spectrum[k] * static_cast<double>(k)));
    }
    rep.sup_ratio = sup;
    return rep;
}

MembershipReport class_membership(const ProblemInstance& problem, const BoundConstants& constants,
                                  std::size_t tau_count) {
    MembershipReport rep;
    const double energy = problem.signal_energy();
    if (problem.sigma2 > 0.0)
        rep.snr_ratio = energy / problem.sigma2;
    else
        rep.snr_ratio = energy > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    rep.well_specified = energy <= constants.b * problem.sigma2 * (1.0 + 1e-12);
    rep.spectrum_condition = check_spectrum_condition(problem.spectrum, constants.sigma_lambda, tau_count);
    rep.fast_decay = rep.well_specified && rep.spectrum_condition.holds;
    return rep;
}

}  // namespace implreg
