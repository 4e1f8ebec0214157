#include "implreg/risk.hpp"

#include "draws.hpp"
#include "implreg/errors.hpp"
#include "implreg/parallel.hpp"
#include "implreg/rng.hpp"
#include "implreg/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace implreg {

namespace {

void check_dims(const Dataset& data, const ProblemInstance& problem) {
    if (static_cast<std::size_t>(data.d()) != problem.dim())
        throw ValidationError("dataset dimension does not match the problem");
}

RiskEstimate exact(const BiasVariance& bv, RiskMethod method) {
    RiskEstimate r;
    r.mean = bv.total();
    r.method = method;
    r.bias = bv.bias;
    r.variance = bv.variance;
    return r;
}

void check_gd_stepsize(double eta, double limit) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("GD stepsize must be positive and finite");
    if (eta > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "GD stepsize " << eta << " exceeds the stability limit " << limit;
        throw GuardError(msg.str());
    }
}

}  // namespace

std::string to_string(RiskMethod m) {
    switch (m) {
        case RiskMethod::exact_conditional: return "ExactConditional";
        case RiskMethod::exact_recursion: return "ExactRecursion";
        case RiskMethod::fixed_design_closed_form: return "FixedDesignClosedForm";
        case RiskMethod::monte_carlo: return "MonteCarlo";
    }
    return "unknown";
}

double excess_risk(const Eigen::VectorXd& w, const ProblemInstance& problem) {
    if (static_cast<std::size_t>(w.size()) != problem.dim()) throw ValidationError("weight dimension mismatch");
    const Eigen::ArrayXd diff = (w - problem.wstar).array();
    return (problem.spectrum.vector().array() * diff.square()).sum();
}

RiskEstimate gd_conditional_risk(const Dataset& data, const ProblemInstance& problem, double eta, std::int64_t t) {
    check_dims(data, problem);
    if (t < 0) throw ValidationError("GD stopping time must be ≥ 0");
    const DesignSpectrum ds = design_spectrum(data, problem.spectrum);
    check_gd_stepsize(eta, ds.max_stable_stepsize());
    const SignalCoords sc = signal_coords(data, problem);
    return exact(filtered_risk(ds, sc, problem.sigma2, gd_filter(ds, eta, static_cast<double>(t))),
                 RiskMethod::exact_conditional);
}

RiskEstimate ridge_conditional_risk(const Dataset& data, const ProblemInstance& problem, double lambda) {
    check_dims(data, problem);
    const DesignSpectrum ds = design_spectrum(data, problem.spectrum);
    const SignalCoords sc = signal_coords(data, problem);
    return exact(filtered_risk(ds, sc, problem.sigma2, ridge_filter(ds, lambda)), RiskMethod::exact_conditional);
}

RiskEstimate sgd_exact_risk_gaussian(const ProblemInstance& problem, std::size_t n, double eta0) {
    problem.validate();
    if (problem.design != Design::gaussian)
        throw ValidationError("the exact SGD recursion relies on the Gaussian fourth-moment identity");
    if (!(eta0 >= 0.0) || !std::isfinite(eta0)) throw ValidationError("SGD eta0 must be finite and ≥ 0");
    const Eigen::ArrayXd lam = problem.spectrum.vector().array();
    Eigen::ArrayXd B = problem.wstar.array().square();
    const auto schedule = sgd_schedule(n, eta0);
    RiskEstimate out;
    out.method = RiskMethod::exact_recursion;
    for (double eta : schedule) {
        const double S = (lam * B).sum();
        if (!std::isfinite(S) || S > 1e300) {
            out.mean = std::numeric_limits<double>::infinity();
            return out;
        }
        B = (1.0 - eta * lam).square() * B + (eta * eta) * lam * (lam * B + (S + problem.sigma2));
    }
    const double risk = (lam * B).sum();
    out.mean = std::isfinite(risk) ? risk : std::numeric_limits<double>::infinity();
    return out;
}

RiskEstimate fixed_design_ridge_risk(const Dataset& data, const ProblemInstance& problem, double lambda) {
    check_dims(data, problem);
    if (!(lambda >= 0.0)) throw ValidationError("ridge lambda must be nonnegative");
    const Eigen::Index r = data.rank();
    const double n = static_cast<double>(data.n());
    const Eigen::ArrayXd mu = data.singular_values().head(r).array().square() / n;
    const Eigen::ArrayXd c = (data.V().leftCols(r).transpose() * problem.wstar).array();
    BiasVariance bv;
    if (lambda > 0.0) {
        const Eigen::ArrayXd denom = (mu + lambda).square();
        bv.bias = (mu * c.square() / denom).sum() * lambda * lambda;
        bv.variance = problem.sigma2 / n * (mu.square() / denom).sum();
    } else {
        bv.variance = problem.sigma2 * static_cast<double>(r) / n;
    }
    return exact(bv, RiskMethod::fixed_design_closed_form);
}

RiskEstimate fixed_design_gd_risk(const Dataset& data, const ProblemInstance& problem, double eta, std::int64_t t) {
    check_dims(data, problem);
    if (t < 0) throw ValidationError("GD stopping time must be ≥ 0");
    const Eigen::Index r = data.rank();
    const double n = static_cast<double>(data.n());
    const Eigen::ArrayXd mu = data.singular_values().head(r).array().square() / n;
    check_gd_stepsize(eta, r > 0 ? 1.0 / mu[0] : std::numeric_limits<double>::infinity());
    const Eigen::ArrayXd c = (data.V().leftCols(r).transpose() * problem.wstar).array();
    BiasVariance bv;
    for (Eigen::Index j = 0; j < r; ++j) {
        const double x = eta * mu[j];
        double keep, gone;  // (1−ημ)^t and 1 − (1−ημ)^t
        if (t == 0) {
            keep = 1.0;
            gone = 0.0;
        } else if (x >= 1.0) {
            keep = 0.0;
            gone = 1.0;
        } else {
            const double lg = static_cast<double>(t) * std::log1p(-x);
            keep = std::exp(lg);
            gone = -std::expm1(lg);
        }
        bv.bias += mu[j] * keep * keep * c[j] * c[j];
        bv.variance += gone * gone;
    }
    bv.variance *= problem.sigma2 / n;
    return exact(bv, RiskMethod::fixed_design_closed_form);
}

RiskEstimate monte_carlo_risk(const ProblemInstance& problem, const EstimatorConfig& config, std::size_t n,
                              std::size_t trials, std::uint64_t seed, std::size_t threads) {
    problem.validate();
    validate(config);
    if (trials < 2) throw ValidationError("monte_carlo_risk needs at least 2 trials");
    if (n < 1) throw ValidationError("sample size n must be at least 1");
    limit_blas_threads();
    std::vector<double> total(trials), bias(trials), var(trials);
    const bool is_sgd = std::holds_alternative<SgdConfig>(config);
    const bool exact_route = detail::prefer_exact(n, problem.dim(), 5e8);
    const std::vector<Eigen::VectorXd> wstars{problem.wstar};

    parallel_for(trials, threads, [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, Stream::trial, i);
        if (is_sgd) {
            total[i] = excess_risk(sgd_run(problem, n, std::get<SgdConfig>(config).eta0, s), problem);
            return;
        }
        auto evaluate = [&](const detail::Draw& dr, bool& resolved) {
            Eigen::VectorXd f;
            double rho;
            if (const auto* rc = std::get_if<RidgeConfig>(&config)) {
                f = ridge_filter(dr.ds, rc->lambda);
                rho = ridge_level(n, rc->lambda);
            } else {
                const auto& gc = std::get<GdConfig>(config);
                const double eta = std::min(gc.eta, dr.ds.max_stable_stepsize());
                f = gd_filter(dr.ds, eta, static_cast<double>(gc.t));
                rho = gd_level(n, eta, static_cast<double>(gc.t));
            }
            resolved = dr.ds.reliable(rho);
            return filtered_risk(dr.ds, dr.signals[0], problem.sigma2, f);
        };
        bool resolved = true;
        BiasVariance bv = evaluate(detail::draw_design(problem, n, s, wstars, exact_route), resolved);
        if (!resolved) bv = evaluate(detail::draw_design(problem, n, s, wstars, true), resolved);
        total[i] = bv.total();
        bias[i] = bv.bias;
        var[i] = bv.variance;
    });

    const auto ms = mean_stderr(total);
    RiskEstimate out;
    out.mean = ms.mean;
    out.std_error = ms.std_error;
    out.trials = static_cast<std::int64_t>(trials);
    out.method = RiskMethod::monte_carlo;
    if (!is_sgd) {
        out.bias = mean_stderr(bias).mean;
        out.variance = mean_stderr(var).mean;
    }
    return out;
}

}  // namespace implreg
