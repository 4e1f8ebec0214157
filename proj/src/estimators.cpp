#include "implreg/estimators.hpp"

#include "implreg/errors.hpp"
#include "implreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace implreg {

namespace {

void check_stepsize(const Dataset& data, double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("GD stepsize must be positive and finite");
    const double limit = max_stable_stepsize(data);
    if (eta > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "GD stepsize " << eta << " exceeds the stability limit n/||XX^T|| = " << limit;
        throw GuardError(msg.str());
    }
}

}  // namespace

void validate(const EstimatorConfig& config) {
    std::visit(
        [](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, RidgeConfig>) {
                if (!(c.lambda >= 0.0) || std::isnan(c.lambda)) throw ValidationError("ridge lambda must be ≥ 0");
            } else if constexpr (std::is_same_v<T, GdConfig>) {
                if (!(c.eta > 0.0) || !std::isfinite(c.eta)) throw ValidationError("GD eta must be positive and finite");
                if (c.t < 0) throw ValidationError("GD stopping time must be ≥ 0");
            } else {
                if (!(c.eta0 > 0.0) || !std::isfinite(c.eta0)) throw ValidationError("SGD eta0 must be positive and finite");
            }
        },
        config);
}

double max_stable_stepsize(const Dataset& data) {
    const double g = data.gram_norm();
    return g > 0.0 ? static_cast<double>(data.n()) / g : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd ridge_fit(const Dataset& data, double lambda) {
    if (!(lambda >= 0.0)) throw ValidationError("ridge lambda must be nonnegative");
    const Eigen::Index r = data.rank();
    const auto s = data.singular_values().head(r).array();
    const double nl = static_cast<double>(data.n()) * lambda;
    Eigen::VectorXd uy = data.U().leftCols(r).transpose() * data.y();
    Eigen::VectorXd coef = (s / (s.square() + nl)).matrix().cwiseProduct(uy);
    return data.V().leftCols(r) * coef;
}

std::vector<Eigen::VectorXd> gd_path(const Dataset& data, double eta, std::span<const std::int64_t> checkpoints) {
    check_stepsize(data, eta);
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
        throw ValidationError("GD checkpoints must be sorted ascending");
    if (!checkpoints.empty() && checkpoints.front() < 0) throw ValidationError("GD checkpoints must be ≥ 0");
    std::vector<Eigen::VectorXd> out;
    out.reserve(checkpoints.size());
    const double step = eta / static_cast<double>(data.n());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(data.d());
    Eigen::VectorXd resid(data.n());
    std::int64_t t = 0;
    for (std::int64_t target : checkpoints) {
        for (; t < target; ++t) {
            resid.noalias() = data.X() * w - data.y();
            w.noalias() -= step * (data.X().transpose() * resid);
        }
        out.push_back(w);
    }
    return out;
}

Eigen::VectorXd gd_analytic(const Dataset& data, const ProblemInstance& problem, double eta, std::int64_t t) {
    if (!data.noise()) throw ValidationError("gd_analytic needs the realized noise vector");
    if (problem.wstar.size() != data.d()) throw ValidationError("problem dimension does not match the dataset");
    if (t < 0) throw ValidationError("GD stopping time must be ≥ 0");
    check_stepsize(data, eta);
    const Eigen::Index r = data.rank();
    const auto s = data.singular_values().head(r).array();
    Eigen::ArrayXd f(r);
    const double n = static_cast<double>(data.n());
    for (Eigen::Index j = 0; j < r; ++j) {
        const double x = eta * s[j] * s[j] / n;
        f[j] = t == 0 ? 0.0 : (x >= 1.0 ? 1.0 : -std::expm1(static_cast<double>(t) * std::log1p(-x)));
    }
    auto Vr = data.V().leftCols(r);
    Eigen::ArrayXd signal = (Vr.transpose() * problem.wstar).array();
    Eigen::ArrayXd noise = (data.U().leftCols(r).transpose() * *data.noise()).array();
    return Vr * (f * signal + f / s * noise).matrix();
}

std::size_t sgd_stage(std::size_t s, std::size_t n) {
    if (n < 2) return 0;
    return static_cast<std::size_t>(std::floor(static_cast<double>(s) * std::log(static_cast<double>(n)) /
                                               static_cast<double>(n)));
}

std::vector<double> sgd_schedule(std::size_t n, double eta0) {
    std::vector<double> out(n);
    for (std::size_t s = 1; s <= n; ++s) out[s - 1] = std::ldexp(eta0, -static_cast<int>(sgd_stage(s, n)));
    return out;
}

Eigen::VectorXd sgd_run(const ProblemInstance& problem, std::size_t n, double eta0, std::uint64_t seed) {
    problem.validate();
    if (!(eta0 >= 0.0) || !std::isfinite(eta0)) throw ValidationError("SGD eta0 must be finite and ≥ 0");
    const auto d = static_cast<Eigen::Index>(problem.dim());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    if (n == 0) return w;
    const Eigen::ArrayXd scale = problem.spectrum.vector().array().sqrt();
    const double sigma = std::sqrt(problem.sigma2);
    const auto schedule = sgd_schedule(n, eta0);
    Engine eng = make_engine(derive_seed(seed, Stream::sgd));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(d);
    for (std::size_t s = 0; s < n; ++s) {
        if (problem.design == Design::gaussian) {
            for (Eigen::Index j = 0; j < d; ++j) x[j] = scale[j] * normal(eng);
        } else {
            for (Eigen::Index j = 0; j < d; ++j) x[j] = (eng() >> 63) ? scale[j] : -scale[j];
        }
        const double y = x.dot(problem.wstar) + sigma * normal(eng);
        const double g = x.dot(w) - y;
        w.noalias() -= (schedule[s] * g) * x;
    }
    return w;
}

}  // namespace implreg
