#include "implreg/bounds.hpp"

#include "implreg/errors.hpp"
#include "implreg/estimators.hpp"
#include "implreg/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

namespace implreg {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

// ‖w*‖²_{Σ⁻¹_{0:k}} = Σ_{i≤k} w_i²/λ_i (1-based i)
double head_inverse_norm(const ProblemInstance& p, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < k && i < p.dim(); ++i) {
        const double w = p.wstar[static_cast<Eigen::Index>(i)];
        s += w * w / p.spectrum[i];
    }
    return s;
}

double tail_energy(const ProblemInstance& p, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = p.dim(); i-- > k;) {
        const double w = p.wstar[static_cast<Eigen::Index>(i)];
        s += p.spectrum[i] * w * w;
    }
    return s;
}

BoundReport ridge_like(const ProblemInstance& problem, std::size_t n, double offset, const BoundConstants& c,
                       std::string kind) {
    BoundReport rep;
    rep.kind = std::move(kind);
    const double nn = static_cast<double>(n);
    const IndexScan scan = scan_critical_index(problem.spectrum, n, offset, 1.0, c.c2);
    const std::size_t k = scan.index;
    rep.k_star = k;
    if (std::isinf(offset)) {
        rep.tilde_lambda = inf;
        rep.D = static_cast<double>(k);
        rep.bias_head = 0.0;
    } else {
        rep.tilde_lambda = offset + problem.spectrum.tail_sum(k) / nn;
        const double tsq = problem.spectrum.tail_sq_sum(k);
        rep.D = static_cast<double>(k) + (tsq > 0.0 ? tsq / (rep.tilde_lambda * rep.tilde_lambda) : 0.0);
        rep.bias_head = k > 0 ? rep.tilde_lambda * rep.tilde_lambda * head_inverse_norm(problem, k) : 0.0;
    }
    rep.bias_tail = tail_energy(problem, k);
    rep.variance_term = problem.sigma2 * rep.D / nn;
    rep.upper_total = c.c1 * (rep.bias_head + rep.bias_tail + rep.variance_term);
    rep.lower_total = (rep.bias_head + rep.bias_tail + problem.sigma2 * std::min(rep.D / nn, 1.0)) / c.c1;
    rep.preconditions = {{"k_star_le_n_over_c3", static_cast<double>(k) <= nn / c.c3},
                         {"critical_index_within_cap", scan.met}};
    return rep;
}

void check_common(const ProblemInstance& problem, std::size_t n, const BoundConstants& c) {
    problem.validate();
    c.validate();
    require(n >= 1, "sample size n must be at least 1");
}

}  // namespace

bool BoundReport::precondition(const std::string& name) const {
    for (const auto& [k, v] : preconditions)
        if (k == name) return v;
    throw ValidationError("unknown precondition '" + name + "'");
}

IndexScan scan_critical_index(const Spectrum& spectrum, std::size_t n, double offset, double tail_weight,
                              double c2) {
    const std::size_t cap = std::min(spectrum.size(), 10 * n);
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k <= cap; ++k) {
        const double lhs = offset + tail_weight * spectrum.tail_sum(k) / nn;
        if (lhs >= c2 * spectrum.next_after(k)) return {k, true};
    }
    return {cap, false};
}

BoundReport ridge_bound(const ProblemInstance& problem, std::size_t n, double lambda, const BoundConstants& c) {
    check_common(problem, n, c);
    require(lambda >= 0.0, "ridge lambda must be nonnegative");
    return ridge_like(problem, n, lambda, c, "ridge");
}

BoundReport gd_ridge_type_bound(const ProblemInstance& problem, std::size_t n, double eta, std::int64_t t,
                                const BoundConstants& c) {
    check_common(problem, n, c);
    require(eta > 0.0 && std::isfinite(eta), "GD stepsize must be positive");
    require(t >= 0, "GD stopping time must be ≥ 0");
    const double offset = t == 0 ? inf : 1.0 / (eta * static_cast<double>(t));
    return ridge_like(problem, n, offset, c, "gd_ridge_type");
}

BoundReport gd_lower_bound(const ProblemInstance& problem, std::size_t n, double eta, std::int64_t t,
                           const BoundConstants& c) {
    BoundReport rep = gd_ridge_type_bound(problem, n, eta, t, c);
    rep.kind = "gd_lower";
    const double nn = static_cast<double>(n);
    const IndexScan scan = scan_critical_index(problem.spectrum, n, 0.0, 1.0, c.c2);
    const std::size_t l = scan.index;
    rep.ell_star = l;
    const double reg = problem.spectrum.tail_sum(l) / nn;
    rep.bias_head = l > 0 ? reg * reg * head_inverse_norm(problem, l) : 0.0;
    rep.bias_tail = tail_energy(problem, l);
    rep.variance_term = problem.sigma2 * std::min(rep.D / nn, 1.0);
    rep.lower_total = (rep.bias_head + rep.bias_tail + rep.variance_term) / c.c1;
    rep.preconditions.push_back({"ell_star_within_cap", scan.met});
    return rep;
}

BoundReport gd_sgd_type_bound(const ProblemInstance& problem, std::size_t n, double eta, std::int64_t t,
                              const BoundConstants& c, bool gaussian) {
    check_common(problem, n, c);
    require(eta > 0.0 && std::isfinite(eta), "GD stepsize must be positive");
    require(t >= 0, "GD stopping time must be ≥ 0");
    BoundReport rep;
    rep.kind = gaussian ? "gd_sgd_type_gaussian" : "gd_sgd_type";
    const double nn = static_cast<double>(n);
    const double et = eta * static_cast<double>(t);
    const double inv = t == 0 ? inf : 1.0 / et;
    const IndexScan scan = scan_critical_index(problem.spectrum, n, inv, 0.0, c.c2);
    const std::size_t k = scan.index;
    rep.k_star = k;
    rep.tilde_lambda = inv;
    rep.D = static_cast<double>(k) + et * et * problem.spectrum.tail_sq_sum(k);
    rep.D1 = static_cast<double>(k) + et * problem.spectrum.tail_sum(k);

    double decayed = 0.0;  // ‖(I−ηΣ)^{⌊t/2⌋}w*‖²_{Σ⁻¹_{0:k}}
    const double half = static_cast<double>(t / 2);
    for (std::size_t i = 0; i < k; ++i) {
        const double w = problem.wstar[static_cast<Eigen::Index>(i)];
        const double lam = problem.spectrum[i];
        const double q = std::abs(1.0 - eta * lam);
        const double fac = q == 0.0 ? (half == 0.0 ? 1.0 : 0.0) : std::exp(2.0 * half * std::log(q));
        decayed += fac * w * w / lam;
    }
    const double inv2 = k > 0 ? inv * inv : 0.0;
    rep.bias_head = inv2 * decayed;
    rep.bias_tail = tail_energy(problem, k);
    rep.eff_bias = rep.bias_head + rep.bias_tail;
    const double head = inv2 * head_inverse_norm(problem, k);
    rep.eff_var = head * (gaussian ? rep.D / nn + (*rep.D1 / nn) * (*rep.D1 / nn) : *rep.D1 / nn);
    rep.variance_term = problem.sigma2 * rep.D / nn;
    rep.upper_total = c.c1 * (*rep.eff_bias + *rep.eff_var + rep.variance_term);
    rep.preconditions = {{"eta_le_1_over_2trace", eta <= 1.0 / (2.0 * problem.spectrum.trace()) * (1.0 + 1e-12)},
                         {"t_le_bn", static_cast<double>(t) <= c.b * nn},
                         {"k_star_le_n_over_c3", static_cast<double>(k) <= nn / c.c3},
                         {"critical_index_within_cap", scan.met}};
    return rep;
}

BoundReport sgd_bound(const ProblemInstance& problem, std::size_t n, double eta0, const BoundConstants& c) {
    check_common(problem, n, c);
    require(n >= 2, "the SGD bound needs n ≥ 2");
    require(eta0 >= 0.0 && std::isfinite(eta0), "SGD eta0 must be finite and ≥ 0");
    BoundReport rep;
    rep.kind = "sgd";
    const double nn = static_cast<double>(n);
    const double N = nn / std::log(nn);
    rep.N = N;
    const double eN = eta0 * N;
    const double inv = eta0 == 0.0 ? inf : 1.0 / eN;
    const IndexScan scan = scan_critical_index(problem.spectrum, n, inv, 0.0, c.c2);
    const std::size_t k = scan.index;
    rep.k_star = k;
    rep.tilde_lambda = inv;
    rep.D = static_cast<double>(k) + eN * eN * problem.spectrum.tail_sq_sum(k);

    // stage lengths of the halving schedule
    std::map<std::size_t, double> stages;
    for (std::size_t s = 1; s <= n; ++s) stages[sgd_stage(s, n)] += 1.0;
    for (std::size_t i = 0; i < problem.dim(); ++i) {
        const double lam = problem.spectrum[i];
        const double w = problem.wstar[static_cast<Eigen::Index>(i)];
        double lg = 0.0;
        bool zero = false;
        for (const auto& [l, count] : stages) {
            const double q = std::abs(1.0 - std::ldexp(eta0, -static_cast<int>(l)) * lam);
            if (q == 0.0) {
                zero = true;
                break;
            }
            lg += 2.0 * count * std::log(q);
        }
        const double term = zero ? 0.0 : lam * w * w * std::exp(lg);
        (i < k ? rep.bias_head : rep.bias_tail) += term;
    }
    const double bias = rep.bias_head + rep.bias_tail;
    rep.variance_term = problem.sigma2 * rep.D / N;
    rep.upper_total = c.c1 * (bias + (problem.sigma2 + problem.signal_energy()) * rep.D / N);
    rep.lower_total = (bias + rep.variance_term) / c.c1;
    rep.preconditions = {{"n_ge_100", n >= 100},
                         {"eta_le_1_over_4trace", eta0 <= 1.0 / (4.0 * problem.spectrum.trace()) * (1.0 + 1e-12)},
                         {"critical_index_within_cap", scan.met}};
    return rep;
}

Eigen::MatrixXd shrinkage_matrix(const Eigen::MatrixXd& gram, double eta, std::int64_t t) {
    require(gram.rows() == gram.cols(), "Gram matrix must be square");
    require(t >= 1, "the shrinkage matrix is undefined for t = 0");
    require(eta > 0.0 && std::isfinite(eta), "GD stepsize must be positive");
    const double n = static_cast<double>(gram.rows());
    SymmetricEigen es = symmetric_eigen(gram);
    const double top = es.values.size() ? es.values[0] : 0.0;
    if (top > 0.0 && eta > n / top * (1.0 + 1e-12))
        throw GuardError("stepsize exceeds the stability limit n/||A||");
    const double limit = n / (eta * static_cast<double>(t));
    Eigen::VectorXd m(es.values.size());
    for (Eigen::Index j = 0; j < m.size(); ++j) {
        const double z = es.values[j];
        const double x = eta * z / n;
        if (z <= 0.0 || x < 1e-300) {
            m[j] = limit;
        } else if (x >= 1.0) {
            m[j] = z;
        } else {
            m[j] = z / -std::expm1(static_cast<double>(t) * std::log1p(-x));
        }
    }
    return es.vectors * m.asDiagonal() * es.vectors.transpose();
}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::ridge: return "ridge";
        case Algorithm::gd: return "gd";
        case Algorithm::sgd: return "sgd";
        case Algorithm::minimax: return "minimax";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& s) {
    std::string l;
    for (char ch : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (l == "ridge") return Algorithm::ridge;
    if (l == "gd") return Algorithm::gd;
    if (l == "sgd") return Algorithm::sgd;
    if (l == "minimax") return Algorithm::minimax;
    throw ValidationError("unknown algorithm '" + s + "' (expected ridge, gd, sgd or minimax)");
}

double power_law_exponent(Algorithm algorithm, double a, double r) {
    require(a > 1.0, "power-law exponent a must exceed 1");
    require(r >= 0.0, "source exponent r must be nonnegative");
    const double optimal = -2.0 * a * r / (1.0 + 2.0 * a * r);
    switch (algorithm) {
        case Algorithm::gd:
        case Algorithm::minimax: return optimal;
        case Algorithm::ridge: return r <= 1.0 ? optimal : -2.0 * a / (1.0 + 2.0 * a);
        case Algorithm::sgd: return r >= (a - 1.0) / (2.0 * a) ? optimal : -2.0 * r;
    }
    return optimal;
}

}  // namespace implreg
