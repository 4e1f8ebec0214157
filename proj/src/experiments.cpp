#include "implreg/experiments.hpp"

#include "draws.hpp"
#include "implreg/errors.hpp"
#include "implreg/parallel.hpp"
#include "implreg/rng.hpp"
#include "implreg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace implreg {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

double gd_stepsize_for(const ExperimentOptions& opt, const ProblemInstance& problem, const DesignSpectrum& ds) {
    const double limit = ds.max_stable_stepsize();
    if (opt.gd_stability_fraction) return *opt.gd_stability_fraction * limit;
    return std::min(opt.gd_eta.value_or(default_gd_stepsize(problem)), limit);
}

double ceil_time(double t) { return std::isinf(t) ? t : std::ceil(t); }

struct PointValue {
    BiasVariance bv;
    bool reliable = true;
};

// Index of the smallest finite mean among allowed points; ties keep the first.
std::size_t argmin_allowed(const std::vector<double>& means, const std::vector<bool>& allowed) {
    std::size_t best = means.size();
    for (std::size_t g = 0; g < means.size(); ++g) {
        if (!allowed[g] || !std::isfinite(means[g])) continue;
        if (best == means.size() || means[g] < means[best]) best = g;
    }
    if (best == means.size()) {
        for (std::size_t g = 0; g < means.size(); ++g)
            if (best == means.size() || means[g] < means[best]) best = g;
    }
    return best == means.size() ? 0 : best;
}

bool is_interior(std::size_t best, const std::vector<bool>& reliable) {
    if (best == 0 || best + 1 >= reliable.size()) return false;
    return reliable[best - 1] && reliable[best + 1];
}

}  // namespace

double default_gd_stepsize(const ProblemInstance& problem) { return 1.0 / (2.0 * problem.spectrum.trace()); }

SweepResult tune_and_measure(const ProblemInstance& problem, Algorithm algorithm, std::size_t n,
                             std::span<const double> grid, std::size_t trials, std::uint64_t seed,
                             const ExperimentOptions& options) {
    problem.validate();
    require(!grid.empty(), "hyperparameter grid must be nonempty");
    require(n >= 1, "sample size n must be at least 1");
    require(algorithm != Algorithm::minimax, "minimax is not a runnable algorithm");
    limit_blas_threads();
    SweepResult out;
    out.algorithm = algorithm;
    out.grid.assign(grid.begin(), grid.end());
    const std::size_t G = grid.size();
    out.risks.resize(G);
    out.reliable.assign(G, true);

    if (algorithm == Algorithm::sgd) {
        for (double v : grid) require(v >= 0.0 && std::isfinite(v), "SGD stepsizes must be finite and ≥ 0");
        if (problem.design == Design::gaussian) {
            parallel_for(G, options.threads,
                         [&](std::size_t g) { out.risks[g] = sgd_exact_risk_gaussian(problem, n, grid[g]); });
        } else {
            require(trials >= 2, "SGD on non-Gaussian designs needs at least 2 Monte Carlo trials");
            for (std::size_t g = 0; g < G; ++g)
                out.risks[g] = monte_carlo_risk(problem, SgdConfig{grid[g]}, n, trials,
                                                derive_seed(seed, Stream::cell, g), options.threads);
        }
    } else {
        require(trials >= 1, "at least one design draw is required");
        for (double v : grid)
            require(v >= 0.0 && !std::isnan(v),
                    algorithm == Algorithm::ridge ? "ridge lambdas must be ≥ 0" : "stopping times must be ≥ 0");
        if (algorithm == Algorithm::ridge)
            for (double v : grid) require(std::isfinite(v) || v == inf, "ridge lambda must not be NaN");
        const bool exact_route = detail::prefer_exact(n, problem.dim(), options.exact_route_flops);
        const std::vector<Eigen::VectorXd> wstars{problem.wstar};
        std::vector<std::vector<PointValue>> per_draw(trials, std::vector<PointValue>(G));

        parallel_for(trials, options.threads, [&](std::size_t i) {
            const std::uint64_t s = derive_seed(seed, Stream::trial, i);
            auto evaluate = [&](const detail::Draw& dr) {
                bool all = true;
                const double eta = algorithm == Algorithm::gd ? gd_stepsize_for(options, problem, dr.ds) : 0.0;
                for (std::size_t g = 0; g < G; ++g) {
                    Eigen::VectorXd f;
                    double rho;
                    if (algorithm == Algorithm::ridge) {
                        f = ridge_filter(dr.ds, grid[g]);
                        rho = ridge_level(n, grid[g]);
                    } else {
                        const double t = ceil_time(grid[g]);
                        f = gd_filter(dr.ds, eta, t);
                        rho = gd_level(n, eta, t);
                    }
                    per_draw[i][g].bv = filtered_risk(dr.ds, dr.signals[0], problem.sigma2, f);
                    per_draw[i][g].reliable = dr.ds.reliable(rho);
                    all = all && per_draw[i][g].reliable;
                }
                return all;
            };
            if (!evaluate(detail::draw_design(problem, n, s, wstars, exact_route)) && !exact_route &&
                options.exact_fallback)
                evaluate(detail::draw_design(problem, n, s, wstars, true));
        });

        std::vector<double> tot(trials), bias(trials), var(trials);
        for (std::size_t g = 0; g < G; ++g) {
            for (std::size_t i = 0; i < trials; ++i) {
                tot[i] = per_draw[i][g].bv.total();
                bias[i] = per_draw[i][g].bv.bias;
                var[i] = per_draw[i][g].bv.variance;
                if (!per_draw[i][g].reliable) out.reliable[g] = false;
            }
            const auto ms = mean_stderr(tot);
            RiskEstimate& r = out.risks[g];
            r.mean = ms.mean;
            r.std_error = ms.std_error;
            r.trials = static_cast<std::int64_t>(trials);
            r.method = trials > 1 ? RiskMethod::monte_carlo : RiskMethod::exact_conditional;
            r.bias = mean_stderr(bias).mean;
            r.variance = mean_stderr(var).mean;
        }
    }

    std::vector<double> means(G);
    for (std::size_t g = 0; g < G; ++g) means[g] = out.risks[g].mean;
    out.best_index = argmin_allowed(means, out.reliable);
    out.interior = is_interior(out.best_index, out.reliable);
    return out;
}

std::vector<RidgeDominanceRow> dominance_gd_vs_ridge(const ProblemInstance& problem, std::size_t n,
                                                     std::span<const double> lambda_grid, double eta,
                                                     std::size_t trials, std::uint64_t seed,
                                                     const ExperimentOptions& options) {
    problem.validate();
    options.constants.validate();
    require(!lambda_grid.empty(), "lambda grid must be nonempty");
    require(eta > 0.0 && std::isfinite(eta), "GD stepsize must be positive");
    require(trials >= 1, "at least one design draw is required");
    for (double l : lambda_grid) require(l >= 0.0 && std::isfinite(l), "ridge lambdas must be finite and ≥ 0");
    limit_blas_threads();
    const std::size_t L = lambda_grid.size();
    std::vector<bool> fallback(L);
    for (std::size_t l = 0; l < L; ++l)
        fallback[l] = ridge_bound(problem, n, lambda_grid[l], options.constants).D / static_cast<double>(n) >
                      1.0 / options.constants.c3;

    struct Cell {
        double ridge = 0.0, gd = 0.0, ratio = 0.0;
        bool needed_exact = false;
    };
    std::vector<std::vector<Cell>> per_draw(trials, std::vector<Cell>(L));
    const bool exact_route = detail::prefer_exact(n, problem.dim(), options.exact_route_flops);
    const std::vector<Eigen::VectorXd> wstars{problem.wstar};

    parallel_for(trials, options.threads, [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, Stream::trial, i);
        auto evaluate = [&](const detail::Draw& dr, bool mark) {
            const double eta_d = std::min(eta, dr.ds.max_stable_stepsize());
            bool all = true;
            for (std::size_t l = 0; l < L; ++l) {
                const double lam = lambda_grid[l];
                const double t = fallback[l] ? 0.0 : (lam == 0.0 ? inf : std::ceil(1.0 / (eta_d * lam)));
                const double r = filtered_risk(dr.ds, dr.signals[0], problem.sigma2, ridge_filter(dr.ds, lam)).total();
                const double g = filtered_risk(dr.ds, dr.signals[0], problem.sigma2, gd_filter(dr.ds, eta_d, t)).total();
                Cell& c = per_draw[i][l];
                c.ridge = r;
                c.gd = g;
                c.ratio = (r == 0.0 && g == 0.0) ? 1.0 : g / r;
                c.needed_exact = mark;
                all = all && dr.ds.reliable(ridge_level(n, lam)) && dr.ds.reliable(gd_level(n, eta_d, t));
            }
            return all;
        };
        if (!evaluate(detail::draw_design(problem, n, s, wstars, exact_route), false) && !exact_route &&
            options.exact_fallback)
            evaluate(detail::draw_design(problem, n, s, wstars, true), true);
    });

    std::vector<RidgeDominanceRow> rows(L);
    std::vector<double> rr(trials), gg(trials), ra(trials);
    for (std::size_t l = 0; l < L; ++l) {
        RidgeDominanceRow& row = rows[l];
        row.lambda = lambda_grid[l];
        row.zero_fallback = fallback[l];
        row.t = fallback[l] ? 0.0 : (row.lambda == 0.0 ? inf : std::ceil(1.0 / (eta * row.lambda)));
        row.ratio_max = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            rr[i] = per_draw[i][l].ridge;
            gg[i] = per_draw[i][l].gd;
            ra[i] = per_draw[i][l].ratio;
            row.ratio_max = std::max(row.ratio_max, ra[i]);
            if (per_draw[i][l].needed_exact) ++row.unreliable_draws;
        }
        row.ridge_mean = mean_stderr(rr).mean;
        row.gd_mean = mean_stderr(gg).mean;
        row.ratio_mean = mean_stderr(ra).mean;
    }
    return rows;
}

std::vector<SgdDominanceRow> dominance_gd_vs_sgd(const ProblemInstance& problem, std::size_t n,
                                                 std::span<const double> eta_grid, std::size_t trials,
                                                 std::uint64_t seed, const ExperimentOptions& options) {
    problem.validate();
    require(n >= 2, "sample size n must be at least 2");
    require(!eta_grid.empty(), "SGD stepsize grid must be nonempty");
    const double eta_cap = 1.0 / (4.0 * problem.spectrum.trace());
    for (double e : eta_grid)
        require(e > 0.0 && e <= eta_cap * (1.0 + 1e-12), "each SGD stepsize must lie in (0, 1/(4 tr Σ)]");
    const double N = static_cast<double>(n) / std::log(static_cast<double>(n));
    const double t = std::ceil(4.0 * N);
    ExperimentOptions gd_opt = options;
    const double gd_eta = options.gd_eta.value_or(default_gd_stepsize(problem));
    gd_opt.gd_eta = gd_eta;
    const std::vector<double> tgrid{t};
    const SweepResult gd = tune_and_measure(problem, Algorithm::gd, n, tgrid, trials, seed, gd_opt);

    std::vector<SgdDominanceRow> rows(eta_grid.size());
    parallel_for(eta_grid.size(), options.threads, [&](std::size_t k) {
        SgdDominanceRow& row = rows[k];
        row.eta = eta_grid[k];
        row.sgd_risk = problem.design == Design::gaussian
                           ? sgd_exact_risk_gaussian(problem, n, row.eta).mean
                           : monte_carlo_risk(problem, SgdConfig{row.eta}, n, std::max<std::size_t>(trials, 2),
                                              derive_seed(seed, Stream::cell, k), 1)
                                 .mean;
    });
    for (auto& row : rows) {
        row.gd_eta = gd_eta;
        row.gd_t = static_cast<std::int64_t>(t);
        row.gd_mean = gd.risks[0].mean;
        row.gd_stderr = gd.risks[0].std_error;
        row.ratio = (row.gd_mean == 0.0 && row.sgd_risk == 0.0) ? 1.0 : row.gd_mean / row.sgd_risk;
    }
    return rows;
}

void check_memory_budget(std::size_t n, std::size_t d, double budget_bytes) {
    const double bytes = 8.0 * static_cast<double>(n) * static_cast<double>(d);
    if (bytes > budget_bytes) {
        std::ostringstream msg;
        msg << "memory guard: an n=" << n << " by d=" << d << " design needs " << bytes
            << " bytes, above the budget of " << budget_bytes << " bytes";
        throw GuardError(msg.str());
    }
}

std::vector<double> separation_t_grid() {
    std::vector<double> g{0.0};
    for (int k = 0; k <= 24; ++k) g.push_back(std::ceil(std::pow(10.0, 12.0 * k / 24.0) - 1e-9));
    g.push_back(inf);
    return g;
}

std::vector<SeparationRow> hard_instance_separation(std::span<const std::size_t> n_grid, double sigma2,
                                                    std::size_t trials, std::uint64_t seed,
                                                    const ExperimentOptions& options, double memory_budget) {
    require(!n_grid.empty(), "n grid must be nonempty");
    for (std::size_t n : n_grid) {
        require(n >= 16, "separation needs every n ≥ 16");
        check_memory_budget(n, n * n, memory_budget);
    }
    const auto tgrid = separation_t_grid();
    std::vector<SeparationRow> rows;
    for (std::size_t idx = 0; idx < n_grid.size(); ++idx) {
        const std::size_t n = n_grid[idx];
        const ProblemInstance problem = make_spike_problem(n, n * n, sigma2);
        ExperimentOptions opt = options;
        opt.gd_stability_fraction = 0.5;
        const SweepResult sweep =
            tune_and_measure(problem, Algorithm::gd, n, tgrid, trials, derive_seed(seed, Stream::cell, idx), opt);
        SeparationRow row;
        row.n = n;
        row.d = n * n;
        row.gd_best_risk = sweep.risks[sweep.best_index].mean;
        row.gd_stderr = sweep.risks[sweep.best_index].std_error;
        row.gd_best_t = sweep.grid[sweep.best_index];
        row.gd_interior = sweep.interior;
        row.sgd_risk = sgd_exact_risk_gaussian(problem, n, 1.0 / (4.0 * problem.spectrum.trace())).mean;
        row.ratio = row.gd_best_risk / row.sgd_risk;
        const double nn = static_cast<double>(n);
        row.gd_normalized = row.gd_best_risk * std::pow(nn, 0.2);
        row.sgd_normalized = row.sgd_risk * nn / std::log(nn);
        row.ell_star = scan_critical_index(problem.spectrum, n, 0.0, 1.0, options.constants.c2).index;
        rows.push_back(row);
    }
    return rows;
}

RateFit rate_fit(std::span<const std::pair<double, double>> points) {
    require(points.size() >= 3, "rate_fit needs at least 3 points");
    for (const auto& [n, r] : points) {
        require(n > 0.0 && std::isfinite(n), "rate_fit sample sizes must be positive");
        require(r > 0.0 && std::isfinite(r), "rate_fit risks must be positive and finite");
    }
    const double m = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [n, r] : points) {
        mx += std::log(n);
        my += std::log(r);
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [n, r] : points) {
        const double dx = std::log(n) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(r) - my);
    }
    require(sxx > 0.0, "rate_fit needs at least two distinct sample sizes");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (const auto& [n, r] : points) {
        const double e = std::log(r) - (fit.intercept + fit.slope * std::log(n));
        ssr += e * e;
    }
    fit.slope_stderr = points.size() > 2 ? std::sqrt(ssr / (m - 2.0) / sxx) : 0.0;
    fit.points.assign(points.begin(), points.end());
    return fit;
}

std::vector<double> theory_grid(double center, std::size_t core_points, std::size_t extension_decades) {
    require(center > 0.0 && std::isfinite(center), "grid centre must be positive");
    require(core_points >= 3, "the core grid needs at least 3 points");
    const double step = 2.0 / static_cast<double>(core_points - 1);  // decades between points
    const auto ext = static_cast<std::size_t>(
        std::llround(static_cast<double>(extension_decades) * static_cast<double>(core_points - 1) / 2.0));
    const std::size_t total = core_points + 2 * ext;
    const double mid = static_cast<double>(total - 1) / 2.0;
    std::vector<double> g(total);
    for (std::size_t k = 0; k < total; ++k) g[k] = center * std::pow(10.0, (static_cast<double>(k) - mid) * step);
    return g;
}

std::vector<RateRow> rate_table(double a, std::span<const double> r_list, std::span<const Algorithm> algorithms,
                                std::span<const std::size_t> n_grid, std::size_t trials, std::uint64_t seed,
                                const RateOptions& options) {
    require(a > 1.0, "power-law exponent a must exceed 1");
    require(!r_list.empty(), "r list must be nonempty");
    require(!algorithms.empty(), "algorithm list must be nonempty");
    require(n_grid.size() >= 3, "rate fitting needs at least 3 sample sizes");
    require(trials >= 1, "at least one design draw is required");
    for (double r : r_list) require(r >= 0.0, "source exponents must be ≥ 0");
    for (std::size_t n : n_grid) require(n >= 2, "sample sizes must be ≥ 2");
    for (Algorithm al : algorithms) require(al != Algorithm::minimax, "minimax is not a runnable algorithm");
    limit_blas_threads();

    const std::size_t n_max = *std::max_element(n_grid.begin(), n_grid.end());
    const std::size_t d = options.d ? options.d : std::max<std::size_t>(2 * n_max, 1000);
    std::vector<ProblemInstance> problems;
    std::vector<Eigen::VectorXd> wstars;
    for (double r : r_list) {
        problems.push_back(make_power_law_problem(a, r, d, options.sigma2, options.delta));
        wstars.push_back(problems.back().wstar);
    }
    const ProblemInstance& base = problems.front();
    const double trace = base.spectrum.trace();
    const double gd_eta = 1.0 / (2.0 * trace);
    const std::size_t R = r_list.size();
    const bool want_ridge = std::find(algorithms.begin(), algorithms.end(), Algorithm::ridge) != algorithms.end();
    const bool want_gd = std::find(algorithms.begin(), algorithms.end(), Algorithm::gd) != algorithms.end();
    const bool want_sgd = std::find(algorithms.begin(), algorithms.end(), Algorithm::sgd) != algorithms.end();

    auto center_of = [&](Algorithm al, double r, std::size_t n) {
        const double nn = static_cast<double>(n);
        const double q = 1.0 + 2.0 * a * r;
        switch (al) {
            case Algorithm::ridge: return std::pow(nn, -a / q);
            case Algorithm::gd: return std::pow(nn, a / q);  // ηt
            default: {
                // stepsizes above 1/(4 tr Σ) are outside the SGD guarantees; cap the centre there
                const double N = nn / std::log(nn);
                return std::min(1.0, std::pow(N, -(q - a) / q)) / (4.0 * trace);
            }
        }
    };

    // results[alg][r] → points per n
    std::map<std::pair<int, std::size_t>, std::vector<RatePoint>> results;

    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        const std::size_t n = n_grid[ni];
        if (want_ridge || want_gd) {
            std::vector<std::vector<double>> ridge_grids(R), gd_grids(R);
            for (std::size_t ri = 0; ri < R; ++ri) {
                ridge_grids[ri] = theory_grid(center_of(Algorithm::ridge, r_list[ri], n), options.core_points,
                                              options.extension_decades);
                gd_grids[ri] = theory_grid(center_of(Algorithm::gd, r_list[ri], n), options.core_points,
                                           options.extension_decades);
            }
            const std::size_t G = ridge_grids[0].size();
            // per draw: [ri][alg(0 ridge,1 gd)][g] risk and reliability
            struct DrawOut {
                std::vector<double> risk;
                std::vector<char> ok;
            };
            std::vector<DrawOut> draws(trials);
            const bool exact_route = detail::prefer_exact(n, d, 5e8);
            parallel_for(trials, options.threads, [&](std::size_t i) {
                const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(Stream::cell), ni, i});
                const detail::Draw dr = detail::draw_design(base, n, s, wstars, exact_route);
                const double eta = std::min(gd_eta, dr.ds.max_stable_stepsize());
                DrawOut& o = draws[i];
                o.risk.assign(R * 2 * G, inf);
                o.ok.assign(R * 2 * G, 1);
                for (std::size_t ri = 0; ri < R; ++ri) {
                    for (std::size_t g = 0; g < G; ++g) {
                        if (want_ridge) {
                            const double lam = ridge_grids[ri][g];
                            const std::size_t at = (ri * 2 + 0) * G + g;
                            o.risk[at] = filtered_risk(dr.ds, dr.signals[ri], options.sigma2, ridge_filter(dr.ds, lam)).total();
                            o.ok[at] = dr.ds.reliable(ridge_level(n, lam));
                        }
                        if (want_gd) {
                            const double t = std::ceil(gd_grids[ri][g] / eta);
                            const std::size_t at = (ri * 2 + 1) * G + g;
                            o.risk[at] = filtered_risk(dr.ds, dr.signals[ri], options.sigma2, gd_filter(dr.ds, eta, t)).total();
                            o.ok[at] = dr.ds.reliable(gd_level(n, eta, t));
                        }
                    }
                }
            });
            for (std::size_t ri = 0; ri < R; ++ri) {
                for (int k = 0; k < 2; ++k) {
                    const Algorithm al = k == 0 ? Algorithm::ridge : Algorithm::gd;
                    if ((k == 0 && !want_ridge) || (k == 1 && !want_gd)) continue;
                    std::vector<double> means(G), errs(G), vals(trials);
                    std::vector<bool> ok(G, true);
                    for (std::size_t g = 0; g < G; ++g) {
                        const std::size_t at = (ri * 2 + static_cast<std::size_t>(k)) * G + g;
                        for (std::size_t i = 0; i < trials; ++i) {
                            vals[i] = draws[i].risk[at];
                            if (!draws[i].ok[at]) ok[g] = false;
                        }
                        const auto ms = mean_stderr(vals);
                        means[g] = ms.mean;
                        errs[g] = ms.std_error;
                    }
                    const std::size_t best = argmin_allowed(means, ok);
                    RatePoint pt;
                    pt.n = n;
                    pt.risk = means[best];
                    pt.std_error = errs[best];
                    pt.best_hyper = k == 0 ? ridge_grids[ri][best] : gd_grids[ri][best];
                    pt.center = center_of(al, r_list[ri], n);
                    pt.interior = is_interior(best, ok);
                    results[{static_cast<int>(al), ri}].push_back(pt);
                }
            }
        }
        if (want_sgd) {
            for (std::size_t ri = 0; ri < R; ++ri) {
                const auto grid = theory_grid(center_of(Algorithm::sgd, r_list[ri], n), options.core_points,
                                              options.extension_decades);
                std::vector<double> means(grid.size());
                parallel_for(grid.size(), options.threads, [&](std::size_t g) {
                    means[g] = sgd_exact_risk_gaussian(problems[ri], n, grid[g]).mean;
                });
                // divergent stepsizes count as resolved (+inf), so the optimum next to them is interior
                std::vector<bool> ok(grid.size(), true);
                const std::size_t best = argmin_allowed(means, ok);
                RatePoint pt;
                pt.n = n;
                pt.risk = means[best];
                pt.best_hyper = grid[best];
                pt.center = center_of(Algorithm::sgd, r_list[ri], n);
                pt.interior = is_interior(best, ok);
                results[{static_cast<int>(Algorithm::sgd), ri}].push_back(pt);
            }
        }
    }

    std::vector<RateRow> rows;
    for (Algorithm al : algorithms) {
        for (std::size_t ri = 0; ri < R; ++ri) {
            RateRow row;
            row.algorithm = al;
            row.a = a;
            row.r = r_list[ri];
            row.points = results[{static_cast<int>(al), ri}];
            row.theory = power_law_exponent(al, a, r_list[ri]);
            row.valid = true;
            std::vector<std::pair<double, double>> pts;
            for (const auto& p : row.points) {
                row.valid = row.valid && p.interior && p.risk > 0.0 && std::isfinite(p.risk);
                pts.emplace_back(static_cast<double>(p.n), p.risk);
            }
            if (row.valid) {
                row.fit = rate_fit(pts);
            } else {
                row.fit.slope = row.fit.intercept = row.fit.slope_stderr = std::numeric_limits<double>::quiet_NaN();
                for (const auto& p : pts)
                    if (p.second > 0.0 && std::isfinite(p.second)) row.fit.points.push_back(p);
                if (row.fit.points.size() >= 3) {
                    const RateFit f = rate_fit(row.fit.points);
                    row.fit.slope = f.slope;
                    row.fit.intercept = f.intercept;
                    row.fit.slope_stderr = f.slope_stderr;
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace implreg
