#include "implreg/cli.hpp"

#include "implreg/bounds.hpp"
#include "implreg/errors.hpp"
#include "implreg/experiments.hpp"
#include "implreg/parallel.hpp"
#include "implreg/risk.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace implreg {

namespace fs = std::filesystem;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Typed access to the command-specific "params" object.
class Params {
public:
    explicit Params(const json& p) : p_(p) {}

    bool has(const char* key) const { return p_.contains(key) && !p_.at(key).is_null(); }

    double num(const char* key) const {
        if (!has(key)) throw ValidationError(std::string("params.") + key + " is required");
        const json& v = p_.at(key);
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "inf") return inf;
        }
        if (!v.is_number()) throw ValidationError(std::string("params.") + key + " must be a number");
        return v.get<double>();
    }
    double num(const char* key, double fallback) const { return has(key) ? num(key) : fallback; }

    std::size_t integer(const char* key, std::size_t min_value = 0) const {
        const double v = num(key);
        if (!(v >= static_cast<double>(min_value)) || v != std::floor(v) || v > 1e15)
            throw ValidationError(std::string("params.") + key + " must be an integer ≥ " + std::to_string(min_value));
        return static_cast<std::size_t>(v);
    }
    std::size_t integer(const char* key, std::size_t fallback, std::size_t min_value) const {
        return has(key) ? integer(key, min_value) : fallback;
    }

    std::string str(const char* key) const {
        if (!has(key)) throw ValidationError(std::string("params.") + key + " is required");
        if (!p_.at(key).is_string()) throw ValidationError(std::string("params.") + key + " must be a string");
        return p_.at(key).get<std::string>();
    }
    std::string str(const char* key, const std::string& fallback) const { return has(key) ? str(key) : fallback; }

    bool flag(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!p_.at(key).is_boolean()) throw ValidationError(std::string("params.") + key + " must be a boolean");
        return p_.at(key).get<bool>();
    }

    std::vector<double> list(const char* key) const {
        if (!has(key)) throw ValidationError(std::string("params.") + key + " is required");
        const json& v = p_.at(key);
        if (!v.is_array() || v.empty()) throw ValidationError(std::string("params.") + key + " must be a nonempty array");
        std::vector<double> out;
        for (const auto& e : v) {
            if (e.is_string() && e.get<std::string>() == "inf") {
                out.push_back(inf);
                continue;
            }
            if (!e.is_number()) throw ValidationError(std::string("params.") + key + " must contain numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<std::size_t> counts(const char* key) const {
        std::vector<std::size_t> out;
        for (double v : list(key)) {
            if (!(v >= 1.0) || v != std::floor(v) || v > 1e15)
                throw ValidationError(std::string("params.") + key + " must contain positive integers");
            out.push_back(static_cast<std::size_t>(v));
        }
        return out;
    }

    std::vector<std::string> strings(const char* key) const {
        if (!has(key)) throw ValidationError(std::string("params.") + key + " is required");
        const json& v = p_.at(key);
        if (!v.is_array() || v.empty()) throw ValidationError(std::string("params.") + key + " must be a nonempty array");
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) throw ValidationError(std::string("params.") + key + " must contain strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    const json& raw(const char* key) const { return p_.at(key); }

private:
    const json& p_;
};

bool needs_problem(const std::string& cmd) {
    return cmd == "bounds" || cmd == "simulate" || cmd == "sweep" || cmd == "compare";
}

std::vector<double> grid_from(const Params& p) {
    if (p.has("grid")) return p.list("grid");
    if (p.has("grid_logspace")) {
        const auto spec = p.list("grid_logspace");
        if (spec.size() != 3 || spec[2] < 1 || spec[2] != std::floor(spec[2]))
            throw ValidationError("params.grid_logspace must be [start_exponent, stop_exponent, points]");
        const auto m = static_cast<std::size_t>(spec[2]);
        std::vector<double> g(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double frac = m == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(m - 1);
            g[k] = std::pow(10.0, spec[0] + (spec[1] - spec[0]) * frac);
        }
        return g;
    }
    throw ValidationError("params.grid or params.grid_logspace is required");
}

void write_plot(const fs::path& dir, const std::string& name, const std::vector<double>& x,
                const std::vector<double>& y, const std::vector<double>& yerr) {
    CsvTable t({"x", "y", "yerr"});
    for (std::size_t i = 0; i < x.size(); ++i) t.add_row({x[i], y[i], yerr[i]});
    t.write(dir / ("plotdata_" + name + ".csv"));
}

std::string tag(double v) {
    std::string s = format_number(v);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

struct Context {
    const RunConfig& cfg;
    bool dry_run;
    std::vector<Diagnostic>& diags;
    fs::path out;
    std::optional<ProblemInstance> problem;

    void warn(const std::string& msg) { diags.push_back({Diagnostic::Level::warning, msg}); }
};

std::string preconditions_string(const BoundReport& r) {
    std::string s;
    for (const auto& [k, v] : r.preconditions) s += (s.empty() ? "" : ";") + k + "=" + (v ? "1" : "0");
    return s;
}

void cmd_bounds(Context& cx) {
    const Params p(cx.cfg.params);
    const ProblemInstance& prob = *cx.problem;
    const std::size_t n = p.integer("n", 1);
    const BoundConstants c = constants_from_json(p.has("constants") ? p.raw("constants") : json());
    const double trace = prob.spectrum.trace();
    const double lambda = p.num("lambda", 0.0);
    const double eta = p.num("eta", 1.0 / (2.0 * trace));
    const auto t = static_cast<std::int64_t>(p.integer("t", n, 0));
    const double eta0 = p.num("eta0", 1.0 / (4.0 * trace));
    const bool gaussian = p.flag("gaussian", prob.design == Design::gaussian);
    std::vector<std::string> which{"ridge", "gd_ridge_type", "gd_lower", "gd_sgd_type", "sgd"};
    if (p.has("bounds")) which = p.strings("bounds");
    for (const auto& w : which)
        if (w != "ridge" && w != "gd_ridge_type" && w != "gd_lower" && w != "gd_sgd_type" && w != "sgd")
            throw ValidationError("unknown bound '" + w + "'");
    const bool wants_sgd = std::find(which.begin(), which.end(), "sgd") != which.end();
    if (wants_sgd && n < 100) cx.warn("SGD bound precondition n ≥ 100 not met (n = " + std::to_string(n) + ")");
    if (wants_sgd && n < 2) throw ValidationError("the SGD bound needs n ≥ 2");
    if (eta > 1.0 / (2.0 * trace) * (1 + 1e-12))
        cx.warn("GD stepsize exceeds 1/(2 tr Σ); the SGD-type GD bound precondition is not met");
    if (wants_sgd && eta0 > 1.0 / (4.0 * trace) * (1 + 1e-12))
        cx.warn("SGD stepsize exceeds 1/(4 tr Σ); the SGD bound precondition is not met");
    if (!(lambda >= 0.0)) throw ValidationError("params.lambda must be ≥ 0");
    if (!(eta > 0.0)) throw ValidationError("params.eta must be positive");
    if (!(eta0 >= 0.0)) throw ValidationError("params.eta0 must be ≥ 0");
    if (cx.dry_run) return;

    CsvTable table({"bound", "n", "lambda", "eta", "t", "eta0", "k_star", "ell_star", "tilde_lambda", "D", "D1", "N",
                    "bias_head", "bias_tail", "variance_term", "eff_bias", "eff_var", "upper_total", "lower_total",
                    "preconditions_met", "preconditions"});
    json docs = json::array();
    for (const auto& w : which) {
        BoundReport r;
        CsvCell cl = std::monostate{}, ce = std::monostate{}, ct = std::monostate{}, ce0 = std::monostate{};
        if (w == "ridge") {
            r = ridge_bound(prob, n, lambda, c);
            cl = lambda;
        } else if (w == "gd_ridge_type") {
            r = gd_ridge_type_bound(prob, n, eta, t, c);
        } else if (w == "gd_lower") {
            r = gd_lower_bound(prob, n, eta, t, c);
        } else if (w == "gd_sgd_type") {
            r = gd_sgd_type_bound(prob, n, eta, t, c, gaussian);
        } else {
            r = sgd_bound(prob, n, eta0, c);
            ce0 = eta0;
        }
        if (w.rfind("gd", 0) == 0) {
            ce = eta;
            ct = static_cast<std::int64_t>(t);
        }
        bool all = true;
        for (const auto& pr : r.preconditions) all = all && pr.second;
        table.add_row({r.kind, cell(n), cl, ce, ct, ce0, cell(r.k_star), cell(r.ell_star), r.tilde_lambda, r.D,
                       cell(r.D1), cell(r.N), r.bias_head, r.bias_tail, r.variance_term, cell(r.eff_bias),
                       cell(r.eff_var), r.upper_total, cell(r.lower_total), cell(all), preconditions_string(r)});
        docs.push_back(bound_report_to_json(r));
    }
    table.write(cx.out / "result.csv");
    std::ofstream(cx.out / "bounds.json") << docs.dump(2) << "\n";
}

void cmd_simulate(Context& cx) {
    const Params p(cx.cfg.params);
    const ProblemInstance& prob = *cx.problem;
    const Algorithm alg = algorithm_from_string(p.str("algorithm"));
    const std::size_t n = p.integer("n", 1);
    const double trace = prob.spectrum.trace();
    EstimatorConfig ec;
    CsvCell cl = std::monostate{}, ce = std::monostate{}, ct = std::monostate{}, ce0 = std::monostate{};
    if (alg == Algorithm::ridge) {
        ec = RidgeConfig{p.num("lambda")};
        cl = p.num("lambda");
    } else if (alg == Algorithm::gd) {
        const double eta = p.num("eta", 1.0 / (2.0 * trace));
        const auto t = static_cast<std::int64_t>(p.integer("t", 0));
        ec = GdConfig{eta, t};
        ce = eta;
        ct = t;
    } else if (alg == Algorithm::sgd) {
        const double eta0 = p.num("eta0", 1.0 / (4.0 * trace));
        if (eta0 > 1.0 / (4.0 * trace) * (1 + 1e-12)) cx.warn("SGD stepsize exceeds 1/(4 tr Σ)");
        ec = SgdConfig{eta0};
        ce0 = eta0;
    } else {
        throw ValidationError("simulate needs algorithm ridge, gd or sgd");
    }
    validate(ec);
    const std::string method = p.str("method", "auto");
    if (method != "auto" && method != "exact" && method != "mc")
        throw ValidationError("params.method must be auto, exact or mc");
    if (alg == Algorithm::sgd && method == "exact" && prob.design != Design::gaussian)
        throw ValidationError("the exact SGD recursion needs a gaussian design");
    if (alg != Algorithm::sgd && method == "exact")
        throw ValidationError("method exact is only available for SGD; ridge/GD integrate noise exactly per draw");
    if (cx.cfg.trials < 2 && !(alg == Algorithm::sgd && method != "mc" && prob.design == Design::gaussian))
        throw ValidationError("simulate needs trials ≥ 2");
    if (cx.dry_run) return;

    RiskEstimate r;
    if (alg == Algorithm::sgd && method != "mc" && prob.design == Design::gaussian)
        r = sgd_exact_risk_gaussian(prob, n, std::get<SgdConfig>(ec).eta0);
    else
        r = monte_carlo_risk(prob, ec, n, cx.cfg.trials, cx.cfg.seed, cx.cfg.threads);
    CsvTable table({"algorithm", "n", "lambda", "eta", "t", "eta0", "trials", "mean", "stderr", "method", "bias",
                    "variance"});
    table.add_row({to_string(alg), cell(n), cl, ce, ct, ce0, static_cast<std::int64_t>(r.trials), r.mean,
                   r.std_error, to_string(r.method), cell(r.bias), cell(r.variance)});
    table.write(cx.out / "result.csv");
}

void cmd_sweep(Context& cx) {
    const Params p(cx.cfg.params);
    const ProblemInstance& prob = *cx.problem;
    const Algorithm alg = algorithm_from_string(p.str("algorithm"));
    if (alg == Algorithm::minimax) throw ValidationError("sweep needs algorithm ridge, gd or sgd");
    const std::size_t n = p.integer("n", 1);
    const auto grid = grid_from(p);
    ExperimentOptions opt;
    opt.threads = cx.cfg.threads;
    if (p.has("eta")) opt.gd_eta = p.num("eta");
    if (opt.gd_eta && !(*opt.gd_eta > 0.0)) throw ValidationError("params.eta must be positive");
    for (double g : grid)
        if (!(g >= 0.0)) throw ValidationError("sweep grid values must be ≥ 0");
    if (alg == Algorithm::sgd) {
        const double cap = 1.0 / (4.0 * prob.spectrum.trace());
        for (double g : grid)
            if (g > cap * (1 + 1e-12)) {
                cx.warn("some SGD stepsizes exceed 1/(4 tr Σ)");
                break;
            }
    }
    if (cx.dry_run) return;

    const SweepResult s = tune_and_measure(prob, alg, n, grid, cx.cfg.trials, cx.cfg.seed, opt);
    CsvTable table({"index", "value", "mean", "stderr", "trials", "method", "bias", "variance", "reliable", "best"});
    std::vector<double> x, y, e;
    for (std::size_t g = 0; g < s.grid.size(); ++g) {
        const auto& r = s.risks[g];
        table.add_row({cell(g), s.grid[g], r.mean, r.std_error, static_cast<std::int64_t>(r.trials),
                       to_string(r.method), cell(r.bias), cell(r.variance), cell(static_cast<bool>(s.reliable[g])),
                       cell(g == s.best_index)});
        x.push_back(s.grid[g]);
        y.push_back(r.mean);
        e.push_back(r.std_error);
    }
    table.write(cx.out / "result.csv");
    write_plot(cx.out, "sweep_" + to_string(alg), x, y, e);
    if (!s.interior) cx.warn("the tuned optimum lies on the grid edge or next to unresolved points");
}

void cmd_rates(Context& cx) {
    const Params p(cx.cfg.params);
    const double a = p.num("a");
    const auto r_list = p.list("r_list");
    std::vector<Algorithm> algs;
    for (const auto& s : p.strings("algorithms")) {
        algs.push_back(algorithm_from_string(s));
        if (algs.back() == Algorithm::minimax) throw ValidationError("rates: minimax is not a runnable algorithm");
    }
    const auto n_grid = p.counts("n_grid");
    RateOptions opt;
    opt.threads = cx.cfg.threads;
    opt.d = p.integer("d", 0, 0);
    opt.sigma2 = p.num("sigma2", 1.0);
    opt.delta = p.num("delta", 0.1);
    opt.core_points = p.integer("core_points", opt.core_points, 3);
    opt.extension_decades = p.integer("extension_decades", opt.extension_decades, 0);
    if (!(a > 1.0)) throw ValidationError("params.a must exceed 1");
    for (double r : r_list)
        if (!(r >= 0.0)) throw ValidationError("params.r_list entries must be ≥ 0");
    if (n_grid.size() < 3) throw ValidationError("params.n_grid needs at least 3 sample sizes");
    if (!(opt.sigma2 >= 0.0)) throw ValidationError("params.sigma2 must be ≥ 0");
    if (cx.dry_run) return;

    const auto rows = rate_table(a, r_list, algs, n_grid, cx.cfg.trials, cx.cfg.seed, opt);
    CsvTable table({"algorithm", "a", "r", "fitted_slope", "slope_stderr", "intercept", "theory", "valid"});
    CsvTable points({"algorithm", "a", "r", "n", "risk", "stderr", "best_hyper", "center", "interior"});
    for (const auto& row : rows) {
        table.add_row({to_string(row.algorithm), row.a, row.r, row.fit.slope, row.fit.slope_stderr, row.fit.intercept,
                       row.theory, cell(row.valid)});
        std::vector<double> x, y, e;
        for (const auto& pt : row.points) {
            points.add_row({to_string(row.algorithm), row.a, row.r, cell(pt.n), pt.risk, pt.std_error, pt.best_hyper,
                            pt.center, cell(pt.interior)});
            x.push_back(static_cast<double>(pt.n));
            y.push_back(pt.risk);
            e.push_back(pt.std_error);
        }
        write_plot(cx.out, "rates_" + to_string(row.algorithm) + "_a" + tag(row.a) + "_r" + tag(row.r), x, y, e);
        if (!row.valid) cx.warn("rate fit for " + to_string(row.algorithm) + " r=" + format_number(row.r) +
                                " is flagged invalid (edge optimum)");
    }
    table.write(cx.out / "result.csv");
    points.write(cx.out / "rate_points.csv");
}

void cmd_compare(Context& cx) {
    const Params p(cx.cfg.params);
    const ProblemInstance& prob = *cx.problem;
    const std::string against = p.str("against");
    const std::size_t n = p.integer("n", 2);
    ExperimentOptions opt;
    opt.threads = cx.cfg.threads;
    opt.constants = constants_from_json(p.has("constants") ? p.raw("constants") : json());
    const double trace = prob.spectrum.trace();
    if (against == "ridge") {
        const auto grid = p.list("lambda_grid");
        const double eta = p.num("eta", 1.0 / (2.0 * trace));
        for (double l : grid)
            if (!(l >= 0.0) || std::isinf(l)) throw ValidationError("params.lambda_grid must hold finite values ≥ 0");
        if (!(eta > 0.0)) throw ValidationError("params.eta must be positive");
        if (cx.dry_run) return;
        const auto rows = dominance_gd_vs_ridge(prob, n, grid, eta, cx.cfg.trials, cx.cfg.seed, opt);
        CsvTable table({"lambda", "t", "zero_fallback", "ridge_mean", "gd_mean", "ratio_mean", "ratio_max",
                        "exact_refits"});
        std::vector<double> x, y, e;
        for (const auto& r : rows) {
            table.add_row({r.lambda, r.t, cell(r.zero_fallback), r.ridge_mean, r.gd_mean, r.ratio_mean, r.ratio_max,
                           cell(r.unreliable_draws)});
            x.push_back(r.lambda);
            y.push_back(r.ratio_mean);
            e.push_back(0.0);
        }
        table.write(cx.out / "result.csv");
        write_plot(cx.out, "compare_ridge", x, y, e);
    } else if (against == "sgd") {
        const auto grid = p.list("eta_grid");
        const double cap = 1.0 / (4.0 * trace);
        for (double v : grid)
            if (!(v > 0.0) || v > cap * (1 + 1e-12))
                throw ValidationError("params.eta_grid values must lie in (0, 1/(4 tr Σ)]");
        if (p.has("eta")) opt.gd_eta = p.num("eta");
        if (cx.dry_run) return;
        const auto rows = dominance_gd_vs_sgd(prob, n, grid, cx.cfg.trials, cx.cfg.seed, opt);
        CsvTable table({"eta", "sgd_risk", "gd_eta", "gd_t", "gd_mean", "gd_stderr", "ratio"});
        std::vector<double> x, y, e;
        for (const auto& r : rows) {
            table.add_row({r.eta, r.sgd_risk, r.gd_eta, static_cast<std::int64_t>(r.gd_t), r.gd_mean, r.gd_stderr,
                           r.ratio});
            x.push_back(r.eta);
            y.push_back(r.ratio);
            e.push_back(r.sgd_risk > 0 ? r.gd_stderr / r.sgd_risk : 0.0);
        }
        table.write(cx.out / "result.csv");
        write_plot(cx.out, "compare_sgd", x, y, e);
    } else {
        throw ValidationError("params.against must be ridge or sgd");
    }
}

void cmd_separation(Context& cx) {
    const Params p(cx.cfg.params);
    const auto n_grid = p.has("n_grid") ? p.counts("n_grid") : std::vector<std::size_t>{64, 128, 256};
    const double sigma2 = p.num("sigma2", 0.25);
    const double budget = p.num("memory_budget", default_memory_budget);
    if (!(sigma2 >= 0.0 && sigma2 <= 1.0)) throw ValidationError("params.sigma2 must lie in [0, 1]");
    for (std::size_t n : n_grid) {
        if (n < 16) throw ValidationError("params.n_grid entries must be ≥ 16");
        check_memory_budget(n, n * n, budget);
    }
    if (cx.dry_run) return;
    ExperimentOptions opt;
    opt.threads = cx.cfg.threads;
    const auto rows = hard_instance_separation(n_grid, sigma2, cx.cfg.trials, cx.cfg.seed, opt, budget);
    CsvTable table({"n", "d", "gd_best_risk", "gd_stderr", "gd_best_t", "gd_interior", "sgd_risk", "ratio",
                    "gd_normalized", "sgd_normalized", "ell_star"});
    std::vector<double> x, g, ge, s, z;
    for (const auto& r : rows) {
        table.add_row({cell(r.n), cell(r.d), r.gd_best_risk, r.gd_stderr, r.gd_best_t, cell(r.gd_interior), r.sgd_risk,
                       r.ratio, r.gd_normalized, r.sgd_normalized, cell(r.ell_star)});
        x.push_back(static_cast<double>(r.n));
        g.push_back(r.gd_best_risk);
        ge.push_back(r.gd_stderr);
        s.push_back(r.sgd_risk);
        z.push_back(0.0);
    }
    table.write(cx.out / "result.csv");
    write_plot(cx.out, "separation_gd", x, g, ge);
    write_plot(cx.out, "separation_sgd", x, s, z);
}

void dispatch(Context& cx) {
    const auto& cmd = cx.cfg.command;
    if (needs_problem(cmd)) {
        if (cx.cfg.problem.is_null()) throw ValidationError("command '" + cmd + "' needs a 'problem'");
        cx.problem = problem_from_json(cx.cfg.problem);
    }
    if (cmd == "bounds") cmd_bounds(cx);
    else if (cmd == "simulate") cmd_simulate(cx);
    else if (cmd == "sweep") cmd_sweep(cx);
    else if (cmd == "rates") cmd_rates(cx);
    else if (cmd == "compare") cmd_compare(cx);
    else if (cmd == "separation") cmd_separation(cx);
    else throw ValidationError("unknown command '" + cmd + "'");
}

json run_json(const RunConfig& c) {
    return {{"command", c.command},   {"problem", c.problem}, {"params", c.params},
            {"output_dir", c.output_dir}, {"seed", c.seed},   {"seed_defaulted", c.seed_defaulted},
            {"trials", c.trials},     {"threads", resolve_threads(c.threads)},
            {"version", IMPLREG_VERSION}};
}

bool is_nonnegative_integer(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

}  // namespace

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> cmds{"bounds", "simulate", "sweep", "rates", "compare", "separation"};
    return cmds;
}

RunConfig parse_run_config(const json& doc, const std::string& command, const CliOverrides& ov) {
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    static const std::vector<std::string> keys{"command", "problem", "params", "output_dir", "seed", "trials", "threads"};
    for (const auto& [k, v] : doc.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw ValidationError("unknown config field '" + k + "'");
    RunConfig c;
    std::string from_doc;
    if (doc.contains("command")) {
        if (!doc.at("command").is_string()) throw ValidationError("field 'command' must be a string");
        from_doc = doc.at("command").get<std::string>();
    }
    c.command = command.empty() ? from_doc : command;
    if (!from_doc.empty() && from_doc != c.command)
        throw ValidationError("config command '" + from_doc + "' does not match requested command '" + c.command + "'");
    const auto& cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end())
        throw ValidationError("unknown command '" + c.command + "'");
    if (doc.contains("problem")) c.problem = doc.at("problem");
    if (doc.contains("params")) {
        if (!doc.at("params").is_object()) throw ValidationError("field 'params' must be an object");
        c.params = doc.at("params");
    }
    if (doc.contains("output_dir")) {
        if (!doc.at("output_dir").is_string()) throw ValidationError("field 'output_dir' must be a string");
        c.output_dir = doc.at("output_dir").get<std::string>();
    }
    if (doc.contains("seed")) {
        if (!is_nonnegative_integer(doc.at("seed"))) throw ValidationError("field 'seed' must be an unsigned integer");
        c.seed = doc.at("seed").get<std::uint64_t>();
        c.seed_defaulted = false;
    }
    if (doc.contains("trials")) {
        if (!is_nonnegative_integer(doc.at("trials")) || doc.at("trials").get<std::uint64_t>() < 1)
            throw ValidationError("field 'trials' must be a positive integer");
        c.trials = doc.at("trials").get<std::size_t>();
    }
    if (doc.contains("threads")) {
        if (!is_nonnegative_integer(doc.at("threads"))) throw ValidationError("field 'threads' must be an unsigned integer");
        c.threads = doc.at("threads").get<std::size_t>();
    }
    if (ov.output_dir) c.output_dir = *ov.output_dir;
    if (ov.seed) {
        c.seed = *ov.seed;
        c.seed_defaulted = false;
    }
    if (ov.trials) {
        if (*ov.trials < 1) throw ValidationError("--trials must be positive");
        c.trials = *ov.trials;
    }
    if (ov.threads) c.threads = *ov.threads;
    return c;
}

namespace {

json read_json_file(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file " + path.string());
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
}

}  // namespace

RunConfig load_run_config(const fs::path& path, const std::string& command, const CliOverrides& overrides) {
    return parse_run_config(read_json_file(path), command, overrides);
}

std::vector<Diagnostic> validate_config(const json& doc, const std::string& command) {
    std::vector<Diagnostic> diags;
    try {
        const RunConfig cfg = parse_run_config(doc, command);
        Context cx{cfg, true, diags, {}, std::nullopt};
        dispatch(cx);
    } catch (const std::invalid_argument& e) {
        diags.push_back({Diagnostic::Level::error, e.what()});
    } catch (const GuardError& e) {
        diags.push_back({Diagnostic::Level::error, e.what()});
    } catch (const json::exception& e) {
        diags.push_back({Diagnostic::Level::error, e.what()});
    }
    return diags;
}

std::vector<Diagnostic> validate_config(const fs::path& path, const std::string& command) {
    json doc;
    try {
        doc = read_json_file(path);
    } catch (const std::invalid_argument& e) {
        return {{Diagnostic::Level::error, e.what()}};
    }
    return validate_config(doc, command);
}

int run_config(const RunConfig& config, std::ostream& err) {
    std::vector<Diagnostic> diags;
    try {
        Context cx{config, false, diags, fs::path(config.output_dir), std::nullopt};
        fs::create_directories(cx.out);
        dispatch(cx);
        std::ofstream(cx.out / "run.json") << run_json(config).dump(2) << "\n";
        for (const auto& d : diags) err << "warning: " << d.message << "\n";
        return 0;
    } catch (const GuardError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

int cli_main(int argc, char** argv) {
    CLI::App app{"Ridge, early-stopped GD and scheduled SGD on linear regression: bounds, exact risks, experiments"};
    app.require_subcommand(1);
    std::string config_path;
    CliOverrides ov;
    std::string out;
    std::uint64_t seed = 0;
    std::size_t trials = 0, threads = 0;
    std::vector<CLI::App*> subs;
    for (const auto& name : known_commands()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " command");
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out, "output directory (overrides output_dir)");
        sub->add_option("--seed", seed, "64-bit seed (overrides seed)");
        sub->add_option("--trials", trials, "Monte Carlo trials / design draws")->check(CLI::PositiveNumber);
        sub->add_option("--threads", threads, "worker threads (default: IMPLREG_THREADS or 1)");
        subs.push_back(sub);
    }
    CLI::App* val = app.add_subcommand("validate", "check a configuration without running it");
    val->add_option("--config", config_path, "JSON run configuration")->required();
    std::string validate_command;
    val->add_option("--command", validate_command, "command to validate against (default: the config's 'command')");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (val->parsed()) {
        try {
            const auto diags = validate_config(fs::path(config_path), validate_command);
            bool bad = false;
            for (const auto& d : diags) {
                const bool e = d.level == Diagnostic::Level::error;
                bad = bad || e;
                std::cerr << (e ? "error: " : "warning: ") << d.message << "\n";
            }
            return bad ? 2 : 0;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    for (CLI::App* sub : subs) {
        if (!sub->parsed()) continue;
        if (sub->count("--out")) ov.output_dir = out;
        if (sub->count("--seed")) ov.seed = seed;
        if (sub->count("--trials")) ov.trials = trials;
        if (sub->count("--threads")) ov.threads = threads;
        RunConfig cfg;
        try {
            cfg = load_run_config(fs::path(config_path), sub->get_name(), ov);
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        return run_config(cfg, std::cerr);
    }
    return 2;
}

}  // namespace implreg
