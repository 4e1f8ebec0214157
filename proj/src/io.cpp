#include "implreg/io.hpp"

#include "implreg/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace implreg {

namespace {

double number(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    if (!doc.at(key).is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
    return doc.at(key).get<double>();
}

double number_or(const json& doc, const char* key, double fallback) {
    return doc.contains(key) ? number(doc, key) : fallback;
}

std::size_t count(const json& doc, const char* key) {
    const double v = number(doc, key);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e15)
        throw ValidationError(std::string("field '") + key + "' must be a positive integer");
    return static_cast<std::size_t>(v);
}

std::vector<double> number_list(const json& v, const char* what) {
    if (!v.is_array()) throw ValidationError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) throw ValidationError(std::string(what) + " must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

Spectrum spectrum_from_kind(const std::string& kind, const json& params, std::size_t d) {
    if (kind == "power_law") return Spectrum::power_law(number(params, "a"), d);
    if (kind == "exponential") return Spectrum::exponential(number_or(params, "base", 2.0), d);
    if (kind == "polylog") return Spectrum::polylog(number_or(params, "power", 2.0), d);
    if (kind == "spike") {
        const double n = number(params, "n");
        std::vector<double> v(d, 1.0 / static_cast<double>(d));
        v[0] = std::pow(n, -0.9);
        return Spectrum(std::move(v));
    }
    throw ValidationError("unknown spectrum kind '" + kind + "'");
}

Design design_of(const json& doc) {
    if (!doc.contains("design")) return Design::gaussian;
    if (!doc.at("design").is_string()) throw ValidationError("field 'design' must be a string");
    return design_from_string(doc.at("design").get<std::string>());
}

}  // namespace

ProblemInstance problem_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("problem must be a JSON object");
    const double sigma2 = number_or(doc, "sigma2", 1.0);
    const Design design = design_of(doc);
    if (doc.contains("generator")) {
        if (!doc.at("generator").is_string()) throw ValidationError("field 'generator' must be a string");
        const std::string gen = doc.at("generator").get<std::string>();
        ProblemInstance p;
        if (gen == "power_law") {
            p = make_power_law_problem(number(doc, "a"), number_or(doc, "r", 0.0), count(doc, "d"), sigma2,
                                       number_or(doc, "delta", 0.1));
        } else if (gen == "spike") {
            const std::size_t n = count(doc, "n");
            const std::size_t d = doc.contains("d") ? count(doc, "d") : n * n;
            p = make_spike_problem(n, d, sigma2);
        } else {
            throw ValidationError("unknown generator '" + gen + "' (expected power_law or spike)");
        }
        p.design = design;
        p.validate();
        return p;
    }
    if (!doc.contains("spectrum")) throw ValidationError("problem needs either 'generator' or 'spectrum'");
    const json& sp = doc.at("spectrum");
    if (!sp.is_object()) throw ValidationError("field 'spectrum' must be an object");
    Spectrum spectrum;
    SpectrumOrigin origin;
    if (sp.contains("explicit")) {
        spectrum = Spectrum(number_list(sp.at("explicit"), "spectrum.explicit"));
    } else {
        if (!sp.contains("kind") || !sp.at("kind").is_string()) throw ValidationError("spectrum.kind must be a string");
        origin.kind = sp.at("kind").get<std::string>();
        const json params = sp.value("params", json::object());
        if (!params.is_object()) throw ValidationError("spectrum.params must be an object");
        spectrum = spectrum_from_kind(origin.kind, params, count(sp, "d"));
        for (const auto& [k, v] : params.items())
            if (v.is_number()) origin.params[k] = v.get<double>();
    }
    if (!doc.contains("wstar")) throw ValidationError("missing field 'wstar'");
    const auto w = number_list(doc.at("wstar"), "wstar");
    Eigen::VectorXd wstar = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    ProblemInstance p = make_custom_problem(std::move(spectrum), std::move(wstar), sigma2, design);
    p.origin = origin;
    return p;
}

json problem_to_json(const ProblemInstance& problem, std::optional<std::uint64_t> seed) {
    json doc;
    const auto& o = problem.origin;
    const bool known = o.kind == "power_law" || o.kind == "exponential" || o.kind == "polylog" || o.kind == "spike";
    if (known) {
        json params = json::object();
        for (const auto& [k, v] : o.params) params[k] = v;
        doc["spectrum"] = {{"kind", o.kind}, {"params", params}, {"d", problem.dim()}};
    } else {
        doc["spectrum"] = {{"explicit", std::vector<double>(problem.spectrum.values().begin(), problem.spectrum.values().end())}};
    }
    doc["wstar"] = std::vector<double>(problem.wstar.data(), problem.wstar.data() + problem.wstar.size());
    doc["sigma2"] = problem.sigma2;
    doc["design"] = to_string(problem.design);
    if (seed) doc["seed"] = *seed;
    return doc;
}

BoundConstants constants_from_json(const json& doc) {
    BoundConstants c;
    if (doc.is_null()) return c;
    if (!doc.is_object()) throw ValidationError("constants must be an object");
    c.c0 = number_or(doc, "c0", c.c0);
    c.c1 = number_or(doc, "c1", c.c1);
    c.c2 = number_or(doc, "c2", c.c2);
    c.c3 = number_or(doc, "c3", c.c3);
    c.sigma_lambda = number_or(doc, "sigma_lambda", c.sigma_lambda);
    c.b = number_or(doc, "b", c.b);
    c.validate();
    return c;
}

json constants_to_json(const BoundConstants& c) {
    return {{"c0", c.c0}, {"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}, {"sigma_lambda", c.sigma_lambda}, {"b", c.b}};
}

json bound_report_to_json(const BoundReport& r) {
    auto opt = [](const auto& v) -> json { return v ? json(*v) : json(nullptr); };
    auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(format_number(v)); };
    json doc = {{"kind", r.kind},
                {"k_star", r.k_star},
                {"ell_star", opt(r.ell_star)},
                {"tilde_lambda", num(r.tilde_lambda)},
                {"D", num(r.D)},
                {"D1", opt(r.D1)},
                {"N", opt(r.N)},
                {"bias_head", num(r.bias_head)},
                {"bias_tail", num(r.bias_tail)},
                {"variance_term", num(r.variance_term)},
                {"eff_bias", opt(r.eff_bias)},
                {"eff_var", opt(r.eff_var)},
                {"upper_total", num(r.upper_total)},
                {"lower_total", opt(r.lower_total)}};
    for (const auto& [name, ok] : r.preconditions) doc["pre_" + name] = ok;
    return doc;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<CsvCell> row) {
    if (row.size() != header_.size()) throw std::logic_error("CSV row width does not match the header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::ostringstream out;
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << quote(header_[i]);
    out << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) out << format_number(v);
                    else if constexpr (std::is_same_v<T, std::int64_t>) out << v;
                    else if constexpr (std::is_same_v<T, std::string>) out << quote(v);
                },
                row[i]);
        }
        out << "\n";
    }
    return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << str();
}

}  // namespace implreg
