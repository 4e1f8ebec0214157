#pragma once

#include "implreg/bounds.hpp"
#include "implreg/problem.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace implreg {

using json = nlohmann::json;

// Accepts either a canonical document
//   {"spectrum": {"kind", "params", "d"} | {"explicit": [...]}, "wstar": [...], "sigma2", "design"}
// or a generator shortcut such as {"generator": "power_law", "a": 2, "r": 1, "d": 1000, "sigma2": 1}.
ProblemInstance problem_from_json(const json& doc);
json problem_to_json(const ProblemInstance& problem, std::optional<std::uint64_t> seed = std::nullopt);

BoundConstants constants_from_json(const json& doc);
json constants_to_json(const BoundConstants& c);

// Flat key/value document; absent optionals are null.
json bound_report_to_json(const BoundReport& report);

// 17 significant digits, "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

using CsvCell = std::variant<double, std::int64_t, std::string, std::monostate>;

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<CsvCell> row);
    std::string str() const;
    void write(const std::filesystem::path& path) const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<CsvCell>> rows_;
};

inline CsvCell cell(std::size_t v) { return static_cast<std::int64_t>(v); }
inline CsvCell cell(bool v) { return static_cast<std::int64_t>(v ? 1 : 0); }
inline CsvCell cell(double v) { return v; }
inline CsvCell cell(const std::string& s) { return s; }
template <class T>
CsvCell cell(const std::optional<T>& v) {
    if (!v) return std::monostate{};
    return cell(*v);
}

}  // namespace implreg
