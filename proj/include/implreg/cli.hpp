#pragma once

#include "implreg/io.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace implreg {

inline constexpr std::uint64_t default_seed = 20240917ULL;

struct RunConfig {
    std::string command;
    json problem;  // null when the command builds its own instances
    json params = json::object();
    std::string output_dir = "results";
    std::uint64_t seed = default_seed;
    bool seed_defaulted = true;
    std::size_t trials = 20;
    std::size_t threads = 0;
};

struct Diagnostic {
    enum class Level { error, warning };
    Level level = Level::error;
    std::string message;
};

struct CliOverrides {
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> threads;
};

const std::vector<std::string>& known_commands();

// Schema checks only; throws ValidationError.
RunConfig parse_run_config(const json& doc, const std::string& command, const CliOverrides& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const std::string& command,
                          const CliOverrides& overrides = {});

// Schema plus semantic checks without running anything. Throws if unreadable.
std::vector<Diagnostic> validate_config(const std::filesystem::path& path, const std::string& command = "");
std::vector<Diagnostic> validate_config(const json& doc, const std::string& command = "");

// Executes the command and writes result.csv, run.json and plotdata_*.csv.
// Returns 0, 2 (validation) or 3 (runtime guard); messages go to `err`.
int run_config(const RunConfig& config, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace implreg
