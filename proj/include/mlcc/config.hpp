#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mlcc/layers.hpp"

namespace mlcc::cli {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& origin, std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A value in the configuration file: string, number, boolean or a flat array.
struct ConfigValue {
    using Scalar = std::variant<std::string, double, bool>;
    std::variant<std::string, double, bool, std::vector<Scalar>> value;
    std::size_t line = 0;
};

/// Parses the TOML subset used by experiment files: `[section]` headers,
/// `key = value` lines, `#` comments, strings, numbers, booleans and
/// single-line arrays. Keys are returned as "section.key".
std::map<std::string, ConfigValue> parse_config_text(std::string_view text,
                                                     const std::string& origin);

struct ExperimentConfig {
    // [suite]
    std::size_t dimension = 10;
    std::uint64_t suite_seed = 2024;
    /// Problem ids to run; empty means the whole suite.
    std::vector<std::string> problems;

    // [experiment]
    std::size_t runs = 25;
    std::uint64_t budget_multiplier = 10000;
    std::uint64_t base_seed = 1;
    std::string out_dir = "results";
    std::size_t workers = 1;
    double alpha = 0.05;
    std::vector<std::string> algorithms{"mlcc", "shade-only", "bide-only"};

    // [population]
    /// 0 means 5 * D.
    std::size_t np = 0;

    ShadeParams shade;
    BideParams bide;
    FixedDeParams fixed_de;

    // [mlcc]
    std::vector<std::string> layers{"shade", "bide"};
    double n = 0.05;
    /// 0 means "draw top_G every generation".
    std::size_t top_g = 0;
    bool synchronous = false;
    std::size_t share_interval = 50;

    // [sweep]
    std::vector<std::string> sweep_settings{"n=0.05", "n=0.1",   "n=0.2",   "n=0.5",
                                            "n=1.0",  "topg=1", "topg=np"};

    // [motivate]
    double motivate_f = 0.7;
    double motivate_cr = 0.5;
    /// 0 means 5 * D.
    std::size_t motivate_np = 0;
    /// 0 means experiment.runs.
    std::size_t motivate_runs = 0;

    std::size_t population_size() const noexcept { return np ? np : 5 * dimension; }
    std::size_t motivate_population() const noexcept {
        return motivate_np ? motivate_np : 5 * dimension;
    }
    std::uint64_t budget() const noexcept { return budget_multiplier * dimension; }
    void validate() const;
};

ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::string& origin = "<config>");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace mlcc::cli
