#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mlcc/bench.hpp"
#include "mlcc/config.hpp"
#include "mlcc/framework.hpp"

namespace mlcc::cli {

/// First line of every results CSV.
inline constexpr std::string_view kCsvSchema = "# mlcc-results v1";
inline constexpr std::string_view kCsvHeader = "algorithm,problem,seed,final_error,evaluations";

/// A named algorithm resolved against a configuration.
///
/// Names are `base[:option=value,...]` with bases `mlcc`, `variant-i` ..
/// `variant-iv`, `shade-only`, `bide-only`, `fixed-de`, `de-rand1`,
/// `de-best1` and options `n`, `topg` (integer or `np`), `sync` (0/1) and
/// `layers` (`+`-joined layer names) for the framework bases.
struct AlgorithmSpec {
    std::string name;
    bool framework = false;
    MlccConfig mlcc;
    LayerSpec single;
    std::size_t population_size = 0;
};

LayerSpec resolve_layer(std::string_view name, const ExperimentConfig& config);
AlgorithmSpec resolve_algorithm(std::string_view name, const ExperimentConfig& config);

struct ResultRow {
    std::string algorithm;
    std::string problem;
    std::uint64_t seed = 0;
    double final_error = 0.0;
    std::uint64_t evaluations = 0;
};

struct RunOutput {
    ResultRow row;
    RunRecord record;
};

/// Problems named in the config (all of them when the list is empty).
std::vector<bench::BenchProblem> select_problems(const ExperimentConfig& config);

/// Runs every (algorithm, problem, run) with seed = base_seed + run. Results
/// come back in algorithm, problem, run order regardless of `workers`.
std::vector<RunOutput> run_experiment(const ExperimentConfig& config,
                                      const std::vector<std::string>& algorithms,
                                      const std::vector<bench::BenchProblem>& problems,
                                      std::size_t workers = 1);

RunRecord run_single(const AlgorithmSpec& spec, const Problem& problem, std::uint64_t budget,
                     std::uint64_t seed);

std::string format_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(std::string_view text, const std::string& origin);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

nlohmann::json run_record_json(const std::string& algorithm, const RunRecord& record);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Filesystem-safe form of an algorithm name.
std::string file_stem(std::string_view algorithm);

/// Shortest round-trip representation of a double.
std::string format_double(double v);

/// Writes `<out>/<alg>.csv` per algorithm and `<out>/traces/<alg>/<problem>-s<seed>.json`
/// per run. Returns the CSV paths in algorithm order.
std::vector<std::filesystem::path> write_run_outputs(const std::filesystem::path& out,
                                                     const std::vector<std::string>& algorithms,
                                                     const std::vector<RunOutput>& outputs,
                                                     bool write_traces = true);

}  // namespace mlcc::cli
