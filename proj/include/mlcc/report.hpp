#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlcc/bench.hpp"
#include "mlcc/experiment.hpp"
#include "mlcc/stats.hpp"

namespace mlcc::cli {

class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Final errors indexed by algorithm and problem, runs ordered by seed.
class ResultTable {
public:
    explicit ResultTable(const std::vector<ResultRow>& rows);

    const std::vector<std::string>& algorithms() const noexcept { return algorithms_; }
    const std::vector<std::string>& problems() const noexcept { return problems_; }
    const std::vector<double>& errors(const std::string& algorithm,
                                      const std::string& problem) const;
    std::size_t runs() const;
    bool has(const std::string& algorithm) const;

    /// Every algorithm must cover every problem with the same seeds; with
    /// `for_statistics`, at least two runs are required.
    void check_coverage(bool for_statistics = true) const;

private:
    struct Cell {
        std::vector<std::uint64_t> seeds;
        std::vector<double> errors;
    };
    std::vector<std::string> algorithms_;
    std::vector<std::string> problems_;
    std::map<std::pair<std::string, std::string>, Cell> cells_;
};

struct PairwiseComparison {
    std::string considered;
    std::string compared;
    /// Per problem, in table order.
    std::vector<stats::Sign> signs;
    stats::SignSummary summary;
    /// Absent when every per-function mean difference is zero.
    std::optional<stats::WilcoxonResult> multi;
};

PairwiseComparison compare_pair(const ResultTable& table, const std::string& considered,
                                const std::string& compared, double alpha);

/// Friedman mean rank per algorithm over per-function mean errors.
std::map<std::string, double> friedman_ranks(const ResultTable& table);

/// Per-function mean/std (best marked), the -/=/+ row and P-N of each
/// algorithm against `considered`, multi-problem Wilcoxon and Friedman ranks.
nlohmann::json compare_report(const ResultTable& table, const std::string& considered,
                              double alpha);
std::string render_compare_text(const nlohmann::json& report);
std::string render_compare_csv(const nlohmann::json& report);

struct MotivateEntry {
    std::string algorithm;
    std::string problem;
    std::string category;
    std::uint64_t median_seed = 0;
    double median_error = 0.0;
    std::optional<double> ar;
    std::size_t nbs_events = 0;
    std::vector<std::uint64_t> frequency;
};

struct MotivateReport {
    std::size_t population_size = 0;
    double ar_expected = 0.0;
    std::vector<MotivateEntry> entries;
};

/// Rank-archive statistics of each (algorithm, problem)'s median-final-error
/// run (lower median for even run counts, ties by seed).
MotivateReport motivate_report(const std::vector<RunOutput>& outputs,
                               const std::vector<bench::BenchProblem>& problems,
                               std::size_t population_size);
std::string motivate_ar_csv(const MotivateReport& report);
std::string motivate_frequency_csv(const MotivateReport& report);
nlohmann::json motivate_json(const MotivateReport& report);

/// Each setting compared against `baseline` (the considered algorithm).
nlohmann::json sweep_report(const ResultTable& table, const std::string& baseline,
                            const std::vector<std::string>& settings, double alpha);
std::string render_rows_text(const nlohmann::json& report);

/// Variants against the full framework, then every framework algorithm
/// against every baseline with per-pair and total P-N.
nlohmann::json ablate_report(const ResultTable& table, const std::string& full,
                             const std::vector<std::string>& variants,
                             const std::vector<std::string>& baselines, double alpha);

}  // namespace mlcc::cli
