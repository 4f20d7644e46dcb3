#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlcc/bench.hpp"
#include "mlcc/config.hpp"
#include "mlcc/experiment.hpp"
#include "mlcc/report.hpp"

namespace fs = std::filesystem;
using namespace mlcc;
using namespace mlcc::cli;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> workers;
    std::string out;
    std::string format = "text";
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ExperimentConfig load(const GlobalOptions& g) {
    ExperimentConfig c = g.config_path.empty() ? ExperimentConfig{}
                                               : load_experiment_config(g.config_path);
    if (g.seed) c.base_seed = *g.seed;
    if (g.runs) c.runs = *g.runs;
    if (g.workers) c.workers = *g.workers;
    if (!g.out.empty()) {
        c.out_dir = g.out;
    } else if (const char* env = std::getenv("MLCC_OUT_DIR"); env && *env) {
        c.out_dir = env;
    }
    c.validate();
    return c;
}

void require_statistics(const ExperimentConfig& c) {
    if (c.runs < 2) {
        throw UsageError("statistics need at least 2 runs per problem (runs = " +
                         std::to_string(c.runs) + ")");
    }
}

std::vector<RunOutput> execute(const ExperimentConfig& c, const std::vector<std::string>& algs,
                               const std::vector<bench::BenchProblem>& problems) {
    std::cerr << "running " << algs.size() << " algorithm(s) x " << problems.size()
              << " problem(s) x " << c.runs << " run(s), D=" << c.dimension
              << ", budget=" << c.budget() << "\n";
    auto outputs = run_experiment(c, algs, problems, c.workers);
    for (const auto& p : write_run_outputs(c.out_dir, algs, outputs)) {
        std::cerr << "wrote " << p.string() << "\n";
    }
    return outputs;
}

std::vector<ResultRow> rows_of(const std::vector<RunOutput>& outputs) {
    std::vector<ResultRow> rows;
    rows.reserve(outputs.size());
    for (const auto& o : outputs) rows.push_back(o.row);
    return rows;
}

void emit(const fs::path& out_dir, const std::string& stem, const nlohmann::json& report,
          const std::string& format) {
    const std::string json_text = report.dump(2) + "\n";
    write_file_atomic(out_dir / (stem + ".json"), json_text);
    std::cerr << "wrote " << (out_dir / (stem + ".json")).string() << "\n";
    if (format == "json") {
        std::cout << json_text;
    } else {
        std::cout << render_rows_text(report);
    }
}

int cmd_suite(const GlobalOptions& g) {
    const auto c = load(g);
    const auto problems = select_problems(c);
    if (g.format == "json") {
        std::cout << bench::suite_manifest(problems, c.suite_seed).dump(2) << "\n";
    } else if (g.format == "csv") {
        std::cout << "id,category,dimension,optimum,digest\n";
        for (const auto& p : problems) {
            std::cout << p.id << ',' << bench::to_string(p.category) << ',' << p.dimension << ','
                      << format_double(p.bias) << ',' << std::hex << std::setw(16) << std::setfill('0')
                      << p.digest() << std::dec << std::setfill(' ') << '\n';
        }
    } else {
        std::cout << "suite D=" << c.dimension << " seed=" << c.suite_seed << "\n";
        for (const auto& p : problems) {
            std::cout << "  " << p.id << "  [" << bench::to_string(p.category) << "]  f*="
                      << format_double(p.bias) << "\n";
        }
    }
    return 0;
}

int cmd_run(const GlobalOptions& g, const std::vector<std::string>& algorithms) {
    const auto c = load(g);
    const auto algs = algorithms.empty() ? c.algorithms : algorithms;
    for (const auto& a : algs) resolve_algorithm(a, c);
    const auto outputs = execute(c, algs, select_problems(c));
    if (g.format == "csv") std::cout << format_csv(rows_of(outputs));
    return 0;
}

int cmd_compare(const GlobalOptions& g, const std::vector<std::string>& inputs,
                const std::string& considered_opt, std::optional<double> alpha_opt,
                const std::string& report_path) {
    double alpha = 0.05;
    if (!g.config_path.empty()) alpha = load(g).alpha;
    if (alpha_opt) alpha = *alpha_opt;
    std::vector<ResultRow> rows;
    for (const auto& in : inputs) {
        auto part = read_csv(in);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    const ResultTable table(rows);
    if (table.runs() < 2) {
        throw UsageError("statistics need at least 2 runs per problem (found " +
                         std::to_string(table.runs()) + ")");
    }
    const std::string considered =
        considered_opt.empty() ? table.algorithms().front() : considered_opt;
    const auto report = compare_report(table, considered, alpha);
    std::string text;
    if (g.format == "json") {
        text = report.dump(2) + "\n";
    } else if (g.format == "csv") {
        text = render_compare_csv(report);
    } else {
        text = render_compare_text(report);
    }
    if (report_path.empty()) {
        std::cout << text;
    } else {
        write_file_atomic(report_path, text);
        std::cerr << "wrote " << report_path << "\n";
    }
    return 0;
}

int cmd_motivate(const GlobalOptions& g) {
    auto c = load(g);
    c.fixed_de.f = c.motivate_f;
    c.fixed_de.cr = c.motivate_cr;
    c.np = c.motivate_population();
    if (c.motivate_runs && !g.runs) c.runs = c.motivate_runs;
    c.validate();
    const std::vector<std::string> algs{"de-rand1", "de-best1"};
    const auto problems = select_problems(c);
    const auto outputs = execute(c, algs, problems);
    const auto report = motivate_report(outputs, problems, c.population_size());

    const fs::path out(c.out_dir);
    const auto ar_csv = motivate_ar_csv(report);
    write_file_atomic(out / "motivate_ar.csv", ar_csv);
    write_file_atomic(out / "motivate_frequency.csv", motivate_frequency_csv(report));
    const auto json = motivate_json(report);
    write_file_atomic(out / "motivate.json", json.dump(2) + "\n");
    std::cerr << "wrote " << (out / "motivate_ar.csv").string() << ", motivate_frequency.csv, "
              << "motivate.json\n";

    if (g.format == "json") {
        std::cout << json.dump(2) << "\n";
    } else if (g.format == "csv") {
        std::cout << ar_csv;
    } else {
        std::cout << "AR^exp = " << format_double(report.ar_expected) << " (NP = "
                  << report.population_size << ")\n";
        for (const auto& e : report.entries) {
            std::cout << "  " << e.algorithm << "  " << e.problem << "  AR = "
                      << (e.ar ? format_double(*e.ar) : std::string("n/a")) << "  ("
                      << e.nbs_events << " NBS events, median seed " << e.median_seed << ")\n";
        }
    }
    return 0;
}

int cmd_sweep(const GlobalOptions& g, std::vector<std::string> settings) {
    const auto c = load(g);
    require_statistics(c);
    if (settings.empty()) settings = c.sweep_settings;
    if (settings.empty()) throw UsageError("no sweep settings");
    std::vector<std::string> algs;
    for (const auto& s : settings) algs.push_back("mlcc:" + s);
    for (const auto& a : algs) resolve_algorithm(a, c);
    const auto outputs = execute(c, algs, select_problems(c));
    const ResultTable table(rows_of(outputs));
    emit(c.out_dir, "sweep", sweep_report(table, algs.front(), algs, c.alpha), g.format);
    return 0;
}

int cmd_ablate(const GlobalOptions& g) {
    const auto c = load(g);
    require_statistics(c);
    const std::vector<std::string> variants{"variant-i", "variant-ii", "variant-iii", "variant-iv"};
    std::vector<std::string> baselines;
    for (const auto& l : c.layers) baselines.push_back(l + "-only");
    std::vector<std::string> algs{"mlcc"};
    algs.insert(algs.end(), variants.begin(), variants.end());
    algs.insert(algs.end(), baselines.begin(), baselines.end());
    const auto outputs = execute(c, algs, select_problems(c));
    const ResultTable table(rows_of(outputs));
    emit(c.out_dir, "ablate", ablate_report(table, "mlcc", variants, baselines, c.alpha),
         g.format);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-layer competitive-cooperative DE experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--config", g.config_path, "Experiment configuration file")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Base seed (run k uses seed + k)");
    app.add_option("--runs", g.runs, "Runs per (algorithm, problem)")->check(CLI::PositiveNumber);
    app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory (default: $MLCC_OUT_DIR, then the config)");
    app.add_option("--format", g.format, "Report format")
        ->check(CLI::IsMember({"json", "text", "csv"}));

    auto* suite = app.add_subcommand("suite", "Describe the benchmark suite");

    auto* run = app.add_subcommand("run", "Run algorithms and write result CSVs and traces");
    std::vector<std::string> run_algs;
    run->add_option("-a,--algorithm", run_algs, "Algorithm names (default: from the config)");

    auto* compare = app.add_subcommand("compare", "Statistical comparison of result CSVs");
    std::vector<std::string> inputs;
    std::string considered;
    std::optional<double> alpha;
    std::string report_path;
    compare->add_option("inputs", inputs, "Result CSV files")->required()->check(CLI::ExistingFile);
    compare->add_option("--considered", considered, "Reference algorithm (default: first seen)");
    compare->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    compare->add_option("--report", report_path, "Write the report to this file");

    auto* motivate = app.add_subcommand("motivate", "Rank-archive experiment with classic DE");

    auto* sweep = app.add_subcommand("sweep-n", "Sensitivity of the framework to N and top_G");
    std::vector<std::string> settings;
    sweep->add_option("--setting", settings,
                      "Setting such as n=0.1 or topg=np; the first is the baseline");

    auto* ablate = app.add_subcommand("ablate", "Variants I-IV against the full framework");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*suite) return cmd_suite(g);
        if (*run) return cmd_run(g, run_algs);
        if (*compare) return cmd_compare(g, inputs, considered, alpha, report_path);
        if (*motivate) return cmd_motivate(g);
        if (*sweep) return cmd_sweep(g, settings);
        if (*ablate) return cmd_ablate(g);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
