#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mlcc/config.hpp"
#include "mlcc/experiment.hpp"
#include "mlcc/report.hpp"

using namespace mlcc;
using namespace mlcc::cli;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig c;
    c.dimension = 5;
    c.runs = 2;
    c.budget_multiplier = 100;
    c.np = 10;
    c.problems = {"f01-elliptic", "f05-rastrigin"};
    return c;
}

std::vector<ResultRow> rows_for(const std::string& alg, const std::vector<std::vector<double>>& e) {
    std::vector<ResultRow> rows;
    for (std::size_t p = 0; p < e.size(); ++p) {
        for (std::size_t r = 0; r < e[p].size(); ++r) {
            rows.push_back({alg, "p" + std::to_string(p), r + 1, e[p][r], 100});
        }
    }
    return rows;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parser reads sections, arrays and comments") {
    const auto c = parse_experiment_config(R"(# desk scale
[suite]
dimension = 30
problems = ["f01-elliptic", "f04-ackley"]   # two only

[experiment]
runs = 51
alpha = 0.01
algorithms = ["mlcc", "variant-iii"]

[mlcc]
n = 0.1
layers = ["shade", "bide", "fixed-de"]
synchronous = true

[bide]
f_modes = [0.5, 0.9]
)");
    CHECK(c.dimension == 30);
    CHECK(c.population_size() == 150);
    CHECK(c.budget() == 300000);
    CHECK(c.problems == std::vector<std::string>{"f01-elliptic", "f04-ackley"});
    CHECK(c.runs == 51);
    CHECK(c.alpha == 0.01);
    CHECK(c.algorithms == std::vector<std::string>{"mlcc", "variant-iii"});
    CHECK(c.n == 0.1);
    CHECK(c.layers.size() == 3);
    CHECK(c.synchronous);
    CHECK(c.bide.f_mode_low == 0.5);
    CHECK(c.bide.f_mode_high == 0.9);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config defaults carry the published parameter values") {
    const ExperimentConfig c;
    CHECK(c.shade.mf_init == 0.7);
    CHECK(c.shade.mcr_init == 0.5);
    CHECK(c.n == 0.05);
    CHECK(c.motivate_f == 0.7);
    CHECK(c.motivate_cr == 0.5);
    CHECK(c.population_size() == 50);
    CHECK(c.budget() == 100000);
    CHECK(c.runs == 25);
}

TEST_CASE("config errors report the offending line") {
    auto line_of = [](const std::string& text) {
        try {
            parse_experiment_config(text, "cfg.toml");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).starts_with("cfg.toml:"));
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("[suite]\ndimension = 10\nbogus = 1\n") == 3);
    CHECK(line_of("[suite]\n\ndimension = ten\n") == 3);
    CHECK(line_of("[experiment]\nruns = 2.5\n") == 2);
    CHECK(line_of("[suite\n") == 1);
    CHECK(line_of("[suite]\ndimension = 10\ndimension = 11\n") == 3);
    CHECK(line_of("[mlcc]\nlayers = [\"shade\",\n") == 2);
    CHECK(line_of("[experiment]\nout = \"unterminated\n") == 2);
}

TEST_CASE("config validation") {
    auto c = tiny_config();
    CHECK_NOTHROW(c.validate());
    c.layers = {"shade"};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = tiny_config();
    c.budget_multiplier = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("algorithm names resolve") {
    const ExperimentConfig c;
    const auto m = resolve_algorithm("mlcc", c);
    CHECK(m.framework);
    CHECK(m.mlcc.layer_count() == 2);
    CHECK(m.mlcc.ablation == Ablation::full);
    CHECK(resolve_algorithm("variant-i", c).mlcc.ablation == Ablation::no_rab);
    CHECK(resolve_algorithm("variant-ii", c).mlcc.ablation == Ablation::no_ipls);
    CHECK(resolve_algorithm("variant-iii", c).mlcc.ablation == Ablation::neither);
    CHECK(resolve_algorithm("variant-iv", c).mlcc.ablation == Ablation::no_fitness_bias);
    CHECK(!resolve_algorithm("shade-only", c).framework);
    CHECK(std::holds_alternative<BideParams>(resolve_algorithm("bide-only", c).single));
    const auto best = resolve_algorithm("de-best1", c);
    CHECK(std::get<FixedDeParams>(best.single).strategy == MutationStrategy::best1);

    const auto topg = resolve_algorithm("mlcc:topg=np", c);
    CHECK(topg.mlcc.top_g_override == 50u);
    CHECK(resolve_algorithm("mlcc:topg=1", c).mlcc.top_g_override == 1u);
    CHECK(resolve_algorithm("mlcc:n=0.5", c).mlcc.n == 0.5);
    CHECK(resolve_algorithm("mlcc:layers=shade+bide+fixed-de", c).mlcc.layer_count() == 3);
    CHECK(resolve_algorithm("mlcc:np=20,topg=np", c).mlcc.top_g_override == 20u);
    CHECK(resolve_algorithm("shade-only:np=30", c).population_size == 30);

    CHECK_THROWS_AS(resolve_algorithm("nope", c), std::invalid_argument);
    CHECK_THROWS_AS(resolve_algorithm("mlcc:n=2", c), std::invalid_argument);
    CHECK_THROWS_AS(resolve_algorithm("mlcc:layers=shade", c), std::invalid_argument);
    CHECK_THROWS_AS(resolve_algorithm("shade-only:n=0.1", c), std::invalid_argument);
    CHECK_THROWS_AS(resolve_algorithm("mlcc:what=1", c), std::invalid_argument);
}

TEST_CASE("results CSV round trip") {
    const std::vector<ResultRow> rows{{"mlcc", "f01", 1, 0.1, 100},
                                      {"mlcc", "f01", 2, 1e-300, 100},
                                      {"mlcc", "f02", 1, 123456.789, 99}};
    const auto text = format_csv(rows);
    CHECK(text.starts_with("# mlcc-results v1\nalgorithm,problem,seed,final_error,evaluations\n"));
    const auto back = parse_csv(text, "x");
    REQUIRE(back.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back[k].algorithm == rows[k].algorithm);
        CHECK(back[k].problem == rows[k].problem);
        CHECK(back[k].seed == rows[k].seed);
        CHECK(back[k].final_error == rows[k].final_error);
        CHECK(back[k].evaluations == rows[k].evaluations);
    }
    CHECK(format_csv(back) == text);
    CHECK_THROWS(parse_csv("# other v9\n", "x"));
    CHECK_THROWS(parse_csv("# mlcc-results v1\nalgorithm,problem,seed,final_error,evaluations\na,b,1\n", "x"));
}

TEST_CASE("run_experiment produces one row per run, deterministically") {
    const auto c = tiny_config();
    const auto problems = select_problems(c);
    REQUIRE(problems.size() == 2);
    const std::vector<std::string> algs{"mlcc", "shade-only"};
    const auto a = run_experiment(c, algs, problems, 1);
    const auto b = run_experiment(c, algs, problems, 3);
    REQUIRE(a.size() == 8);
    std::vector<ResultRow> ra, rb;
    for (const auto& o : a) ra.push_back(o.row);
    for (const auto& o : b) rb.push_back(o.row);
    CHECK(format_csv(ra) == format_csv(rb));
    CHECK(a[0].row.seed == 1);
    CHECK(a[1].row.seed == 2);
    for (const auto& o : a) {
        CHECK(o.row.evaluations == c.budget());
        CHECK(run_record_json(o.row.algorithm, o.record)["format"] == "mlcc-trace v1");
    }

    auto shifted = c;
    shifted.base_seed = 100;
    const auto s = run_experiment(shifted, algs, problems, 1);
    CHECK(s[0].row.seed == 100);
    CHECK(s[0].row.final_error != a[0].row.final_error);

    auto all = c;
    all.problems.clear();
    all.runs = 2;
    CHECK(select_problems(all).size() == 12);
    all.problems = {"f99"};
    CHECK_THROWS_AS(select_problems(all), std::invalid_argument);
}

TEST_CASE("run outputs land in per-algorithm CSVs and trace files") {
    auto c = tiny_config();
    c.problems = {"f02-bent-cigar"};
    const auto dir = fs::temp_directory_path() / "mlcc-test-outputs";
    fs::remove_all(dir);
    const std::vector<std::string> algs{"mlcc:n=0.1", "bide-only"};
    const auto outputs = run_experiment(c, algs, select_problems(c));
    const auto paths = write_run_outputs(dir, algs, outputs);
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].filename() == "mlcc_n_0.1.csv");
    CHECK(read_csv(paths[0]).size() == 2);
    CHECK(fs::exists(dir / "traces" / "bide-only" / "f02-bent-cigar-s2.json"));
    const auto trace = nlohmann::json::parse(slurp(dir / "traces" / "mlcc_n_0.1" / "f02-bent-cigar-s1.json"));
    CHECK(trace["algorithm"] == "mlcc:n=0.1");
    CHECK(trace["rank_archive"]["frequency"].size() == 10);
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        CHECK(e.path().extension() != ".tmp");
    }
    fs::remove_all(dir);
}

TEST_CASE("compare: identical inputs give all '=' and equal ranks") {
    const std::vector<std::vector<double>> e{{1, 2, 3}, {4, 5, 6}, {0, 0, 0}};
    auto rows = rows_for("A", e);
    const auto b = rows_for("B", e);
    rows.insert(rows.end(), b.begin(), b.end());
    const ResultTable table(rows);
    const auto rep = compare_report(table, "A", 0.05);
    CHECK(rep["signs"]["B"]["row"] == "0/3/0");
    CHECK(rep["signs"]["B"]["p_n"] == 0);
    CHECK(rep["friedman"]["A"] == rep["friedman"]["B"]);
    CHECK(rep["wilcoxon"]["B"]["all_zero"] == true);
    CHECK(!render_compare_text(rep).empty());
    CHECK(render_compare_csv(rep).starts_with("problem,algorithm,mean,std,best,sign\n"));
}

TEST_CASE("compare: a dominating algorithm has R- = 0") {
    std::vector<std::vector<double>> ea, eb;
    for (int p = 0; p < 8; ++p) {
        ea.push_back({}), eb.push_back({});
        for (int r = 0; r < 10; ++r) {
            ea.back().push_back(p + 0.01 * r);
            eb.back().push_back(10.0 * (p + 1) + r);
        }
    }
    auto rows = rows_for("A", ea);
    const auto b = rows_for("B", eb);
    rows.insert(rows.end(), b.begin(), b.end());
    const auto rep = compare_report(ResultTable(rows), "A", 0.05);
    CHECK(rep["wilcoxon"]["B"]["r_minus"] == 0.0);
    CHECK(rep["wilcoxon"]["B"]["r_plus"] == 36.0);
    CHECK(rep["signs"]["B"]["row"] == "8/0/0");
    CHECK(rep["signs"]["B"]["p_n"] == 8);
    CHECK(rep["functions"][0]["results"]["A"]["best"] == true);
    CHECK(rep["functions"][0]["results"]["B"]["sign"] == "-");
}

TEST_CASE("compare: three-algorithm fixture reproduces the hand-ranked table") {
    std::ifstream in(std::string(MLCC_FIXTURES) + "/friedman_3x3.json");
    const auto fx = nlohmann::json::parse(in);
    const auto algs = fx["algorithms"].get<std::vector<std::string>>();
    const auto errors = fx["errors"].get<std::vector<std::vector<double>>>();
    std::vector<ResultRow> rows;
    for (std::size_t a = 0; a < algs.size(); ++a) {
        std::vector<std::vector<double>> e;
        for (const auto& row : errors) e.push_back({row[a], row[a]});
        const auto part = rows_for(algs[a], e);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    const auto ranks = friedman_ranks(ResultTable(rows));
    const auto expected = fx["mean_ranks"].get<std::vector<double>>();
    for (std::size_t a = 0; a < algs.size(); ++a) {
        CHECK(ranks.at(algs[a]) == doctest::Approx(expected[a]));
    }
}

TEST_CASE("compare: coverage is enforced") {
    auto rows = rows_for("A", {{1, 2}, {3, 4}});
    auto b = rows_for("B", {{1, 2}});
    rows.insert(rows.end(), b.begin(), b.end());
    CHECK_THROWS_AS(ResultTable(rows).check_coverage(), CoverageError);

    auto single = rows_for("A", {{1}, {2}});
    const auto sb = rows_for("B", {{1}, {3}});
    single.insert(single.end(), sb.begin(), sb.end());
    CHECK_THROWS_AS(compare_report(ResultTable(single), "A", 0.05), CoverageError);
    CHECK_NOTHROW(ResultTable(single).check_coverage(false));

    auto dup = rows_for("A", {{1, 2}});
    dup.push_back(dup.front());
    CHECK_THROWS_AS(ResultTable{dup}, CoverageError);
}

TEST_CASE("motivate report shape") {
    auto c = tiny_config();
    c.np = 15;
    c.runs = 3;
    const auto problems = select_problems(c);
    const auto outputs = run_experiment(c, {"de-rand1", "de-best1"}, problems);
    const auto rep = motivate_report(outputs, problems, 15);
    CHECK(rep.entries.size() == 4);
    for (const auto& e : rep.entries) CHECK(e.frequency.size() == 15);
    const auto csv = motivate_ar_csv(rep);
    CHECK(csv.starts_with("# mlcc-motivate-ar v1 np=15 ar_expected=8\n"));
    const auto freq = motivate_frequency_csv(rep);
    CHECK(std::count(freq.begin(), freq.end(), '\n') == 2 + 4 * 15);
    CHECK(motivate_json(rep)["entries"].size() == 4);

    MotivateReport big;
    big.population_size = 150;
    big.ar_expected = stats::ar_expected(150);
    CHECK(motivate_ar_csv(big).starts_with("# mlcc-motivate-ar v1 np=150 ar_expected=75.5\n"));
}

TEST_CASE("motivate picks the lower-median run") {
    std::vector<RunOutput> outs;
    for (std::uint64_t s = 1; s <= 4; ++s) {
        RunOutput o;
        o.row = {"de-rand1", "f01-elliptic", s, double(5 - s), 10};
        o.record.rank_archive = stats::RankArchive(5);
        o.record.rank_archive.record(static_cast<std::size_t>(s));
        outs.push_back(o);
    }
    const auto problems = bench::make_suite(2, 1);
    const auto rep = motivate_report(outs, problems, 5);
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.entries[0].median_seed == 3);
    CHECK(rep.entries[0].ar == 3.0);
}

TEST_CASE("sweep report compares every setting with the baseline") {
    std::vector<ResultRow> rows;
    const std::vector<std::string> settings{"mlcc:n=0.05", "mlcc:n=0.1", "mlcc:topg=1"};
    for (const auto& s : settings) {
        const auto part = rows_for(s, {{1, 2, 3}, {4, 5, 6}});
        rows.insert(rows.end(), part.begin(), part.end());
    }
    const auto rep = sweep_report(ResultTable(rows), settings.front(), settings, 0.05);
    CHECK(rep["rows"].size() == settings.size() - 1);
    for (const auto& r : rep["rows"]) CHECK(r["summary"]["row"] == "0/2/0");
    CHECK(!render_rows_text(rep).empty());
}

TEST_CASE("ablation report totals P-N over the baselines") {
    std::vector<ResultRow> rows;
    auto add = [&](const std::string& a, double scale) {
        std::vector<std::vector<double>> e;
        for (int p = 0; p < 3; ++p) {
            e.push_back({});
            for (int r = 0; r < 8; ++r) e.back().push_back(scale * (p + 1) + 0.01 * r);
        }
        const auto part = rows_for(a, e);
        rows.insert(rows.end(), part.begin(), part.end());
    };
    add("mlcc", 1.0);
    add("variant-iii", 2.0);
    add("shade-only", 3.0);
    add("bide-only", 4.0);
    const auto rep = ablate_report(ResultTable(rows), "mlcc", {"variant-iii"},
                                   {"shade-only", "bide-only"}, 0.05);
    CHECK(rep["variants_vs_full"][0]["summary"]["row"] == "3/0/0");
    CHECK(rep["total_p_n"]["mlcc"] == 6);
    CHECK(rep["total_p_n"]["variant-iii"] == 6);
    CHECK(rep["versus_baselines"].size() == 4);
}
