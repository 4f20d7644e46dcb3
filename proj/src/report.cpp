#include "mlcc/report.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace mlcc::cli {

ResultTable::ResultTable(const std::vector<ResultRow>& rows) {
    for (const auto& r : rows) {
        if (!has(r.algorithm)) algorithms_.push_back(r.algorithm);
        if (std::find(problems_.begin(), problems_.end(), r.problem) == problems_.end()) {
            problems_.push_back(r.problem);
        }
        auto& cell = cells_[{r.algorithm, r.problem}];
        if (std::find(cell.seeds.begin(), cell.seeds.end(), r.seed) != cell.seeds.end()) {
            throw CoverageError("duplicate run: " + r.algorithm + " / " + r.problem + " / seed " +
                                std::to_string(r.seed));
        }
        cell.seeds.push_back(r.seed);
        cell.errors.push_back(r.final_error);
    }
    for (auto& [key, cell] : cells_) {
        std::vector<std::size_t> idx(cell.seeds.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return cell.seeds[a] < cell.seeds[b]; });
        Cell sorted;
        for (auto k : idx) {
            sorted.seeds.push_back(cell.seeds[k]);
            sorted.errors.push_back(cell.errors[k]);
        }
        cell = std::move(sorted);
    }
}

bool ResultTable::has(const std::string& algorithm) const {
    return std::find(algorithms_.begin(), algorithms_.end(), algorithm) != algorithms_.end();
}

const std::vector<double>& ResultTable::errors(const std::string& algorithm,
                                               const std::string& problem) const {
    const auto it = cells_.find({algorithm, problem});
    if (it == cells_.end()) throw CoverageError("no results for " + algorithm + " on " + problem);
    return it->second.errors;
}

std::size_t ResultTable::runs() const {
    return cells_.empty() ? 0 : cells_.begin()->second.errors.size();
}

void ResultTable::check_coverage(bool for_statistics) const {
    if (algorithms_.empty()) throw CoverageError("no results");
    for (const auto& p : problems_) {
        const Cell* reference = nullptr;
        for (const auto& a : algorithms_) {
            const auto it = cells_.find({a, p});
            if (it == cells_.end()) throw CoverageError(a + " has no runs on " + p);
            if (!reference) {
                reference = &it->second;
            } else if (it->second.seeds != reference->seeds) {
                throw CoverageError("run seeds differ between algorithms on " + p);
            }
        }
        if (for_statistics && reference->errors.size() < 2) {
            throw CoverageError("statistics need at least 2 runs per problem (" + p + " has " +
                                std::to_string(reference->errors.size()) + ")");
        }
    }
    const auto n = runs();
    for (const auto& [key, cell] : cells_) {
        if (cell.errors.size() != n) throw CoverageError("run counts differ across problems");
    }
}

PairwiseComparison compare_pair(const ResultTable& table, const std::string& considered,
                                const std::string& compared, double alpha) {
    PairwiseComparison out{considered, compared, {}, {}, std::nullopt};
    std::vector<double> mean_a, mean_b;
    for (const auto& p : table.problems()) {
        const auto& a = table.errors(considered, p);
        const auto& b = table.errors(compared, p);
        const auto s = stats::single_problem_compare(a, b, alpha);
        out.signs.push_back(s);
        out.summary.add(s);
        mean_a.push_back(stats::mean(a));
        mean_b.push_back(stats::mean(b));
    }
    try {
        out.multi = stats::multi_problem_wilcoxon(mean_a, mean_b, alpha);
    } catch (const stats::AllZero&) {
    }
    return out;
}

std::map<std::string, double> friedman_ranks(const ResultTable& table) {
    std::vector<std::vector<double>> matrix;
    for (const auto& p : table.problems()) {
        std::vector<double> row;
        for (const auto& a : table.algorithms()) row.push_back(stats::mean(table.errors(a, p)));
        matrix.push_back(std::move(row));
    }
    const auto ranks = stats::friedman_mean_ranks(matrix);
    std::map<std::string, double> out;
    for (std::size_t k = 0; k < ranks.size(); ++k) out[table.algorithms()[k]] = ranks[k];
    return out;
}

namespace {

nlohmann::json summary_json(const stats::SignSummary& s) {
    return {{"minus", s.minus}, {"equal", s.equal}, {"plus", s.plus}, {"p_n", s.p_n()},
            {"row", s.str()}};
}

nlohmann::json wilcoxon_json(const std::optional<stats::WilcoxonResult>& w) {
    if (!w) return {{"all_zero", true}};
    return {{"r_plus", w->r_plus},   {"r_minus", w->r_minus},
            {"p_value", w->p_value}, {"significant", w->significant},
            {"n", w->n},             {"exact", w->exact}};
}

std::string fmt_sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << v;
    return os.str();
}

std::string fmt_fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

nlohmann::json compare_report(const ResultTable& table, const std::string& considered,
                              double alpha) {
    table.check_coverage(true);
    if (!table.has(considered)) throw CoverageError("unknown algorithm '" + considered + "'");
    if (table.algorithms().size() < 2) throw CoverageError("compare needs at least 2 algorithms");

    std::vector<std::string> others;
    for (const auto& a : table.algorithms()) {
        if (a != considered) others.push_back(a);
    }
    std::map<std::string, PairwiseComparison> pairs;
    for (const auto& o : others) pairs.emplace(o, compare_pair(table, considered, o, alpha));

    nlohmann::json functions = nlohmann::json::array();
    for (std::size_t f = 0; f < table.problems().size(); ++f) {
        const auto& p = table.problems()[f];
        double best = std::numeric_limits<double>::infinity();
        for (const auto& a : table.algorithms()) best = std::min(best, stats::mean(table.errors(a, p)));
        nlohmann::json results = nlohmann::json::object();
        for (const auto& a : table.algorithms()) {
            const auto& e = table.errors(a, p);
            const double m = stats::mean(e);
            nlohmann::json r{{"mean", m}, {"std", stats::stddev(e)}, {"best", m == best}};
            if (a != considered) r["sign"] = std::string(1, stats::to_char(pairs.at(a).signs[f]));
            results[a] = r;
        }
        functions.push_back({{"problem", p}, {"results", results}});
    }

    nlohmann::json signs = nlohmann::json::object();
    nlohmann::json wilcoxon = nlohmann::json::object();
    for (const auto& o : others) {
        signs[o] = summary_json(pairs.at(o).summary);
        wilcoxon[o] = wilcoxon_json(pairs.at(o).multi);
    }
    nlohmann::json friedman = nlohmann::json::object();
    for (const auto& [a, r] : friedman_ranks(table)) friedman[a] = r;

    return {{"format", "mlcc-compare v1"},
            {"alpha", alpha},
            {"considered", considered},
            {"algorithms", table.algorithms()},
            {"problems", table.problems()},
            {"runs", table.runs()},
            {"functions", functions},
            {"signs", signs},
            {"wilcoxon", wilcoxon},
            {"friedman", friedman}};
}

std::string render_compare_text(const nlohmann::json& report) {
    const auto algorithms = report["algorithms"].get<std::vector<std::string>>();
    const std::string considered = report["considered"];
    std::size_t name_w = 8;
    for (const auto& f : report["functions"]) {
        name_w = std::max(name_w, f["problem"].get<std::string>().size());
    }
    constexpr std::size_t col_w = 26;
    std::ostringstream os;
    os << "Mean (std) of final errors over " << report["runs"].get<std::size_t>()
       << " runs; * marks the best mean, signs are relative to " << considered << "\n\n";
    os << pad("problem", name_w + 2);
    for (const auto& a : algorithms) os << pad(a, col_w);
    os << "\n";
    for (const auto& f : report["functions"]) {
        os << pad(f["problem"].get<std::string>(), name_w + 2);
        for (const auto& a : algorithms) {
            const auto& r = f["results"][a];
            std::string cell = fmt_sci(r["mean"].get<double>()) + " (" +
                               fmt_sci(r["std"].get<double>()) + ")";
            if (r["best"].get<bool>()) cell = "*" + cell;
            if (r.contains("sign")) cell += " " + r["sign"].get<std::string>();
            os << pad(cell, col_w);
        }
        os << "\n";
    }
    os << "\n" << pad("-/=/+ (P-N)", name_w + 2);
    for (const auto& a : algorithms) {
        if (a == considered) {
            os << pad("", col_w);
            continue;
        }
        const auto& s = report["signs"][a];
        os << pad(s["row"].get<std::string>() + " (" + std::to_string(s["p_n"].get<long>()) + ")",
                  col_w);
    }
    os << "\n\nMulti-problem Wilcoxon, " << considered << " vs.\n";
    for (const auto& a : algorithms) {
        if (a == considered) continue;
        const auto& w = report["wilcoxon"][a];
        os << "  " << pad(a, name_w);
        if (w.contains("all_zero")) {
            os << "  all differences zero\n";
            continue;
        }
        os << "  R+ " << pad(fmt_fixed(w["r_plus"].get<double>(), 1), 10) << "R- "
           << pad(fmt_fixed(w["r_minus"].get<double>(), 1), 10) << "p " << pad(fmt_sci(w["p_value"].get<double>()), 12)
           << (w["significant"].get<bool>() ? "Yes" : "No") << "\n";
    }
    os << "\nFriedman mean ranks\n";
    std::vector<std::pair<double, std::string>> ranks;
    for (const auto& [a, r] : report["friedman"].items()) ranks.emplace_back(r.get<double>(), a);
    std::sort(ranks.begin(), ranks.end());
    for (const auto& [r, a] : ranks) os << "  " << pad(a, name_w) << "  " << fmt_fixed(r, 2) << "\n";
    return os.str();
}

std::string render_compare_csv(const nlohmann::json& report) {
    std::ostringstream os;
    os << "problem,algorithm,mean,std,best,sign\n";
    for (const auto& f : report["functions"]) {
        for (const auto& a : report["algorithms"]) {
            const auto& r = f["results"][a.get<std::string>()];
            os << f["problem"].get<std::string>() << ',' << a.get<std::string>() << ','
               << format_double(r["mean"].get<double>()) << ','
               << format_double(r["std"].get<double>()) << ',' << (r["best"].get<bool>() ? 1 : 0)
               << ',' << (r.contains("sign") ? r["sign"].get<std::string>() : "") << '\n';
        }
    }
    return os.str();
}

MotivateReport motivate_report(const std::vector<RunOutput>& outputs,
                               const std::vector<bench::BenchProblem>& problems,
                               std::size_t population_size) {
    MotivateReport report;
    report.population_size = population_size;
    report.ar_expected = stats::ar_expected(population_size);

    std::vector<std::string> algorithms;
    for (const auto& o : outputs) {
        if (std::find(algorithms.begin(), algorithms.end(), o.row.algorithm) == algorithms.end()) {
            algorithms.push_back(o.row.algorithm);
        }
    }
    for (const auto& alg : algorithms) {
        for (const auto& p : problems) {
            std::vector<const RunOutput*> runs;
            for (const auto& o : outputs) {
                if (o.row.algorithm == alg && o.row.problem == p.id) runs.push_back(&o);
            }
            if (runs.empty()) continue;
            std::sort(runs.begin(), runs.end(), [](const RunOutput* a, const RunOutput* b) {
                if (a->row.final_error != b->row.final_error) {
                    return a->row.final_error < b->row.final_error;
                }
                return a->row.seed < b->row.seed;
            });
            const RunOutput& med = *runs[(runs.size() - 1) / 2];
            MotivateEntry e;
            e.algorithm = alg;
            e.problem = p.id;
            e.category = std::string(bench::to_string(p.category));
            e.median_seed = med.row.seed;
            e.median_error = med.row.final_error;
            e.ar = stats::ar_statistic_or_none(med.record.rank_archive);
            e.nbs_events = med.record.rank_archive.size();
            e.frequency = med.record.rank_archive.frequency();
            report.entries.push_back(std::move(e));
        }
    }
    return report;
}

std::string motivate_ar_csv(const MotivateReport& report) {
    std::ostringstream os;
    os << "# mlcc-motivate-ar v1 np=" << report.population_size
       << " ar_expected=" << format_double(report.ar_expected) << "\n";
    os << "algorithm,problem,category,median_seed,median_error,nbs_events,ar,ar_expected\n";
    for (const auto& e : report.entries) {
        os << e.algorithm << ',' << e.problem << ',' << e.category << ',' << e.median_seed << ','
           << format_double(e.median_error) << ',' << e.nbs_events << ','
           << (e.ar ? format_double(*e.ar) : std::string()) << ','
           << format_double(report.ar_expected) << '\n';
    }
    return os.str();
}

std::string motivate_frequency_csv(const MotivateReport& report) {
    std::ostringstream os;
    os << "# mlcc-motivate-frequency v1 np=" << report.population_size << "\n";
    os << "algorithm,problem,rank,frequency\n";
    for (const auto& e : report.entries) {
        for (std::size_t r = 0; r < e.frequency.size(); ++r) {
            os << e.algorithm << ',' << e.problem << ',' << (r + 1) << ',' << e.frequency[r]
               << '\n';
        }
    }
    return os.str();
}

nlohmann::json motivate_json(const MotivateReport& report) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"algorithm", e.algorithm},
                           {"problem", e.problem},
                           {"category", e.category},
                           {"median_seed", e.median_seed},
                           {"median_error", e.median_error},
                           {"nbs_events", e.nbs_events},
                           {"ar", e.ar ? nlohmann::json(*e.ar) : nlohmann::json(nullptr)},
                           {"frequency", e.frequency}});
    }
    return {{"format", "mlcc-motivate v1"},
            {"population_size", report.population_size},
            {"ar_expected", report.ar_expected},
            {"entries", entries}};
}

nlohmann::json sweep_report(const ResultTable& table, const std::string& baseline,
                            const std::vector<std::string>& settings, double alpha) {
    table.check_coverage(true);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : settings) {
        if (s == baseline) continue;
        const auto cmp = compare_pair(table, baseline, s, alpha);
        std::string signs;
        for (auto sg : cmp.signs) signs.push_back(stats::to_char(sg));
        rows.push_back({{"setting", s}, {"versus", baseline}, {"summary", summary_json(cmp.summary)},
                        {"signs", signs}});
    }
    return {{"format", "mlcc-sweep v1"},
            {"baseline", baseline},
            {"alpha", alpha},
            {"problems", table.problems()},
            {"rows", rows}};
}

std::string render_rows_text(const nlohmann::json& report) {
    std::ostringstream os;
    auto emit = [&](const nlohmann::json& rows, const std::string& title) {
        os << title << "\n";
        for (const auto& r : rows) {
            const auto& s = r["summary"];
            os << "  " << pad(r["setting"].get<std::string>(), 28) << " vs "
               << pad(r["versus"].get<std::string>(), 20) << pad(s["row"].get<std::string>(), 10)
               << " (P-N " << s["p_n"].get<long>() << ")\n";
        }
    };
    if (report.contains("rows")) emit(report["rows"], "-/=/+ against " + report["baseline"].get<std::string>());
    if (report.contains("variants_vs_full")) {
        emit(report["variants_vs_full"], "Variants compared with the full framework");
    }
    if (report.contains("versus_baselines")) {
        emit(report["versus_baselines"], "\nFramework algorithms against the baselines");
        os << "\nTotal P-N\n";
        for (const auto& [name, total] : report["total_p_n"].items()) {
            os << "  " << pad(name, 28) << total.get<long>() << "\n";
        }
    }
    return os.str();
}

nlohmann::json ablate_report(const ResultTable& table, const std::string& full,
                             const std::vector<std::string>& variants,
                             const std::vector<std::string>& baselines, double alpha) {
    table.check_coverage(true);
    auto row = [&](const std::string& considered, const std::string& compared) {
        const auto cmp = compare_pair(table, considered, compared, alpha);
        return std::pair{cmp.summary.p_n(),
                         nlohmann::json{{"setting", compared},
                                        {"versus", considered},
                                        {"summary", summary_json(cmp.summary)}}};
    };
    nlohmann::json vs_full = nlohmann::json::array();
    for (const auto& v : variants) vs_full.push_back(row(full, v).second);

    // Baseline rows read from the framework algorithm's perspective: it is the considered one.
    nlohmann::json vs_base = nlohmann::json::array();
    nlohmann::json totals = nlohmann::json::object();
    std::vector<std::string> framework{full};
    framework.insert(framework.end(), variants.begin(), variants.end());
    for (const auto& a : framework) {
        long total = 0;
        for (const auto& b : baselines) {
            auto [pn, j] = row(a, b);
            j["setting"] = a;
            j["versus"] = b;
            total += pn;
            vs_base.push_back(std::move(j));
        }
        totals[a] = total;
    }
    return {{"format", "mlcc-ablate v1"},
            {"alpha", alpha},
            {"full", full},
            {"variants_vs_full", vs_full},
            {"versus_baselines", vs_base},
            {"total_p_n", totals}};
}

}  // namespace mlcc::cli
