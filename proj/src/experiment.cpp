#include "mlcc/experiment.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace mlcc::cli {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto k = s.find(sep, start);
        out.emplace_back(s.substr(start, k == std::string_view::npos ? s.npos : k - start));
        if (k == std::string_view::npos) break;
        start = k + 1;
    }
    return out;
}

double parse_real(const std::string& text, std::string_view what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) {
        throw std::invalid_argument("bad value '" + text + "' for " + std::string(what));
    }
    return v;
}

std::size_t parse_count(const std::string& text, std::string_view what) {
    const double v = parse_real(text, what);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw std::invalid_argument("bad integer '" + text + "' for " + std::string(what));
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

LayerSpec resolve_layer(std::string_view name, const ExperimentConfig& config) {
    if (name == "shade") return config.shade;
    if (name == "bide") return config.bide;
    if (name == "fixed-de") return config.fixed_de;
    if (name == "de-rand1" || name == "de-best1") {
        FixedDeParams p = config.fixed_de;
        p.strategy = name == "de-rand1" ? MutationStrategy::rand1 : MutationStrategy::best1;
        return p;
    }
    throw std::invalid_argument("unknown layer '" + std::string(name) + "'");
}

AlgorithmSpec resolve_algorithm(std::string_view name, const ExperimentConfig& config) {
    AlgorithmSpec spec;
    spec.name = std::string(name);
    const auto colon = name.find(':');
    const std::string base(name.substr(0, colon));

    spec.population_size = config.population_size();
    spec.mlcc.population_size = spec.population_size;
    spec.mlcc.n = config.n;
    if (config.top_g) spec.mlcc.top_g_override = config.top_g;
    spec.mlcc.update = config.synchronous ? UpdateMode::synchronous : UpdateMode::immediate;
    spec.mlcc.share_interval = config.share_interval;
    for (const auto& l : config.layers) spec.mlcc.layers.push_back(resolve_layer(l, config));

    if (base == "mlcc") {
        spec.framework = true;
    } else if (base == "variant-i") {
        spec.framework = true;
        spec.mlcc.ablation = Ablation::no_rab;
    } else if (base == "variant-ii") {
        spec.framework = true;
        spec.mlcc.ablation = Ablation::no_ipls;
    } else if (base == "variant-iii") {
        spec.framework = true;
        spec.mlcc.ablation = Ablation::neither;
    } else if (base == "variant-iv") {
        spec.framework = true;
        spec.mlcc.ablation = Ablation::no_fitness_bias;
    } else if (base.size() > 5 && base.ends_with("-only")) {
        spec.single = resolve_layer(std::string_view(base).substr(0, base.size() - 5), config);
    } else if (base == "fixed-de" || base == "de-rand1" || base == "de-best1") {
        spec.single = resolve_layer(base, config);
    } else {
        throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
    }

    if (colon != std::string_view::npos) {
        for (const auto& opt : split(name.substr(colon + 1), ',')) {
            const auto eq = opt.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("option '" + opt + "' in '" + spec.name +
                                            "' is not key=value");
            }
            const std::string key = opt.substr(0, eq);
            const std::string value = opt.substr(eq + 1);
            if (key == "np") {
                spec.population_size = parse_count(value, key);
                spec.mlcc.population_size = spec.population_size;
            } else if (!spec.framework) {
                throw std::invalid_argument("option '" + key + "' only applies to framework runs");
            } else if (key == "n") {
                spec.mlcc.n = parse_real(value, key);
                spec.mlcc.top_g_override.reset();
            } else if (key == "topg") {
                spec.mlcc.top_g_override =
                    value == "np" ? spec.population_size : parse_count(value, key);
            } else if (key == "sync") {
                spec.mlcc.update = parse_count(value, key) ? UpdateMode::synchronous
                                                           : UpdateMode::immediate;
            } else if (key == "layers") {
                spec.mlcc.layers.clear();
                for (const auto& l : split(value, '+')) {
                    spec.mlcc.layers.push_back(resolve_layer(l, config));
                }
            } else {
                throw std::invalid_argument("unknown option '" + key + "' in '" + spec.name + "'");
            }
        }
    }
    if (spec.framework) {
        // "topg=np" may precede "np=..."
        if (spec.mlcc.top_g_override && *spec.mlcc.top_g_override > spec.population_size) {
            spec.mlcc.top_g_override = spec.population_size;
        }
        spec.mlcc.validate();
    } else if (spec.population_size < kMinPopulation) {
        throw std::invalid_argument("population too small in '" + spec.name + "'");
    }
    return spec;
}

std::vector<bench::BenchProblem> select_problems(const ExperimentConfig& config) {
    auto suite = bench::make_suite(config.dimension, config.suite_seed);
    if (config.problems.empty()) return suite;
    std::vector<bench::BenchProblem> out;
    for (const auto& id : config.problems) {
        auto it = std::find_if(suite.begin(), suite.end(),
                               [&](const bench::BenchProblem& p) { return p.id == id; });
        if (it == suite.end()) throw std::invalid_argument("unknown problem '" + id + "'");
        out.push_back(*it);
    }
    return out;
}

RunRecord run_single(const AlgorithmSpec& spec, const Problem& problem, std::uint64_t budget,
                     std::uint64_t seed) {
    if (spec.framework) return mlcc_run(spec.mlcc, problem, Budget(budget), seed);
    return single_layer_run(spec.single, spec.population_size, problem, Budget(budget), seed);
}

std::vector<RunOutput> run_experiment(const ExperimentConfig& config,
                                      const std::vector<std::string>& algorithms,
                                      const std::vector<bench::BenchProblem>& problems,
                                      std::size_t workers) {
    std::vector<AlgorithmSpec> specs;
    for (const auto& a : algorithms) specs.push_back(resolve_algorithm(a, config));
    std::vector<Problem> adapted;
    for (const auto& p : problems) adapted.push_back(p.as_problem());

    struct Job {
        std::size_t algorithm, problem, run;
    };
    std::vector<Job> jobs;
    for (std::size_t a = 0; a < specs.size(); ++a) {
        for (std::size_t p = 0; p < adapted.size(); ++p) {
            for (std::size_t r = 0; r < config.runs; ++r) jobs.push_back({a, p, r});
        }
    }

    std::vector<RunOutput> out(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            try {
                const auto& job = jobs[k];
                const std::uint64_t seed = config.base_seed + job.run;
                auto record = run_single(specs[job.algorithm], adapted[job.problem],
                                         config.budget(), seed);
                out[k].row = ResultRow{specs[job.algorithm].name, record.problem_id, seed,
                                       record.final_error, record.evaluations};
                out[k].record = std::move(record);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = jobs.size();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(workers, jobs.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_csv(const std::vector<ResultRow>& rows) {
    std::string s;
    s += kCsvSchema;
    s += '\n';
    s += kCsvHeader;
    s += '\n';
    for (const auto& r : rows) {
        s += r.algorithm + ',' + r.problem + ',' + std::to_string(r.seed) + ',' +
             format_double(r.final_error) + ',' + std::to_string(r.evaluations) + '\n';
    }
    return s;
}

std::vector<ResultRow> parse_csv(std::string_view text, const std::string& origin) {
    std::vector<ResultRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (line_no == 1 && line != kCsvSchema) fail("unsupported schema line '" + line + "'");
            continue;
        }
        if (!header_seen) {
            if (line != kCsvHeader) fail("expected header '" + std::string(kCsvHeader) + "'");
            header_seen = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 5) fail("expected 5 columns");
        ResultRow r;
        r.algorithm = cells[0];
        r.problem = cells[1];
        try {
            r.seed = std::stoull(cells[2]);
            r.final_error = std::stod(cells[3]);
            r.evaluations = std::stoull(cells[4]);
        } catch (const std::exception&) {
            fail("malformed numeric field");
        }
        rows.push_back(std::move(r));
    }
    if (!header_seen) fail("missing header");
    return rows;
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path.string());
}

nlohmann::json run_record_json(const std::string& algorithm, const RunRecord& record) {
    nlohmann::json shares = nlohmann::json::array();
    for (const auto& iv : record.layer_shares) {
        shares.push_back({{"first_generation", iv.first_generation},
                          {"generations", iv.generations},
                          {"shares", iv.shares},
                          {"tracked", iv.tracked}});
    }
    const auto ar = stats::ar_statistic_or_none(record.rank_archive);
    return {
        {"format", "mlcc-trace v1"},
        {"algorithm", algorithm},
        {"problem", record.problem_id},
        {"seed", record.seed},
        {"population_size", record.population_size},
        {"layers", record.layer_names},
        {"final_error", record.final_error},
        {"best_fitness", record.best_fitness},
        {"evaluations", record.evaluations},
        {"generations", record.generations},
        {"error_trace", record.error_trace},
        {"top_g_trace", record.top_g_trace},
        {"evaluation_trace", record.evaluation_trace},
        {"tracked_individuals", record.tracked_individuals},
        {"layer_shares", shares},
        {"rank_archive",
         {{"events", record.rank_archive.size()},
          {"ar", ar ? nlohmann::json(*ar) : nlohmann::json(nullptr)},
          {"ar_expected", stats::ar_expected(record.population_size)},
          {"frequency", record.rank_archive.frequency()}}},
    };
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string file_stem(std::string_view algorithm) {
    std::string s(algorithm);
    for (char& c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')) {
            c = '_';
        }
    }
    return s;
}

std::vector<std::filesystem::path> write_run_outputs(const std::filesystem::path& out,
                                                     const std::vector<std::string>& algorithms,
                                                     const std::vector<RunOutput>& outputs,
                                                     bool write_traces) {
    std::vector<std::filesystem::path> paths;
    for (const auto& alg : algorithms) {
        std::vector<ResultRow> rows;
        for (const auto& o : outputs) {
            if (o.row.algorithm != alg) continue;
            rows.push_back(o.row);
            if (write_traces) {
                const auto trace = out / "traces" / file_stem(alg) /
                                   (o.row.problem + "-s" + std::to_string(o.row.seed) + ".json");
                write_file_atomic(trace, run_record_json(alg, o.record).dump(1) + "\n");
            }
        }
        const auto csv = out / (file_stem(alg) + ".csv");
        write_file_atomic(csv, format_csv(rows));
        paths.push_back(csv);
    }
    return paths;
}

}  // namespace mlcc::cli
