#include "mlcc/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace mlcc::cli {

ConfigError::ConfigError(const std::string& origin, std::size_t line, const std::string& message)
    : std::runtime_error(origin + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '\\' && quoted) {
            ++k;
        } else if (s[k] == '"') {
            quoted = !quoted;
        } else if (s[k] == '#' && !quoted) {
            return s.substr(0, k);
        }
    }
    return s;
}

bool valid_key(std::string_view k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    }
    return true;
}

struct ParseContext {
    const std::string& origin;
    std::size_t line;
    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(origin, line, msg); }
};

ConfigValue::Scalar parse_scalar(std::string_view s, const ParseContext& ctx) {
    s = trim(s);
    if (s.empty()) ctx.fail("missing value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') ctx.fail("unterminated string");
        std::string out;
        for (std::size_t k = 1; k + 1 < s.size(); ++k) {
            if (s[k] == '\\' && k + 2 < s.size()) {
                out.push_back(s[++k]);
            } else {
                out.push_back(s[k]);
            }
        }
        return out;
    }
    if (s == "true") return true;
    if (s == "false") return false;
    const std::string text(s);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) ctx.fail("cannot parse value '" + text + "'");
    return v;
}

std::vector<std::string_view> split_array(std::string_view body, const ParseContext& ctx) {
    std::vector<std::string_view> items;
    bool quoted = false;
    std::size_t start = 0;
    for (std::size_t k = 0; k < body.size(); ++k) {
        if (body[k] == '\\' && quoted) {
            ++k;
        } else if (body[k] == '"') {
            quoted = !quoted;
        } else if (body[k] == ',' && !quoted) {
            items.push_back(trim(body.substr(start, k - start)));
            start = k + 1;
        }
    }
    if (quoted) ctx.fail("unterminated string in array");
    const auto last = trim(body.substr(start));
    if (!last.empty()) items.push_back(last);
    for (auto item : items) {
        if (item.empty()) ctx.fail("empty array element");
    }
    return items;
}

}  // namespace

std::map<std::string, ConfigValue> parse_config_text(std::string_view text,
                                                     const std::string& origin) {
    std::map<std::string, ConfigValue> out;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const ParseContext ctx{origin, line_no};
        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') ctx.fail("malformed section header");
            const auto name = trim(line.substr(1, line.size() - 2));
            if (!valid_key(name)) ctx.fail("invalid section name");
            section = std::string(name);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) ctx.fail("expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (!valid_key(key)) ctx.fail("invalid key '" + std::string(key) + "'");
        const auto value_text = trim(line.substr(eq + 1));
        ConfigValue value;
        value.line = line_no;
        if (!value_text.empty() && value_text.front() == '[') {
            if (value_text.back() != ']') ctx.fail("arrays must close on the same line");
            std::vector<ConfigValue::Scalar> items;
            for (auto item : split_array(value_text.substr(1, value_text.size() - 2), ctx)) {
                items.push_back(parse_scalar(item, ctx));
            }
            value.value = std::move(items);
        } else {
            std::visit([&](auto&& v) { value.value = v; }, parse_scalar(value_text, ctx));
        }
        const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        if (out.contains(full)) ctx.fail("duplicate key '" + full + "'");
        out.emplace(full, std::move(value));
    }
    return out;
}

namespace {

class Binder {
public:
    explicit Binder(const std::string& origin) : origin_(origin) {}

    [[noreturn]] void fail(const ConfigValue& v, const std::string& msg) const {
        throw ConfigError(origin_, v.line, msg);
    }

    double number(const ConfigValue& v) const {
        if (const auto* d = std::get_if<double>(&v.value)) return *d;
        fail(v, "expected a number");
    }
    std::uint64_t count(const ConfigValue& v) const {
        const double d = number(v);
        if (d < 0 || std::floor(d) != d) fail(v, "expected a non-negative integer");
        return static_cast<std::uint64_t>(d);
    }
    bool boolean(const ConfigValue& v) const {
        if (const auto* b = std::get_if<bool>(&v.value)) return *b;
        fail(v, "expected true or false");
    }
    std::string string(const ConfigValue& v) const {
        if (const auto* s = std::get_if<std::string>(&v.value)) return *s;
        fail(v, "expected a string");
    }
    /// Array items rendered as strings (numbers keep their literal meaning).
    std::vector<std::string> strings(const ConfigValue& v) const {
        const auto* arr = std::get_if<std::vector<ConfigValue::Scalar>>(&v.value);
        if (!arr) fail(v, "expected an array");
        std::vector<std::string> out;
        for (const auto& item : *arr) {
            if (const auto* s = std::get_if<std::string>(&item)) {
                out.push_back(*s);
            } else if (const auto* d = std::get_if<double>(&item)) {
                std::ostringstream os;
                os << *d;
                out.push_back(os.str());
            } else {
                fail(v, "array elements must be strings or numbers");
            }
        }
        return out;
    }

private:
    const std::string& origin_;
};

}  // namespace

void ExperimentConfig::validate() const {
    if (dimension < 2) throw std::invalid_argument("suite.dimension must be at least 2");
    if (runs < 1) throw std::invalid_argument("experiment.runs must be positive");
    if (budget_multiplier == 0) throw std::invalid_argument("budget multiplier must be positive");
    if (population_size() < 5) throw std::invalid_argument("population.np must be at least 5");
    if (budget() < population_size()) {
        throw std::invalid_argument("budget is smaller than the population");
    }
    if (!(n > 0.0 && n <= 1.0)) throw std::invalid_argument("mlcc.n must lie in (0, 1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (workers == 0) throw std::invalid_argument("workers must be positive");
    if (layers.size() < 2) throw std::invalid_argument("mlcc.layers needs at least two layers");
}

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& origin) {
    const auto values = parse_config_text(text, origin);
    const Binder b(origin);
    ExperimentConfig c;

    using Setter = std::function<void(const ConfigValue&)>;
    const std::map<std::string, Setter> setters{
        {"suite.dimension", [&](const ConfigValue& v) { c.dimension = b.count(v); }},
        {"suite.seed", [&](const ConfigValue& v) { c.suite_seed = b.count(v); }},
        {"suite.problems", [&](const ConfigValue& v) { c.problems = b.strings(v); }},
        {"experiment.runs", [&](const ConfigValue& v) { c.runs = b.count(v); }},
        {"experiment.budget_multiplier",
         [&](const ConfigValue& v) { c.budget_multiplier = b.count(v); }},
        {"experiment.base_seed", [&](const ConfigValue& v) { c.base_seed = b.count(v); }},
        {"experiment.out", [&](const ConfigValue& v) { c.out_dir = b.string(v); }},
        {"experiment.workers", [&](const ConfigValue& v) { c.workers = b.count(v); }},
        {"experiment.alpha", [&](const ConfigValue& v) { c.alpha = b.number(v); }},
        {"experiment.algorithms", [&](const ConfigValue& v) { c.algorithms = b.strings(v); }},
        {"population.np", [&](const ConfigValue& v) { c.np = b.count(v); }},
        {"shade.mf_init", [&](const ConfigValue& v) { c.shade.mf_init = b.number(v); }},
        {"shade.mcr_init", [&](const ConfigValue& v) { c.shade.mcr_init = b.number(v); }},
        {"shade.history", [&](const ConfigValue& v) { c.shade.history = b.count(v); }},
        {"shade.p_max", [&](const ConfigValue& v) { c.shade.p_max = b.number(v); }},
        {"shade.archive_rate", [&](const ConfigValue& v) { c.shade.archive_rate = b.number(v); }},
        {"bide.f_modes",
         [&](const ConfigValue& v) {
             const auto m = b.strings(v);
             if (m.size() != 2) b.fail(v, "expected two modes");
             c.bide.f_mode_low = std::stod(m[0]);
             c.bide.f_mode_high = std::stod(m[1]);
         }},
        {"bide.cr_modes",
         [&](const ConfigValue& v) {
             const auto m = b.strings(v);
             if (m.size() != 2) b.fail(v, "expected two modes");
             c.bide.cr_mode_low = std::stod(m[0]);
             c.bide.cr_mode_high = std::stod(m[1]);
         }},
        {"bide.scale", [&](const ConfigValue& v) { c.bide.scale = b.number(v); }},
        {"bide.p_max", [&](const ConfigValue& v) { c.bide.p_max = b.number(v); }},
        {"bide.archive_rate", [&](const ConfigValue& v) { c.bide.archive_rate = b.number(v); }},
        {"fixed_de.f", [&](const ConfigValue& v) { c.fixed_de.f = b.number(v); }},
        {"fixed_de.cr", [&](const ConfigValue& v) { c.fixed_de.cr = b.number(v); }},
        {"fixed_de.strategy",
         [&](const ConfigValue& v) {
             try {
                 c.fixed_de.strategy = parse_strategy(b.string(v));
             } catch (const std::invalid_argument& e) {
                 b.fail(v, e.what());
             }
         }},
        {"mlcc.layers", [&](const ConfigValue& v) { c.layers = b.strings(v); }},
        {"mlcc.n", [&](const ConfigValue& v) { c.n = b.number(v); }},
        {"mlcc.top_g", [&](const ConfigValue& v) { c.top_g = b.count(v); }},
        {"mlcc.synchronous", [&](const ConfigValue& v) { c.synchronous = b.boolean(v); }},
        {"mlcc.share_interval", [&](const ConfigValue& v) { c.share_interval = b.count(v); }},
        {"sweep.settings", [&](const ConfigValue& v) { c.sweep_settings = b.strings(v); }},
        {"motivate.f", [&](const ConfigValue& v) { c.motivate_f = b.number(v); }},
        {"motivate.cr", [&](const ConfigValue& v) { c.motivate_cr = b.number(v); }},
        {"motivate.np", [&](const ConfigValue& v) { c.motivate_np = b.count(v); }},
        {"motivate.runs", [&](const ConfigValue& v) { c.motivate_runs = b.count(v); }},
    };

    for (const auto& [key, value] : values) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(origin, value.line, "unknown key '" + key + "'");
        it->second(value);
    }
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str(), path.string());
}

}  // namespace mlcc::cli
