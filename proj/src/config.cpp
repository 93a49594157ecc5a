#include "qwire/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qwire/errors.hpp"
#include "qwire/table.hpp"

namespace qwire {

namespace {

struct ExperimentInfo {
    Experiment id;
    const char* kebab;
    const char* camel;
    std::vector<std::string> required;
    bool needs_k0;  // packet wavenumber 3N/4 must be an integer mode
    bool uses_list;
};

const std::vector<ExperimentInfo>& registry() {
    static const std::vector<ExperimentInfo> r = {
        {Experiment::Dispersion, "dispersion", "Dispersion", {"N"}, false, false},
        {Experiment::Packet, "packet", "Packet", {"N"}, true, false},
        {Experiment::Transit, "transit", "Transit", {"N"}, true, false},
        {Experiment::Broadening, "broadening", "Broadening", {}, true, true},
        {Experiment::OverlapDecay, "overlap-decay", "OverlapDecay", {}, true, true},
        {Experiment::ErrorBudget, "error-budget", "ErrorBudget", {"N", "M"}, true, false},
        {Experiment::MinWaitSweep, "min-wait-sweep", "MinWaitSweep", {}, true, true},
        {Experiment::RateFit, "rate-fit", "RateFit", {}, true, true},
        {Experiment::OracleProtocol, "oracle-protocol", "OracleProtocol", {"N", "M"}, false, false},
        {Experiment::OracleBounds, "oracle-bounds", "OracleBounds", {"N", "M"}, false, false},
        {Experiment::TJCheck, "tj-check", "TJCheck", {"N"}, false, false},
    };
    return r;
}

const ExperimentInfo& info(Experiment e) {
    for (const auto& i : registry()) {
        if (i.id == e) return i;
    }
    throw std::logic_error("unregistered experiment");
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

ConfigValue parse_value(const std::string& key, const std::string& raw, ValueType type) {
    switch (type) {
        case ValueType::Int: {
            std::int64_t v = 0;
            const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
            if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size()) {
                throw ConfigError(key, "expected an integer, got '" + raw + "'");
            }
            return v;
        }
        case ValueType::Real: {
            const auto v = parse_real(raw);
            if (!v) throw ConfigError(key, "expected a number, got '" + raw + "'");
            return *v;
        }
        case ValueType::Text:
            return raw;
        case ValueType::RealList: {
            std::vector<double> out;
            std::stringstream ss(raw);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto v = parse_real(trim(item));
                if (!v) throw ConfigError(key, "expected a comma-separated list of numbers, got '" + raw + "'");
                out.push_back(*v);
            }
            if (out.empty()) throw ConfigError(key, "empty list");
            return out;
        }
    }
    throw ConfigError(key, "unsupported type");
}

std::pair<std::string, std::string> split_pair(const std::string& line, const std::string& where) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", where + ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("", where + ": missing key");
    return {key, trim(line.substr(eq + 1))};
}

void check_divisible(const std::string& key, double n) {
    if (n != std::floor(n) || n < 4 || static_cast<std::int64_t>(n) % 4 != 0) {
        throw ConfigError(key, "N=" + format_double(n) +
                                   " must be a multiple of 4 for an experiment using the wavenumber 3N/4");
    }
}

RunConfig finish(std::map<std::string, std::string> raw, std::optional<Experiment> experiment) {
    const auto& schema = config_schema();
    RunConfig cfg;

    if (auto it = raw.find("experiment"); it != raw.end()) {
        const auto parsed = parse_experiment(it->second);
        if (!parsed) throw ConfigError("experiment", "unknown experiment '" + it->second + "'");
        if (experiment && *parsed != *experiment) {
            throw ConfigError("experiment", "file names '" + it->second + "' but '" + experiment_name(*experiment) +
                                                "' was requested");
        }
        experiment = parsed;
        raw.erase(it);
    }
    if (!experiment) throw ConfigError("experiment", "missing required key");
    cfg.experiment = *experiment;
    cfg.values["experiment"] = experiment_name(*experiment);

    for (const auto& [key, text] : raw) {
        const auto spec = schema.find(key);
        if (spec == schema.end()) throw ConfigError(key, "unknown key");
        cfg.values[key] = parse_value(key, text, spec->second.type);
    }

    const ExperimentInfo& ei = info(*experiment);
    for (const auto& key : ei.required) {
        if (!cfg.has(key)) {
            throw ConfigError(key, "missing required key for experiment " + experiment_name(*experiment));
        }
    }
    for (const auto& [key, spec] : schema) {
        if (key == "experiment" || cfg.has(key) || !spec.fallback) continue;
        cfg.values[key] = *spec.fallback;
        cfg.defaulted.push_back(key);
    }

    for (const char* key : {"N", "M", "steps", "samples", "region"}) {
        if (cfg.has(key) && cfg.integer(key) < 1) throw ConfigError(key, "must be positive");
    }
    for (const char* key : {"c", "kappa", "nu"}) {
        if (!(cfg.real(key) > 0.0)) throw ConfigError(key, "must be strictly positive");
    }
    if (!(cfg.real("epsilon") > 0.0 && cfg.real("epsilon") < 1.0)) throw ConfigError("epsilon", "must lie in (0, 1)");

    if (ei.needs_k0 && !cfg.has("k")) {
        if (ei.uses_list) {
            for (double n : cfg.list("N_list")) check_divisible("N_list", n);
        } else {
            check_divisible("N", static_cast<double>(cfg.integer("N")));
        }
    }
    const std::string bg = cfg.text("background");
    if (bg != "same" && bg != "zero" && bg != "one") {
        throw ConfigError("background", "expected same, zero or one, got '" + bg + "'");
    }
    return cfg;
}

}  // namespace

std::string experiment_name(Experiment e) { return info(e).kebab; }

std::optional<Experiment> parse_experiment(const std::string& name) {
    for (const auto& i : registry()) {
        if (name == i.kebab || name == i.camel) return i.id;
    }
    return std::nullopt;
}

const std::vector<Experiment>& all_experiments() {
    static const std::vector<Experiment> all = [] {
        std::vector<Experiment> v;
        for (const auto& i : registry()) v.push_back(i.id);
        return v;
    }();
    return all;
}

const std::map<std::string, KeySpec>& config_schema() {
    using V = ConfigValue;
    static const std::map<std::string, KeySpec> schema = {
        {"experiment", {ValueType::Text, std::nullopt, "experiment name"}},
        {"N", {ValueType::Int, std::nullopt, "ring size"}},
        {"M", {ValueType::Int, V{std::int64_t{4}}, "number of signals"}},
        {"c", {ValueType::Real, V{9.0}, "truncation exponent"}},
        {"kappa", {ValueType::Real, V{1.0}, "momentum cutoff coefficient"}},
        {"nu", {ValueType::Real, V{8.0}, "region size coefficient"}},
        {"epsilon", {ValueType::Real, V{0.01}, "error target"}},
        {"seed", {ValueType::Int, V{std::int64_t{0}}, "seed for random messages and Monte Carlo"}},
        {"output", {ValueType::Text, std::nullopt, "output path"}},
        {"t", {ValueType::Real, std::nullopt, "inter-signal wait"}},
        {"s", {ValueType::Real, std::nullopt, "single evolution time"}},
        {"J", {ValueType::Real, V{1.0}, "density-density coupling"}},
        {"t_hop", {ValueType::Real, V{1.0}, "hopping amplitude of the t-J model"}},
        {"k", {ValueType::Int, std::nullopt, "packet wavenumber override"}},
        {"sigma", {ValueType::Real, std::nullopt, "packet width in sites override"}},
        {"region", {ValueType::Int, std::nullopt, "region size in sites override"}},
        {"lambda", {ValueType::Real, V{1.0}, "error accumulation factor"}},
        {"steps", {ValueType::Int, V{std::int64_t{20}}, "time samples"}},
        {"samples", {ValueType::Int, V{std::int64_t{10000}}, "Monte Carlo samples"}},
        {"background", {ValueType::Text, V{std::string("same")}, "other signals: same, zero or one"}},
        {"N_list", {ValueType::RealList, V{std::vector<double>{256, 512, 1024, 2048, 4096, 8192}}, "sweep sizes"}},
        {"t_list", {ValueType::RealList, V{std::vector<double>{0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5}}, "waits"}},
        {"sigma_list", {ValueType::RealList, V{std::vector<double>{1.0, 1.5}}, "packet widths"}},
        {"s_list", {ValueType::RealList, V{std::vector<double>{0.1, 0.5, 1.0}}, "evolution times"}},
        {"x_list", {ValueType::RealList, V{std::vector<double>{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}}, "t/N^(1/3)"}},
        {"separation_list", {ValueType::RealList, V{std::vector<double>{4.0, 5.0}}, "packet separations in sites"}},
    };
    return schema;
}

std::int64_t RunConfig::integer(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError(key, "not set");
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
    throw ConfigError(key, "not an integer");
}

double RunConfig::real(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError(key, "not set");
    if (const auto* v = std::get_if<double>(&it->second)) return *v;
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*v);
    throw ConfigError(key, "not a number");
}

const std::string& RunConfig::text(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError(key, "not set");
    if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
    throw ConfigError(key, "not text");
}

const std::vector<double>& RunConfig::list(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError(key, "not set");
    if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
    throw ConfigError(key, "not a list");
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       std::optional<Experiment> experiment) {
    std::map<std::string, std::string> raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto [key, value] = split_pair(line, "line " + std::to_string(lineno));
        if (!raw.emplace(key, value).second) {
            throw ConfigError(key, "duplicate key on line " + std::to_string(lineno));
        }
    }
    std::set<std::string> seen;
    for (const auto& o : overrides) {
        auto [key, value] = split_pair(o, "--set");
        if (!seen.insert(key).second) throw ConfigError(key, "duplicate --set override");
        raw[key] = value;
    }
    return finish(std::move(raw), experiment);
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                      std::optional<Experiment> experiment) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides, experiment);
}

RunConfig make_config(Experiment experiment, const std::vector<std::string>& overrides) {
    return parse_config("", overrides, experiment);
}

std::string format_value(const ConfigValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(x);
            } else if constexpr (std::is_same_v<T, double>) {
                return format_double(x);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return x;
            } else {
                std::string s;
                for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + format_double(x[i]);
                return s;
            }
        },
        v);
}

}  // namespace qwire
