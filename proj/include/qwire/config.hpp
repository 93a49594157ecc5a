#pragma once

// Flat `key = value` run configuration.
//
// Grammar: one pair per line, `#` starts a comment, blank lines ignored,
// keys are case-sensitive. Values are typed by the key schema below; list
// keys take comma-separated numbers.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qwire {

enum class Experiment {
    Dispersion,
    Packet,
    Transit,
    Broadening,
    OverlapDecay,
    ErrorBudget,
    MinWaitSweep,
    RateFit,
    OracleProtocol,
    OracleBounds,
    TJCheck,
};

/// Kebab-case subcommand name, e.g. "min-wait-sweep".
std::string experiment_name(Experiment e);
/// Accepts the kebab-case name or the CamelCase enum spelling.
std::optional<Experiment> parse_experiment(const std::string& name);
const std::vector<Experiment>& all_experiments();

enum class ValueType { Int, Real, Text, RealList };

using ConfigValue = std::variant<std::int64_t, double, std::string, std::vector<double>>;

struct KeySpec {
    ValueType type;
    std::optional<ConfigValue> fallback;
    std::string help;
};

const std::map<std::string, KeySpec>& config_schema();

class RunConfig {
  public:
    Experiment experiment = Experiment::Dispersion;
    std::map<std::string, ConfigValue> values;  // effective, defaults included
    std::vector<std::string> defaulted;         // keys whose value came from a default

    bool has(const std::string& key) const { return values.count(key) > 0; }
    std::int64_t integer(const std::string& key) const;
    double real(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    const std::vector<double>& list(const std::string& key) const;
    std::int64_t seed() const { return integer("seed"); }
};

/// Parses config text; `overrides` (key=value strings) are applied after the
/// file and may replace file keys. Throws ConfigError naming the key.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       std::optional<Experiment> experiment = std::nullopt);

/// Reads and parses a file; I/O failures raise ConfigError with the path.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {},
                      std::optional<Experiment> experiment = std::nullopt);

/// Builds a config from overrides only.
RunConfig make_config(Experiment experiment, const std::vector<std::string>& overrides = {});

std::string format_value(const ConfigValue& v);

}  // namespace qwire
