// Command-line front end: one subcommand per experiment.
//
//   qwire rate-fit --set M=4 --out fit.csv
//   qwire dispersion --config disp.cfg --format json

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qwire/config.hpp"
#include "qwire/errors.hpp"
#include "qwire/experiments.hpp"
#include "qwire/table.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string out;
    std::string format = "csv";
    std::optional<std::int64_t> seed;
    std::vector<std::string> sets;
};

int execute(qwire::Experiment experiment, const Options& opt) {
    std::vector<std::string> overrides = opt.sets;
    if (opt.seed) overrides.push_back("seed=" + std::to_string(*opt.seed));

    const qwire::RunConfig cfg = opt.config_path.empty()
                                     ? qwire::make_config(experiment, overrides)
                                     : qwire::load_config(opt.config_path, overrides, experiment);
    const qwire::ResultTable table = qwire::run(cfg);
    const qwire::Format format = opt.format == "json" ? qwire::Format::Json : qwire::Format::Csv;

    std::string path = opt.out;
    if (path.empty() && cfg.has("output")) path = cfg.text("output");
    if (path.empty()) {
        std::cout << (format == qwire::Format::Json ? qwire::to_json(table) : qwire::to_csv(table));
    } else {
        qwire::emit(table, path, format);
        std::cerr << "wrote " << table.size() << " rows to " << path << " in " << table.wall_seconds << " s\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fermionic quantum wire simulator and verifier"};
    app.require_subcommand(1);
    app.set_version_flag("--version", qwire::kArtifactVersion);

    Options opt;
    std::map<CLI::App*, qwire::Experiment> commands;
    for (qwire::Experiment e : qwire::all_experiments()) {
        CLI::App* sub = app.add_subcommand(qwire::experiment_name(e), "run the " + qwire::experiment_name(e) +
                                                                          " experiment");
        sub->add_option("--config", opt.config_path, "key = value config file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output path (stdout when omitted)");
        sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", opt.seed, "seed for every random draw");
        sub->add_option("--set", opt.sets, "override a config key, key=value")->take_all();
        commands[sub] = e;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& [sub, e] : commands) {
            if (sub->parsed()) return execute(e, opt);
        }
    } catch (const qwire::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
