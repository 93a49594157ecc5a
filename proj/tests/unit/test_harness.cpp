#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qwire/config.hpp"
#include "qwire/errors.hpp"
#include "qwire/experiments.hpp"
#include "qwire/table.hpp"

using namespace qwire;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t column(const ResultTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.columns().size(); ++i) {
        if (t.columns()[i] == name) return i;
    }
    throw std::out_of_range(name);
}

}  // namespace

TEST_CASE("experiment names round-trip") {
    CHECK(all_experiments().size() == 11);
    for (Experiment e : all_experiments()) CHECK(parse_experiment(experiment_name(e)) == e);
    CHECK(parse_experiment("OverlapDecay") == Experiment::OverlapDecay);
    CHECK(experiment_name(Experiment::TJCheck) == "tj-check");
    CHECK_FALSE(parse_experiment("warp-drive").has_value());
}

TEST_CASE("config parsing") {
    SUBCASE("file with comments and defaults") {
        const RunConfig cfg = parse_config("experiment = error-budget  # trailing comment\nN = 2048\n\nM=4\n");
        CHECK(cfg.experiment == Experiment::ErrorBudget);
        CHECK(cfg.integer("N") == 2048);
        CHECK(cfg.real("c") == 9.0);
        CHECK(cfg.real("nu") == 8.0);
        CHECK(cfg.real("epsilon") == doctest::Approx(0.01));
        CHECK(cfg.seed() == 0);
        CHECK(std::find(cfg.defaulted.begin(), cfg.defaulted.end(), "c") != cfg.defaulted.end());
        CHECK(std::find(cfg.defaulted.begin(), cfg.defaulted.end(), "N") == cfg.defaulted.end());
    }
    SUBCASE("overrides win over the file") {
        const RunConfig cfg = parse_config("experiment = dispersion\nN = 8\n", {"N=12", "seed=7"});
        CHECK(cfg.integer("N") == 12);
        CHECK(cfg.seed() == 7);
    }
    SUBCASE("lists") {
        const RunConfig cfg = make_config(Experiment::MinWaitSweep, {"N_list=256, 512,1024"});
        CHECK(cfg.list("N_list") == std::vector<double>{256, 512, 1024});
        CHECK(make_config(Experiment::MinWaitSweep).list("N_list").front() == 256.0);
    }
    SUBCASE("requested experiment fills the gap") {
        CHECK(parse_config("N = 8\n", {}, Experiment::Dispersion).experiment == Experiment::Dispersion);
    }
}

TEST_CASE("config errors carry the offending key") {
    auto key_of = [](auto&& fn) -> std::string {
        try {
            fn();
        } catch (const ConfigError& e) {
            return e.key();
        }
        return "<no error>";
    };
    CHECK(key_of([] { parse_config("experiment = dispersion\nN = 8\nN = 12\n"); }) == "N");
    CHECK(key_of([] { parse_config("experiment = dispersion\nN = 8\nwarp = 1\n"); }) == "warp");
    CHECK(key_of([] { parse_config("experiment = dispersion\nN = eight\n"); }) == "N");
    CHECK(key_of([] { parse_config("experiment = dispersion\nN = 2.5\n"); }) == "N");
    CHECK(key_of([] { make_config(Experiment::ErrorBudget, {"N=64"}); }) == "M");
    CHECK(key_of([] { make_config(Experiment::Packet, {"N=66"}); }) == "N");
    CHECK(key_of([] { make_config(Experiment::MinWaitSweep, {"N_list=256,102"}); }) == "N_list");
    CHECK(key_of([] { make_config(Experiment::OracleProtocol, {"N=8", "M=2", "background=maybe"}); }) ==
          "background");
    CHECK(key_of([] { make_config(Experiment::Dispersion, {"N=8", "c=-1"}); }) == "c");
    CHECK(key_of([] { make_config(Experiment::Dispersion, {"N=8", "epsilon=1"}); }) == "epsilon");
    CHECK(key_of([] { make_config(Experiment::Dispersion, {"N=8", "N=9"}); }) == "N");
    CHECK(key_of([] { parse_config("N = 8\n"); }) == "experiment");
    CHECK(key_of([] { parse_config("experiment = packet\n", {}, Experiment::Dispersion); }) == "experiment");
    CHECK(key_of([] { load_config("/nonexistent/qwire.cfg"); }).empty());
    // An explicit wavenumber lifts the divisibility requirement.
    CHECK_NOTHROW(make_config(Experiment::Packet, {"N=66", "k=50"}));
}

TEST_CASE("table formats") {
    ResultTable t({"name", "value", "count"});
    t.add_row({std::string("plain"), 0.1, std::int64_t{3}});
    t.add_row({std::string("a,\"b\""), NAN, std::int64_t{-1}});
    CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);

    const std::string csv = to_csv(t);
    CHECK(csv.rfind("name,value,count\r\n", 0) == 0);
    CHECK(csv.find("plain,0.10000000000000001,3\r\n") != std::string::npos);
    CHECK(csv.find("\"a,\"\"b\"\"\"") != std::string::npos);
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

    t.meta["note"] = "x";
    const auto doc = nlohmann::json::parse(to_json(t));
    CHECK(doc["meta"]["note"] == "x");
    CHECK(doc["columns"]["count"][1] == -1);
    CHECK(doc["columns"]["value"][1].is_null());
    CHECK(doc["columns"]["name"].size() == 2);
}

TEST_CASE("emit writes sidecar files") {
    const auto dir = std::filesystem::temp_directory_path() / "qwire_harness_test";
    std::filesystem::create_directories(dir);
    const ResultTable t = run(make_config(Experiment::Dispersion, {"N=8"}));

    emit(t, (dir / "d.csv").string(), Format::Csv);
    CHECK(slurp(dir / "d.csv") == to_csv(t));
    const auto meta = nlohmann::json::parse(slurp(dir / "d.csv.meta.json"));
    CHECK(meta["experiment"] == "dispersion");
    CHECK(meta["version"] == kArtifactVersion);
    CHECK(meta["config"]["N"] == "8");
    CHECK(nlohmann::json::parse(slurp(dir / "d.csv.timing.json"))["wall_seconds"].get<double>() >= 0.0);

    emit(t, (dir / "d.json").string(), Format::Json);
    CHECK(nlohmann::json::parse(slurp(dir / "d.json"))["meta"]["artifact"] == "qwire");
    CHECK(std::filesystem::exists(dir / "d.json.timing.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("experiment outputs") {
    SUBCASE("dispersion has one row per mode") {
        const ResultTable t = run(make_config(Experiment::Dispersion, {"N=12"}));
        CHECK(t.size() == 12);
        const auto& row = t.rows()[1];  // k = 2
        CHECK(std::get<double>(row[column(t, "omega")]) == doctest::Approx(1.0));
    }
    SUBCASE("meta records defaults") {
        const ResultTable t = run(make_config(Experiment::Dispersion, {"N=12"}));
        const auto defaults = t.meta["defaults_applied"];
        CHECK(std::find(defaults.begin(), defaults.end(), "c") != defaults.end());
        CHECK(t.meta["seed"] == 0);
    }
    SUBCASE("tj-check covers separations and times") {
        const ResultTable t = run(make_config(Experiment::TJCheck, {"N=10"}));
        CHECK(t.size() == 6);
        for (const auto& row : t.rows()) {
            CHECK(std::get<double>(row[column(t, "difference")]) <=
                  std::get<double>(row[column(t, "duhamel_bound")]) + 1e-9);
        }
    }
    SUBCASE("oracle bounds rows") {
        const ResultTable t = run(make_config(Experiment::OracleBounds, {"N=8", "M=2", "t_list=1,2"}));
        CHECK(t.size() == 2 * 2);  // times × widths
    }
    SUBCASE("sweep keeps failing sizes as error rows") {
        const ResultTable t = run(make_config(Experiment::MinWaitSweep, {"N_list=16,512"}));
        REQUIRE(t.size() == 2);
        const auto status = column(t, "status");
        CHECK(std::get<std::string>(t.rows()[0][status]) != "ok");
        CHECK(std::isnan(std::get<double>(t.rows()[0][column(t, "t_star")])));
        CHECK(std::get<std::string>(t.rows()[1][status]) == "ok");
    }
    SUBCASE("rate fit reports too few samples") {
        const ResultTable t = run(make_config(Experiment::RateFit, {"N_list=256,512"}));
        REQUIRE(t.size() == 1);
        CHECK(std::get<std::string>(t.rows()[0][column(t, "status")]) != "ok");
    }
    SUBCASE("failures name the experiment") {
        try {
            run(make_config(Experiment::ErrorBudget, {"N=64", "M=2"}));
            FAIL("expected a planning failure");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).rfind("experiment error-budget:", 0) == 0);
        }
    }
}

TEST_CASE("seeded runs are reproducible") {
    const RunConfig cfg = make_config(Experiment::OracleBounds, {"N=8", "M=2", "t_list=1.5", "seed=42"});
    CHECK(to_csv(run(cfg)) == to_csv(run(cfg)));
    const RunConfig other = make_config(Experiment::OracleBounds, {"N=8", "M=2", "t_list=1.5", "seed=43"});
    CHECK(to_csv(run(cfg)) != to_csv(run(other)));
}
