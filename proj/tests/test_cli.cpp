#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

std::string binary_path() {
    const char* env = std::getenv("OOTUNE_BIN");
    REQUIRE_MESSAGE(env != nullptr, "OOTUNE_BIN must point at the CLI");
    return env;
}

int run_cli(const std::string& args, const std::string& log = "/dev/null") {
    const std::string command =
        binary_path() + " " + args + " >" + log + " 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing file: " << path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_config(const fs::path& path, const nlohmann::json& config) {
    std::ofstream out(path);
    out << config.dump(2);
}

fs::path fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::path("/tmp/ootune_cli_tests") / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

nlohmann::json quick_engine_config() {
    return {
        {"source", {{"type", "gaussian"}, {"rho", 0.95}}},
        {"engine",
         {{"delta", 0.05},
          {"beta1", 0.025},
          {"beta2", 0.025},
          {"j_star", 0.2},
          {"initial_n", 10},
          {"max_n", 20000}}},
        {"seed", 7},
    };
}

}  // namespace

TEST_CASE("repeated runs with identical config produce identical bytes") {
    const fs::path dir = fresh_dir("determinism");
    const fs::path config_path = dir / "config.json";
    write_config(config_path, quick_engine_config());

    const std::string args = "tune --config " + config_path.string() +
                             " --out-dir " + dir.string() + " --name run";
    REQUIRE(run_cli(args) == 0);
    const std::string trajectory1 = slurp(dir / "run_trajectory.csv");
    const std::string summary1 = slurp(dir / "run_summary.json");

    REQUIRE(run_cli(args) == 0);
    CHECK(slurp(dir / "run_trajectory.csv") == trajectory1);
    CHECK(slurp(dir / "run_summary.json") == summary1);
}

TEST_CASE("aggregate studies emit one row per repetition") {
    const fs::path dir = fresh_dir("aggregate");
    const fs::path config_path = dir / "config.json";
    nlohmann::json config = quick_engine_config();
    config["repetitions"] = 3;
    write_config(config_path, config);

    REQUIRE(run_cli("certify --config " + config_path.string() +
                    " --out-dir " + dir.string() + " --name agg") == 0);
    const std::string csv = slurp(dir / "agg_aggregate.csv");
    // 2 preamble comments + header + 3 rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    CHECK(csv.find("# config:") != std::string::npos);
    CHECK(csv.find("certified") != std::string::npos);

    const auto summary =
        nlohmann::json::parse(slurp(dir / "agg_summary.json"));
    CHECK(summary.at("runs").size() == 3);
    CHECK(summary.at("certified_runs").get<int>() == 3);
    CHECK(summary.at("schema").get<std::string>() ==
          "ootune-certify-summary-v1");
}

TEST_CASE("worker-pool row order does not depend on the thread count") {
    const fs::path dir = fresh_dir("threads");
    const fs::path config_path = dir / "config.json";
    nlohmann::json config = quick_engine_config();
    config["repetitions"] = 4;
    write_config(config_path, config);

    REQUIRE(run_cli("certify --config " + config_path.string() +
                    " --out-dir " + dir.string() +
                    " --name one --threads 1") == 0);
    REQUIRE(run_cli("certify --config " + config_path.string() +
                    " --out-dir " + dir.string() +
                    " --name four --threads 4") == 0);
    // Identical rows apart from the embedded config (name/threads differ).
    const auto strip_preamble = [](const std::string& text) {
        return text.substr(text.find("rep,"));
    };
    CHECK(strip_preamble(slurp(dir / "one_aggregate.csv")) ==
          strip_preamble(slurp(dir / "four_aggregate.csv")));
}

TEST_CASE("default output directory comes from the environment") {
    const fs::path dir = fresh_dir("envdir");
    const fs::path config_path = dir / "config.json";
    write_config(config_path, quick_engine_config());
    const std::string command = "OOTUNE_OUT_DIR=" + dir.string() + " " +
                                binary_path() + " certify --config " +
                                config_path.string() +
                                " --name env >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(command.c_str())) == 0);
    CHECK(fs::exists(dir / "env_summary.json"));
}

TEST_CASE("missing config fields exit with the config-error code") {
    const fs::path dir = fresh_dir("config_error");
    const fs::path config_path = dir / "config.json";
    write_config(config_path, {{"source", {{"type", "gaussian"}}}});
    const fs::path log = dir / "log.txt";
    CHECK(run_cli("certify --config " + config_path.string() + " --out-dir " +
                      dir.string(),
                  log.string()) == 2);
    const std::string message = slurp(log);
    CHECK(message.find("engine") != std::string::npos);
}

TEST_CASE("nonexistent scenario files are named in the error") {
    const fs::path dir = fresh_dir("missing_scenario");
    const fs::path config_path = dir / "config.json";
    nlohmann::json config = quick_engine_config();
    config["source"] = {{"type", "plant"},
                        {"scenario", "/tmp/does_not_exist_scenario.json"}};
    write_config(config_path, config);
    const fs::path log = dir / "log.txt";
    CHECK(run_cli("certify --config " + config_path.string() + " --out-dir " +
                      dir.string(),
                  log.string()) == 2);
    CHECK(slurp(log).find("does_not_exist_scenario") != std::string::npos);
}

TEST_CASE("uncertifiable sources exit with the cap-exhausted code") {
    const fs::path dir = fresh_dir("cap");
    const fs::path config_path = dir / "config.json";
    nlohmann::json config = quick_engine_config();
    config["source"] = {{"type", "gaussian"}, {"rho", 0.0}};
    config["engine"]["j_star"] = 0.3;
    config["engine"]["max_n"] = 150;
    write_config(config_path, config);
    CHECK(run_cli("certify --config " + config_path.string() + " --out-dir " +
                  dir.string() + " --name cap") == 3);
    // outputs still written, trajectory carries every step
    const std::string csv = slurp(dir / "cap_trajectory.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3 + 150);
}

TEST_CASE("oracle-compare emits rows and a violation count") {
    const fs::path dir = fresh_dir("oracle");
    const fs::path config_path = dir / "config.json";
    write_config(config_path, {
                                  {"n", {10.0}},
                                  {"alpha", {0.3}},
                                  {"rho", {0.5}},
                                  {"frank_lambda", {5.0}},
                                  {"mc_trials", 20000},
                                  {"nu_grid", 200},
                                  {"seed", 5},
                              });
    REQUIRE(run_cli("oracle-compare --config " + config_path.string() +
                    " --out-dir " + dir.string() + " --name oc") == 0);
    const std::string csv = slurp(dir / "oc_compare.csv");
    CHECK(csv.find("gaussian,") != std::string::npos);
    CHECK(csv.find("frank,") != std::string::npos);
    const auto summary = nlohmann::json::parse(slurp(dir / "oc_summary.json"));
    CHECK(summary.at("violations").get<int>() == 0);
}

TEST_CASE("oracle-compare flags violations with a distinct exit code") {
    const fs::path dir = fresh_dir("oracle_violation");
    const fs::path config_path = dir / "config.json";
    // A negative tolerance turns every domination check into a violation.
    write_config(config_path, {
                                  {"n", {10.0}},
                                  {"alpha", {0.3}},
                                  {"rho", {0.5}},
                                  {"mc_trials", 2000},
                                  {"tolerance", -1.0},
                                  {"seed", 5},
                              });
    CHECK(run_cli("oracle-compare --config " + config_path.string() +
                  " --out-dir " + dir.string() + " --name ov") == 4);
    const auto summary = nlohmann::json::parse(slurp(dir / "ov_summary.json"));
    CHECK(summary.at("violations").get<int>() == 1);
}

TEST_CASE("nu-estimate reports a refinement diagnostic") {
    const fs::path dir = fresh_dir("nu");
    REQUIRE(run_cli("nu-estimate --config /dev/null --out-dir " +
                    dir.string()) == 2);  // /dev/null is empty -> parse error

    const fs::path config_path = dir / "config.json";
    write_config(config_path, {{"source", {{"type", "gaussian"}, {"rho", 0.7}}},
                               {"grid", 120}});
    REQUIRE(run_cli("nu-estimate --config " + config_path.string() +
                    " --out-dir " + dir.string() + " --name nu") == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "nu_summary.json"));
    CHECK(summary.at("nu_hat").get<double>() <= 1e-10);
    CHECK(summary.at("associated_rho").get<double>() ==
          doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("scenario-compare reproduces the sample-count formula") {
    const fs::path dir = fresh_dir("scenario");
    const fs::path config_path = dir / "config.json";
    write_config(config_path, {{"epsilon", 0.0499},
                               {"eta", 0.0001},
                               {"d", 192}});
    REQUIRE(run_cli("scenario-compare --config " + config_path.string() +
                    " --out-dir " + dir.string() + " --name sc") == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "sc_summary.json"));
    CHECK(summary.at("scenario_samples").get<long long>() == 29156);
}

TEST_CASE("scenario-compare emits the crossing table when asked") {
    const fs::path dir = fresh_dir("scenario_crossing");
    const fs::path config_path = dir / "config.json";
    write_config(config_path,
                 {{"epsilon", 0.0499},
                  {"eta", 0.0001},
                  {"d", 192},
                  {"alpha0", 0.07},
                  {"delta", 0.025},
                  {"beta1", 0.0125},
                  {"beta2", 0.0125},
                  {"rho_grid", {0.78, 0.8011, 0.82}}});
    REQUIRE(run_cli("scenario-compare --config " + config_path.string() +
                    " --out-dir " + dir.string() + " --name scx") == 0);
    const auto summary =
        nlohmann::json::parse(slurp(dir / "scx_summary.json"));
    const double crossing =
        summary.at("median_crossing_rho").get<double>();
    CHECK(crossing >= 0.78);
    CHECK(crossing <= 0.82);
    const std::string csv = slurp(dir / "scx_crossing.csv");
    CHECK(csv.find("rho0,bound_at_scenario_n,informative") !=
          std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3 + 3);
}

TEST_CASE("rho-sweep mode tabulates the bound against correlation") {
    const fs::path dir = fresh_dir("rho_sweep");
    const fs::path config_path = dir / "config.json";
    write_config(config_path, {{"alpha0", 0.07},
                               {"delta", 0.025},
                               {"beta1", 0.0125},
                               {"beta2", 0.0125},
                               {"mode", "rho-sweep"},
                               {"n", 29156},
                               {"rho_grid", {0.75, 0.8011, 0.85}}});
    REQUIRE(run_cli("bound-sweep --config " + config_path.string() +
                    " --out-dir " + dir.string() + " --name rs") == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "rs_summary.json"));
    const double first = summary.at("first_rho_with_median_bound").get<double>();
    CHECK(first == doctest::Approx(0.8011));
}

TEST_CASE("bound-sweep emits a monotone bound column with NA sentinels") {
    const fs::path dir = fresh_dir("sweep");
    const fs::path config_path = dir / "config.json";
    write_config(config_path,
                 {{"alpha0", 0.07},
                  {"rho0", 0.9792},
                  {"delta", 0.025},
                  {"beta1", 0.0125},
                  {"beta2", 0.0125},
                  {"mode", "n-sweep"},
                  {"n_grid",
                   {{"from", 500.0}, {"to", 30000.0}, {"points", 8},
                    {"log", true}}}});
    REQUIRE(run_cli("bound-sweep --config " + config_path.string() +
                    " --out-dir " + dir.string() + " --name bs") == 0);
    const std::string csv = slurp(dir / "bs_bound.csv");
    std::istringstream lines(csv);
    std::string line;
    double prev = -2.0;
    bool saw_na = false;
    bool saw_value = false;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0) {
            continue;
        }
        const auto comma = line.find(',');
        const std::string bound = line.substr(comma + 1,
                                              line.find(',', comma + 1) -
                                                  comma - 1);
        if (bound == "NA") {
            saw_na = true;
            continue;
        }
        saw_value = true;
        const double value = std::stod(bound);
        CHECK(value >= prev - 1e-12);
        prev = value;
    }
    CHECK(saw_na);     // small n cannot be informative at these settings
    CHECK(saw_value);  // large n is
}

TEST_CASE("flag-only invocation selects the built-in plant scenario") {
    const fs::path dir = fresh_dir("plant_flags");
    REQUIRE(run_cli("certify --plant default --jstar 31 --delta 0.05 "
                    "--beta1 0.025 --beta2 0.025 --max-n 6000 --seed 3 "
                    "--out-dir " +
                    dir.string() + " --name pf") == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "pf_summary.json"));
    CHECK(summary.at("certified_runs").get<int>() == 1);
    CHECK(summary.at("config").at("source").at("type").get<std::string>() ==
          "plant");
}

TEST_CASE("shipped example configs run as-is") {
    const char* config_dir = std::getenv("OOTUNE_CONFIG_DIR");
    REQUIRE_MESSAGE(config_dir != nullptr,
                    "OOTUNE_CONFIG_DIR must point at configs/");
    const fs::path configs(config_dir);
    const fs::path dir = fresh_dir("shipped");
    CHECK(run_cli("scenario-compare --config " +
                  (configs / "scenario-compare.json").string() +
                  " --out-dir " + dir.string() + " --name sc") == 0);
    CHECK(run_cli("bound-sweep --config " +
                  (configs / "front-trace.json").string() + " --out-dir " +
                  dir.string() + " --name ft") == 0);
    CHECK(fs::exists(dir / "sc_crossing.csv"));
    CHECK(fs::exists(dir / "ft_bound.csv"));
}

TEST_CASE("front-trace mode mirrors the fixed-omega inner objective") {
    const fs::path dir = fresh_dir("trace");
    const fs::path config_path = dir / "config.json";
    write_config(config_path, {{"alpha0", 0.1},
                               {"rho0", 0.8},
                               {"delta", 0.1},
                               {"beta1", 0.05},
                               {"beta2", 0.05},
                               {"mode", "front-trace"},
                               {"n", 7500},
                               {"omega", 0.84},
                               {"trace_points", 50}});
    REQUIRE(run_cli("bound-sweep --config " + config_path.string() +
                    " --out-dir " + dir.string() + " --name ft") == 0);
    const std::string csv = slurp(dir / "ft_bound.csv");
    CHECK(csv.find("alpha_star,rho_star,objective,cdf_bound") !=
          std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3 + 50);
}
