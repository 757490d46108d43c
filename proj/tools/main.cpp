// Batch front end: single runs, aggregate studies, bound sweeps and oracle
// comparisons, all driven by a JSON config file with flag overrides and
// reproducible seeds.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"

namespace {

using nlohmann::json;

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string name;
    std::optional<std::uint64_t> seed;
    std::optional<int> repetitions;
    std::optional<int> threads;
};

struct EngineFlags {
    std::optional<double> delta;
    std::optional<double> beta1;
    std::optional<double> beta2;
    std::optional<double> j_star;
    std::optional<std::int64_t> initial_n;
    std::optional<std::int64_t> max_n;
    std::optional<double> rho;
    std::optional<double> lambda;
    std::optional<std::string> plant;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path,
                    "JSON config file; flags override its fields")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", flags.out_dir,
                    "output directory (default: $OOTUNE_OUT_DIR or '.')");
    cmd->add_option("--name", flags.name, "output file prefix");
    cmd->add_option("--seed", flags.seed, "master seed");
    cmd->add_option("--reps", flags.repetitions, "number of repetitions");
    cmd->add_option("--threads", flags.threads,
                    "worker threads (0 = hardware)");
}

void add_engine_flags(CLI::App* cmd, EngineFlags& flags) {
    cmd->add_option("--delta", flags.delta, "certification level delta");
    cmd->add_option("--beta1", flags.beta1, "alpha confidence budget");
    cmd->add_option("--beta2", flags.beta2, "rho confidence budget");
    cmd->add_option("--jstar", flags.j_star, "performance threshold");
    cmd->add_option("--initial-n", flags.initial_n, "initial sample size");
    cmd->add_option("--max-n", flags.max_n, "safety cap on samples");
    cmd->add_option("--rho", flags.rho, "gaussian copula source correlation");
    cmd->add_option("--lambda", flags.lambda, "frank copula source parameter");
    cmd->add_option("--plant", flags.plant,
                    "plant scenario file, or 'default'");
}

int load_config(const CommonFlags& flags, const std::string& command,
                json& config) {
    config = json::object();
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) {
            std::fprintf(stderr, "config error: cannot open '%s'\n",
                         flags.config_path.c_str());
            return ootune::cli::kExitConfigError;
        }
        try {
            in >> config;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return ootune::cli::kExitConfigError;
        }
    }
    config["command"] = command;
    if (!flags.out_dir.empty()) {
        config["out_dir"] = flags.out_dir;
    } else if (!config.contains("out_dir")) {
        const char* env = std::getenv("OOTUNE_OUT_DIR");
        config["out_dir"] = env != nullptr ? env : ".";
    }
    if (!flags.name.empty()) {
        config["name"] = flags.name;
    }
    if (flags.seed) {
        config["seed"] = *flags.seed;
    }
    if (flags.repetitions) {
        config["repetitions"] = *flags.repetitions;
    }
    if (flags.threads) {
        config["threads"] = *flags.threads;
    }
    return ootune::cli::kExitOk;
}

void apply_engine_flags(const EngineFlags& flags, json& config) {
    const auto set = [&](const char* key, const auto& value) {
        if (!config["engine"].is_object()) {
            config["engine"] = json::object();
        }
        config["engine"][key] = value;
    };
    if (flags.delta) set("delta", *flags.delta);
    if (flags.beta1) set("beta1", *flags.beta1);
    if (flags.beta2) set("beta2", *flags.beta2);
    if (flags.j_star) set("j_star", *flags.j_star);
    if (flags.initial_n) set("initial_n", *flags.initial_n);
    if (flags.max_n) set("max_n", *flags.max_n);
    if (flags.rho) {
        config["source"] = {{"type", "gaussian"}, {"rho", *flags.rho}};
    }
    if (flags.lambda) {
        config["source"] = {{"type", "frank"}, {"lambda", *flags.lambda}};
    }
    if (flags.plant) {
        config["source"] = {{"type", "plant"}, {"scenario", *flags.plant}};
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ootune: sequential certification and tuning over black-box "
        "performance samples"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        CommonFlags common;
        EngineFlags engine;
        int (*run)(const json&);
        bool has_engine;
    };

    std::vector<Sub> subs;
    subs.reserve(6);  // option targets are bound by address
    const auto add = [&](const char* name, const char* help,
                         int (*run)(const json&), bool has_engine) {
        subs.push_back(Sub{app.add_subcommand(name, help), {}, {}, run,
                           has_engine});
        Sub& sub = subs.back();
        add_common_flags(sub.cmd, sub.common);
        if (has_engine) {
            add_engine_flags(sub.cmd, sub.engine);
        }
    };

    add("tune", "run the tuning loop and test the selected candidate",
        ootune::cli::cmd_tune, true);
    add("certify", "run the sequential certification loop",
        ootune::cli::cmd_certify, true);
    add("bound-sweep", "evaluate the optimised stopping-time bound",
        ootune::cli::cmd_bound_sweep, false);
    add("oracle-compare",
        "cross-check the certified bound against both oracles",
        ootune::cli::cmd_oracle_compare, false);
    add("nu-estimate", "lattice estimate of the copula deviation",
        ootune::cli::cmd_nu_estimate, false);
    add("scenario-compare",
        "scenario-approach sample count and median-crossing correlation",
        ootune::cli::cmd_scenario_compare, false);

    CLI11_PARSE(app, argc, argv);

    for (Sub& sub : subs) {
        if (!sub.cmd->parsed()) {
            continue;
        }
        json config;
        const int rc = load_config(sub.common, sub.cmd->get_name(), config);
        if (rc != ootune::cli::kExitOk) {
            return rc;
        }
        if (sub.has_engine) {
            apply_engine_flags(sub.engine, config);
        }
        return sub.run(config);
    }
    return ootune::cli::kExitConfigError;
}
