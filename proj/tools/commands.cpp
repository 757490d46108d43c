#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fmtio.hpp"
#include "ootune/copula.hpp"
#include "ootune/engine.hpp"
#include "ootune/plant.hpp"
#include "ootune/stopping.hpp"
#include "ootune/success_bound.hpp"

namespace ootune::cli {

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const json& require_field(const json& config, const std::string& field) {
    if (!config.contains(field)) {
        throw ConfigError("missing config field '" + field + "'");
    }
    return config.at(field);
}

template <typename T>
T field_or(const json& config, const std::string& field, T fallback) {
    if (!config.contains(field)) {
        return fallback;
    }
    try {
        return config.at(field).get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config field '" + field + "' has the wrong type");
    }
}

template <typename T>
T field(const json& config, const std::string& field_name) {
    try {
        return require_field(config, field_name).get<T>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("config field '" + field_name +
                          "' has the wrong type");
    }
}

std::string output_path(const json& config, const std::string& suffix) {
    const auto dir = field_or<std::string>(config, "out_dir", ".");
    std::filesystem::create_directories(dir);
    const auto name = field_or<std::string>(
        config, "name", field<std::string>(config, "command"));
    return (std::filesystem::path(dir) / (name + suffix)).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open output file: " + path);
    }
    out << content;
}

std::string csv_preamble(const std::string& schema, const json& config) {
    std::string text;
    text += "# schema: " + schema + "\n";
    text += "# config: " + config.dump() + "\n";
    return text;
}

// ---------------------------------------------------------------------------
// Sources

std::unique_ptr<TestableSource> make_source(const json& source_config,
                                            std::uint64_t seed) {
    const auto type = field<std::string>(source_config, "type");
    if (type == "gaussian") {
        return std::make_unique<CopulaSource>(
            CopulaModel::gaussian(field<double>(source_config, "rho")), seed);
    }
    if (type == "frank") {
        return std::make_unique<CopulaSource>(
            CopulaModel::frank(field<double>(source_config, "lambda")), seed);
    }
    if (type == "plant") {
        const auto scenario =
            field_or<std::string>(source_config, "scenario", "default");
        if (scenario == "default") {
            return std::make_unique<PlantSource>(
                PlantScenario::default_scenario(), seed);
        }
        if (!std::filesystem::exists(scenario)) {
            throw ConfigError("config field 'source.scenario': file '" +
                              scenario + "' does not exist");
        }
        return std::make_unique<PlantSource>(
            PlantScenario::from_json_file(scenario), seed);
    }
    throw ConfigError("config field 'source.type' must be gaussian, frank or "
                      "plant (got '" + type + "')");
}

CopulaModel make_copula(const json& source_config) {
    const auto type = field<std::string>(source_config, "type");
    if (type == "gaussian") {
        return CopulaModel::gaussian(field<double>(source_config, "rho"));
    }
    if (type == "frank") {
        return CopulaModel::frank(field<double>(source_config, "lambda"));
    }
    throw ConfigError(
        "config field 'source.type' must be gaussian or frank here");
}

EngineConfig make_engine_config(const json& config) {
    const json& engine = require_field(config, "engine");
    const auto engine_field = [&](const char* name) {
        if (!engine.contains(name)) {
            throw ConfigError(std::string("missing config field 'engine.") +
                              name + "'");
        }
        try {
            return engine.at(name).get<double>();
        } catch (const std::exception&) {
            throw ConfigError(std::string("config field 'engine.") + name +
                              "' has the wrong type");
        }
    };
    EngineConfig out{};
    out.delta = engine_field("delta");
    out.beta1 = engine_field("beta1");
    out.beta2 = engine_field("beta2");
    out.j_star = engine_field("j_star");
    out.initial_n = field_or<std::int64_t>(engine, "initial_n", 10);
    out.max_n = field_or<std::int64_t>(engine, "max_n", 1000000);
    out.seed = field_or<std::uint64_t>(config, "seed", 1);
    try {
        out.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field 'engine': ") + e.what());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parallel repetition driver; results land in repetition order regardless of
// scheduling.

template <typename Fn>
void run_repetitions(int repetitions, int threads, Fn&& body) {
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
    }
    threads = std::max(1, std::min(threads, repetitions));
    if (threads == 1) {
        for (int rep = 0; rep < repetitions; ++rep) {
            body(rep);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const int rep = next.fetch_add(1);
                if (rep >= repetitions) {
                    return;
                }
                body(rep);
            }
        });
    }
    for (std::thread& worker : pool) {
        worker.join();
    }
}

// ---------------------------------------------------------------------------
// certify / tune

struct RunOutcome {
    std::uint64_t seed = 0;
    StoppingReport report;
    std::int64_t theta_id = -1;
    double test_value = 0.0;
    bool test_success = false;
};

json run_to_json(const RunOutcome& run, int rep, bool tuned) {
    json j;
    j["rep"] = rep;
    j["seed"] = run.seed;
    j["status"] =
        run.report.certified() ? "certified" : "cap-exhausted";
    j["tau"] = run.report.tau;
    j["p_final"] = run.report.p_final;
    j["alpha_hat"] = run.report.alpha_hat;
    j["rho_hat"] = run.report.rho_hat;
    j["alpha_lcb"] = run.report.alpha_lcb;
    j["rho_lcb"] = run.report.rho_lcb;
    j["selected_index"] = run.report.selected_index;
    j["selected_z"] = run.report.selected_z;
    if (tuned) {
        j["theta_id"] = run.theta_id;
        j["test_value"] = run.test_value;
        j["test_success"] = run.test_success;
    }
    return j;
}

std::string trajectory_csv(const json& config, const StoppingReport& report) {
    std::string text = csv_preamble("ootune-trajectory-v1", config);
    text += "n,z,x,alpha_hat,rho_hat,alpha_lcb,rho_lcb,p\n";
    for (const TrajectoryStep& step : report.trajectory) {
        text += format_int(step.n);
        text += ',';
        text += format_double(step.z);
        text += ',';
        text += format_double(step.x);
        text += ',';
        text += format_double(step.alpha_hat);
        text += ',';
        text += format_double(step.rho_hat);
        text += ',';
        text += format_double(step.alpha_lcb);
        text += ',';
        text += format_double(step.rho_lcb);
        text += ',';
        text += format_double(step.p);
        text += '\n';
    }
    return text;
}

std::string aggregate_csv(const json& config,
                          const std::vector<RunOutcome>& runs, bool tuned) {
    std::string text = csv_preamble("ootune-aggregate-v1", config);
    text += "rep,seed,status,tau,p_final,alpha_hat,rho_hat,selected_index,"
            "selected_z";
    if (tuned) {
        text += ",theta_id,test_value,test_success";
    }
    text += '\n';
    for (std::size_t rep = 0; rep < runs.size(); ++rep) {
        const RunOutcome& run = runs[rep];
        text += format_int(static_cast<std::int64_t>(rep));
        text += ',';
        text += format_int(static_cast<std::int64_t>(run.seed));
        text += ',';
        text += run.report.certified() ? "certified" : "cap-exhausted";
        text += ',';
        text += format_int(run.report.tau);
        text += ',';
        text += format_double(run.report.p_final);
        text += ',';
        text += format_double(run.report.alpha_hat);
        text += ',';
        text += format_double(run.report.rho_hat);
        text += ',';
        text += format_int(run.report.selected_index);
        text += ',';
        text += format_double(run.report.selected_z);
        if (tuned) {
            text += ',';
            text += format_int(run.theta_id);
            text += ',';
            text += format_double(run.test_value);
            text += ',';
            text += run.test_success ? "1" : "0";
        }
        text += '\n';
    }
    return text;
}

int run_engine_command(const json& config, bool tuned) {
    const EngineConfig engine = make_engine_config(config);
    const json& source_config = require_field(config, "source");
    const int repetitions = field_or<int>(config, "repetitions", 1);
    if (repetitions < 1) {
        throw ConfigError("config field 'repetitions' must be >= 1");
    }
    const int threads = field_or<int>(config, "threads", 0);
    const auto master_seed = field_or<std::uint64_t>(config, "seed", 1);

    std::vector<RunOutcome> runs(repetitions);
    run_repetitions(repetitions, threads, [&](int rep) {
        RunOutcome& out = runs[rep];
        out.seed = derive_seed(master_seed, static_cast<std::uint64_t>(rep));
        const auto source = make_source(source_config, out.seed);
        if (tuned) {
            TuningResult result = run_tuning(*source, engine);
            out.theta_id = result.theta_id;
            out.report = std::move(result.report);
            out.test_value =
                source->fresh_test(out.theta_id, out.report.selected_z);
            out.test_success = out.test_value <= engine.j_star;
        } else {
            out.report = run_certification(*source, engine);
        }
    });

    if (repetitions == 1) {
        write_file(output_path(config, "_trajectory.csv"),
                   trajectory_csv(config, runs[0].report));
    } else {
        write_file(output_path(config, "_aggregate.csv"),
                   aggregate_csv(config, runs, tuned));
    }

    json summary;
    summary["schema"] = tuned ? "ootune-tune-summary-v1"
                              : "ootune-certify-summary-v1";
    summary["config"] = config;
    json run_list = json::array();
    int certified = 0;
    std::vector<std::int64_t> taus;
    for (std::size_t rep = 0; rep < runs.size(); ++rep) {
        run_list.push_back(run_to_json(runs[rep], static_cast<int>(rep),
                                       tuned));
        certified += runs[rep].report.certified();
        taus.push_back(runs[rep].report.tau);
    }
    std::sort(taus.begin(), taus.end());
    summary["runs"] = run_list;
    summary["certified_runs"] = certified;
    summary["median_tau"] = taus[taus.size() / 2];
    if (tuned) {
        int successes = 0;
        for (const RunOutcome& run : runs) {
            successes += run.test_success;
        }
        summary["test_successes"] = successes;
    }
    write_file(output_path(config, "_summary.json"), summary.dump(2) + "\n");

    return certified == repetitions ? kExitOk : kExitCapExhausted;
}

// ---------------------------------------------------------------------------
// bound-sweep

std::vector<double> parse_grid(const json& grid, const std::string& name) {
    std::vector<double> values;
    if (grid.is_array()) {
        for (const auto& v : grid) {
            values.push_back(v.get<double>());
        }
    } else if (grid.is_object()) {
        const double from = field<double>(grid, "from");
        const double to = field<double>(grid, "to");
        const int points = field<int>(grid, "points");
        const bool log_spaced = field_or<bool>(grid, "log", false);
        if (points < 2 || !(to > from) || (log_spaced && !(from > 0.0))) {
            throw ConfigError("config field '" + name +
                              "' has an invalid range");
        }
        for (int i = 0; i < points; ++i) {
            const double t = static_cast<double>(i) / (points - 1);
            values.push_back(log_spaced
                                 ? from * std::pow(to / from, t)
                                 : from + (to - from) * t);
        }
    } else {
        throw ConfigError("config field '" + name +
                          "' must be an array or a range object");
    }
    if (values.empty()) {
        throw ConfigError("config field '" + name + "' is empty");
    }
    return values;
}

StoppingBoundQuery make_query(const json& config, std::int64_t n,
                              double rho0) {
    return StoppingBoundQuery{n,
                              field<double>(config, "alpha0"),
                              rho0,
                              field<double>(config, "delta"),
                              field<double>(config, "beta1"),
                              field<double>(config, "beta2")};
}

int cmd_bound_sweep_impl(const json& config) {
    const auto mode = field_or<std::string>(config, "mode", "n-sweep");
    std::string text = csv_preamble("ootune-bound-sweep-v1", config);
    json summary;
    summary["schema"] = "ootune-bound-sweep-summary-v1";
    summary["config"] = config;
    summary["mode"] = mode;

    if (mode == "n-sweep") {
        const double rho0 = field<double>(config, "rho0");
        text += "n,bound,omega,alpha_star,rho_star,informative\n";
        for (double n_raw : parse_grid(require_field(config, "n_grid"),
                                       "n_grid")) {
            const auto n = static_cast<std::int64_t>(std::llround(n_raw));
            const StoppingBoundDetail detail =
                optimized_stopping_bound_detail(make_query(config, n, rho0));
            text += format_int(n);
            text += ',';
            if (detail.informative) {
                text += format_double(detail.value);
                text += ',';
                text += format_double(detail.omega);
                text += ',';
                text += format_double(detail.alpha_star);
                text += ',';
                text += format_double(detail.rho_star);
                text += ",1\n";
            } else {
                // Sentinel, never a fabricated zero.
                text += "NA,NA,NA,NA,0\n";
            }
        }
    } else if (mode == "front-trace") {
        const double rho0 = field<double>(config, "rho0");
        const auto n = field<std::int64_t>(config, "n");
        const double omega = field<double>(config, "omega");
        const int points = field_or<int>(config, "trace_points", 200);
        const StoppingBoundQuery query = make_query(config, n, rho0);
        const ParetoCoefficients coeffs =
            pareto_coefficients(OmegaConstants(omega), n,
                                field<double>(config, "delta"));
        const auto interval = front_interval(coeffs, query);
        if (!interval.has_value()) {
            throw ConfigError(
                "front-trace: the feasible interval is empty at this "
                "configuration");
        }
        text += "alpha_star,rho_star,objective,cdf_bound\n";
        for (int i = 0; i < points; ++i) {
            const double alpha = interval->alpha_lo +
                                 (interval->alpha_hi - interval->alpha_lo) *
                                     i / (points - 1);
            const double objective =
                stopping_inner_objective(alpha, coeffs, query);
            const auto rho_star = rho_on_front(alpha, coeffs);
            text += format_double(alpha);
            text += ',';
            text += rho_star ? format_double(*rho_star) : std::string("NA");
            text += ',';
            text += std::isfinite(objective) ? format_double(objective)
                                             : std::string("NA");
            text += ',';
            text += std::isfinite(objective)
                        ? format_double(1.0 - objective)
                        : std::string("NA");
            text += '\n';
        }
        summary["alpha_lo"] = interval->alpha_lo;
        summary["alpha_hi"] = interval->alpha_hi;
    } else if (mode == "rho-sweep") {
        const auto n = field<std::int64_t>(config, "n");
        text += "rho0,bound,informative\n";
        double crossing = -1.0;
        for (double rho0 : parse_grid(require_field(config, "rho_grid"),
                                      "rho_grid")) {
            const auto bound =
                optimized_stopping_bound(make_query(config, n, rho0));
            text += format_double(rho0);
            text += ',';
            if (bound.has_value()) {
                text += format_double(*bound);
                text += ",1\n";
                if (crossing < 0.0 && *bound >= 0.5) {
                    crossing = rho0;
                }
            } else {
                text += "NA,0\n";
            }
        }
        summary["first_rho_with_median_bound"] = crossing;
    } else {
        throw ConfigError("config field 'mode' must be n-sweep, front-trace "
                          "or rho-sweep");
    }

    write_file(output_path(config, "_bound.csv"), text);
    write_file(output_path(config, "_summary.json"), summary.dump(2) + "\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle-compare

int cmd_oracle_compare_impl(const json& config) {
    const auto ns = parse_grid(require_field(config, "n"), "n");
    const auto alphas = parse_grid(require_field(config, "alpha"), "alpha");
    const auto rhos = parse_grid(require_field(config, "rho"), "rho");
    std::vector<double> lambdas;
    if (config.contains("frank_lambda")) {
        lambdas = parse_grid(config.at("frank_lambda"), "frank_lambda");
    }
    const auto trials = field_or<std::int64_t>(config, "mc_trials", 100000);
    const double tolerance = field_or<double>(config, "tolerance", 1e-9);
    const int nu_grid = field_or<int>(config, "nu_grid", 500);
    const auto seed = field_or<std::uint64_t>(config, "seed", 1);

    std::string text = csv_preamble("ootune-oracle-compare-v1", config);
    text +=
        "family,param,n,alpha,bound,quad_oracle,mc_estimate,mc_stderr,nu_hat,"
        "violation\n";
    int violations = 0;
    std::uint64_t row = 0;

    const auto emit = [&](const char* family, double param, std::int64_t n,
                          double alpha, double bound, double quad,
                          const McEstimate& mc, double nu_hat,
                          bool violated) {
        text += family;
        text += ',';
        text += format_double(param);
        text += ',';
        text += format_int(n);
        text += ',';
        text += format_double(alpha);
        text += ',';
        text += format_double(bound);
        text += ',';
        text += format_double(quad);
        text += ',';
        text += format_double(mc.estimate);
        text += ',';
        text += format_double(mc.std_error);
        text += ',';
        text += format_double(nu_hat);
        text += ',';
        text += violated ? "1\n" : "0\n";
        violations += violated;
    };

    for (double n_raw : ns) {
        const auto n = static_cast<std::int64_t>(std::llround(n_raw));
        for (double alpha : alphas) {
            for (double rho : rhos) {
                const CopulaModel model = CopulaModel::gaussian(rho);
                const double bound = p_hat_success(n, alpha, rho).p;
                const double quad = p_success_gaussian_oracle(n, alpha, rho);
                const McEstimate mc = p_success_mc_oracle(
                    model, n, 1, alpha, trials, derive_seed(seed, ++row));
                // Domination of the certified bound plus 3-sigma agreement
                // of the two oracles.
                const bool violated =
                    bound > quad + tolerance ||
                    std::fabs(mc.estimate - quad) > 3.0 * mc.std_error;
                emit("gaussian", rho, n, alpha, bound, quad, mc, 0.0,
                     violated);
            }
            for (double lambda : lambdas) {
                const CopulaModel model = CopulaModel::frank(lambda);
                const double rho_assoc = model.associated().rho;
                const double bound = p_hat_success(n, alpha, rho_assoc).p;
                const double quad =
                    p_success_gaussian_oracle(n, alpha, rho_assoc);
                const McEstimate mc = p_success_mc_oracle(
                    model, n, 1, alpha, trials, derive_seed(seed, ++row));
                const double nu_hat = estimate_nu(model, nu_grid);
                // Associated-Gaussian oracle may exceed the true copula's
                // success probability by at most nu.
                const bool violated =
                    quad - mc.estimate > nu_hat + 3.0 * mc.std_error;
                emit("frank", lambda, n, alpha, bound, quad, mc, nu_hat,
                     violated);
            }
        }
    }

    write_file(output_path(config, "_compare.csv"), text);
    json summary;
    summary["schema"] = "ootune-oracle-compare-summary-v1";
    summary["config"] = config;
    summary["violations"] = violations;
    write_file(output_path(config, "_summary.json"), summary.dump(2) + "\n");
    return violations == 0 ? kExitOk : kExitValidationViolation;
}

// ---------------------------------------------------------------------------
// nu-estimate

int cmd_nu_estimate_impl(const json& config) {
    const CopulaModel model = make_copula(require_field(config, "source"));
    const int grid = field_or<int>(config, "grid", 500);
    const int coarse_grid = std::max(100, grid / 5);
    json summary;
    summary["schema"] = "ootune-nu-estimate-v1";
    summary["config"] = config;
    summary["kendall"] = model.kendall();
    summary["associated_rho"] = model.associated().rho;
    summary["grid"] = grid;
    summary["nu_hat"] = estimate_nu(model, grid);
    summary["coarse_grid"] = coarse_grid;
    summary["nu_hat_coarse"] = estimate_nu(model, coarse_grid);
    write_file(output_path(config, "_summary.json"), summary.dump(2) + "\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// scenario-compare

int cmd_scenario_compare_impl(const json& config) {
    const double epsilon = field<double>(config, "epsilon");
    const double eta = field<double>(config, "eta");
    const auto d = field<std::int64_t>(config, "d");
    const std::int64_t scenario_n = scenario_sample_bound(epsilon, eta, d);

    json summary;
    summary["schema"] = "ootune-scenario-compare-v1";
    summary["config"] = config;
    summary["scenario_samples"] = scenario_n;

    if (config.contains("alpha0")) {
        const double crossing = median_crossing_rho(
            scenario_n, field<double>(config, "alpha0"),
            field<double>(config, "delta"), field<double>(config, "beta1"),
            field<double>(config, "beta2"));
        summary["median_crossing_rho"] = crossing;

        if (config.contains("rho_grid")) {
            std::string text =
                csv_preamble("ootune-scenario-compare-v1", config);
            text += "rho0,bound_at_scenario_n,informative\n";
            for (double rho0 : parse_grid(config.at("rho_grid"),
                                          "rho_grid")) {
                const auto bound = optimized_stopping_bound(
                    make_query(config, scenario_n, rho0));
                text += format_double(rho0);
                text += ',';
                if (bound.has_value()) {
                    text += format_double(*bound);
                    text += ",1\n";
                } else {
                    text += "NA,0\n";
                }
            }
            write_file(output_path(config, "_crossing.csv"), text);
        }
    }

    write_file(output_path(config, "_summary.json"), summary.dump(2) + "\n");
    return kExitOk;
}

int guarded(int (*body)(const json&), const json& config) {
    try {
        return body(config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfigError;
    }
}

}  // namespace

int cmd_certify(const json& config) {
    return guarded([](const json& c) { return run_engine_command(c, false); },
                   config);
}

int cmd_tune(const json& config) {
    return guarded([](const json& c) { return run_engine_command(c, true); },
                   config);
}

int cmd_bound_sweep(const json& config) {
    return guarded(cmd_bound_sweep_impl, config);
}

int cmd_oracle_compare(const json& config) {
    return guarded(cmd_oracle_compare_impl, config);
}

int cmd_nu_estimate(const json& config) {
    return guarded(cmd_nu_estimate_impl, config);
}

int cmd_scenario_compare(const json& config) {
    return guarded(cmd_scenario_compare_impl, config);
}

}  // namespace ootune::cli
