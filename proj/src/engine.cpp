#include "ootune/engine.hpp"

#include <stdexcept>

#include "ootune/success_bound.hpp"

namespace ootune {

void EngineConfig::validate() const {
    if (!(delta > 0.0 && delta <= 1.0) || !(beta1 > 0.0 && beta1 <= 1.0) ||
        !(beta2 > 0.0 && beta2 <= 1.0)) {
        throw std::domain_error(
            "EngineConfig: delta, beta1, beta2 must lie in (0, 1]");
    }
    if (!(delta + beta1 + beta2 < 1.0)) {
        throw std::domain_error("EngineConfig: requires delta+beta1+beta2 < 1");
    }
    if (initial_n < 2) {
        throw std::domain_error("EngineConfig: initial_n must be >= 2");
    }
    if (max_n <= initial_n) {
        throw std::domain_error("EngineConfig: max_n must exceed initial_n");
    }
}

namespace {

struct LoopState {
    BivariateSample sample;
    std::vector<TrajectoryStep> trajectory;
    std::int64_t argmin_index = 0;  // 1-based
    std::int64_t argmin_id = 0;
    double argmin_z = 0.0;

    explicit LoopState(double x_star) : sample(x_star) {}
};

// Appends one draw, updates the argmin bookkeeping and records the step.
// Returns the certified p for the step (0 while it cannot certify).
double advance(LoopState& state, const SampleSource::Draw& draw,
               const EngineConfig& config) {
    state.sample.push(draw.z, draw.x);
    const std::int64_t n = state.sample.size();
    if (state.argmin_index == 0 || draw.z < state.argmin_z) {
        state.argmin_index = n;
        state.argmin_id = draw.id;
        state.argmin_z = draw.z;
    }

    double alpha_hat = state.sample.alpha_hat();
    double rho_hat = 0.0;
    double alpha_lcb = 0.0;
    double rho_lcb = 0.0;
    double p = 0.0;
    if (n >= 2) {
        const LowerBounds bounds =
            lower_confidence_bounds(state.sample, config.beta1, config.beta2);
        rho_hat = state.sample.rho_hat();
        alpha_lcb = bounds.alpha_lcb;
        rho_lcb = bounds.rho_lcb;
        // Negative lower confidence bounds mean "cannot certify yet", not an
        // error; the subtraction legitimately goes negative early on.
        if (alpha_lcb > 0.0 && rho_lcb > 0.0) {
            const OptimizedBound bound = p_hat_success(n, alpha_lcb, rho_lcb);
            p = bound.admissible ? bound.p : 0.0;
        }
    }
    state.trajectory.push_back(TrajectoryStep{n, draw.z, draw.x, alpha_hat,
                                              rho_hat, alpha_lcb, rho_lcb, p});
    return p;
}

StoppingReport finish(LoopState&& state, StopStatus status) {
    const TrajectoryStep& last = state.trajectory.back();
    return StoppingReport{status,
                          last.n,
                          last.p,
                          last.alpha_hat,
                          last.rho_hat,
                          last.alpha_lcb,
                          last.rho_lcb,
                          state.argmin_index,
                          state.argmin_id,
                          state.argmin_z,
                          std::move(state.trajectory)};
}

StoppingReport run_loop(SampleSource& source, const EngineConfig& config) {
    config.validate();
    LoopState state(config.j_star);
    for (std::int64_t i = 0; i < config.initial_n; ++i) {
        advance(state, source.draw(), config);
    }
    while (state.sample.size() < config.max_n) {
        const double p = advance(state, source.draw(), config);
        if (p >= 1.0 - config.delta) {
            return finish(std::move(state), StopStatus::Certified);
        }
    }
    return finish(std::move(state), StopStatus::CapExhausted);
}

}  // namespace

StoppingReport run_certification(SampleSource& source,
                                 const EngineConfig& config) {
    return run_loop(source, config);
}

TuningResult run_tuning(SampleSource& source, const EngineConfig& config) {
    StoppingReport report = run_loop(source, config);
    const std::int64_t id = report.selected_id;
    return TuningResult{std::move(report), id};
}

CopulaSource::CopulaSource(const CopulaModel& model, std::uint64_t seed)
    : model_(model),
      rng_(derive_seed(seed, 1)),
      test_rng_(derive_seed(seed, 2)) {}

SampleSource::Draw CopulaSource::draw() {
    const auto [u, v] = model_.sample_pair(rng_);
    return Draw{next_id_++, u, v};
}

double CopulaSource::fresh_test(std::int64_t /*id*/, double z) {
    // A fresh test of a fixed candidate re-realises the plant only, i.e.
    // draws X from the conditional law given the candidate's Z.
    return model_.conditional_quantile(test_rng_.uniform01(), z);
}

}  // namespace ootune
