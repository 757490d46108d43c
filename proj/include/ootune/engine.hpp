#pragma once

#include <cstdint>
#include <vector>

#include "ootune/copula.hpp"
#include "ootune/estimation.hpp"

namespace ootune {

// Black-box performance source: each draw yields an opaque candidate token
// together with its ordinal score z and test score x. Draws are i.i.d.; the
// same seed must reproduce the same stream.
class SampleSource {
public:
    struct Draw {
        std::int64_t id;
        double z;
        double x;
    };

    virtual ~SampleSource() = default;
    virtual Draw draw() = 0;
};

// Source that can additionally produce an independent fresh test score for
// a previously drawn candidate, used by end-to-end guarantee checks.
class TestableSource : public SampleSource {
public:
    virtual double fresh_test(std::int64_t id, double z) = 0;
};

struct EngineConfig {
    double delta;
    double beta1;
    double beta2;
    double j_star;              // performance threshold on x
    std::int64_t initial_n = 10;
    std::int64_t max_n = 1000000;  // safety cap against hostile sources
    std::uint64_t seed = 0;        // recorded for provenance only

    void validate() const;
};

struct TrajectoryStep {
    std::int64_t n;
    double z;
    double x;
    double alpha_hat;
    double rho_hat;
    double alpha_lcb;
    double rho_lcb;
    double p;

    friend bool operator==(const TrajectoryStep&,
                           const TrajectoryStep&) = default;
};

enum class StopStatus {
    Certified,     // stopped with p >= 1 - delta
    CapExhausted,  // reached max_n without certifying
};

struct StoppingReport {
    StopStatus status;
    std::int64_t tau;  // stopping step, or max_n when the cap was exhausted
    double p_final;
    double alpha_hat;
    double rho_hat;
    double alpha_lcb;
    double rho_lcb;
    std::int64_t selected_index;  // 1-based argmin of z over all draws
    std::int64_t selected_id;
    double selected_z;
    std::vector<TrajectoryStep> trajectory;

    bool certified() const { return status == StopStatus::Certified; }

    friend bool operator==(const StoppingReport&,
                           const StoppingReport&) = default;
};

// Sequential certification loop: draws one pair per step, recomputes the
// point estimates and lower confidence bounds, and stops at the first step
// whose certified success probability reaches 1 - delta. Steps where either
// lower confidence bound is nonpositive, or where no omega is admissible,
// carry p = 0 and sampling continues. The stopping check starts after the
// first draw beyond the initial sample.
StoppingReport run_certification(SampleSource& source,
                                 const EngineConfig& config);

struct TuningResult {
    StoppingReport report;
    std::int64_t theta_id;  // opaque id of the argmin-z candidate
};

// Certification plus retention of the running argmin of z; ties keep the
// earliest candidate.
TuningResult run_tuning(SampleSource& source, const EngineConfig& config);

// Synthetic copula source: z and x are the copula coordinates themselves
// (uniform marginals), so the alpha-quantile threshold equals alpha.
class CopulaSource : public TestableSource {
public:
    CopulaSource(const CopulaModel& model, std::uint64_t seed);

    Draw draw() override;
    double fresh_test(std::int64_t id, double z) override;

private:
    CopulaModel model_;
    SplitMix64 rng_;
    SplitMix64 test_rng_;
    std::int64_t next_id_ = 0;
};

}  // namespace ootune
