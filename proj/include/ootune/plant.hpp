#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "ootune/engine.hpp"
#include "ootune/rng.hpp"

namespace ootune {

// Nominal discrete-time linear plant plus an entrywise Gaussian perturbation
// law and an output reference trajectory. Immutable after construction;
// construction verifies that the nominal closed loop under a reference gain
// is stable (spectral radius < 1).
struct PlantScenario {
    Eigen::MatrixXd A;        // s x s
    Eigen::MatrixXd B;        // s x u
    Eigen::MatrixXd C;        // o x s
    Eigen::MatrixXd std_A;    // per-entry perturbation std, s x s
    Eigen::MatrixXd std_B;    // per-entry perturbation std, s x u
    Eigen::MatrixXd reference;  // o x T
    Eigen::VectorXd x0;         // s
    Eigen::MatrixXd state_reference;  // s x T, pinv(C) * reference

    PlantScenario(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                  Eigen::MatrixXd std_A, Eigen::MatrixXd std_B,
                  Eigen::MatrixXd reference, Eigen::VectorXd x0);

    std::int64_t states() const { return A.rows(); }
    std::int64_t inputs() const { return B.cols(); }
    std::int64_t outputs() const { return C.rows(); }
    std::int64_t horizon() const { return reference.cols(); }

    // 4-state, 2-input scenario with perturbation std at 2% of each nominal
    // entry's magnitude (floor 0.005).
    static PlantScenario default_scenario();

    static PlantScenario from_json_file(const std::string& path);
    std::string to_json() const;
};

struct ControllerSample {
    Eigen::MatrixXd Q;  // s x s, symmetric positive definite
    Eigen::MatrixXd R;  // u x u, symmetric positive definite
    Eigen::MatrixXd K;  // u x s state-feedback gain
};

// Random symmetric positive definite draw W D W^T with W a Haar orthogonal
// matrix (sign-corrected QR of a standard normal matrix) and D diagonal with
// Exp(rate) entries.
struct SpdDraw {
    Eigen::MatrixXd W;
    Eigen::VectorXd d;

    Eigen::MatrixXd matrix() const {
        return W * d.asDiagonal() * W.transpose();
    }
};

SpdDraw sample_spd(std::int64_t dim, double rate, SplitMix64& rng);

// First-step gain of a finite-horizon Riccati backward recursion of length
// horizon on (A, B, Q, R).
Eigen::MatrixXd riccati_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                             int horizon);

// Q with Exp(1) spectrum, R with Exp(100) spectrum, K from the nominal
// finite-horizon recursion (length 40).
ControllerSample sample_controller(const PlantScenario& scenario,
                                   std::uint64_t seed);

struct PairEval {
    double z;  // squared Frobenius tracking error on the nominal plant
    double x;  // same on a freshly perturbed plant
    int clamp_events;  // diagnostic: state clamps during either rollout
};

// Deterministic given (controller, perturb_seed); z does not depend on the
// perturbation seed.
PairEval evaluate_pair(const PlantScenario& scenario,
                       const ControllerSample& controller,
                       std::uint64_t perturb_seed);

// SampleSource adapter: each draw samples a fresh controller, evaluates the
// nominal and one perturbed closed loop, and reports (z, x). Candidates are
// reproducible from their id, so fresh tests regenerate the controller and
// evaluate it on a new perturbed plant.
class PlantSource : public TestableSource {
public:
    PlantSource(PlantScenario scenario, std::uint64_t seed);

    Draw draw() override;
    double fresh_test(std::int64_t id, double z) override;

    const PlantScenario& scenario() const { return scenario_; }
    std::int64_t clamp_events() const { return clamp_events_; }

private:
    PlantScenario scenario_;
    std::uint64_t seed_;
    std::int64_t next_id_ = 0;
    std::int64_t clamp_events_ = 0;
};

}  // namespace ootune
