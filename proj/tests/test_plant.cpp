#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ootune/estimation.hpp"
#include "ootune/plant.hpp"

using namespace ootune;

TEST_CASE("spd draw: identity factors give the identity matrix") {
    SpdDraw draw{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3)};
    CHECK((draw.matrix() - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("spd draw spectrum equals the diagonal draws") {
    SplitMix64 rng(4242);
    const SpdDraw draw = sample_spd(4, 1.0, rng);
    const Eigen::MatrixXd q = draw.matrix();
    CHECK((q - q.transpose()).norm() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    Eigen::VectorXd expected = draw.d;
    std::sort(expected.data(), expected.data() + expected.size());
    for (int i = 0; i < 4; ++i) {
        CHECK(eig.eigenvalues()(i) ==
              doctest::Approx(expected(i)).epsilon(1e-9));
        CHECK(eig.eigenvalues()(i) > 0.0);
    }
    // W is orthogonal
    CHECK((draw.W * draw.W.transpose() - Eigen::MatrixXd::Identity(4, 4))
              .norm() <= 1e-12);
}

TEST_CASE("scalar riccati recursion matches the hand recursion") {
    const double a = 0.9;
    const double b = 0.5;
    const double q = 2.0;
    const double r = 0.3;
    Eigen::MatrixXd A(1, 1);
    Eigen::MatrixXd B(1, 1);
    Eigen::MatrixXd Q(1, 1);
    Eigen::MatrixXd R(1, 1);
    A << a;
    B << b;
    Q << q;
    R << r;

    double p = q;
    double k = 0.0;
    for (int step = 0; step < 3; ++step) {
        k = a * b * p / (r + b * b * p);
        p = q + a * a * p - a * p * b * k;
    }
    const Eigen::MatrixXd K = riccati_gain(A, B, Q, R, 3);
    CHECK(K(0, 0) == doctest::Approx(k).epsilon(1e-12));
}

TEST_CASE("sampled controllers are well formed") {
    const PlantScenario scenario = PlantScenario::default_scenario();
    const ControllerSample controller = sample_controller(scenario, 31337);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(controller.Q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(controller.R);
    CHECK(eq.eigenvalues().minCoeff() > 0.0);
    CHECK(er.eigenvalues().minCoeff() > 0.0);
    CHECK(controller.K.allFinite());
    CHECK(controller.K.rows() == scenario.inputs());
    CHECK(controller.K.cols() == scenario.states());
}

TEST_CASE("zero perturbation reproduces the nominal cost exactly") {
    const PlantScenario base = PlantScenario::default_scenario();
    const PlantScenario frozen(base.A, base.B, base.C,
                               Eigen::MatrixXd::Zero(4, 4),
                               Eigen::MatrixXd::Zero(4, 2), base.reference,
                               base.x0);
    const ControllerSample controller = sample_controller(frozen, 5);
    const PairEval eval = evaluate_pair(frozen, controller, 17);
    CHECK(eval.x == eval.z);
}

TEST_CASE("zero reference from the origin stays at equilibrium") {
    const PlantScenario base = PlantScenario::default_scenario();
    const PlantScenario quiet(base.A, base.B, base.C, base.std_A, base.std_B,
                              Eigen::MatrixXd::Zero(2, 50),
                              Eigen::VectorXd::Zero(4));
    const ControllerSample controller = sample_controller(quiet, 5);
    const PairEval eval = evaluate_pair(quiet, controller, 17);
    CHECK(eval.z == 0.0);
    CHECK(eval.x == 0.0);
}

TEST_CASE("evaluation is deterministic and z ignores the perturb seed") {
    const PlantScenario scenario = PlantScenario::default_scenario();
    const ControllerSample controller = sample_controller(scenario, 99);
    const PairEval a = evaluate_pair(scenario, controller, 1);
    const PairEval b = evaluate_pair(scenario, controller, 1);
    const PairEval c = evaluate_pair(scenario, controller, 2);
    CHECK(a.z == b.z);
    CHECK(a.x == b.x);
    CHECK(a.z == c.z);
    CHECK(a.x != c.x);
}

TEST_CASE("unstable reference loop is rejected at construction") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2) * 2.0;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 1);
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(
        PlantScenario(A, B, C, Eigen::MatrixXd::Zero(2, 2),
                      Eigen::MatrixXd::Zero(2, 1),
                      Eigen::MatrixXd::Zero(2, 10), Eigen::VectorXd::Zero(2)),
        std::invalid_argument);
}

TEST_CASE("runaway gains clamp to large finite costs with a diagnostic") {
    const PlantScenario scenario = PlantScenario::default_scenario();
    ControllerSample hostile;
    hostile.Q = Eigen::MatrixXd::Identity(4, 4);
    hostile.R = Eigen::MatrixXd::Identity(2, 2);
    hostile.K = Eigen::MatrixXd::Constant(2, 4, 1e6);
    const PairEval eval = evaluate_pair(scenario, hostile, 3);
    CHECK(std::isfinite(eval.z));
    CHECK(std::isfinite(eval.x));
    CHECK(eval.clamp_events > 0);
}

TEST_CASE("default scenario induces positive kendall correlation") {
    PlantSource source(PlantScenario::default_scenario(), 20260809);
    BivariateSample sample(1e300);
    for (int i = 0; i < 10000; ++i) {
        const auto draw = source.draw();
        sample.push(draw.z, draw.x);
    }
    CHECK(sample.kappa_hat() > 0.0);
    CHECK(sample.kappa_hat() > 0.5);  // strongly informative by design
}

TEST_CASE("scenario json round trip preserves the evaluation") {
    const PlantScenario scenario = PlantScenario::default_scenario();
    const std::string path = "/tmp/ootune_test_scenario.json";
    {
        std::ofstream out(path);
        out << scenario.to_json();
    }
    const PlantScenario loaded = PlantScenario::from_json_file(path);
    const ControllerSample controller = sample_controller(scenario, 7);
    const ControllerSample controller2 = sample_controller(loaded, 7);
    const PairEval a = evaluate_pair(scenario, controller, 13);
    const PairEval b = evaluate_pair(loaded, controller2, 13);
    CHECK(a.z == b.z);
    CHECK(a.x == b.x);
    std::remove(path.c_str());
}

TEST_CASE("scenario csv reference loading") {
    const std::string csv_path = "/tmp/ootune_test_ref.csv";
    {
        std::ofstream out(csv_path);
        out << "# time steps as rows, outputs as columns\n";
        for (int t = 0; t < 30; ++t) {
            out << 0.1 * t << "," << 0.5 << "\n";
        }
    }
    const PlantScenario base = PlantScenario::default_scenario();
    const std::string path = "/tmp/ootune_test_scenario_csv.json";
    {
        std::ofstream out(path);
        out << "{\n"
            << "  \"A\": [[0.9,0.0,0.0,0.0],[0.0,0.9,0.0,0.0],"
               "[0.0,0.0,0.9,0.0],[0.0,0.0,0.0,0.9]],\n"
            << "  \"B\": [[0.5,0.0],[0.4,0.1],[0.0,0.6],[0.2,0.3]],\n"
            << "  \"C\": [[1,0,0,0],[0,0,0,1]],\n"
            << "  \"perturbation\": {\"scale\": 0.02, \"floor\": 0.005},\n"
            << "  \"reference\": {\"csv\": \"" << csv_path << "\"}\n"
            << "}\n";
    }
    const PlantScenario loaded = PlantScenario::from_json_file(path);
    CHECK(loaded.horizon() == 30);
    CHECK(loaded.reference(0, 10) == doctest::Approx(1.0));
    CHECK(loaded.reference(1, 10) == doctest::Approx(0.5));
    (void)base;
    std::remove(path.c_str());
    std::remove(csv_path.c_str());
}

TEST_CASE("config errors name the offending field") {
    const std::string path = "/tmp/ootune_test_bad_scenario.json";
    {
        std::ofstream out(path);
        out << "{\"A\": [[1,0],[0,1]], \"B\": [[1],[1]], \"C\": 3,"
            << " \"perturbation\": {\"scale\": 0.1, \"floor\": 0.01},"
            << " \"reference\": [[0,0,0]]}";
    }
    CHECK_THROWS(PlantScenario::from_json_file(path));
    std::remove(path.c_str());
}
