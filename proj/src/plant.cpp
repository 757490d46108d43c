#include "ootune/plant.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ootune {

namespace {

constexpr double kStateClamp = 1e8;
constexpr int kRiccatiHorizon = 40;
constexpr std::uint64_t kTestStreamTag = 0x7465737424737472ULL;

double spectral_radius(const Eigen::MatrixXd& m) {
    return m.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd gaussian_matrix(std::int64_t rows, std::int64_t cols,
                                SplitMix64& rng) {
    Eigen::MatrixXd m(rows, cols);
    double spare = 0.0;
    bool has_spare = false;
    for (std::int64_t i = 0; i < rows; ++i) {
        for (std::int64_t j = 0; j < cols; ++j) {
            if (has_spare) {
                m(i, j) = spare;
                has_spare = false;
            } else {
                const auto [g1, g2] = rng.normal_pair();
                m(i, j) = g1;
                spare = g2;
                has_spare = true;
            }
        }
    }
    return m;
}

// Closed-loop rollout with state clamping; diverging trajectories yield
// large finite costs instead of overflow.
double rollout_cost(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                    const PlantScenario& scenario,
                    const Eigen::MatrixXd& K,
                    const Eigen::MatrixXd& state_ref, int* clamp_events) {
    Eigen::VectorXd x = scenario.x0;
    double cost = 0.0;
    const std::int64_t T = scenario.horizon();
    for (std::int64_t t = 0; t < T; ++t) {
        const Eigen::VectorXd err =
            scenario.C * x - scenario.reference.col(t);
        cost += err.squaredNorm();
        const Eigen::VectorXd u = -K * (x - state_ref.col(t));
        x = A * x + B * u;
        for (std::int64_t i = 0; i < x.size(); ++i) {
            if (std::abs(x(i)) > kStateClamp) {
                x(i) = x(i) > 0.0 ? kStateClamp : -kStateClamp;
                if (clamp_events != nullptr) {
                    ++(*clamp_events);
                }
            }
        }
    }
    return cost;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::int64_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::int64_t j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j,
                                 const std::string& field) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw std::runtime_error("scenario field '" + field +
                                 "' must be a 2-D array");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) {
            throw std::runtime_error("scenario field '" + field +
                                     "' has ragged rows");
        }
        for (std::size_t k = 0; k < cols; ++k) {
            m(i, k) = j[i][k].get<double>();
        }
    }
    return m;
}

Eigen::MatrixXd reference_from_csv(const std::string& path,
                                   std::int64_t outputs) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open reference csv: " + path);
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        rows.push_back(std::move(row));
    }
    // CSV rows are time steps, columns are outputs.
    Eigen::MatrixXd ref(outputs, static_cast<std::int64_t>(rows.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        if (static_cast<std::int64_t>(rows[t].size()) != outputs) {
            throw std::runtime_error("reference csv row width mismatch");
        }
        for (std::int64_t k = 0; k < outputs; ++k) {
            ref(k, static_cast<std::int64_t>(t)) = rows[t][k];
        }
    }
    return ref;
}

Eigen::MatrixXd perturbation_std(const Eigen::MatrixXd& nominal, double scale,
                                 double floor) {
    return nominal.cwiseAbs().unaryExpr(
        [&](double v) { return std::max(scale * v, floor); });
}

}  // namespace

PlantScenario::PlantScenario(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in,
                             Eigen::MatrixXd C_in, Eigen::MatrixXd std_A_in,
                             Eigen::MatrixXd std_B_in,
                             Eigen::MatrixXd reference_in,
                             Eigen::VectorXd x0_in)
    : A(std::move(A_in)),
      B(std::move(B_in)),
      C(std::move(C_in)),
      std_A(std::move(std_A_in)),
      std_B(std::move(std_B_in)),
      reference(std::move(reference_in)),
      x0(std::move(x0_in)) {
    const auto s = A.rows();
    if (A.cols() != s || B.rows() != s || C.cols() != s || x0.size() != s ||
        std_A.rows() != s || std_A.cols() != s || std_B.rows() != s ||
        std_B.cols() != B.cols() || reference.rows() != C.rows()) {
        throw std::invalid_argument("PlantScenario: inconsistent dimensions");
    }
    if (s < 1 || B.cols() < 1 || C.rows() < 1 || reference.cols() < 1) {
        throw std::invalid_argument("PlantScenario: empty dimension");
    }
    const Eigen::MatrixXd k_ref = riccati_gain(
        A, B, Eigen::MatrixXd::Identity(s, s),
        Eigen::MatrixXd::Identity(B.cols(), B.cols()), kRiccatiHorizon);
    const double radius = spectral_radius(A - B * k_ref);
    if (!(radius < 1.0)) {
        throw std::invalid_argument(
            "PlantScenario: nominal closed loop under the reference gain is "
            "unstable (spectral radius " +
            std::to_string(radius) + ")");
    }
    state_reference =
        C.completeOrthogonalDecomposition().pseudoInverse() * reference;
}

PlantScenario PlantScenario::default_scenario() {
    Eigen::MatrixXd A(4, 4);
    A << 0.96, 0.02, 0.00, 0.01,
         0.03, 0.94, 0.05, 0.00,
         0.00, 0.04, 0.90, 0.02,
         0.01, 0.00, 0.03, 0.92;
    Eigen::MatrixXd B(4, 2);
    B << 0.50, 0.00,
         0.40, 0.10,
         0.00, 0.60,
         0.20, 0.30;
    Eigen::MatrixXd C(2, 4);
    C << 1.0, 0.0, 0.0, 0.0,
         0.0, 0.0, 0.0, 1.0;
    const std::int64_t T = 120;
    Eigen::MatrixXd reference(2, T);
    for (std::int64_t t = 0; t < T; ++t) {
        reference(0, t) = t < 20 ? 0.0 : (t < 70 ? 1.0 : 0.5);
        reference(1, t) = 0.8 * std::sin(2.0 * M_PI * t / 60.0);
    }
    // Perturbation level chosen so that selection on the nominal loop stays
    // informative about perturbed-loop performance deep into the lower tail;
    // at 5% the best-observed controllers are already fragile enough that
    // the induced copula deviates adversely from Gaussian.
    return PlantScenario(A, B, C, perturbation_std(A, 0.02, 0.005),
                         perturbation_std(B, 0.02, 0.005), reference,
                         Eigen::VectorXd::Zero(4));
}

PlantScenario PlantScenario::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scenario file: " + path);
    }
    nlohmann::json j;
    in >> j;
    const Eigen::MatrixXd A = matrix_from_json(j.at("A"), "A");
    const Eigen::MatrixXd B = matrix_from_json(j.at("B"), "B");
    const Eigen::MatrixXd C = matrix_from_json(j.at("C"), "C");

    Eigen::MatrixXd std_A;
    Eigen::MatrixXd std_B;
    if (j.contains("std_A") || j.contains("std_B")) {
        std_A = matrix_from_json(j.at("std_A"), "std_A");
        std_B = matrix_from_json(j.at("std_B"), "std_B");
    } else {
        const auto& pert = j.at("perturbation");
        const double scale = pert.at("scale").get<double>();
        const double floor = pert.at("floor").get<double>();
        std_A = perturbation_std(A, scale, floor);
        std_B = perturbation_std(B, scale, floor);
    }

    Eigen::MatrixXd reference;
    const auto& ref = j.at("reference");
    if (ref.is_object()) {
        reference = reference_from_csv(ref.at("csv").get<std::string>(),
                                       C.rows());
    } else {
        reference = matrix_from_json(ref, "reference");
    }

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(A.rows());
    if (j.contains("x0")) {
        const auto& jx = j.at("x0");
        if (static_cast<std::int64_t>(jx.size()) != A.rows()) {
            throw std::runtime_error("scenario field 'x0' length mismatch");
        }
        for (std::int64_t i = 0; i < A.rows(); ++i) {
            x0(i) = jx[i].get<double>();
        }
    }
    return PlantScenario(A, B, C, std_A, std_B, reference, x0);
}

std::string PlantScenario::to_json() const {
    nlohmann::json j;
    j["A"] = matrix_to_json(A);
    j["B"] = matrix_to_json(B);
    j["C"] = matrix_to_json(C);
    j["std_A"] = matrix_to_json(std_A);
    j["std_B"] = matrix_to_json(std_B);
    j["reference"] = matrix_to_json(reference);
    nlohmann::json jx = nlohmann::json::array();
    for (std::int64_t i = 0; i < x0.size(); ++i) {
        jx.push_back(x0(i));
    }
    j["x0"] = jx;
    return j.dump(2);
}

SpdDraw sample_spd(std::int64_t dim, double rate, SplitMix64& rng) {
    const Eigen::MatrixXd g = gaussian_matrix(dim, dim, rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd w = qr.householderQ();
    const Eigen::MatrixXd r =
        qr.matrixQR().triangularView<Eigen::Upper>();
    // Sign correction makes the distribution Haar over the orthogonal group.
    for (std::int64_t j = 0; j < dim; ++j) {
        if (r(j, j) < 0.0) {
            w.col(j) = -w.col(j);
        }
    }
    Eigen::VectorXd d(dim);
    for (std::int64_t i = 0; i < dim; ++i) {
        d(i) = rng.exponential(rate);
    }
    return SpdDraw{std::move(w), std::move(d)};
}

Eigen::MatrixXd riccati_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                             int horizon) {
    Eigen::MatrixXd P = Q;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(B.cols(), A.rows());
    for (int k = 0; k < horizon; ++k) {
        const Eigen::MatrixXd BtP = B.transpose() * P;
        K = (R + BtP * B).ldlt().solve(BtP * A);
        P = Q + A.transpose() * P * A - A.transpose() * P * B * K;
    }
    return K;
}

ControllerSample sample_controller(const PlantScenario& scenario,
                                   std::uint64_t seed) {
    SplitMix64 rng(seed);
    const SpdDraw q = sample_spd(scenario.states(), 1.0, rng);
    const SpdDraw r = sample_spd(scenario.inputs(), 100.0, rng);
    const Eigen::MatrixXd Q = q.matrix();
    const Eigen::MatrixXd R = r.matrix();
    return ControllerSample{Q, R,
                            riccati_gain(scenario.A, scenario.B, Q, R,
                                         kRiccatiHorizon)};
}

PairEval evaluate_pair(const PlantScenario& scenario,
                       const ControllerSample& controller,
                       std::uint64_t perturb_seed) {
    int clamps = 0;
    const double z = rollout_cost(scenario.A, scenario.B, scenario,
                                  controller.K, scenario.state_reference,
                                  &clamps);

    SplitMix64 rng(perturb_seed);
    Eigen::MatrixXd dA =
        gaussian_matrix(scenario.states(), scenario.states(), rng)
            .cwiseProduct(scenario.std_A);
    Eigen::MatrixXd dB =
        gaussian_matrix(scenario.states(), scenario.inputs(), rng)
            .cwiseProduct(scenario.std_B);
    const double x = rollout_cost(scenario.A + dA, scenario.B + dB, scenario,
                                  controller.K, scenario.state_reference,
                                  &clamps);
    return PairEval{z, x, clamps};
}

PlantSource::PlantSource(PlantScenario scenario, std::uint64_t seed)
    : scenario_(std::move(scenario)), seed_(seed) {}

SampleSource::Draw PlantSource::draw() {
    const std::int64_t id = next_id_++;
    const ControllerSample controller = sample_controller(
        scenario_, derive_seed(seed_, static_cast<std::uint64_t>(2 * id)));
    const PairEval eval = evaluate_pair(
        scenario_, controller,
        derive_seed(seed_, static_cast<std::uint64_t>(2 * id + 1)));
    clamp_events_ += eval.clamp_events;
    return Draw{id, eval.z, eval.x};
}

double PlantSource::fresh_test(std::int64_t id, double /*z*/) {
    const ControllerSample controller = sample_controller(
        scenario_, derive_seed(seed_, static_cast<std::uint64_t>(2 * id)));
    const PairEval eval = evaluate_pair(
        scenario_, controller,
        derive_seed(seed_ ^ kTestStreamTag, static_cast<std::uint64_t>(id)));
    return eval.x;
}

}  // namespace ootune
