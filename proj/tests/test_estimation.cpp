#include <doctest.h>

#include <cmath>
#include <vector>

#include "ootune/copula.hpp"
#include "ootune/estimation.hpp"
#include "ootune/rng.hpp"

using namespace ootune;

namespace {

// Brute-force concordance sum straight from the double-sum definition.
std::int64_t brute_force_s(const std::vector<double>& z,
                           const std::vector<double>& x) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (i == j) {
                continue;
            }
            const double dz = z[i] - z[j];
            const double dx = x[i] - x[j];
            s += ((dx > 0) - (dx < 0)) * ((dz > 0) - (dz < 0));
        }
    }
    return s;
}

}  // namespace

TEST_CASE("perfect concordance and discordance") {
    BivariateSample concordant(10.0);
    concordant.push(1.0, 1.0);
    concordant.push(2.0, 2.0);
    CHECK(concordant.concordance_sum() == 2);
    CHECK(concordant.kappa_hat() == doctest::Approx(1.0));
    CHECK(concordant.rho_hat() == doctest::Approx(1.0));

    BivariateSample discordant(10.0);
    discordant.push(1.0, 2.0);
    discordant.push(2.0, 1.0);
    CHECK(discordant.concordance_sum() == -2);
    CHECK(discordant.kappa_hat() == doctest::Approx(-1.0));
    CHECK(discordant.rho_hat() == 0.0);  // clamped at zero
}

TEST_CASE("incremental S equals brute force on every prefix of 500 pairs") {
    SplitMix64 rng(77);
    BivariateSample sample(0.5);
    std::vector<double> z;
    std::vector<double> x;
    for (int i = 0; i < 500; ++i) {
        // Include occasional exact ties.
        const double zi = std::floor(rng.uniform01() * 100.0) / 100.0;
        const double xi = std::floor(rng.uniform01() * 100.0) / 100.0;
        sample.push(zi, xi);
        z.push_back(zi);
        x.push_back(xi);
        CHECK(sample.concordance_sum() == brute_force_s(z, x));
    }
}

TEST_CASE("alpha hat counts at-or-below the threshold") {
    BivariateSample sample(2.5);
    for (double v : {1.0, 2.0, 3.0, 4.0}) {
        sample.push(v, v);
    }
    CHECK(sample.alpha_hat() == doctest::Approx(0.5));
    CHECK(sample.below_threshold_count() == 2);

    BivariateSample all_below(100.0);
    all_below.push(0.0, 1.0);
    all_below.push(0.0, 2.0);
    CHECK(all_below.alpha_hat() == doctest::Approx(1.0));
}

TEST_CASE("changing the threshold recounts in O(n)") {
    BivariateSample sample(0.0);
    for (double v : {1.0, 2.0, 3.0, 4.0}) {
        sample.push(v, v);
    }
    CHECK(sample.below_threshold_count() == 0);
    sample.set_x_star(3.0);
    CHECK(sample.below_threshold_count() == 3);
    CHECK(sample.x_star() == 3.0);
}

TEST_CASE("alpha hat concentrates at the quantile level") {
    SplitMix64 rng(78);
    const CopulaModel model = CopulaModel::gaussian(0.8);
    BivariateSample sample(0.07);
    for (int i = 0; i < 100000; ++i) {
        const auto [u, v] = model.sample_pair(rng);
        sample.push(u, v);
    }
    CHECK(std::fabs(sample.alpha_hat() - 0.07) <= 0.003);
    CHECK(std::fabs(sample.rho_hat() - 0.8) <= 0.01);
}

TEST_CASE("confidence widths at the reported run size") {
    const ConfidenceWidths w = confidence_widths(2658, 0.0125, 0.0125);
    CHECK(w.b1 == doctest::Approx(std::sqrt(std::log(80.0) / 5316.0))
                      .epsilon(1e-15));
    CHECK(w.b2 ==
          doctest::Approx(M_PI * std::sqrt(std::log(80.0) / 2658.0))
              .epsilon(1e-15));
    CHECK(w.b1 == doctest::Approx(0.0287107819).epsilon(1e-8));
    CHECK(w.b2 == doctest::Approx(0.1275586431).epsilon(1e-8));
}

TEST_CASE("beta = 1 collapses the widths to zero") {
    const ConfidenceWidths w = confidence_widths(100, 1.0, 1.0);
    CHECK(w.b1 == 0.0);
    CHECK(w.b2 == 0.0);

    BivariateSample sample(0.5);
    sample.push(0.1, 0.2);
    sample.push(0.3, 0.4);
    const LowerBounds lb = lower_confidence_bounds(sample, 1.0, 1.0);
    CHECK(lb.alpha_lcb == doctest::Approx(sample.alpha_hat()));
    CHECK(lb.rho_lcb == doctest::Approx(sample.rho_hat()));
}

TEST_CASE("lower confidence bounds may go negative and are left to callers") {
    BivariateSample sample(0.0);
    sample.push(1.0, 2.0);
    sample.push(2.0, 1.0);
    const LowerBounds lb = lower_confidence_bounds(sample, 0.05, 0.05);
    CHECK(lb.alpha_lcb < 0.0);
    CHECK(lb.rho_lcb < 0.0);
}

TEST_CASE("concentration tails stay below the hoeffding/u-statistic bounds") {
    constexpr int kReps = 10000;
    constexpr int kN = 500;
    const double alpha0 = 0.07;
    const double rho0 = 0.8;
    const CopulaModel model = CopulaModel::gaussian(rho0);

    int alpha_hits_02 = 0;
    int alpha_hits_05 = 0;
    int rho_hits_10 = 0;
    int rho_hits_20 = 0;
    int alpha_coverage = 0;
    int rho_coverage = 0;
    const ConfidenceWidths w = confidence_widths(kN, 0.05, 0.05);

    for (int rep = 0; rep < kReps; ++rep) {
        SplitMix64 rng(derive_seed(909, rep));
        BivariateSample sample(alpha0);
        for (int i = 0; i < kN; ++i) {
            const auto [u, v] = model.sample_pair(rng);
            sample.push(u, v);
        }
        const double da = sample.alpha_hat() - alpha0;
        const double dr = sample.rho_hat() - rho0;
        alpha_hits_02 += (da > 0.02);
        alpha_hits_05 += (da > 0.05);
        rho_hits_10 += (dr > 0.1);
        rho_hits_20 += (dr > 0.2);
        alpha_coverage += (alpha0 > sample.alpha_hat() - w.b1);
        rho_coverage += (rho0 > sample.rho_hat() - w.b2);
    }

    const auto freq = [&](int hits) {
        return static_cast<double>(hits) / kReps;
    };
    const auto slack = [&](double bound) {
        return 3.0 * std::sqrt(std::max(bound * (1.0 - bound), 1e-6) / kReps);
    };
    const double bound_a02 = std::exp(-2.0 * kN * 0.02 * 0.02);
    const double bound_a05 = std::exp(-2.0 * kN * 0.05 * 0.05);
    const double bound_r10 =
        std::exp(-(kN / 2) * 2.0 * 0.01 / (M_PI * M_PI));
    const double bound_r20 =
        std::exp(-(kN / 2) * 2.0 * 0.04 / (M_PI * M_PI));
    CHECK(freq(alpha_hits_02) <= bound_a02 + slack(bound_a02));
    CHECK(freq(alpha_hits_05) <= bound_a05 + slack(bound_a05));
    CHECK(freq(rho_hits_10) <= bound_r10 + slack(bound_r10));
    CHECK(freq(rho_hits_20) <= bound_r20 + slack(bound_r20));

    // One-sided coverage at level 1 - beta.
    CHECK(freq(alpha_coverage) >= 0.95 - slack(0.05));
    CHECK(freq(rho_coverage) >= 0.95 - slack(0.05));
}
