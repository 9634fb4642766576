#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "support/qinfo_oracle.hpp"
#include "xydyn/dynamics.hpp"

using namespace xydyn;

TEST_CASE("series on the XX line is identically zero") {
    const TimeSeries s = time_series({0.5, 0.0}, SitePair::nearest, 5.0, 0.5);
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        CHECK(s.values[i].concurrence == 0.0);
        CHECK(s.values[i].discord == 0.0);
        CHECK(s.values[i].classical == 0.0);
        CHECK(s.states[i].r11 == 1.0);
    }
}

TEST_CASE("every series starts at exactly zero correlations") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> lam(0.0, 2.0), gam(0.1, 1.0);
    for (int i = 0; i < 8; ++i) {
        const ModelParams p{lam(rng), gam(rng)};
        const SitePair pair = i % 2 ? SitePair::nearest : SitePair::next_nearest;
        const TimeSeries s = time_series(p, pair, 0.2, 0.1);
        CHECK(s.values[0].concurrence == 0.0);
        CHECK(s.values[0].discord == 0.0);
        CHECK(s.values[0].classical == 0.0);
        REQUIRE(s.times.size() == 3);
        CHECK(s.times[1] == 0.1);
        CHECK(s.times[2] == 0.2);
    }
}

TEST_CASE("grid points are schedule independent") {
    const ModelParams p{0.8, 1.0};
    const TimeSeries serial = time_series(p, SitePair::nearest, 0.5, 0.1, {}, {},
                                          NnnVariant::wick_derived, 1);
    const TimeSeries pooled = time_series(p, SitePair::nearest, 0.5, 0.1, {}, {},
                                          NnnVariant::wick_derived, 3);
    for (std::size_t i = 0; i < serial.times.size(); ++i) {
        CHECK(serial.values[i].classical == pooled.values[i].classical);
        CHECK(serial.values[i].discord == pooled.values[i].discord);
        CHECK(serial.states[i].r14 == pooled.states[i].r14);
    }
}

TEST_CASE("first local maximum on closed-form series") {
    std::vector<double> sine;
    const double dt = 0.01;
    for (double t = 0.0; t <= 2.0 * M_PI + 1e-12; t += dt)
        sine.push_back(std::sin(t));
    const PeakReport peak = first_local_max(sine, dt);
    REQUIRE(peak.found);
    CHECK(peak.t_star == Catch::Approx(M_PI / 2.0).margin(1e-4));
    CHECK(peak.value == Catch::Approx(1.0).margin(1e-6));

    std::vector<double> rising;
    for (int i = 0; i < 100; ++i) rising.push_back(0.01 * i);
    CHECK_FALSE(first_local_max(rising, dt).found);

    std::vector<double> flat(100, 0.0);
    CHECK_FALSE(first_local_max(flat, dt).found);
}

TEST_CASE("composition matches the direct measure path") {
    const ModelParams p{0.5, 1.0};
    const TimeSeries s = time_series(p, SitePair::nearest, 1.0, 0.5);
    const XState direct = rho_nn(p, 1.0);
    const CorrelationTriple v = correlation_triple(direct);
    CHECK(s.values[2].concurrence == v.concurrence);
    CHECK(s.values[2].classical == v.classical);

    // independent oracles for the same state: never below the dense scan,
    // above it only within the scan's cell-resolution envelope
    const double grid = testsupport::brute_force_classical(direct);
    CHECK(v.classical >= grid - 1e-12);
    CHECK(v.classical - grid <= 1e-3);
    const double info = testsupport::dense_mutual_information(direct);
    CHECK(v.discord == Catch::Approx(info - v.classical).margin(1e-9));
}

TEST_CASE("peak location is stable under grid refinement") {
    const ModelParams p{1.0, 1.0};
    const double coarse_dt = 0.01;
    const TimeSeries s = time_series(p, SitePair::nearest, 4.0, coarse_dt);
    std::vector<double> classical(s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i)
        classical[i] = s.values[i].classical;
    const PeakReport coarse = first_local_max(classical, coarse_dt);
    REQUIRE(coarse.found);

    SECTION("halving dt") {
        const TimeSeries fine = time_series(p, SitePair::nearest, 4.0, 0.005);
        std::vector<double> cfine(fine.values.size());
        for (std::size_t i = 0; i < fine.values.size(); ++i)
            cfine[i] = fine.values[i].classical;
        const PeakReport refined = first_local_max(cfine, 0.005);
        REQUIRE(refined.found);
        CHECK(std::abs(refined.value - coarse.value) < 1e-3);
        CHECK(std::abs(refined.t_star - coarse.t_star) < coarse_dt);
    }

    SECTION("dense re-scan around the peak") {
        const double lo = coarse.t_star - 0.2;
        const double dense_dt = 0.001;
        std::vector<double> window;
        for (int i = 0; i <= 400; ++i) {
            const double t = lo + dense_dt * i;
            window.push_back(classical_correlation(rho_nn(p, t)).value);
        }
        const PeakReport dense = first_local_max(window, dense_dt, 1e-9, lo);
        REQUIRE(dense.found);
        CHECK(std::abs(dense.value - coarse.value) <= 1e-3);
        CHECK(std::abs(dense.t_star - coarse.t_star) <= coarse_dt);
    }
}

TEST_CASE("cmax curve picks the near-critical coupling") {
    const std::vector<double> lambdas{0.6, 0.9, 1.2};
    const CmaxCurve curve = cmax_curve(1.0, lambdas, 6.0, 0.02, {}, {}, 2);
    REQUIRE(curve.any_found);
    for (const CmaxPoint& pt : curve.points) CHECK(pt.peak.found);
    CHECK(curve.lambda_star == 0.9);
    CHECK_THROWS_AS(cmax_curve(0.0, lambdas, 6.0, 0.02), std::invalid_argument);
}

TEST_CASE("boundary classifier jumps near the published coupling") {
    const std::vector<double> lambdas{0.7, 0.8, 0.86, 0.92, 1.0};
    const BoundaryReport report =
        entanglement_boundary(1.0, lambdas, 25.0, 0.02, {}, 2);
    CHECK(report.lambda_b >= 0.80);
    CHECK(report.lambda_b <= 0.92);
    CHECK(report.longest_zero.front() < 1.0);
    CHECK(report.longest_zero.back() > 15.0);
}

TEST_CASE("long-horizon absence holds on both sides far above the boundary") {
    // Direct evaluation: both couplings sit deep in the fast-death phase, so
    // the classifier is large for each (the revival never comes back within
    // the horizon).
    const std::vector<double> lambdas{0.95, 2.0};
    const BoundaryReport report =
        entanglement_boundary(1.0, lambdas, 25.0, 0.02, {}, 2);
    CHECK(report.longest_zero[0] > 15.0);
    CHECK(report.longest_zero[1] > 15.0);
}

TEST_CASE("flat classifier raises Degenerate") {
    const std::vector<double> lambdas{0.7, 0.9, 1.1};
    CHECK_THROWS_AS(entanglement_boundary(0.0, lambdas, 5.0, 0.1),
                    Degenerate);
}

TEST_CASE("next-nearest onset is delayed and dies in a band") {
    const std::vector<double> lambdas{0.5, 0.75, 1.0, 1.3};
    const NnnScan scan = nnn_onset_and_deadband(1.0, lambdas, 25.0, 0.1, {}, 2);
    CHECK(scan.onset[0] == Catch::Approx(1.7).margin(0.1));
    CHECK(scan.onset[0] > 0.0);
    CHECK(std::isfinite(scan.onset[1]));
    CHECK(std::isinf(scan.onset[2]));
    CHECK(std::isinf(scan.onset[3]));
    REQUIRE(scan.dead_bands.size() == 1);
    CHECK(scan.dead_bands[0].first == 1.0);
    CHECK(scan.dead_bands[0].second == 1.3);

    const NnnScan xx = nnn_onset_and_deadband(0.0, lambdas, 5.0, 0.5);
    for (double onset : xx.onset) CHECK(std::isinf(onset));
    REQUIRE(xx.dead_bands.size() == 1);
}

TEST_CASE("all correlations shut down with the coupling") {
    const double t = 1.0;
    CorrelationTriple prev{1e9, 1e9, 1e9};
    for (double lam : {0.05, 0.02, 0.01}) {
        const CorrelationTriple v = correlation_triple(rho_nn({lam, 1.0}, t));
        CHECK(v.concurrence <= prev.concurrence + 1e-12);
        CHECK(v.discord <= prev.discord + 1e-12);
        CHECK(v.classical <= prev.classical + 1e-12);
        prev = v;
    }
    CHECK(prev.classical < 1e-2);

    const CorrelationTriple off = correlation_triple(rho_nn({0.0, 1.0}, t));
    CHECK(off.concurrence == 0.0);
    CHECK(off.discord == 0.0);
    CHECK(off.classical == 0.0);
}
