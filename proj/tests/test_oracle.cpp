#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "xydyn/oracle.hpp"

using namespace xydyn;

TEST_CASE("discrete mode sum: static limits and self-convergence") {
    const ModelParams p{0.9, 1.0};
    const ContractionSet at0 = discrete_k_contractions({1u << 12, p}, 0.0);
    CHECK(at0.occupation == 1.0);
    CHECK(at0.hop1 == 0.0);
    CHECK(std::abs(at0.pair2) == 0.0);

    const ContractionSet half = discrete_k_contractions({1u << 15, p}, 10.0);
    const ContractionSet full = discrete_k_contractions({1u << 16, p}, 10.0);
    CHECK(std::abs(half.occupation - full.occupation) < 1e-9);
    CHECK(std::abs(half.hop1 - full.hop1) < 1e-9);
    CHECK(std::abs(half.pair1 - full.pair1) < 1e-9);
    CHECK(std::abs(half.hop2 - full.hop2) < 1e-9);
    CHECK(std::abs(half.pair2 - full.pair2) < 1e-9);
}

TEST_CASE("ring evolver guards") {
    CHECK_THROWS_AS(RingEvolver({14, {0.5, 1.0}}), DimensionTooLarge);
    CHECK_THROWS_AS(RingEvolver({7, {0.5, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(RingEvolver({2, {0.5, 1.0}}), std::invalid_argument);
    RingEvolver ev({4, {0.5, 1.0}});
    CHECK_THROWS_AS(ev.reduced_pair(-1.0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(ev.reduced_pair(0.0, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(ev.reduced_pair(0.0, 0, 9), std::invalid_argument);
}

TEST_CASE("polarized start on the ring") {
    for (std::size_t n : {8ul, 12ul}) {
        RingEvolver ev({n, {0.7, 0.9}});
        const PairReducedState rho = ev.reduced_pair(0.0, 0, 1);
        CHECK(std::abs(rho.rho(0, 0).real() - 1.0) <= 1e-12);
        CHECK(rho.trace() == Catch::Approx(1.0).margin(1e-12));
        CHECK(rho.max_x_violation() <= 1e-14);
    }
}

TEST_CASE("energy is conserved by both propagation paths") {
    for (std::size_t n : {8ul, 12ul}) {
        RingEvolver ev({n, {1.2, 1.0}});
        const double e0 = ev.energy_expectation(0.0);
        for (double t : {0.3, 0.9, 1.5}) {
            CHECK(ev.energy_expectation(t) == Catch::Approx(e0).margin(1e-9));
        }
    }
}

TEST_CASE("reduced states are physical and X-shaped") {
    RingEvolver ev({10, {0.9, 0.8}});
    for (double t : {0.4, 1.0, 1.3}) {
        for (auto [a, b] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 2}}) {
            const PairReducedState rho = ev.reduced_pair(t, a, b);
            CHECK(rho.trace() == Catch::Approx(1.0).margin(1e-10));
            CHECK(rho.eigenvalues().minCoeff() >= -1e-10);
            CHECK(rho.max_x_violation() <= 1e-10);
            CHECK((rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("ring agrees with the thermodynamic limit inside the light cone") {
    RingEvolver ev({12, {0.5, 1.0}});
    for (double t : {0.5, 1.0, 1.5}) {
        const double dev = ev.reduced_pair(t, 0, 1).deviation(rho_nn({0.5, 1.0}, t));
        CHECK(dev <= 0.02);
    }
}

TEST_CASE("agreement improves with ring size") {
    const ModelParams p{0.5, 1.0};
    const XState limit = rho_nn(p, 1.0);
    std::vector<double> dev;
    for (std::size_t n : {8ul, 10ul, 12ul})
        dev.push_back(ed_evolve({n, p}, 1.0, 0, 1).deviation(limit));
    CHECK(dev[0] > dev[1]);
    CHECK(dev[1] > dev[2]);
    CHECK(dev[2] <= 1e-10);
}

TEST_CASE("arbitration separates the printed coherence from the derived one") {
    std::vector<double> grid;
    for (double t = 0.0; t <= 2.0 + 1e-9; t += 0.25) grid.push_back(t);

    SECTION("on the XX line both variants collapse to the static state") {
        const ArbitrationReport r = arbitration_report({12, {1.2, 0.0}}, grid);
        CHECK(r.max_dev_wick <= 1e-10);
        CHECK(r.max_dev_printed <= 1e-10);
        CHECK(r.max_dev_nn <= 1e-10);
    }

    SECTION("anisotropic quench") {
        const ArbitrationReport r = arbitration_report({12, {1.2, 1.0}}, grid);
        CHECK(r.rows.front().dev_wick <= 1e-12);    // t -> 0
        CHECK(r.rows.front().dev_printed <= 1e-12);
        CHECK(r.max_dev_wick <= 0.03);
        CHECK(r.max_dev_nn <= 0.02);
        CHECK(r.max_dev_printed > 0.1);  // the misprint is far outside noise
        CHECK(r.max_dev_printed > 30.0 * r.max_dev_wick);
    }
}

TEST_CASE("arbitration requires the largest ring") {
    std::vector<double> grid{0.0, 1.0};
    CHECK_THROWS_AS(arbitration_report({10, {1.2, 1.0}}, grid),
                    std::invalid_argument);
}
