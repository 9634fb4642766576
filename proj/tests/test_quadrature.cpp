#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "xydyn/model.hpp"
#include "xydyn/quadrature.hpp"

using namespace xydyn;

namespace {

// The five shipped integrand families at one parameter point.
struct Integrands {
    ModelParams p;
    double t;

    double bracket(double k) const {
        const double L = dispersion(p, k);
        const double ab = alpha_beta(p, k);
        const double s = std::sin(L * t);
        return 1.0 - 4.0 * ab * ab * s * s;
    }
    std::complex<double> pair(double k, int m) const {
        const double L = dispersion(p, k);
        const double ab = alpha_beta(p, k);
        const double b2 = beta_sq(p, k);
        const double s = std::sin(L * t);
        const double c = std::cos(L * t);
        return std::sin(m * k) * ab *
               std::complex<double>(2.0 * s * s * (1.0 - 2.0 * b2), -2.0 * s * c);
    }
};

}  // namespace

TEST_CASE("closed-form means") {
    CHECK(integrate_periodic([](double) { return 1.0; }).value ==
          Catch::Approx(1.0).margin(1e-15));
    CHECK(std::abs(integrate_periodic([](double k) { return std::cos(k); }).value) <=
          1e-13);
    CHECK(integrate_periodic([](double k) { return std::cos(k) * std::cos(k); }).value ==
          Catch::Approx(0.5).margin(1e-13));
}

TEST_CASE("half-line means of even integrands") {
    CHECK(std::abs(integrate_halfline_even([](double k) { return std::cos(2.0 * k); })
                       .value) <= 1e-13);
    CHECK(integrate_halfline_even([](double k) { return std::abs(std::sin(k)); }).value ==
          Catch::Approx(2.0 / M_PI).margin(1e-12));
    // static limit of the occupation integrand
    Integrands f{{0.7, 0.9}, 0.0};
    CHECK(integrate_halfline_even([&](double k) { return f.bracket(k); }).value ==
          Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("spec validation") {
    QuadratureSpec s;
    s.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate_periodic([](double) { return 1.0; }, s),
                    std::invalid_argument);
    s = {};
    s.min_panels = 1;
    CHECK_THROWS_AS(integrate_periodic([](double) { return 1.0; }, s),
                    std::invalid_argument);
    s = {};
    s.max_panels = 8;
    s.min_panels = 16;
    CHECK_THROWS_AS(integrate_periodic([](double) { return 1.0; }, s),
                    std::invalid_argument);
}

TEST_CASE("non-convergence is reported, not swallowed") {
    QuadratureSpec s;
    s.rel_tol = 1e-14;
    s.abs_tol = 1e-16;
    s.min_panels = 8;
    s.max_panels = 64;
    // k^2 is not periodic over the window, so the midpoint rule converges
    // only quadratically and cannot reach the tolerance within 64 panels.
    CHECK_THROWS_AS(integrate_periodic([](double k) { return k * k; }, s),
                    NoConvergence);
}

TEST_CASE("oscillation hint raises the starting resolution") {
    QuadratureSpec s;
    s.oscillation_hint = 100.0;
    const auto res = integrate_periodic([](double) { return 1.0; }, s);
    CHECK(res.panels_used >= 2 * 64 * 101);
}

TEST_CASE("kinked dispersion at lambda = 1 still converges") {
    for (double t : {10.0, 25.0, 50.0}) {
        Integrands f{{1.0, 1.0}, t};
        QuadratureSpec s;
        s.oscillation_hint = 2.0 * t;
        const auto res =
            integrate_halfline_even([&](double k) { return f.pair(k, 1); }, s);
        CHECK(res.panels_used <= s.max_panels);
        CHECK(std::isfinite(res.value.real()));
        CHECK(std::isfinite(res.value.imag()));
    }
}

TEST_CASE("half-line and full-line paths agree on the shipped integrands") {
    std::mt19937_64 rng(321);
    std::uniform_real_distribution<double> lam(0.0, 2.0), gam(0.05, 1.0),
        tm(0.0, 25.0);
    for (int i = 0; i < 30; ++i) {
        Integrands f{{lam(rng), gam(rng)}, tm(rng)};
        QuadratureSpec s;
        s.oscillation_hint = f.t * (1.0 + f.p.lambda);
        const double full =
            integrate_periodic([&](double k) { return f.bracket(k); }, s).value;
        const double half =
            integrate_halfline_even([&](double k) { return f.bracket(k); }, s).value;
        CHECK(std::abs(full - half) <= 1e-12);
        const std::complex<double> pf =
            integrate_periodic([&](double k) { return f.pair(k, 2); }, s).value;
        const std::complex<double> ph =
            integrate_halfline_even([&](double k) { return f.pair(k, 2); }, s).value;
        CHECK(std::abs(pf - ph) <= 1e-12);
    }
}

TEST_CASE("error estimate covers one more doubling") {
    std::mt19937_64 rng(654);
    std::uniform_real_distribution<double> lam(0.0, 2.0), gam(0.05, 1.0),
        tm(0.5, 25.0);
    for (int i = 0; i < 20; ++i) {
        Integrands f{{lam(rng), gam(rng)}, tm(rng)};
        QuadratureSpec s;
        s.oscillation_hint = f.t * (1.0 + f.p.lambda);
        const auto res =
            integrate_halfline_even([&](double k) { return f.bracket(k); }, s);
        const double again = detail::midpoint_mean(
            [&](double k) { return f.bracket(k); }, 0.0, M_PI, 2 * res.panels_used);
        CHECK(std::abs(again - res.value) <= res.err_estimate);
        CHECK(res.err_estimate >= 0.0);
    }
}
