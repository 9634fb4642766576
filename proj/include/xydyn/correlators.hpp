#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "xydyn/model.hpp"
#include "xydyn/quadrature.hpp"

namespace xydyn {

class InvalidState : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The five independent two-point functions of the evolved fermions in the
/// polarized initial state. Every other equal-time contraction follows from
/// these by conjugation, anticommutation and translational invariance.
struct ContractionSet {
    double occupation = 1.0;              // <b1+ b1>
    double hop1 = 0.0;                    // <b1+ b2>, real
    std::complex<double> pair1{0.0, 0.0};  // <b1 b2>
    double hop2 = 0.0;                    // <b1+ b3>, real
    std::complex<double> pair2{0.0, 0.0};  // <b1 b3>
};

/// Two-qubit density matrix in X form, basis |uu>, |ud>, |du>, |dd>.
struct XState {
    double r11 = 1.0, r22 = 0.0, r33 = 0.0, r44 = 0.0;
    std::complex<double> r14{0.0, 0.0};  // <uu| rho |dd>
    std::complex<double> r23{0.0, 0.0};  // <ud| rho |du>

    double trace() const { return r11 + r22 + r33 + r44; }
};

namespace detail {

inline constexpr double kClampLimit = 1e-6;  // beyond this an upstream bug is assumed

inline double clamp_population(double p, const char* name) {
    if (p >= 0.0) return p;
    if (p < -kClampLimit)
        throw InvalidState(std::string("population ") + name + " = " +
                           std::to_string(p) + " below tolerance");
    return 0.0;
}

inline std::complex<double> clamp_coherence(std::complex<double> c, double minor,
                                            const char* name) {
    const double mag2 = std::norm(c);
    if (mag2 <= minor) return c;
    if (mag2 - minor > kClampLimit)
        throw InvalidState(std::string("coherence ") + name +
                           " violates positivity beyond tolerance");
    if (minor <= 0.0) return {0.0, 0.0};
    return c * std::sqrt(minor / mag2);
}

}  // namespace detail

/// Clamp sub-tolerance negativity and positivity-minor violations; anything
/// larger raises InvalidState.
inline XState make_x_state(double r11, double r22, double r33, double r44,
                           std::complex<double> r14, std::complex<double> r23) {
    XState x;
    x.r11 = detail::clamp_population(r11, "r11");
    x.r22 = detail::clamp_population(r22, "r22");
    x.r33 = detail::clamp_population(r33, "r33");
    x.r44 = detail::clamp_population(r44, "r44");
    if (std::abs(x.trace() - 1.0) > detail::kClampLimit)
        throw InvalidState("trace deviates from 1 by " +
                           std::to_string(x.trace() - 1.0));
    x.r14 = detail::clamp_coherence(r14, x.r11 * x.r44, "r14");
    x.r23 = detail::clamp_coherence(r23, x.r22 * x.r33, "r23");
    return x;
}

/// Evaluate the five contraction integrals at time t. At t = 0, at zero
/// coupling, and on the gamma = 0 line every integrand is constant in time
/// and the exact static values are returned directly.
inline ContractionSet contractions(const ModelParams& p, double t,
                                   const QuadratureSpec& base = {}) {
    p.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("contractions: t must be >= 0");
    if (t == 0.0 || p.gamma == 0.0 || p.lambda == 0.0) return {};

    QuadratureSpec spec = base;
    spec.oscillation_hint = t * (1.0 + p.lambda);

    const auto occupation_bracket = [&](double k) {
        const double L = dispersion(p, k);
        const double ab = alpha_beta(p, k);
        const double s = std::sin(L * t);
        return 1.0 - 4.0 * ab * ab * s * s;
    };
    const auto pair_bracket = [&](double k) {
        const double L = dispersion(p, k);
        const double ab = alpha_beta(p, k);
        const double b2 = beta_sq(p, k);
        const double s = std::sin(L * t);
        const double c = std::cos(L * t);
        return ab * std::complex<double>(2.0 * s * s * (1.0 - 2.0 * b2),
                                         -2.0 * s * c);
    };

    const auto run = [&](const char* name, auto&& f) {
        try {
            return integrate_halfline_even(f, spec).value;
        } catch (const NoConvergence& e) {
            throw NoConvergence("integral " + std::string(name) + " at lambda=" +
                                std::to_string(p.lambda) + ", gamma=" +
                                std::to_string(p.gamma) + ", t=" + std::to_string(t) +
                                ": " + e.what());
        }
    };

    ContractionSet out;
    out.occupation = run("occupation", [&](double k) { return occupation_bracket(k); });
    out.hop1 = run("hop1", [&](double k) { return std::cos(k) * occupation_bracket(k); });
    out.pair1 = run("pair1", [&](double k) { return std::sin(k) * pair_bracket(k); });
    out.hop2 = run("hop2", [&](double k) { return std::cos(2.0 * k) * occupation_bracket(k); });
    out.pair2 = run("pair2", [&](double k) { return std::sin(2.0 * k) * pair_bracket(k); });
    return out;
}

namespace detail {

inline XState assemble_pair_state(double n, double hop, std::complex<double> pair_amp,
                                  std::complex<double> r41, std::complex<double> r23,
                                  bool enforce_positivity = true) {
    const double r11 = n * n + std::norm(pair_amp) - hop * hop;
    const double r22 = n - r11;
    const double r44 = 1.0 - 2.0 * n + r11;
    if (enforce_positivity)
        return make_x_state(r11, r22, r22, r44, std::conj(r41), r23);
    // comparison-only assembly: populations validated, coherences taken as-is
    XState x;
    x.r11 = clamp_population(r11, "r11");
    x.r22 = clamp_population(r22, "r22");
    x.r33 = x.r22;
    x.r44 = clamp_population(r44, "r44");
    x.r14 = std::conj(r41);
    x.r23 = r23;
    return x;
}

}  // namespace detail

enum class NnnVariant {
    wick_derived,  // default: string correlators expanded by Wick's theorem
    as_printed,    // literal published expressions, kept for comparison
};

/// Adjacent-pair density matrix from a contraction set. Wick's theorem
/// closes the four-point functions over the stored values; the anomalous
/// element is r41 = -pair1 (sign fixed against the finite-ring propagator).
inline XState rho_nn_from(const ContractionSet& c) {
    return detail::assemble_pair_state(c.occupation, c.hop1, c.pair1, -c.pair1,
                                       c.hop1);
}

/// One-apart-pair density matrix from a contraction set. The string through
/// the middle site turns the off-diagonal elements into four-point functions:
///   r23 = hop2 (1 - 2n) + 2 hop1^2 + 2 |pair1|^2
///   r41 = pair2 (2n - 1) - 4 hop1 pair1
/// The as_printed variant replaces the squared hopping term in r23 with a
/// bare linear one; the exact-diagonalization oracle arbitrates between them.
/// That variant is kept for deviation reporting only and may leave the
/// positivity cone, so its coherences skip the clamp.
inline XState rho_nnn_from(const ContractionSet& c,
                           NnnVariant variant = NnnVariant::wick_derived) {
    const double n = c.occupation;
    const double base = c.hop2 * (1.0 - 2.0 * n) + 2.0 * std::norm(c.pair1);
    const bool wick = variant == NnnVariant::wick_derived;
    const double r23 = wick ? base + 2.0 * c.hop1 * c.hop1 : base - 2.0 * c.hop1;
    const std::complex<double> r41 =
        c.pair2 * (2.0 * n - 1.0) - 4.0 * c.hop1 * c.pair1;
    return detail::assemble_pair_state(n, c.hop2, c.pair2, r41, r23, wick);
}

inline XState rho_nn(const ModelParams& p, double t, const QuadratureSpec& spec = {}) {
    return rho_nn_from(contractions(p, t, spec));
}

inline XState rho_nnn(const ModelParams& p, double t, const QuadratureSpec& spec = {},
                      NnnVariant variant = NnnVariant::wick_derived) {
    return rho_nnn_from(contractions(p, t, spec), variant);
}

}  // namespace xydyn
