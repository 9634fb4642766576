#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace xydyn {

/// Post-quench Hamiltonian parameters. The chain starts fully polarized
/// along +z and evolves under the coupling `lambda` and anisotropy `gamma`.
struct ModelParams {
    double lambda = 0.0;  // exchange coupling, >= 0
    double gamma = 1.0;   // anisotropy in [0, 1]; 0 is the XX line

    void validate() const {
        if (!std::isfinite(lambda) || lambda < 0.0)
            throw std::invalid_argument("lambda must be finite and >= 0, got " +
                                        std::to_string(lambda));
        if (!std::isfinite(gamma) || gamma < 0.0 || gamma > 1.0)
            throw std::invalid_argument("gamma must lie in [0, 1], got " +
                                        std::to_string(gamma));
    }
};

/// Quasiparticle energy of mode k: sqrt((1 + l cos k)^2 + l^2 g^2 sin^2 k).
inline double dispersion(const ModelParams& p, double k) {
    const double e = 1.0 + p.lambda * std::cos(k);
    const double x = p.lambda * p.gamma * std::sin(k);
    return std::sqrt(e * e + x * x);
}

namespace detail {
// Below this energy the mode is treated as gapless and the directional
// limit along k is used (reachable only at lambda = 1, k = +-pi, or on
// the gamma = 0 line where the products vanish anyway).
inline constexpr double kGaplessEnergy = 1e-12;
}  // namespace detail

struct ModeData {
    double k;
    double energy;  // >= 0
    double alpha;
    double beta;
};

struct BogoliubovPair {
    double alpha;
    double beta;
};

/// beta_k^2 evaluated through the cancellation-free form (L + e) / (2L).
inline double beta_sq(const ModelParams& p, double k) {
    const double e = 1.0 + p.lambda * std::cos(k);
    const double L = dispersion(p, k);
    if (L <= detail::kGaplessEnergy) return 0.5;
    return (L + e) / (2.0 * L);
}

/// alpha_k * beta_k = g l sin k / (2 L); carries the sign of sin k.
inline double alpha_beta(const ModelParams& p, double k) {
    const double L = dispersion(p, k);
    if (L <= detail::kGaplessEnergy) return std::copysign(0.5, std::sin(k));
    return p.gamma * p.lambda * std::sin(k) / (2.0 * L);
}

/// Rotation coefficients of the quasiparticle transformation. alpha is
/// non-negative; beta carries the sign of sin k (unobservable downstream,
/// every integrand uses the even/odd products).
inline BogoliubovPair bogoliubov(const ModelParams& p, double k) {
    const double e = 1.0 + p.lambda * std::cos(k);
    const double L = dispersion(p, k);
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    if (L <= detail::kGaplessEnergy)
        return {kInvSqrt2, std::copysign(kInvSqrt2, std::sin(k))};
    const double a2 = std::max(0.0, (L - e) / (2.0 * L));
    const double b2 = std::max(0.0, (L + e) / (2.0 * L));
    return {std::sqrt(a2), std::copysign(std::sqrt(b2), std::sin(k))};
}

inline ModeData mode_data(const ModelParams& p, double k) {
    const auto [alpha, beta] = bogoliubov(p, k);
    return {k, dispersion(p, k), alpha, beta};
}

struct ModeEvolution {
    std::complex<double> c;  // c_k(t), |c| <= 1 at each mode
    double d;                // d_k(t), |d| <= 1/2
};

/// Time-evolution coefficients of one fermion mode after the quench:
/// c = exp(i L t) - 2 i beta^2 sin(L t), d = alpha beta sin(L t).
inline ModeEvolution mode_coeffs(const ModelParams& p, double k, double t) {
    if (t < 0.0) throw std::invalid_argument("mode_coeffs: t must be >= 0");
    const double L = dispersion(p, k);
    const double b2 = beta_sq(p, k);
    const double ab = alpha_beta(p, k);
    const double s = std::sin(L * t);
    const double c = std::cos(L * t);
    return {{c, (1.0 - 2.0 * b2) * s}, ab * s};
}

}  // namespace xydyn
