#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "xydyn/correlators.hpp"

namespace xydyn {

class InvalidDistribution : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class OptimizerFailure : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bloch angles of the projector pair {P, 1 - P} measured on the second site.
struct MeasurementBasis {
    double theta = 0.0;  // polar, [0, pi]
    double phi = 0.0;    // azimuth, [0, 2pi)
};

/// One branch of a projective measurement on site 2: outcome probability and
/// the post-measurement state of site 1 as a Bloch vector.
struct MeasurementOutcome {
    double probability = 0.0;
    std::array<double, 3> bloch{0.0, 0.0, 0.0};
};

struct OptimizerSettings {
    int coarse_theta = 64;
    int coarse_phi = 32;
    int starts = 4;           // local refinements seeded from the best grid cells
    double objective_tol = 1e-9;
    int max_iterations = 400;
};

struct CorrelationTriple {
    double concurrence = 0.0;
    double discord = 0.0;
    double classical = 0.0;
};

/// Shannon entropy in bits; 0 log 0 reads as 0.
inline double entropy(std::span<const double> probs) {
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0))
            throw InvalidDistribution("probability " + std::to_string(p) + " < 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidDistribution("probabilities sum to " + std::to_string(sum));
    double s = 0.0;
    for (double p : probs)
        if (p > 0.0) s -= p * std::log2(p);
    return s;
}

inline double entropy(std::initializer_list<double> probs) {
    return entropy(std::span<const double>(probs.begin(), probs.size()));
}

namespace detail {

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

// Bloch-picture data of an X state: local z components and the correlation
// matrix restricted to its nonzero pattern (xy block + zz).
struct BlochData {
    double u3, v3;
    double txx, tyy, txy, tyx, tzz;
};

inline BlochData bloch_data(const XState& x) {
    BlochData b;
    b.u3 = x.r11 + x.r22 - x.r33 - x.r44;
    b.v3 = x.r11 - x.r22 + x.r33 - x.r44;
    b.txx = 2.0 * (x.r23.real() + x.r14.real());
    b.tyy = 2.0 * (x.r23.real() - x.r14.real());
    b.txy = -2.0 * x.r14.imag() + 2.0 * x.r23.imag();
    b.tyx = -2.0 * x.r14.imag() - 2.0 * x.r23.imag();
    b.tzz = x.r11 - x.r22 - x.r33 + x.r44;
    return b;
}

}  // namespace detail

/// Concurrence of an X state.
inline double concurrence(const XState& x) {
    const double c1 = std::abs(x.r23) - std::sqrt(std::max(x.r11 * x.r44, 0.0));
    const double c2 = std::abs(x.r14) - std::sqrt(std::max(x.r22 * x.r33, 0.0));
    return 2.0 * std::max({0.0, c1, c2});
}

/// Eigenvalues of an X state from its two 2x2 blocks, clamped to [0, inf).
inline std::array<double, 4> x_spectrum(const XState& x) {
    const double mo = 0.5 * (x.r11 + x.r44);
    const double do_ = std::sqrt(0.25 * (x.r11 - x.r44) * (x.r11 - x.r44) +
                                 std::norm(x.r14));
    const double mi = 0.5 * (x.r22 + x.r33);
    const double di = std::sqrt(0.25 * (x.r22 - x.r33) * (x.r22 - x.r33) +
                                std::norm(x.r23));
    return {std::max(mo + do_, 0.0), std::max(mo - do_, 0.0),
            std::max(mi + di, 0.0), std::max(mi - di, 0.0)};
}

/// I = S(rho1) + S(rho2) - S(rho12), in bits.
inline double mutual_information(const XState& x) {
    const std::array<double, 4> spec = x_spectrum(x);
    const double s12 = entropy(std::span<const double>(spec.data(), 4));
    const double s1 = detail::binary_entropy(x.r11 + x.r22);
    const double s2 = detail::binary_entropy(x.r11 + x.r33);
    return s1 + s2 - s12;
}

/// Apply the projective measurement (theta, phi) on site 2.
inline std::array<MeasurementOutcome, 2> measure_second_site(const XState& x,
                                                             const MeasurementBasis& m) {
    const detail::BlochData b = detail::bloch_data(x);
    const double nx = std::sin(m.theta) * std::cos(m.phi);
    const double ny = std::sin(m.theta) * std::sin(m.phi);
    const double nz = std::cos(m.theta);
    const double tnx = b.txx * nx + b.txy * ny;
    const double tny = b.tyx * nx + b.tyy * ny;
    const double tnz = b.tzz * nz;
    std::array<MeasurementOutcome, 2> out;
    for (int i = 0; i < 2; ++i) {
        const double sgn = i == 0 ? 1.0 : -1.0;
        const double q = 0.5 * (1.0 + sgn * b.v3 * nz);
        out[i].probability = q;
        if (q > 1e-15) {
            const double inv = 1.0 / (2.0 * q);
            out[i].bloch = {sgn * tnx * inv, sgn * tny * inv,
                            (b.u3 + sgn * tnz) * inv};
        }
    }
    return out;
}

/// Measured-conditional-entropy objective S(rho1) - sum_j q_j S(rho1^j);
/// classical correlation is its maximum over bases.
inline double measurement_objective(const XState& x, const MeasurementBasis& m) {
    const detail::BlochData b = detail::bloch_data(x);
    const double s1 = detail::binary_entropy(0.5 * (1.0 + std::abs(b.u3)));
    double cond = 0.0;
    for (const MeasurementOutcome& o : measure_second_site(x, m)) {
        if (o.probability <= 1e-15) continue;
        const double r = std::min(1.0, std::hypot(std::hypot(o.bloch[0], o.bloch[1]),
                                                  o.bloch[2]));
        cond += o.probability * detail::binary_entropy(0.5 * (1.0 + r));
    }
    return s1 - cond;
}

struct ClassicalCorrelation {
    double value = 0.0;
    MeasurementBasis basis;
};

namespace detail {

// Deterministic Nelder-Mead on (theta, phi). The objective extends smoothly
// to all of R^2 through the trig functions, so the walk is unconstrained.
inline bool nelder_mead(const XState& x, MeasurementBasis& best, double& val,
                        double step_theta, double step_phi,
                        const OptimizerSettings& opt) {
    struct Vertex {
        double t, p, f;
    };
    const auto eval = [&](double t, double p) {
        return measurement_objective(x, {t, p});
    };
    std::array<Vertex, 3> simplex{{{best.theta, best.phi, val},
                                   {best.theta + step_theta, best.phi, 0.0},
                                   {best.theta, best.phi + step_phi, 0.0}}};
    simplex[1].f = eval(simplex[1].t, simplex[1].p);
    simplex[2].f = eval(simplex[2].t, simplex[2].p);

    bool converged = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
        if (simplex[0].f - simplex[2].f <= opt.objective_tol) {
            converged = true;
            break;
        }
        const double ct = 0.5 * (simplex[0].t + simplex[1].t);
        const double cp = 0.5 * (simplex[0].p + simplex[1].p);
        const double rt = ct + (ct - simplex[2].t);
        const double rp = cp + (cp - simplex[2].p);
        const double fr = eval(rt, rp);
        if (fr > simplex[0].f) {
            const double et = ct + 2.0 * (ct - simplex[2].t);
            const double ep = cp + 2.0 * (cp - simplex[2].p);
            const double fe = eval(et, ep);
            simplex[2] = fe > fr ? Vertex{et, ep, fe} : Vertex{rt, rp, fr};
        } else if (fr > simplex[1].f) {
            simplex[2] = {rt, rp, fr};
        } else {
            const double kt = ct + 0.5 * (simplex[2].t - ct);
            const double kp = cp + 0.5 * (simplex[2].p - cp);
            const double fk = eval(kt, kp);
            if (fk > simplex[2].f) {
                simplex[2] = {kt, kp, fk};
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].t = 0.5 * (simplex[i].t + simplex[0].t);
                    simplex[i].p = 0.5 * (simplex[i].p + simplex[0].p);
                    simplex[i].f = eval(simplex[i].t, simplex[i].p);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
    if (simplex[0].f > val) {
        val = simplex[0].f;
        best = {simplex[0].t, simplex[0].p};
    }
    return converged;
}

}  // namespace detail

/// Maximize the measured-conditional-entropy objective over projective bases
/// on site 2: coarse grid, then simplex refinement from the leading cells.
inline ClassicalCorrelation classical_correlation(const XState& x,
                                                  const OptimizerSettings& opt = {}) {
    const detail::BlochData b = detail::bloch_data(x);
    const double s1 = detail::binary_entropy(0.5 * (1.0 + std::abs(b.u3)));
    if (s1 == 0.0) return {0.0, {0.0, 0.0}};  // product across site 1, exactly

    const int nt = std::max(2, opt.coarse_theta);
    const int np = std::max(1, opt.coarse_phi);
    std::vector<double> grid(static_cast<std::size_t>(nt) * np);
    for (int i = 0; i < nt; ++i) {
        const double th = M_PI * i / (nt - 1);
        for (int j = 0; j < np; ++j)
            grid[static_cast<std::size_t>(i) * np + j] =
                measurement_objective(x, {th, 2.0 * M_PI * j / np});
    }

    // Seed refinements from the highest grid cells that are local maxima
    // (phi wraps, theta clamps), falling back to the global best cell.
    struct Seed {
        double f;
        int i, j;
    };
    std::vector<Seed> seeds;
    const auto at = [&](int i, int j) {
        return grid[static_cast<std::size_t>(i) * np + ((j % np) + np) % np];
    };
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j) {
            const double f = at(i, j);
            const bool up = i + 1 >= nt || f >= at(i + 1, j);
            const bool dn = i - 1 < 0 || f >= at(i - 1, j);
            if (up && dn && f >= at(i, j + 1) && f >= at(i, j - 1))
                seeds.push_back({f, i, j});
        }
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
        if (a.f != b.f) return a.f > b.f;
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    if (seeds.empty()) {
        const auto it = std::max_element(grid.begin(), grid.end());
        const int idx = static_cast<int>(it - grid.begin());
        seeds.push_back({*it, idx / np, idx % np});
    }
    if (static_cast<int>(seeds.size()) > opt.starts) seeds.resize(opt.starts);

    double best_val = seeds.front().f;
    MeasurementBasis best_basis{M_PI * seeds.front().i / (nt - 1),
                                2.0 * M_PI * seeds.front().j / np};
    bool any_converged = false;
    for (const Seed& s : seeds) {
        MeasurementBasis m{M_PI * s.i / (nt - 1), 2.0 * M_PI * s.j / np};
        double v = s.f;
        const bool ok = detail::nelder_mead(x, m, v, 0.5 * M_PI / (nt - 1),
                                            M_PI / np, opt);
        any_converged = any_converged || ok;
        if (v > best_val) {
            best_val = v;
            best_basis = m;
        }
    }
    if (!any_converged)
        throw OptimizerFailure("measurement optimization did not converge");
    return {std::max(best_val, 0.0), best_basis};
}

/// D = I - C, clamped to 0 when within -1e-9 of it.
inline double discord(const XState& x, const OptimizerSettings& opt = {}) {
    const double d = mutual_information(x) - classical_correlation(x, opt).value;
    if (d < -1e-9)
        throw OptimizerFailure("discord " + std::to_string(d) +
                               " below -1e-9: classical correlation overshoot");
    return std::max(d, 0.0);
}

/// All three measures with a single measurement optimization.
inline CorrelationTriple correlation_triple(const XState& x,
                                            const OptimizerSettings& opt = {}) {
    CorrelationTriple out;
    out.concurrence = concurrence(x);
    out.classical = classical_correlation(x, opt).value;
    const double d = mutual_information(x) - out.classical;
    if (d < -1e-9)
        throw OptimizerFailure("discord " + std::to_string(d) +
                               " below -1e-9: classical correlation overshoot");
    out.discord = std::max(d, 0.0);
    return out;
}

}  // namespace xydyn
