#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "xydyn/correlators.hpp"
#include "xydyn/parallel.hpp"
#include "xydyn/qinfo.hpp"

namespace xydyn {

class Degenerate : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SitePair { nearest, next_nearest };

// Concurrence below this is classified as exactly zero; the X-state formula
// returns a hard 0 through its max, so the threshold only guards roundoff.
inline constexpr double kZeroConcurrence = 1e-12;

namespace detail {

inline std::vector<double> uniform_grid(double tmax, double dt) {
    if (!(tmax > 0.0)) throw std::invalid_argument("tmax must be > 0");
    if (!(dt > 0.0) || dt > tmax)
        throw std::invalid_argument("dt must satisfy 0 < dt <= tmax");
    const auto count = static_cast<std::size_t>(std::floor(tmax / dt + 1e-9)) + 1;
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i) t[i] = static_cast<double>(i) * dt;
    return t;
}

inline XState pair_state(const ModelParams& p, SitePair pair, double t,
                         const QuadratureSpec& spec, NnnVariant variant) {
    return pair == SitePair::nearest ? rho_nn(p, t, spec)
                                     : rho_nnn(p, t, spec, variant);
}

}  // namespace detail

struct TimeSeries {
    ModelParams params;
    SitePair pair = SitePair::nearest;
    NnnVariant variant = NnnVariant::wick_derived;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<XState> states;
    std::vector<CorrelationTriple> values;
};

/// Correlation measures on the uniform grid [0, tmax]. Grid points are
/// independent; `workers` threads fill the output by index.
inline TimeSeries time_series(const ModelParams& params, SitePair pair, double tmax,
                              double dt, const QuadratureSpec& spec = {},
                              const OptimizerSettings& opt = {},
                              NnnVariant variant = NnnVariant::wick_derived,
                              int workers = 1) {
    params.validate();
    TimeSeries s;
    s.params = params;
    s.pair = pair;
    s.variant = variant;
    s.dt = dt;
    s.times = detail::uniform_grid(tmax, dt);
    s.states.resize(s.times.size());
    s.values.resize(s.times.size());
    parallel_for_index(s.times.size(), workers, [&](std::size_t i) {
        s.states[i] = detail::pair_state(params, pair, s.times[i], spec, variant);
        s.values[i] = correlation_triple(s.states[i], opt);
    });
    return s;
}

struct PeakReport {
    bool found = false;
    double t_star = 0.0;
    double value = 0.0;
};

/// First interior grid maximum with prominence over the running minimum,
/// refined by a 3-point parabola.
inline PeakReport first_local_max(std::span<const double> values, double dt,
                                  double prominence = 1e-6, double t0 = 0.0) {
    if (values.size() < 3 || !(dt > 0.0)) return {};
    double run_min = values[0];
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        run_min = std::min(run_min, values[i - 1]);
        if (values[i] > values[i - 1] && values[i] > values[i + 1] &&
            values[i] - run_min >= prominence) {
            const double den = values[i - 1] - 2.0 * values[i] + values[i + 1];
            double off = 0.0, peak = values[i];
            if (den < 0.0) {
                const double slope = values[i - 1] - values[i + 1];
                off = 0.5 * slope / den;
                peak = values[i] - slope * slope / (8.0 * den);
            }
            return {true, t0 + (static_cast<double>(i) + off) * dt, peak};
        }
    }
    return {};
}

struct CmaxPoint {
    double lambda = 0.0;
    PeakReport peak;
};

struct CmaxCurve {
    std::vector<CmaxPoint> points;
    bool any_found = false;
    double lambda_star = std::numeric_limits<double>::quiet_NaN();
    double cmax_star = 0.0;
};

/// First-local-maximum of nearest-neighbor classical correlation per lambda,
/// and the location of its maximum over the grid. Per-lambda peak failures
/// are recorded in the points, not fatal.
inline CmaxCurve cmax_curve(double gamma, std::span<const double> lambdas,
                            double tmax, double dt, const QuadratureSpec& spec = {},
                            const OptimizerSettings& opt = {}, int workers = 1) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("cmax_curve: gamma must lie in (0, 1]");
    const std::vector<double> times = detail::uniform_grid(tmax, dt);
    const std::size_t nt = times.size();
    std::vector<double> classical(lambdas.size() * nt);
    parallel_for_index(classical.size(), workers, [&](std::size_t idx) {
        const ModelParams p{lambdas[idx / nt], gamma};
        const XState x = rho_nn(p, times[idx % nt], spec);
        classical[idx] = classical_correlation(x, opt).value;
    });

    CmaxCurve curve;
    curve.points.resize(lambdas.size());
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        curve.points[li].lambda = lambdas[li];
        curve.points[li].peak = first_local_max(
            std::span<const double>(classical.data() + li * nt, nt), dt);
        const PeakReport& pk = curve.points[li].peak;
        if (pk.found && (!curve.any_found || pk.value > curve.cmax_star)) {
            curve.any_found = true;
            curve.cmax_star = pk.value;
            curve.lambda_star = lambdas[li];
        }
    }
    return curve;
}

struct BoundaryReport {
    std::vector<double> lambdas;
    std::vector<double> longest_zero;  // length of the longest E = 0 stretch
    double lambda_b = std::numeric_limits<double>::quiet_NaN();
    std::size_t jump_index = 0;  // rise between lambdas[j] and lambdas[j+1]
    double uncertainty = 0.0;    // grid step at the jump
};

/// Classify each lambda by the longest zero-concurrence stretch of the
/// nearest pair within [0, tmax]; the boundary is the midpoint of the
/// steepest rise of that classifier.
inline BoundaryReport entanglement_boundary(double gamma,
                                            std::span<const double> lambdas,
                                            double tmax, double dt,
                                            const QuadratureSpec& spec = {},
                                            int workers = 1) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("entanglement_boundary: gamma must lie in [0, 1]");
    if (lambdas.size() < 2)
        throw std::invalid_argument("entanglement_boundary: need at least 2 lambdas");
    const std::vector<double> times = detail::uniform_grid(tmax, dt);
    const std::size_t nt = times.size();
    std::vector<double> conc(lambdas.size() * nt);
    parallel_for_index(conc.size(), workers, [&](std::size_t idx) {
        const ModelParams p{lambdas[idx / nt], gamma};
        conc[idx] = concurrence(rho_nn(p, times[idx % nt], spec));
    });

    BoundaryReport report;
    report.lambdas.assign(lambdas.begin(), lambdas.end());
    report.longest_zero.resize(lambdas.size());
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        std::size_t best = 0, run = 0;
        for (std::size_t ti = 0; ti < nt; ++ti) {
            run = conc[li * nt + ti] < kZeroConcurrence ? run + 1 : 0;
            best = std::max(best, run);
        }
        report.longest_zero[li] = static_cast<double>(best) * dt;
    }

    double lo = report.longest_zero[0], hi = report.longest_zero[0];
    for (double v : report.longest_zero) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 0.5 * dt)
        throw Degenerate("zero-concurrence classifier is flat across the grid");

    double steepest = -1.0;
    for (std::size_t j = 0; j + 1 < lambdas.size(); ++j) {
        const double rise = report.longest_zero[j + 1] - report.longest_zero[j];
        if (rise > steepest) {
            steepest = rise;
            report.jump_index = j;
        }
    }
    report.lambda_b =
        0.5 * (lambdas[report.jump_index] + lambdas[report.jump_index + 1]);
    report.uncertainty = lambdas[report.jump_index + 1] - lambdas[report.jump_index];
    return report;
}

struct NnnScan {
    std::vector<double> lambdas;
    std::vector<double> onset;  // first time with nonzero concurrence, inf if none
    std::vector<std::pair<double, double>> dead_bands;  // maximal onset = inf runs
};

/// Next-nearest-neighbor entanglement onset time per lambda and the lambda
/// intervals where it never appears within the horizon.
inline NnnScan nnn_onset_and_deadband(double gamma, std::span<const double> lambdas,
                                      double tmax, double dt,
                                      const QuadratureSpec& spec = {},
                                      int workers = 1) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("nnn_onset_and_deadband: gamma must lie in [0, 1]");
    const std::vector<double> times = detail::uniform_grid(tmax, dt);
    const std::size_t nt = times.size();
    std::vector<double> conc(lambdas.size() * nt);
    parallel_for_index(conc.size(), workers, [&](std::size_t idx) {
        const ModelParams p{lambdas[idx / nt], gamma};
        conc[idx] = concurrence(
            rho_nnn(p, times[idx % nt], spec, NnnVariant::wick_derived));
    });

    NnnScan scan;
    scan.lambdas.assign(lambdas.begin(), lambdas.end());
    scan.onset.assign(lambdas.size(), std::numeric_limits<double>::infinity());
    for (std::size_t li = 0; li < lambdas.size(); ++li)
        for (std::size_t ti = 0; ti < nt; ++ti)
            if (conc[li * nt + ti] >= kZeroConcurrence) {
                scan.onset[li] = times[ti];
                break;
            }
    for (std::size_t li = 0; li < lambdas.size();) {
        if (!std::isinf(scan.onset[li])) {
            ++li;
            continue;
        }
        std::size_t hi = li;
        while (hi + 1 < lambdas.size() && std::isinf(scan.onset[hi + 1])) ++hi;
        scan.dead_bands.emplace_back(lambdas[li], lambdas[hi]);
        li = hi + 1;
    }
    return scan;
}

}  // namespace xydyn
