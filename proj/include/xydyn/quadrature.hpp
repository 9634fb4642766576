#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

namespace xydyn {

class NoConvergence : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Settings for the periodic panel-doubling integrator. `oscillation_hint`
/// should estimate the phase range of the integrand (roughly t * max_k L_k)
/// so the initial grid resolves sin^2(L t) before the doubling test runs.
struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t min_panels = 4096;
    std::size_t max_panels = std::size_t{1} << 22;
    double oscillation_hint = 0.0;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("quadrature tolerances must be > 0");
        if (min_panels < 2)
            throw std::invalid_argument("min_panels must be >= 2");
        if (max_panels < min_panels)
            throw std::invalid_argument("max_panels must be >= min_panels");
        if (!(oscillation_hint >= 0.0))
            throw std::invalid_argument("oscillation_hint must be >= 0");
    }
};

template <class T>
struct QuadratureResult {
    T value;
    double err_estimate = 0.0;
    std::size_t panels_used = 0;
};

namespace detail {

// Neumaier-compensated accumulator; fixed summation order keeps results
// independent of everything but the panel count.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double total() const { return sum + comp; }
};

template <class F>
using integrand_value_t = std::decay_t<std::invoke_result_t<F&, double>>;

// Mean of f over [a, b] sampled at the n panel midpoints. Midpoint sampling
// never lands on k = 0 or k = +-pi for even n, so removable-singularity
// nodes are excluded by construction.
template <class F>
integrand_value_t<F> midpoint_mean(F&& f, double a, double b, std::size_t n) {
    using R = integrand_value_t<F>;
    const double h = (b - a) / static_cast<double>(n);
    if constexpr (std::is_same_v<R, double>) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < n; ++i)
            acc.add(f(a + (static_cast<double>(i) + 0.5) * h));
        return acc.total() / static_cast<double>(n);
    } else {
        static_assert(std::is_same_v<R, std::complex<double>>,
                      "integrand must return double or complex<double>");
        CompensatedSum re, im;
        for (std::size_t i = 0; i < n; ++i) {
            const R v = f(a + (static_cast<double>(i) + 0.5) * h);
            re.add(v.real());
            im.add(v.imag());
        }
        return R{re.total(), im.total()} / static_cast<double>(n);
    }
}

inline std::size_t initial_panels(const QuadratureSpec& spec) {
    const double osc = 64.0 * std::ceil(1.0 + spec.oscillation_hint);
    std::size_t n = spec.min_panels;
    if (osc > static_cast<double>(n)) n = static_cast<std::size_t>(osc);
    if (n > spec.max_panels / 2) n = spec.max_panels / 2;
    if (n < 2) n = 2;
    return n + (n & 1);  // even counts pair the +-k midpoints exactly
}

template <class F>
QuadratureResult<integrand_value_t<F>> interval_mean(F&& f, double a, double b,
                                                     const QuadratureSpec& spec) {
    using R = integrand_value_t<F>;
    spec.validate();
    std::size_t n = initial_panels(spec);
    R prev = midpoint_mean(f, a, b, n);
    while (n <= spec.max_panels / 2) {
        n *= 2;
        const R cur = midpoint_mean(f, a, b, n);
        const double diff = std::abs(cur - prev);
        if (diff <= std::max(spec.abs_tol, spec.rel_tol * std::abs(cur))) {
            const double floor = std::numeric_limits<double>::epsilon() * std::abs(cur);
            return {cur, std::max(diff, floor), n};
        }
        prev = cur;
    }
    throw NoConvergence("integral did not converge within " +
                        std::to_string(spec.max_panels) + " panels");
}

}  // namespace detail

/// (1/2pi) * integral of f over [-pi, pi], refined by panel doubling until
/// two successive grids agree within max(abs_tol, rel_tol * |value|).
template <class F>
auto integrate_periodic(F&& f, const QuadratureSpec& spec = {}) {
    return detail::interval_mean(std::forward<F>(f), -M_PI, M_PI, spec);
}

/// Same normalization computed as 2 * (1/2pi) * integral over [0, pi].
/// Requires f even in k; every shipped integrand satisfies this.
template <class F>
auto integrate_halfline_even(F&& f, const QuadratureSpec& spec = {}) {
    return detail::interval_mean(std::forward<F>(f), 0.0, M_PI, spec);
}

}  // namespace xydyn
