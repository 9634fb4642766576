#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "xydyn/correlators.hpp"
#include "xydyn/model.hpp"
#include "xydyn/qinfo.hpp"

namespace xydyn {

class DimensionTooLarge : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite periodic ring used by both validation oracles.
struct RingSpec {
    std::size_t sites = 12;
    ModelParams params;
};

/// Same five quantities as contractions() with the integral replaced by the
/// mean over the `sites` midpoint momenta. Validates the quadrature path;
/// shares only the mode formulas, never the integrator.
inline ContractionSet discrete_k_contractions(const RingSpec& ring, double t) {
    ring.params.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("discrete_k_contractions: t must be >= 0");
    if (ring.sites < 2 || ring.sites > (std::size_t{1} << 22))
        throw std::invalid_argument("discrete_k_contractions: sites out of range");
    if (t == 0.0 || ring.params.gamma == 0.0) return {};

    const std::size_t n = ring.sites;
    detail::CompensatedSum occ, h1, h2, p1re, p1im, p2re, p2im;
    for (std::size_t m = 0; m < n; ++m) {
        const double k = -M_PI + (static_cast<double>(m) + 0.5) * (2.0 * M_PI / n);
        const double L = dispersion(ring.params, k);
        const double ab = alpha_beta(ring.params, k);
        const double b2 = beta_sq(ring.params, k);
        const double s = std::sin(L * t);
        const double c = std::cos(L * t);
        const double bracket = 1.0 - 4.0 * ab * ab * s * s;
        const double pre = ab * 2.0 * s * s * (1.0 - 2.0 * b2);
        const double pim = ab * -2.0 * s * c;
        const double ck = std::cos(k), sk = std::sin(k);
        const double c2k = 2.0 * ck * ck - 1.0, s2k = 2.0 * sk * ck;
        occ.add(bracket);
        h1.add(ck * bracket);
        h2.add(c2k * bracket);
        p1re.add(sk * pre);
        p1im.add(sk * pim);
        p2re.add(s2k * pre);
        p2im.add(s2k * pim);
    }
    const double inv = 1.0 / static_cast<double>(n);
    ContractionSet out;
    out.occupation = occ.total() * inv;
    out.hop1 = h1.total() * inv;
    out.hop2 = h2.total() * inv;
    out.pair1 = {p1re.total() * inv, p1im.total() * inv};
    out.pair2 = {p2re.total() * inv, p2im.total() * inv};
    return out;
}

inline Eigen::Matrix4cd x_state_matrix(const XState& x) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = x.r11;
    m(1, 1) = x.r22;
    m(2, 2) = x.r33;
    m(3, 3) = x.r44;
    m(0, 3) = x.r14;
    m(3, 0) = std::conj(x.r14);
    m(1, 2) = x.r23;
    m(2, 1) = std::conj(x.r23);
    return m;
}

/// Full 4x4 reduced density matrix of one site pair (not assumed X-form).
struct PairReducedState {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();

    double trace() const { return rho.trace().real(); }

    Eigen::Vector4d eigenvalues() const {
        return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(rho).eigenvalues();
    }

    /// Largest entry outside the X pattern (parity selection check).
    double max_x_violation() const {
        double worst = 0.0;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                const bool x_slot = r == c || r + c == 3;
                if (!x_slot) worst = std::max(worst, std::abs(rho(r, c)));
            }
        return worst;
    }

    /// Max-norm entrywise distance from an X state.
    double deviation(const XState& x) const {
        return (rho - x_state_matrix(x)).cwiseAbs().maxCoeff();
    }

    /// Entries read into X form (off-pattern entries dropped, not validated).
    XState as_x_state() const {
        XState x;
        x.r11 = rho(0, 0).real();
        x.r22 = rho(1, 1).real();
        x.r33 = rho(2, 2).real();
        x.r44 = rho(3, 3).real();
        x.r14 = rho(0, 3);
        x.r23 = rho(1, 2);
        return x;
    }
};

/// Exact propagation of the polarized state on a finite spin ring, straight
/// from the spin Hamiltonian so no fermionization step is shared with the
/// analytic pipeline. Basis bit j set means site j is flipped down; the
/// initial state is index 0.
class RingEvolver {
public:
    explicit RingEvolver(const RingSpec& ring)
        : spec_(ring), dim_(std::size_t{1} << ring.sites) {
        ring.params.validate();
        if (ring.sites > kMaxSites)
            throw DimensionTooLarge("ed ring limited to " +
                                    std::to_string(kMaxSites) + " sites");
        if (ring.sites < 4 || ring.sites % 2 != 0)
            throw std::invalid_argument("ed ring needs an even site count >= 4");
        if (ring.sites <= kDenseSites)
            build_dense();
        else
            init_stepper();
    }

    const RingSpec& ring() const { return spec_; }

    /// Reduced density matrix of sites (a, b) at time t; a is the first qubit.
    PairReducedState reduced_pair(double t, std::size_t site_a, std::size_t site_b) {
        if (!(t >= 0.0)) throw std::invalid_argument("reduced_pair: t must be >= 0");
        if (site_a >= spec_.sites || site_b >= spec_.sites || site_a == site_b)
            throw std::invalid_argument("reduced_pair: bad site pair");
        advance(t);
        return trace_out(site_a, site_b);
    }

    double energy_expectation(double t) {
        advance(t);
        Eigen::VectorXcd hpsi(dim_);
        apply_h(psi_, hpsi);
        return psi_.dot(hpsi).real();
    }

private:
    static constexpr std::size_t kMaxSites = 12;
    static constexpr std::size_t kDenseSites = 10;  // exact eigendecomposition
    // Above kDenseSites the state is advanced by Taylor substeps of the
    // exact propagator, summed until the terms fall below roundoff. At
    // h = 0.1 the series needs ~20 matrix applications per substep and
    // keeps the propagation error at machine precision, so finite-size
    // comparisons are not polluted by the integrator.
    static constexpr double kSubstep = 0.1;
    static constexpr int kMaxOrder = 64;

    RingSpec spec_;
    std::size_t dim_;

    // dense path
    bool dense_ = false;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd modes_;
    Eigen::VectorXd weights_;  // modes^T applied to the initial state

    // stepper path
    double time_ = 0.0;
    Eigen::VectorXcd psi_;
    std::vector<double> diag_;

    double bond_amp(std::size_t s, std::size_t i, std::size_t j) const {
        const bool bi = (s >> i) & 1, bj = (s >> j) & 1;
        return bi != bj ? -0.5 * spec_.params.lambda
                        : -0.5 * spec_.params.lambda * spec_.params.gamma;
    }

    void fill_diagonal() {
        diag_.resize(dim_);
        for (std::size_t s = 0; s < dim_; ++s)
            diag_[s] = static_cast<double>(std::popcount(s)) -
                       0.5 * static_cast<double>(spec_.sites);
    }

    void build_dense() {
        dense_ = true;
        fill_diagonal();
        const auto n = spec_.sites;
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
        for (std::size_t s = 0; s < dim_; ++s) {
            h(s, s) = diag_[s];
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = (i + 1) % n;
                const std::size_t s2 = s ^ (std::size_t{1} << i) ^ (std::size_t{1} << j);
                h(s2, s) += bond_amp(s, i, j);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
        energies_ = solver.eigenvalues();
        modes_ = solver.eigenvectors();
        weights_ = modes_.row(0).transpose();
        psi_.resize(dim_);
    }

    void init_stepper() {
        fill_diagonal();
        psi_ = Eigen::VectorXcd::Zero(dim_);
        psi_(0) = 1.0;
        time_ = 0.0;
    }

    void apply_h(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
        const auto n = spec_.sites;
        for (std::size_t s = 0; s < dim_; ++s) out(s) = diag_[s] * in(s);
        for (std::size_t s = 0; s < dim_; ++s) {
            const std::complex<double> v = in(s);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = (i + 1) % n;
                const std::size_t s2 = s ^ (std::size_t{1} << i) ^ (std::size_t{1} << j);
                out(s2) += bond_amp(s, i, j) * v;
            }
        }
    }

    void advance(double t) {
        if (dense_) {
            // psi(t) = V (w cos(Et)) - i V (w sin(Et)), two real products
            const Eigen::VectorXd re =
                modes_ * (weights_.array() * (energies_.array() * t).cos()).matrix();
            const Eigen::VectorXd im =
                modes_ * (weights_.array() * (energies_.array() * t).sin()).matrix();
            psi_.real() = re;
            psi_.imag() = -im;
            return;
        }
        if (t < time_ - 1e-12) init_stepper();
        const double span = t - time_;
        if (span <= 0.0) return;
        const auto steps =
            static_cast<std::size_t>(std::ceil(span / kSubstep - 1e-12));
        const double h = span / static_cast<double>(steps);
        Eigen::VectorXcd term(dim_), next(dim_);
        for (std::size_t step = 0; step < steps; ++step) {
            term = psi_;
            for (int m = 1; m <= kMaxOrder; ++m) {
                apply_h(term, next);
                term = next * (std::complex<double>(0.0, -h) / double(m));
                psi_ += term;
                if (term.lpNorm<Eigen::Infinity>() < 1e-18) break;
            }
            psi_.normalize();
        }
        time_ = t;
    }

    PairReducedState trace_out(std::size_t site_a, std::size_t site_b) const {
        PairReducedState out;
        const auto n = spec_.sites;
        std::vector<std::size_t> rest;
        rest.reserve(n - 2);
        for (std::size_t i = 0; i < n; ++i)
            if (i != site_a && i != site_b) rest.push_back(i);
        const std::size_t env_dim = std::size_t{1} << (n - 2);
        std::array<std::size_t, 4> idx{};
        for (std::size_t env = 0; env < env_dim; ++env) {
            std::size_t base = 0;
            for (std::size_t pos = 0; pos < rest.size(); ++pos)
                if ((env >> pos) & 1) base |= std::size_t{1} << rest[pos];
            for (std::size_t r = 0; r < 4; ++r)
                idx[r] = base | (((r >> 1) & 1) << site_a) | ((r & 1) << site_b);
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t c = 0; c < 4; ++c)
                    out.rho(r, c) += psi_(idx[r]) * std::conj(psi_(idx[c]));
        }
        return out;
    }
};

/// One-shot convenience wrapper; reuse a RingEvolver for time grids.
inline PairReducedState ed_evolve(const RingSpec& ring, double t, std::size_t site_a,
                                  std::size_t site_b) {
    RingEvolver evolver(ring);
    return evolver.reduced_pair(t, site_a, site_b);
}

struct ArbitrationRow {
    double t = 0.0;
    double dev_wick = 0.0;     // |ed(1,3) - wick_derived| max-norm
    double dev_printed = 0.0;  // |ed(1,3) - as_printed| max-norm
    double dev_nn = 0.0;       // |ed(1,2) - rho_nn| max-norm
};

struct ArbitrationReport {
    std::vector<ArbitrationRow> rows;
    double max_dev_wick = 0.0;
    double max_dev_printed = 0.0;
    double max_dev_nn = 0.0;
};

/// Deviation of both next-nearest variants (and the nearest pair) from the
/// ring propagator over a time grid; the table arbitrates the variants.
inline ArbitrationReport arbitration_report(const RingSpec& ring,
                                            std::span<const double> tgrid,
                                            const QuadratureSpec& spec = {}) {
    if (ring.sites != 12)
        throw std::invalid_argument("arbitration_report: ring must have 12 sites");
    std::vector<double> times(tgrid.begin(), tgrid.end());
    std::sort(times.begin(), times.end());
    RingEvolver evolver(ring);
    ArbitrationReport report;
    report.rows.reserve(times.size());
    for (double t : times) {
        ArbitrationRow row;
        row.t = t;
        const PairReducedState ed13 = evolver.reduced_pair(t, 0, 2);
        const PairReducedState ed12 = evolver.reduced_pair(t, 0, 1);
        row.dev_wick =
            ed13.deviation(rho_nnn(ring.params, t, spec, NnnVariant::wick_derived));
        row.dev_printed =
            ed13.deviation(rho_nnn(ring.params, t, spec, NnnVariant::as_printed));
        row.dev_nn = ed12.deviation(rho_nn(ring.params, t, spec));
        report.max_dev_wick = std::max(report.max_dev_wick, row.dev_wick);
        report.max_dev_printed = std::max(report.max_dev_printed, row.dev_printed);
        report.max_dev_nn = std::max(report.max_dev_nn, row.dev_nn);
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace xydyn
