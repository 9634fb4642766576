#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "xydyn/dynamics.hpp"
#include "xydyn/oracle.hpp"
#include "xydyn/version.hpp"

namespace xydyn {

enum class RunMode { series, sweep, cmax, boundary, nnn_scan, oracle_compare };

struct LambdaRange {
    double begin = 0.0;
    double end = 0.0;
    double step = 0.0;

    std::vector<double> values() const {
        const auto count = static_cast<std::size_t>(
                               std::llround((end - begin) / step)) + 1;
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i)
            v[i] = begin + static_cast<double>(i) * step;
        return v;
    }
};

/// Fully describes one CLI invocation; the JSON sidecar echoes it so any run
/// can be reproduced from its artifacts.
struct RunConfig {
    RunMode mode = RunMode::series;
    double lambda = 1.0;
    double gamma = 1.0;
    std::optional<LambdaRange> lambda_range;
    std::vector<double> gamma_list;
    SitePair pair = SitePair::nearest;
    NnnVariant variant = NnnVariant::wick_derived;
    double tmax = -1.0;  // < 0 picks the mode default
    double dt = 0.01;
    double tol = 1e-10;
    std::size_t min_panels = 4096;  // quadrature grid bounds (JSON only)
    std::size_t max_panels = std::size_t{1} << 22;
    std::string out = "xydyn_out.csv";
    int workers = 1;
    unsigned long long seed = 0;  // reserved; every code path is deterministic

    double resolved_tmax() const {
        if (tmax > 0.0) return tmax;
        if (mode == RunMode::cmax) return 10.0;
        if (mode == RunMode::oracle_compare) return 1.5;
        return 25.0;
    }

    QuadratureSpec quadrature() const {
        QuadratureSpec q;
        q.rel_tol = tol;
        q.abs_tol = std::max(1e-300, 0.01 * tol);
        q.min_panels = min_panels;
        q.max_panels = max_panels;
        return q;
    }

    void validate() const {
        if (!std::isfinite(lambda) || lambda < 0.0)
            throw std::invalid_argument("--lambda must be finite and >= 0");
        if (!std::isfinite(gamma) || gamma < 0.0 || gamma > 1.0)
            throw std::invalid_argument("--gamma must lie in [0, 1]");
        for (double g : gamma_list)
            if (!std::isfinite(g) || g < 0.0 || g > 1.0)
                throw std::invalid_argument("--gamma-list entries must lie in [0, 1]");
        if (lambda_range) {
            if (!(lambda_range->step > 0.0))
                throw std::invalid_argument("--lambda-range step must be > 0");
            if (lambda_range->begin < 0.0 || lambda_range->end < lambda_range->begin)
                throw std::invalid_argument(
                    "--lambda-range must satisfy 0 <= begin <= end");
        }
        const bool needs_range = mode == RunMode::sweep || mode == RunMode::cmax ||
                                 mode == RunMode::nnn_scan;
        if (needs_range && !lambda_range)
            throw std::invalid_argument("--lambda-range is required for this mode");
        if (tmax != -1.0 && !(tmax > 0.0))
            throw std::invalid_argument("--tmax must be > 0");
        if (!(dt > 0.0) || dt > resolved_tmax())
            throw std::invalid_argument("--dt must satisfy 0 < dt <= tmax");
        if (!(tol > 0.0) || tol > 1e-2)
            throw std::invalid_argument("--tol must lie in (0, 1e-2]");
        if (min_panels < 2 || max_panels < min_panels)
            throw std::invalid_argument(
                "panel bounds must satisfy 2 <= min_panels <= max_panels");
        if (out.empty()) throw std::invalid_argument("--out must not be empty");
        if (workers < 1 || workers > 256)
            throw std::invalid_argument("--workers must lie in [1, 256]");
        if (mode == RunMode::cmax) {
            const double g = gamma_list.empty() ? gamma : gamma_list.front();
            if (!(g > 0.0)) throw std::invalid_argument("--gamma must be > 0 for cmax");
        }
    }
};

namespace detail {

inline std::string g17(double v) {
    if (v == 0.0) return "0";  // canonicalize the sign of zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* mode_name(RunMode m) {
    switch (m) {
        case RunMode::series: return "series";
        case RunMode::sweep: return "sweep";
        case RunMode::cmax: return "cmax";
        case RunMode::boundary: return "boundary";
        case RunMode::nnn_scan: return "nnn-scan";
        case RunMode::oracle_compare: return "oracle-compare";
    }
    return "series";
}

inline RunMode mode_from_name(const std::string& s) {
    if (s == "series") return RunMode::series;
    if (s == "sweep") return RunMode::sweep;
    if (s == "cmax") return RunMode::cmax;
    if (s == "boundary") return RunMode::boundary;
    if (s == "nnn-scan") return RunMode::nnn_scan;
    if (s == "oracle-compare") return RunMode::oracle_compare;
    throw std::invalid_argument("--mode must be one of series, sweep, cmax, "
                                "boundary, nnn-scan, oracle-compare");
}

}  // namespace detail

inline nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["mode"] = detail::mode_name(cfg.mode);
    j["lambda"] = cfg.lambda;
    j["gamma"] = cfg.gamma;
    if (cfg.lambda_range)
        j["lambda_range"] = {{"begin", cfg.lambda_range->begin},
                             {"end", cfg.lambda_range->end},
                             {"step", cfg.lambda_range->step}};
    else
        j["lambda_range"] = nullptr;
    j["gamma_list"] = cfg.gamma_list;
    j["pair"] = cfg.pair == SitePair::nearest ? "nn" : "nnn";
    j["variant"] = cfg.variant == NnnVariant::wick_derived ? "wick" : "printed";
    j["tmax"] = cfg.resolved_tmax();
    j["dt"] = cfg.dt;
    j["tol"] = cfg.tol;
    j["min_panels"] = cfg.min_panels;
    j["max_panels"] = cfg.max_panels;
    j["out"] = cfg.out;
    j["workers"] = cfg.workers;
    j["seed"] = cfg.seed;
    return j;
}

inline RunConfig config_from_json(const nlohmann::json& root) {
    const nlohmann::json& j = root.contains("config") ? root.at("config") : root;
    RunConfig cfg;
    cfg.mode = detail::mode_from_name(j.at("mode").get<std::string>());
    cfg.lambda = j.value("lambda", 1.0);
    cfg.gamma = j.value("gamma", 1.0);
    if (j.contains("lambda_range") && !j.at("lambda_range").is_null()) {
        const auto& r = j.at("lambda_range");
        cfg.lambda_range = LambdaRange{r.at("begin").get<double>(),
                                       r.at("end").get<double>(),
                                       r.at("step").get<double>()};
    }
    if (j.contains("gamma_list"))
        cfg.gamma_list = j.at("gamma_list").get<std::vector<double>>();
    cfg.pair = j.value("pair", std::string("nn")) == "nnn" ? SitePair::next_nearest
                                                           : SitePair::nearest;
    cfg.variant = j.value("variant", std::string("wick")) == "printed"
                      ? NnnVariant::as_printed
                      : NnnVariant::wick_derived;
    cfg.tmax = j.value("tmax", -1.0);
    cfg.dt = j.value("dt", 0.01);
    cfg.tol = j.value("tol", 1e-10);
    cfg.min_panels = j.value("min_panels", std::size_t{4096});
    cfg.max_panels = j.value("max_panels", std::size_t{1} << 22);
    cfg.out = j.value("out", std::string("xydyn_out.csv"));
    cfg.workers = j.value("workers", 1);
    cfg.seed = j.value("seed", 0ULL);
    return cfg;
}

namespace detail {

struct ModeOutput {
    std::string csv;
    nlohmann::json result;
};

inline ModeOutput run_series(const RunConfig& cfg) {
    const ModelParams params{cfg.lambda, cfg.gamma};
    const TimeSeries s =
        time_series(params, cfg.pair, cfg.resolved_tmax(), cfg.dt, cfg.quadrature(),
                    {}, cfg.variant, cfg.workers);
    std::string csv =
        "t,concurrence,discord,classical,r11,r22,r33,r44,re_r14,im_r14,re_r23,im_r23\n";
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        const XState& x = s.states[i];
        const CorrelationTriple& v = s.values[i];
        csv += g17(s.times[i]) + "," + g17(v.concurrence) + "," + g17(v.discord) +
               "," + g17(v.classical) + "," + g17(x.r11) + "," + g17(x.r22) + "," +
               g17(x.r33) + "," + g17(x.r44) + "," + g17(x.r14.real()) + "," +
               g17(x.r14.imag()) + "," + g17(x.r23.real()) + "," +
               g17(x.r23.imag()) + "\n";
    }
    return {std::move(csv), {{"rows", s.times.size()}}};
}

inline ModeOutput run_sweep(const RunConfig& cfg) {
    const std::vector<double> lambdas = cfg.lambda_range->values();
    const std::vector<double> times = uniform_grid(cfg.resolved_tmax(), cfg.dt);
    const std::size_t nt = times.size();
    std::vector<CorrelationTriple> grid(lambdas.size() * nt);
    const QuadratureSpec quad = cfg.quadrature();
    parallel_for_index(grid.size(), cfg.workers, [&](std::size_t idx) {
        const ModelParams p{lambdas[idx / nt], cfg.gamma};
        const XState x = pair_state(p, cfg.pair, times[idx % nt], quad, cfg.variant);
        grid[idx] = correlation_triple(x, {});
    });
    std::string csv = "lambda,t,concurrence,discord,classical\n";
    for (std::size_t li = 0; li < lambdas.size(); ++li)
        for (std::size_t ti = 0; ti < nt; ++ti) {
            const CorrelationTriple& v = grid[li * nt + ti];
            csv += g17(lambdas[li]) + "," + g17(times[ti]) + "," +
                   g17(v.concurrence) + "," + g17(v.discord) + "," +
                   g17(v.classical) + "\n";
        }
    return {std::move(csv), {{"rows", grid.size()}}};
}

inline ModeOutput run_cmax(const RunConfig& cfg) {
    const std::vector<double> gammas =
        cfg.gamma_list.empty() ? std::vector<double>{cfg.gamma} : cfg.gamma_list;
    const std::vector<double> lambdas = cfg.lambda_range->values();
    std::string csv = "gamma,lambda,peak_found,t_star,c_max\n";
    nlohmann::json curves = nlohmann::json::array();
    for (double g : gammas) {
        const CmaxCurve curve = cmax_curve(g, lambdas, cfg.resolved_tmax(), cfg.dt,
                                           cfg.quadrature(), {}, cfg.workers);
        for (const CmaxPoint& pt : curve.points) {
            const double t_star = pt.peak.found
                                      ? pt.peak.t_star
                                      : std::numeric_limits<double>::quiet_NaN();
            const double value = pt.peak.found
                                     ? pt.peak.value
                                     : std::numeric_limits<double>::quiet_NaN();
            csv += g17(g) + "," + g17(pt.lambda) + "," +
                   (pt.peak.found ? "1" : "0") + "," + g17(t_star) + "," +
                   g17(value) + "\n";
        }
        curves.push_back({{"gamma", g},
                          {"found", curve.any_found},
                          {"lambda_star", curve.lambda_star},
                          {"cmax_star", curve.cmax_star}});
    }
    return {std::move(csv), {{"curves", curves}}};
}

inline ModeOutput run_boundary(const RunConfig& cfg) {
    const LambdaRange range = cfg.lambda_range.value_or(LambdaRange{0.7, 1.0, 0.01});
    const std::vector<double> lambdas = range.values();
    const BoundaryReport report =
        entanglement_boundary(cfg.gamma, lambdas, cfg.resolved_tmax(), cfg.dt,
                              cfg.quadrature(), cfg.workers);
    std::string csv = "lambda,longest_zero_interval\n";
    for (std::size_t i = 0; i < report.lambdas.size(); ++i)
        csv += g17(report.lambdas[i]) + "," + g17(report.longest_zero[i]) + "\n";
    return {std::move(csv),
            {{"lambda_b", report.lambda_b},
             {"jump_index", report.jump_index},
             {"uncertainty", report.uncertainty}}};
}

inline ModeOutput run_nnn_scan(const RunConfig& cfg) {
    const std::vector<double> lambdas = cfg.lambda_range->values();
    const NnnScan scan = nnn_onset_and_deadband(cfg.gamma, lambdas,
                                                cfg.resolved_tmax(), cfg.dt,
                                                cfg.quadrature(), cfg.workers);
    std::string csv = "lambda,onset_time,in_dead_band\n";
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
        csv += g17(scan.lambdas[i]) + "," + g17(scan.onset[i]) + "," +
               (std::isinf(scan.onset[i]) ? "1" : "0") + "\n";
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& [lo, hi] : scan.dead_bands) bands.push_back({lo, hi});
    return {std::move(csv), {{"dead_bands", bands}}};
}

inline ModeOutput run_oracle_compare(const RunConfig& cfg) {
    const std::vector<double> times = uniform_grid(cfg.resolved_tmax(), cfg.dt);
    const RingSpec ring{12, ModelParams{cfg.lambda, cfg.gamma}};
    const ArbitrationReport report =
        arbitration_report(ring, times, cfg.quadrature());
    std::string csv = "t,dev_nn,dev_nnn_wick,dev_nnn_printed\n";
    for (const ArbitrationRow& row : report.rows)
        csv += g17(row.t) + "," + g17(row.dev_nn) + "," + g17(row.dev_wick) + "," +
               g17(row.dev_printed) + "\n";
    return {std::move(csv),
            {{"max_dev_nn", report.max_dev_nn},
             {"max_dev_wick", report.max_dev_wick},
             {"max_dev_printed", report.max_dev_printed}}};
}

}  // namespace detail

/// Execute a validated config and write the CSV plus its JSON sidecar
/// (out path + ".json"). Exit status: 0 success, 1 invalid config,
/// 2 numerical non-convergence, 3 other runtime failures.
inline int run(const RunConfig& cfg) {
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }
    const auto start = std::chrono::steady_clock::now();
    detail::ModeOutput output;
    try {
        switch (cfg.mode) {
            case RunMode::series: output = detail::run_series(cfg); break;
            case RunMode::sweep: output = detail::run_sweep(cfg); break;
            case RunMode::cmax: output = detail::run_cmax(cfg); break;
            case RunMode::boundary: output = detail::run_boundary(cfg); break;
            case RunMode::nnn_scan: output = detail::run_nnn_scan(cfg); break;
            case RunMode::oracle_compare:
                output = detail::run_oracle_compare(cfg);
                break;
        }
    } catch (const NoConvergence& e) {
        std::fprintf(stderr, "non-convergence: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;

    std::ofstream csv(cfg.out, std::ios::binary);
    if (!csv) {
        std::fprintf(stderr, "error: cannot open %s for writing\n", cfg.out.c_str());
        return 3;
    }
    csv << output.csv;
    csv.close();

    nlohmann::json sidecar;
    sidecar["config"] = config_to_json(cfg);
    sidecar["version"] = kVersion;
    sidecar["wall_clock_seconds"] = elapsed.count();
    sidecar["result"] = output.result;
    std::ofstream meta(cfg.out + ".json", std::ios::binary);
    if (!meta) {
        std::fprintf(stderr, "error: cannot open %s.json for writing\n",
                     cfg.out.c_str());
        return 3;
    }
    meta << sidecar.dump(2) << "\n";
    return 0;
}

}  // namespace xydyn
