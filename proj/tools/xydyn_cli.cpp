// Command-line front end: parses flags into a RunConfig and hands off to
// xydyn::run(), which writes the CSV and its JSON sidecar.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xydyn/runio.hpp"
#include "xydyn/version.hpp"

namespace {

bool parse_range(const std::string& text, xydyn::LambdaRange& range) {
    double a = 0.0, b = 0.0, s = 0.0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &s) != 3) return false;
    range = {a, b, s};
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Post-quench correlation dynamics of the transverse-field XY chain"};
    app.set_version_flag("--version", std::string(xydyn::kVersion));

    std::string mode, pair, variant, range_text, gamma_list_text, out, config_path;
    double lambda = 0.0, gamma = 0.0, tmax = 0.0, dt = 0.0, tol = 0.0;
    int workers = 0;
    unsigned long long seed = 0;

    auto* mode_opt = app.add_option(
        "--mode", mode, "series | sweep | cmax | boundary | nnn-scan | oracle-compare");
    auto* lambda_opt = app.add_option("--lambda", lambda, "coupling, >= 0");
    auto* gamma_opt = app.add_option("--gamma", gamma, "anisotropy in [0, 1]");
    auto* range_opt = app.add_option("--lambda-range", range_text,
                                     "lambda grid as begin:end:step");
    auto* glist_opt = app.add_option("--gamma-list", gamma_list_text,
                                     "comma-separated gammas (cmax mode)");
    auto* pair_opt = app.add_option("--pair", pair, "nn | nnn");
    auto* variant_opt = app.add_option("--variant", variant, "wick | printed");
    auto* tmax_opt = app.add_option("--tmax", tmax, "time horizon");
    auto* dt_opt = app.add_option("--dt", dt, "time step");
    auto* tol_opt = app.add_option("--tol", tol, "quadrature relative tolerance");
    auto* out_opt = app.add_option("--out", out, "output CSV path");
    auto* workers_opt = app.add_option("--workers", workers, "worker threads");
    auto* seed_opt = app.add_option("--seed", seed,
                                    "reserved, unused (all algorithms deterministic)");
    app.add_option("--config", config_path,
                   "load a config or sidecar JSON; explicit flags override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    xydyn::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "config error: cannot read --config file %s\n",
                         config_path.c_str());
            return 1;
        }
        try {
            nlohmann::json j;
            in >> j;
            cfg = xydyn::config_from_json(j);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "config error: --config: %s\n", e.what());
            return 1;
        }
    } else if (mode_opt->count() == 0) {
        std::fprintf(stderr, "config error: --mode is required (or pass --config)\n");
        return 1;
    }

    try {
        if (mode_opt->count()) cfg.mode = xydyn::detail::mode_from_name(mode);
        if (lambda_opt->count()) cfg.lambda = lambda;
        if (gamma_opt->count()) cfg.gamma = gamma;
        if (range_opt->count()) {
            xydyn::LambdaRange r;
            if (!parse_range(range_text, r))
                throw std::invalid_argument("--lambda-range must look like 0.5:1.5:0.01");
            cfg.lambda_range = r;
        }
        if (glist_opt->count()) {
            cfg.gamma_list.clear();
            std::stringstream ss(gamma_list_text);
            std::string item;
            while (std::getline(ss, item, ','))
                cfg.gamma_list.push_back(std::stod(item));
            if (cfg.gamma_list.empty())
                throw std::invalid_argument("--gamma-list must not be empty");
        }
        if (pair_opt->count()) {
            if (pair != "nn" && pair != "nnn")
                throw std::invalid_argument("--pair must be nn or nnn");
            cfg.pair = pair == "nn" ? xydyn::SitePair::nearest
                                    : xydyn::SitePair::next_nearest;
        }
        if (variant_opt->count()) {
            if (variant != "wick" && variant != "printed")
                throw std::invalid_argument("--variant must be wick or printed");
            cfg.variant = variant == "wick" ? xydyn::NnnVariant::wick_derived
                                            : xydyn::NnnVariant::as_printed;
        }
        if (tmax_opt->count()) cfg.tmax = tmax;
        if (dt_opt->count()) cfg.dt = dt;
        if (tol_opt->count()) cfg.tol = tol;
        if (out_opt->count()) cfg.out = out;
        if (workers_opt->count()) cfg.workers = workers;
        if (seed_opt->count()) cfg.seed = seed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }

    return xydyn::run(cfg);
}
