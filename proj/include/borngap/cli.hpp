#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "borngap/born.hpp"
#include "borngap/config.hpp"
#include "borngap/dispersive.hpp"
#include "borngap/kernels.hpp"
#include "borngap/sweep.hpp"

namespace borngap::cli {

// Exit codes: 0 success / within tolerance, 2 validation or usage error,
// 3 numerical nonconvergence, 4 fit outside tolerance.
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_fit = 4;

namespace detail {

inline int resolve_threads(const RunConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    if (const char* env = std::getenv("BORNGAP_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // parallel_map picks hardware concurrency
}

inline std::vector<double> dyadic_grid(double lo, double hi) {
    if (!(lo > 0.0) || !(hi >= lo)) throw validation_error("bad dyadic L range");
    std::vector<double> g;
    for (double L = lo; L <= hi * (1.0 + 1e-9); L *= 2.0) g.push_back(L);
    return g;
}

inline osc::QuadratureSpec quad_from(const RunConfig& cfg) {
    osc::QuadratureSpec q;
    q.rel_tol = cfg.rel_tol;
    return q;
}

inline void persist(const sweep::SweepResult& res, const RunConfig& cfg,
                    std::ostream& out) {
    const auto cfg_json = config_to_json(cfg);
    if (!cfg.out.empty()) sweep::write_file(cfg.out, sweep::render_csv(res, cfg_json.dump()));
    if (!cfg.summary.empty())
        sweep::write_file(cfg.summary, sweep::summary_json(res, cfg_json).dump(2) + "\n");
    if (res.fit) {
        out << res.experiment_id << ": slope " << sweep::fmt_double(res.fit->slope)
            << "  intercept " << sweep::fmt_double(res.fit->intercept) << "  r^2 "
            << sweep::fmt_double(res.fit->r_squared);
        if (res.fit->target) out << "  target " << sweep::fmt_double(*res.fit->target);
        out << "  points " << res.fit->point_count << "  excluded "
            << res.excluded_count << "\n";
    }
}

inline int fit_gate(const sweep::SweepResult& res, double target, double tol,
                    std::ostream& err) {
    if (res.failed || !res.fit) {
        err << "sweep failed or produced no fit\n";
        return exit_numerical;
    }
    if (std::abs(res.fit->slope - target) > tol) {
        err << "fitted slope " << res.fit->slope << " outside " << target << " +- "
            << tol << "\n";
        return exit_fit;
    }
    return exit_ok;
}

inline int cmd_kernel(const RunConfig& cfg, std::ostream& out) {
    const ModelParams mp = cfg.model();
    mp.validate_basic();
    if (cfg.sign != "+" && cfg.sign != "-")
        throw validation_error("kernel: --sign must be + or -");
    if (!(cfg.lambda > 0.0)) throw domain_error("kernel: --lambda must be > 0");
    const int sign = (cfg.sign == "-") ? -1 : +1;
    SpectralPoint sp{cfg.lambda, sign};
    const auto schr =
        kernels::schrodinger_kernel(mp.n, complex{sign * cfg.lambda, 0.0}, cfg.r);
    const auto poly = kernels::poly_resolvent_kernel(mp.n, mp.m, sp, cfg.r);
    out << "R0" << cfg.sign << "(lambda^2)(r)        = "
        << sweep::fmt_double(schr.value.real()) << " + "
        << sweep::fmt_double(schr.value.imag()) << " i\n";
    out << "R0" << cfg.sign << "(lambda^{2m})(r) [m=" << mp.m
        << "] = " << sweep::fmt_double(poly.value.real()) << " + "
        << sweep::fmt_double(poly.value.imag()) << " i\n";

    // residual check: the splitting-difference identity at this point
    const complex lhs =
        kernels::poly_resolvent_kernel(mp.n, mp.m, SpectralPoint{cfg.lambda, +1}, cfg.r)
            .value -
        kernels::poly_resolvent_kernel(mp.n, mp.m, SpectralPoint{cfg.lambda, -1}, cfg.r)
            .value;
    const complex rhs = kernels::resolvent_difference(mp.n, cfg.lambda, cfg.r) /
                        (mp.m * std::pow(cfg.lambda, 2.0 * mp.m - 2.0));
    const double resid = std::abs(lhs - rhs) / std::abs(rhs);
    out << "splitting-difference residual = " << sweep::fmt_double(resid) << "\n";
    if (!(resid < 1e-10)) return exit_numerical;
    return exit_ok;
}

/// band_L_min = 0 requests the per-t anchored dyadic band grid.
inline std::vector<double> band_grid(const RunConfig& cfg) {
    std::vector<double> Ls;
    if (cfg.band_L_min > 0.0)
        for (int i = 0; i < cfg.band_L_points; ++i)
            Ls.push_back(cfg.band_L_min * std::pow(2.0, i));
    return Ls;
}

inline int cmd_free_dispersive(const RunConfig& cfg, std::ostream& out,
                               std::ostream& err) {
    const ModelParams mp = cfg.model();
    mp.validate_basic();
    auto res = dispersive::dispersive_sweep(
        mp, cfg.sigma, dispersive::log_grid(cfg.t_min, cfg.t_max, cfg.t_points),
        band_grid(cfg), cfg.r_points, quad_from(cfg), resolve_threads(cfg),
        cfg.band_L_points);
    persist(res, cfg, out);
    const double tol = cfg.tol_slope > 0.0 ? cfg.tol_slope : 0.15;
    return fit_gate(res, -0.5 * mp.n, tol, err);
}

inline int cmd_sigma_probe(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ModelParams mp = cfg.model();
    mp.validate_basic();
    auto res = dispersive::sigma_growth_probe(
        mp, cfg.sigmas, dispersive::log_grid(cfg.t_min, cfg.t_max, cfg.t_points),
        band_grid(cfg), cfg.r_points, quad_from(cfg), resolve_threads(cfg),
        cfg.band_L_points);
    persist(res, cfg, out);
    if (res.failed || !res.fit) {
        err << "probe failed\n";
        return exit_numerical;
    }
    const double margin = cfg.tol_slope > 0.0 ? cfg.tol_slope : 0.25;
    const double bound = 0.5 * (mp.n + 2.0) + margin;
    if (res.fit->slope > bound) {
        err << "sigma growth slope " << res.fit->slope << " exceeds bound " << bound
            << "\n";
        return exit_fit;
    }
    return exit_ok;
}

inline int cmd_born_growth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ModelParams mp = cfg.model();
    const auto kind = (cfg.potential == "rho") ? born::PotentialKind::annulus_only
                                               : born::PotentialKind::tuned;
    auto res = born::growth_experiment(mp, dyadic_grid(cfg.L_min, cfg.L_max), kind,
                                       quad_from(cfg), resolve_threads(cfg));
    // one CSV carrying both the functional rows and the Hoelder rows
    if (!cfg.out.empty()) {
        const std::string cfg_line = config_to_json(cfg).dump();
        std::string csv = sweep::render_csv(res.functional, cfg_line);
        const std::string holder_csv = sweep::render_csv(res.holder, cfg_line);
        const auto header_end = holder_csv.find(sweep::csv_header);
        csv += holder_csv.substr(header_end + std::string(sweep::csv_header).size() + 1);
        sweep::write_file(cfg.out, csv);
    }
    if (!cfg.summary.empty())
        sweep::write_file(
            cfg.summary,
            sweep::summary_json(res.functional, config_to_json(cfg)).dump(2) + "\n");
    if (res.functional.fit) {
        out << res.functional.experiment_id << ": slope "
            << sweep::fmt_double(res.functional.fit->slope) << "  r^2 "
            << sweep::fmt_double(res.functional.fit->r_squared);
        if (res.functional.fit->target)
            out << "  target " << sweep::fmt_double(*res.functional.fit->target);
        out << "  points " << res.functional.fit->point_count << "  excluded "
            << res.functional.excluded_count << "\n";
    }
    const double tol = cfg.tol_slope > 0.0 ? cfg.tol_slope : 0.2;
    if (kind == born::PotentialKind::annulus_only) {
        // contrast gate: no growth without the tuned oscillation
        if (!res.functional.fit) return exit_numerical;
        return res.functional.fit->slope <= tol ? exit_ok : exit_fit;
    }
    return fit_gate(res.functional, mp.growth_target(), tol, err);
}

inline int cmd_holder(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ModelParams mp = cfg.model();
    auto res = born::holder_scaling_experiment(mp, dyadic_grid(cfg.L_min, cfg.L_max),
                                               resolve_threads(cfg));
    persist(res, cfg, out);
    const double tol = cfg.tol_slope > 0.0 ? cfg.tol_slope : 0.05;
    return fit_gate(res, mp.alpha, tol, err);
}

}  // namespace detail

/// Flag-level entry point; flags > config file > defaults.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    bool have_config = false;

    // config file first, so flags can override it
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            have_config = true;
            std::ifstream in(args[i + 1]);
            if (!in) {
                err << "cannot open config file: " << args[i + 1] << "\n";
                return exit_validation;
            }
            try {
                nlohmann::json j;
                in >> j;
                config_from_json(j, cfg);
            } catch (const std::exception& e) {
                err << "bad config file: " << e.what() << "\n";
                return exit_validation;
            }
        }
    }

    CLI::App app{"borngap: resolvent kernels, oscillatory quadrature and "
                 "dispersive-decay experiments"};
    app.require_subcommand(0, 1);
    std::string config_path;

    auto add_common = [&](CLI::App* sub, bool needs_n) {
        auto* n_opt = sub->add_option("--n", cfg.n, "spatial dimension (odd)");
        if (needs_n && !have_config) n_opt->required();
        sub->add_option("--m", cfg.m, "operator order");
        sub->add_option("--alpha", cfg.alpha, "Hoelder exponent");
        sub->add_option("--p", [&cfg](const std::vector<std::string>& vals) {
               if (vals.empty()) return false;
               if (vals[0] == "inf")
                   cfg.p = std::numeric_limits<double>::infinity();
               else
                   cfg.p = std::stod(vals[0]);
               return true;
           },
           "pairing exponent in [1,2] or 'inf'");
        sub->add_option("--delta", cfg.delta, "annulus half-width");
        sub->add_option("--c-ball", cfg.c_ball, "concentration constant");
        sub->add_option("--L-min", cfg.L_min, "smallest dyadic L");
        sub->add_option("--L-max", cfg.L_max, "largest dyadic L");
        sub->add_option("--t-min", cfg.t_min, "smallest t");
        sub->add_option("--t-max", cfg.t_max, "largest t");
        sub->add_option("--t-points", cfg.t_points, "t grid size");
        sub->add_option("--r-points", cfg.r_points, "r grid size");
        sub->add_option("--band-L-min", cfg.band_L_min, "first dispersive band scale");
        sub->add_option("--band-L-points", cfg.band_L_points, "dispersive band count");
        sub->add_option("--sigma", cfg.sigma, "spectral twist exponent");
        sub->add_option("--sigmas", cfg.sigmas, "sigma probe grid");
        sub->add_option("--potential", cfg.potential, "vl (tuned) or rho (contrast)");
        sub->add_option("--rel-tol", cfg.rel_tol, "quadrature relative tolerance");
        sub->add_option("--out", cfg.out, "CSV output path");
        sub->add_option("--summary", cfg.summary, "summary JSON path");
        sub->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
        sub->add_option("--tol-slope", cfg.tol_slope, "slope acceptance tolerance");
        sub->add_option("--config", config_path, "JSON config file (already applied)");
    };

    auto* kernel = app.add_subcommand("kernel", "evaluate resolvent kernels at a point");
    kernel->add_option("--lambda", cfg.lambda, "spectral parameter");
    kernel->add_option("--r", cfg.r, "distance");
    kernel->add_option("--sign", cfg.sign, "+ or -");
    add_common(kernel, true);

    auto* freed = app.add_subcommand("free-dispersive",
                                     "fit the free-kernel decay law sup |K| ~ t^{-n/2}");
    add_common(freed, true);
    auto* probe = app.add_subcommand("sigma-probe", "bound the <sigma> growth exponent");
    add_common(probe, true);
    auto* growth = app.add_subcommand("born-growth",
                                      "fit |a_{1,L}(V_L)| / ||V_L||_{C^alpha} against L");
    add_common(growth, true);
    auto* holder = app.add_subcommand("holder", "fit ||V_L||_{C^alpha} against L");
    add_common(holder, false);

    std::vector<const char*> argv;
    argv.push_back("borngap");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return exit_validation;
    }

    try {
        if (kernel->parsed()) cfg.subcommand = "kernel";
        if (freed->parsed()) cfg.subcommand = "free-dispersive";
        if (probe->parsed()) cfg.subcommand = "sigma-probe";
        if (growth->parsed()) cfg.subcommand = "born-growth";
        if (holder->parsed()) cfg.subcommand = "holder";
        if (kernel->parsed()) return detail::cmd_kernel(cfg, out);
        if (freed->parsed()) return detail::cmd_free_dispersive(cfg, out, err);
        if (probe->parsed()) return detail::cmd_sigma_probe(cfg, out, err);
        if (growth->parsed()) return detail::cmd_born_growth(cfg, out, err);
        if (holder->parsed()) return detail::cmd_holder(cfg, out, err);
        out << app.help();
        return exit_validation;
    } catch (const nonconvergence_error& e) {
        err << "nonconvergence: " << e.what() << "\n";
        return exit_numerical;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return (e.code() == errc::nonconvergence) ? exit_numerical : exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }
}

}  // namespace borngap::cli
