#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "borngap/cutoff.hpp"
#include "borngap/kernels.hpp"
#include "borngap/oscillatory.hpp"
#include "borngap/params.hpp"
#include "borngap/sweep.hpp"

namespace borngap::dispersive {

/// Point query for the frequency-localized free kernel of
/// H_0^{(n(m-1)+i sigma)/(2m)} e^{i t H_0} chi(H_0^{1/2m}/L).
struct DispersiveQuery {
    ModelParams params;
    double t = 1.0;
    double sigma = 0.0;
    double L = 1.0;
    double r = 0.0;
    CutoffSpec cutoff = make_chi();

    void validate() const {
        params.validate_basic();
        if (!(t > 0.0)) throw validation_error("dispersive query: t must be > 0");
        if (!(L > 0.0)) throw validation_error("dispersive query: L must be > 0");
        if (r < 0.0) throw validation_error("dispersive query: r must be >= 0");
        if (std::abs(sigma) > 16.0)
            throw unsupported_error("dispersive query: |sigma| <= 16");
        cutoff.validate();
        if (!(cutoff.support_lo > 0.0))
            throw validation_error("dispersive cutoff must stay away from frequency 0");
    }
};

namespace detail {

/// (1/(i pi)) int_0^inf e^{it l^{2m}} l^{n(m-1)+1+i sigma}
///            [R_0^+ - R_0^-](l^2)(r) chi(l/L) dl,
/// with t of either sign (the public query enforces t > 0; negative t is the
/// conjugation partner used in tests).
inline KernelValue kernel_signed(const DispersiveQuery& q, double t,
                                 const osc::QuadratureSpec& quad) {
    const int n = q.params.n, m = q.params.m;
    const double power = n * (m - 1.0) + 1.0;
    const double la = q.L * q.cutoff.support_lo;
    const double lb = q.L * q.cutoff.support_hi;
    osc::QuadratureSpec spec = quad;
    spec.abs_tol = 1e-280;  // relative control only; tiny values hit the
                            // engine's roundoff floor instead
    const complex pref = 1.0 / (iu * pi);

    if (lb * q.r <= 8.0) {
        // mild oscillation from e^{+/- i l r}: the entire-series difference
        // is stable here (including r = 0) and rides along as amplitude
        osc::PhaseAmplitudeIntegral I;
        I.t = t;
        I.m = m;
        I.R = 0.0;
        I.sigma = q.sigma;
        I.a = la;
        I.b = lb;
        I.amplitude = [&q, n, power](double l) {
            return std::pow(l, power) * kernels::resolvent_difference(n, l, q.r) *
                   q.cutoff(l / q.L);
        };
        auto res = osc::integrate(I, spec);
        return {pref * res.value, res.err_estimate / pi};
    }

    // two oscillatory routes e^{i(t l^{2m} +/- l r)} with polynomial symbols
    osc::PhaseAmplitudeIntegral Ip, Im;
    Ip.t = Im.t = t;
    Ip.m = Im.m = m;
    Ip.sigma = Im.sigma = q.sigma;
    Ip.a = Im.a = la;
    Ip.b = Im.b = lb;
    Ip.R = +q.r;
    Im.R = -q.r;
    Ip.amplitude = [&q, n, power](double l) {
        return std::pow(l, power) * kernels::schrodinger_polypart(n, complex{l, 0.0}, q.r) *
               q.cutoff(l / q.L);
    };
    Im.amplitude = [&q, n, power](double l) {
        return std::pow(l, power) * kernels::schrodinger_polypart(n, complex{-l, 0.0}, q.r) *
               q.cutoff(l / q.L);
    };
    auto rp = osc::integrate(Ip, spec);
    auto rm = osc::integrate(Im, spec);
    return {pref * (rp.value - rm.value), (rp.err_estimate + rm.err_estimate) / pi};
}

}  // namespace detail

inline KernelValue free_dispersive_kernel(const DispersiveQuery& q,
                                          const osc::QuadratureSpec& quad = {}) {
    q.validate();
    return detail::kernel_signed(q, q.t, quad);
}

/// |free kernel| of the exact unit-mass propagator for m = 1 comparisons.
inline double propagator_reference(int n, double t) {
    return std::pow(4.0 * pi * t, -0.5 * n);
}

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

inline std::vector<double> log_grid(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0.0) || !(hi > lo))
        throw validation_error("log_grid: need positive log-spaced range");
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = lo;
        return g;
    }
    const double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) g[i] = lo * std::exp(step * i);
    return g;
}

inline std::vector<double> default_t_grid() { return log_grid(1e-2, 1e2, 17); }

/// 5 dyadic localization scales anchored at the free-evolution frequency
/// t^{-1/2m}.  Anchoring (like the r grid) keeps the resolved window of
/// u = L t^{1/2m} identical across t.  The window top respects the r-grid
/// reach: the band at scale L carries its stationary contribution at
/// r = 2m t L^{2m-1}, i.e. r/t^{1/2m} = 2m u^{2m-1}, which must stay below
/// the 10^2 t^{1/2m} cap.
inline std::vector<double> anchored_L_grid(double t, int m, int points = 5) {
    const double freq = std::pow(t, -1.0 / (2.0 * m));
    const double u_top =
        std::min(64.0, 0.8 * std::pow(50.0 / m, 1.0 / (2.0 * m - 1.0)));
    const int k_top = static_cast<int>(std::floor(std::log2(u_top * freq)));
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
        g[i] = std::pow(2.0, k_top - (points - 1) + i);
    return g;
}

/// {0} plus 25 log-spaced radii around the free length scale t^{1/2m}.
inline std::vector<double> r_grid_for(double t, int m, int points = 25) {
    const double scale = std::pow(t, 1.0 / (2.0 * m));
    std::vector<double> g{0.0};
    for (double r : log_grid(1e-2 * scale, 1e2 * scale, points)) g.push_back(r);
    return g;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Marks rows whose quadrature error exceeds 1e-6 of the value.
inline std::string low_confidence_flag(const sweep::GridPoint&, const KernelValue& kv) {
    if (kv.err_estimate > 1e-6 * std::abs(kv.value)) return "low_confidence";
    return "";
}

/// S(t) = max over the (L, r) grid of |kernel|, fitted against t in log-log.
/// Expected slope -n/2.
/// L_grid may be empty, meaning the per-t anchored dyadic bands.
inline sweep::SweepResult dispersive_sweep(const ModelParams& params, double sigma,
                                           const std::vector<double>& t_grid,
                                           const std::vector<double>& L_grid = {},
                                           int r_points = 25,
                                           const osc::QuadratureSpec& quad = {},
                                           int threads = 0, int band_points = 5) {
    params.validate_basic();
    if (t_grid.empty()) throw validation_error("dispersive_sweep: empty grid");
    sweep::Experiment exp;
    exp.id = "free_dispersive";
    exp.params = params;
    for (double t : t_grid) {
        const std::vector<double> Ls =
            L_grid.empty() ? anchored_L_grid(t, params.m, band_points) : L_grid;
        for (double L : Ls)
            for (double r : r_grid_for(t, params.m, r_points))
                exp.grid.push_back({L, t, sigma, r});
    }
    exp.eval = [params, sigma, quad](const sweep::GridPoint& g) {
        DispersiveQuery q;
        q.params = params;
        q.t = g.t;
        q.sigma = sigma;
        q.L = g.L;
        q.r = g.r;
        return free_dispersive_kernel(q, quad);
    };
    exp.flagger = low_confidence_flag;
    exp.fit = [params](const std::vector<sweep::SweepRow>& clean)
        -> std::optional<sweep::GrowthFit> {
        std::map<double, double> sup_by_t;
        for (const auto& row : clean) {
            double& s = sup_by_t[row.point.t];
            s = std::max(s, std::abs(row.value));
        }
        std::vector<std::pair<double, double>> pts;
        for (const auto& [t, s] : sup_by_t)
            if (s > 0.0) pts.emplace_back(t, s);
        auto fit = sweep::fit_loglog(pts);
        fit.target = -0.5 * params.n;
        return fit;
    };
    return sweep::run_sweep(exp, threads);
}

/// G(sigma) = sup over the grid of t^{n/2} |kernel|, fitted against
/// 1 + sigma.  The proven upper bound for G is <sigma>^{(n+2)/2} growth;
/// callers assert the fitted slope against that upper bound.
inline sweep::SweepResult sigma_growth_probe(const ModelParams& params,
                                             const std::vector<double>& sigma_grid,
                                             const std::vector<double>& t_grid,
                                             const std::vector<double>& L_grid = {},
                                             int r_points = 13,
                                             const osc::QuadratureSpec& quad = {},
                                             int threads = 0, int band_points = 5) {
    params.validate_basic();
    for (double s : sigma_grid)
        if (s < 0.0 || s > 16.0)
            throw validation_error("sigma_growth_probe: sigma grid must lie in [0, 16]");
    if (sigma_grid.size() < 4)
        throw validation_error("sigma_growth_probe: need at least 4 sigma values");
    sweep::Experiment exp;
    exp.id = "sigma_probe";
    exp.params = params;
    for (double sg : sigma_grid)
        for (double t : t_grid) {
            const std::vector<double> Ls =
                L_grid.empty() ? anchored_L_grid(t, params.m, band_points) : L_grid;
            for (double L : Ls)
                for (double r : r_grid_for(t, params.m, r_points))
                    exp.grid.push_back({L, t, sg, r});
        }
    exp.eval = [params, quad](const sweep::GridPoint& g) {
        DispersiveQuery q;
        q.params = params;
        q.t = g.t;
        q.sigma = g.sigma;
        q.L = g.L;
        q.r = g.r;
        return free_dispersive_kernel(q, quad);
    };
    exp.flagger = low_confidence_flag;
    const double half_n = 0.5 * params.n;
    exp.fit = [params, half_n](const std::vector<sweep::SweepRow>& clean)
        -> std::optional<sweep::GrowthFit> {
        std::map<double, double> sup_by_sigma;
        for (const auto& row : clean) {
            double& s = sup_by_sigma[row.point.sigma];
            s = std::max(s, std::pow(row.point.t, half_n) * std::abs(row.value));
        }
        std::vector<std::pair<double, double>> pts;
        for (const auto& [sg, s] : sup_by_sigma)
            if (s > 0.0) pts.emplace_back(1.0 + sg, s);
        auto fit = sweep::fit_loglog(pts);
        fit.target = 0.5 * (params.n + 2.0);  // proven upper bound
        return fit;
    };
    return sweep::run_sweep(exp, threads);
}

}  // namespace borngap::dispersive
