#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "borngap/common.hpp"
#include "borngap/numerics.hpp"

namespace borngap::osc {

inline double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// ---------------------------------------------------------------------------
// Integral descriptor
// ---------------------------------------------------------------------------

/// Integral of A(l) l^{i sigma} e^{i (t l^{2m} + R l)} over [a, b].  R carries
/// its sign.  The l^{i sigma} twist is treated as part of the amplitude
/// (supports with sigma != 0 must stay away from 0, and |sigma| <= 16).
struct PhaseAmplitudeIntegral {
    double t = 0.0;
    int m = 1;
    double R = 0.0;
    double sigma = 0.0;
    double a = 0.0;
    double b = 1.0;
    std::function<complex(double)> amplitude;

    void validate() const {
        if (m < 1) throw validation_error("oscillatory: order m must be >= 1");
        if (!(a < b)) throw validation_error("oscillatory: support needs a < b");
        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(t) ||
            !std::isfinite(R) || !std::isfinite(sigma))
            throw validation_error("oscillatory: parameters must be finite");
        if (std::abs(sigma) > 16.0)
            throw unsupported_error("oscillatory: |sigma| <= 16 required");
        if (sigma != 0.0 && !(a > 0.0))
            throw validation_error("oscillatory: sigma twist needs support away from 0");
        if (!amplitude) throw validation_error("oscillatory: amplitude not set");
    }

    double phase(double l) const { return t * ipow(l, 2 * m) + R * l; }
    double dphase(double l) const { return 2.0 * m * t * ipow(l, 2 * m - 1) + R; }
    double d2phase(double l) const {
        return 2.0 * m * (2.0 * m - 1.0) * t * ipow(l, 2 * m - 2);
    }
    complex eval_amplitude(double l) const {
        complex v = amplitude(l);
        if (sigma != 0.0) v *= std::exp(iu * sigma * std::log(l));
        return v;
    }
    complex integrand(double l) const {
        return eval_amplitude(l) * std::exp(iu * phase(l));
    }
};

/// Conjugate partner: integrate(conjugated(I)) == conj(integrate(I)).
inline PhaseAmplitudeIntegral conjugated(const PhaseAmplitudeIntegral& I) {
    PhaseAmplitudeIntegral J = I;
    J.t = -I.t;
    J.R = -I.R;
    J.sigma = -I.sigma;
    J.amplitude = [f = I.amplitude](double l) { return std::conj(f(l)); };
    return J;
}

struct QuadratureSpec {
    int collocation_order = 32;
    int max_panels = 400;
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;
    int presplit = 0;  // extra global halvings before the first pass

    void validate() const {
        if (collocation_order < 4 || collocation_order > 64)
            throw validation_error("quadrature: collocation order must be in [4, 64]");
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw validation_error("quadrature: tolerances must be positive");
        if (max_panels < 1) throw validation_error("quadrature: max_panels must be >= 1");
        if (presplit < 0 || presplit > 12)
            throw validation_error("quadrature: presplit must be in [0, 12]");
    }
};

// ---------------------------------------------------------------------------
// Stationary points of the core phase
// ---------------------------------------------------------------------------

/// Zeros of Phi'(l) = 2mt l^{2m-1} + R inside (a, b), solved in closed form
/// (the odd power makes the real root unique; R = 0 puts it at l = 0).
inline std::vector<double> interior_stationary_points(const PhaseAmplitudeIntegral& I) {
    std::vector<double> pts;
    if (I.t == 0.0) return pts;  // linear phase
    double root;
    if (I.R == 0.0) {
        root = 0.0;
    } else {
        const double target = -I.R / (2.0 * I.m * I.t);
        root = (target >= 0.0 ? 1.0 : -1.0) *
               std::pow(std::abs(target), 1.0 / (2.0 * I.m - 1.0));
    }
    if (root > I.a && root < I.b) pts.push_back(root);
    return pts;
}

struct StationaryPointData {
    double lambda0 = 0.0;
    double phase_at_crit = 0.0;
    double second_deriv = 0.0;
    double cm = 0.0;
};

/// Critical point of t l^{2m} - R l on (0, inf) for t, R > 0, with the
/// constant c_m = (1/m)^{2m/(2m-1)} (1 - 2m).
inline StationaryPointData stationary_point(double t, int m, double R) {
    if (!(t > 0.0) || !(R > 0.0))
        throw domain_error("stationary_point: t and R must be positive");
    if (m < 1) throw validation_error("stationary_point: m must be >= 1");
    StationaryPointData d;
    const double e = 1.0 / (2.0 * m - 1.0);
    d.lambda0 = std::pow(R / (2.0 * m * t), e);
    d.phase_at_crit = t * ipow(d.lambda0, 2 * m) - R * d.lambda0;
    d.second_deriv = 2.0 * m * (2.0 * m - 1.0) * t * ipow(d.lambda0, 2 * m - 2);
    d.cm = std::pow(1.0 / m, 2.0 * m * e) * (1.0 - 2.0 * m);
    return d;
}

/// Phase value at the critical point of the rescaled phase L(l^{2m} - l R):
/// c_m L (R/2)^{2m/(2m-1)}.
inline double stationary_phase_rescaled(int m, double R, double L) {
    const double cm = std::pow(1.0 / m, 2.0 * m / (2.0 * m - 1.0)) * (1.0 - 2.0 * m);
    return cm * L * std::pow(0.5 * R, 2.0 * m / (2.0 * m - 1.0));
}

/// Leading stationary-phase term sqrt(2 pi / |Phi''|) A(l0)
/// e^{i Phi(l0) + i pi/4 sgn Phi''}.  Closed form: err_estimate = 0.
inline KernelValue stationary_leading_term(const PhaseAmplitudeIntegral& I) {
    I.validate();
    const auto pts = interior_stationary_points(I);
    if (pts.empty())
        throw domain_error(
            "stationary_leading_term: no interior critical point (nonstationary regime)");
    const double l0 = pts.front();
    const double dd = I.d2phase(l0);
    if (dd == 0.0)
        throw domain_error("stationary_leading_term: degenerate critical point");
    const double sgn = dd > 0.0 ? 1.0 : -1.0;
    const complex val = std::sqrt(2.0 * pi / std::abs(dd)) * I.eval_amplitude(l0) *
                        std::exp(iu * (I.phase(l0) + 0.25 * pi * sgn));
    return {val, 0.0};
}

// ---------------------------------------------------------------------------
// Levin collocation panel
// ---------------------------------------------------------------------------

namespace detail {

struct ChebCache {
    std::vector<double> points;
    std::vector<double> diff;  // row-major (n+1)^2
};

inline const ChebCache& cheb_cache(int n) {
    static std::map<int, ChebCache> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, ChebCache{num::cheb_points(n), num::cheb_diff_matrix(n)})
                 .first;
    return it->second;
}

/// One Levin panel: solve u' + i Phi' u = A at Chebyshev points, return
/// u e^{i Phi} differenced across the panel.  `amax` tracks the largest
/// amplitude magnitude seen (used for the roundoff floor).
inline complex levin_panel(const PhaseAmplitudeIntegral& I, double p, double q, int order,
                           double& amax) {
    const ChebCache& cc = cheb_cache(order);
    const int size = order + 1;
    const double mid = 0.5 * (p + q), half = 0.5 * (q - p);
    std::vector<complex> mat(size * size);
    std::vector<complex> rhs(size);
    for (int i = 0; i < size; ++i) {
        const double l = mid + half * cc.points[i];
        for (int j = 0; j < size; ++j) mat[i * size + j] = cc.diff[i * size + j] / half;
        mat[i * size + i] += iu * I.dphase(l);
        rhs[i] = I.eval_amplitude(l);
        amax = std::max(amax, std::abs(rhs[i]));
    }
    if (!num::solve_complex_lu(mat, rhs, size))
        throw domain_error("levin collocation matrix singular");
    const complex at_q = rhs[0] * std::exp(iu * I.phase(q));       // x = +1
    const complex at_p = rhs[size - 1] * std::exp(iu * I.phase(p));  // x = -1
    return at_q - at_p;
}

struct Panel {
    double lo, hi;
    bool stationary;  // contains or abuts a phase-derivative zero
};

/// Half-width around a stationary point where the phase stays within
/// ~10 radians of its critical value.
inline double stationary_core_width(const PhaseAmplitudeIntegral& I, double s,
                                    double max_w) {
    const double p0 = I.phase(s);
    double w = max_w;
    // shrink while the phase excursion is too large
    for (int iter = 0; iter < 80; ++iter) {
        const double excursion =
            std::max(std::abs(I.phase(s + w) - p0), std::abs(I.phase(s - w) - p0));
        if (excursion <= 10.0) break;
        w *= 0.5;
    }
    return w;
}

inline void push_geometric(std::vector<Panel>& panels, double from, double to,
                           double anchor) {
    // panels growing geometrically away from `anchor` (a stationary core edge)
    if (from >= to) return;
    double x = from;
    while (x < to) {
        double next = anchor + 2.0 * (x - anchor);
        if (next <= x || next > to * (1.0 - 1e-14) || to - next < 1e-12 * (to - from))
            next = to;
        panels.push_back({x, next, false});
        x = next;
    }
}

inline void push_geometric_rev(std::vector<Panel>& panels, double from, double to,
                               double anchor) {
    // same, approaching `anchor` from the left
    if (from >= to) return;
    std::vector<Panel> rev;
    double x = to;
    while (x > from) {
        double next = anchor - 2.0 * (anchor - x);
        if (next >= x || next < from * (1.0 + 1e-14) || next - from < 1e-12 * (to - from))
            next = from;
        rev.push_back({next, x, false});
        x = next;
    }
    panels.insert(panels.end(), rev.rbegin(), rev.rend());
}

inline std::vector<Panel> structural_panels(const PhaseAmplitudeIntegral& I,
                                            const std::vector<double>& stat_pts) {
    std::vector<Panel> panels;
    if (stat_pts.empty()) {
        panels.push_back({I.a, I.b, false});
        return panels;
    }
    const double s = stat_pts.front();  // unique for these phases
    const double max_w = std::min(s - I.a, I.b - s);
    if (max_w <= 0.0) {
        panels.push_back({I.a, I.b, false});
        return panels;
    }
    const double w = stationary_core_width(I, s, max_w);
    push_geometric_rev(panels, I.a, s - w, s);
    panels.push_back({s - w, s + w, true});
    push_geometric(panels, s + w, I.b, s);
    return panels;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The integration engine
// ---------------------------------------------------------------------------

/// Levin collocation per panel where |Phi'| is bounded away from zero,
/// adaptive Gauss-Kronrod on stationary/slow panels; the error estimate is
/// the difference between successive global panel refinements.
inline KernelValue integrate(const PhaseAmplitudeIntegral& I, const QuadratureSpec& spec = {}) {
    I.validate();
    spec.validate();
    const auto stat_pts = interior_stationary_points(I);
    std::vector<detail::Panel> panels = detail::structural_panels(I, stat_pts);
    for (int k = 0; k < spec.presplit; ++k) {
        std::vector<detail::Panel> split;
        split.reserve(panels.size() * 2);
        for (const auto& p : panels) {
            const double mid = 0.5 * (p.lo + p.hi);
            split.push_back({p.lo, mid, p.stationary});
            split.push_back({mid, p.hi, p.stationary});
        }
        panels = std::move(split);
    }

    auto eval_all = [&](const std::vector<detail::Panel>& ps, double& amax) {
        num::CompensatedComplexSum acc;
        for (const auto& p : ps) {
            const double len = p.hi - p.lo;
            const double d_lo = std::abs(I.dphase(p.lo));
            const double d_mid = std::abs(I.dphase(0.5 * (p.lo + p.hi)));
            const double d_hi = std::abs(I.dphase(p.hi));
            const double dmax = std::max({d_lo, d_mid, d_hi});
            const double dmin = std::min({d_lo, d_mid, d_hi});
            const bool slow = dmax * len < 16.0;
            const bool near_zero = p.stationary || dmin < 1e-3 * dmax;
            if (slow || near_zero) {
                auto r = num::integrate_gk_adaptive(
                    [&](double l) { return I.integrand(l); }, p.lo, p.hi,
                    spec.abs_tol / static_cast<double>(ps.size()), 0.3 * spec.rel_tol);
                for (double probe :
                     {p.lo, 0.25 * (3 * p.lo + p.hi), 0.5 * (p.lo + p.hi), p.hi})
                    amax = std::max(amax, std::abs(I.eval_amplitude(probe)));
                acc.add(r.value);
            } else {
                acc.add(detail::levin_panel(I, p.lo, p.hi, spec.collocation_order, amax));
            }
        }
        return acc.value();
    };

    double amax = 0.0;
    complex prev = eval_all(panels, amax);
    double last_err = std::abs(prev);
    for (;;) {
        if (static_cast<int>(panels.size()) * 2 > spec.max_panels) {
            throw nonconvergence_error(
                "oscillatory integral did not converge within max_panels",
                KernelValue{prev, last_err});
        }
        std::vector<detail::Panel> split;
        split.reserve(panels.size() * 2);
        for (const auto& p : panels) {
            const double mid = 0.5 * (p.lo + p.hi);
            split.push_back({p.lo, mid, p.stationary});
            split.push_back({mid, p.hi, p.stationary});
        }
        panels = std::move(split);
        complex cur = eval_all(panels, amax);
        const double err = std::abs(cur - prev);
        const double floor = 64.0 * 2.22e-16 * amax * (I.b - I.a);
        if (err <= std::max({spec.abs_tol, spec.rel_tol * std::abs(cur), floor}))
            return {cur, err};
        prev = cur;
        last_err = err;
    }
}

}  // namespace borngap::osc
