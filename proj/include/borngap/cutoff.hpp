#pragma once

#include <cmath>
#include <string>

#include "borngap/common.hpp"

namespace borngap {

/// The standard smooth step: 0 for x <= 0, 1 for x >= 1, C^inf monotone
/// in between, built from e^{-1/x}.
inline double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

enum class CutoffKind { psi, phi, rho_delta, chi };

inline std::string to_string(CutoffKind k) {
    switch (k) {
        case CutoffKind::psi: return "psi";
        case CutoffKind::phi: return "phi";
        case CutoffKind::rho_delta: return "rho_delta";
        case CutoffKind::chi: return "chi";
    }
    return "?";
}

/// A concrete smooth plateau bump: 1 on [plateau_lo, plateau_hi], 0 outside
/// (support_lo, support_hi), smooth-step transitions, values in [0,1].
struct CutoffSpec {
    CutoffKind kind = CutoffKind::chi;
    double support_lo = 0.5;
    double support_hi = 2.0;
    double plateau_lo = 0.75;
    double plateau_hi = 1.5;

    void validate() const {
        if (!(support_lo < plateau_lo && plateau_lo < plateau_hi &&
              plateau_hi < support_hi))
            throw validation_error("cutoff: plateau must lie strictly inside support");
    }

    double operator()(double u) const {
        if (u <= support_lo || u >= support_hi) return 0.0;
        if (u < plateau_lo) return smooth_step((u - support_lo) / (plateau_lo - support_lo));
        if (u > plateau_hi) return smooth_step((support_hi - u) / (support_hi - plateau_hi));
        return 1.0;
    }
};

/// chi(lambda/L): dyadic band cutoff with plateau [3/4, 3/2] of relative
/// half-octave margins, optionally widened by `width` (plateau [1/w, w]*c).
inline CutoffSpec make_chi(double width = 1.0) {
    CutoffSpec c;
    c.kind = CutoffKind::chi;
    if (width <= 1.0) {
        c.support_lo = 0.5;
        c.plateau_lo = 0.75;
        c.plateau_hi = 1.5;
        c.support_hi = 2.0;
    } else {
        c.plateau_lo = 1.0 / width;
        c.plateau_hi = width;
        c.support_lo = 0.5 / width;
        c.support_hi = 2.0 * width;
    }
    c.validate();
    return c;
}

/// rho_delta: the potential's annular cutoff, support |z| in (1-d, 1+d),
/// plateau (1-d/2, 1+d/2).
inline CutoffSpec make_rho_delta(double delta) {
    if (!(delta > 0.0 && delta <= 0.25))
        throw validation_error("rho_delta: delta must lie in (0, 1/4]");
    CutoffSpec c;
    c.kind = CutoffKind::rho_delta;
    c.support_lo = 1.0 - delta;
    c.support_hi = 1.0 + delta;
    c.plateau_lo = 1.0 - 0.5 * delta;
    c.plateau_hi = 1.0 + 0.5 * delta;
    c.validate();
    return c;
}

/// psi: the spectral band cutoff in the s = (lambda/L)^{2m} variable.
/// For m = 1 this is plateau [3/4, 3/2] inside support [1/2, 2].  For
/// m >= 2 the window is shifted by kappa_m = (1/m)^{2m/(2m-1)} so that the
/// stationary band s = (R/2m)^{2m/(2m-1)} ~ kappa_m of the Born-term phase
/// stays inside the plateau.
inline CutoffSpec make_psi(int m) {
    if (m < 1) throw validation_error("psi cutoff: m must be >= 1");
    CutoffSpec c;
    c.kind = CutoffKind::psi;
    if (m == 1) {
        c.support_lo = 0.5;
        c.plateau_lo = 0.75;
        c.plateau_hi = 1.5;
        c.support_hi = 2.0;
    } else {
        const double kappa = std::pow(1.0 / m, 2.0 * m / (2.0 * m - 1.0));
        c.support_lo = 0.4 * kappa;
        c.plateau_lo = 0.7 * kappa;
        c.plateau_hi = 1.5;
        c.support_hi = 2.0;
    }
    c.validate();
    return c;
}

}  // namespace borngap
