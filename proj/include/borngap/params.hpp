#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "borngap/common.hpp"

namespace borngap {

/// Model parameter tuple (n, m, alpha, p, delta, C) with the admissibility
/// constraints enforced as validations.  `p` is the pairing exponent of the
/// test functions: a value in [1,2], or infinity meaning the p = 1 pairing
/// against the sup norm (the L^1 -> L^inf experiment).
struct ModelParams {
    int n = 5;         // spatial dimension, odd, >= 3
    int m = 1;         // operator order, >= 1
    double alpha = 0;  // Hoelder exponent, >= 0
    double p = std::numeric_limits<double>::infinity();
    double delta = 0.1;    // annulus half-width, in (0, 1/4]
    double c_ball = 64.0;  // concentration constant, >= 16

    bool p_is_inf() const { return std::isinf(p); }

    /// Exponent actually used in pairings and kernel powers.
    double pairing_p() const { return p_is_inf() ? 1.0 : p; }

    /// Growth target (n+1)/2 - 2m - alpha - n/p', written via the pairing
    /// exponent: n/p + (1-n)/2 - 2m - alpha, which for p = inf reads
    /// (n+1)/2 - 2m - alpha.
    double growth_target() const {
        return static_cast<double>(n) / pairing_p() + 0.5 * (1.0 - n) - 2.0 * m - alpha;
    }

    /// Structural constraints every module relies on.
    void validate_basic() const {
        if (n < 3 || n % 2 == 0)
            throw unsupported_error("dimension n must be odd and >= 3, got n=" +
                                    std::to_string(n));
        if (n > 31)
            throw unsupported_error("dimension n > 31 exceeds the exact coefficient table");
        if (m < 1) throw validation_error("operator order m must be >= 1");
        if (!(alpha >= 0.0)) throw validation_error("alpha must be >= 0");
        if (!p_is_inf() && !(p >= 1.0 && p <= 2.0))
            throw validation_error("p must lie in [1,2] or be inf");
        if (!(delta > 0.0 && delta <= 0.25))
            throw validation_error("delta must lie in (0, 1/4]");
        if (!(c_ball >= 16.0)) throw validation_error("c_ball must be >= 16");
    }

    /// Additional hypotheses required by the counterexample experiments.
    void validate_experiment() const {
        validate_basic();
        if (!(n > 4 * m - 1))
            throw validation_error("counterexample experiments need n > 4m-1, got n=" +
                                   std::to_string(n) + ", m=" + std::to_string(m));
        if (!(growth_target() > 0.0))
            throw validation_error(
                "alpha above the growth threshold: need alpha < " +
                std::to_string(growth_target() + alpha) + ", got alpha=" +
                std::to_string(alpha) + " (no growth is predicted there)");
    }
};

/// A point on the positive spectral axis with the limiting-sign choice
/// selecting the +/- boundary value of the resolvent.
struct SpectralPoint {
    double lambda = 1.0;
    int sign = +1;  // +1 or -1

    void validate() const {
        if (!(lambda > 0.0)) throw domain_error("spectral parameter lambda must be > 0");
        if (sign != 1 && sign != -1) throw validation_error("sign must be +1 or -1");
    }
};

}  // namespace borngap
