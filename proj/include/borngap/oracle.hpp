#pragma once

#include <cmath>
#include <vector>

#include "borngap/common.hpp"
#include "borngap/numerics.hpp"
#include "borngap/oscillatory.hpp"

namespace borngap::osc {

/// Brute-force reference for `integrate`, for tests: split the support at
/// every zero of cos(Psi) and sin(Psi) (full phase Psi = t l^{2m} + R l +
/// sigma log l, located by bisection on each monotone piece), integrate the
/// sub-arcs by fixed Gauss rules, and sum with compensated summation.
/// Slow by construction and independent of the Levin/GK path.
inline KernelValue integrate_oracle(const PhaseAmplitudeIntegral& I) {
    I.validate();
    const auto psi = [&](double l) {
        double v = I.phase(l);
        if (I.sigma != 0.0) v += I.sigma * std::log(l);
        return v;
    };
    const auto dpsi = [&](double l) {
        double v = I.dphase(l);
        if (I.sigma != 0.0) v += I.sigma / l;
        return v;
    };
    const auto f = [&](double l) { return I.amplitude(l) * std::exp(iu * psi(l)); };

    // monotone pieces of Psi from a dense scan of Psi'
    const int nscan = 4096;
    std::vector<double> pieces{I.a};
    double prev_l = I.a, prev_d = dpsi(I.a);
    for (int k = 1; k <= nscan; ++k) {
        const double l = I.a + (I.b - I.a) * k / nscan;
        const double d = dpsi(l);
        if ((prev_d < 0.0) != (d < 0.0) && prev_d != 0.0)
            pieces.push_back(num::solve_bracketed(dpsi, nullptr, prev_l, l));
        prev_l = l;
        prev_d = d;
    }
    pieces.push_back(I.b);

    // sanity cap on the total oscillation
    double quarter_waves = 0.0;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
        quarter_waves += std::abs(psi(pieces[i + 1]) - psi(pieces[i])) / (0.5 * pi);
    if (quarter_waves > 1.0e6)
        throw unsupported_error("integrate_oracle: phase oscillates too rapidly");

    num::CompensatedComplexSum total;
    double arc_err = 0.0;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        const double lo = pieces[i], hi = pieces[i + 1];
        const double plo = psi(lo), phi_ = psi(hi);
        std::vector<double> cuts{lo};
        // crossings Psi = k pi/2 in increasing order along the piece
        const double step = 0.5 * pi;
        if (phi_ != plo) {
            const bool up = phi_ > plo;
            double k0 = std::ceil(std::min(plo, phi_) / step);
            double k1 = std::floor(std::max(plo, phi_) / step);
            std::vector<double> targets;
            for (double k = k0; k <= k1; k += 1.0) targets.push_back(k * step);
            if (!up) std::reverse(targets.begin(), targets.end());
            for (double target : targets) {
                if ((target - plo) * (target - phi_) >= 0.0) continue;
                cuts.push_back(num::bisect_to(psi, lo, hi, target));
            }
        }
        cuts.push_back(hi);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            if (!(cuts[j + 1] > cuts[j])) continue;
            const complex fine = num::integrate_gl(f, cuts[j], cuts[j + 1], 16);
            const complex coarse = num::integrate_gl(f, cuts[j], cuts[j + 1], 8);
            total.add(fine);
            arc_err += std::abs(fine - coarse);
        }
    }
    return {total.value(), arc_err};
}

}  // namespace borngap::osc
