#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "borngap/cutoff.hpp"
#include "borngap/oracle.hpp"
#include "borngap/oscillatory.hpp"

using namespace borngap;
using namespace borngap::osc;

namespace {

PhaseAmplitudeIntegral make_integral(double t, int m, double R, double sigma, double a,
                                     double b, std::function<complex(double)> amp) {
    PhaseAmplitudeIntegral I;
    I.t = t;
    I.m = m;
    I.R = R;
    I.sigma = sigma;
    I.a = a;
    I.b = b;
    I.amplitude = std::move(amp);
    return I;
}

const auto one = [](double) { return complex{1.0, 0.0}; };

}  // namespace

TEST_SUITE_BEGIN("oscillatory");

TEST_CASE("linear phase against the closed form (e^{iw}-1)/(iw)") {
    const double w = 200.0;
    auto I = make_integral(0.0, 1, w, 0.0, 0.0, 1.0, one);
    auto r = integrate(I);
    const complex expect = (std::exp(iu * w) - 1.0) / (iu * w);
    CHECK(std::abs(r.value - expect) <= 1e-10 * std::abs(expect));
}

TEST_CASE("non-oscillatory polynomial") {
    auto I = make_integral(0.0, 1, 0.0, 0.0, 1.0, 2.0,
                           [](double l) { return complex{l, 0.0}; });
    auto r = integrate(I);
    CHECK(std::abs(r.value - complex{1.5, 0.0}) < 1e-12);
}

TEST_CASE("engine agrees with the brute-force oracle on 200 seeded cases") {
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int checked = 0;
    while (checked < 200) {
        const int m = (uni(rng) < 0.5) ? 1 : 2;
        double t = (uni(rng) < 0.2) ? 0.0 : (uni(rng) * 60.0 - 30.0);
        double R = uni(rng) * 120.0 - 60.0;
        const double sigma = (uni(rng) < 0.5) ? 0.0 : (uni(rng) * 16.0 - 8.0);
        const double a = 0.2 + 1.8 * uni(rng);
        const double b = a + 0.3 + 2.7 * uni(rng);
        // random smooth amplitude: complex polynomial times a gentle envelope
        std::vector<complex> coef(5);
        for (auto& c : coef) c = complex{2.0 * uni(rng) - 1.0, 2.0 * uni(rng) - 1.0};
        const double env_c = 3.0 * uni(rng);
        const double env_l0 = a + (b - a) * uni(rng);
        auto amp = [coef, env_c, env_l0](double l) {
            complex p{0.0, 0.0};
            for (int k = static_cast<int>(coef.size()) - 1; k >= 0; --k)
                p = p * l + coef[k];
            return p * std::exp(-env_c * (l - env_l0) * (l - env_l0));
        };
        auto I = make_integral(t, m, R, sigma, a, b, amp);
        auto engine = integrate(I);
        auto oracle = integrate_oracle(I);
        double scale = 0.0;
        for (double l = a; l <= b; l += (b - a) / 16.0)
            scale = std::max(scale, std::abs(amp(l)));
        const double denom = std::max(std::abs(oracle.value), 1e-12 * scale * (b - a));
        CHECK(std::abs(engine.value - oracle.value) <= 1e-8 * denom);
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("oracle sanity: closed form, symmetry, refusal") {
    const double w = 37.0;
    auto lin = make_integral(0.0, 1, w, 0.0, 0.0, 1.0, one);
    auto r = integrate_oracle(lin);
    const complex expect = (std::exp(iu * w) - 1.0) / (iu * w);
    CHECK(std::abs(r.value - expect) <= 1e-12);

    // odd amplitude, even phase, symmetric interval
    auto odd = make_integral(0.0, 1, 0.0, 0.0, -1.3, 1.3,
                             [](double l) { return complex{l * l * l, 0.1 * l}; });
    CHECK(std::abs(integrate_oracle(odd).value) < 1e-12);

    auto wild = make_integral(3.0e5, 2, 0.0, 0.0, 0.2, 5.0, one);
    CHECK_THROWS_AS(integrate_oracle(wild), unsupported_error);
}

TEST_CASE("stationary point data") {
    auto d1 = stationary_point(1.0, 1, 2.0);
    CHECK(d1.lambda0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d1.cm == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(2.0 * 1 * d1.lambda0 - 2.0) < 1e-13);  // Phi'(l0) = 0

    auto d2 = stationary_point(0.7, 2, 1.3);
    CHECK(d2.cm == doctest::Approx(-3.0 * std::pow(2.0, -4.0 / 3.0)).epsilon(1e-13));
    CHECK(std::abs(d2.cm - (-1.190551)) < 1e-6);
    CHECK(d2.second_deriv ==
          doctest::Approx(12.0 * 0.7 * ipow(d2.lambda0, 2)).epsilon(1e-13));

    CHECK_THROWS_AS(stationary_point(0.0, 1, 1.0), domain_error);
    CHECK_THROWS_AS(stationary_point(1.0, 1, -2.0), domain_error);
}

TEST_CASE("rescaled-phase identity on a 3x3x3 grid") {
    for (int m : {1, 2, 3}) {
        for (double R : {0.5, 1.0, 2.0}) {
            for (double L : {3.0, 17.0, 120.0}) {
                auto d = stationary_point(L, m, L * R);
                const double lhs = d.phase_at_crit;
                const double rhs = stationary_phase_rescaled(m, R, L);
                CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
            }
        }
    }
}

TEST_CASE("leading term reproduces the Fresnel integral") {
    // phase (L/2) l^2 - L l, critical point at 1, window [0, 2]
    double prev_dev = 1e9;
    for (double L : {1.0e2, 1.0e3, 1.0e4}) {
        auto I = make_integral(0.5 * L, 1, -L, 0.0, 0.0, 2.0, one);
        auto lead = stationary_leading_term(I);
        const complex exact_fresnel =
            std::sqrt(2.0 * pi / L) * std::exp(iu * (I.phase(1.0) + 0.25 * pi));
        CHECK(std::abs(lead.value - exact_fresnel) < 1e-13 * std::abs(exact_fresnel));
        const double dev = std::abs(integrate(I).value / lead.value - 1.0);
        CHECK(dev <= 1.0 / std::sqrt(L));  // sharp-endpoint boundary terms
        CHECK(dev < prev_dev);
        prev_dev = dev;
    }
    // with a smooth window the deviation drops at the O(1/L) interior rate
    CutoffSpec win{CutoffKind::chi, 0.4, 1.8, 0.7, 1.4};
    for (double L : {1.0e2, 1.0e3}) {
        auto I = make_integral(0.5 * L, 1, -L, 0.0, 0.0, 2.0,
                               [win](double l) { return complex{win(l), 0.0}; });
        const double dev =
            std::abs(integrate(I).value / stationary_leading_term(I).value - 1.0);
        CHECK(dev <= 10.0 / L);
    }
}

TEST_CASE("leading term vs engine for the rescaled phase L(l^{2m} - 2 l)") {
    for (int m : {1, 2}) {
        const double l0 = std::pow(1.0 / m, 1.0 / (2.0 * m - 1.0));
        CutoffSpec win{CutoffKind::chi, 0.55 * l0, 1.7 * l0, 0.8 * l0, 1.35 * l0};
        double prev_dev = 1e9;
        for (double L : {1.0e2, 1.0e3, 1.0e4}) {
            auto I = make_integral(L, m, -2.0 * L, 0.0, 0.4 * l0, 2.0 * l0,
                                   [win](double l) { return complex{win(l), 0.0}; });
            const double dev =
                std::abs(integrate(I).value / stationary_leading_term(I).value - 1.0);
            CHECK(dev <= 20.0 / L);
            CHECK(dev < prev_dev);
            prev_dev = dev;
        }
    }
}

TEST_CASE("opposite-sign linear phase has no critical point and collapses") {
    CutoffSpec win{CutoffKind::chi, 0.5, 1.5, 0.75, 1.25};
    auto winamp = [win](double l) { return complex{win(l), 0.0}; };
    std::vector<double> Ls = {30.0, 60.0, 120.0, 240.0};
    std::vector<double> logL, logI;
    for (double L : Ls) {
        auto I = make_integral(L, 1, +2.0 * L, 0.0, 0.5, 1.5, winamp);
        CHECK_THROWS_AS(stationary_leading_term(I), domain_error);
        QuadratureSpec tight;
        tight.rel_tol = 1e-11;
        auto r = integrate(I, tight);
        logL.push_back(std::log(L));
        logI.push_back(std::log(std::abs(r.value)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(Ls.size());
    for (int i = 0; i < n; ++i) {
        sx += logL[i];
        sy += logI[i];
        sxx += logL[i] * logL[i];
        sxy += logL[i] * logI[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope < -3.0);
}

TEST_CASE("linearity in the amplitude") {
    auto a1 = [](double l) { return complex{std::cos(l), 0.2 * l}; };
    auto a2 = [](double l) { return complex{1.0 / (1.0 + l), std::sin(2 * l)}; };
    const complex ca{2.0, -1.0}, cb{-0.5, 0.3};
    auto Ia = make_integral(3.0, 1, -11.0, 0.0, 0.3, 2.4, a1);
    auto Ib = make_integral(3.0, 1, -11.0, 0.0, 0.3, 2.4, a2);
    auto Iab = make_integral(3.0, 1, -11.0, 0.0, 0.3, 2.4, [=](double l) {
        return ca * a1(l) + cb * a2(l);
    });
    auto ra = integrate(Ia), rb = integrate(Ib), rab = integrate(Iab);
    const complex combo = ca * ra.value + cb * rb.value;
    const double budget = std::abs(ca) * ra.err_estimate + std::abs(cb) * rb.err_estimate +
                          rab.err_estimate + 1e-12 * std::abs(rab.value);
    CHECK(std::abs(rab.value - combo) <= std::max(budget, 1e-14));
}

TEST_CASE("conjugation symmetry") {
    auto amp = [](double l) { return complex{std::exp(-l), 0.4 * std::sin(l)}; };
    for (double sigma : {0.0, 2.5}) {
        auto I = make_integral(1.7, 2, -9.0, sigma, 0.4, 2.9, amp);
        auto r = integrate(I);
        auto rc = integrate(conjugated(I));
        CHECK(std::abs(rc.value - std::conj(r.value)) <=
              r.err_estimate + rc.err_estimate + 1e-12 * std::abs(r.value));
    }
}

TEST_CASE("change-of-variables scaling identity") {
    // |J(t, r)| = r^{-nm} |J(t r^{-2m}, 1)| with the cutoff rescaled along
    const int n = 5;
    CutoffSpec chi = make_chi();
    auto smooth = [](double u) { return std::exp(-(u - 1.0) * (u - 1.0)) * (1.0 + 0.3 * u); };
    for (int m : {1, 2}) {
        for (double sigma : {0.0, 3.0}) {
            for (double r : {1.7, 0.6}) {
                const double t = 0.3;
                const double power = n * m - 1.0;
                auto J1 = make_integral(
                    t, m, -r, sigma, chi.support_lo, chi.support_hi,
                    [&, r](double l) {
                        return complex{std::pow(l, power) * smooth(l * r) * chi(l), 0.0};
                    });
                auto J2 = make_integral(
                    t * std::pow(r, -2.0 * m), m, -1.0, sigma, r * chi.support_lo,
                    r * chi.support_hi, [&, r](double mu) {
                        return complex{std::pow(mu, power) * smooth(mu) * chi(mu / r), 0.0};
                    });
                const double lhs = std::abs(integrate(J1).value);
                const double rhs = std::pow(r, -power - 1.0) * std::abs(integrate(J2).value);
                CHECK(std::abs(lhs - rhs) <= 3e-7 * std::max(lhs, rhs));
            }
        }
    }
}

TEST_CASE("error estimate decreases under panel doubling") {
    CutoffSpec win{CutoffKind::chi, 0.5, 2.0, 0.75, 1.5};
    std::vector<PhaseAmplitudeIntegral> regression;
    regression.push_back(make_integral(40.0, 1, -70.0, 0.0, 0.5, 2.0, [win](double l) {
        return complex{win(l), 0.0};
    }));
    regression.push_back(make_integral(11.0, 2, 23.0, 3.0, 0.6, 1.9, [](double l) {
        return complex{std::cos(3 * l), std::sin(l)};
    }));
    regression.push_back(make_integral(0.0, 1, 150.0, 0.0, 0.2, 1.2, [](double l) {
        return complex{1.0 / (0.3 + l * l), 0.0};
    }));
    for (const auto& I : regression) {
        std::vector<double> errs;
        for (int depth : {0, 1, 2}) {
            QuadratureSpec s;
            s.presplit = depth;
            s.abs_tol = 1e290;  // stop after the first refinement: err is the
            s.rel_tol = 1e290;  // raw panel-doubling difference at this depth
            errs.push_back(integrate(I, s).err_estimate);
        }
        double amax = 0.0;
        for (double l = I.a; l <= I.b; l += (I.b - I.a) / 64.0)
            amax = std::max(amax, std::abs(I.amplitude(l)));
        const double floor = 64.0 * 2.22e-16 * amax * (I.b - I.a);
        CHECK(errs[1] <= std::max(errs[0], floor));
        CHECK(errs[2] <= std::max(errs[1], floor));
    }
}

TEST_CASE("validation and failure paths") {
    auto bad_support = make_integral(1.0, 1, 1.0, 0.0, 2.0, 1.0, one);
    CHECK_THROWS_AS(integrate(bad_support), validation_error);

    auto big_sigma = make_integral(1.0, 1, 1.0, 17.0, 0.5, 1.0, one);
    CHECK_THROWS_AS(integrate(big_sigma), unsupported_error);

    auto sigma_at_zero = make_integral(1.0, 1, 1.0, 2.0, 0.0, 1.0, one);
    CHECK_THROWS_AS(integrate(sigma_at_zero), validation_error);

    auto bad_order = make_integral(1.0, 1, 1.0, 0.0, 0.5, 1.0, one);
    QuadratureSpec s;
    s.collocation_order = 3;
    CHECK_THROWS_AS(integrate(bad_order, s), validation_error);

    // nonconvergence carries the best estimate so far
    auto spiky = make_integral(5.0, 1, -40.0, 0.0, 0.2, 3.0, [](double l) {
        return complex{std::exp(-1e4 * (l - 1.0) * (l - 1.0)), 0.0};
    });
    QuadratureSpec cramped;
    cramped.max_panels = 8;
    cramped.rel_tol = 1e-13;
    cramped.abs_tol = 1e-300;
    try {
        integrate(spiky, cramped);
        CHECK(false);
    } catch (const nonconvergence_error& e) {
        CHECK(std::isfinite(e.best.value.real()));
        CHECK(std::isfinite(e.best.value.imag()));
        CHECK(e.best.err_estimate >= 0.0);
    }
}

TEST_SUITE_END();
