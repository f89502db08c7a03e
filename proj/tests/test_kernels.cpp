#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "borngap/kernels.hpp"

using namespace borngap;
using namespace borngap::kernels;

namespace {

// Independent oracle: carry out the dimension-raising derivative
// symbolically on e^{i zeta r} * (Laurent polynomial in 1/r), for one fixed
// zeta at a time.  Shares no code with the integer coefficient recurrence.
complex kernel_by_symbolic_diff(int n, complex zeta, double r) {
    std::map<int, complex> a;  // k -> coefficient of r^{-k}
    a[1] = 1.0 / (4.0 * pi);
    for (int dim = 3; dim < n; dim += 2) {
        std::map<int, complex> b;  // i*zeta*P + P'
        for (const auto& [k, ak] : a) {
            b[k] += iu * zeta * ak;
            b[k + 1] += -static_cast<double>(k) * ak;
        }
        std::map<int, complex> next;
        for (const auto& [k, bk] : b) next[k + 1] = -bk / (2.0 * pi);
        a = std::move(next);
    }
    complex p{0.0, 0.0};
    for (const auto& [k, ak] : a) p += ak * std::pow(r, -k);
    return std::exp(iu * zeta * r) * p;
}

// 8th-order centered first/second derivative stencils.
constexpr double d1c[9] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                           4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};
constexpr double d2c[9] = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                           8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};

template <class F>
complex fd_deriv1(const F& f, double r, double h) {
    complex s{0.0, 0.0};
    for (int k = -4; k <= 4; ++k) s += d1c[k + 4] * f(r + k * h);
    return s / h;
}

template <class F>
complex fd_deriv2(const F& f, double r, double h) {
    complex s{0.0, 0.0};
    for (int k = -4; k <= 4; ++k) s += d2c[k + 4] * f(r + k * h);
    return s / (h * h);
}

double rel_diff(complex a, complex b) {
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("base case n=3 equals e^{i zeta r}/(4 pi r)") {
    auto kv = schrodinger_kernel(3, complex{1.0, 0.0}, 1.0);
    const complex expect = std::exp(iu) / (4.0 * pi);
    CHECK(std::abs(kv.value - expect) < 1e-16);
    CHECK(kv.err_estimate == 0.0);
}

TEST_CASE("zero-energy kernels match the classical fundamental solution") {
    // n = 5 headline value 1/(8 pi^2), then the general constant
    // Gamma(n/2-1)/(4 pi^{n/2}).
    auto kv5 = schrodinger_kernel(5, complex{0.0, 0.0}, 1.0);
    CHECK(std::abs(kv5.value - complex{1.0 / (8.0 * pi * pi), 0.0}) <
          1e-16 / (8 * pi * pi));
    for (int n : {5, 7, 9, 11}) {
        for (double r : {0.5, 1.0, 2.0}) {
            const double expect =
                std::tgamma(0.5 * n - 1.0) / (4.0 * std::pow(pi, 0.5 * n)) *
                std::pow(r, 2.0 - n);
            auto kv = schrodinger_kernel(n, complex{0.0, 0.0}, r);
            CHECK(rel_diff(kv.value, complex{expect, 0.0}) < 1e-14);
        }
    }
}

TEST_CASE("n=5 closed form e^{i l r}(1 - i l r)/(8 pi^2 r^3)") {
    for (double lambda : {0.4, 1.0, 3.7}) {
        for (double r : {0.3, 1.0, 2.6}) {
            const complex expect = std::exp(iu * lambda * r) *
                                   (1.0 - iu * lambda * r) /
                                   (8.0 * pi * pi * r * r * r);
            auto kv = schrodinger_kernel(5, complex{lambda, 0.0}, r);
            CHECK(rel_diff(kv.value, expect) < 1e-15);
        }
    }
}

TEST_CASE("recurrence matches independent symbolic differentiation") {
    const std::vector<complex> zetas = {
        {1.0, 0.0}, {-2.3, 0.0}, {0.7, 1.1}, {0.0, 2.0}, {2.0, 0.4}};
    for (int n : {5, 7, 9, 11, 13}) {
        for (const complex& z : zetas) {
            for (double r : {0.4, 1.0, 1.9}) {
                auto kv = schrodinger_kernel(n, z, r);
                const complex oracle = kernel_by_symbolic_diff(n, z, r);
                CHECK(rel_diff(kv.value, oracle) < 5e-14);
            }
        }
    }
}

TEST_CASE("domain, dimension and branch errors") {
    CHECK_THROWS_AS(schrodinger_kernel(3, complex{1.0, 0.0}, 0.0), domain_error);
    CHECK_THROWS_AS(schrodinger_kernel(3, complex{1.0, 0.0}, -1.0), domain_error);
    CHECK_THROWS_AS(schrodinger_kernel(4, complex{1.0, 0.0}, 1.0), unsupported_error);
    CHECK_THROWS_AS(schrodinger_kernel(2, complex{1.0, 0.0}, 1.0), unsupported_error);
    CHECK_THROWS_AS(schrodinger_kernel(3, complex{1.0, -0.1}, 1.0), branch_error);
    CHECK_THROWS_AS(poly_resolvent_kernel(5, 2, SpectralPoint{-1.0, +1}, 1.0),
                    domain_error);
}

TEST_CASE("conjugate symmetry of boundary values") {
    for (int n : {3, 5, 9}) {
        for (double lambda : {0.6, 1.7}) {
            for (double r : {0.5, 1.3, 2.8}) {
                auto plus = schrodinger_kernel(n, complex{lambda, 0.0}, r).value;
                auto minus = schrodinger_kernel(n, complex{-lambda, 0.0}, r).value;
                CHECK(std::abs(minus - std::conj(plus)) < 1e-15 * std::abs(plus));
            }
        }
    }
    // the full splitting sum keeps the symmetry for every m
    for (int m : {1, 2, 3}) {
        auto plus = poly_resolvent_kernel(9, m, SpectralPoint{1.4, +1}, 1.2).value;
        auto minus = poly_resolvent_kernel(9, m, SpectralPoint{1.4, -1}, 1.2).value;
        CHECK(std::abs(minus - std::conj(plus)) < 1e-14 * std::abs(plus));
    }
}

TEST_CASE("radial Helmholtz residual under finite differences") {
    const double h = 0.004;
    for (int n : {3, 5, 7, 9}) {
        for (double lambda : {0.7, 1.3, 2.2}) {
            auto u = [&](double r) {
                return schrodinger_kernel(n, complex{lambda, 0.0}, r).value;
            };
            for (double r : {0.5, 0.9, 1.6, 2.3, 3.0}) {
                const complex resid = -fd_deriv2(u, r, h) -
                                      (n - 1.0) / r * fd_deriv1(u, r, h) -
                                      lambda * lambda * u(r);
                CHECK(std::abs(resid) <= 1e-6 * std::abs(u(r)) * lambda * lambda);
            }
        }
    }
}

TEST_CASE("poly-harmonic residual: (-Lap)^m kernel = lambda^{2m} kernel") {
    const double h = 0.01;
    for (auto [n, m] : std::vector<std::pair<int, int>>{{5, 1}, {7, 2}, {9, 2}}) {
        for (double lambda : {1.1, 1.8}) {
            auto u = [&](double r) {
                return poly_resolvent_kernel(n, m, SpectralPoint{lambda, +1}, r).value;
            };
            auto lap = [&](auto&& f) {
                return [&, f](double r) {
                    return fd_deriv2(f, r, h) + (n - 1.0) / r * fd_deriv1(f, r, h);
                };
            };
            for (double r : {0.8, 1.4, 2.1}) {
                complex lhs;
                if (m == 1)
                    lhs = -lap(u)(r);
                else
                    lhs = lap(lap(u))(r);
                const complex rhs = std::pow(lambda, 2.0 * m) * u(r);
                CHECK(std::abs(lhs - rhs) <= 1e-4 * std::abs(rhs));
            }
        }
    }
}

TEST_CASE("splitting-difference identity") {
    // [R+ - R-](l^{2m})(r) = (1/(m l^{2m-2})) [R+ - R-](l^2)(r)
    for (int n : {5, 7, 9}) {
        for (int m : {1, 2, 3}) {
            for (double lambda : {0.8, 2.0}) {
                for (double r : {0.9, 1.6, 3.0}) {
                    const complex lhs =
                        poly_resolvent_kernel(n, m, SpectralPoint{lambda, +1}, r).value -
                        poly_resolvent_kernel(n, m, SpectralPoint{lambda, -1}, r).value;
                    const complex rhs =
                        resolvent_difference(n, lambda, r) /
                        (m * std::pow(lambda, 2.0 * m - 2.0));
                    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
                }
            }
        }
    }
    // the (n=9, m=2, lambda=2, r=1) cross-check point
    const complex lhs = poly_resolvent_kernel(9, 2, SpectralPoint{2.0, +1}, 1.0).value -
                        poly_resolvent_kernel(9, 2, SpectralPoint{2.0, -1}, 1.0).value;
    const complex rhs = resolvent_difference(9, 2.0, 1.0) / (2.0 * 4.0);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::abs(rhs));
}

TEST_CASE("m=1 splitting reduces to the Schroedinger kernel; m=2 branches") {
    for (double lambda : {0.5, 2.2}) {
        for (double r : {0.7, 1.9}) {
            auto poly = poly_resolvent_kernel(5, 1, SpectralPoint{lambda, +1}, r).value;
            auto schr = schrodinger_kernel(5, complex{lambda, 0.0}, r).value;
            CHECK(std::abs(poly - schr) == 0.0);
        }
    }
    auto br = splitting_branches(2, +1, 3.0);
    REQUIRE(br.size() == 2);
    CHECK(std::abs(br[0].weight - complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(br[1].weight - complex{-1.0, 0.0}) < 1e-15);
    CHECK(std::abs(br[0].zeta - complex{3.0, 0.0}) < 1e-15);
    CHECK(std::abs(br[1].zeta - complex{0.0, 3.0}) < 1e-14);
}

TEST_CASE("exponential decay of the l >= 1 splitting branches") {
    for (auto [n, m] : std::vector<std::pair<int, int>>{{5, 2}, {9, 2}, {9, 3}}) {
        for (double lambda : {1.0, 2.5}) {
            auto branches = splitting_branches(m, +1, lambda);
            const double pref = 1.0 / (m * std::pow(lambda, 2.0 * m - 2.0));
            for (int l = 1; l < m; ++l) {
                const double sin_l = std::sin(pi * l / m);
                const double r0 = 0.5;
                const double base =
                    pref * std::abs(branches[l].weight *
                                    schrodinger_kernel(n, branches[l].zeta, r0).value);
                for (double r : {1.0, 2.0, 4.0}) {
                    const double term =
                        pref * std::abs(branches[l].weight *
                                        schrodinger_kernel(n, branches[l].zeta, r).value);
                    CHECK(term <= base * std::exp(-lambda * (r - r0) * sin_l / 2.0));
                }
            }
        }
    }
}

TEST_CASE("symbol factor: exact n=3 form and two-sided band") {
    for (double s : {0.5, 1.0, 10.0, 500.0})
        CHECK(rel_diff(symbol_omega(3, 1, +1, s), complex{1.0 / (4.0 * pi * s), 0.0}) <
              1e-14);

    for (auto [n, m] : std::vector<std::pair<int, int>>{{5, 1}, {7, 1}, {9, 2}}) {
        double lo = 1e300, hi = 0.0;
        for (double s = 1.0; s <= 1.0e4; s *= 1.35) {
            const double v =
                std::abs(symbol_omega(n, m, +1, s)) *
                std::pow(1.0 + s * s, 0.25 * (n - 1));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(lo > 0.0);
        CHECK(hi / lo < 16.0);
        // in the asymptotic range the decay power itself is pinned
        double sum_x = 0, sum_y = 0, sum_xx = 0, sum_xy = 0;
        int cnt = 0;
        for (double s = 1.0e2; s <= 1.0e4; s *= 2.0, ++cnt) {
            const double x = std::log(s);
            const double y = std::log(std::abs(symbol_omega(n, m, +1, s)));
            sum_x += x;
            sum_y += y;
            sum_xx += x * x;
            sum_xy += x * y;
        }
        const double slope =
            (cnt * sum_xy - sum_x * sum_y) / (cnt * sum_xx - sum_x * sum_x);
        CHECK(std::abs(slope + 0.5 * (n - 1)) < 0.05);
    }
}

TEST_CASE("symbol conjugation and extracted leading constant") {
    for (double s : {1.0, 3.0, 40.0})
        CHECK(std::abs(symbol_omega(5, 1, -1, s) - std::conj(symbol_omega(5, 1, +1, s))) <
              1e-15 * std::abs(symbol_omega(5, 1, +1, s)));

    for (auto [n, m] : std::vector<std::pair<int, int>>{{5, 1}, {9, 2}, {7, 1}}) {
        for (int sign : {+1, -1}) {
            const complex c = symbol_leading_constant(n, m, sign);
            const double s = 1.0e4;
            const complex measured =
                symbol_omega(n, m, sign, s) * std::pow(s, 0.5 * (n - 1));
            CHECK(std::abs(measured / c - 1.0) < 0.01);
        }
    }
}

TEST_CASE("resolvent difference: series/direct consistency and r = 0 limit") {
    for (int n : {3, 5, 9}) {
        for (double lambda : {0.9, 2.5}) {
            // across the series/direct crossover at lambda r = 8
            for (double s : {6.0, 7.5, 7.99, 8.01, 9.5}) {
                const double r = s / lambda;
                const complex direct =
                    schrodinger_kernel(n, complex{lambda, 0.0}, r).value -
                    schrodinger_kernel(n, complex{-lambda, 0.0}, r).value;
                CHECK(rel_diff(resolvent_difference(n, lambda, r), direct) < 1e-11);
            }
            // on-diagonal limit against the spectral-measure constant
            // i lambda^{n-2} |S^{n-1}| / (2 (2 pi)^{n-1})
            const double sphere =
                2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
            const complex expect =
                iu * std::pow(lambda, n - 2.0) * sphere / (2.0 * std::pow(2.0 * pi, n - 1.0));
            CHECK(rel_diff(resolvent_difference(n, lambda, 0.0), expect) < 1e-13);
        }
    }
}

TEST_CASE("difference series coefficients vanish below the diagonal order") {
    // S_q = sum_j c_j/(q-j)! must vanish for odd q < n-2: this is exactly the
    // cancellation of the singular terms in [R+ - R-].
    for (int n : {5, 7, 9, 11, 13}) {
        const auto& t = kernels::detail::table(n);
        double scale = 0.0;
        for (double c : t.coeff) scale += std::abs(c);
        for (int q = 1; q < n - 2; q += 2) {
            num::CompensatedSum s;
            for (int j = 0; j <= t.d && j <= q; ++j)
                s.add(t.coeff[j] / std::tgamma(q - j + 1.0));
            CHECK(std::abs(s.value()) < 1e-12 * scale);
        }
    }
}

TEST_SUITE_END();
