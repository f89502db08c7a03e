#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "borngap/common.hpp"
#include "borngap/numerics.hpp"
#include "borngap/params.hpp"

namespace borngap::kernels {

// ---------------------------------------------------------------------------
// Exact coefficient tables
//
// The free resolvent kernel of -Delta - zeta^2 in odd dimension n is
// generated from K_3 = e^{i zeta r} / (4 pi r) by the dimension-raising step
// K_{n+2} = -(1/(2 pi r)) d/dr K_n, which closes as
//
//   K_n(zeta, r) = e^{i zeta r} / (4 pi (2 pi)^d) *
//                  sum_j c_j (i zeta)^j r^{j-(n-2)},   d = (n-3)/2,
//
// with integer coefficients c_j obeying c'_{j} = (2d+1-j) c_j - c_{j-1}.
// ---------------------------------------------------------------------------

struct DimensionTable {
    int n = 3;
    int d = 0;              // (n-3)/2, number of recurrence applications
    double norm = 1.0;      // 1 / (4 pi (2 pi)^d)
    double sigma0 = 1.0;    // (-1)^{(n-3)/2}
    std::vector<double> coeff;        // c_j, exact integers
    std::vector<double> diff_series;  // S_{n-2+2k} = sum_j c_j/(n-2+2k-j)!
};

namespace detail {

inline constexpr int max_dimension = 31;

inline std::vector<double> factorial_table(int top) {
    std::vector<double> f(top + 1, 1.0);
    for (int i = 1; i <= top; ++i) f[i] = f[i - 1] * i;
    return f;
}

inline std::vector<DimensionTable> build_tables() {
    const auto fact = factorial_table(170);
    std::vector<DimensionTable> tables;
    std::vector<std::int64_t> c{1};
    for (int n = 3; n <= max_dimension; n += 2) {
        const int d = (n - 3) / 2;
        DimensionTable t;
        t.n = n;
        t.d = d;
        t.norm = 1.0 / (4.0 * pi * std::pow(2.0 * pi, d));
        t.sigma0 = (d % 2 == 0) ? 1.0 : -1.0;
        t.coeff.assign(c.begin(), c.end());
        const int series_len = 44;
        t.diff_series.resize(series_len);
        for (int k = 0; k < series_len; ++k) {
            const int q = n - 2 + 2 * k;
            num::CompensatedSum s;
            for (int j = 0; j <= d && j <= q; ++j)
                s.add(static_cast<double>(c[j]) / fact[q - j]);
            t.diff_series[k] = s.value();
        }
        tables.push_back(std::move(t));
        // advance c to dimension n + 2
        std::vector<std::int64_t> next(d + 2, 0);
        for (int j = 0; j <= d + 1; ++j) {
            std::int64_t v = 0;
            if (j <= d) v += static_cast<std::int64_t>(2 * d + 1 - j) * c[j];
            if (j >= 1) v -= c[j - 1];
            next[j] = v;
        }
        c = std::move(next);
    }
    return tables;
}

inline const DimensionTable& table(int n) {
    static const std::vector<DimensionTable> tables = build_tables();
    if (n < 3 || n % 2 == 0 || n > max_dimension)
        throw unsupported_error("resolvent kernels require odd 3 <= n <= 31, got n=" +
                                std::to_string(n));
    return tables[(n - 3) / 2];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Schroedinger kernel (second order resolvent)
// ---------------------------------------------------------------------------

/// Polynomial factor P with K_n(zeta, r) = e^{i zeta r} P(zeta, r).
inline complex schrodinger_polypart(int n, complex zeta, double r) {
    const auto& t = detail::table(n);
    if (!(r > 0.0)) throw domain_error("kernel distance r must be > 0");
    const complex iz = iu * zeta;
    // Horner in (i zeta), common factor r^{-(n-2)} times r^j.
    complex acc{0.0, 0.0};
    for (int j = t.d; j >= 0; --j) acc = acc * (iz * r) + t.coeff[j];
    return acc * t.norm * std::pow(r, -(n - 2.0));
}

/// Kernel of (-Delta - zeta^2)^{-1} at distance r > 0 in odd dimension n,
/// boundary values from Im zeta >= 0.  Exact: err_estimate = 0.
inline KernelValue schrodinger_kernel(int n, complex zeta, double r) {
    if (!(r > 0.0)) throw domain_error("kernel distance r must be > 0");
    if (zeta.imag() < 0.0)
        throw branch_error("kernel requires Im zeta >= 0 (upper half-plane branch)");
    const complex phase = std::exp(iu * zeta * r);
    return {phase * schrodinger_polypart(n, zeta, r), 0.0};
}

/// [R_0^+ - R_0^-](lambda^2)(r), the resolvent boundary-value difference.
/// Entire in r; evaluated by its power series when lambda*r is small (the
/// singular parts cancel there, including at r = 0) and directly otherwise.
inline complex resolvent_difference(int n, double lambda, double r) {
    if (!(lambda > 0.0)) throw domain_error("resolvent_difference: lambda must be > 0");
    if (r < 0.0) throw domain_error("resolvent_difference: r must be >= 0");
    const auto& t = detail::table(n);
    const double s = lambda * r;
    if (s <= 8.0) {
        const double s2 = s * s;
        double term_pow = 1.0;
        num::CompensatedSum acc;
        for (std::size_t k = 0; k < t.diff_series.size(); ++k) {
            const double term = ((k % 2 == 0) ? 1.0 : -1.0) * t.diff_series[k] * term_pow;
            acc.add(term);
            term_pow *= s2;
            if (k > 4 && std::abs(term) < 1e-22 * std::abs(acc.value())) break;
        }
        return 2.0 * iu * t.sigma0 * std::pow(lambda, n - 2.0) * t.norm * acc.value();
    }
    const complex plus = schrodinger_kernel(n, lambda, r).value;
    return plus - std::conj(plus);
}

// ---------------------------------------------------------------------------
// Poly-harmonic resolvent via the roots-of-unity splitting
// ---------------------------------------------------------------------------

struct ResolventBranch {
    complex weight;  // omega_l = e^{2 pi i l / m}
    complex zeta;    // +/- lambda for l = 0, lambda e^{i pi l / m} for l >= 1
};

/// Branch points of the splitting sum.  For l >= 1 the upper-half-plane
/// square root of omega_l lambda^2 gives exponential decay e^{-lambda r
/// sin(pi l/m)}.
inline std::vector<ResolventBranch> splitting_branches(int m, int sign, double lambda) {
    if (m < 1) throw validation_error("operator order m must be >= 1");
    std::vector<ResolventBranch> br(m);
    br[0] = {complex{1.0, 0.0}, complex{sign * lambda, 0.0}};
    for (int l = 1; l < m; ++l) {
        const double wang = 2.0 * pi * l / m;
        const double zang = pi * l / m;
        br[l] = {std::polar(1.0, wang), lambda * std::polar(1.0, zang)};
    }
    return br;
}

/// Kernel of ((-Delta)^m - lambda^{2m})^{-1} boundary values:
/// (1/(m lambda^{2m-2})) sum_l omega_l K_n(zeta_l, r).
inline KernelValue poly_resolvent_kernel(int n, int m, SpectralPoint sp, double r) {
    sp.validate();
    if (!(r > 0.0)) throw domain_error("kernel distance r must be > 0");
    num::CompensatedComplexSum acc;
    for (const auto& br : splitting_branches(m, sp.sign, sp.lambda))
        acc.add(br.weight * schrodinger_kernel(n, br.zeta, r).value);
    const double pref = 1.0 / (m * std::pow(sp.lambda, 2.0 * m - 2.0));
    return {pref * acc.value(), 0.0};
}

inline KernelValue poly_resolvent_kernel(const ModelParams& params, SpectralPoint sp,
                                         double r) {
    params.validate_basic();
    return poly_resolvent_kernel(params.n, params.m, sp, r);
}

/// W^{+/-}(s): the lambda = 1 radial profile with
/// R_0^{+/-}(lambda^{2m})(r) = lambda^{n-2m} W^{+/-}(lambda r),
/// exact by homogeneity of the splitting sum.
inline complex kernel_profile(int n, int m, int sign, double s) {
    if (!(s > 0.0)) throw domain_error("kernel_profile: argument s must be > 0");
    num::CompensatedComplexSum acc;
    for (const auto& br : splitting_branches(m, sign, 1.0))
        acc.add(br.weight * schrodinger_kernel(n, br.zeta, s).value);
    return acc.value() / static_cast<double>(m);
}

/// omega^{+/-}(s) = W^{+/-}(s) e^{-/+ i s}: the symbol factor in
/// R_0^{+/-}(lambda^{2m})(r) = e^{+/- i lambda r} lambda^{n-2m}
/// omega^{+/-}(lambda r).  The factorization is exact, not asymptotic.
inline complex symbol_omega(int n, int m, int sign, double s) {
    return kernel_profile(n, m, sign, s) * std::exp(-iu * static_cast<double>(sign) * s);
}

inline complex symbol_omega(const ModelParams& params, int sign, double s) {
    params.validate_basic();
    return symbol_omega(params.n, params.m, sign, s);
}

/// Leading constant c_{+/-} with omega^{+/-}(s) = c_{+/-} s^{(1-n)/2} (1 + O(1/s)),
/// read off the top recurrence coefficient: c_{+/-} = (-/+ i)^d / (4 pi m (2 pi)^d).
inline complex symbol_leading_constant(int n, int m, int sign) {
    const auto& t = detail::table(n);
    const complex base = (sign > 0) ? -iu : iu;
    complex rot{1.0, 0.0};
    for (int k = 0; k < t.d; ++k) rot *= base;
    return rot * (t.norm / m);
}

}  // namespace borngap::kernels
