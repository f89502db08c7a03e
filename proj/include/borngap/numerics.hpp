#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "borngap/common.hpp"

namespace borngap::num {

// ---------------------------------------------------------------------------
// Compensated summation
// ---------------------------------------------------------------------------

/// Neumaier variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedComplexSum {
public:
    void add(complex z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    complex value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_, im_;
};

// ---------------------------------------------------------------------------
// Gauss-Legendre rules
// ---------------------------------------------------------------------------

struct QuadRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

/// Nodes/weights by Newton iteration on the Legendre polynomial.
inline QuadRule make_gauss_legendre(int n) {
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return rule;
}

inline const QuadRule& gauss_legendre(int n) {
    static const QuadRule g8 = make_gauss_legendre(8);
    static const QuadRule g16 = make_gauss_legendre(16);
    static const QuadRule g24 = make_gauss_legendre(24);
    static const QuadRule g32 = make_gauss_legendre(32);
    static const QuadRule g48 = make_gauss_legendre(48);
    switch (n) {
        case 8: return g8;
        case 16: return g16;
        case 24: return g24;
        case 32: return g32;
        case 48: return g48;
        default: throw unsupported_error("gauss_legendre: uncached order " + std::to_string(n));
    }
}

/// Fixed-order Gauss-Legendre on [a, b].
template <class F>
complex integrate_gl(const F& f, double a, double b, int order) {
    const QuadRule& rule = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    CompensatedComplexSum acc;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc.add(rule.weights[i] * f(mid + half * rule.nodes[i]));
    return half * acc.value();
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7/15 for complex integrands
// ---------------------------------------------------------------------------

namespace detail {
// QUADPACK dqk15 abscissae/weights.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace detail

template <class F>
complex gk15(const F& f, double a, double b, double& err) {
    using namespace detail;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const complex fc = f(mid);
    complex resk = wgk[7] * fc;
    complex resg = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * xgk[i];
        const complex sum = f(mid - dx) + f(mid + dx);
        resk += wgk[i] * sum;
        if (i % 2 == 1) resg += wg[i / 2] * sum;
    }
    resk *= half;
    resg *= half;
    err = std::abs(resk - resg);
    // QUADPACK-style sharpening of the raw difference.
    err = std::min(err, 200.0 * err * std::sqrt(std::max(err, 1e-300)));
    return resk;
}

struct AdaptiveResult {
    complex value{0.0, 0.0};
    double err = 0.0;
    bool converged = true;
};

/// Adaptive bisection on the G7/K15 pair. `fn_budget` caps integrand calls.
template <class F>
AdaptiveResult integrate_gk_adaptive(const F& f, double a, double b, double abs_tol,
                                     double rel_tol, long fn_budget = 200000) {
    struct Seg {
        double a, b, err;
        complex val;
    };
    double err0 = 0.0;
    complex v0 = gk15(f, a, b, err0);
    std::vector<Seg> segs{{a, b, err0, v0}};
    long used = 15;
    auto total = [&segs] {
        CompensatedComplexSum v;
        CompensatedSum e;
        for (const auto& s : segs) {
            v.add(s.val);
            e.add(s.err);
        }
        return std::pair<complex, double>(v.value(), e.value());
    };
    while (true) {
        auto [val, err] = total();
        if (err <= std::max(abs_tol, rel_tol * std::abs(val))) return {val, err, true};
        if (used > fn_budget || segs.size() > 8000) return {val, err, false};
        auto worst = std::max_element(
            segs.begin(), segs.end(),
            [](const Seg& p, const Seg& q) { return p.err < q.err; });
        Seg s = *worst;
        segs.erase(worst);
        const double m = 0.5 * (s.a + s.b);
        if (m <= s.a || m >= s.b) {
            segs.push_back(s);  // interval at roundoff width
            auto [v, e] = total();
            return {v, e, false};
        }
        double e1 = 0.0, e2 = 0.0;
        complex v1 = gk15(f, s.a, m, e1);
        complex v2 = gk15(f, m, s.b, e2);
        used += 30;
        segs.push_back({s.a, m, e1, v1});
        segs.push_back({m, s.b, e2, v2});
    }
}

// ---------------------------------------------------------------------------
// Chebyshev machinery (Gauss-Lobatto points)
// ---------------------------------------------------------------------------

/// Points cos(pi*k/n), k = 0..n, descending from 1 to -1.
inline std::vector<double> cheb_points(int n) {
    std::vector<double> x(n + 1);
    for (int k = 0; k <= n; ++k) x[k] = std::cos(pi * k / n);
    return x;
}

/// Trefethen's differentiation matrix on cheb_points(n), row-major (n+1)^2.
inline std::vector<double> cheb_diff_matrix(int n) {
    std::vector<double> x = cheb_points(n);
    std::vector<double> c(n + 1, 1.0);
    c[0] = c[n] = 2.0;
    const int size = n + 1;
    std::vector<double> d(size * size, 0.0);
    for (int i = 0; i <= n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            double v = (c[i] / c[j]) * sgn / (x[i] - x[j]);
            d[i * size + j] = v;
            rowsum += v;
        }
        d[i * size + i] = -rowsum;  // negative sum trick
    }
    return d;
}

/// Chebyshev coefficients from values at cheb_points(n) (direct cosine sums).
inline std::vector<complex> cheb_coeffs(const std::vector<complex>& values) {
    const int n = static_cast<int>(values.size()) - 1;
    std::vector<complex> a(n + 1);
    for (int j = 0; j <= n; ++j) {
        CompensatedComplexSum acc;
        for (int k = 0; k <= n; ++k) {
            double w = (k == 0 || k == n) ? 0.5 : 1.0;
            acc.add(w * values[k] * std::cos(pi * j * k / n));
        }
        a[j] = acc.value() * (2.0 / n);
        if (j == 0 || j == n) a[j] *= 0.5;
    }
    return a;
}

/// Clenshaw evaluation of a Chebyshev series at x in [-1, 1].
inline complex cheb_eval(const std::vector<complex>& a, double x) {
    complex b1{0.0, 0.0}, b2{0.0, 0.0};
    for (int k = static_cast<int>(a.size()) - 1; k >= 1; --k) {
        complex b0 = 2.0 * x * b1 - b2 + a[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + a[0];
}

// ---------------------------------------------------------------------------
// Dense complex linear solve (partial-pivot LU), for Levin collocation
// ---------------------------------------------------------------------------

/// Solves A x = b in place; A is row-major n x n. Returns false if singular.
inline bool solve_complex_lu(std::vector<complex>& a, std::vector<complex>& b, int n) {
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int col = 0; col < n; ++col) {
        int best = col;
        double bestmag = std::abs(a[col * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double mag = std::abs(a[r * n + col]);
            if (mag > bestmag) {
                bestmag = mag;
                best = r;
            }
        }
        if (bestmag == 0.0) return false;
        if (best != col) {
            for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[best * n + j]);
            std::swap(b[col], b[best]);
        }
        const complex pivval = a[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            const complex factor = a[r * n + col] / pivval;
            if (factor == complex{0.0, 0.0}) continue;
            a[r * n + col] = factor;
            for (int j = col + 1; j < n; ++j) a[r * n + j] -= factor * a[col * n + j];
            b[r] -= factor * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        complex s = b[r];
        for (int j = r + 1; j < n; ++j) s -= a[r * n + j] * b[j];
        b[r] = s / a[r * n + r];
    }
    return true;
}

// ---------------------------------------------------------------------------
// Root bracketing / refinement
// ---------------------------------------------------------------------------

/// Bisection with a Newton accelerant; [lo, hi] must bracket a sign change.
inline double solve_bracketed(const std::function<double(double)>& f,
                              const std::function<double(double)>& df, double lo,
                              double hi, double tol = 1e-14) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw domain_error("solve_bracketed: no sign change");
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0) == (flo > 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        double step_x = x;
        if (df) {
            double d = df(x);
            if (d != 0.0) {
                double xn = x - fx / d;
                if (xn > lo && xn < hi) step_x = xn;
            }
        }
        double next = (step_x != x) ? step_x : 0.5 * (lo + hi);
        if (std::abs(next - x) <= tol * std::max(1.0, std::abs(x))) return next;
        x = next;
    }
    return x;
}

/// Plain bisection for monotone f to reach f(x) = target.
inline double bisect_to(const std::function<double(double)>& f, double lo, double hi,
                        double target, double tol = 1e-14) {
    return solve_bracketed([&](double x) { return f(x) - target; }, nullptr, lo, hi, tol);
}

}  // namespace borngap::num
