#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "borngap/cutoff.hpp"
#include "borngap/kernels.hpp"
#include "borngap/oscillatory.hpp"
#include "borngap/params.hpp"
#include "borngap/sweep.hpp"

namespace borngap::born {

inline double sphere_area(int k) {
    // |S^k|, the k-sphere in R^{k+1}
    return 2.0 * std::pow(pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

inline double unit_ball_volume(int n) {
    return std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// ---------------------------------------------------------------------------
// The tuned rough potential and the concentrated pairing functions
// ---------------------------------------------------------------------------

/// V_L(z) = cos(c_m L |z|^{2m/(2m-1)}) rho_delta(|z|): radial, |V| <= 1,
/// supported on the annulus |z| in (1-delta, 1+delta) inside B(0,2).
struct RoughPotential {
    ModelParams params;
    double L = 1.0;
    CutoffSpec rho;
    double cm = -1.0;
    double q = 2.0;  // 2m/(2m-1)
};

inline RoughPotential make_rough_potential(const ModelParams& params, double L) {
    params.validate_basic();
    if (!(L > 0.0)) throw validation_error("rough potential: L must be > 0");
    RoughPotential v;
    v.params = params;
    v.L = L;
    v.rho = make_rho_delta(params.delta);
    v.cm = osc::stationary_point(1.0, params.m, 1.0).cm;
    v.q = 2.0 * params.m / (2.0 * params.m - 1.0);
    return v;
}

inline double potential_value(const RoughPotential& v, double radius) {
    if (radius < 0.0) return 0.0;
    const double bump = v.rho(radius);
    if (bump == 0.0) return 0.0;
    return std::cos(v.cm * v.L * std::pow(radius, v.q)) * bump;
}

inline double potential_value(const RoughPotential& v, std::span<const double> z) {
    double rr = 0.0;
    for (double c : z) rr += c * c;
    return potential_value(v, std::sqrt(rr));
}

/// f_{L,p}(x) = (CL)^{n/p} f(x CL) with f the L^p-normalized characteristic
/// function of the unit ball (p = inf means the L^1 normalization of the
/// sup-norm pairing).
struct ConcentratedTestFunction {
    ModelParams params;
    double L = 1.0;

    double radius() const { return 1.0 / (params.c_ball * L); }
    double amplitude() const {
        const double cl = params.c_ball * L;
        const double vol = unit_ball_volume(params.n);
        const double pp = params.pairing_p();
        return std::pow(cl, params.n / pp) * std::pow(vol, -1.0 / pp);
    }
    double value(double dist_from_origin) const {
        return dist_from_origin <= radius() ? amplitude() : 0.0;
    }
    double l1_norm() const {
        const double pp = params.pairing_p();
        const double cl = params.c_ball * L;
        return std::pow(cl, params.n / pp - params.n) *
               std::pow(unit_ball_volume(params.n), 1.0 - 1.0 / pp);
    }
};

// ---------------------------------------------------------------------------
// Hoelder norm estimation
// ---------------------------------------------------------------------------

struct HolderGrid {
    double lo = 0.0;
    double hi = 2.0;
    double step = 1e-3;
    double oscillation_scale = 1e-2;  // finest feature scale of the sampler
};

/// sup|f| + sup |f(x)-f(y)|/|x-y|^alpha over pairs at dyadic separations
/// from (hi-lo)/2 down to the grid step.
inline double holder_norm(const std::function<double(double)>& f, double alpha,
                          const HolderGrid& grid) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw unsupported_error("holder_norm: alpha must lie in [0, 1)");
    if (!(grid.step > 0.0) || !(grid.hi > grid.lo))
        throw validation_error("holder_norm: bad grid");
    if (grid.step > grid.oscillation_scale / 8.0)
        throw resolution_error("holder_norm: grid coarser than the oscillation scale");
    const std::size_t count =
        static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.step)) + 1;
    std::vector<double> vals(count);
    double sup = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        vals[i] = f(grid.lo + i * grid.step);
        sup = std::max(sup, std::abs(vals[i]));
    }
    if (alpha == 0.0) return sup;  // C^0 is the sup norm
    double semi = 0.0;
    for (std::size_t stride = 1; 2 * stride * grid.step <= (grid.hi - grid.lo);
         stride *= 2) {
        const double d = stride * grid.step;
        const double dpow = std::pow(d, alpha);
        for (std::size_t i = 0; i + stride < count; ++i)
            semi = std::max(semi, std::abs(vals[i + stride] - vals[i]) / dpow);
    }
    return sup + semi;
}

inline HolderGrid holder_grid_for(const RoughPotential& v) {
    HolderGrid g;
    g.lo = 0.0;
    g.hi = 2.0;
    const double wavelength =
        2.0 * pi / (std::abs(v.cm) * v.q * v.L *
                    std::pow(1.0 + v.params.delta, v.q - 1.0));
    g.oscillation_scale = std::min(wavelength, 0.5 * v.params.delta);
    g.step = std::min(1.0 / (10.0 * v.L), g.oscillation_scale / 10.0);
    return g;
}

// ---------------------------------------------------------------------------
// First Born-series kernel
// ---------------------------------------------------------------------------

/// Evaluates K^{+/-}_{L,t}(x, y) = int int e^{i t l^{2m}}
///   l^{2m-1 + n(m-1)(2/p-1)} R0^{pm}(l^{2m})(|x-z|) V(z)
///   R0^{pm}(l^{2m})(|z-y|) psi(l^{2m}/L^{2m}) dz dl
/// in the rescaled variable mu = l/L, against a radial (possibly complex)
/// potential sampler.  The symbol factorization turns the inner mu-integral
/// into a single oscillatory integral with phase t L^{2m} mu^{2m} +/- L R mu.
class BornKernelEvaluator {
public:
    BornKernelEvaluator(const ModelParams& params, double L, double t,
                        std::function<complex(double)> v_radial,
                        osc::QuadratureSpec quad = {})
        : p_(params), L_(L), t_(t), v_(std::move(v_radial)), quad_(quad) {
        p_.validate_basic();
        if (!(L > 0.0)) throw validation_error("born kernel: L must be > 0");
        psi_ = make_psi(p_.m);
        mu_a_ = std::pow(psi_.support_lo, 0.5 / p_.m);
        mu_b_ = std::pow(psi_.support_hi, 0.5 / p_.m);
        const double pp = p_.pairing_p();
        power_ = 2.0 * p_.m - 1.0 + p_.n * (p_.m - 1.0) * (2.0 / pp - 1.0) +
                 2.0 * (p_.n - 2.0 * p_.m);
        if ((power_ + 1.0) * std::log2(L_) > 900.0)
            throw unsupported_error("born kernel: L-prefactor overflows double");
        prefactor_ = std::pow(L_, power_ + 1.0);
        t_phase_ = t_ * std::pow(L_, 2.0 * p_.m);
        cm_ = osc::stationary_point(1.0, p_.m, 1.0).cm;
        q_ = 2.0 * p_.m / (2.0 * p_.m - 1.0);
        quad_.abs_tol = 1e-280;  // relative control; roundoff floor catches 0
        build_radial_nodes();
        err_z_rel_ = measure_radial_resolution();
    }

    const ModelParams& params() const { return p_; }
    double ball_radius() const { return 1.0 / (p_.c_ball * L_); }

    /// Inner oscillatory mu-integral for one z (distances r, s to x, y).
    KernelValue inner(int sign, double r, double s) const {
        return osc::integrate(inner_descriptor(sign, r, s), quad_);
    }

    /// K^{sign}(0, 0) through the one-dimensional radial reduction.
    KernelValue origin(int sign) const {
        num::CompensatedComplexSum acc;
        double inner_err = 0.0, mass = 0.0;
        for (std::size_t i = 0; i < z_nodes_.size(); ++i) {
            const double rho = z_nodes_[i];
            const complex vz = v_(rho);
            if (vz == complex{0.0, 0.0}) continue;
            const double w = z_weights_[i] * std::pow(rho, p_.n - 1.0);
            const KernelValue kv = inner(sign, rho, rho);
            acc.add(w * vz * kv.value);
            inner_err += std::abs(w * vz) * kv.err_estimate;
            mass += std::abs(w * vz) * std::abs(kv.value);
        }
        const double area = sphere_area(p_.n - 1);
        const complex val = prefactor_ * area * acc.value();
        const double err =
            prefactor_ * area * (inner_err + err_z_rel_ * mass);
        return {val, err};
    }

    /// Stationary-phase forecast of K^-(0, 0): the leading term of the inner
    /// integral slotted into the same radial quadrature.
    KernelValue forecast_origin() const {
        num::CompensatedComplexSum acc;
        for (std::size_t i = 0; i < z_nodes_.size(); ++i) {
            const double rho = z_nodes_[i];
            const complex vz = v_(rho);
            if (vz == complex{0.0, 0.0}) continue;
            const double w = z_weights_[i] * std::pow(rho, p_.n - 1.0);
            acc.add(w * vz * osc::stationary_leading_term(
                                 inner_descriptor(-1, rho, rho)).value);
        }
        return {prefactor_ * sphere_area(p_.n - 1) * acc.value(), 0.0};
    }

    /// K^{sign}(x, y) for small off-origin x, y, reduced to (|z|, two
    /// projections onto span(x,y)) with an (n-3)-sphere weight; the inner
    /// integral is served from a Chebyshev interpolant in (R, D) = (r+s, r-s).
    KernelValue at(int sign, double xnorm, double ynorm, double cos_xy) {
        if (xnorm < 0.0 || ynorm < 0.0 || std::abs(cos_xy) > 1.0 + 1e-12)
            throw domain_error("born kernel: bad evaluation geometry");
        if (xnorm > ball_radius() * (1.0 + 1e-9) ||
            ynorm > ball_radius() * (1.0 + 1e-9))
            throw domain_error(
                "born kernel: x, y must lie in the concentration ball of radius 1/(C L)");
        if (xnorm == 0.0 && ynorm == 0.0) return origin(sign);
        const Interp& J = interpolant(sign);
        const double x1 = xnorm;
        const double y1 = ynorm * cos_xy;
        const double y2 = ynorm * std::sqrt(std::max(0.0, 1.0 - cos_xy * cos_xy));
        const auto& crule = num::gauss_legendre(32);
        const int ntheta = 32;
        num::CompensatedComplexSum acc;
        double mass = 0.0;
        for (std::size_t i = 0; i < z_nodes_.size(); ++i) {
            const double rho = z_nodes_[i];
            const complex vz = v_(rho);
            if (vz == complex{0.0, 0.0}) continue;
            const double wz = z_weights_[i] * std::pow(rho, p_.n - 1.0);
            num::CompensatedComplexSum angular;
            for (std::size_t ic = 0; ic < crule.nodes.size(); ++ic) {
                const double c = 0.5 * (crule.nodes[ic] + 1.0);  // cos(xi) in [0,1]
                const double wc = 0.5 * crule.weights[ic] * std::pow(c, p_.n - 3.0);
                const double tau = rho * std::sqrt(std::max(0.0, 1.0 - c * c));
                for (int it = 0; it < ntheta; ++it) {
                    const double theta = 2.0 * pi * it / ntheta;
                    const double u = tau * std::cos(theta);
                    const double vv = tau * std::sin(theta);
                    const double r =
                        std::sqrt(std::max(0.0, rho * rho + x1 * x1 - 2.0 * x1 * u));
                    const double s = std::sqrt(std::max(
                        0.0, rho * rho + ynorm * ynorm - 2.0 * (y1 * u + y2 * vv)));
                    angular.add(wc * J.eval(r + s, r - s));
                }
            }
            const complex contrib = wz * vz * angular.value() * (2.0 * pi / ntheta);
            acc.add(contrib);
            mass += std::abs(contrib);
        }
        const double area = sphere_area(p_.n - 3);
        const complex val = prefactor_ * area * acc.value();
        const double err = prefactor_ * area * mass * (err_z_rel_ + 3e-7) +
                           std::abs(val) * err_z_rel_;
        return {val, err};
    }

    /// Exposed for interpolant regression tests.
    complex interpolated_inner(int sign, double r, double s) {
        return interpolant(sign).eval(r + s, r - s);
    }

private:
    osc::PhaseAmplitudeIntegral inner_descriptor(int sign, double r, double s) const {
        osc::PhaseAmplitudeIntegral I;
        I.t = t_phase_;
        I.m = p_.m;
        I.R = sign * L_ * (r + s);
        I.sigma = 0.0;
        I.a = mu_a_;
        I.b = mu_b_;
        const int n = p_.n, m = p_.m, sg = sign;
        const double L = L_, pw = power_;
        const CutoffSpec psi = psi_;
        I.amplitude = [n, m, sg, L, pw, psi, r, s](double mu) {
            return std::pow(mu, pw) * psi(osc::ipow(mu, 2 * m)) *
                   kernels::symbol_omega(n, m, sg, L * mu * r) *
                   kernels::symbol_omega(n, m, sg, L * mu * s);
        };
        return I;
    }

    void build_radial_nodes() {
        const double zlo = 1.0 - p_.delta, zhi = 1.0 + p_.delta;
        const double rate =
            L_ * (2.0 * mu_b_ +
                  std::abs(cm_) * q_ * std::pow(zhi, q_ - 1.0)) +
            8.0;
        const double width = std::min(4.0 / rate, 0.25 * p_.delta);
        const int npanels =
            std::max(4, static_cast<int>(std::ceil((zhi - zlo) / width)));
        const auto& rule = num::gauss_legendre(8);
        z_nodes_.clear();
        z_weights_.clear();
        z_nodes_.reserve(npanels * rule.nodes.size());
        z_weights_.reserve(npanels * rule.nodes.size());
        for (int pnl = 0; pnl < npanels; ++pnl) {
            const double a = zlo + (zhi - zlo) * pnl / npanels;
            const double b = zlo + (zhi - zlo) * (pnl + 1) / npanels;
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                z_nodes_.push_back(mid + half * rule.nodes[i]);
                z_weights_.push_back(half * rule.weights[i]);
            }
        }
    }

    /// Relative resolution of the radial quadrature, measured on the
    /// stationary-phase integrand (same oscillation classes as the kernel)
    /// by comparing against a panel-halved evaluation.
    double measure_radial_resolution() {
        // branch with a stationary point if there is one; otherwise a
        // surrogate carrying the kernel and potential oscillation rates
        int probe_sign = 0;
        for (int sign : {-1, +1}) {
            try {
                (void)osc::stationary_leading_term(inner_descriptor(sign, 1.0, 1.0));
                probe_sign = sign;
                break;
            } catch (const domain_error&) {
            }
        }
        auto probe = [this, probe_sign](double rho) -> complex {
            if (probe_sign != 0) {
                try {
                    return osc::stationary_leading_term(
                               inner_descriptor(probe_sign, rho, rho))
                        .value;
                } catch (const domain_error&) {
                }
            }
            return std::exp(iu * 2.0 * L_ * mu_b_ * rho) +
                   std::exp(iu * cm_ * L_ * std::pow(rho, q_));
        };
        auto eval_with = [&](const std::vector<double>& nodes,
                             const std::vector<double>& weights) {
            num::CompensatedComplexSum acc;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const double rho = nodes[i];
                const complex vz = v_(rho);
                if (vz == complex{0.0, 0.0}) continue;
                const double w = weights[i] * std::pow(rho, p_.n - 1.0);
                acc.add(w * vz * probe(rho));
            }
            return acc.value();
        };
        const complex coarse = eval_with(z_nodes_, z_weights_);
        // halved panels
        std::vector<double> nodes2, weights2;
        const auto& rule = num::gauss_legendre(8);
        const double zlo = 1.0 - p_.delta, zhi = 1.0 + p_.delta;
        const int npanels2 =
            2 * static_cast<int>(z_nodes_.size() / rule.nodes.size());
        for (int pnl = 0; pnl < npanels2; ++pnl) {
            const double a = zlo + (zhi - zlo) * pnl / npanels2;
            const double b = zlo + (zhi - zlo) * (pnl + 1) / npanels2;
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                nodes2.push_back(mid + half * rule.nodes[i]);
                weights2.push_back(half * rule.weights[i]);
            }
        }
        const complex fine = eval_with(nodes2, weights2);
        const double scale = std::max(std::abs(fine), std::abs(coarse));
        if (scale == 0.0) return 1e-12;
        return std::max(1e-12, std::abs(fine - coarse) / scale);
    }

    struct Interp {
        double Rmin = 0.0, Rmax = 1.0, width = 1.0, Dmax = 1.0;
        int order = 16;
        std::vector<std::vector<complex>> c0, c1;  // per panel, Cheb coeffs
        complex eval(double R, double D) const {
            int idx = static_cast<int>((R - Rmin) / width);
            idx = std::max(0, std::min(idx, static_cast<int>(c0.size()) - 1));
            const double plo = Rmin + idx * width;
            const double x =
                std::clamp(2.0 * (R - plo) / width - 1.0, -1.0, 1.0);
            const complex v0 = num::cheb_eval(c0[idx], x);
            const complex v1 = num::cheb_eval(c1[idx], x);
            const double u = (D / Dmax) * (D / Dmax);
            return v0 + u * (v1 - v0);
        }
    };

    const Interp& interpolant(int sign) {
        Interp& J = (sign > 0) ? interp_plus_ : interp_minus_;
        if (!J.c0.empty()) return J;
        const double eps = ball_radius();
        J.Dmax = 2.0 * eps;
        J.Rmin = 2.0 * (1.0 - p_.delta) - 2.0 * J.Dmax;
        J.Rmax = 2.0 * (1.0 + p_.delta) + 2.0 * J.Dmax;
        const double rate = L_ * mu_b_;
        int npanels = static_cast<int>(std::ceil((J.Rmax - J.Rmin) * rate / 10.0));
        npanels = std::max(4, std::min(npanels, 6000));
        J.width = (J.Rmax - J.Rmin) / npanels;
        J.c0.resize(npanels);
        J.c1.resize(npanels);
        const auto xs = num::cheb_points(J.order);
        for (int pnl = 0; pnl < npanels; ++pnl) {
            const double plo = J.Rmin + pnl * J.width;
            std::vector<complex> v0(xs.size()), v1(xs.size());
            for (std::size_t k = 0; k < xs.size(); ++k) {
                const double R = plo + 0.5 * J.width * (xs[k] + 1.0);
                v0[k] = inner(sign, 0.5 * R, 0.5 * R).value;
                v1[k] =
                    inner(sign, 0.5 * (R + J.Dmax), 0.5 * (R - J.Dmax)).value;
            }
            J.c0[pnl] = num::cheb_coeffs(v0);
            J.c1[pnl] = num::cheb_coeffs(v1);
        }
        return J;
    }

    ModelParams p_;
    double L_, t_;
    std::function<complex(double)> v_;
    osc::QuadratureSpec quad_;
    CutoffSpec psi_;
    double mu_a_ = 0.0, mu_b_ = 0.0, power_ = 0.0, prefactor_ = 0.0;
    double t_phase_ = 0.0, cm_ = 0.0, q_ = 0.0, err_z_rel_ = 0.0;
    std::vector<double> z_nodes_, z_weights_;
    Interp interp_plus_, interp_minus_;
};

/// Point evaluation of the first Born-series kernel branch at x, y given in
/// coordinates (dimension n).
inline KernelValue born_kernel(const ModelParams& params, int sign, double L, double t,
                               std::span<const double> x, std::span<const double> y,
                               const std::function<double(double)>& v_radial,
                               const osc::QuadratureSpec& quad = {}) {
    params.validate_basic();
    if (sign != 1 && sign != -1) throw validation_error("born_kernel: sign must be +/-1");
    if (x.size() != static_cast<std::size_t>(params.n) ||
        y.size() != static_cast<std::size_t>(params.n))
        throw validation_error("born_kernel: x, y must have dimension n");
    double xx = 0.0, yy = 0.0, xy = 0.0;
    for (int i = 0; i < params.n; ++i) {
        xx += x[i] * x[i];
        yy += y[i] * y[i];
        xy += x[i] * y[i];
    }
    const double xnorm = std::sqrt(xx), ynorm = std::sqrt(yy);
    const double cos_xy =
        (xnorm > 0.0 && ynorm > 0.0) ? std::clamp(xy / (xnorm * ynorm), -1.0, 1.0) : 1.0;
    BornKernelEvaluator eval(params, L, t,
                             [v_radial](double rho) {
                                 return complex{v_radial(rho), 0.0};
                             },
                             quad);
    return eval.at(sign, xnorm, ynorm, cos_xy);
}

// ---------------------------------------------------------------------------
// The functional a_{1,L} / a_{1,p,L}
// ---------------------------------------------------------------------------

struct BornFunctionalResult {
    complex value{0.0, 0.0};
    double err_estimate = 0.0;
    double L = 0.0;
    double t = 0.0;
    complex sp_prediction{0.0, 0.0};
    double flatness_deviation = 0.0;
    bool flagged = false;
};

/// Scaling-regime prefactor: t^{n/2} for the sup-norm pairing, and
/// L^{nm - n/2 + n/p - 2mn/p} for the L^p pairing, with t = L^{-(2m-1)}.
inline double functional_prefactor(const ModelParams& params, double L) {
    const double n = params.n, m = params.m;
    if (params.p_is_inf()) return std::pow(L, 0.5 * n - n * m);
    const double p = params.p;
    return std::pow(L, n * m - 0.5 * n + n / p - 2.0 * m * n / p);
}

/// a_{1,L}(V) (or a_{1,p,L}): sets t = L^{-(2m-1)}, pairs K = K^+ - K^-
/// against f_L x f_L through the kernel-flatness reduction at x = y = 0,
/// and validates the flatness at three boundary points of the
/// concentration ball.
inline BornFunctionalResult born_functional(const ModelParams& params, double L,
                                            const std::function<complex(double)>& v_radial,
                                            const osc::QuadratureSpec& quad = {},
                                            bool check_flatness = true) {
    params.validate_basic();
    if (!(L >= 16.0)) throw validation_error("born_functional: L must be >= 16");
    const double t = std::pow(L, -(2.0 * params.m - 1.0));
    BornKernelEvaluator eval(params, L, t, v_radial, quad);
    const KernelValue kp = eval.origin(+1);
    const KernelValue km = eval.origin(-1);
    const complex k00 = kp.value - km.value;
    const double k00_err = kp.err_estimate + km.err_estimate;

    const ConcentratedTestFunction f{params, L};
    const double pref = functional_prefactor(params, L);
    const double pairing_weight = f.l1_norm() * f.l1_norm();

    BornFunctionalResult out;
    out.L = L;
    out.t = t;
    out.value = pref * k00 * pairing_weight;
    out.err_estimate = pref * k00_err * pairing_weight;
    out.sp_prediction = -pref * eval.forecast_origin().value * pairing_weight;

    if (check_flatness && std::abs(k00) > 0.0) {
        const double e = eval.ball_radius();
        const double configs[3][3] = {
            {e, e, 1.0},   // x = y on the boundary
            {e, e, -1.0},  // antipodal
            {e, e, 0.0},   // orthogonal
        };
        double dev = 0.0;
        for (const auto& c : configs) {
            const complex kb = eval.at(+1, c[0], c[1], c[2]).value -
                               eval.at(-1, c[0], c[1], c[2]).value;
            dev = std::max(dev, std::abs(kb - k00) / std::abs(k00));
        }
        out.flatness_deviation = dev;
        out.flagged = dev > 0.05;
    }
    return out;
}

inline BornFunctionalResult born_functional(const ModelParams& params, double L,
                                            const RoughPotential& v,
                                            const osc::QuadratureSpec& quad = {},
                                            bool check_flatness = true) {
    return born_functional(
        params, L, [&v](double rho) { return complex{potential_value(v, rho), 0.0}; },
        quad, check_flatness);
}

/// The two halves of the cosine potential; the e^{-i c_m L |z|^q} half is
/// phase-coherent with the K^- kernel at x = y = 0.
inline std::function<complex(double)> potential_half(const RoughPotential& v,
                                                     int half_sign) {
    return [v, half_sign](double rho) -> complex {
        const double bump = v.rho(rho);
        if (bump == 0.0) return {0.0, 0.0};
        return 0.5 * bump *
               std::exp(iu * static_cast<double>(half_sign) * v.cm * v.L *
                        std::pow(rho, v.q));
    };
}

// ---------------------------------------------------------------------------
// Growth experiments
// ---------------------------------------------------------------------------

enum class PotentialKind { tuned, annulus_only };

struct GrowthExperimentResult {
    sweep::SweepResult functional;  // a_{1,L} rows, fit = ratio fit
    sweep::SweepResult holder;      // Hoelder norm rows
};

inline void validate_L_grid(const std::vector<double>& Ls) {
    if (Ls.size() < 5)
        throw validation_error("growth experiment: need >= 5 dyadic L values");
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        if (!(Ls[i] >= 16.0))
            throw validation_error("growth experiment: all L must be >= 16");
        if (i > 0 && std::abs(Ls[i] / Ls[i - 1] - 2.0) > 1e-9)
            throw validation_error("growth experiment: L grid must be dyadic");
    }
}

/// |a_{1,L}(V_L)| / ||V_L||_{C^alpha} across a dyadic L grid, log-log
/// fitted; target (n+1)/2 - 2m - alpha (sup pairing) or
/// n/p + (1-n)/2 - 2m - alpha (L^p pairing).  `annulus_only` replaces V_L
/// by the untuned bump rho_delta (the no-growth contrast).
inline GrowthExperimentResult growth_experiment(const ModelParams& params,
                                                const std::vector<double>& Ls,
                                                PotentialKind kind = PotentialKind::tuned,
                                                const osc::QuadratureSpec& quad = {},
                                                int threads = 0) {
    params.validate_experiment();
    validate_L_grid(Ls);

    GrowthExperimentResult out;
    out.functional.experiment_id =
        (kind == PotentialKind::tuned) ? "born_growth" : "born_growth_contrast";
    out.functional.params = params;
    out.functional.rows.resize(Ls.size());
    out.holder.experiment_id = "holder_norm";
    out.holder.params = params;
    out.holder.rows.resize(Ls.size());

    sweep::parallel_map(Ls.size(), threads, [&](std::size_t i) {
        const double L = Ls[i];
        sweep::SweepRow& frow = out.functional.rows[i];
        sweep::SweepRow& hrow = out.holder.rows[i];
        frow.point.L = hrow.point.L = L;
        frow.point.t = std::pow(L, -(2.0 * params.m - 1.0));
        const RoughPotential vl = make_rough_potential(params, L);
        try {
            BornFunctionalResult fr;
            if (kind == PotentialKind::tuned)
                fr = born_functional(params, L, vl, quad);
            else
                fr = born_functional(
                    params, L,
                    [&vl](double rho) { return complex{vl.rho(rho), 0.0}; }, quad);
            frow.value = fr.value;
            frow.err_estimate = fr.err_estimate;
            if (fr.flagged)
                frow.flags = "flatness:" + sweep::fmt_double(fr.flatness_deviation);
            else if (fr.err_estimate > 0.05 * std::abs(fr.value))
                frow.flags = "noise_floor";  // unusable for a slope fit
        } catch (const std::exception& e) {
            frow.flags = std::string("error:") + e.what();
        }
        try {
            const HolderGrid grid = holder_grid_for(vl);
            double norm;
            if (kind == PotentialKind::tuned)
                norm = holder_norm([&vl](double rho) { return potential_value(vl, rho); },
                                   params.alpha, grid);
            else
                norm = holder_norm([&vl](double rho) { return vl.rho(rho); },
                                   params.alpha, grid);
            hrow.value = complex{norm, 0.0};
        } catch (const std::exception& e) {
            hrow.flags = std::string("error:") + e.what();
        }
    });

    std::vector<std::pair<double, double>> ratio_pts;
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        const auto& frow = out.functional.rows[i];
        const auto& hrow = out.holder.rows[i];
        if (!frow.flags.empty() || !hrow.flags.empty()) continue;
        const double h = hrow.value.real();
        if (!(h > 0.0)) continue;
        ratio_pts.emplace_back(Ls[i], std::abs(frow.value) / h);
    }
    out.functional.excluded_count = static_cast<int>(Ls.size() - ratio_pts.size());
    if (ratio_pts.size() < 4)
        throw error(errc::nonconvergence,
                    "growth experiment: fewer than 4 valid points for the fit");
    auto fit = sweep::fit_loglog(ratio_pts);
    if (kind == PotentialKind::tuned) fit.target = params.growth_target();
    out.functional.fit = fit;
    return out;
}

/// Hoelder-norm scaling of V_L across the L grid; the fitted slope tracks
/// alpha (the norm behaves like delta^{-alpha} + L^alpha).
inline sweep::SweepResult holder_scaling_experiment(const ModelParams& params,
                                                    const std::vector<double>& Ls,
                                                    int threads = 0) {
    params.validate_basic();
    if (params.alpha >= 1.0)
        throw unsupported_error("holder experiment: alpha must lie in [0, 1)");
    if (Ls.size() < 4)
        throw validation_error("holder experiment: need >= 4 L values");
    sweep::SweepResult res;
    res.experiment_id = "holder_scaling";
    res.params = params;
    res.rows.resize(Ls.size());
    sweep::parallel_map(Ls.size(), threads, [&](std::size_t i) {
        sweep::SweepRow& row = res.rows[i];
        row.point.L = Ls[i];
        try {
            const RoughPotential vl = make_rough_potential(params, Ls[i]);
            const double norm =
                holder_norm([&vl](double rho) { return potential_value(vl, rho); },
                            params.alpha, holder_grid_for(vl));
            row.value = complex{norm, 0.0};
        } catch (const std::exception& e) {
            row.flags = std::string("error:") + e.what();
        }
    });
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : res.rows)
        if (row.flags.empty() && row.value.real() > 0.0)
            pts.emplace_back(row.point.L, row.value.real());
    res.excluded_count = static_cast<int>(res.rows.size() - pts.size());
    auto fit = sweep::fit_loglog(pts);
    fit.target = params.alpha;
    res.fit = fit;
    return res;
}

}  // namespace borngap::born
