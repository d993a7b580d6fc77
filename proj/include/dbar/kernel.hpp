#pragma once

#include <cmath>
#include <utility>

#include "dbar/curve.hpp"
#include "dbar/polyalg.hpp"

namespace dbar {

/// Curve plus weight power and evaluation guards; immutable, cheap to copy.
struct KernelContext {
    Curve curve;
    int mu = 0;                    // weight power, >= 0
    double guard_removable = 1e-3; // relative scale below which a kernel factor
                                   // counts as degenerate and the exact limit
                                   // branch is used
    double guard_diagonal = 1e-3;  // clearance scale for diagonal handling

    KernelContext(Curve c, int mu_ = 0) : curve(std::move(c)), mu(mu_) {
        if (mu < 0) throw validation_error("kernel context: mu must be >= 0");
    }
};

/// Hefer decomposition of f(zeta) - f(z) by per-variable difference quotients:
///   q1 = (f(zeta1, zeta2) - f(z1, zeta2)) / (zeta1 - z1)
///   q2 = (f(z1, zeta2)   - f(z1, z2))    / (zeta2 - z2)
/// so q1 (zeta1 - z1) + q2 (zeta2 - z2) = f(zeta) - f(z) identically.
inline std::pair<cx, cx> hefer_ambient(const BiPoly& f, cx zeta1, cx zeta2, cx z1, cx z2) {
    const cx q1 = diff_quotient(f.poly_in_z1(zeta2), zeta1, z1);
    const cx q2 = diff_quotient(f.poly_in_z2(z1), zeta2, z2);
    return {q1, q2};
}

/// Hefer coefficients at curve parameters: zeta = pi(tau), z = pi(t).
inline std::pair<cx, cx> hefer(const Curve& curve, cx t, cx tau) {
    return hefer_ambient(curve.param_data().f, curve.pi1(tau), curve.pi2(tau),
                         curve.pi1(t), curve.pi2(t));
}

namespace detail {

// sum_{m=0}^{count-1} x^m y^{count-1-m} == (x^count - y^count)/(x - y)
inline cx power_sum(cx x, cx y, int count) {
    cx acc{0.0, 0.0};
    cx yp{1.0, 0.0};
    for (int k = 0; k < count; ++k) {
        acc = acc * x + yp;
        yp *= y;
    }
    return acc;
}

} // namespace detail

/// The meromorphic Cauchy-type kernel C(t, tau) on the curve; first-order pole
/// exactly on the diagonal tau = t.
///
/// Cusp closed form (1/2 pi i) (tau^{rs} - t^{rs}) / ((tau^r - t^r)(tau^s - t^s)).
/// Near points where one factor degenerates (tau = omega t with omega an r-th or
/// s-th root of unity) the degenerate factor is cancelled exactly against the
/// numerator, which realizes the removable-singularity limit to all orders.
/// For a general curve, C = q1 / (2 pi i eta2) or -q2 / (2 pi i eta1), picking
/// the larger denominator; the two routes agree identically on the curve.
inline cx cauchy_C(const Curve& curve, cx t, cx tau, double guard_removable = 1e-3) {
    const cx two_pi_i{0.0, 2.0 * M_PI};
    if (tau == t) throw validation_error("cauchy_C: diagonal pole tau = t");
    if (curve.is_cusp()) {
        const int r = curve.cusp_data().r, s = curve.cusp_data().s;
        const cx tr = cxpow(t, r), ts = cxpow(t, s);
        const cx ur = cxpow(tau, r), us = cxpow(tau, s);
        const cx ar = ur - tr, as = us - ts;
        const double scale = guard_removable * std::pow(std::abs(t) + std::abs(tau), std::max(r, s));
        const bool small_r = std::abs(ar) < scale, small_s = std::abs(as) < scale;
        if (!small_r && !small_s)
            return (cxpow(tau, r * s) - cxpow(t, r * s)) / (ar * as) / two_pi_i;
        if (std::abs(as) >= std::abs(ar))
            return detail::power_sum(ur, tr, s) / as / two_pi_i; // r-factor cancelled
        return detail::power_sum(us, ts, r) / ar / two_pi_i;     // s-factor cancelled
    }
    const cx eta1 = curve.pi1(tau) - curve.pi1(t);
    const cx eta2 = curve.pi2(tau) - curve.pi2(t);
    if (eta1 == cx{0.0, 0.0} && eta2 == cx{0.0, 0.0})
        throw validation_error("cauchy_C: pi(tau) = pi(t) (diagonal or double point)");
    const auto [q1, q2] = hefer(curve, t, tau);
    if (std::abs(eta2) >= std::abs(eta1)) return q1 / eta2 / two_pi_i;
    return -q2 / eta1 / two_pi_i;
}

/// Holomorphic-in-t weight factor w0^mu with
///   w0(t, tau) = <a(t), a(tau)> / |a(tau)|^2,  a = (pi1, pi2);
/// w0 = 1 on the diagonal and vanishes at t = 0 on singular curves.
inline cx weight_factor(const Curve& curve, cx t, cx tau, int mu) {
    if (mu == 0) return cx{1.0, 0.0};
    if (mu < 0) throw validation_error("weight_factor: mu must be >= 0");
    const cx a1 = curve.pi1(tau), a2 = curve.pi2(tau);
    const double den = std::norm(a1) + std::norm(a2);
    if (den == 0.0) throw validation_error("weight_factor: a(tau) = 0 at the singular point");
    const cx w0 = (curve.pi1(t) * std::conj(a1) + curve.pi2(t) * std::conj(a2)) / den;
    return cxpow(w0, mu);
}

/// Assembled area-kernel density with respect to dA(tau):
///   kappa(t, tau) = -2i C(t, tau) w0(t, tau)^mu omega(tau),
/// with kappa ~ -1/(pi (tau - t)) near the diagonal (the residue is exactly
/// -1/pi for every curve in this class, independent of the normalization of f).
inline cx kernel_density(const KernelContext& ctx, cx t, cx tau) {
    if (tau == t) throw validation_error("kernel_density: diagonal");
    if (ctx.curve.singular_origin() && tau == cx{0.0, 0.0})
        throw validation_error("kernel_density: singular parameter");
    return cx{0.0, -2.0} * cauchy_C(ctx.curve, t, tau, ctx.guard_removable) *
           weight_factor(ctx.curve, t, tau, ctx.mu) * ctx.curve.omega(tau);
}

} // namespace dbar
