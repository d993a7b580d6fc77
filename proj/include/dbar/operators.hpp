#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "dbar/curve.hpp"
#include "dbar/forms.hpp"
#include "dbar/kernel.hpp"
#include "dbar/quad.hpp"

namespace dbar {

/// Centered O(h^2) finite-difference d/d conj(t).
template <typename F>
cx dbar_fd(F&& u, cx t, double h) {
    const cx ih{0.0, h};
    return ((u(t + h) - u(t - h)) + cx{0.0, 1.0} * (u(t + ih) - u(t - ih))) / (4.0 * h);
}

/// Boundary representation operator
///   P_rho phi(t) = integral over |tau| = rho of phi(tau) C(t, tau) omega(tau) dtau.
/// For strongly holomorphic phi this reproduces phi(t); gap monomials are
/// annihilated.
inline cx represent_boundary(const Curve& curve, const std::function<cx(cx)>& phi, double rho,
                             cx t, int nodes = 2048) {
    if (std::abs(t) >= rho) throw validation_error("represent_boundary: need |t| < rho");
    if (t == cx{0.0, 0.0}) throw validation_error("represent_boundary: t = 0 excluded");
    return integrate_circle(
        [&](cx tau) { return phi(tau) * cauchy_C(curve, t, tau) * curve.omega(tau); },
        CircleRule{rho, nodes});
}

inline cx represent_boundary(const Curve& curve, const MonomialFormSum& phi, double rho, cx t,
                             int nodes = 2048) {
    if (phi.degree != 0) throw validation_error("represent_boundary: phi must have degree 0");
    return represent_boundary(
        curve, std::function<cx(cx)>([&](cx tau) { return phi.eval(tau); }), rho, t, nodes);
}

// ---------------------------------------------------------------------------
// Moment criterion
// ---------------------------------------------------------------------------

struct MomentOptions {
    double eps = 0.1;        // inner test radius; the pairing is recomputed at 2*eps
    double moment_tol = 1e-6;
    double agree_tol = 1e-9; // allowed |m_j(eps) - m_j(2 eps)|
    int nodes = 2048;
};

struct MomentEntry {
    int j = 0;
    cx value;
    bool zero = false;
};

struct MomentReport {
    std::vector<MomentEntry> entries;
    bool verdict = false; // strongly holomorphic
    double eps_used = 0.0;
    double eps_check = 0.0;
};

/// Pairings m_j = integral over |tau| = eps of phi(tau) tau^j omega(tau) dtau
/// for every j in the semigroup with j <= frobenius; phi is strongly
/// holomorphic exactly when all pairings vanish. Each pairing is recomputed at
/// radius 2*eps and must agree (radius independence of the criterion).
inline MomentReport moment_check(const Curve& curve, const MonomialFormSum& phi,
                                 const MomentOptions& opts = {}) {
    if (!curve.is_cusp()) throw validation_error("moment_check: cusp curve required");
    if (phi.degree != 0) throw validation_error("moment_check: phi must have degree 0");
    for (const auto& term : phi.terms) {
        if (term.conj_pow > 0 || term.envelope_deriv)
            throw validation_error("moment_check: phi is not a weakly holomorphic candidate");
        if (term.envelope && 4.0 * opts.eps * opts.eps > term.envelope->rho0sq)
            throw validation_error("moment_check: envelope plateau must cover both test radii");
    }
    const auto& cusp = curve.cusp_data();
    const SemigroupInfo sg = semigroup(cusp.r, cusp.s);

    // Returns the pairing and the magnitude of the largest summand, which sets
    // the attainable rounding floor of the cancellation-heavy trapezoid sum.
    auto pairing = [&](int j, double radius) {
        double scale = 0.0;
        const cx value = integrate_circle(
            [&](cx tau) {
                const cx v = phi.eval(tau) * cxpow(tau, j) * curve.omega(tau);
                scale = std::max(scale, std::abs(v) * radius);
                return v;
            },
            CircleRule{radius, opts.nodes});
        return std::pair{value, 2.0 * M_PI * scale};
    };

    MomentReport report;
    report.eps_used = opts.eps;
    report.eps_check = 2.0 * opts.eps;
    report.verdict = true;
    const double ulp = std::numeric_limits<double>::epsilon();
    for (int j = 0; j <= sg.frobenius; ++j) {
        if (!sg.contains(j)) continue;
        const auto [m, scale] = pairing(j, opts.eps);
        const auto [m2, scale2] = pairing(j, report.eps_check);
        const double floor = 32.0 * ulp * std::log2(static_cast<double>(opts.nodes)) *
                             (scale + scale2);
        if (std::abs(m - m2) > opts.agree_tol * std::max(1.0, std::abs(m)) + floor)
            throw convergence_error("moment_check: pairings disagree between radii; phi is not "
                                    "holomorphic on the annulus");
        MomentEntry entry{j, m, std::abs(m) < opts.moment_tol};
        report.verdict = report.verdict && entry.zero;
        report.entries.push_back(entry);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Area solution operator
// ---------------------------------------------------------------------------

struct QuadOptions {
    int n_theta = 1024;          // angular nodes of the global rule
    int panels_per_segment = 3;  // radial Gauss-Legendre panels per segment
    int gl_order = 16;
    int local_n_theta = 512;     // target-centered rule
    int local_panels = 3;
    int local_gl_order = 16;
    double delta_cap = 0.1;      // largest radius of the target-centered disc
    std::optional<double> domain_radius; // overrides the envelope support radius
    PVConfig pv{};               // eps0 <= 0 selects r_hi / 8
};

struct SolveEntry {
    cx t;
    cx u;
    int pv_steps = 0;
    double pv_increment = 0.0;
};

struct SolveReport {
    std::vector<SolveEntry> values;
    double domain_inner = 0.0;
    double domain_outer = 0.0;
    bool principal_value = false;
    QuadOptions options;
};

namespace detail {

struct SupportInfo {
    double r_hi = 0.0;
    double r_lo = 0.0;          // the form vanishes identically below this radius
    bool vanishes_near_0 = false;
    int min_degree_at_0 = 0;    // min a+b among terms surviving near 0
    std::vector<double> feature_radii; // envelope knots, for panel alignment
};

inline SupportInfo analyze_support(const MonomialFormSum& phi, const QuadOptions& opts) {
    SupportInfo info;
    bool all_enveloped = true;
    double sup = 0.0;
    double x0 = -1.0;
    for (const auto& t : phi.terms) {
        if (t.envelope) {
            sup = std::max(sup, std::sqrt(t.envelope->rho1sq));
            x0 = x0 < 0.0 ? t.envelope->rho0sq : std::min(x0, t.envelope->rho0sq);
            info.feature_radii.push_back(std::sqrt(t.envelope->rho0sq));
            info.feature_radii.push_back(std::sqrt(t.envelope->rho1sq));
        } else {
            all_enveloped = false;
        }
    }
    if (opts.domain_radius) {
        if (*opts.domain_radius <= 0.0)
            throw validation_error("solve_area: domain radius must be positive");
        info.r_hi = *opts.domain_radius;
    } else {
        if (!all_enveloped || phi.terms.empty())
            throw validation_error(
                "solve_area: unbounded support; give every term a bump envelope or set a "
                "domain radius");
        info.r_hi = sup;
    }

    // Terms alive on the common plateau [0, x0): bare terms and enveloped
    // non-derivative terms (beta == 1 there); derivative envelopes vanish.
    if (x0 != 0.0) {
        double total = 0.0;
        std::vector<FormTerm> plateau;
        for (const auto& t : phi.terms) {
            total += std::abs(t.coeff);
            if (t.envelope_deriv) continue;
            bool found = false;
            for (auto& p : plateau)
                if (p.tau_pow == t.tau_pow && p.conj_pow == t.conj_pow) {
                    p.coeff += t.coeff;
                    found = true;
                    break;
                }
            if (!found) {
                FormTerm p;
                p.tau_pow = t.tau_pow;
                p.conj_pow = t.conj_pow;
                p.coeff = t.coeff;
                plateau.push_back(p);
            }
        }
        bool vanish = x0 > 0.0; // needs an actual plateau region
        int min_deg = 1 << 20;
        for (const auto& p : plateau) {
            if (std::abs(p.coeff) <= 1e-14 * total) continue;
            vanish = false;
            min_deg = std::min(min_deg, p.tau_pow + p.conj_pow);
        }
        info.vanishes_near_0 = vanish && !phi.terms.empty();
        info.min_degree_at_0 = min_deg == (1 << 20) ? 0 : min_deg;
        if (info.vanishes_near_0) info.r_lo = std::sqrt(x0);
    }
    info.r_lo = std::min(info.r_lo, info.r_hi);
    return info;
}

// Radial segment boundaries on [lo, hi]: dyadic subdivision from the outer
// radius plus the supplied feature radii, so every panel sees a smooth slice.
// Twelve dyadic levels bottom out the grading; anything below that width is
// one segment.
inline std::vector<double> segment_breaks(double lo, double hi,
                                          const std::vector<double>& features) {
    std::vector<double> b{lo, hi};
    const double floor = std::max(lo * 1.0000000001, hi * 0x1p-12);
    double x = hi * 0.5;
    for (int k = 0; k < 60 && x > floor; ++k, x *= 0.5)
        if (x > lo && x < hi) b.push_back(x);
    for (double f : features)
        if (f > lo * (1.0 + 1e-12) && f < hi * (1.0 - 1e-12)) b.push_back(f);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(),
                        [hi](double a, double c) { return c - a < 1e-13 * hi; }),
            b.end());
    if (b.back() < hi) b.back() = hi;
    if (b.front() > lo) b.front() = lo;
    return b;
}

template <typename G>
cx integrate_band(G&& g, double a, double b, int panels, int order, int n_theta) {
    const auto& gl = GaussLegendre::get(order);
    const double dtheta = 2.0 * M_PI / n_theta;
    const double pw = (b - a) / panels;
    std::vector<cx> ring(static_cast<std::size_t>(n_theta));
    std::vector<cx> radial;
    radial.reserve(static_cast<std::size_t>(panels) * gl.nodes.size());
    for (int p = 0; p < panels; ++p) {
        const double pa = a + p * pw;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double rho = pa + 0.5 * pw * (gl.nodes[q] + 1.0);
            const double w = 0.5 * pw * gl.weights[q] * rho * dtheta;
            for (int k = 0; k < n_theta; ++k) ring[static_cast<std::size_t>(k)] = g(rho, dtheta * k);
            radial.push_back(pairwise_sum(ring) * w);
        }
    }
    return pairwise_sum(radial);
}

} // namespace detail

/// Area solution operator for the dbar-equation:
///   K phi(t) = integral of kappa(t, tau) phi-hat(tau) dA(tau)
/// over eps < |tau| < r_hi, with the inner limit taken as a shrinking
/// principal value when the form does not vanish near the singular parameter.
///
/// When t lies inside the integration domain the diagonal is handled on a disc
/// D(t, delta) by subtracting phi-hat(t) * (-1/(pi (tau - t))); the subtracted
/// term integrates to exactly zero over the centered disc, so no correction is
/// added back. The disc carries a radial C-infinity window m so the remaining
/// (masked) integrand stays smooth for the global polar rule.
inline SolveReport solve_area(const KernelContext& ctx, const MonomialFormSum& phi,
                              std::span<const cx> targets, const QuadOptions& opts = {}) {
    if (phi.degree != 1) throw validation_error("solve_area: phi must be a (0,1)-form");
    SolveReport report;
    report.options = opts;
    if (phi.is_zero()) {
        for (cx t : targets) report.values.push_back({t, cx{0.0, 0.0}, 0, 0.0});
        return report;
    }

    const auto info = detail::analyze_support(phi, opts);
    const bool singular = ctx.curve.singular_origin();
    const bool pv_mode = singular && !info.vanishes_near_0;
    if (pv_mode) {
        const int exponent =
            info.min_degree_at_0 - ctx.curve.omega_pole_order() - ctx.mu * ctx.curve.ambient_order();
        if (exponent <= -2)
            throw validation_error("solve_area: non-integrable singularity at 0 (exponent <= -2)");
    }
    const double r_lo = pv_mode ? 0.0 : info.r_lo;
    report.domain_inner = r_lo;
    report.domain_outer = info.r_hi;
    report.principal_value = pv_mode;

    for (cx t : targets) {
        if (t == cx{0.0, 0.0})
            throw validation_error("solve_area: target at the singular parameter");
        const double at = std::abs(t);
        double delta1 = std::min(opts.delta_cap, 0.45 * (info.r_hi - at));
        if (singular) delta1 = std::min(delta1, 0.45 * at);
        // below the clearance guard the masked disc cannot be resolved; fall
        // back to the plain rule (the integrand there is either smooth or
        // vanishing in the supported configurations)
        const bool engaged = delta1 > ctx.guard_diagonal * info.r_hi && at < info.r_hi &&
                             at + delta1 > r_lo;
        const RadialBump mask = engaged ? RadialBump(0.25 * delta1 * delta1, delta1 * delta1)
                                        : RadialBump(0.0, 1.0);

        auto global_integrand = [&](double rho, double theta) -> cx {
            const cx tau = std::polar(rho, theta);
            const cx f = phi.eval(tau);
            if (f == cx{0.0, 0.0}) return cx{0.0, 0.0};
            double w = 1.0;
            if (engaged) {
                const double x = std::norm(tau - t);
                if (x < delta1 * delta1) {
                    w = 1.0 - mask.value(x);
                    if (w == 0.0) return cx{0.0, 0.0};
                }
            }
            return kernel_density(ctx, t, tau) * f * w;
        };

        std::vector<double> features = info.feature_radii;
        if (engaged) {
            features.push_back(at - delta1);
            features.push_back(at - 0.5 * delta1);
            features.push_back(at + 0.5 * delta1);
            features.push_back(at + delta1);
        }

        auto integrate_range = [&](double lo, double hi) -> cx {
            const auto breaks = detail::segment_breaks(lo, hi, features);
            std::vector<cx> parts;
            for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
                parts.push_back(detail::integrate_band(global_integrand, breaks[k], breaks[k + 1],
                                                       opts.panels_per_segment, opts.gl_order,
                                                       opts.n_theta));
            return pairwise_sum(parts);
        };

        cx global;
        int pv_steps = 0;
        double pv_increment = 0.0;
        if (pv_mode) {
            PVConfig pv = opts.pv;
            if (pv.eps0 <= 0.0) pv.eps0 = info.r_hi / 8.0;
            if (engaged) pv.eps0 = std::min(pv.eps0, 0.8 * (at - delta1));
            cx running{0.0, 0.0};
            double last_eps = -1.0;
            auto cumulative = [&](double eps) {
                if (last_eps < 0.0) running = integrate_range(eps, info.r_hi);
                else running += integrate_range(eps, last_eps);
                last_eps = eps;
                return running;
            };
            const PVResult res = pv_limit(cumulative, pv);
            global = res.value;
            pv_steps = res.steps;
            pv_increment = res.last_increment;
        } else {
            global = integrate_range(r_lo, info.r_hi);
        }

        cx local{0.0, 0.0};
        if (engaged) {
            const cx ft = phi.eval(t);
            auto local_integrand = [&](double rho, double theta) -> cx {
                const double m = mask.value(rho * rho);
                if (m == 0.0) return cx{0.0, 0.0};
                const cx offset = std::polar(rho, theta);
                const cx tau = t + offset;
                return m * (kernel_density(ctx, t, tau) * phi.eval(tau) + ft / (M_PI * offset));
            };
            const auto& gl = GaussLegendre::get(opts.local_gl_order);
            const double dtheta = 2.0 * M_PI / opts.local_n_theta;
            std::vector<cx> ring(static_cast<std::size_t>(opts.local_n_theta));
            std::vector<cx> radial;
            const double knots[3] = {0.0, 0.5 * delta1, delta1};
            for (int seg = 0; seg < 2; ++seg) {
                const double pw = (knots[seg + 1] - knots[seg]) / opts.local_panels;
                for (int p = 0; p < opts.local_panels; ++p) {
                    const double pa = knots[seg] + p * pw;
                    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                        const double rho = pa + 0.5 * pw * (gl.nodes[q] + 1.0);
                        const double w = 0.5 * pw * gl.weights[q] * rho * dtheta;
                        for (int k = 0; k < opts.local_n_theta; ++k)
                            ring[static_cast<std::size_t>(k)] = local_integrand(rho, dtheta * k);
                        radial.push_back(pairwise_sum(ring) * w);
                    }
                }
            }
            local = pairwise_sum(radial);
        }

        report.values.push_back({t, global + local, pv_steps, pv_increment});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Koppelman verification and growth profiling
// ---------------------------------------------------------------------------

struct VerifyEntry {
    cx t;
    cx u;
    double residual = 0.0;
};

struct VerifyReport {
    std::vector<VerifyEntry> entries;
    double max_residual = 0.0;
};

/// Checks dbar(K phi) = phi-hat at the targets with the centered O(h^2)
/// stencil; returns per-target residuals and their maximum.
inline VerifyReport verify_koppelman(const KernelContext& ctx, const MonomialFormSum& phi,
                                     std::span<const cx> targets, double h = 1e-4,
                                     const QuadOptions& opts = {}) {
    std::vector<cx> stencil;
    stencil.reserve(targets.size() * 5);
    const cx ih{0.0, h};
    for (cx t : targets) {
        stencil.push_back(t + h);
        stencil.push_back(t - h);
        stencil.push_back(t + ih);
        stencil.push_back(t - ih);
        stencil.push_back(t);
    }
    const SolveReport solved = solve_area(ctx, phi, stencil, opts);
    VerifyReport report;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const cx up = solved.values[5 * i + 0].u;
        const cx um = solved.values[5 * i + 1].u;
        const cx vp = solved.values[5 * i + 2].u;
        const cx vm = solved.values[5 * i + 3].u;
        const cx uc = solved.values[5 * i + 4].u;
        const cx d = ((up - um) + cx{0.0, 1.0} * (vp - vm)) / (4.0 * h);
        const double res = std::abs(d - phi.eval(targets[i]));
        report.entries.push_back({targets[i], uc, res});
        report.max_residual = std::max(report.max_residual, res);
    }
    return report;
}

struct GrowthFit {
    double slope = 0.0;
    double fit_residual = 0.0;                    // rms of the least-squares fit
    std::vector<std::pair<double, double>> points; // (log r, log |u|)
};

/// Least-squares slope of log|u(r e^{i theta})| against log r.
template <typename F>
GrowthFit growth_profile(F&& u, double theta, std::span<const double> radii) {
    if (radii.size() < 2) throw validation_error("growth_profile: need at least two radii");
    GrowthFit fit;
    for (double r : radii) {
        if (r <= 0.0) throw validation_error("growth_profile: radii must be positive");
        const double a = std::abs(u(std::polar(r, theta)));
        if (a == 0.0 || !std::isfinite(a))
            throw convergence_error("growth_profile: u vanishes on a sample (slope undefined)");
        fit.points.emplace_back(std::log(r), std::log(a));
    }
    double sx = 0, sy = 0;
    for (auto [x, y] : fit.points) {
        sx += x;
        sy += y;
    }
    const double n = static_cast<double>(fit.points.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (auto [x, y] : fit.points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    fit.slope = sxy / sxx;
    double ss = 0;
    for (auto [x, y] : fit.points) {
        const double pred = my + fit.slope * (x - mx);
        ss += (y - pred) * (y - pred);
    }
    fit.fit_residual = std::sqrt(ss / n);
    return fit;
}

} // namespace dbar
