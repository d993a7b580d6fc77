#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "dbar/errors.hpp"
#include "dbar/polyalg.hpp"

namespace dbar {

/// Deterministic pairwise (tree) summation; the reduction order is fixed so
/// results are identical run to run regardless of scheduling.
inline cx pairwise_sum(const std::vector<cx>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        cx acc{0.0, 0.0};
        for (std::size_t k = lo; k < hi; ++k) acc += v[k];
        return acc;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline cx pairwise_sum(const std::vector<cx>& v) { return pairwise_sum(v, 0, v.size()); }

/// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on P_n; cached by order.
struct GaussLegendre {
    std::vector<double> nodes, weights;

    static const GaussLegendre& get(int order) {
        static std::map<int, GaussLegendre> cache;
        auto it = cache.find(order);
        if (it != cache.end()) return it->second;
        GaussLegendre gl;
        gl.compute(order);
        return cache.emplace(order, std::move(gl)).first->second;
    }

private:
    void compute(int n) {
        if (n < 1) throw validation_error("gauss-legendre: order must be positive");
        nodes.resize(n);
        weights.resize(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

/// Equispaced nodes tau_k = radius * exp(2 pi i k / n); the trapezoid rule is
/// spectrally accurate for integrands analytic in a neighborhood of the circle.
struct CircleRule {
    double radius = 1.0;
    int n = 2048;
};

/// Contour integral over |tau| = radius: sum f(tau_k) * (i tau_k) * (2 pi / n).
template <typename F>
cx integrate_circle(F&& f, const CircleRule& rule) {
    if (rule.radius <= 0.0) throw validation_error("circle rule: radius must be positive");
    if (rule.n < 1) throw validation_error("circle rule: need at least one node");
    std::vector<cx> vals(static_cast<std::size_t>(rule.n));
    const double dtheta = 2.0 * M_PI / rule.n;
    for (int k = 0; k < rule.n; ++k) {
        const cx tau = std::polar(rule.radius, dtheta * k);
        const cx v = f(tau);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw convergence_error("integrate_circle: non-finite integrand value");
        vals[static_cast<std::size_t>(k)] = v * cx{0.0, 1.0} * tau;
    }
    return pairwise_sum(vals) * dtheta;
}

/// Polar tensor rule on the annulus eps < |tau| < rho: Gauss-Legendre panels in
/// radius times the angular trapezoid rule.
struct AnnulusRule {
    double eps = 0.0;
    double rho = 1.0;
    int panels = 32;
    int order = 16;
    int n_theta = 1024;
};

/// Area integral over the annulus with respect to dA.
template <typename F>
cx integrate_annulus(F&& f, const AnnulusRule& rule) {
    if (!(rule.eps >= 0.0 && rule.eps < rule.rho))
        throw validation_error("annulus rule: need 0 <= eps < rho");
    const auto& gl = GaussLegendre::get(rule.order);
    const double dtheta = 2.0 * M_PI / rule.n_theta;
    const double panel_w = (rule.rho - rule.eps) / rule.panels;
    std::vector<cx> ring(static_cast<std::size_t>(rule.n_theta));
    std::vector<cx> radial;
    radial.reserve(static_cast<std::size_t>(rule.panels) * gl.nodes.size());
    for (int p = 0; p < rule.panels; ++p) {
        const double a = rule.eps + p * panel_w;
        for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
            const double r = a + 0.5 * panel_w * (gl.nodes[g] + 1.0);
            const double wr = 0.5 * panel_w * gl.weights[g] * r;
            for (int k = 0; k < rule.n_theta; ++k) {
                const cx tau = std::polar(r, dtheta * k);
                const cx v = f(tau);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw convergence_error("integrate_annulus: non-finite integrand value");
                ring[static_cast<std::size_t>(k)] = v;
            }
            radial.push_back(pairwise_sum(ring) * (dtheta * wr));
        }
    }
    return pairwise_sum(radial);
}

/// Controls for the shrinking inner-radius limit at the singular parameter.
struct PVConfig {
    double eps0 = 0.0;   // starting inner radius; <= 0 lets the caller pick a default
    double shrink = 0.5; // factor per step, in (0, 1)
    int max_steps = 40;
    double tol = 1e-9;   // stop when two successive values differ by less than this
};

struct PVResult {
    cx value;
    double last_increment = 0.0;
    int steps = 0;
};

/// Evaluate F(eps0 * shrink^k) until two successive values differ by < tol.
/// Throws convergence_error when max_steps is exhausted (divergence / log blowup).
template <typename F>
PVResult pv_limit(F&& func, const PVConfig& cfg) {
    if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0))
        throw validation_error("pv config: shrink must lie in (0, 1)");
    if (cfg.eps0 <= 0.0) throw validation_error("pv config: eps0 must be positive");
    cx prev = func(cfg.eps0);
    double eps = cfg.eps0;
    for (int k = 1; k <= cfg.max_steps; ++k) {
        eps *= cfg.shrink;
        const cx curr = func(eps);
        const double inc = std::abs(curr - prev);
        if (inc < cfg.tol) return {curr, inc, k};
        prev = curr;
    }
    throw convergence_error("pv_limit: no convergence within max_steps");
}

} // namespace dbar
