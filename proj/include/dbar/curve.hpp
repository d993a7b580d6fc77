#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "dbar/forms.hpp"
#include "dbar/polyalg.hpp"

namespace dbar {

/// Numerical semigroup <r, s> data for a cusp: Frobenius number and gap set.
struct SemigroupInfo {
    int r = 0;
    int s = 0;
    int frobenius = 0;
    std::vector<int> gaps;

    /// Membership k in <r,s> by brute force over representations k = a*r + b*s.
    bool contains(int k) const {
        if (k < 0) return false;
        for (int a = 0; a * r <= k; ++a)
            if ((k - a * r) % s == 0) return true;
        return false;
    }
};

inline SemigroupInfo semigroup(int r, int s) {
    SemigroupInfo info;
    info.r = r;
    info.s = s;
    info.frobenius = r * s - r - s;
    for (int k = 0; k <= info.frobenius; ++k)
        if (!info.contains(k)) info.gaps.push_back(k);
    return info;
}

/// The cusp z1^r = z2^s with gcd(r,s) = 1, 2 <= r < s,
/// parametrized by tau -> (tau^s, tau^r).
struct CuspCurve {
    int r = 2;
    int s = 3;
};

/// Polynomially parametrized plane curve with defining polynomial f,
/// f(pi1(tau), pi2(tau)) identically zero. The only singular parameter,
/// if any, is tau = 0.
struct ParamCurve {
    UniPoly pi1, pi2;
    BiPoly f;
    bool singular_origin = false;
};

/// A validated curve: either a cusp (with closed forms available) or a general
/// parametrized curve. A cusp also exposes its ParamCurve view. Immutable.
class Curve {
public:
    static Curve cusp(int r, int s) {
        if (r < 2 || r >= s) throw validation_error("cusp: need 2 <= r < s");
        if (std::gcd(r, s) != 1) throw validation_error("cusp: r and s must be coprime");
        Curve c;
        c.cusp_ = CuspCurve{r, s};
        c.par_.pi1 = UniPoly::monomial(s);
        c.par_.pi2 = UniPoly::monomial(r);
        c.par_.f = BiPoly({{r, 0, cx{1.0, 0.0}}, {0, s, cx{-1.0, 0.0}}});
        c.par_.singular_origin = true;
        c.finish();
        return c;
    }

    static Curve param(UniPoly pi1, UniPoly pi2, BiPoly f) {
        Curve c;
        c.par_.pi1 = std::move(pi1);
        c.par_.pi2 = std::move(pi2);
        c.par_.f = std::move(f);
        c.validate_param();
        c.finish();
        return c;
    }

    bool is_cusp() const { return cusp_.has_value(); }
    const CuspCurve& cusp_data() const {
        if (!cusp_) throw validation_error("curve is not a cusp");
        return *cusp_;
    }
    const ParamCurve& param_data() const { return par_; }
    bool singular_origin() const { return par_.singular_origin; }

    cx pi1(cx tau) const { return cusp_ ? cxpow(tau, cusp_->s) : par_.pi1.eval(tau); }
    cx pi2(cx tau) const { return cusp_ ? cxpow(tau, cusp_->r) : par_.pi2.eval(tau); }
    cx dpi1(cx tau) const {
        return cusp_ ? static_cast<double>(cusp_->s) * cxpow(tau, cusp_->s - 1)
                     : dpi1_.eval(tau);
    }
    cx dpi2(cx tau) const {
        return cusp_ ? static_cast<double>(cusp_->r) * cxpow(tau, cusp_->r - 1)
                     : dpi2_.eval(tau);
    }

    /// Canonical 1-form weight omega(tau): the kernel measure is omega dtau.
    /// Closed form tau^{-(r-1)(s-1)} on cusps, gradient formula otherwise.
    cx omega(cx tau) const {
        if (par_.singular_origin && tau == cx{0.0, 0.0})
            throw validation_error("omega: tau = 0 is the singular parameter");
        if (cusp_) {
            const int e = (cusp_->r - 1) * (cusp_->s - 1);
            return cx{1.0, 0.0} / cxpow(tau, e);
        }
        return omega_general(tau);
    }

    /// omega by the gradient formula
    ///   (conj(df/dz1) pi2' - conj(df/dz2) pi1') / |grad f|^2 at pi(tau);
    /// agrees with the cusp closed form on cusps.
    cx omega_general(cx tau) const {
        const cx z1 = par_.pi1.eval(tau), z2 = par_.pi2.eval(tau);
        const cx d1 = df1_.eval(z1, z2), d2 = df2_.eval(z1, z2);
        const double den = std::norm(d1) + std::norm(d2);
        if (den == 0.0) throw convergence_error("omega: vanishing gradient on curve");
        const cx num = std::conj(d1) * dpi2(tau) - std::conj(d2) * dpi1(tau);
        return num / den;
    }

    /// Vanishing order of omega at tau = 0: exact (r-1)(s-1) for cusps,
    /// a log-log slope estimate (rounded) for general singular curves, 0 when smooth.
    int omega_pole_order() const {
        if (cusp_) return (cusp_->r - 1) * (cusp_->s - 1);
        if (!par_.singular_origin) return 0;
        const cx dir = std::polar(1.0, 0.37);
        const double r1 = 1e-2, r2 = 1e-3;
        const double a1 = std::abs(omega_general(r1 * dir));
        const double a2 = std::abs(omega_general(r2 * dir));
        const double slope = (std::log(a2) - std::log(a1)) / (std::log(r2) - std::log(r1));
        return static_cast<int>(std::lround(-slope));
    }

    /// Lowest exponent of |pi(tau)| at 0 (the local weight-vanishing rate).
    int ambient_order() const {
        if (cusp_) return cusp_->r;
        auto low = [](const UniPoly& p) {
            for (std::size_t k = 0; k < p.coeffs.size(); ++k)
                if (p.coeffs[k] != cx{0.0, 0.0}) return static_cast<int>(k);
            return 1 << 20;
        };
        return std::min(low(par_.pi1), low(par_.pi2));
    }

private:
    Curve() = default;

    void finish() {
        dpi1_ = par_.pi1.derivative();
        dpi2_ = par_.pi2.derivative();
        df1_ = par_.f.partial(1);
        df2_ = par_.f.partial(2);
    }

    void validate_param() {
        if (par_.f.is_zero()) throw validation_error("curve: defining polynomial is zero");
        if (par_.pi1.degree() < 1 && par_.pi2.degree() < 1)
            throw validation_error("curve: constant parametrization");
        // f(pi(tau)) must vanish identically; check 32 pseudo-random parameters.
        std::mt19937 rng(0x5eedu);
        std::uniform_real_distribution<double> rad(0.1, 1.5), ang(0.0, 6.283185307179586);
        for (int k = 0; k < 32; ++k) {
            const cx tau = std::polar(rad(rng), ang(rng));
            const cx z1 = par_.pi1.eval(tau), z2 = par_.pi2.eval(tau);
            double scale = 1e-300;
            for (const auto& t : par_.f.terms)
                scale += std::abs(t.c) * std::pow(std::abs(z1), t.i) * std::pow(std::abs(z2), t.j);
            if (std::abs(par_.f.eval(z1, z2)) > 1e-10 * scale)
                throw validation_error("curve: f(pi(tau)) does not vanish on the curve");
        }
        const cx p0_1 = par_.pi1.eval(cx{0.0, 0.0}), p0_2 = par_.pi2.eval(cx{0.0, 0.0});
        const bool origin = std::abs(p0_1) + std::abs(p0_2) == 0.0;
        const cx d0_1 = par_.pi1.derivative().eval(cx{0.0, 0.0});
        const cx d0_2 = par_.pi2.derivative().eval(cx{0.0, 0.0});
        const bool crit0 = std::abs(d0_1) + std::abs(d0_2) == 0.0;
        par_.singular_origin = origin && crit0;
        // pi' must not vanish away from 0 (unibranch model); spot check a grid.
        UniPoly d1 = par_.pi1.derivative(), d2 = par_.pi2.derivative();
        for (int i = 1; i <= 8; ++i)
            for (int j = 0; j < 8; ++j) {
                const cx tau = std::polar(0.25 * i, 0.785398163397448 * j);
                if (std::abs(d1.eval(tau)) + std::abs(d2.eval(tau)) < 1e-14)
                    throw validation_error("curve: pi' vanishes away from the origin");
            }
    }

    std::optional<CuspCurve> cusp_;
    ParamCurve par_;
    UniPoly dpi1_, dpi2_;
    BiPoly df1_, df2_;
};

/// Free-function spelling of Curve::omega.
inline cx canonical_weight(const Curve& curve, cx tau) { return curve.omega(tau); }

/// Ambient polynomial data for pullback onto a curve:
/// sum of coeff * z1^e1 z2^e2 conj(z1)^c1 conj(z2)^c2, with at most one
/// dz-bar factor on the whole expression.
struct AmbientTerm {
    int e1 = 0, e2 = 0, c1 = 0, c2 = 0;
    cx coeff{1.0, 0.0};
};

enum class AmbientDbar { none, dzbar1, dzbar2 };

struct AmbientForm {
    std::vector<AmbientTerm> terms;
    AmbientDbar dz = AmbientDbar::none;
};

/// Substitute z_i -> pi_i(tau), conj(z_i) -> conj(pi_i)(conj tau),
/// dz-bar_i -> conj(pi_i')(conj tau) dtau-bar, and expand.
inline MonomialFormSum pullback(const AmbientForm& ambient, const Curve& curve) {
    const auto& par = curve.param_data();
    MonomialFormSum out;
    out.degree = ambient.dz == AmbientDbar::none ? 0 : 1;
    UniPoly dconj; // conj(pi_i') as a polynomial in tau-bar
    if (ambient.dz == AmbientDbar::dzbar1) dconj = par.pi1.derivative().conjugated();
    if (ambient.dz == AmbientDbar::dzbar2) dconj = par.pi2.derivative().conjugated();

    for (const auto& t : ambient.terms) {
        UniPoly holo = par.pi1.pow(t.e1) * par.pi2.pow(t.e2);
        UniPoly anti = par.pi1.conjugated().pow(t.c1) * par.pi2.conjugated().pow(t.c2);
        if (ambient.dz != AmbientDbar::none) anti = anti * dconj;
        for (std::size_t a = 0; a < holo.coeffs.size(); ++a) {
            if (holo.coeffs[a] == cx{0.0, 0.0}) continue;
            for (std::size_t b = 0; b < anti.coeffs.size(); ++b) {
                if (anti.coeffs[b] == cx{0.0, 0.0}) continue;
                FormTerm ft;
                ft.tau_pow = static_cast<int>(a);
                ft.conj_pow = static_cast<int>(b);
                ft.coeff = t.coeff * holo.coeffs[a] * anti.coeffs[b];
                out.terms.push_back(ft);
            }
        }
    }
    // merge duplicate (a, b) pairs
    MonomialFormSum merged;
    merged.degree = out.degree;
    for (const auto& ft : out.terms) {
        bool found = false;
        for (auto& mt : merged.terms)
            if (mt.tau_pow == ft.tau_pow && mt.conj_pow == ft.conj_pow && !mt.envelope) {
                mt.coeff += ft.coeff;
                found = true;
                break;
            }
        if (!found) merged.terms.push_back(ft);
    }
    std::erase_if(merged.terms, [](const FormTerm& t) { return t.coeff == cx{0.0, 0.0}; });
    return merged;
}

} // namespace dbar
