#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "dbar/polyalg.hpp"

namespace dbar {

/// Smooth radial window in x = |tau|^2: identically 1 for x <= rho0sq,
/// identically 0 for x >= rho1sq, C-infinity monotone in between.
/// beta(x) = psi((rho1sq - x)/(rho1sq - rho0sq)) with
/// psi(u) = sigma(u)/(sigma(u) + sigma(1-u)), sigma(u) = exp(-1/u) for u > 0.
struct RadialBump {
    double rho0sq = 0.0;
    double rho1sq = 1.0;

    RadialBump() = default;
    RadialBump(double r0sq, double r1sq) : rho0sq(r0sq), rho1sq(r1sq) {
        if (!(0.0 <= rho0sq && rho0sq < rho1sq))
            throw validation_error("bump: need 0 <= rho0sq < rho1sq");
    }

    static double sigma(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
    static double sigma_d(double u) { return u > 0.0 ? std::exp(-1.0 / u) / (u * u) : 0.0; }

    double value(double x) const {
        const double u = (rho1sq - x) / (rho1sq - rho0sq);
        if (u >= 1.0) return 1.0;
        if (u <= 0.0) return 0.0;
        const double s = sigma(u), t = sigma(1.0 - u);
        return s / (s + t);
    }

    /// d beta / dx; vanishes outside (rho0sq, rho1sq).
    double deriv(double x) const {
        if (x <= rho0sq || x >= rho1sq) return 0.0;
        const double u = (rho1sq - x) / (rho1sq - rho0sq);
        const double s = sigma(u), t = sigma(1.0 - u);
        const double psi_d = (sigma_d(u) * t + s * sigma_d(1.0 - u)) / ((s + t) * (s + t));
        return psi_d * (-1.0 / (rho1sq - rho0sq));
    }

    bool operator==(const RadialBump& o) const {
        return rho0sq == o.rho0sq && rho1sq == o.rho1sq;
    }
};

/// One monomial c * tau^a * conj(tau)^b, optionally windowed by a radial bump.
/// envelope_deriv marks terms carrying beta'(|tau|^2) instead of beta (these
/// arise from dbar of a windowed term and are never parsed directly).
struct FormTerm {
    int tau_pow = 0;
    int conj_pow = 0;
    cx coeff;
    std::optional<RadialBump> envelope;
    bool envelope_deriv = false;
};

/// Finite sum of windowed monomials in tau and conj(tau); degree 0 is a
/// function, degree 1 a (0,1)-form (the stored value is the dtau-bar
/// coefficient).
struct MonomialFormSum {
    std::vector<FormTerm> terms;
    int degree = 0;

    bool is_zero() const { return terms.empty(); }

    cx eval(cx tau) const {
        const double x = std::norm(tau);
        cx acc{0.0, 0.0};
        const cx ct = std::conj(tau);
        for (const auto& t : terms) {
            double w = 1.0;
            if (t.envelope) w = t.envelope_deriv ? t.envelope->deriv(x) : t.envelope->value(x);
            if (w == 0.0) continue;
            acc += t.coeff * w * cxpow(tau, t.tau_pow) * cxpow(ct, t.conj_pow);
        }
        return acc;
    }

    /// Exact d/d conj(tau), termwise:
    ///   tau^a conj(tau)^b         -> b tau^a conj(tau)^{b-1} dtau-bar
    ///   tau^a conj(tau)^b beta    -> (above)*beta + tau^{a+1} conj(tau)^b beta' dtau-bar
    MonomialFormSum dbar() const {
        if (degree != 0) throw validation_error("dbar: form already has degree 1");
        MonomialFormSum out;
        out.degree = 1;
        for (const auto& t : terms) {
            if (t.envelope_deriv)
                throw validation_error("dbar: derivative-envelope terms not supported as input");
            if (t.conj_pow > 0) {
                FormTerm d = t;
                d.conj_pow -= 1;
                d.coeff *= static_cast<double>(t.conj_pow);
                out.terms.push_back(d);
            }
            if (t.envelope) {
                FormTerm d = t;
                d.tau_pow += 1;
                d.envelope_deriv = true;
                out.terms.push_back(d);
            }
        }
        return out;
    }

    MonomialFormSum operator+(const MonomialFormSum& o) const {
        if (degree != o.degree) throw validation_error("form sum: mixed degrees");
        MonomialFormSum r = *this;
        r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
        return r;
    }

    MonomialFormSum scaled(cx factor) const {
        MonomialFormSum r = *this;
        for (auto& t : r.terms) t.coeff *= factor;
        return r;
    }
};

inline cx eval_form(const MonomialFormSum& form, cx tau) { return form.eval(tau); }
inline MonomialFormSum dbar(const MonomialFormSum& form) { return form.dbar(); }

namespace detail {

struct ExprCursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool accept_word(const char* w) {
        skip_ws();
        std::size_t n = 0;
        while (w[n]) ++n;
        if (text.compare(pos, n, w) == 0) {
            pos += n;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw validation_error(msg + " at position " + std::to_string(pos));
    }

    // Unsigned real literal: digits with optional fraction/exponent.
    std::optional<double> try_real() {
        skip_ws();
        std::size_t start = pos;
        std::size_t p = pos;
        while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]))) ++p;
        bool any = p > start;
        if (p < text.size() && text[p] == '.') {
            ++p;
            while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]))) ++p;
            any = any || p > start + 1;
        }
        if (!any) return std::nullopt;
        if (p < text.size() && (text[p] == 'e' || text[p] == 'E')) {
            std::size_t q = p + 1;
            if (q < text.size() && (text[q] == '+' || text[q] == '-')) ++q;
            std::size_t d = q;
            while (d < text.size() && std::isdigit(static_cast<unsigned char>(text[d]))) ++d;
            if (d > q) p = d;
        }
        double v = std::strtod(text.c_str() + start, nullptr);
        pos = p;
        return v;
    }

    int require_uint(const char* what) {
        skip_ws();
        if (pos < text.size() && text[pos] == '-') fail(std::string("negative ") + what);
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) fail(std::string("expected ") + what);
        return std::atoi(text.substr(start, pos - start).c_str());
    }
};

// Complex literal in 'a+bi' form: "3", "2i", "1.5-2i", "-0.4i". The imaginary
// tail is consumed only when the trailing 'i' is actually present.
inline std::optional<cx> try_complex_literal(ExprCursor& c) {
    c.skip_ws();
    std::size_t save = c.pos;
    double sign = 1.0;
    if (c.accept('-')) sign = -1.0;
    else if (c.accept('+')) sign = 1.0;
    auto first = c.try_real();
    if (!first) {
        c.pos = save;
        return std::nullopt;
    }
    // pure imaginary: "2i"
    if (c.pos < c.text.size() && c.text[c.pos] == 'i') {
        ++c.pos;
        return cx{0.0, sign * *first};
    }
    // "a+bi" / "a-bi" with lookahead for the 'i'
    std::size_t mid = c.pos;
    c.skip_ws();
    if (c.pos < c.text.size() && (c.text[c.pos] == '+' || c.text[c.pos] == '-')) {
        double isign = c.text[c.pos] == '-' ? -1.0 : 1.0;
        ++c.pos;
        auto second = c.try_real();
        if (second && c.pos < c.text.size() && c.text[c.pos] == 'i') {
            ++c.pos;
            return cx{sign * *first, isign * *second};
        }
        c.pos = mid; // not a complex tail, leave the +/- for the sum parser
    } else {
        c.pos = mid;
    }
    return cx{sign * *first, 0.0};
}

} // namespace detail

/// Parse a standalone complex number in 'a+bi' text form.
inline cx parse_complex(const std::string& text) {
    detail::ExprCursor c{text};
    auto v = detail::try_complex_literal(c);
    if (!v || !c.eof()) throw validation_error("bad complex literal: '" + text + "'");
    return *v;
}

/// Parse the form grammar:
///   form   := sum [',' 'dbar']
///   sum    := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := 'tau' ['^' int] | '~tau' ['^' int] | 'bump(' real ',' real ')' | complex literal
/// Whitespace-insensitive. At most one bump factor per term.
inline MonomialFormSum parse_expr(const std::string& text) {
    detail::ExprCursor c{text};
    MonomialFormSum out;

    auto parse_term = [&](double lead_sign) {
        FormTerm term;
        term.coeff = cx{lead_sign, 0.0};
        bool first_factor = true;
        for (;;) {
            if (!first_factor && !c.accept('*')) break;
            c.skip_ws();
            if (c.accept_word("~tau")) {
                int e = 1;
                if (c.accept('^')) e = c.require_uint("exponent");
                term.conj_pow += e;
            } else if (c.accept_word("tau")) {
                int e = 1;
                if (c.accept('^')) e = c.require_uint("exponent");
                term.tau_pow += e;
            } else if (c.accept_word("bump")) {
                if (!c.accept('(')) c.fail("expected '(' after bump");
                auto r0 = c.try_real();
                if (!r0) c.fail("expected bump inner threshold");
                if (!c.accept(',')) c.fail("expected ',' in bump");
                auto r1 = c.try_real();
                if (!r1) c.fail("expected bump outer threshold");
                if (!c.accept(')')) c.fail("expected ')' after bump");
                if (term.envelope) c.fail("at most one bump factor per term");
                term.envelope = RadialBump(*r0, *r1);
            } else if (auto lit = detail::try_complex_literal(c)) {
                term.coeff *= *lit;
            } else {
                c.fail(first_factor ? "expected term" : "expected factor after '*'");
            }
            first_factor = false;
        }
        if (term.coeff != cx{0.0, 0.0}) out.terms.push_back(term);
    };

    double sign = 1.0;
    if (c.accept('-')) sign = -1.0;
    parse_term(sign);
    for (;;) {
        if (c.accept('+')) parse_term(1.0);
        else if (c.accept('-')) parse_term(-1.0);
        else break;
    }
    if (c.accept(',')) {
        if (!c.accept_word("dbar")) c.fail("expected 'dbar' after ','");
        out.degree = 1;
    }
    if (!c.eof()) c.fail("unexpected trailing input");
    return out;
}

} // namespace dbar
