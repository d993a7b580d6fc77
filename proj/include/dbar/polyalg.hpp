#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "dbar/errors.hpp"

namespace dbar {

using cx = std::complex<double>;

/// Integer power by repeated squaring; e >= 0.
inline cx cxpow(cx base, int e) {
    cx r{1.0, 0.0};
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

/// Univariate polynomial with complex coefficients, ascending degree.
/// An empty coefficient vector is the zero polynomial.
struct UniPoly {
    std::vector<cx> coeffs;

    UniPoly() = default;
    explicit UniPoly(std::vector<cx> c) : coeffs(std::move(c)) { trim(); }

    static UniPoly monomial(int degree, cx c = cx{1.0, 0.0}) {
        UniPoly p;
        p.coeffs.assign(static_cast<std::size_t>(degree) + 1, cx{0.0, 0.0});
        p.coeffs.back() = c;
        p.trim();
        return p;
    }

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    bool is_zero() const { return coeffs.empty(); }

    // Drop trailing coefficients that are exactly zero.
    void trim() {
        while (!coeffs.empty() && coeffs.back() == cx{0.0, 0.0}) coeffs.pop_back();
    }

    cx eval(cx z) const {
        cx acc{0.0, 0.0};
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    UniPoly derivative() const {
        UniPoly d;
        if (coeffs.size() <= 1) return d;
        d.coeffs.resize(coeffs.size() - 1);
        for (std::size_t k = 1; k < coeffs.size(); ++k)
            d.coeffs[k - 1] = coeffs[k] * static_cast<double>(k);
        d.trim();
        return d;
    }

    /// Polynomial with conjugated coefficients, i.e. the p with p(conj z) = conj(this(z)).
    UniPoly conjugated() const {
        UniPoly c;
        c.coeffs.reserve(coeffs.size());
        for (cx a : coeffs) c.coeffs.push_back(std::conj(a));
        return c;
    }

    UniPoly operator+(const UniPoly& o) const {
        UniPoly r;
        r.coeffs.resize(std::max(coeffs.size(), o.coeffs.size()), cx{0.0, 0.0});
        for (std::size_t k = 0; k < coeffs.size(); ++k) r.coeffs[k] += coeffs[k];
        for (std::size_t k = 0; k < o.coeffs.size(); ++k) r.coeffs[k] += o.coeffs[k];
        r.trim();
        return r;
    }

    UniPoly operator*(const UniPoly& o) const {
        UniPoly r;
        if (is_zero() || o.is_zero()) return r;
        r.coeffs.assign(coeffs.size() + o.coeffs.size() - 1, cx{0.0, 0.0});
        for (std::size_t a = 0; a < coeffs.size(); ++a)
            for (std::size_t b = 0; b < o.coeffs.size(); ++b)
                r.coeffs[a + b] += coeffs[a] * o.coeffs[b];
        r.trim();
        return r;
    }

    UniPoly pow(int e) const {
        UniPoly r = monomial(0);
        UniPoly b = *this;
        while (e > 0) {
            if (e & 1) r = r * b;
            if (e > 1) b = b * b;
            e >>= 1;
        }
        return r;
    }
};

/// (p(z) - p(w)) / (z - w), computed by synthetic division of p(X) - p(w)
/// by (X - w); at z == w this is p'(z). Never forms the naive quotient.
inline cx diff_quotient(const UniPoly& p, cx z, cx w) {
    const auto& a = p.coeffs;
    if (a.size() <= 1) return cx{0.0, 0.0};
    const int n = static_cast<int>(a.size()) - 1;
    cx b = a[static_cast<std::size_t>(n)]; // b_{n-1}
    cx q{0.0, 0.0};
    for (int k = n - 1; k >= 0; --k) {
        q = q * z + b;
        if (k > 0) b = a[static_cast<std::size_t>(k)] + w * b;
    }
    return q;
}

/// Bivariate polynomial stored as sparse terms c * z1^i * z2^j.
/// Canonical form: unique (i, j) pairs, no zero coefficients, sorted.
struct BiTerm {
    int i = 0;
    int j = 0;
    cx c;
};

struct BiPoly {
    std::vector<BiTerm> terms;

    BiPoly() = default;
    explicit BiPoly(std::vector<BiTerm> t) { assign(std::move(t)); }

    void assign(std::vector<BiTerm> t) {
        std::sort(t.begin(), t.end(), [](const BiTerm& a, const BiTerm& b) {
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        });
        terms.clear();
        for (const auto& term : t) {
            if (term.i < 0 || term.j < 0)
                throw validation_error("BiPoly: negative exponent");
            if (term.c == cx{0.0, 0.0}) continue;
            if (!terms.empty() && terms.back().i == term.i && terms.back().j == term.j) {
                terms.back().c += term.c;
                if (terms.back().c == cx{0.0, 0.0}) terms.pop_back();
            } else {
                terms.push_back(term);
            }
        }
    }

    bool is_zero() const { return terms.empty(); }

    int degree1() const {
        int d = 0;
        for (const auto& t : terms) d = std::max(d, t.i);
        return d;
    }
    int degree2() const {
        int d = 0;
        for (const auto& t : terms) d = std::max(d, t.j);
        return d;
    }

    /// Coefficients of this as a polynomial in z1, each evaluated at z2 (Horner per row).
    UniPoly poly_in_z1(cx z2) const {
        UniPoly p;
        p.coeffs.assign(static_cast<std::size_t>(degree1()) + 1, cx{0.0, 0.0});
        for (const auto& t : terms) p.coeffs[static_cast<std::size_t>(t.i)] += t.c * cxpow(z2, t.j);
        p.trim();
        return p;
    }

    UniPoly poly_in_z2(cx z1) const {
        UniPoly p;
        p.coeffs.assign(static_cast<std::size_t>(degree2()) + 1, cx{0.0, 0.0});
        for (const auto& t : terms) p.coeffs[static_cast<std::size_t>(t.j)] += t.c * cxpow(z1, t.i);
        p.trim();
        return p;
    }

    // Horner in z1 of the z2-evaluated coefficient rows.
    cx eval(cx z1, cx z2) const { return poly_in_z1(z2).eval(z1); }

    /// Formal partial derivative; which is 1 or 2.
    BiPoly partial(int which) const {
        if (which != 1 && which != 2) throw validation_error("BiPoly::partial: which must be 1 or 2");
        std::vector<BiTerm> out;
        for (const auto& t : terms) {
            if (which == 1 && t.i > 0) out.push_back({t.i - 1, t.j, t.c * static_cast<double>(t.i)});
            if (which == 2 && t.j > 0) out.push_back({t.i, t.j - 1, t.c * static_cast<double>(t.j)});
        }
        return BiPoly(std::move(out));
    }
};

} // namespace dbar
