#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "algforge/algebroid.hpp"
#include "algforge/expr.hpp"
#include "algforge/graded.hpp"
#include "algforge/comorphism.hpp"
#include "algforge/liegroup.hpp"
#include "algforge/mechanics.hpp"

namespace testing_support {

using namespace algforge;

inline std::uint64_t seed() {
    const char* s = std::getenv("ALGFORGE_SEED");
    return s && *s ? std::strtoull(s, nullptr, 10) : 20261016ULL;
}

// One generator per call site keeps test cases independent of execution order.
inline std::mt19937_64 make_rng(std::uint64_t salt) { return std::mt19937_64(seed() * 1000003ULL + salt); }

inline int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Rational small_rational(std::mt19937_64& rng) {
    Rational q(uniform(rng, -4, 4), uniform(rng, 1, 3));
    q.canonicalize();
    return q;
}

inline QVec random_qvec(std::mt19937_64& rng, int n) {
    QVec v;
    for (int i = 0; i < n; ++i) v.push_back(small_rational(rng));
    return v;
}

// Sum of up to `terms` monomials of total degree ≤ deg in vars.
inline Poly random_poly(std::mt19937_64& rng, const SymbolList& vars, int deg, int terms = 3) {
    Poly p;
    for (int t = 0; t < terms; ++t) {
        Poly m(small_rational(rng));
        int d = uniform(rng, 0, deg);
        for (int i = 0; i < d && !vars.empty(); ++i) m *= Poly(vars[uniform(rng, 0, static_cast<int>(vars.size()) - 1)]);
        p += m;
    }
    return p;
}

inline Algebroid1 random_algebroid(std::mt19937_64& rng, int m, int n, int deg) {
    Algebroid1 A = zero_algebroid(indexed("x", m), n);
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i) {
            A.QL[a][i] = random_poly(rng, A.base, deg, 2);
            A.QR[a][i] = random_poly(rng, A.base, deg, 2);
        }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A.Qbr[k][i][j] = random_poly(rng, A.base, deg, 2);
    return A;
}

inline Algebroid1 random_skew_algebroid(std::mt19937_64& rng, int m, int n, int deg) {
    Algebroid1 A = random_algebroid(rng, m, n, deg);
    A.QR = A.QL;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            A.Qbr[k][i][i] = Poly();
            for (int j = 0; j < i; ++j) A.Qbr[k][i][j] = -A.Qbr[k][j][i];
        }
    return A;
}

inline Constants zero_constants(int n) { return Constants(n, std::vector<QVec>(n, QVec(n, Rational(0)))); }

// [e_i, e_j] = Σ_k ε_{ijk} e_k
inline Constants so3_constants() {
    Constants c = zero_constants(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                int e = (i - j) * (j - k) * (k - i) / 2;
                c[k][i][j] = e;
            }
    return c;
}

// [e1, e2] = e3 + e1 and the remaining so(3) brackets.
inline Constants perturbed_so3_constants() {
    Constants c = so3_constants();
    c[0][0][1] = 1;
    c[0][1][0] = -1;
    return c;
}

// [e1, e2] = e1
inline Constants aff1_constants() {
    Constants c = zero_constants(2);
    c[0][0][1] = 1;
    c[0][1][0] = -1;
    return c;
}

inline QVec bracket_oracle(const Constants& c, const QVec& a, const QVec& b) {
    const std::size_t n = c.size();
    QVec r(n, Rational(0));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r[k] += c[k][i][j] * a[i] * b[j];
    return r;
}

inline QVec unit(int n, int i) {
    QVec v(n, Rational(0));
    v[i] = 1;
    return v;
}

// Jacobiator [[a,b],c] + cyclic. First basis triple where it is nonzero, as (i, j, k, component, value); empty when Lie.
struct JacobiWitness {
    int i = -1, j = -1, k = -1, comp = -1;
    Rational value;
    bool found() const { return i >= 0; }
};

inline JacobiWitness jacobi_oracle(const Constants& c) {
    const int n = static_cast<int>(c.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                QVec ei = unit(n, i), ej = unit(n, j), ek = unit(n, k);
                QVec s1 = bracket_oracle(c, bracket_oracle(c, ei, ej), ek);
                QVec s2 = bracket_oracle(c, bracket_oracle(c, ej, ek), ei);
                QVec s3 = bracket_oracle(c, bracket_oracle(c, ek, ei), ej);
                for (int q = 0; q < n; ++q) {
                    Rational v = s1[q] + s2[q] + s3[q];
                    if (v != 0) return {i, j, k, q, v};
                }
            }
    return {};
}

// Truncated-polynomial form of κ^k_𝔤: with X(t) = Σ X_i t^i and Y(t) = Σ Y_j t^j in
// 𝔤[t]/(t^k), Ẏ(t) = X'(t) − [X(t), Y(t)].
inline Tuple kappa_g_oracle(const Constants& c, int k, const Tuple& Ybar, const Tuple& X) {
    const int n = static_cast<int>(c.size());
    Tuple dX(k, QVec(n, Rational(0)));
    for (int i = 1; i <= k; ++i)
        for (int a = 0; a < n; ++a) dX[i - 1][a] = Rational(i) * X[i][a];
    Tuple prod(k, QVec(n, Rational(0)));
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i + j >= k) continue;
            QVec b = bracket_oracle(c, X[i], Ybar[j]);
            for (int a = 0; a < n; ++a) prod[i + j][a] += b[a];
        }
    Tuple out(k, QVec(n, Rational(0)));
    for (int l = 0; l < k; ++l)
        for (int a = 0; a < n; ++a) out[l][a] = dX[l][a] - prod[l][a];
    return out;
}

// Chain rule for x' = φ(x) on second-order jets:
//   x'^(1) = Σ ∂φ/∂x^b x^{b,(1)},  x'^(2) = Σ ∂²φ/∂x^b∂x^c x^{b,(1)} x^{c,(1)} + Σ ∂φ/∂x^b x^{b,(2)}.
inline PolyVec chain_rule_k2(const PolyVec& phi, const SymbolList& x) {
    PolyVec out = phi;
    for (const Poly& f : phi) {
        Poly d1;
        for (const Symbol& b : x) d1 += poly_diff(f, b) * Poly(b.prolonged(1));
        out.push_back(d1);
    }
    for (const Poly& f : phi) {
        Poly d2;
        for (const Symbol& b : x) {
            Poly fb = poly_diff(f, b);
            d2 += fb * Poly(b.prolonged(2));
            for (const Symbol& cc : x) d2 += poly_diff(fb, cc) * Poly(b.prolonged(1)) * Poly(cc.prolonged(1));
        }
        out.push_back(d2);
    }
    return out;
}

inline std::size_t index_of(const SymbolList& list, const Symbol& s) {
    for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i] == s) return i;
    throw MissingSymbol(s.str());
}

// r_y(v) by direct substitution: target base values and source fiber values in, target fiber values out.
inline std::map<Symbol, Rational> eval_comorphism(const Comorphism& r, const std::map<Symbol, Rational>& y,
                                                  const std::map<Symbol, Rational>& v) {
    std::map<Symbol, Rational> out;
    for (std::size_t row = 0; row < r.target.fiber.size(); ++row) {
        Rational acc = 0;
        for (std::size_t col = 0; col < r.source.fiber.size(); ++col)
            acc += poly_eval(r.matrix[row][col], y) * v.at(r.source.fiber[col]);
        out[r.target.fiber[row]] = acc;
    }
    return out;
}

// Random polynomial curve of degree ≤ deg in t for each listed coordinate.
inline CurvePoly random_curve(std::mt19937_64& rng, const SymbolList& chart, int deg) {
    CurvePoly c{chart, {}};
    const Poly t(time_symbol());
    for (std::size_t i = 0; i < chart.size(); ++i) {
        Poly p;
        for (int d = 0; d <= deg; ++d) p += Poly(small_rational(rng)) * t.pow(d);
        c.components.push_back(p);
    }
    return c;
}

// Equations sorted, so comparisons ignore emission order.
inline std::vector<std::string> sorted_equations(const Comorphism& r) {
    std::vector<std::string> e = r.equations();
    std::sort(e.begin(), e.end());
    return e;
}

}  // namespace testing_support

#ifdef DOCTEST_LIBRARY_INCLUDED
namespace doctest {
template <>
struct StringMaker<algforge::Poly> {
    static String convert(const algforge::Poly& p) { return p.str().c_str(); }
};
template <>
struct StringMaker<algforge::PolyVec> {
    static String convert(const algforge::PolyVec& v) {
        std::string s = "[";
        for (auto& p : v) s += p.str() + "; ";
        return (s + "]").c_str();
    }
};
template <>
struct StringMaker<algforge::Rational> {
    static String convert(const algforge::Rational& q) { return q.get_str().c_str(); }
};
}  // namespace doctest
#endif
