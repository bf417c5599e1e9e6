#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "algforge/errors.hpp"

namespace algforge {

using Rational = mpq_class;

Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

// A coordinate x^{(jet)} of some chart. Identity is (name, jet); weight is metadata.
struct Symbol {
    std::string name;
    int jet = 0;
    int weight = 0;

    Symbol() = default;
    Symbol(std::string n, int j = 0) : name(std::move(n)), jet(j), weight(j) {}
    Symbol(std::string n, int j, int w) : name(std::move(n)), jet(j), weight(w) {}

    std::string str() const;
    // Next jet: D(x^{(α)}) = x^{(α+1)}, one weight higher.
    Symbol prolonged(int by = 1) const { return Symbol(name, jet + by, weight + by); }
    Symbol with_weight(int w) const { return Symbol(name, jet, w); }
};

inline bool operator==(const Symbol& a, const Symbol& b) { return a.jet == b.jet && a.name == b.name; }
inline bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }
inline bool operator<(const Symbol& a, const Symbol& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.jet < b.jet;
}

using SymbolList = std::vector<Symbol>;

// Maps a parsed (name, jet) to its weight. The default assigns weight = jet.
using WeightResolver = std::function<int(const std::string&, int)>;

class Monomial {
public:
    using Factor = std::pair<Symbol, int>;

    Monomial() = default;
    explicit Monomial(const Symbol& s, int e = 1);

    const std::vector<Factor>& factors() const { return f_; }
    bool empty() const { return f_.empty(); }
    int degree() const;
    int degree_in(const Symbol& s) const;
    int weight() const;
    Monomial without(const Symbol& s) const;
    std::string str() const;

    Monomial operator*(const Monomial& o) const;
    friend bool operator<(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial& a, const Monomial& b);

private:
    std::vector<Factor> f_;
    friend class Poly;
};

class Poly {
public:
    using Terms = std::map<Monomial, Rational>;

    Poly() = default;
    Poly(const Rational& c);
    Poly(long c) : Poly(Rational(c)) {}
    Poly(int c) : Poly(Rational(c)) {}
    explicit Poly(const Symbol& s);
    Poly(const Monomial& m, const Rational& c);

    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    std::optional<Rational> as_constant() const;
    Rational coeff(const Monomial& m) const;
    std::set<Symbol> symbols() const;
    bool uses_any(const std::set<Symbol>& syms) const;
    int degree() const;
    int degree_in(const Symbol& s) const;
    std::size_t size() const { return t_.size(); }
    std::string str() const;

    Poly pow(int e) const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly operator-() const;
    friend bool operator==(const Poly& a, const Poly& b) { return a.t_ == b.t_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    void add_term(const Monomial& m, const Rational& c);

private:
    Terms t_;
};

using PolyVec = std::vector<Poly>;
using PolyMatrix = std::vector<PolyVec>;

Poly poly_diff(const Poly& p, const Symbol& v);
Rational poly_eval(const Poly& p, const std::map<Symbol, Rational>& assignment);
double poly_eval_double(const Poly& p, const std::map<Symbol, double>& assignment);

// Simultaneous substitution; symbols without an entry are left alone.
Poly subst(const Poly& p, const std::map<Symbol, Poly>& s);
Poly rename(const Poly& p, const std::map<Symbol, Symbol>& r);
PolyVec subst(const PolyVec& v, const std::map<Symbol, Poly>& s);
PolyMatrix subst(const PolyMatrix& m, const std::map<Symbol, Poly>& s);

// Extends a rule on symbols to the unique derivation on polynomials.
Poly derive(const Poly& p, const std::function<Poly(const Symbol&)>& rule);

// Formal D with D(x^{(α)}) = x^{(α+1)}; throws JetOverflow past `order`.
Poly total_derivative(const Poly& p, int order);

std::optional<int> weight_of(const Poly& p);

// Groups p by the monomials it has in `vars`; values are coefficients in the remaining symbols.
std::map<Monomial, Poly> split_by(const Poly& p, const std::set<Symbol>& vars);

Poly parse_poly(std::string_view text, const WeightResolver& weights = {});
Symbol parse_symbol(std::string_view text, const WeightResolver& weights = {});

// Matrix helpers over polynomial entries.
PolyMatrix zero_matrix(std::size_t rows, std::size_t cols);
PolyMatrix identity_matrix(std::size_t n);
PolyMatrix matmul(const PolyMatrix& a, const PolyMatrix& b);
PolyVec matvec(const PolyMatrix& a, const PolyVec& v);
// `cols` gives the column count when `a` has no rows.
PolyMatrix transpose(const PolyMatrix& a, std::size_t cols = 0);
std::set<Symbol> symbols_of(const PolyMatrix& m);
std::set<Symbol> symbols_of(const PolyVec& v);

}  // namespace algforge
