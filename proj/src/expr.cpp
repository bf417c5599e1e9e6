#include "algforge/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace algforge {

Rational parse_rational(std::string_view text) {
    std::string s(text);
    auto trim = [](std::string& x) {
        auto b = x.find_first_not_of(" \t");
        auto e = x.find_last_not_of(" \t");
        x = b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
    };
    trim(s);
    if (s.empty()) throw ParseError("empty number");
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        // exact decimal: 1.25 -> 125/100
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac = s.size() - dot - 1;
        Rational q;
        if (q.get_num().set_str(digits, 10) != 0) throw ParseError("bad number '" + s + "'");
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
        q.get_den() = den;
        q.canonicalize();
        return q;
    }
    Rational q;
    if (q.set_str(s, 10) != 0) throw ParseError("bad number '" + s + "'");
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string Symbol::str() const { return jet ? name + ".d" + std::to_string(jet) : name; }

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(const Symbol& s, int e) {
    if (e > 0) f_.emplace_back(s, e);
}

int Monomial::degree() const {
    int d = 0;
    for (auto& [s, e] : f_) d += e;
    return d;
}

int Monomial::degree_in(const Symbol& s) const {
    for (auto& [t, e] : f_)
        if (t == s) return e;
    return 0;
}

int Monomial::weight() const {
    int w = 0;
    for (auto& [s, e] : f_) w += s.weight * e;
    return w;
}

Monomial Monomial::without(const Symbol& s) const {
    Monomial m;
    for (auto& fe : f_)
        if (fe.first != s) m.f_.push_back(fe);
    return m;
}

std::string Monomial::str() const {
    std::string out;
    for (auto& [s, e] : f_) {
        if (!out.empty()) out += "*";
        out += s.str();
        if (e > 1) out += "^" + std::to_string(e);
    }
    return out;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial m;
    m.f_.reserve(f_.size() + o.f_.size());
    auto a = f_.begin(), b = o.f_.begin();
    while (a != f_.end() && b != o.f_.end()) {
        if (a->first < b->first) m.f_.push_back(*a++);
        else if (b->first < a->first) m.f_.push_back(*b++);
        else {
            m.f_.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    m.f_.insert(m.f_.end(), a, f_.end());
    m.f_.insert(m.f_.end(), b, o.f_.end());
    return m;
}

bool operator<(const Monomial& a, const Monomial& b) {
    return std::lexicographical_compare(
        a.f_.begin(), a.f_.end(), b.f_.begin(), b.f_.end(),
        [](const Monomial::Factor& x, const Monomial::Factor& y) {
            if (x.first != y.first) return x.first < y.first;
            return x.second < y.second;
        });
}

bool operator==(const Monomial& a, const Monomial& b) {
    if (a.f_.size() != b.f_.size()) return false;
    for (std::size_t i = 0; i < a.f_.size(); ++i)
        if (a.f_[i].first != b.f_[i].first || a.f_[i].second != b.f_[i].second) return false;
    return true;
}

// ---------------------------------------------------------------- Poly

namespace {

// Callers may hand in unreduced fractions such as mpq_class(6, 4).
Rational canonical(const Rational& c) {
    Rational r = c;
    r.canonicalize();
    return r;
}

}  // namespace

Poly::Poly(const Rational& c) {
    if (c != 0) t_.emplace(Monomial(), canonical(c));
}

Poly::Poly(const Symbol& s) { t_.emplace(Monomial(s), Rational(1)); }

Poly::Poly(const Monomial& m, const Rational& c) {
    if (c != 0) t_.emplace(m, canonical(c));
}

void Poly::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = t_.emplace(m, canonical(c));
    if (!inserted) {
        it->second += canonical(c);
        if (it->second == 0) t_.erase(it);
    }
}

bool Poly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty()); }

std::optional<Rational> Poly::as_constant() const {
    if (t_.empty()) return Rational(0);
    if (is_constant()) return t_.begin()->second;
    return std::nullopt;
}

Rational Poly::coeff(const Monomial& m) const {
    auto it = t_.find(m);
    return it == t_.end() ? Rational(0) : it->second;
}

std::set<Symbol> Poly::symbols() const {
    std::set<Symbol> out;
    for (auto& [m, c] : t_)
        for (auto& [s, e] : m.factors()) out.insert(s);
    return out;
}

bool Poly::uses_any(const std::set<Symbol>& syms) const {
    for (auto& [m, c] : t_)
        for (auto& [s, e] : m.factors())
            if (syms.count(s)) return true;
    return false;
}

int Poly::degree() const {
    int d = 0;
    for (auto& [m, c] : t_) d = std::max(d, m.degree());
    return d;
}

int Poly::degree_in(const Symbol& s) const {
    int d = 0;
    for (auto& [m, c] : t_) d = std::max(d, m.degree_in(s));
    return d;
}

std::string Poly::str() const {
    if (t_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto& [m, c] : t_) {
        Rational a = abs(c);
        bool neg = c < 0;
        std::string body;
        if (m.empty()) body = a.get_str();
        else if (a == 1) body = m.str();
        else body = a.get_str() + "*" + m.str();
        if (first) out += (neg ? "-" : "") + body;
        else out += (neg ? " - " : " + ") + body;
        first = false;
    }
    return out;
}

Poly& Poly::operator+=(const Poly& o) {
    for (auto& [m, c] : o.t_) add_term(m, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (auto& [m, c] : o.t_) add_term(m, -c);
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (auto& [ma, ca] : a.t_)
        for (auto& [mb, cb] : b.t_) r.add_term(ma * mb, ca * cb);
    return r;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.t_) c = -c;
    return r;
}

Poly Poly::pow(int e) const {
    Poly r(1), b = *this;
    while (e > 0) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

// ---------------------------------------------------------------- calculus

Poly poly_diff(const Poly& p, const Symbol& v) {
    Poly r;
    for (auto& [m, c] : p.terms()) {
        int e = m.degree_in(v);
        if (e == 0) continue;
        Monomial rest = m.without(v);
        r.add_term(e > 1 ? rest * Monomial(v, e - 1) : rest, c * e);
    }
    return r;
}

Rational poly_eval(const Poly& p, const std::map<Symbol, Rational>& a) {
    Rational total = 0;
    for (auto& [m, c] : p.terms()) {
        Rational t = c;
        for (auto& [s, e] : m.factors()) {
            auto it = a.find(s);
            if (it == a.end()) throw MissingSymbol(s.str());
            Rational v = 1;
            for (int i = 0; i < e; ++i) v *= it->second;
            t *= v;
        }
        total += t;
    }
    return total;
}

double poly_eval_double(const Poly& p, const std::map<Symbol, double>& a) {
    double total = 0;
    for (auto& [m, c] : p.terms()) {
        double t = c.get_d();
        for (auto& [s, e] : m.factors()) {
            auto it = a.find(s);
            if (it == a.end()) throw MissingSymbol(s.str());
            t *= std::pow(it->second, e);
        }
        total += t;
    }
    return total;
}

Poly subst(const Poly& p, const std::map<Symbol, Poly>& s) {
    if (s.empty()) return p;
    std::map<Symbol, std::vector<Poly>> powers;
    auto power = [&](const Symbol& v, const Poly& base, int e) -> const Poly& {
        auto& cache = powers[v];
        if (cache.empty()) cache.push_back(Poly(1));
        while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * base);
        return cache[e];
    };
    Poly r;
    for (auto& [m, c] : p.terms()) {
        Poly term(Monomial(), c);
        Monomial kept;
        for (auto& [v, e] : m.factors()) {
            auto it = s.find(v);
            if (it == s.end()) kept = kept * Monomial(v, e);
            else term = term * power(v, it->second, e);
        }
        if (!kept.empty()) term = term * Poly(kept, 1);
        r += term;
    }
    return r;
}

Poly rename(const Poly& p, const std::map<Symbol, Symbol>& r) {
    std::map<Symbol, Poly> s;
    for (auto& [a, b] : r) s.emplace(a, Poly(b));
    return subst(p, s);
}

PolyVec subst(const PolyVec& v, const std::map<Symbol, Poly>& s) {
    PolyVec out;
    out.reserve(v.size());
    for (auto& p : v) out.push_back(subst(p, s));
    return out;
}

PolyMatrix subst(const PolyMatrix& m, const std::map<Symbol, Poly>& s) {
    PolyMatrix out;
    out.reserve(m.size());
    for (auto& row : m) out.push_back(subst(row, s));
    return out;
}

Poly derive(const Poly& p, const std::function<Poly(const Symbol&)>& rule) {
    Poly r;
    for (auto& s : p.symbols()) {
        Poly ds = rule(s);
        if (ds.is_zero()) continue;
        r += poly_diff(p, s) * ds;
    }
    return r;
}

Poly total_derivative(const Poly& p, int order) {
    return derive(p, [order](const Symbol& s) {
        if (s.jet + 1 > order)
            throw JetOverflow(s.str() + " cannot be prolonged past order " + std::to_string(order));
        return Poly(s.prolonged());
    });
}

std::optional<int> weight_of(const Poly& p) {
    std::optional<int> w;
    for (auto& [m, c] : p.terms()) {
        int mw = m.weight();
        if (w && *w != mw) return std::nullopt;
        w = mw;
    }
    return w;
}

std::map<Monomial, Poly> split_by(const Poly& p, const std::set<Symbol>& vars) {
    std::map<Monomial, Poly> out;
    for (auto& [m, c] : p.terms()) {
        Monomial in, rest;
        for (auto& [s, e] : m.factors()) {
            if (vars.count(s)) in = in * Monomial(s, e);
            else rest = rest * Monomial(s, e);
        }
        out[in].add_term(rest, c);
    }
    return out;
}

// ---------------------------------------------------------------- parsing

namespace {

int default_weight(const std::string&, int jet) { return jet; }

class Parser {
public:
    Parser(std::string_view s, const WeightResolver& w) : s_(s), w_(w ? w : WeightResolver(default_weight)) {}

    Poly parse_all() {
        Poly p = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return p;
    }

    Symbol symbol_only() {
        skip();
        Symbol s = symbol();
        skip();
        if (i_ != s_.size()) fail("trailing characters after symbol");
        return s;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;
    WeightResolver w_;

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg + " at offset " + std::to_string(i_) + " in '" + std::string(s_) + "'");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool peek(char c) {
        skip();
        return i_ < s_.size() && s_[i_] == c;
    }

    Poly expr() {
        Poly acc;
        bool neg = false;
        if (peek('+')) ++i_;
        else if (peek('-')) {
            ++i_;
            neg = true;
        }
        Poly t = term();
        acc += neg ? -t : t;
        while (true) {
            if (peek('+')) {
                ++i_;
                acc += term();
            } else if (peek('-')) {
                ++i_;
                acc -= term();
            } else break;
        }
        return acc;
    }

    Poly term() {
        Poly acc = factor();
        while (true) {
            if (peek('*')) {
                ++i_;
                acc *= factor();
            } else if (peek('/')) {
                ++i_;
                skip();
                Rational d = number();
                if (d == 0) fail("division by zero");
                acc *= Poly(Rational(1) / d);
            } else break;
        }
        return acc;
    }

    Poly factor() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end of input");
        Poly base;
        char c = s_[i_];
        if (c == '-') {
            ++i_;
            return -factor();
        }
        if (c == '(') {
            ++i_;
            base = expr();
            if (!peek(')')) fail("expected ')'");
            ++i_;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            base = Poly(number());
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            base = Poly(symbol());
        } else {
            fail("unexpected '" + std::string(1, c) + "'");
        }
        if (peek('^')) {
            ++i_;
            skip();
            std::size_t start = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            if (start == i_) fail("expected exponent");
            base = base.pow(std::stoi(std::string(s_.substr(start, i_ - start))));
        }
        return base;
    }

    Rational number() {
        std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ < s_.size() && s_[i_] == '.' && i_ + 1 < s_.size() &&
            std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) {
            ++i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        }
        if (start == i_) fail("expected number");
        return parse_rational(s_.substr(start, i_ - start));
    }

    Symbol symbol() {
        std::size_t start = i_;
        if (i_ >= s_.size() || !(std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
            fail("expected symbol");
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
        std::string name(s_.substr(start, i_ - start));
        int jet = 0;
        if (i_ + 2 < s_.size() && s_.substr(i_, 2) == ".d" &&
            std::isdigit(static_cast<unsigned char>(s_[i_ + 2]))) {
            i_ += 2;
            std::size_t js = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            jet = std::stoi(std::string(s_.substr(js, i_ - js)));
        }
        return Symbol(name, jet, w_(name, jet));
    }
};

}  // namespace

Poly parse_poly(std::string_view text, const WeightResolver& weights) { return Parser(text, weights).parse_all(); }

Symbol parse_symbol(std::string_view text, const WeightResolver& weights) {
    return Parser(text, weights).symbol_only();
}

// ---------------------------------------------------------------- matrices

PolyMatrix zero_matrix(std::size_t rows, std::size_t cols) { return PolyMatrix(rows, PolyVec(cols)); }

PolyMatrix identity_matrix(std::size_t n) {
    PolyMatrix m = zero_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = Poly(1);
    return m;
}

PolyMatrix matmul(const PolyMatrix& a, const PolyMatrix& b) {
    std::size_t inner = b.size();
    std::size_t cols = inner ? b[0].size() : 0;
    PolyMatrix r = zero_matrix(a.size(), cols);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != inner) throw DimensionMismatch("matmul inner dimension");
        for (std::size_t k = 0; k < inner; ++k) {
            if (a[i][k].is_zero()) continue;
            for (std::size_t j = 0; j < cols; ++j)
                if (!b[k][j].is_zero()) r[i][j] += a[i][k] * b[k][j];
        }
    }
    return r;
}

PolyVec matvec(const PolyMatrix& a, const PolyVec& v) {
    PolyVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != v.size()) throw DimensionMismatch("matvec dimension");
        for (std::size_t k = 0; k < v.size(); ++k)
            if (!a[i][k].is_zero() && !v[k].is_zero()) r[i] += a[i][k] * v[k];
    }
    return r;
}

PolyMatrix transpose(const PolyMatrix& a, std::size_t cols) {
    if (a.empty()) return PolyMatrix(cols);
    PolyMatrix r = zero_matrix(a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) r[j][i] = a[i][j];
    return r;
}

std::set<Symbol> symbols_of(const PolyMatrix& m) {
    std::set<Symbol> out;
    for (auto& row : m)
        for (auto& p : row) {
            auto s = p.symbols();
            out.insert(s.begin(), s.end());
        }
    return out;
}

std::set<Symbol> symbols_of(const PolyVec& v) {
    std::set<Symbol> out;
    for (auto& p : v) {
        auto s = p.symbols();
        out.insert(s.begin(), s.end());
    }
    return out;
}

}  // namespace algforge
