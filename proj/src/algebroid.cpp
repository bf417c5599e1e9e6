#include "algforge/algebroid.hpp"

#include <map>
#include <set>

#include "algforge/graded.hpp"

namespace algforge {

namespace {

std::map<Symbol, std::size_t> index_of(const SymbolList& l) {
    std::map<Symbol, std::size_t> m;
    for (std::size_t i = 0; i < l.size(); ++i) m.emplace(l[i], i);
    return m;
}

SymbolList concat(const SymbolList& a, const SymbolList& b) {
    SymbolList r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

std::string idx(int i) { return std::to_string(i + 1); }

PolyVec scaled(const PolyVec& v, const Poly& f) {
    PolyVec r = v;
    for (auto& p : r) p = f * p;
    return r;
}

PolyVec add(const PolyVec& a, const PolyVec& b) {
    PolyVec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

PolyVec sub(const PolyVec& a, const PolyVec& b) {
    PolyVec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

std::optional<std::size_t> first_nonzero(const PolyVec& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_zero()) return i;
    return std::nullopt;
}

// Splits p = Σ c_i Y_i; nullopt if p is not linear homogeneous in Y.
std::optional<PolyVec> linear_coefficients(const Poly& p, const SymbolList& Y) {
    std::set<Symbol> ys(Y.begin(), Y.end());
    auto pos = index_of(Y);
    PolyVec out(Y.size());
    for (auto& [mono, coeff] : split_by(p, ys)) {
        if (mono.degree() != 1) return std::nullopt;
        out[pos.at(mono.factors()[0].first)] = coeff;
    }
    return out;
}

}  // namespace

Rational factorial(int n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return Rational(r);
}

void Algebroid1::validate() const {
    std::size_t mm = base.size();
    auto check = [&](const PolyMatrix& q, const char* what) {
        if (q.size() != mm) throw DimensionMismatch(std::string(what) + " must have " + std::to_string(mm) + " rows");
        for (auto& row : q)
            if (row.size() != static_cast<std::size_t>(n)) throw DimensionMismatch(std::string(what) + " row length");
    };
    check(QL, "anchor_left");
    check(QR, "anchor_right");
    if (Qbr.size() != static_cast<std::size_t>(n)) throw DimensionMismatch("bracket needs n layers");
    for (auto& layer : Qbr) {
        if (layer.size() != static_cast<std::size_t>(n)) throw DimensionMismatch("bracket layer rows");
        for (auto& row : layer)
            if (row.size() != static_cast<std::size_t>(n)) throw DimensionMismatch("bracket layer columns");
    }
    std::set<Symbol> ok(base.begin(), base.end());
    auto over_base = [&](const Poly& p) {
        for (auto& s : p.symbols())
            if (!ok.count(s)) throw SchemaError("structure function uses " + s.str() + ", not a base coordinate");
    };
    for (auto& row : QL) for (auto& p : row) over_base(p);
    for (auto& row : QR) for (auto& p : row) over_base(p);
    for (auto& layer : Qbr) for (auto& row : layer) for (auto& p : row) over_base(p);
}

bool operator==(const Algebroid1& a, const Algebroid1& b) {
    return a.base == b.base && a.n == b.n && a.QL == b.QL && a.QR == b.QR && a.Qbr == b.Qbr;
}

Algebroid1 zero_algebroid(const SymbolList& base, int n) {
    Algebroid1 A;
    A.base = base;
    A.n = n;
    A.QL = zero_matrix(base.size(), n);
    A.QR = zero_matrix(base.size(), n);
    A.Qbr.assign(n, zero_matrix(n, n));
    return A;
}

Algebroid1 tangent_algebroid(const SymbolList& base) {
    int m = static_cast<int>(base.size());
    Algebroid1 A = zero_algebroid(base, m);
    for (int a = 0; a < m; ++a) A.QL[a][a] = A.QR[a][a] = Poly(1);
    return A;
}

Algebroid1 tangent_algebroid(int m) { return tangent_algebroid(indexed("x", m)); }

Algebroid1 constant_algebroid(const std::vector<std::vector<std::vector<Rational>>>& c) {
    int n = static_cast<int>(c.size());
    Algebroid1 A = zero_algebroid({}, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A.Qbr[k][i][j] = Poly(c[k][i][j]);
    return A;
}

Section1 basis_section(int n, int i) {
    Section1 s(n);
    s[i] = Poly(1);
    return s;
}

PolyVec anchor_field(const Algebroid1& A, const Section1& a, bool left) {
    const PolyMatrix& Q = left ? A.QL : A.QR;
    PolyVec v(A.m());
    for (int b = 0; b < A.m(); ++b)
        for (int i = 0; i < A.n; ++i)
            if (!Q[b][i].is_zero() && !a[i].is_zero()) v[b] += Q[b][i] * a[i];
    return v;
}

Poly anchor_apply(const Algebroid1& A, const Section1& a, const Poly& f, bool left) {
    PolyVec v = anchor_field(A, a, left);
    Poly r;
    for (int b = 0; b < A.m(); ++b)
        if (!v[b].is_zero()) r += v[b] * poly_diff(f, A.base[b]);
    return r;
}

Section1 bracket(const Algebroid1& A, const Section1& a, const Section1& b) {
    if (a.size() != static_cast<std::size_t>(A.n) || b.size() != static_cast<std::size_t>(A.n))
        throw DimensionMismatch("section rank differs from algebroid rank");
    Section1 r(A.n);
    for (int k = 0; k < A.n; ++k) {
        r[k] = anchor_apply(A, a, b[k], true) - anchor_apply(A, b, a[k], false);
        for (int i = 0; i < A.n; ++i) {
            if (a[i].is_zero()) continue;
            for (int j = 0; j < A.n; ++j)
                if (!A.Qbr[k][i][j].is_zero() && !b[j].is_zero()) r[k] += A.Qbr[k][i][j] * a[i] * b[j];
        }
    }
    return r;
}

Section1 jacobiator(const Algebroid1& A, const Section1& a, const Section1& b, const Section1& c) {
    return add(add(bracket(A, bracket(A, a, b), c), bracket(A, bracket(A, b, c), a)), bracket(A, bracket(A, c, a), b));
}

CheckResult leibniz_check(const Algebroid1& A, const Poly& f, const Poly& g) {
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) {
            Section1 ei = basis_section(A.n, i), ej = basis_section(A.n, j);
            Section1 lhs = bracket(A, scaled(ei, f), scaled(ej, g));
            Section1 rhs = scaled(ej, f * anchor_apply(A, ei, g, true));
            rhs = sub(rhs, scaled(ei, g * anchor_apply(A, ej, f, false)));
            rhs = add(rhs, scaled(bracket(A, ei, ej), f * g));
            Section1 d = sub(lhs, rhs);
            if (auto k = first_nonzero(d))
                return CheckResult::fail("Leibniz rule fails for (e" + idx(i) + ", e" + idx(j) + ") in component " + idx(*k), d[*k]);
        }
    return CheckResult::pass();
}

CheckResult leibniz_check(const Algebroid1& A) {
    Poly f(3), g(1);
    for (int a = 0; a < A.m(); ++a) {
        f += Poly(A.base[a]);
        g -= Poly(Rational(a + 1)) * Poly(A.base[a]);
    }
    if (A.m() > 0) {
        f += Poly(A.base[0]).pow(2);
        g += Poly(A.base[0]) * Poly(A.base[A.m() - 1]);
    }
    return leibniz_check(A, f, g);
}

KappaLayout standard_layout(const Algebroid1& A) {
    KappaLayout L;
    for (auto& s : A.base) {
        if (s.jet != 0) throw SchemaError("standard layout needs jet-0 base coordinates, got " + s.str());
        L.x.push_back(s.with_weight(0));
        L.xdot.push_back(Symbol(s.name, 1, 1));
    }
    L.y = indexed("y", A.n, 0, 0);
    L.ydot = indexed("y", A.n, 1, 1);
    L.X = indexed("X", A.m(), 0, 0);
    L.Y = indexed("Y", A.n, 0, 1);
    L.Xdot = indexed("X", A.m(), 1, 0);
    L.Ydot = indexed("Y", A.n, 1, 1);
    return L;
}

KappaLayout velocity_layout(const Algebroid1& A) {
    KappaLayout L;
    for (auto& s : A.base) {
        if (s.jet != 0) throw SchemaError("velocity layout needs jet-0 base coordinates, got " + s.str());
        L.x.push_back(s.with_weight(0));
        L.xdot.push_back(Symbol(s.name + "v", 0, 1));
    }
    for (int i = 1; i <= A.n; ++i) {
        L.y.emplace_back("y" + std::to_string(i), 0, 0);
        L.ydot.emplace_back("y" + std::to_string(i) + "v", 0, 1);
        L.Y.emplace_back("Y" + std::to_string(i), 0, 1);
        L.Ydot.emplace_back("Y" + std::to_string(i) + "v", 0, 1);
    }
    for (int a = 1; a <= A.m(); ++a) {
        L.X.emplace_back("X" + std::to_string(a), 0, 0);
        L.Xdot.emplace_back("X" + std::to_string(a) + "v", 0, 0);
    }
    return L;
}

KappaLayout lifted_layout(const KappaLayout& v, int k) {
    auto lift = [k](const SymbolList& l) {
        SymbolList out;
        for (int alpha = 0; alpha <= k; ++alpha)
            for (auto& s : l) out.push_back(s.prolonged(alpha));
        return out;
    };
    return KappaLayout{lift(v.x), lift(v.xdot), lift(v.y), lift(v.ydot), lift(v.X), lift(v.Y), lift(v.Xdot), lift(v.Ydot)};
}

Comorphism kappa_of(const Algebroid1& A) { return kappa_of(A, standard_layout(A)); }

Comorphism kappa_of(const Algebroid1& A, const KappaLayout& L) {
    A.validate();
    const std::size_t m = A.m(), n = A.n;
    if (L.x.size() != m || L.xdot.size() != m || L.X.size() != m || L.Xdot.size() != m || L.y.size() != n ||
        L.ydot.size() != n || L.Y.size() != n || L.Ydot.size() != n)
        throw DimensionMismatch("layout does not match algebroid dimensions");
    std::map<Symbol, Poly> toX;
    for (std::size_t a = 0; a < m; ++a) toX.emplace(A.base[a], Poly(L.X[a]));

    Comorphism k;
    k.source = {"T sigma", concat(L.x, L.xdot), concat(L.y, L.ydot)};
    k.target = {"tau_E", concat(L.X, L.Y), concat(L.Xdot, L.Ydot)};
    for (std::size_t a = 0; a < m; ++a) k.base_map.push_back(Poly(L.X[a]));
    for (std::size_t a = 0; a < m; ++a) {
        Poly v;
        for (std::size_t i = 0; i < n; ++i) v += subst(A.QL[a][i], toX) * Poly(L.Y[i]);
        k.base_map.push_back(v);
    }
    k.matrix = zero_matrix(m + n, 2 * n);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t i = 0; i < n; ++i) k.matrix[a][i] = subst(A.QR[a][i], toX);
    for (std::size_t kk = 0; kk < n; ++kk) {
        k.matrix[m + kk][n + kk] = Poly(1);
        for (std::size_t j = 0; j < n; ++j) {
            Poly e;
            for (std::size_t i = 0; i < n; ++i) e += subst(A.Qbr[kk][i][j], toX) * Poly(L.Y[i]);
            k.matrix[m + kk][j] = e;
        }
    }
    return k;
}

Algebroid1 algebroid_of(const Comorphism& kappa) {
    // recover m, n from the standard layout shape: source base 2m, source fiber 2n
    std::size_t m = kappa.source.base.size() / 2;
    SymbolList base(kappa.source.base.begin(), kappa.source.base.begin() + m);
    Algebroid1 probe = zero_algebroid(base, static_cast<int>(kappa.source.fiber.size() / 2));
    return algebroid_of(kappa, standard_layout(probe));
}

Algebroid1 algebroid_of(const Comorphism& kappa, const KappaLayout& L) {
    kappa.validate();
    const std::size_t m = L.x.size(), n = L.y.size();
    auto sb = index_of(kappa.source.base), sf = index_of(kappa.source.fiber), tf = index_of(kappa.target.fiber);
    auto find = [](const std::map<Symbol, std::size_t>& ix, const Symbol& s) {
        auto it = ix.find(s);
        if (it == ix.end()) throw NotNormalForm("coordinate " + s.str() + " missing from the comorphism");
        return it->second;
    };
    std::set<Symbol> Yset(L.Y.begin(), L.Y.end());
    std::map<Symbol, Poly> toBase;
    for (std::size_t a = 0; a < m; ++a) toBase.emplace(L.X[a], Poly(L.x[a]));

    Algebroid1 A = zero_algebroid(L.x, static_cast<int>(n));
    for (std::size_t a = 0; a < m; ++a) {
        if (kappa.base_map[find(sb, L.x[a])] != Poly(L.X[a]))
            throw NotNormalForm("base map of " + L.x[a].str() + " is not " + L.X[a].str());
        auto coeffs = linear_coefficients(kappa.base_map[find(sb, L.xdot[a])], L.Y);
        if (!coeffs) throw NotNormalForm("base map of " + L.xdot[a].str() + " is not linear in the fiber");
        for (std::size_t i = 0; i < n; ++i) A.QL[a][i] = subst((*coeffs)[i], toBase);
    }
    for (std::size_t a = 0; a < m; ++a) {
        const PolyVec& row = kappa.matrix[find(tf, L.Xdot[a])];
        for (std::size_t i = 0; i < n; ++i) {
            const Poly& e = row[find(sf, L.y[i])];
            if (e.uses_any(Yset)) throw NotNormalForm("anchor entry depends on fiber coordinates");
            A.QR[a][i] = subst(e, toBase);
            if (!row[find(sf, L.ydot[i])].is_zero()) throw NotNormalForm(L.Xdot[a].str() + " depends on " + L.ydot[i].str());
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        const PolyVec& row = kappa.matrix[find(tf, L.Ydot[k])];
        for (std::size_t l = 0; l < n; ++l)
            if (row[find(sf, L.ydot[l])] != Poly(k == l ? 1 : 0))
                throw NotCoreIdentity("core block entry (" + L.Ydot[k].str() + ", " + L.ydot[l].str() + ") is " +
                                      row[find(sf, L.ydot[l])].str());
        for (std::size_t j = 0; j < n; ++j) {
            auto coeffs = linear_coefficients(row[find(sf, L.y[j])], L.Y);
            if (!coeffs) throw NotNormalForm("bracket entry is not linear in the fiber");
            for (std::size_t i = 0; i < n; ++i) A.Qbr[k][i][j] = subst((*coeffs)[i], toBase);
        }
    }
    return A;
}

Algebroid1 transpose(const Algebroid1& A) {
    Algebroid1 T = A;
    std::swap(T.QL, T.QR);
    for (int k = 0; k < A.n; ++k)
        for (int i = 0; i < A.n; ++i)
            for (int j = 0; j < A.n; ++j) T.Qbr[k][i][j] = -A.Qbr[k][j][i];
    return T;
}

CheckResult is_skew(const Algebroid1& A) {
    for (int a = 0; a < A.m(); ++a)
        for (int i = 0; i < A.n; ++i)
            if (A.QL[a][i] != A.QR[a][i])
                return CheckResult::fail("anchors differ at (" + A.base[a].str() + ", e" + idx(i) + ")", A.QL[a][i] - A.QR[a][i]);
    for (int k = 0; k < A.n; ++k)
        for (int i = 0; i < A.n; ++i)
            for (int j = i; j < A.n; ++j) {
                Poly s = A.Qbr[k][i][j] + A.Qbr[k][j][i];
                if (!s.is_zero())
                    return CheckResult::fail("Q^" + idx(k) + "_{" + idx(i) + idx(j) + "} + Q^" + idx(k) + "_{" + idx(j) + idx(i) + "} != 0", s);
            }
    return CheckResult::pass();
}

CheckResult is_almost_lie(const Algebroid1& A) {
    if (auto s = is_skew(A); !s) return CheckResult::fail("not skew: " + s.witness, s.residual);
    for (int i = 0; i < A.n; ++i)
        for (int j = i + 1; j < A.n; ++j) {
            Section1 ei = basis_section(A.n, i), ej = basis_section(A.n, j);
            PolyVec lhs = anchor_field(A, bracket(A, ei, ej));
            PolyVec vi = anchor_field(A, ei), vj = anchor_field(A, ej);
            for (int a = 0; a < A.m(); ++a) {
                Poly rhs;
                for (int b = 0; b < A.m(); ++b)
                    rhs += vi[b] * poly_diff(vj[a], A.base[b]) - vj[b] * poly_diff(vi[a], A.base[b]);
                if (lhs[a] != rhs)
                    return CheckResult::fail("anchor does not preserve [e" + idx(i) + ", e" + idx(j) + "] in component " +
                                                 A.base[a].str(),
                                             lhs[a] - rhs);
            }
        }
    return CheckResult::pass();
}

CheckResult is_lie(const Algebroid1& A) {
    if (auto s = is_almost_lie(A); !s) return CheckResult::fail("not almost-Lie: " + s.witness, s.residual);
    for (int i = 0; i < A.n; ++i)
        for (int j = i + 1; j < A.n; ++j)
            for (int l = j + 1; l < A.n; ++l) {
                Section1 J = jacobiator(A, basis_section(A.n, i), basis_section(A.n, j), basis_section(A.n, l));
                if (auto k = first_nonzero(J))
                    return CheckResult::fail("Jacobiator of (e" + idx(i) + ", e" + idx(j) + ", e" + idx(l) + ") has component " +
                                                 idx(*k) + " = " + J[*k].str(),
                                             J[*k]);
            }
    return CheckResult::pass();
}

VBMorphism tangent_map(const VBMorphism& phi, const KappaLayout& src, const KappaLayout& tgt) {
    std::map<Symbol, Poly> toX;
    for (std::size_t a = 0; a < phi.source.base.size(); ++a) toX.emplace(phi.source.base[a], Poly(src.X[a]));
    VBMorphism T;
    T.source = {"tau_E", concat(src.X, src.Y), concat(src.Xdot, src.Ydot)};
    T.target = {"tau_E'", concat(tgt.X, tgt.Y), concat(tgt.Xdot, tgt.Ydot)};
    for (auto& p : phi.base_map) T.base_map.push_back(subst(p, toX));
    for (std::size_t i = 0; i < phi.target.rank(); ++i) {
        Poly v;
        for (std::size_t j = 0; j < phi.source.rank(); ++j) v += subst(phi.matrix[i][j], toX) * Poly(src.Y[j]);
        T.base_map.push_back(v);
    }
    SymbolList coords = T.source.base;
    T.matrix = zero_matrix(T.target.rank(), coords.size());
    for (std::size_t r = 0; r < T.base_map.size(); ++r)
        for (std::size_t c = 0; c < coords.size(); ++c) T.matrix[r][c] = poly_diff(T.base_map[r], coords[c]);
    return T;
}

CheckResult morphism_check(const VBMorphism& phi, const Algebroid1& A, const Algebroid1& Ap) {
    KappaLayout L = standard_layout(A), Lp = standard_layout(Ap);
    Comorphism k = kappa_of(A, L), kp = kappa_of(Ap, Lp);
    VBMorphism phi_n = phi;
    phi_n.source.fiber = L.y;
    phi_n.target.fiber = Lp.y;
    if (phi.source.base != A.base || phi.target.base != Ap.base) throw BundleMismatch("morphism bases differ from the algebroid bases");
    return zm_morphism_check(tangent_lift(phi_n, 1), tangent_map(phi_n, L, Lp), k, kp);
}

CheckResult algebroidal_relation_check(const Comorphism& r, const Algebroid1& A1, const Algebroid1& A2) {
    if (r.source.base != A1.base || r.target.base != A2.base || r.source.rank() != static_cast<std::size_t>(A1.n) ||
        r.target.rank() != static_cast<std::size_t>(A2.n))
        throw BundleMismatch("relation does not join the algebroid bundles");
    auto at = r.base_substitution();
    for (int j = 0; j < A1.n; ++j) {
        Section1 ej = basis_section(A1.n, j);
        Section1 img = section_map(r, ej);
        for (bool left : {true, false}) {
            PolyVec v1 = subst(anchor_field(A1, ej, left), at);
            PolyVec v2 = anchor_field(A2, img, left);
            for (int a = 0; a < A1.m(); ++a) {
                Poly pushed;
                for (int b = 0; b < A2.m(); ++b) pushed += poly_diff(r.base_map[a], A2.base[b]) * v2[b];
                if (pushed != v1[a])
                    return CheckResult::fail(std::string(left ? "left" : "right") + " anchors of e" + idx(j) +
                                                 " are not related in component " + A1.base[a].str(),
                                             pushed - v1[a]);
            }
        }
    }
    for (int i = 0; i < A1.n; ++i)
        for (int j = 0; j < A1.n; ++j) {
            Section1 ei = basis_section(A1.n, i), ej = basis_section(A1.n, j);
            Section1 lhs = section_map(r, bracket(A1, ei, ej));
            Section1 rhs = bracket(A2, section_map(r, ei), section_map(r, ej));
            Section1 d = sub(lhs, rhs);
            if (auto k = first_nonzero(d))
                return CheckResult::fail("brackets of (e" + idx(i) + ", e" + idx(j) + ") are not related in component " + idx(*k), d[*k]);
        }
    return CheckResult::pass();
}

// ---------------------------------------------------------------- lifts

PolyVec SectionLift::flatten() const {
    PolyVec out;
    for (auto& l : levels) out.insert(out.end(), l.begin(), l.end());
    return out;
}

SectionLift total_lift(const Section1& s, int k) {
    SectionLift v;
    v.k = k;
    v.alpha = 0;
    PolyVec cur = s;
    for (int beta = 0; beta <= k; ++beta) {
        v.levels.push_back(cur);
        if (beta < k)
            for (auto& p : cur) p = total_derivative(p, k);
    }
    return v;
}

SectionLift epsilon_shift(const SectionLift& v) {
    SectionLift r = v;
    r.alpha = v.alpha + 1;
    std::size_t n = v.levels.empty() ? 0 : v.levels[0].size();
    r.levels[0] = PolyVec(n);
    for (int beta = 1; beta <= v.k; ++beta) r.levels[beta] = scaled(v.levels[beta - 1], Poly(beta));
    return r;
}

SectionLift scale(const SectionLift& v, const Rational& c) {
    SectionLift r = v;
    for (auto& l : r.levels) l = scaled(l, Poly(c));
    return r;
}

SectionLift epsilon_lift(const Section1& s, int k, int alpha) {
    if (alpha < 0 || alpha > k) throw JetOverflow("ε-lift degree outside 0..k");
    SectionLift v = total_lift(s, k);
    for (int i = 0; i < alpha; ++i) v = epsilon_shift(v);
    return scale(v, factorial(k - alpha) / factorial(k));
}

SectionLift lifted_bracket(const Algebroid1& A, int k, const Section1& s1, int alpha, const Section1& s2, int beta) {
    if (alpha < 0 || beta < 0 || alpha > k || beta > k) throw JetOverflow("lift degree outside 0..k");
    if (alpha + beta > k) {
        SectionLift z;
        z.k = k;
        z.alpha = alpha + beta;
        z.levels.assign(k + 1, PolyVec(A.n));
        return z;
    }
    return scale(epsilon_lift(bracket(A, s1, s2), k, alpha + beta), factorial(k) / factorial(k - alpha - beta));
}

Algebroid1 tangent_lift_algebroid(const Algebroid1& A, int k) {
    KappaLayout v = velocity_layout(A);
    return algebroid_of(tangent_lift(kappa_of(A, v), k), lifted_layout(v, k));
}

}  // namespace algforge
