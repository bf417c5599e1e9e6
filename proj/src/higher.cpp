#include "algforge/higher.hpp"

#include <map>
#include <set>

#include "algforge/graded.hpp"

namespace algforge {

namespace {

SymbolList cat(std::initializer_list<SymbolList> parts) {
    SymbolList out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::string idx(int i) { return std::to_string(i + 1); }

std::map<Symbol, Poly> pairwise(const SymbolList& from, const SymbolList& to) {
    std::map<Symbol, Poly> m;
    for (std::size_t i = 0; i < from.size(); ++i) m.emplace(from[i], Poly(to[i]));
    return m;
}

PolyMatrix square(int n) { return zero_matrix(n, n); }

bool over_base(const Poly& p, const std::set<Symbol>& base) {
    for (auto& s : p.symbols())
        if (!base.count(s)) return false;
    return true;
}

// Position of a symbol inside one of several groups.
struct Locator {
    std::map<Symbol, std::pair<int, int>> where;
    void add(int group, const SymbolList& l) {
        for (std::size_t i = 0; i < l.size(); ++i) where[l[i]] = {group, static_cast<int>(i)};
    }
};

int position(const SymbolList& l, const Symbol& s, const char* what) {
    for (std::size_t i = 0; i < l.size(); ++i)
        if (l[i] == s) return static_cast<int>(i);
    throw NotNormalForm(std::string(what) + " coordinate " + s.str() + " is missing");
}

Poly det(const PolyMatrix& a) {
    std::size_t n = a.size();
    if (n == 0) return Poly(1);
    if (n == 1) return a[0][0];
    Poly r;
    for (std::size_t c = 0; c < n; ++c) {
        if (a[0][c].is_zero()) continue;
        PolyMatrix minor;
        for (std::size_t i = 1; i < n; ++i) {
            PolyVec row;
            for (std::size_t j = 0; j < n; ++j)
                if (j != c) row.push_back(a[i][j]);
            minor.push_back(row);
        }
        Poly term = a[0][c] * det(minor);
        if (c % 2) r -= term;
        else r += term;
    }
    return r;
}

bool same_relation(const Comorphism& a, const Comorphism& b) {
    return a.source.same_coordinates(b.source) && a.target.same_coordinates(b.target) && a.base_map == b.base_map &&
           a.matrix == b.matrix;
}

}  // namespace

void HA2::validate() const {
    const int mm = m();
    auto shape = [](const PolyMatrix& q, int r, int c, const std::string& what) {
        if (static_cast<int>(q.size()) != r) throw DimensionMismatch(what + ": expected " + std::to_string(r) + " rows");
        for (auto& row : q)
            if (static_cast<int>(row.size()) != c) throw DimensionMismatch(what + ": expected " + std::to_string(c) + " columns");
    };
    shape(Qa_i, mm, n, "Q^a_i");
    shape(Qa_mu, mm, p, "Q^a_mu");
    shape(Qpa_i, mm, n, "Q'^a_i");
    shape(Qmu_i, p, n, "Q^mu_i");
    if (static_cast<int>(Qa_ij.size()) != mm || static_cast<int>(Qi_jk.size()) != n || static_cast<int>(Qmu_ij.size()) != p ||
        static_cast<int>(Qmu_nui.size()) != p || static_cast<int>(Qmu_ijk.size()) != p)
        throw DimensionMismatch("structure function families have the wrong number of layers");
    for (auto& q : Qa_ij) shape(q, n, n, "Q^a_ij");
    for (auto& q : Qi_jk) shape(q, n, n, "Q^i_jk");
    for (auto& q : Qmu_ij) shape(q, n, n, "Q^mu_ij");
    for (auto& q : Qmu_nui) shape(q, p, n, "Q^mu_nu i");
    for (auto& layer : Qmu_ijk) {
        if (static_cast<int>(layer.size()) != n) throw DimensionMismatch("Q^mu_ij,k needs n slices");
        for (auto& q : layer) shape(q, n, n, "Q^mu_ij,k");
    }
    for (int a = 0; a < mm; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (Qa_ij[a][i][j] != Qa_ij[a][j][i]) throw SchemaError("Q^a_ij is not symmetric at a=" + idx(a));
    for (int mu = 0; mu < p; ++mu)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (Qmu_ijk[mu][k][i][j] != Qmu_ijk[mu][k][j][i])
                        throw SchemaError("Q^mu_ij,k is not symmetric in ij at mu=" + idx(mu));
    std::set<Symbol> b(base.begin(), base.end());
    auto check = [&](const Poly& q) {
        if (!over_base(q, b)) throw SchemaError("structure function " + q.str() + " uses non-base coordinates");
    };
    for (auto* mat : {&Qa_i, &Qa_mu, &Qpa_i, &Qmu_i})
        for (auto& row : *mat) for (auto& q : row) check(q);
    for (auto* fam : {&Qa_ij, &Qi_jk, &Qmu_ij, &Qmu_nui})
        for (auto& mat : *fam) for (auto& row : mat) for (auto& q : row) check(q);
    for (auto& layer : Qmu_ijk) for (auto& mat : layer) for (auto& row : mat) for (auto& q : row) check(q);
}

bool operator==(const HA2& a, const HA2& b) {
    return a.base == b.base && a.n == b.n && a.p == b.p && a.Qa_i == b.Qa_i && a.Qa_ij == b.Qa_ij && a.Qa_mu == b.Qa_mu &&
           a.Qpa_i == b.Qpa_i && a.Qi_jk == b.Qi_jk && a.Qmu_i == b.Qmu_i && a.Qmu_ij == b.Qmu_ij && a.Qmu_nui == b.Qmu_nui &&
           a.Qmu_ijk == b.Qmu_ijk;
}

HA2 zero_ha2(const SymbolList& base, int n, int p) {
    HA2 h;
    h.base = base;
    h.n = n;
    h.p = p;
    int m = static_cast<int>(base.size());
    h.Qa_i = zero_matrix(m, n);
    h.Qa_ij.assign(m, square(n));
    h.Qa_mu = zero_matrix(m, p);
    h.Qpa_i = zero_matrix(m, n);
    h.Qi_jk.assign(n, square(n));
    h.Qmu_i = zero_matrix(p, n);
    h.Qmu_ij.assign(p, square(n));
    h.Qmu_nui.assign(p, zero_matrix(p, n));
    h.Qmu_ijk.assign(p, std::vector<PolyMatrix>(n, square(n)));
    return h;
}

HA2 tangent_ha2(const SymbolList& base) {
    int m = static_cast<int>(base.size());
    HA2 h = zero_ha2(base, m, m);
    for (int a = 0; a < m; ++a) h.Qa_i[a][a] = h.Qpa_i[a][a] = h.Qa_mu[a][a] = h.Qmu_i[a][a] = Poly(1);
    return h;
}

HA2Layout ha2_layout(const HA2& ha) {
    HA2Layout L;
    for (auto& s : ha.base) {
        if (s.jet != 0) throw SchemaError("HA2 base coordinates must have jet 0, got " + s.str());
        L.x0.push_back(s.with_weight(0));
        L.x1.push_back(Symbol(s.name, 1, 1));
        L.x2.push_back(Symbol(s.name, 2, 2));
    }
    L.y0 = indexed("y", ha.n, 0, 0);
    L.y1 = indexed("y", ha.n, 1, 1);
    L.y2 = indexed("y", ha.n, 2, 2);
    L.X = indexed("X", ha.m(), 0, 0);
    L.Y = indexed("Y", ha.n, 0, 1);
    L.Z = indexed("Z", ha.p, 0, 2);
    L.Xd = indexed("X", ha.m(), 1, 0);
    L.Yd = indexed("Y", ha.n, 1, 1);
    L.Zd = indexed("Z", ha.p, 1, 2);
    return L;
}

Comorphism kappa2_of(const HA2& ha) {
    ha.validate();
    HA2Layout L = ha2_layout(ha);
    const int m = ha.m(), n = ha.n, p = ha.p;
    auto toX = pairwise(ha.base, L.X);
    auto X = [&](const Poly& q) { return subst(q, toX); };
    const Rational half(1, 2);

    Comorphism k;
    k.source = {"T2 sigma1", cat({L.x0, L.x1, L.x2}), cat({L.y0, L.y1, L.y2})};
    k.target = {"tau_E2", cat({L.X, L.Y, L.Z}), cat({L.Xd, L.Yd, L.Zd})};
    for (int a = 0; a < m; ++a) k.base_map.push_back(Poly(L.X[a]));
    for (int a = 0; a < m; ++a) {
        Poly v;
        for (int i = 0; i < n; ++i) v += X(ha.Qa_i[a][i]) * Poly(L.Y[i]);
        k.base_map.push_back(v);
    }
    for (int a = 0; a < m; ++a) {
        Poly v;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) v += Poly(half) * X(ha.Qa_ij[a][i][j]) * Poly(L.Y[i]) * Poly(L.Y[j]);
        for (int mu = 0; mu < p; ++mu) v += X(ha.Qa_mu[a][mu]) * Poly(L.Z[mu]);
        k.base_map.push_back(v);
    }

    k.matrix = zero_matrix(m + n + p, 3 * n);
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i) k.matrix[a][i] = X(ha.Qpa_i[a][i]);
    for (int i = 0; i < n; ++i) {
        auto& row = k.matrix[m + i];
        row[n + i] = Poly(1);
        for (int kk = 0; kk < n; ++kk)
            for (int j = 0; j < n; ++j) row[kk] += X(ha.Qi_jk[i][j][kk]) * Poly(L.Y[j]);
    }
    for (int mu = 0; mu < p; ++mu) {
        auto& row = k.matrix[m + n + mu];
        for (int i = 0; i < n; ++i) row[2 * n + i] = X(ha.Qmu_i[mu][i]);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) row[n + j] += X(ha.Qmu_ij[mu][i][j]) * Poly(L.Y[i]);
        for (int i = 0; i < n; ++i) {
            for (int nu = 0; nu < p; ++nu) row[i] += X(ha.Qmu_nui[mu][nu][i]) * Poly(L.Z[nu]);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    row[i] += Poly(half) * X(ha.Qmu_ijk[mu][i][a][b]) * Poly(L.Y[a]) * Poly(L.Y[b]);
        }
    }
    return k;
}

HA2 ha2_of(const Comorphism& kappa2, const HA2Layout& L, const SymbolList& base) {
    const int m = static_cast<int>(L.x0.size()), n = static_cast<int>(L.y0.size()), p = static_cast<int>(L.Z.size());
    HA2 ha = zero_ha2(base, n, p);
    auto toBase = pairwise(L.X, base);
    auto B = [&](const Poly& q) { return subst(q, toBase); };

    enum { GY = 1, GZ = 2 };
    Locator loc;
    loc.add(GY, L.Y);
    loc.add(GZ, L.Z);
    std::set<Symbol> fiberish(L.Y.begin(), L.Y.end());
    fiberish.insert(L.Z.begin(), L.Z.end());

    // Decodes a monomial in Y, Z into its index list per group.
    auto decode = [&](const Monomial& mono) {
        std::vector<int> ys, zs;
        for (auto& [s, e] : mono.factors()) {
            auto [g, i] = loc.where.at(s);
            for (int c = 0; c < e; ++c) (g == GY ? ys : zs).push_back(i);
        }
        return std::pair{ys, zs};
    };
    auto bad = [](const Symbol& lhs, const std::string& why) {
        return NotNormalForm("equation for " + lhs.str() + " " + why);
    };

    const auto& sb = kappa2.source.base;
    const auto& sf = kappa2.source.fiber;
    const auto& tf = kappa2.target.fiber;
    for (int a = 0; a < m; ++a) {
        if (kappa2.base_map[position(sb, L.x0[a], "source base")] != Poly(L.X[a])) throw bad(L.x0[a], "is not the identity");
        for (auto& [mono, c] : split_by(kappa2.base_map[position(sb, L.x1[a], "source base")], fiberish)) {
            auto [ys, zs] = decode(mono);
            if (ys.size() != 1 || !zs.empty()) throw bad(L.x1[a], "has a term " + mono.str() + " outside weight (0,1)");
            ha.Qa_i[a][ys[0]] = B(c);
        }
        for (auto& [mono, c] : split_by(kappa2.base_map[position(sb, L.x2[a], "source base")], fiberish)) {
            auto [ys, zs] = decode(mono);
            if (ys.size() == 2 && zs.empty()) {
                Poly q = B(c);
                if (ys[0] == ys[1]) ha.Qa_ij[a][ys[0]][ys[0]] = Poly(2) * q;
                else ha.Qa_ij[a][ys[0]][ys[1]] = ha.Qa_ij[a][ys[1]][ys[0]] = q;
            } else if (ys.empty() && zs.size() == 1) {
                ha.Qa_mu[a][zs[0]] = B(c);
            } else {
                throw bad(L.x2[a], "has a term " + mono.str() + " outside weight (0,2)");
            }
        }
    }

    auto entry = [&](const Symbol& row, const Symbol& col) -> const Poly& {
        return kappa2.matrix[position(tf, row, "target fiber")][position(sf, col, "source fiber")];
    };
    auto require_zero = [&](const Symbol& row, const SymbolList& cols) {
        for (auto& c : cols)
            if (!entry(row, c).is_zero()) throw bad(row, "depends on " + c.str());
    };
    auto fiber_free = [&](const Poly& q, const Symbol& row) {
        if (q.uses_any(fiberish)) throw bad(row, "has a coefficient depending on the target fiber directions");
        return B(q);
    };

    for (int a = 0; a < m; ++a) {
        for (int i = 0; i < n; ++i) ha.Qpa_i[a][i] = fiber_free(entry(L.Xd[a], L.y0[i]), L.Xd[a]);
        require_zero(L.Xd[a], L.y1);
        require_zero(L.Xd[a], L.y2);
    }
    for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l)
            if (entry(L.Yd[i], L.y1[l]) != Poly(i == l ? 1 : 0))
                throw NotCoreIdentity("coefficient of " + L.y1[l].str() + " in " + L.Yd[i].str() + " is " + entry(L.Yd[i], L.y1[l]).str());
        require_zero(L.Yd[i], L.y2);
        for (int k = 0; k < n; ++k)
            for (auto& [mono, c] : split_by(entry(L.Yd[i], L.y0[k]), fiberish)) {
                auto [ys, zs] = decode(mono);
                if (ys.size() != 1 || !zs.empty()) throw bad(L.Yd[i], "has a term " + mono.str() + " outside weight (1,1)");
                ha.Qi_jk[i][ys[0]][k] = B(c);
            }
    }
    for (int mu = 0; mu < p; ++mu) {
        for (int i = 0; i < n; ++i) ha.Qmu_i[mu][i] = fiber_free(entry(L.Zd[mu], L.y2[i]), L.Zd[mu]);
        for (int j = 0; j < n; ++j)
            for (auto& [mono, c] : split_by(entry(L.Zd[mu], L.y1[j]), fiberish)) {
                auto [ys, zs] = decode(mono);
                if (ys.size() != 1 || !zs.empty()) throw bad(L.Zd[mu], "has a term " + mono.str() + " outside weight (1,2)");
                ha.Qmu_ij[mu][ys[0]][j] = B(c);
            }
        for (int i = 0; i < n; ++i)
            for (auto& [mono, c] : split_by(entry(L.Zd[mu], L.y0[i]), fiberish)) {
                auto [ys, zs] = decode(mono);
                if (ys.empty() && zs.size() == 1) {
                    ha.Qmu_nui[mu][zs[0]][i] = B(c);
                } else if (ys.size() == 2 && zs.empty()) {
                    Poly q = B(c);
                    if (ys[0] == ys[1]) ha.Qmu_ijk[mu][i][ys[0]][ys[0]] = Poly(2) * q;
                    else ha.Qmu_ijk[mu][i][ys[0]][ys[1]] = ha.Qmu_ijk[mu][i][ys[1]][ys[0]] = q;
                } else {
                    throw bad(L.Zd[mu], "has a term " + mono.str() + " outside weight (1,2)");
                }
            }
    }
    return ha;
}

Comorphism kappa2_M(const SymbolList& base) {
    SymbolList x, v;
    for (int alpha = 0; alpha <= 2; ++alpha)
        for (auto& s : base) {
            x.push_back(Symbol(s.name, alpha, alpha));
            v.push_back(Symbol(s.name + "v", alpha, alpha));
        }
    Comorphism k;
    k.source = {"T2 tau_M", x, v};
    k.target = {"tau_T2M", x, v};
    for (auto& s : x) k.base_map.push_back(Poly(s));
    k.matrix = identity_matrix(v.size());
    return k;
}

Comorphism prolong2_relation(const Algebroid1& A) {
    const int m = A.m(), n = A.n;
    KappaLayout v = velocity_layout(A);
    Comorphism T = tangent_lift(kappa_of(A, v), 1);
    // T.source: base (x, xv, x.d1, xv.d1), fiber (y, yv, y.d1, yv.d1)
    // T.target: base (X, Y, X.d1, Y.d1), fiber (Xv, Yv, Xv.d1, Yv.d1)
    SubBundle s1;
    for (int a = 0; a < m; ++a) s1.locus.free.push_back(T.source.base[a]);
    for (int a = 0; a < m; ++a) s1.locus.free.push_back(T.source.base[2 * m + a]);
    for (int a = 0; a < m; ++a) s1.locus.free.push_back(T.source.base[3 * m + a]);
    for (int a = 0; a < m; ++a) s1.locus.dependent.emplace(T.source.base[m + a], Poly(T.source.base[2 * m + a]));
    s1.basis = zero_matrix(4 * n, 3 * n);
    for (int i = 0; i < n; ++i) {
        s1.pivots.push_back(i);
        s1.basis[i][i] = Poly(1);
    }
    for (int i = 0; i < n; ++i) {
        s1.pivots.push_back(2 * n + i);
        s1.basis[2 * n + i][n + i] = Poly(1);
        s1.basis[n + i][n + i] = Poly(1);  // yv = y.d1 on T²E
    }
    for (int i = 0; i < n; ++i) {
        s1.pivots.push_back(3 * n + i);
        s1.basis[3 * n + i][2 * n + i] = Poly(1);
    }

    // E^[2] = {X.d1 = ρ(Y)} and its tangent directions
    const SymbolList& tb = T.target.base;
    auto X = [&](int a) { return tb[a]; };
    auto Y = [&](int i) { return tb[m + i]; };
    auto toX = pairwise(A.base, SymbolList(tb.begin(), tb.begin() + m));
    PolyMatrix Q = subst(A.QL, toX);
    SubBundle s2;
    for (int k = 0; k < m + n; ++k) s2.locus.free.push_back(tb[k]);
    for (int i = 0; i < n; ++i) s2.locus.free.push_back(tb[2 * m + n + i]);
    for (int a = 0; a < m; ++a) {
        Poly r;
        for (int i = 0; i < n; ++i) r += Q[a][i] * Poly(Y(i));
        s2.locus.dependent.emplace(tb[m + n + a], r);
    }
    const int R = 2 * (m + n);
    s2.basis = zero_matrix(R, m + 2 * n);
    for (int b = 0; b < m; ++b) {
        s2.pivots.push_back(b);
        s2.basis[b][b] = Poly(1);
        for (int a = 0; a < m; ++a) {
            Poly d;
            for (int i = 0; i < n; ++i) d += poly_diff(Q[a][i], X(b)) * Poly(Y(i));
            s2.basis[m + n + a][b] = d;
        }
    }
    for (int i = 0; i < n; ++i) {
        s2.pivots.push_back(m + i);
        s2.basis[m + i][m + i] = Poly(1);
        for (int a = 0; a < m; ++a) s2.basis[m + n + a][m + i] = Q[a][i];
    }
    for (int i = 0; i < n; ++i) {
        s2.pivots.push_back(2 * m + n + i);
        s2.basis[2 * m + n + i][m + n + i] = Poly(1);
    }

    Restriction res = fine_restriction(T, s1, s2);
    if (!res.result) throw NotAlmostLie("composition does not restrict fine: " + res.witness);

    HA2Layout L = ha2_layout(zero_ha2(A.base, n, n));
    std::map<Symbol, Symbol> names;
    for (int a = 0; a < m; ++a) {
        names.emplace(T.source.base[3 * m + a], L.x2[a]);
        names.emplace(T.target.fiber[a], L.Xd[a]);
        names.emplace(T.target.base[a], L.X[a]);
    }
    for (int i = 0; i < n; ++i) {
        names.emplace(T.source.fiber[3 * n + i], L.y2[i]);
        names.emplace(T.target.base[m + i], L.Y[i]);
        names.emplace(T.target.base[2 * m + n + i], L.Z[i]);
        names.emplace(T.target.fiber[m + i], L.Yd[i]);
        names.emplace(T.target.fiber[2 * m + n + i], L.Zd[i]);
    }
    Comorphism out = rename(*res.result, names);
    out.source.name = "T2 sigma1";
    out.target.name = "tau_E2";
    return out;
}

HA2 prolong2(const Algebroid1& A) {
    if (auto al = is_almost_lie(A); !al) throw NotAlmostLie(al.witness);
    Comorphism r = prolong2_relation(A);
    HA2 ha = ha2_of(r, ha2_layout(zero_ha2(A.base, A.n, A.n)), A.base);
    if (!same_relation(kappa2_of(ha), r)) throw NotNormalForm("composed relation does not match its normal form");
    return ha;
}

Algebroid1 reduce_to_order1(const HA2& ha) {
    Algebroid1 A;
    A.base = ha.base;
    A.n = ha.n;
    A.QL = ha.Qa_i;
    A.QR = ha.Qpa_i;
    A.Qbr = ha.Qi_jk;
    return A;
}

SymbolList e2_coordinates(const HA2& ha) {
    HA2Layout L = ha2_layout(ha);
    return cat({L.X, L.Y, L.Z});
}

VectorField alg_lift(const HA2& ha, const Section1& s, int alpha) {
    if (alpha < 0 || alpha > 2) throw JetOverflow("algebroid lift degree outside 0..2");
    return section_map(kappa2_of(ha), epsilon_lift(s, 2, alpha).flatten());
}

VectorField vf_bracket(const VectorField& v, const VectorField& w, const SymbolList& coords) {
    if (v.size() != coords.size() || w.size() != coords.size()) throw DimensionMismatch("vector field size");
    VectorField r(coords.size());
    for (std::size_t u = 0; u < coords.size(); ++u)
        for (std::size_t c = 0; c < coords.size(); ++c) {
            if (!v[c].is_zero()) r[u] += v[c] * poly_diff(w[u], coords[c]);
            if (!w[c].is_zero()) r[u] -= w[c] * poly_diff(v[u], coords[c]);
        }
    return r;
}

std::optional<int> vf_weight(const VectorField& v, const SymbolList& coords) {
    std::optional<int> w;
    for (std::size_t u = 0; u < coords.size(); ++u)
        for (auto& [mono, c] : v[u].terms()) {
            int t = mono.weight() - coords[u].weight;
            if (w && *w != t) return std::nullopt;
            w = t;
        }
    return w;
}

CheckResult is_skew2(const HA2& ha) {
    auto r = is_skew(reduce_to_order1(ha));
    if (!r) return CheckResult::fail("order-1 reduction is not skew: " + r.witness, r.residual);
    return r;
}

CheckResult al_check2(const HA2& ha) {
    if (auto s = is_skew2(ha); !s) return s;
    Comorphism r = kappa2_of(ha);
    Comorphism rp = kappa2_M(ha.base);

    VBMorphism rho1;
    rho1.source = {"E1", ha.base, ha2_layout(ha).y0};
    SymbolList v;
    for (auto& s : ha.base) v.push_back(Symbol(s.name + "v", 0, 0));
    rho1.target = {"TM", ha.base, v};
    for (auto& s : ha.base) rho1.base_map.push_back(Poly(s));
    rho1.matrix = ha.Qa_i;
    if (rho1.matrix.empty()) rho1.matrix = zero_matrix(0, ha.n);
    VBMorphism phi1 = tangent_lift(rho1, 2);

    VBMorphism phi2;
    phi2.source = r.target;
    phi2.target = rp.target;
    phi2.base_map = r.base_map;
    const SymbolList& coords = r.target.base;
    phi2.matrix = zero_matrix(phi2.base_map.size(), coords.size());
    for (std::size_t i = 0; i < phi2.base_map.size(); ++i)
        for (std::size_t c = 0; c < coords.size(); ++c) phi2.matrix[i][c] = poly_diff(phi2.base_map[i], coords[c]);

    auto res = zm_morphism_check(phi1, phi2, r, rp);
    if (!res) return CheckResult::fail("(T2 rho1, T rho2) is not a morphism into kappa2_M: " + res.witness, res.residual);
    return res;
}

CheckResult lie_check2(const HA2& ha, int* identities_checked) {
    if (identities_checked) *identities_checked = 0;
    if (auto al = al_check2(ha); !al) return CheckResult::fail("not almost-Lie: " + al.witness, al.residual);
    Algebroid1 A = reduce_to_order1(ha);
    SymbolList coords = e2_coordinates(ha);
    auto c = [](int g) -> Rational { return factorial(2) / factorial(2 - g); };
    auto scaled = [](VectorField v, const Rational& k) {
        for (auto& p : v) p = Poly(k) * p;
        return v;
    };
    std::vector<std::vector<VectorField>> lifts(ha.n, std::vector<VectorField>(3));
    for (int i = 0; i < ha.n; ++i)
        for (int a = 0; a <= 2; ++a) lifts[i][a] = alg_lift(ha, basis_section(ha.n, i), a);

    for (int i = 0; i < ha.n; ++i)
        for (int j = 0; j < ha.n; ++j) {
            Section1 br = bracket(A, basis_section(ha.n, i), basis_section(ha.n, j));
            for (int al = 0; al <= 2; ++al)
                for (int be = 0; be <= 2; ++be) {
                    VectorField lhs = vf_bracket(scaled(lifts[i][al], c(al)), scaled(lifts[j][be], c(be)), coords);
                    VectorField rhs(coords.size());
                    if (al + be <= 2) rhs = scaled(alg_lift(ha, br, al + be), c(al + be));
                    if (identities_checked) ++*identities_checked;
                    for (std::size_t u = 0; u < coords.size(); ++u)
                        if (lhs[u] != rhs[u])
                            return CheckResult::fail("lifted bracket of (e" + idx(i) + ", e" + idx(j) + ") at alpha=" +
                                                         std::to_string(al) + ", beta=" + std::to_string(be) +
                                                         " differs in the " + coords[u].str() + " component",
                                                     lhs[u] - rhs[u]);
                }
        }
    return CheckResult::pass();
}

CheckResult is_strong(const HA2& ha, const std::vector<QVec>& samples) {
    if (ha.p != ha.n) return CheckResult::fail("core ranks differ: weight-1 rank " + std::to_string(ha.n) + ", weight-2 rank " + std::to_string(ha.p));
    Poly d = det(ha.Qmu_i);
    if (auto c = d.as_constant()) {
        if (*c != 0) return CheckResult::pass();
        return CheckResult::fail("det(Q^mu_i) = 0", d);
    }
    if (samples.empty()) return CheckResult::fail("det(Q^mu_i) = " + d.str() + " is not constant and no sample points were given", d);
    for (auto& pt : samples) {
        if (pt.size() != ha.base.size()) throw DimensionMismatch("sample point dimension");
        std::map<Symbol, Rational> at;
        for (std::size_t a = 0; a < pt.size(); ++a) at.emplace(ha.base[a], pt[a]);
        if (poly_eval(d, at) == 0) return CheckResult::fail("det(Q^mu_i) = " + d.str() + " vanishes at a sample point", d);
    }
    return {true, "pointwise only: det(Q^mu_i) = " + d.str() + " is nonzero at " + std::to_string(samples.size()) + " sample points", d};
}

SubHAResult sub_ha_check(const HA2& ha, const GradedSub& sub) {
    const std::size_t m = ha.base.size(), n = ha.n, p = ha.p;
    for (auto& v : sub.base_span)
        if (v.size() != m) throw DimensionMismatch("base span vector dimension");
    for (auto& v : sub.V1)
        if (v.size() != n) throw DimensionMismatch("V1 vector dimension");
    for (auto& v : sub.V2)
        if (v.size() != p) throw DimensionMismatch("V2 vector dimension");

    Comorphism r = kappa2_of(ha);
    HA2Layout L = ha2_layout(ha);
    auto place = [](const std::vector<QVec>& span, std::size_t total, std::size_t offset) {
        std::vector<QVec> out;
        for (auto& v : span) {
            QVec w(total, Rational(0));
            for (std::size_t i = 0; i < v.size(); ++i) w[offset + i] = v[i];
            out.push_back(w);
        }
        return out;
    };
    auto join = [](std::vector<QVec> a, const std::vector<QVec>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    std::vector<QVec> src_base, src_fiber, tgt;
    for (std::size_t alpha = 0; alpha < 3; ++alpha) {
        src_base = join(src_base, place(sub.base_span, 3 * m, alpha * m));
        src_fiber = join(src_fiber, place(sub.V1, 3 * n, alpha * n));
    }
    tgt = join(join(place(sub.base_span, m + n + p, 0), place(sub.V1, m + n + p, m)), place(sub.V2, m + n + p, m + n));

    SubBundle s1 = span_subbundle(r.source, linear_locus(r.source.base, src_base), src_fiber);
    SubBundle s2 = span_subbundle(r.target, linear_locus(r.target.base, tgt), tgt);
    Restriction res = fine_restriction(r, s1, s2);
    SubHAResult out;
    if (!res.result) {
        out.fine = CheckResult::fail(res.witness);
        return out;
    }
    out.fine = CheckResult::pass();

    // Regroup the surviving coordinates into a layout for the restricted normal form.
    HA2Layout R;
    auto keep = [](const SymbolList& all, const SymbolList& group) {
        SymbolList o;
        std::set<Symbol> g(group.begin(), group.end());
        for (auto& s : all)
            if (g.count(s)) o.push_back(s);
        return o;
    };
    const Comorphism& c = *res.result;
    R.x0 = keep(c.source.base, L.x0);
    R.x1 = keep(c.source.base, L.x1);
    R.x2 = keep(c.source.base, L.x2);
    R.y0 = keep(c.source.fiber, L.y0);
    R.y1 = keep(c.source.fiber, L.y1);
    R.y2 = keep(c.source.fiber, L.y2);
    R.X = keep(c.target.base, L.X);
    R.Y = keep(c.target.base, L.Y);
    R.Z = keep(c.target.base, L.Z);
    R.Xd = keep(c.target.fiber, L.Xd);
    R.Yd = keep(c.target.fiber, L.Yd);
    R.Zd = keep(c.target.fiber, L.Zd);
    out.restricted = ha2_of(c, R, R.x0);
    return out;
}

}  // namespace algforge
