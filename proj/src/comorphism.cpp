#include "algforge/comorphism.hpp"

#include <set>

namespace algforge {

namespace {

std::string list_str(const SymbolList& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + s[i].str();
    return out + ")";
}

std::map<Symbol, Poly> zip_subst(const SymbolList& syms, const PolyVec& vals) {
    std::map<Symbol, Poly> s;
    for (std::size_t i = 0; i < syms.size(); ++i) s.emplace(syms[i], vals[i]);
    return s;
}

void require_over(const PolyVec& v, const SymbolList& allowed, const std::string& what) {
    std::set<Symbol> ok(allowed.begin(), allowed.end());
    for (auto& p : v)
        for (auto& s : p.symbols())
            if (!ok.count(s)) throw SchemaError(what + " uses " + s.str() + " outside " + list_str(allowed));
}

void require_shape(const PolyMatrix& m, std::size_t rows, std::size_t cols, const std::string& what) {
    if (m.size() != rows) throw DimensionMismatch(what + " has " + std::to_string(m.size()) + " rows, expected " + std::to_string(rows));
    for (auto& row : m)
        if (row.size() != cols) throw DimensionMismatch(what + " row length " + std::to_string(row.size()) + ", expected " + std::to_string(cols));
}

Symbol dual_symbol(const Symbol& s) {
    if (s.name.rfind("xi_", 0) == 0) return Symbol(s.name.substr(3), s.jet, s.weight);
    return Symbol("xi_" + s.name, s.jet, s.weight);
}

VBundle dual_bundle(const VBundle& b) {
    VBundle d;
    d.name = b.name.rfind("dual ", 0) == 0 ? b.name.substr(5) : "dual " + b.name;
    d.base = b.base;
    for (auto& s : b.fiber) d.fiber.push_back(dual_symbol(s));
    return d;
}

Rational binom(int n, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return Rational(r);
}

Poly nth_derivative(Poly p, int times, int order) {
    for (int i = 0; i < times; ++i) p = total_derivative(p, order);
    return p;
}

SymbolList lifted_symbols(const SymbolList& syms, int k) {
    SymbolList out;
    for (int alpha = 0; alpha <= k; ++alpha)
        for (auto& s : syms) {
            if (s.jet != 0) throw JetOverflow("tangent lift needs jet-0 coordinates, got " + s.str());
            out.push_back(s.prolonged(alpha));
        }
    return out;
}

PolyMatrix lifted_matrix(const PolyMatrix& m, std::size_t rows, std::size_t cols, int k) {
    PolyMatrix out = zero_matrix(rows * (k + 1), cols * (k + 1));
    for (int alpha = 0; alpha <= k; ++alpha)
        for (int beta = 0; beta <= alpha; ++beta) {
            Rational c = binom(alpha, beta);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) {
                    if (m[i][j].is_zero()) continue;
                    out[alpha * rows + i][beta * cols + j] = Poly(c) * nth_derivative(m[i][j], alpha - beta, k);
                }
        }
    return out;
}

}  // namespace

bool VBundle::same_coordinates(const VBundle& o) const { return base == o.base && fiber == o.fiber; }

void Comorphism::validate() const {
    if (base_map.size() != source.base.size())
        throw DimensionMismatch("base map has " + std::to_string(base_map.size()) + " entries for " +
                                std::to_string(source.base.size()) + " source base coordinates");
    require_over(base_map, target.base, "base map");
    require_shape(matrix, target.rank(), source.rank(), "fiber matrix");
    for (auto& row : matrix) require_over(row, target.base, "fiber matrix");
}

std::map<Symbol, Poly> Comorphism::base_substitution() const { return zip_subst(source.base, base_map); }

std::vector<std::string> Comorphism::equations() const {
    std::vector<std::string> out;
    for (std::size_t a = 0; a < source.base.size(); ++a) out.push_back(source.base[a].str() + " = " + base_map[a].str());
    for (std::size_t i = 0; i < target.fiber.size(); ++i) {
        Poly rhs;
        for (std::size_t j = 0; j < source.fiber.size(); ++j) rhs += matrix[i][j] * Poly(source.fiber[j]);
        out.push_back(target.fiber[i].str() + " = " + rhs.str());
    }
    return out;
}

void VBMorphism::validate() const {
    if (base_map.size() != target.base.size()) throw DimensionMismatch("morphism base map size");
    require_over(base_map, source.base, "morphism base map");
    require_shape(matrix, target.rank(), source.rank(), "morphism matrix");
    for (auto& row : matrix) require_over(row, source.base, "morphism matrix");
}

std::map<Symbol, Poly> VBMorphism::base_substitution() const { return zip_subst(target.base, base_map); }

Comorphism identity_comorphism(const VBundle& b) {
    Comorphism r;
    r.source = r.target = b;
    for (auto& s : b.base) r.base_map.push_back(Poly(s));
    r.matrix = identity_matrix(b.rank());
    return r;
}

VBMorphism identity_morphism(const VBundle& b) {
    VBMorphism r;
    r.source = r.target = b;
    for (auto& s : b.base) r.base_map.push_back(Poly(s));
    r.matrix = identity_matrix(b.rank());
    return r;
}

FiberVector apply(const Comorphism& r, const QVec& y, const FiberVector& x) {
    if (y.size() != r.target.base.size()) throw DimensionMismatch("base point has wrong dimension");
    if (x.components.size() != r.source.rank()) throw DimensionMismatch("fiber vector has wrong rank");
    std::map<Symbol, Rational> at;
    for (std::size_t i = 0; i < y.size(); ++i) at.emplace(r.target.base[i], y[i]);
    if (x.base_point.size() != r.source.base.size()) throw DimensionMismatch("fiber vector base point dimension");
    for (std::size_t a = 0; a < r.base_map.size(); ++a) {
        Rational v = poly_eval(r.base_map[a], at);
        if (v != x.base_point[a])
            throw BasePointMismatch(r.source.base[a].str() + ": r(y) gives " + v.get_str() + ", vector sits at " +
                                    x.base_point[a].get_str());
    }
    FiberVector out;
    out.base_point = y;
    out.components.assign(r.target.rank(), Rational(0));
    for (std::size_t i = 0; i < r.target.rank(); ++i)
        for (std::size_t j = 0; j < r.source.rank(); ++j)
            if (!r.matrix[i][j].is_zero()) out.components[i] += poly_eval(r.matrix[i][j], at) * x.components[j];
    return out;
}

PolyVec apply_symbolic(const Comorphism& r, const PolyVec& x) { return matvec(r.matrix, x); }

PolyVec section_map(const Comorphism& r, const PolyVec& s) {
    if (s.size() != r.source.rank()) throw DimensionMismatch("section has wrong rank");
    return matvec(r.matrix, subst(s, r.base_substitution()));
}

Comorphism compose(const Comorphism& r2, const Comorphism& r1) {
    if (!r1.target.same_coordinates(r2.source))
        throw BundleMismatch("target " + list_str(r1.target.base) + list_str(r1.target.fiber) + " vs source " +
                             list_str(r2.source.base) + list_str(r2.source.fiber));
    Comorphism r;
    r.source = r1.source;
    r.target = r2.target;
    auto s = r2.base_substitution();
    r.base_map = subst(r1.base_map, s);
    r.matrix = matmul(r2.matrix, subst(r1.matrix, s));
    if (r.matrix.empty()) r.matrix = zero_matrix(r.target.rank(), r.source.rank());
    return r;
}

VBMorphism dualize(const Comorphism& r) {
    VBMorphism phi;
    phi.source = dual_bundle(r.target);
    phi.target = dual_bundle(r.source);
    phi.base_map = r.base_map;
    phi.matrix = transpose(r.matrix, r.source.rank());
    return phi;
}

Comorphism dualize(const VBMorphism& phi) {
    Comorphism r;
    r.source = dual_bundle(phi.target);
    r.target = dual_bundle(phi.source);
    r.base_map = phi.base_map;
    r.matrix = transpose(phi.matrix, phi.source.rank());
    return r;
}

VBMorphism compose(const VBMorphism& psi, const VBMorphism& phi) {
    if (!phi.target.same_coordinates(psi.source)) throw BundleMismatch("morphism composition");
    VBMorphism r;
    r.source = phi.source;
    r.target = psi.target;
    auto s = phi.base_substitution();
    r.base_map = subst(psi.base_map, s);
    r.matrix = matmul(subst(psi.matrix, s), phi.matrix);
    if (r.matrix.empty()) r.matrix = zero_matrix(r.target.rank(), r.source.rank());
    return r;
}

CheckResult zm_morphism_check(const VBMorphism& phi1, const VBMorphism& phi2, const Comorphism& r,
                              const Comorphism& rp) {
    if (!phi1.source.same_coordinates(r.source) || !phi2.source.same_coordinates(r.target) ||
        !phi1.target.same_coordinates(rp.source) || !phi2.target.same_coordinates(rp.target))
        throw BundleMismatch("morphisms do not map the bundles of r to those of r'");
    auto at_r = r.base_substitution();
    auto at_phi2 = phi2.base_substitution();
    // (i) φ̲₁ ∘ r̲ = r̲' ∘ φ̲₂ as maps M₂ → M₁'
    for (std::size_t a = 0; a < rp.source.base.size(); ++a) {
        Poly lhs = subst(phi1.base_map[a], at_r);
        Poly rhs = subst(rp.base_map[a], at_phi2);
        if (lhs != rhs) return CheckResult::fail("base maps differ at " + rp.source.base[a].str(), lhs - rhs);
    }
    // (ii) Φ₂(y) M(y) = M'(φ̲₂(y)) Φ₁(r̲(y))
    PolyMatrix lhs = matmul(phi2.matrix, r.matrix);
    PolyMatrix rhs = matmul(subst(rp.matrix, at_phi2), subst(phi1.matrix, at_r));
    for (std::size_t i = 0; i < rp.target.rank(); ++i)
        for (std::size_t j = 0; j < r.source.rank(); ++j) {
            Poly a = lhs.empty() ? Poly() : lhs[i][j];
            Poly b = rhs.empty() ? Poly() : rhs[i][j];
            if (a != b)
                return CheckResult::fail("fiber maps differ at (" + rp.target.fiber[i].str() + ", " +
                                             r.source.fiber[j].str() + ")",
                                         a - b);
        }
    return CheckResult::pass();
}

// ---------------------------------------------------------------- subbundles

BaseLocus full_locus(const SymbolList& base) { return BaseLocus{base, {}}; }

BaseLocus linear_locus(const SymbolList& base, const std::vector<QVec>& span) {
    GraphSpan g = graph_span(span, base.size());
    BaseLocus l;
    std::set<int> piv(g.pivots.begin(), g.pivots.end());
    for (int p : g.pivots) l.free.push_back(base[p]);
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (piv.count(static_cast<int>(i))) continue;
        Poly v;
        for (std::size_t j = 0; j < g.pivots.size(); ++j) v += Poly(g.basis[i][j]) * Poly(base[g.pivots[j]]);
        l.dependent.emplace(base[i], v);
    }
    return l;
}

SubBundle full_subbundle(const VBundle& b) {
    SubBundle s;
    s.locus = full_locus(b.base);
    for (std::size_t i = 0; i < b.rank(); ++i) s.pivots.push_back(static_cast<int>(i));
    s.basis = identity_matrix(b.rank());
    return s;
}

SubBundle span_subbundle(const VBundle& b, BaseLocus locus, const std::vector<QVec>& span) {
    GraphSpan g = graph_span(span, b.rank());
    SubBundle s;
    s.locus = std::move(locus);
    s.pivots = g.pivots;
    s.basis = zero_matrix(b.rank(), g.pivots.size());
    for (std::size_t i = 0; i < b.rank(); ++i)
        for (std::size_t j = 0; j < g.pivots.size(); ++j) s.basis[i][j] = Poly(g.basis[i][j]);
    return s;
}

SubBundle graph_subbundle(const VBundle& b, BaseLocus locus, std::vector<int> pivots, PolyMatrix basis) {
    require_shape(basis, b.rank(), pivots.size(), "subbundle basis");
    for (std::size_t j = 0; j < pivots.size(); ++j)
        for (std::size_t l = 0; l < pivots.size(); ++l)
            if (basis[pivots[l]][j] != Poly(l == j ? 1 : 0))
                throw SchemaError("subbundle basis is not in graph form at pivot " + std::to_string(pivots[l]));
    return SubBundle{std::move(locus), std::move(pivots), std::move(basis)};
}

Restriction fine_restriction(const Comorphism& r, const SubBundle& sub1, const SubBundle& sub2) {
    Restriction out;
    const auto& dep2 = sub2.locus.dependent;
    // r̲ restricted to M₂', expressed in the free coordinates of M₂'
    PolyVec bm = subst(r.base_map, dep2);
    std::map<Symbol, Poly> image;  // M₁ coordinate -> value on M₂'
    for (std::size_t a = 0; a < r.source.base.size(); ++a) image.emplace(r.source.base[a], bm[a]);

    for (auto& [d, g] : sub1.locus.dependent) {
        Poly lhs = image.at(d);
        Poly rhs = subst(g, image);
        if (lhs != rhs) {
            out.witness = "base image leaves the source locus at " + d.str() + ": residual " + (lhs - rhs).str();
            return out;
        }
    }

    PolyMatrix b1 = subst(sub1.basis, image);
    PolyMatrix v = subst(matmul(r.matrix, b1), dep2);
    if (v.empty()) v = zero_matrix(r.target.rank(), sub1.pivots.size());
    PolyMatrix b2 = subst(sub2.basis, dep2);
    PolyMatrix coords = zero_matrix(sub2.pivots.size(), sub1.pivots.size());
    for (std::size_t l = 0; l < sub2.pivots.size(); ++l) coords[l] = v[sub2.pivots[l]];
    PolyMatrix back = matmul(b2, coords);
    if (back.empty()) back = zero_matrix(r.target.rank(), sub1.pivots.size());
    for (std::size_t i = 0; i < r.target.rank(); ++i)
        for (std::size_t j = 0; j < sub1.pivots.size(); ++j)
            if (v[i][j] != back[i][j]) {
                out.witness = "image of source basis vector " + std::to_string(j + 1) + " leaves the target subbundle at " +
                              r.target.fiber[i].str() + ": residual " + (v[i][j] - back[i][j]).str();
                return out;
            }

    Comorphism res;
    res.source.name = r.source.name + "'";
    res.target.name = r.target.name + "'";
    res.source.base = sub1.locus.free;
    res.target.base = sub2.locus.free;
    for (int p : sub1.pivots) res.source.fiber.push_back(r.source.fiber[p]);
    for (int p : sub2.pivots) res.target.fiber.push_back(r.target.fiber[p]);
    for (auto& s : sub1.locus.free) res.base_map.push_back(image.at(s));
    res.matrix = coords;
    res.validate();
    out.result = std::move(res);
    return out;
}

Comorphism reduce_order(const Comorphism& r, int j) {
    auto keep = [j](const Symbol& s) { return s.weight <= j; };
    std::set<Symbol> dropped_target;
    for (auto& s : r.target.base)
        if (!keep(s)) dropped_target.insert(s);
    Comorphism out;
    out.source.name = r.source.name;
    out.target.name = r.target.name;
    std::vector<std::size_t> src_cols, tgt_rows;
    for (auto& s : r.target.base)
        if (keep(s)) out.target.base.push_back(s);
    for (std::size_t a = 0; a < r.source.base.size(); ++a) {
        if (!keep(r.source.base[a])) continue;
        if (r.base_map[a].uses_any(dropped_target))
            throw NotNormalForm("equation for " + r.source.base[a].str() + " involves coordinates above weight " + std::to_string(j));
        out.source.base.push_back(r.source.base[a]);
        out.base_map.push_back(r.base_map[a]);
    }
    for (std::size_t c = 0; c < r.source.fiber.size(); ++c)
        if (keep(r.source.fiber[c])) {
            src_cols.push_back(c);
            out.source.fiber.push_back(r.source.fiber[c]);
        }
    for (std::size_t i = 0; i < r.target.fiber.size(); ++i)
        if (keep(r.target.fiber[i])) {
            tgt_rows.push_back(i);
            out.target.fiber.push_back(r.target.fiber[i]);
        }
    out.matrix = zero_matrix(tgt_rows.size(), src_cols.size());
    for (std::size_t i = 0; i < tgt_rows.size(); ++i) {
        for (std::size_t c = 0; c < r.source.fiber.size(); ++c) {
            const Poly& e = r.matrix[tgt_rows[i]][c];
            if (e.is_zero()) continue;
            if (!keep(r.source.fiber[c]) || e.uses_any(dropped_target))
                throw NotNormalForm("equation for " + r.target.fiber[tgt_rows[i]].str() + " involves coordinates above weight " +
                                    std::to_string(j));
        }
        for (std::size_t c = 0; c < src_cols.size(); ++c) out.matrix[i][c] = r.matrix[tgt_rows[i]][src_cols[c]];
    }
    return out;
}

Comorphism tangent_lift(const Comorphism& r, int k) {
    Comorphism out;
    out.source.name = "T" + std::to_string(k) + " " + r.source.name;
    out.target.name = "T" + std::to_string(k) + " " + r.target.name;
    out.source.base = lifted_symbols(r.source.base, k);
    out.source.fiber = lifted_symbols(r.source.fiber, k);
    out.target.base = lifted_symbols(r.target.base, k);
    out.target.fiber = lifted_symbols(r.target.fiber, k);
    for (int alpha = 0; alpha <= k; ++alpha)
        for (auto& p : r.base_map) out.base_map.push_back(nth_derivative(p, alpha, k));
    out.matrix = lifted_matrix(r.matrix, r.target.rank(), r.source.rank(), k);
    return out;
}

VBMorphism tangent_lift(const VBMorphism& phi, int k) {
    VBMorphism out;
    out.source.name = "T" + std::to_string(k) + " " + phi.source.name;
    out.target.name = "T" + std::to_string(k) + " " + phi.target.name;
    out.source.base = lifted_symbols(phi.source.base, k);
    out.source.fiber = lifted_symbols(phi.source.fiber, k);
    out.target.base = lifted_symbols(phi.target.base, k);
    out.target.fiber = lifted_symbols(phi.target.fiber, k);
    for (int alpha = 0; alpha <= k; ++alpha)
        for (auto& p : phi.base_map) out.base_map.push_back(nth_derivative(p, alpha, k));
    out.matrix = lifted_matrix(phi.matrix, phi.target.rank(), phi.source.rank(), k);
    return out;
}

Comorphism rename(const Comorphism& r, const std::map<Symbol, Symbol>& names) {
    auto ren = [&](SymbolList l) {
        for (auto& s : l) {
            auto it = names.find(s);
            if (it != names.end()) s = it->second;
        }
        return l;
    };
    std::map<Symbol, Poly> sub;
    for (auto& [a, b] : names) sub.emplace(a, Poly(b));
    Comorphism out;
    out.source = {r.source.name, ren(r.source.base), ren(r.source.fiber)};
    out.target = {r.target.name, ren(r.target.base), ren(r.target.fiber)};
    out.base_map = subst(r.base_map, sub);
    out.matrix = subst(r.matrix, sub);
    return out;
}

std::optional<std::string> biweight_violation(const Comorphism& r) {
    for (std::size_t a = 0; a < r.source.base.size(); ++a) {
        int w = r.source.base[a].weight;
        for (auto& [m, c] : r.base_map[a].terms())
            if (m.weight() != w)
                return r.source.base[a].str() + " has bi-weight (0," + std::to_string(w) + ") but term " + m.str() +
                       " has (0," + std::to_string(m.weight()) + ")";
    }
    for (std::size_t i = 0; i < r.target.rank(); ++i) {
        int w = r.target.fiber[i].weight;
        for (std::size_t j = 0; j < r.source.rank(); ++j)
            for (auto& [m, c] : r.matrix[i][j].terms())
                if (m.weight() + r.source.fiber[j].weight != w)
                    return r.target.fiber[i].str() + " has bi-weight (1," + std::to_string(w) + ") but term " +
                           (m.empty() ? std::string() : m.str() + "*") + r.source.fiber[j].str() + " has (1," +
                           std::to_string(m.weight() + r.source.fiber[j].weight) + ")";
    }
    return std::nullopt;
}

}  // namespace algforge
