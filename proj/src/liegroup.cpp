#include "algforge/liegroup.hpp"

#include <string>

namespace algforge {

namespace {

std::string idx(int i) { return std::to_string(i + 1); }

QVec zeros(int n) { return QVec(n, Rational(0)); }

QVec basis_vec(int n, int i) {
    QVec v = zeros(n);
    v[i] = 1;
    return v;
}

QVec sub(const QVec& a, const QVec& b) { return qvec_add(a, qvec_scale(-1, b)); }

bool contained(const std::vector<QVec>& span, const QVec& v) { return qvec_is_zero(v) || in_span(span, v); }

std::string vec_str(const QVec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
    return s + ")";
}

QVec bracket_with(const Constants& c, const QVec& a, const QVec& b) {
    std::size_t n = c.size();
    QVec r = zeros(static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (b[j] == 0) continue;
            for (std::size_t k = 0; k < n; ++k)
                if (c[k][i][j] != 0) r[k] += c[k][i][j] * a[i] * b[j];
        }
    }
    return r;
}

CheckResult check_antisymmetric(const Constants& c) {
    std::size_t n = c.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                if (c[k][i][j] != -c[k][j][i])
                    return CheckResult::fail("c^" + idx(k) + "_" + idx(i) + idx(j) + " + c^" + idx(k) + "_" + idx(j) + idx(i) + " != 0");
    return CheckResult::pass();
}

CheckResult check_jacobi(const Constants& c) {
    int n = static_cast<int>(c.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int l = j + 1; l < n; ++l) {
                QVec a = basis_vec(n, i), b = basis_vec(n, j), d = basis_vec(n, l);
                QVec J = qvec_add(qvec_add(bracket_with(c, bracket_with(c, a, b), d), bracket_with(c, bracket_with(c, b, d), a)),
                                  bracket_with(c, bracket_with(c, d, a), b));
                if (!qvec_is_zero(J))
                    return CheckResult::fail("Jacobiator of (e" + idx(i) + ", e" + idx(j) + ", e" + idx(l) + ") is " + vec_str(J));
            }
    return CheckResult::pass();
}

void check_shape(const Constants& c, std::size_t n) {
    if (c.size() != n) throw DimensionMismatch("structure constants need " + std::to_string(n) + " layers");
    for (auto& layer : c) {
        if (layer.size() != n) throw DimensionMismatch("structure constant layer rows");
        for (auto& row : layer)
            if (row.size() != n) throw DimensionMismatch("structure constant layer columns");
    }
}

}  // namespace

LieAlgebraModel LieAlgebraModel::make(Constants c, bool admit_non_lie) {
    LieAlgebraModel g;
    g.n = static_cast<int>(c.size());
    check_shape(c, g.n);
    if (auto a = check_antisymmetric(c); !a) throw SchemaError("bracket is not antisymmetric: " + a.witness);
    g.c = std::move(c);
    if (!admit_non_lie)
        if (auto j = g.jacobi(); !j) throw NotAlmostLie("not a Lie algebra: " + j.witness);
    return g;
}

QVec LieAlgebraModel::bracket(const QVec& a, const QVec& b) const {
    if (a.size() != static_cast<std::size_t>(n) || b.size() != static_cast<std::size_t>(n))
        throw DimensionMismatch("algebra element has wrong dimension");
    return bracket_with(c, a, b);
}

CheckResult LieAlgebraModel::jacobi() const { return check_jacobi(c); }

LieAlgebraModel so3() {
    Constants c(3, std::vector<QVec>(3, zeros(3)));
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        c[k][i][j] = 1;
        c[k][j][i] = -1;
    }
    return LieAlgebraModel::make(c);
}

Algebroid1 to_algebroid(const LieAlgebraModel& g) { return constant_algebroid(g.c); }

Tuple kappa_g(const LieAlgebraModel& g, int k, const Tuple& Ybar, const Tuple& X) {
    if (static_cast<int>(Ybar.size()) != k || static_cast<int>(X.size()) != k + 1)
        throw DimensionMismatch("kappa_g needs k base components and k+1 source components");
    Tuple out;
    for (int l = 0; l < k; ++l) {
        QVec v = qvec_scale(l + 1, X[l + 1]);
        for (int i = 0; i <= l; ++i) v = sub(v, g.bracket(X[i], Ybar[l - i]));
        out.push_back(v);
    }
    return out;
}

Comorphism kappa_g_comorphism(const LieAlgebraModel& g, int k) {
    const int n = g.n;
    auto syms = [n](const std::string& prefix, int count, int wshift) {
        SymbolList out;
        for (int i = 0; i < count; ++i)
            for (int a = 0; a < n; ++a) out.emplace_back(prefix + idx(a) + "_" + std::to_string(i), 0, i + wshift);
        return out;
    };
    Comorphism r;
    r.source = {"T^k g", {}, syms("X", k + 1, 0)};
    r.target = {"T T^(k-1) g", syms("Y", k, 1), syms("Yd", k, 1)};
    r.matrix = zero_matrix(n * k, n * (k + 1));
    for (int l = 0; l < k; ++l)
        for (int a = 0; a < n; ++a) {
            auto& row = r.matrix[l * n + a];
            row[(l + 1) * n + a] += Poly(l + 1);
            for (int i = 0; i <= l; ++i) {
                int j = l - i;
                for (int q = 0; q < n; ++q)
                    for (int p = 0; p < n; ++p)
                        if (g.c[a][p][q] != 0) row[i * n + q] += Poly(g.c[a][p][q]) * Poly(r.target.base[j * n + p]);
            }
        }
    return r;
}

CheckResult subalgebroid_test(const LieAlgebraModel& g, int k, const GradedSubspace& V) {
    if (static_cast<int>(V.size()) != k) throw DimensionMismatch("graded subspace needs k components");
    for (auto& Vi : V)
        for (auto& v : Vi)
            if (v.size() != static_cast<std::size_t>(g.n)) throw DimensionMismatch("subspace vector dimension");
    for (int i = 0; i < k; ++i)
        for (std::size_t b = 0; b < V[0].size(); ++b)
            if (!contained(V[i], V[0][b]))
                return CheckResult::fail("V_0 vector " + vec_str(V[0][b]) + " is not in V_" + std::to_string(i));
    for (int i = 0; i < k; ++i)
        for (auto& u : V[0])
            for (auto& v : V[i]) {
                QVec w = g.bracket(u, v);
                for (int j = i; j < k; ++j)
                    if (!contained(V[j], w))
                        return CheckResult::fail("[" + vec_str(u) + ", " + vec_str(v) + "] = " + vec_str(w) + " is not in V_" +
                                                 std::to_string(j) + " (pair from V_0 x V_" + std::to_string(i) + ")");
            }
    return CheckResult::pass();
}

CheckResult subalgebroid_by_restriction(const LieAlgebraModel& g, int k, const GradedSubspace& V) {
    if (static_cast<int>(V.size()) != k) throw DimensionMismatch("graded subspace needs k components");
    Comorphism r = kappa_g_comorphism(g, k);
    const int n = g.n;
    auto place = [n](const std::vector<QVec>& span, int total_blocks, int block) {
        std::vector<QVec> out;
        for (auto& v : span) {
            QVec w = zeros(n * total_blocks);
            for (int a = 0; a < n; ++a) w[block * n + a] = v[a];
            out.push_back(w);
        }
        return out;
    };
    std::vector<QVec> src, tgt;
    for (int i = 0; i <= k; ++i)
        for (auto& w : place(V[0], k + 1, i)) src.push_back(w);
    for (int j = 0; j < k; ++j)
        for (auto& w : place(V[j], k, j)) tgt.push_back(w);
    SubBundle s1 = span_subbundle(r.source, full_locus({}), src);
    SubBundle s2 = span_subbundle(r.target, linear_locus(r.target.base, tgt), tgt);
    Restriction res = fine_restriction(r, s1, s2);
    if (!res.result) return CheckResult::fail(res.witness);
    return CheckResult::pass();
}

// ---------------------------------------------------------------- graded

int GradedLieAlgebraModel::total() const {
    int t = 0;
    for (int d : dims) t += d;
    return t;
}

int GradedLieAlgebraModel::offset(int degree) const {
    int o = 0;
    for (int i = 0; i < degree; ++i) o += dims[i];
    return o;
}

int GradedLieAlgebraModel::degree_of(int index) const {
    for (int d = 0; d < k(); ++d) {
        if (index < dims[d]) return d;
        index -= dims[d];
    }
    throw DimensionMismatch("basis index outside the graded algebra");
}

QVec GradedLieAlgebraModel::bracket(const QVec& a, const QVec& b) const {
    if (a.size() != static_cast<std::size_t>(total()) || b.size() != static_cast<std::size_t>(total()))
        throw DimensionMismatch("graded algebra element has wrong dimension");
    return bracket_with(c, a, b);
}

QVec GradedLieAlgebraModel::apply_alpha(const Tuple& t) const {
    if (static_cast<int>(t.size()) != k()) throw DimensionMismatch("alpha needs a k-tuple");
    QVec out = zeros(total());
    for (int d = 0; d < k(); ++d) {
        if (t[d].size() != static_cast<std::size_t>(dims[0])) throw DimensionMismatch("tuple entry dimension");
        for (int r = 0; r < dims[d]; ++r)
            for (int s = 0; s < dims[0]; ++s) out[offset(d) + r] += alpha[d][r][s] * t[d][s];
    }
    return out;
}

GradedLieAlgebraModel GradedLieAlgebraModel::make(std::vector<int> dims, Constants c, std::vector<QMatrix> alpha, bool check) {
    GradedLieAlgebraModel g;
    g.dims = std::move(dims);
    if (g.dims.empty()) throw SchemaError("graded algebra needs at least degree 0");
    check_shape(c, g.total());
    g.c = std::move(c);
    if (static_cast<int>(alpha.size()) != g.k()) throw DimensionMismatch("alpha needs one block per degree");
    for (int d = 0; d < g.k(); ++d) {
        if (static_cast<int>(alpha[d].size()) != g.dims[d]) throw DimensionMismatch("alpha block rows");
        for (auto& row : alpha[d])
            if (static_cast<int>(row.size()) != g.dims[0]) throw DimensionMismatch("alpha block columns");
    }
    g.alpha = std::move(alpha);
    if (check) {
        if (auto j = jacobi_graded_check(g); !j) throw SchemaError("not a graded Lie algebra: " + j.witness);
        if (auto h = alpha_homomorphism_check(g); !h) throw SchemaError("alpha is not a homomorphism: " + h.witness);
    }
    return g;
}

GradedLieAlgebraModel truncated_current(const LieAlgebraModel& g, int k) {
    const int n = g.n, N = n * k;
    Constants c(N, std::vector<QVec>(N, zeros(N)));
    for (int i = 0; i < k; ++i)
        for (int j = 0; i + j < k; ++j)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int e = 0; e < n; ++e) c[(i + j) * n + e][i * n + a][j * n + b] = g.c[e][a][b];
    std::vector<QMatrix> alpha;
    for (int d = 0; d < k; ++d) {
        QMatrix id(n, zeros(n));
        for (int a = 0; a < n; ++a) id[a][a] = 1;
        alpha.push_back(id);
    }
    return GradedLieAlgebraModel::make(std::vector<int>(k, n), c, alpha, false);
}

CheckResult jacobi_graded_check(const GradedLieAlgebraModel& gla) {
    if (auto a = check_antisymmetric(gla.c); !a) return CheckResult::fail("not antisymmetric: " + a.witness);
    const int N = gla.total();
    for (int e = 0; e < N; ++e)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                if (gla.c[e][i][j] == 0) continue;
                int di = gla.degree_of(i), dj = gla.degree_of(j);
                if (di + dj >= gla.k() || gla.degree_of(e) != di + dj)
                    return CheckResult::fail("bracket of degree " + std::to_string(di) + " and " + std::to_string(dj) +
                                             " basis elements has a component in degree " + std::to_string(gla.degree_of(e)));
            }
    if (auto j = check_jacobi(gla.c); !j) return CheckResult::fail("graded Jacobi fails: " + j.witness);
    return CheckResult::pass();
}

LieAlgebraModel degree0_algebra(const GradedLieAlgebraModel& gla) {
    const int n = gla.dims[0];
    Constants c(n, std::vector<QVec>(n, zeros(n)));
    for (int e = 0; e < n; ++e)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c[e][i][j] = gla.c[e][i][j];
    return LieAlgebraModel::make(c, true);
}

CheckResult alpha_homomorphism_check(const GradedLieAlgebraModel& gla) {
    const int n = gla.dims[0], k = gla.k();
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
            if (gla.alpha[0][r][s] != (r == s ? 1 : 0)) return CheckResult::fail("alpha_0 is not the identity");
    LieAlgebraModel g0 = degree0_algebra(gla);
    auto element = [&](int degree, int a) {
        Tuple t(k, zeros(n));
        t[degree][a] = 1;
        return t;
    };
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    Tuple br(k, zeros(n));
                    if (i + j < k) br[i + j] = g0.bracket(basis_vec(n, a), basis_vec(n, b));
                    QVec lhs = gla.apply_alpha(br);
                    QVec rhs = gla.bracket(gla.apply_alpha(element(i, a)), gla.apply_alpha(element(j, b)));
                    if (lhs != rhs)
                        return CheckResult::fail("alpha([e" + idx(a) + " t^" + std::to_string(i) + ", e" + idx(b) + " t^" +
                                                 std::to_string(j) + "]) = " + vec_str(lhs) + " but the bracket of the images is " +
                                                 vec_str(rhs));
                }
    return CheckResult::pass();
}

CheckResult alpha_surjective(const GradedLieAlgebraModel& gla) {
    for (int d = 0; d < gla.k(); ++d)
        if (rank(gla.alpha[d], gla.dims[0]) != gla.dims[d])
            return CheckResult::fail("alpha is not onto degree " + std::to_string(d));
    return CheckResult::pass();
}

std::pair<Tuple, Tuple> split_tangent(const Tuple& X) {
    if (X.size() < 2) throw DimensionMismatch("T^k element needs at least two components");
    Tuple x0(X.begin(), X.end() - 1), x1;
    for (std::size_t l = 1; l < X.size(); ++l) x1.push_back(qvec_scale(static_cast<long>(l), X[l]));
    return {x0, x1};
}

QVec quotient_kappa(const GradedLieAlgebraModel& gla, const QVec& y, const Tuple& X) {
    if (static_cast<int>(X.size()) != gla.k() + 1) throw DimensionMismatch("X must have k+1 components");
    auto [x0, x1] = split_tangent(X);
    return qvec_add(gla.apply_alpha(x1), gla.bracket(y, gla.apply_alpha(x0)));
}

QVec quotient_kappa_lifted(const GradedLieAlgebraModel& gla, const Tuple& ytilde, const Tuple& X) {
    return gla.apply_alpha(kappa_g(degree0_algebra(gla), gla.k(), ytilde, X));
}

}  // namespace algforge
