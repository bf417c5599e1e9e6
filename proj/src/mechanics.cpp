#include "algforge/mechanics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "algforge/graded.hpp"

namespace algforge {

namespace {

constexpr int kMaxJet = 16;

Poly dt(const Poly& p) { return poly_diff(p, time_symbol()); }

Poly dt_n(Poly p, int n) {
    for (int i = 0; i < n; ++i) p = dt(p);
    return p;
}

Symbol jet(const Symbol& s, int j) { return Symbol(s.name, j, s.weight + j); }

QVec unit(int n, int i) {
    QVec v(n, Rational(0));
    v[i] = 1;
    return v;
}

SymbolList generator_symbols(int n) { return indexed("xi", n, 0, 0); }

void check_names(const SymbolList& base) {
    for (auto& s : base)
        if (s.name.rfind("y", 0) == 0 || s.name.rfind("xi", 0) == 0 || s.name == "t")
            throw SchemaError("base coordinate " + s.str() + " clashes with fiber, generator or time names");
}

// Σ_{i} P_i ξ̇_i − W_i ξ_i + Σ_{j,k} P_k C^k_{ji} y_j ξ_i
Poly momentum_pairing(const PolyVec& P, const PolyVec& W, const SymbolList& y,
                      const std::vector<PolyMatrix>& C) {
    const int n = static_cast<int>(P.size());
    SymbolList xi = generator_symbols(n);
    Poly B;
    for (int i = 0; i < n; ++i) {
        B += P[i] * Poly(jet(xi[i], 1)) - W[i] * Poly(xi[i]);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (!C[k][j][i].is_zero()) B += P[k] * C[k][j][i] * Poly(y[j]) * Poly(xi[i]);
    }
    return B;
}

std::string latex_symbol(const Symbol& s) {
    std::size_t cut = s.name.find_first_of("0123456789");
    std::string head = s.name.substr(0, cut);
    std::string idx = cut == std::string::npos ? "" : s.name.substr(cut);
    static const std::set<std::string> greek = {"xi", "alpha", "beta", "gamma", "eta", "zeta", "mu", "nu"};
    if (greek.count(head)) head = "\\" + head;
    std::string body = head;
    if (s.jet == 1) body = "\\dot{" + head + "}";
    else if (s.jet == 2) body = "\\ddot{" + head + "}";
    else if (s.jet == 3) body = "\\dddot{" + head + "}";
    std::string out = body;
    if (!idx.empty()) out += "_{" + idx + "}";
    if (s.jet > 3) out += "^{(" + std::to_string(s.jet) + ")}";
    return out;
}

std::string latex_rational(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return "\\frac{" + q.get_num().get_str() + "}{" + q.get_den().get_str() + "}";
}

std::string latex_poly(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto& [m, c] : p.terms()) {
        Rational a = abs(c);
        std::string body;
        if (m.empty()) body = latex_rational(a);
        else {
            if (a != 1) body = latex_rational(a) + "\\,";
            bool lead = true;
            for (auto& [s, e] : m.factors()) {
                if (!lead) body += " ";
                body += latex_symbol(s);
                if (e > 1) body += "^{" + std::to_string(e) + "}";
                lead = false;
            }
        }
        if (first) out += (c < 0 ? "-" : "") + body;
        else out += (c < 0 ? " - " : " + ") + body;
        first = false;
    }
    return out;
}

}  // namespace

Symbol time_symbol() { return Symbol("t"); }

const Poly& CurvePoly::at(const Symbol& s) const {
    for (std::size_t i = 0; i < chart.size(); ++i)
        if (chart[i] == s) return components.at(i);
    throw MissingSymbol("curve has no component " + s.str());
}

Poly on_curve(const Poly& p, const std::vector<const CurvePoly*>& curves) {
    std::map<Symbol, Poly> sub;
    for (auto& s : p.symbols()) {
        const Poly* comp = nullptr;
        for (auto* c : curves) {
            for (std::size_t i = 0; i < c->chart.size() && !comp; ++i)
                if (c->chart[i].jet == 0 && c->chart[i].name == s.name) comp = &c->components.at(i);
            if (comp) break;
        }
        if (!comp) throw MissingSymbol("no curve component for " + s.str());
        sub[s] = dt_n(*comp, s.jet);
    }
    return subst(p, sub);
}

std::string ELSystem::str() const {
    std::ostringstream o;
    for (std::size_t i = 0; i < residuals.size(); ++i) o << "EL" << i + 1 << ": " << residuals[i].str() << " = 0\n";
    for (std::size_t i = 0; i < admissibility.size(); ++i)
        o << "ADM" << i + 1 << ": " << admissibility[i].str() << " = 0\n";
    o << "B: " << boundary_term.str() << "\n";
    return o.str();
}

std::string ELSystem::latex() const {
    std::ostringstream o;
    o << "\\documentclass{article}\n\\usepackage{amsmath}\n\\begin{document}\n\\begin{align*}\n";
    for (auto& r : residuals) o << latex_poly(r) << " &= 0 \\\\\n";
    for (auto& r : admissibility) o << latex_poly(r) << " &= 0 \\\\\n";
    o << "B &= " << latex_poly(boundary_term) << "\n\\end{align*}\n\\end{document}\n";
    return o.str();
}

SymbolList prolong2_chart(const Algebroid1& A) {
    SymbolList c;
    for (auto& s : A.base) c.push_back(s.with_weight(0));
    for (auto& s : indexed("y", A.n, 0, 1)) c.push_back(s);
    for (auto& s : indexed("y", A.n, 1, 2)) c.push_back(s);
    return c;
}

PolyVec admissibility_residual(const HA2& ha, const CurvePoly& gamma) {
    Comorphism k = kappa2_of(ha);
    const int m = ha.m();
    if (gamma.components.size() != k.target.base.size())
        throw DimensionMismatch("curve needs " + std::to_string(k.target.base.size()) + " components");
    std::map<Symbol, Poly> at;
    for (std::size_t i = 0; i < k.target.base.size(); ++i) at[k.target.base[i]] = gamma.components[i];
    PolyVec r;
    for (int a = 0; a < m; ++a) r.push_back(dt(gamma.components[a]) - subst(k.base_map[m + a], at));
    for (int a = 0; a < m; ++a) r.push_back(dt_n(gamma.components[a], 2) - subst(k.base_map[2 * m + a], at));
    return r;
}

CurvePoly admissible_variation(const HA2& ha, const CurvePoly& gamma, const CurvePoly& a) {
    const int m = ha.m(), n = ha.n;
    PolyVec adm = admissibility_residual(ha, gamma);
    for (std::size_t i = 0; i < adm.size(); ++i)
        if (!adm[i].is_zero()) throw NotAdmissible("admissibility equation " + std::to_string(i + 1) + " leaves " + adm[i].str());
    if (a.components.size() != static_cast<std::size_t>(m + n))
        throw DimensionMismatch("generator needs " + std::to_string(m + n) + " components");
    for (int b = 0; b < m; ++b)
        if (a.components[b] != gamma.components[b]) throw BasePointMismatch("generator and curve have different base paths");

    Comorphism k = kappa2_of(ha);
    std::map<Symbol, Poly> at;
    for (std::size_t i = 0; i < k.target.base.size(); ++i) at[k.target.base[i]] = gamma.components[i];
    PolyVec v;
    for (int order = 0; order <= 2; ++order)
        for (int i = 0; i < n; ++i) v.push_back(dt_n(a.components[m + i], order));
    CurvePoly out;
    out.chart = k.target.fiber;
    for (auto& row : k.matrix) {
        Poly d;
        for (std::size_t c = 0; c < row.size(); ++c)
            if (!row[c].is_zero()) d += subst(row[c], at) * v[c];
        out.components.push_back(d);
    }
    return out;
}

ELSystem el_prolong2(const Algebroid1& A, const Lagrangian& L) {
    if (auto al = is_almost_lie(A); !al) throw NotAlmostLie(al.witness);
    check_names(A.base);
    const int m = A.m(), n = A.n;
    SymbolList y = indexed("y", n, 0, 1);
    std::set<std::string> ynames;
    for (auto& s : y) ynames.insert(s.name);
    std::map<Symbol, Poly> velocity;
    for (int a = 0; a < m; ++a) {
        Poly v;
        for (int i = 0; i < n; ++i) v += A.QL[a][i] * Poly(y[i]);
        velocity[A.base[a]] = v;
    }
    // ẋ = Q y on admissible curves, ẏ = y.d1.
    auto D = [&](const Poly& p) {
        return derive(p, [&](const Symbol& s) -> Poly {
            if (auto it = velocity.find(s); it != velocity.end()) return it->second;
            if (ynames.count(s.name)) {
                if (s.jet + 1 > kMaxJet) throw JetOverflow(s.str());
                return Poly(s.prolonged());
            }
            throw MissingSymbol(s.str() + " is not a coordinate of E^[2]");
        });
    };

    PolyVec P(n), W(n);
    for (int k = 0; k < n; ++k) {
        P[k] = poly_diff(L.L, jet(y[k], 1));
        W[k] = D(P[k]) - poly_diff(L.L, y[k]);
    }
    ELSystem el;
    for (int i = 0; i < n; ++i) {
        Poly r = D(W[i]);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (!A.Qbr[k][j][i].is_zero()) r -= A.Qbr[k][j][i] * Poly(y[j]) * W[k];
        for (int a = 0; a < m; ++a)
            if (!A.QL[a][i].is_zero()) r += A.QL[a][i] * poly_diff(L.L, A.base[a]);
        el.residuals.push_back(r);
    }
    for (int a = 0; a < m; ++a) el.admissibility.push_back(Poly(jet(A.base[a], 1)) - velocity[A.base[a]]);
    el.boundary_term = momentum_pairing(P, W, y, A.Qbr);
    el.generator = generator_symbols(n);
    return el;
}

ELSystem euler_poincare2(const LieAlgebraModel& g, const Lagrangian& l) {
    const int n = g.n;
    SymbolList a = indexed("a", n, 0, 1);
    // C[k][j][i] = [e_j, e_i]^k, so (ad*_a W)_i = Σ C[k][j][i] a^j W_k.
    std::vector<PolyMatrix> C(n, zero_matrix(n, n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            QVec br = g.bracket(unit(n, j), unit(n, i));
            for (int k = 0; k < n; ++k) C[k][j][i] = Poly(br[k]);
        }
    PolyVec P(n), W(n);
    for (int k = 0; k < n; ++k) {
        P[k] = poly_diff(l.L, jet(a[k], 1));
        W[k] = total_derivative(P[k], kMaxJet) - poly_diff(l.L, a[k]);
    }
    ELSystem el;
    for (int i = 0; i < n; ++i) {
        Poly ad;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (!C[k][j][i].is_zero()) ad += C[k][j][i] * Poly(a[j]) * W[k];
        el.residuals.push_back(total_derivative(W[i], kMaxJet) - ad);
    }
    el.boundary_term = momentum_pairing(P, W, a, C);
    el.generator = generator_symbols(n);
    return el;
}

ELSystem standard_el2(const Lagrangian& L, const SymbolList& base) {
    const int n = static_cast<int>(base.size());
    ELSystem el;
    PolyVec P(n), W(n);
    for (int a = 0; a < n; ++a) {
        Symbol x = base[a].with_weight(0);
        P[a] = poly_diff(L.L, jet(x, 2));
        W[a] = total_derivative(P[a], kMaxJet) - poly_diff(L.L, jet(x, 1));
        el.residuals.push_back(total_derivative(W[a], kMaxJet) + poly_diff(L.L, x));
    }
    el.boundary_term = momentum_pairing(P, W, base, std::vector<PolyMatrix>(n, zero_matrix(n, n)));
    el.generator = generator_symbols(n);
    return el;
}

ELSystem reduced_example_el(const Lagrangian& l) {
    const Symbol y1("y1", 0, 1), x2("x2", 0, 2), y2("y2", 0, 2);
    SymbolList xi = generator_symbols(2);  // (a, b)
    // (coordinate, generator index, derivative order) for δy1 = ḃ, δx2 = ä, δy2 = b̈
    struct Entry {
        Symbol q;
        int s;
        int beta;
    };
    const std::vector<Entry> kappa = {{y1, 1, 1}, {x2, 0, 2}, {y2, 1, 2}};

    ELSystem el;
    el.residuals.assign(2, Poly());
    for (auto& e : kappa) {
        Poly f = poly_diff(l.L, e.q);
        Poly Df = f;
        Rational sign = 1;
        for (int r = 0; r < e.beta; ++r) {
            // f ξ^{(β)} = d/dt(Σ_{r<β} (−1)^r D^r f ξ^{(β−1−r)}) + (−1)^β D^β f ξ
            el.boundary_term += Poly(sign) * Df * Poly(jet(xi[e.s], e.beta - 1 - r));
            Df = total_derivative(Df, kMaxJet);
            sign = -sign;
        }
        el.residuals[e.s] += Poly(sign) * Df;
    }
    el.admissibility.push_back(Poly(jet(y1, 1)) - Poly(y2));
    el.generator = xi;
    return el;
}

Poly ibp_difference(const Algebroid1& A, const Lagrangian& L, const CurvePoly& gamma, const CurvePoly& a) {
    const int m = A.m(), n = A.n;
    SymbolList chart = prolong2_chart(A);
    if (gamma.components.size() != chart.size())
        throw DimensionMismatch("curve needs " + std::to_string(chart.size()) + " components");
    for (int i = 0; i < n; ++i) {
        Poly r = gamma.components[m + n + i] - dt(gamma.components[m + i]);
        if (!r.is_zero()) throw NotAdmissible("y" + std::to_string(i + 1) + ".d1 differs from the time derivative: " + r.str());
    }
    HA2 ha = prolong2(A);
    CurvePoly g2{e2_coordinates(ha), gamma.components};
    CurvePoly delta = admissible_variation(ha, g2, a);

    CurvePoly g{chart, gamma.components};
    Poly lhs;
    for (std::size_t c = 0; c < chart.size(); ++c) {
        Poly dL = poly_diff(L.L, chart[c]);
        if (!dL.is_zero()) lhs += on_curve(dL, {&g}) * delta.components[c];
    }

    ELSystem el = el_prolong2(A, L);
    CurvePoly xi{el.generator, PolyVec(a.components.begin() + m, a.components.end())};
    Poly rhs = dt(on_curve(el.boundary_term, {&g, &xi}));
    for (int i = 0; i < n; ++i) rhs += on_curve(el.residuals[i], {&g}) * xi.components[i];
    return lhs - rhs;
}

Rational ibp_check(const Algebroid1& A, const Lagrangian& L, const CurvePoly& gamma, const CurvePoly& a) {
    Rational worst = 0;
    for (auto& [mono, c] : ibp_difference(A, L, gamma, a).terms())
        if (abs(c) > worst) worst = abs(c);
    return worst;
}

Poly symmetry_defect(const Algebroid1& A, const Lagrangian& L, const Section1& s) {
    HA2 ha = prolong2(A);
    SymbolList coords = e2_coordinates(ha);
    SymbolList chart = prolong2_chart(A);
    std::map<Symbol, Symbol> to_e2, back;
    for (std::size_t c = 0; c < chart.size(); ++c) {
        to_e2[chart[c]] = coords[c];
        back[coords[c]] = chart[c];
    }
    VectorField v = alg_lift(ha, s, 0);
    Poly Le = rename(L.L, to_e2);
    Poly d;
    for (std::size_t c = 0; c < coords.size(); ++c)
        if (!v[c].is_zero()) d += v[c] * poly_diff(Le, coords[c]);
    return rename(d, back);
}

Poly conserved_quantity(const Algebroid1& A, const ELSystem& el, const Section1& s, const Poly& f) {
    if (s.size() != el.generator.size()) throw DimensionMismatch("section rank differs from generator count");
    SymbolList y = indexed("y", A.n, 0, 1);
    std::map<Symbol, Poly> velocity;
    for (int a = 0; a < A.m(); ++a) {
        Poly v;
        for (int i = 0; i < A.n; ++i) v += A.QL[a][i] * Poly(y[i]);
        velocity[A.base[a]] = v;
    }
    std::map<Symbol, Poly> sub;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sub[el.generator[i]] = s[i];
        sub[jet(el.generator[i], 1)] = derive(s[i], [&](const Symbol& x) -> Poly {
            if (auto it = velocity.find(x); it != velocity.end()) return it->second;
            throw MissingSymbol("section uses " + x.str() + " outside the base");
        });
    }
    return f - subst(el.boundary_term, sub);
}

// ---------------------------------------------------------------- numerics

CompiledPoly CompiledPoly::make(const Poly& p, const SymbolList& vars) {
    std::map<Symbol, int> idx;
    for (std::size_t i = 0; i < vars.size(); ++i) idx[vars[i]] = static_cast<int>(i);
    CompiledPoly c;
    for (auto& [m, q] : p.terms()) {
        c.coef.push_back(q.get_d());
        std::vector<std::pair<int, int>> f;
        for (auto& [s, e] : m.factors()) {
            auto it = idx.find(s);
            if (it == idx.end()) throw MissingSymbol(s.str() + " is not a state variable");
            f.emplace_back(it->second, e);
        }
        c.factors.push_back(std::move(f));
    }
    return c;
}

double CompiledPoly::eval(const std::vector<double>& v) const {
    double sum = 0;
    for (std::size_t t = 0; t < coef.size(); ++t) {
        double term = coef[t];
        for (auto& [i, e] : factors[t])
            for (int k = 0; k < e; ++k) term *= v[i];
        sum += term;
    }
    return sum;
}

OdeSystem assemble_ode(const PolyVec& equations) {
    std::map<std::string, int> order;
    for (auto& e : equations)
        for (auto& s : e.symbols()) {
            auto [it, fresh] = order.emplace(s.name, s.jet);
            if (!fresh && s.jet > it->second) it->second = s.jet;
        }
    if (order.size() != equations.size())
        throw SchemaError(std::to_string(equations.size()) + " equations for " + std::to_string(order.size()) + " unknowns");

    OdeSystem ode;
    ode.equations = equations;
    for (auto& [name, N] : order) {
        if (N == 0) throw SingularLeadingMatrix(name + " enters without time derivatives");
        for (int j = 0; j < N; ++j) ode.state.emplace_back(name, j);
        ode.top.emplace_back(name, N);
        ode.orders.push_back(N);
    }
    const std::size_t r = equations.size();
    std::map<Symbol, Poly> zero_top;
    for (auto& s : ode.top) zero_top[s] = Poly();
    ode.M = zero_matrix(r, r);
    bool constant = true;
    for (std::size_t e = 0; e < r; ++e) {
        for (std::size_t u = 0; u < r; ++u) {
            ode.M[e][u] = poly_diff(equations[e], ode.top[u]);
            for (auto& s : ode.top)
                if (!poly_diff(ode.M[e][u], s).is_zero())
                    throw SingularLeadingMatrix("equation " + std::to_string(e + 1) + " is not linear in the top jets");
            if (!ode.M[e][u].is_constant()) constant = false;
        }
        ode.rest.push_back(subst(equations[e], zero_top));
    }
    for (auto& row : ode.M) {
        std::vector<CompiledPoly> cr;
        for (auto& p : row) cr.push_back(CompiledPoly::make(p, ode.state));
        ode.M_c.push_back(std::move(cr));
    }
    for (auto& p : ode.rest) ode.rest_c.push_back(CompiledPoly::make(p, ode.state));
    if (constant) {
        QMatrix Mq(r, QVec(r));
        for (std::size_t e = 0; e < r; ++e)
            for (std::size_t u = 0; u < r; ++u) Mq[e][u] = ode.M[e][u].as_constant().value_or(0);
        auto inv = inverse(Mq);
        if (!inv) throw SingularLeadingMatrix("constant leading matrix is singular");
        for (auto& row : *inv) {
            std::vector<double> d;
            for (auto& q : row) d.push_back(q.get_d());
            ode.M_inv.push_back(std::move(d));
        }
    }
    return ode;
}

OdeSystem assemble_ode(const ELSystem& el, const PolyVec& extra) {
    PolyVec eqs = el.residuals;
    for (auto& p : el.admissibility) eqs.push_back(p);
    for (auto& p : extra) eqs.push_back(p);
    return assemble_ode(eqs);
}

std::vector<double> OdeSystem::top_values(const std::vector<double>& y) const {
    const std::size_t r = top.size();
    std::vector<double> b(r);
    for (std::size_t e = 0; e < r; ++e) b[e] = -rest_c[e].eval(y);
    std::vector<double> out(r, 0.0);
    if (!M_inv.empty()) {
        for (std::size_t u = 0; u < r; ++u)
            for (std::size_t e = 0; e < r; ++e) out[u] += M_inv[u][e] * b[e];
        return out;
    }
    Eigen::MatrixXd M(r, r);
    Eigen::VectorXd rhs(r);
    for (std::size_t e = 0; e < r; ++e) {
        rhs(e) = b[e];
        for (std::size_t u = 0; u < r; ++u) M(e, u) = M_c[e][u].eval(y);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw SingularLeadingMatrix("leading matrix is singular at the current state");
    Eigen::VectorXd x = lu.solve(rhs);
    for (std::size_t u = 0; u < r; ++u) out[u] = x(u);
    return out;
}

std::vector<double> OdeSystem::rhs(const std::vector<double>& y) const {
    std::vector<double> topv = top_values(y);
    std::vector<double> d(y.size());
    std::size_t off = 0;
    for (std::size_t u = 0; u < orders.size(); ++u) {
        const int N = orders[u];
        for (int j = 0; j + 1 < N; ++j) d[off + j] = y[off + j + 1];
        d[off + N - 1] = topv[u];
        off += N;
    }
    return d;
}

NumTrajectory integrate_rk4(const OdeSystem& ode, const std::vector<double>& y0, double h, double T) {
    if (!(h > 0) || !(T >= 0)) throw SchemaError("step and horizon must be positive");
    if (y0.size() != ode.state.size())
        throw DimensionMismatch("initial state needs " + std::to_string(ode.state.size()) + " values");
    const long steps = std::lround(T / h);
    if (std::fabs(steps * h - T) > 1e-9 * std::max(1.0, T)) throw SchemaError("horizon is not a multiple of the step");

    NumTrajectory tr;
    tr.h = h;
    tr.names = ode.state;
    tr.t.push_back(0.0);
    tr.states.push_back(y0);
    std::vector<double> y = y0;
    auto axpy = [](const std::vector<double>& a, double s, const std::vector<double>& b) {
        std::vector<double> r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    for (long step = 1; step <= steps; ++step) {
        auto k1 = ode.rhs(y);
        auto k2 = ode.rhs(axpy(y, h / 2, k1));
        auto k3 = ode.rhs(axpy(y, h / 2, k2));
        auto k4 = ode.rhs(axpy(y, h, k3));
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            if (!std::isfinite(y[i]))
                throw NonFiniteState(ode.state[i].str() + " left the finite range at t = " + std::to_string(step * h));
        }
        tr.t.push_back(step * h);
        tr.states.push_back(y);
    }
    return tr;
}

namespace {

// Fourth-order finite-difference derivative of column c at grid index i.
double fd_derivative(const NumTrajectory& tr, std::size_t c, std::size_t i) {
    const std::size_t n = tr.states.size();
    auto f = [&](std::size_t k) { return tr.states[k][c]; };
    const double h = tr.h;
    if (i >= 2 && i + 2 < n) return (f(i - 2) - 8 * f(i - 1) + 8 * f(i + 1) - f(i + 2)) / (12 * h);
    if (i == 0) return (-25 * f(0) + 48 * f(1) - 36 * f(2) + 16 * f(3) - 3 * f(4)) / (12 * h);
    if (i == 1) return (-3 * f(0) - 10 * f(1) + 18 * f(2) - 6 * f(3) + f(4)) / (12 * h);
    if (i == n - 1) return (25 * f(n - 1) - 48 * f(n - 2) + 36 * f(n - 3) - 16 * f(n - 4) + 3 * f(n - 5)) / (12 * h);
    return (3 * f(n - 1) + 10 * f(n - 2) - 18 * f(n - 3) + 6 * f(n - 4) - f(n - 5)) / (12 * h);
}

SymbolList state_and_top(const OdeSystem& ode) {
    SymbolList v = ode.state;
    v.insert(v.end(), ode.top.begin(), ode.top.end());
    return v;
}

}  // namespace

std::vector<std::vector<double>> residual_series(const OdeSystem& ode, const NumTrajectory& traj) {
    if (traj.states.size() < 5) throw SchemaError("residual monitoring needs at least 5 grid points");
    SymbolList vars = state_and_top(ode);
    std::vector<CompiledPoly> eqs;
    for (auto& e : ode.equations) eqs.push_back(CompiledPoly::make(e, vars));
    std::vector<std::size_t> highest;
    std::size_t off = 0;
    for (int N : ode.orders) {
        off += N;
        highest.push_back(off - 1);
    }
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        std::vector<double> v = traj.states[i];
        for (auto c : highest) v.push_back(fd_derivative(traj, c, i));
        std::vector<double> row;
        for (auto& e : eqs) row.push_back(e.eval(v));
        out.push_back(std::move(row));
    }
    return out;
}

double max_abs(const std::vector<std::vector<double>>& rows) {
    double m = 0;
    for (auto& r : rows)
        for (double x : r) m = std::max(m, std::fabs(x));
    return m;
}

std::vector<double> quantity_series(const Poly& q, const OdeSystem& ode, const NumTrajectory& traj) {
    CompiledPoly c = CompiledPoly::make(q, state_and_top(ode));
    std::vector<double> out;
    for (auto& y : traj.states) {
        std::vector<double> v = y;
        for (double x : ode.top_values(y)) v.push_back(x);
        out.push_back(c.eval(v));
    }
    return out;
}

double conservation_check(const Poly& q, const OdeSystem& ode, const NumTrajectory& traj) {
    std::vector<double> s = quantity_series(q, ode, traj);
    double m = 0;
    for (double x : s) m = std::max(m, std::fabs(x - s.front()));
    return m;
}

void write_csv(std::ostream& out, const NumTrajectory& traj, const std::vector<std::vector<double>>& residuals,
               const std::vector<std::vector<double>>& conserved) {
    out << "t";
    for (auto& s : traj.names) out << "," << s.str();
    if (!residuals.empty())
        for (std::size_t j = 0; j < residuals.front().size(); ++j) out << ",residual" << j + 1;
    if (!conserved.empty())
        for (std::size_t j = 0; j < conserved.front().size(); ++j) out << ",conserved" << j + 1;
    out << "\n";
    char buf[40];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << buf;
    };
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        put(traj.t[i]);
        for (double x : traj.states[i]) out << ",", put(x);
        if (i < residuals.size())
            for (double x : residuals[i]) out << ",", put(x);
        if (i < conserved.size())
            for (double x : conserved[i]) out << ",", put(x);
        out << "\n";
    }
}

}  // namespace algforge
