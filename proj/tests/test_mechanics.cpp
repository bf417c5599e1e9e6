#include <doctest.h>

#include <cmath>
#include <sstream>

#include "algforge/mechanics.hpp"
#include "support.hpp"

using namespace algforge;
using namespace testing_support;

namespace {

const Symbol t_sym = time_symbol();

Poly dt(const Poly& p) { return poly_diff(p, t_sym); }

// Random admissible curve in prolong2_chart(A) for an algebroid with constant anchor
// Q = 0 or Q = id: y is free, x is integrated from ẋ = Q y.
CurvePoly admissible_curve(std::mt19937_64& rng, const Algebroid1& A, bool tangent, int deg) {
    SymbolList chart = prolong2_chart(A);
    CurvePoly c{chart, {}};
    PolyVec ys;
    for (int i = 0; i < A.n; ++i) ys.push_back(random_curve(rng, {Symbol("_")}, deg).components[0]);
    for (int a = 0; a < A.m(); ++a) {
        // x = c₀ + ∫ y dt for the tangent case
        Poly x(small_rational(rng));
        if (tangent)
            for (auto& [m, q] : ys[a].terms()) {
                int d = m.degree_in(t_sym);
                x += Poly(Monomial(t_sym, d + 1), q / (d + 1));
            }
        c.components.push_back(x);
    }
    for (auto& y : ys) c.components.push_back(y);
    for (auto& y : ys) c.components.push_back(dt(y));
    return c;
}

CurvePoly generator(std::mt19937_64& rng, const Algebroid1& A, const CurvePoly& gamma, int deg) {
    CurvePoly a{{}, {}};
    for (int b = 0; b < A.m(); ++b) {
        a.chart.push_back(A.base[b]);
        a.components.push_back(gamma.components[b]);
    }
    for (int i = 0; i < A.n; ++i) {
        a.chart.push_back(Symbol("xi" + std::to_string(i + 1)));
        a.components.push_back(random_curve(rng, {Symbol("_")}, deg).components[0]);
    }
    return a;
}

std::map<Symbol, Symbol> a_to_y(int n) {
    std::map<Symbol, Symbol> r;
    for (int i = 1; i <= n; ++i)
        for (int j = 0; j <= 8; ++j) r[Symbol("a" + std::to_string(i), j)] = Symbol("y" + std::to_string(i), j);
    return r;
}

std::size_t state_index(const OdeSystem& ode, const Symbol& s) { return index_of(ode.state, s); }

}  // namespace

TEST_SUITE("mechanics") {

TEST_CASE("integration by parts identity, tangent algebroid of the line") {
    auto rng = make_rng(71);
    Algebroid1 A = tangent_algebroid(indexed("x", 1));
    Lagrangian L{parse_poly("1/2*y1.d1^2")};
    for (int trial = 0; trial < 10; ++trial) {
        CurvePoly g = admissible_curve(rng, A, true, 3);
        CurvePoly a = generator(rng, A, g, 3);
        CHECK(ibp_check(A, L, g, a) == 0);
        CHECK(ibp_difference(A, L, g, a).is_zero());
    }
}

TEST_CASE("integration by parts identity, so(3) with a non-quadratic Lagrangian") {
    auto rng = make_rng(72);
    Algebroid1 A = constant_algebroid(so3_constants());
    Lagrangian L{parse_poly("1/2*y1.d1^2 + y2.d1^2 + y1*y2.d1*y3 + y3^3 - y1*y2")};
    for (int trial = 0; trial < 10; ++trial) {
        CurvePoly g = admissible_curve(rng, A, false, 3);
        CurvePoly a = generator(rng, A, g, 3);
        CHECK(ibp_check(A, L, g, a) == 0);
    }
}

TEST_CASE("curves violating admissibility are rejected") {
    Algebroid1 A = tangent_algebroid(indexed("x", 1));
    CurvePoly g{prolong2_chart(A), {parse_poly("t^2"), parse_poly("t"), Poly(1)}};  // ẋ = 2t ≠ y
    CurvePoly a{{Symbol("x1"), Symbol("xi1")}, {parse_poly("t^2"), Poly(1)}};
    CHECK_THROWS_AS(ibp_check(A, Lagrangian{parse_poly("y1.d1^2")}, g, a), NotAdmissible);
}

TEST_CASE("admissible variations of the second tangent bundle are complete lifts") {
    HA2 h = tangent_ha2(indexed("x", 1));
    Poly x = parse_poly("1 + t^3");
    CurvePoly g{e2_coordinates(h), {x, dt(x), dt(dt(x))}};
    for (auto& r : admissibility_residual(h, g)) CHECK(r.is_zero());
    Poly xi = parse_poly("t^2 + t");
    CurvePoly a{{Symbol("x1"), Symbol("xi1")}, {x, xi}};
    CurvePoly v = admissible_variation(h, g, a);
    CHECK(v.components == PolyVec{xi, dt(xi), dt(dt(xi))});

    CurvePoly bad{e2_coordinates(h), {x, dt(x), Poly(0)}};
    CHECK_FALSE(admissibility_residual(h, bad)[1].is_zero());
}

TEST_CASE("Euler-Poincare equals the prolongation equations for so(3)") {
    LieAlgebraModel g = so3();
    Lagrangian l{parse_poly("1/2*a1.d1^2 + 1/2*a2.d1^2 + a3.d1^2 + a1*a2.d1 + a3^2")};
    ELSystem ep = euler_poincare2(g, l);
    auto r = a_to_y(3);
    ELSystem el = el_prolong2(to_algebroid(g), Lagrangian{rename(l.L, r)});
    REQUIRE(ep.residuals.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(rename(ep.residuals[i], r) == el.residuals[i]);
    CHECK(rename(ep.boundary_term, r) == el.boundary_term);
}

TEST_CASE("standard second-order equations") {
    ELSystem s = standard_el2(Lagrangian{parse_poly("1/2*x.d2^2")}, {Symbol("x")});
    REQUIRE(s.residuals.size() == 1);
    CHECK(s.residuals[0] == Poly(Symbol("x", 4)));
    CHECK(s.str().find("x.d4 = 0") != std::string::npos);
    CHECK(s.latex().find("\\begin{align*}") != std::string::npos);
    // x.d1^2/2 − x^2/2 gives the oscillator
    ELSystem o = standard_el2(Lagrangian{parse_poly("1/2*x.d1^2 - 1/2*x^2")}, {Symbol("x")});
    CHECK((o.residuals[0] == parse_poly("x.d2 + x") || o.residuals[0] == parse_poly("-x.d2 - x")));
}

TEST_CASE("reduced example matches the unreduced route") {
    auto rng = make_rng(73);
    SymbolList vars{Symbol("y1", 0, 1), Symbol("x2", 0, 2), Symbol("y2", 0, 2)};
    for (int trial = 0; trial < 5; ++trial) {
        Poly lp = random_poly(rng, vars, 3, 4) + parse_poly("1/2*x2^2 + 1/2*y2^2");
        ELSystem red = reduced_example_el(Lagrangian{lp});
        REQUIRE(red.residuals.size() == 2);
        std::map<Symbol, Poly> lift{{Symbol("y1"), Poly(Symbol("y", 1))}, {Symbol("x2"), Poly(Symbol("x", 2))},
                                    {Symbol("y2"), Poly(Symbol("y", 2))}};
        ELSystem st = standard_el2(Lagrangian{subst(lp, lift)}, {Symbol("x"), Symbol("y")});
        std::map<Symbol, Poly> jets;
        for (int j = 0; j < 10; ++j) {
            jets[Symbol("y1", j)] = Poly(Symbol("y", j + 1));
            jets[Symbol("x2", j)] = Poly(Symbol("x", j + 2));
            jets[Symbol("y2", j)] = Poly(Symbol("y", j + 2));
        }
        CHECK(subst(red.residuals[0], jets) == st.residuals[0]);
        CHECK(subst(red.residuals[1], jets) == st.residuals[1]);
        REQUIRE(red.admissibility.size() == 1);
        CHECK(red.admissibility[0] == parse_poly("y1.d1 - y2"));
    }
}

TEST_CASE("rotational symmetry of the axisymmetric body") {
    Algebroid1 A = to_algebroid(so3());
    Lagrangian l{parse_poly("1/2*a1.d1^2 + 1/2*a2.d1^2 + a3.d1^2")};
    ELSystem ep = euler_poincare2(so3(), l);
    Section1 s{Poly(0), Poly(0), Poly(1)};
    CHECK(symmetry_defect(A, Lagrangian{rename(l.L, a_to_y(3))}, s).is_zero());
    Poly C = conserved_quantity(A, ep, s);
    CHECK(C == parse_poly("a1*a2.d1 - a1.d1*a2 + 2*a3.d2"));
    // e1 is not a symmetry
    CHECK_FALSE(symmetry_defect(A, Lagrangian{rename(l.L, a_to_y(3))}, Section1{Poly(1), Poly(0), Poly(0)}).is_zero());
}

TEST_CASE("ODE assembly") {
    OdeSystem o = assemble_ode(PolyVec{parse_poly("x.d2 + x")});
    CHECK(o.state == SymbolList{Symbol("x"), Symbol("x", 1)});
    CHECK(o.top == SymbolList{Symbol("x", 2)});
    std::vector<double> r = o.rhs({1.0, 0.5});
    CHECK(r[0] == doctest::Approx(0.5));
    CHECK(r[1] == doctest::Approx(-1.0));
    CHECK_THROWS_AS(assemble_ode(PolyVec{parse_poly("x.d1 - y")}), SchemaError);
    CHECK_THROWS_AS(assemble_ode(PolyVec{parse_poly("x.d1^2 - 1")}), SingularLeadingMatrix);
    CHECK_THROWS_AS(assemble_ode(PolyVec{parse_poly("x.d1 + y.d1"), parse_poly("2*x.d1 + 2*y.d1 + x")}), SingularLeadingMatrix);
    // state-dependent leading coefficient
    OdeSystem v = assemble_ode(PolyVec{parse_poly("(1 + x^2)*x.d1 - 1")});
    CHECK(v.top_values({1.0})[0] == doctest::Approx(0.5));
}

TEST_CASE("RK4 on the harmonic oscillator") {
    OdeSystem o = assemble_ode(PolyVec{parse_poly("x.d2 + x")});
    NumTrajectory tr = integrate_rk4(o, {1.0, 0.0}, 1e-3, 1.0);
    CHECK(tr.t.size() == 1001);
    CHECK(std::fabs(tr.states.back()[0] - std::cos(1.0)) < 1e-10);
    CHECK(max_abs(residual_series(o, tr)) < 1e-6);
    CHECK(conservation_check(parse_poly("x^2 + x.d1^2"), o, tr) < 1e-10);
    CHECK_THROWS_AS(integrate_rk4(o, {1.0, 0.0}, 0.3, 1.0), SchemaError);
    CHECK_THROWS_AS(integrate_rk4(o, {1.0}, 0.1, 1.0), DimensionMismatch);
}

TEST_CASE("blow-up is reported") {
    OdeSystem o = assemble_ode(PolyVec{parse_poly("x.d1 - x^2")});
    CHECK_THROWS_AS(integrate_rk4(o, {1.0}, 0.01, 2.0), NonFiniteState);
}

TEST_CASE("abelian second-order EP integrates to the exact cubic") {
    Constants c = zero_constants(1);
    ELSystem e = euler_poincare2(LieAlgebraModel::make(c), Lagrangian{parse_poly("1/2*a1.d1^2")});
    OdeSystem o = assemble_ode(e, {parse_poly("q1.d1 - a1")});
    std::vector<double> y0(o.state.size(), 0.0);
    y0[state_index(o, Symbol("a1", 2))] = 6.0;
    NumTrajectory tr = integrate_rk4(o, y0, 1e-3, 1.0);
    double worst = 0;
    for (std::size_t s = 0; s < tr.t.size(); ++s) {
        double t = tr.t[s];
        worst = std::max(worst, std::fabs(tr.states[s][state_index(o, Symbol("q1"))] - t * t * t));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("so(3) EP residual, conservation and convergence order") {
    ELSystem e = euler_poincare2(so3(), Lagrangian{parse_poly("1/2*a1.d1^2 + 1/2*a2.d1^2 + a3.d1^2")});
    OdeSystem o = assemble_ode(e);
    std::vector<double> y0{0.3, -0.2, 0.5, 1.0, 0.4, -0.7, 0.2, 0.1, 0.3};
    NumTrajectory tr = integrate_rk4(o, y0, 1e-3, 1.0);
    CHECK(max_abs(residual_series(o, tr)) < 1e-6);
    Poly C = conserved_quantity(to_algebroid(so3()), e, {Poly(0), Poly(0), Poly(1)});
    CHECK(conservation_check(C, o, tr) < 1e-6);

    NumTrajectory ref = integrate_rk4(o, y0, 0.1 / 64, 1.0);
    NumTrajectory h1 = integrate_rk4(o, y0, 0.1, 1.0), h2 = integrate_rk4(o, y0, 0.05, 1.0);
    double e1 = 0, e2 = 0;
    for (std::size_t i = 0; i < y0.size(); ++i) {
        e1 = std::max(e1, std::fabs(h1.states.back()[i] - ref.states.back()[i]));
        e2 = std::max(e2, std::fabs(h2.states.back()[i] - ref.states.back()[i]));
    }
    CHECK(e1 / e2 >= 12.0);
    CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("CSV output") {
    OdeSystem o = assemble_ode(PolyVec{parse_poly("x.d1 + x")});
    NumTrajectory tr = integrate_rk4(o, {1.0}, 0.25, 1.0);
    std::ostringstream out;
    std::vector<std::vector<double>> q;
    for (double v : quantity_series(parse_poly("x"), o, tr)) q.push_back({v});
    write_csv(out, tr, residual_series(o, tr), q);
    std::string s = out.str();
    CHECK(s.rfind("t,x,residual1,conserved1\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 6);
}

}
