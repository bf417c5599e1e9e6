#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "algforge/algebroid.hpp"
#include "algforge/expr.hpp"
#include "algforge/higher.hpp"
#include "algforge/liegroup.hpp"

namespace algforge {

struct Lagrangian {
    Poly L;
};

// Time symbol of every CurvePoly.
Symbol time_symbol();

// One polynomial in t per chart coordinate.
struct CurvePoly {
    SymbolList chart;
    PolyVec components;

    const Poly& at(const Symbol& s) const;
};

// Evaluates a polynomial in chart jets along curves: (name, j) ↦ d^j/dt^j of the curve
// component called `name`. Several curves may be passed (γ and the generator a).
Poly on_curve(const Poly& p, const std::vector<const CurvePoly*>& curves);

// Residual equations are polynomials in jet symbols of the unknown curves; each
// residual stands for "= 0".
struct ELSystem {
    PolyVec residuals;
    Poly boundary_term;       // the order-2 momentum pairing, linear in the generator jets
    PolyVec admissibility;
    SymbolList generator;     // jet-0 generator symbols appearing in boundary_term

    std::string str() const;
    std::string latex() const;
};

// Chart of E^[2] used for Lagrangians of prolongations: x^a, y{i}, y{i}.d1.
SymbolList prolong2_chart(const Algebroid1& A);

// ẋ − ρ¹(γ), ẍ − ρ²(γ); γ is given over e2_coordinates(ha).
PolyVec admissibility_residual(const HA2& ha, const CurvePoly& gamma);

// a is given over (base, ξ1..ξn); the result is over e2_coordinates(ha).
CurvePoly admissible_variation(const HA2& ha, const CurvePoly& gamma, const CurvePoly& a);

ELSystem el_prolong2(const Algebroid1& A, const Lagrangian& L);
// l in a{i}, a{i}.d1.
ELSystem euler_poincare2(const LieAlgebraModel& g, const Lagrangian& l);
// L in x{a}, x{a}.d1, x{a}.d2 over the listed base coordinates.
ELSystem standard_el2(const Lagrangian& L, const SymbolList& base);
// l in y1 (weight 1), x2, y2 (weight 2); κ² sends (a, b | ȧ, ḃ | ä, b̈) to (ḃ, ä, b̈).
ELSystem reduced_example_el(const Lagrangian& l);

// ⟨dL(γ), δ_aγ⟩ − ⟨EL(γ), a⟩ − d/dt B(γ, a) along the curves. γ is over prolong2_chart(A)
// and must satisfy ẋ = Q y and y.d1 = ẏ; a is over (base, ξ).
Poly ibp_difference(const Algebroid1& A, const Lagrangian& L, const CurvePoly& gamma, const CurvePoly& a);
Rational ibp_check(const Algebroid1& A, const Lagrangian& L, const CurvePoly& gamma, const CurvePoly& a);

// ⟨dL, s^{[2]}⟩ as a function on E^[2] in prolong2_chart names.
Poly symmetry_defect(const Algebroid1& A, const Lagrangian& L, const Section1& s);
// f − B with the generator jets replaced by s and its total derivatives.
Poly conserved_quantity(const Algebroid1& A, const ELSystem& el, const Section1& s, const Poly& f = Poly());

// ---------------------------------------------------------------- numerics

// Polynomial compiled against a fixed variable order for repeated float evaluation.
struct CompiledPoly {
    std::vector<double> coef;
    std::vector<std::vector<std::pair<int, int>>> factors;  // (variable index, exponent)

    static CompiledPoly make(const Poly& p, const SymbolList& vars);
    double eval(const std::vector<double>& v) const;
};

// Explicit first-order form: top jets solved from M(state)·top = −rest(state).
struct OdeSystem {
    PolyVec equations;
    SymbolList state;  // jets 0..N−1 of each unknown, grouped by unknown
    SymbolList top;    // jet N of each unknown
    std::vector<int> orders;  // N per unknown
    PolyMatrix M;
    PolyVec rest;
    std::vector<std::vector<CompiledPoly>> M_c;
    std::vector<CompiledPoly> rest_c;
    std::vector<std::vector<double>> M_inv;  // filled when M is constant

    // Solved top jets at a state point. Throws SingularLeadingMatrix.
    std::vector<double> top_values(const std::vector<double>& y) const;
    std::vector<double> rhs(const std::vector<double>& y) const;
};

// Unknowns are the names appearing in the equations; one equation per unknown.
OdeSystem assemble_ode(const PolyVec& equations);
OdeSystem assemble_ode(const ELSystem& el, const PolyVec& extra = {});

struct NumTrajectory {
    std::vector<double> t;
    SymbolList names;
    std::vector<std::vector<double>> states;
    double h = 0;
};

NumTrajectory integrate_rk4(const OdeSystem& ode, const std::vector<double>& y0, double h, double T);

// Equations evaluated along the grid with top jets from 5-point finite differences of
// the highest stored jet. Rows follow the grid, columns the equations.
std::vector<std::vector<double>> residual_series(const OdeSystem& ode, const NumTrajectory& traj);
double max_abs(const std::vector<std::vector<double>>& rows);

std::vector<double> quantity_series(const Poly& q, const OdeSystem& ode, const NumTrajectory& traj);
double conservation_check(const Poly& q, const OdeSystem& ode, const NumTrajectory& traj);

// Header t,state...,residual...,conserved...; residual and conserved rows follow the grid.
void write_csv(std::ostream& out, const NumTrajectory& traj, const std::vector<std::vector<double>>& residuals,
               const std::vector<std::vector<double>>& conserved);

}  // namespace algforge
