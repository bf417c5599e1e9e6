#pragma once

#include <vector>

#include "algforge/comorphism.hpp"
#include "algforge/expr.hpp"

namespace algforge {

// Order-1 general algebroid: anchors Q^a_i (left), Q̃^a_i (right) and bracket
// constants Q^k_{ij}, all polynomial in the base coordinates.
struct Algebroid1 {
    SymbolList base;
    int n = 0;
    PolyMatrix QL;                // m × n
    PolyMatrix QR;                // m × n
    std::vector<PolyMatrix> Qbr;  // Qbr[k][i][j]

    int m() const { return static_cast<int>(base.size()); }
    void validate() const;
    friend bool operator==(const Algebroid1& a, const Algebroid1& b);
};

using Section1 = PolyVec;

Algebroid1 zero_algebroid(const SymbolList& base, int n);
// τ_M over the given coordinates: anchors the identity, bracket the commutator.
Algebroid1 tangent_algebroid(const SymbolList& base);
Algebroid1 tangent_algebroid(int m);
Algebroid1 constant_algebroid(const std::vector<std::vector<std::vector<Rational>>>& c);

Section1 basis_section(int n, int i);
Section1 bracket(const Algebroid1& A, const Section1& a, const Section1& b);
// Σ_a ρ(a)^a ∂f/∂x^a with the left or right anchor.
Poly anchor_apply(const Algebroid1& A, const Section1& a, const Poly& f, bool left = true);
PolyVec anchor_field(const Algebroid1& A, const Section1& a, bool left = true);
Section1 jacobiator(const Algebroid1& A, const Section1& a, const Section1& b, const Section1& c);

CheckResult leibniz_check(const Algebroid1& A, const Poly& f, const Poly& g);
CheckResult leibniz_check(const Algebroid1& A);

// Names of the eight coordinate groups of κ: Tσ ⇸ τ_E. Source is
// (x, ẋ | y, ẏ); target is (X, Y | Ẋ, Ẏ).
struct KappaLayout {
    SymbolList x, xdot, y, ydot;
    SymbolList X, Y, Xdot, Ydot;
};

// x as given, ẋ = x.d1, y{i}, y{i}.d1; X{a}, Y{i}, X{a}.d1, Y{i}.d1.
KappaLayout standard_layout(const Algebroid1& A);
// Tangent directions carried by a `v` suffix (xv, yv, Xv, Yv) so that jets stay free.
KappaLayout velocity_layout(const Algebroid1& A);
// The layout of T^k of a velocity-layout κ.
KappaLayout lifted_layout(const KappaLayout& v, int k);

Comorphism kappa_of(const Algebroid1& A);
Comorphism kappa_of(const Algebroid1& A, const KappaLayout& layout);
Algebroid1 algebroid_of(const Comorphism& kappa);
Algebroid1 algebroid_of(const Comorphism& kappa, const KappaLayout& layout);

Algebroid1 transpose(const Algebroid1& A);
CheckResult is_skew(const Algebroid1& A);
CheckResult is_almost_lie(const Algebroid1& A);
CheckResult is_lie(const Algebroid1& A);

// Tφ as a morphism between total spaces, τ_E → τ_E', written in the target layouts.
VBMorphism tangent_map(const VBMorphism& phi, const KappaLayout& src, const KappaLayout& tgt);
CheckResult morphism_check(const VBMorphism& phi, const Algebroid1& A, const Algebroid1& Ap);
CheckResult algebroidal_relation_check(const Comorphism& r, const Algebroid1& A1, const Algebroid1& A2);

// s^{(k−α)} with levels[β] = the β-th jet slot, each an n-vector over the jets of x.
struct SectionLift {
    int k = 0;
    int alpha = 0;
    std::vector<PolyVec> levels;

    PolyVec flatten() const;
    friend bool operator==(const SectionLift& a, const SectionLift& b) { return a.levels == b.levels; }
};

SectionLift total_lift(const Section1& s, int k);
SectionLift epsilon_shift(const SectionLift& v);
// ((k−α)!/k!) ε^α T^k s
SectionLift epsilon_lift(const Section1& s, int k, int alpha);
SectionLift scale(const SectionLift& v, const Rational& c);

// Right side of the lifted bracket law for [c_α s₁^{(k−α)}, c_β s₂^{(k−β)}], c_γ = k!/(k−γ)!.
SectionLift lifted_bracket(const Algebroid1& A, int k, const Section1& s1, int alpha, const Section1& s2, int beta);

// The algebroid on T^kσ obtained from T^kκ (flips are relabelings in the velocity layout).
Algebroid1 tangent_lift_algebroid(const Algebroid1& A, int k);

Rational factorial(int n);

}  // namespace algforge
