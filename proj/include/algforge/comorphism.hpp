#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "algforge/expr.hpp"
#include "algforge/linalg.hpp"

namespace algforge {

// A vector bundle in one global chart. Symbol weights carry the graded leg of the
// bi-weight; base symbols sit at linear weight 0, fiber symbols at linear weight 1.
struct VBundle {
    std::string name;
    SymbolList base;
    SymbolList fiber;

    std::size_t base_dim() const { return base.size(); }
    std::size_t rank() const { return fiber.size(); }
    bool same_coordinates(const VBundle& o) const;
};

// r: σ₁ ⇸ σ₂ stored as r̲: M₂ → M₁ (one polynomial per source base coordinate,
// in target base coordinates) and r_y: (E₁)_{r̲(y)} → (E₂)_y.
struct Comorphism {
    VBundle source;
    VBundle target;
    PolyVec base_map;
    PolyMatrix matrix;  // rank(E₂) × rank(E₁), entries over M₂

    void validate() const;
    std::map<Symbol, Poly> base_substitution() const;
    std::vector<std::string> equations() const;
};

// Ordinary vector bundle morphism φ: E → E' over φ̲: M → M'.
struct VBMorphism {
    VBundle source;
    VBundle target;
    PolyVec base_map;   // one per target base coordinate, over source base
    PolyMatrix matrix;  // rank(E') × rank(E), over source base

    void validate() const;
    std::map<Symbol, Poly> base_substitution() const;
};

struct FiberVector {
    QVec base_point;
    QVec components;
};

struct CheckResult {
    bool ok = true;
    std::string witness;
    Poly residual;

    static CheckResult pass() { return {}; }
    static CheckResult fail(std::string w, Poly r = Poly()) { return {false, std::move(w), std::move(r)}; }
    explicit operator bool() const { return ok; }
};

Comorphism identity_comorphism(const VBundle& b);
VBMorphism identity_morphism(const VBundle& b);

FiberVector apply(const Comorphism& r, const QVec& y, const FiberVector& x);
// r_y applied to a fiber vector with polynomial components; base point is implicit.
PolyVec apply_symbolic(const Comorphism& r, const PolyVec& x);
// r̂(s)(y) = r_y(s(r̲(y))) for a section given over M₁.
PolyVec section_map(const Comorphism& r, const PolyVec& s);
Comorphism compose(const Comorphism& r2, const Comorphism& r1);
VBMorphism dualize(const Comorphism& r);
Comorphism dualize(const VBMorphism& phi);
VBMorphism compose(const VBMorphism& psi, const VBMorphism& phi);

CheckResult zm_morphism_check(const VBMorphism& phi1, const VBMorphism& phi2, const Comorphism& r,
                              const Comorphism& rp);

// Base locus in graph form: dependent coordinates are polynomials in the free ones.
struct BaseLocus {
    SymbolList free;
    std::map<Symbol, Poly> dependent;
};

// Fiber subbundle in graph form: column j of `basis` is 1 at row pivots[j] and 0 at the
// other pivot rows. Entries may depend on the free base coordinates.
struct SubBundle {
    BaseLocus locus;
    std::vector<int> pivots;
    PolyMatrix basis;  // rank × pivots.size()
};

BaseLocus full_locus(const SymbolList& base);
BaseLocus linear_locus(const SymbolList& base, const std::vector<QVec>& span);
SubBundle full_subbundle(const VBundle& b);
SubBundle span_subbundle(const VBundle& b, BaseLocus locus, const std::vector<QVec>& span);
SubBundle graph_subbundle(const VBundle& b, BaseLocus locus, std::vector<int> pivots, PolyMatrix basis);

struct Restriction {
    std::optional<Comorphism> result;
    std::string witness;
};

Restriction fine_restriction(const Comorphism& r, const SubBundle& sub1, const SubBundle& sub2);

// Drops coordinates of graded weight above j together with their equations.
Comorphism reduce_order(const Comorphism& r, int j);

// T^k of a comorphism or morphism whose coordinates all have jet 0.
Comorphism tangent_lift(const Comorphism& r, int k);
VBMorphism tangent_lift(const VBMorphism& phi, int k);

Comorphism rename(const Comorphism& r, const std::map<Symbol, Symbol>& names);

// First equation whose monomials do not all share the bi-weight of its left side.
std::optional<std::string> biweight_violation(const Comorphism& r);

}  // namespace algforge
