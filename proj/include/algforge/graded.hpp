#pragma once

#include <string>
#include <utility>
#include <vector>

#include "algforge/expr.hpp"

namespace algforge {

// Coordinates (x^a; y^i_w) of a graded bundle of order k.
struct GradedChart {
    SymbolList base;   // weight 0
    SymbolList fiber;  // weights 1..order
    int order = 0;

    void validate() const;
    int count_weight(int w) const;
};

// Bi-weight (linear leg, graded leg) of a coordinate on a double graded chart.
using BiWeight = std::pair<int, int>;

struct JetChart {
    GradedChart origin;
    int order = 0;
    SymbolList symbols;
    std::vector<BiWeight> biweights;  // empty unless doubly graded

    bool doubly_graded() const { return !biweights.empty(); }
    BiWeight biweight_of(const Symbol& s) const;
};

// Δ = Σ w y ∂_y over the fiber coordinates.
struct WeightField {
    std::vector<std::pair<Symbol, int>> coefficients;

    Poly apply(const Poly& f) const;
};

WeightField weight_field(const GradedChart& chart);
WeightField weight_field(const JetChart& chart);

// T^k M with coordinates x^{a,(α)}, weight α; names are `<prefix>1..m`.
JetChart adapted_chart(int m, int k, const std::string& prefix = "x");

// f^{(α)} = D^α f for f in weight-0 symbols.
Poly lift_function(const Poly& f, int alpha, int k);

// Prolongs x'^a = φ^a(x) to T^k M. Output is α-major: entry α·m + a is x'^{a,(α)}.
PolyVec lift_transition(const PolyVec& phi, int k);

GradedChart top_core(const GradedChart& chart);
GradedChart reduce_chart(const GradedChart& chart, int j);

struct CoreComponent {
    int shift = 0;
    SymbolList symbols;
};
// Groups the coordinates of bi-weight (1, j), j ≥ 1.
std::vector<CoreComponent> core_decomposition(const JetChart& chart);

// Canonical doubly graded charts of the order-2 normal form. T²E¹ uses x.dα, y.dα;
// TE² uses base (X, Y, Z) and fiber (X.d1, Y.d1, Z.d1).
JetChart t2e1_chart(int m, int n);
JetChart te2_chart(int m, int n, int p);
// T E for a vector bundle E of rank n (the k = 1 double vector bundle).
JetChart te1_chart(int m, int n);

// Standard coordinate names.
Symbol xsym(int a, int jet = 0);  // x{a}
Symbol ysym(int i, int jet = 0);  // y{i}
SymbolList indexed(const std::string& prefix, int count, int jet = 0, int weight = -1);

}  // namespace algforge
