#include "algforge/graded.hpp"

#include <set>

namespace algforge {

void GradedChart::validate() const {
    std::set<std::string> names;
    for (auto& s : base) {
        if (s.weight != 0) throw SchemaError("base symbol " + s.str() + " must have weight 0");
        if (!names.insert(s.str()).second) throw SchemaError("duplicate symbol " + s.str());
    }
    for (auto& s : fiber) {
        if (s.weight < 1 || s.weight > order)
            throw SchemaError("fiber symbol " + s.str() + " has weight outside 1.." + std::to_string(order));
        if (!names.insert(s.str()).second) throw SchemaError("duplicate symbol " + s.str());
    }
}

int GradedChart::count_weight(int w) const {
    int c = 0;
    for (auto& s : fiber) c += s.weight == w;
    return c;
}

BiWeight JetChart::biweight_of(const Symbol& s) const {
    for (std::size_t i = 0; i < symbols.size(); ++i)
        if (symbols[i] == s) return biweights.at(i);
    throw MissingSymbol(s.str() + " is not a coordinate of this chart");
}

Poly WeightField::apply(const Poly& f) const {
    Poly r;
    for (auto& [s, w] : coefficients) {
        if (w == 0) continue;
        r += Poly(Rational(w)) * Poly(s) * poly_diff(f, s);
    }
    return r;
}

WeightField weight_field(const GradedChart& chart) {
    WeightField d;
    for (auto& s : chart.fiber) d.coefficients.emplace_back(s, s.weight);
    return d;
}

WeightField weight_field(const JetChart& chart) {
    WeightField d;
    for (auto& s : chart.symbols)
        if (s.weight) d.coefficients.emplace_back(s, s.weight);
    return d;
}

Symbol xsym(int a, int jet) { return Symbol("x" + std::to_string(a), jet); }
Symbol ysym(int i, int jet) { return Symbol("y" + std::to_string(i), jet); }

SymbolList indexed(const std::string& prefix, int count, int jet, int weight) {
    SymbolList out;
    for (int i = 1; i <= count; ++i)
        out.emplace_back(prefix + std::to_string(i), jet, weight < 0 ? jet : weight);
    return out;
}

JetChart adapted_chart(int m, int k, const std::string& prefix) {
    JetChart c;
    c.origin.base = indexed(prefix, m);
    c.origin.order = 0;
    c.order = k;
    for (int alpha = 0; alpha <= k; ++alpha)
        for (auto& s : indexed(prefix, m, alpha)) c.symbols.push_back(s);
    return c;
}

Poly lift_function(const Poly& f, int alpha, int k) {
    if (alpha < 0 || alpha > k) throw JetOverflow("lift degree " + std::to_string(alpha) + " outside 0.." + std::to_string(k));
    Poly r = f;
    for (int i = 0; i < alpha; ++i) r = total_derivative(r, k);
    return r;
}

PolyVec lift_transition(const PolyVec& phi, int k) {
    PolyVec out;
    out.reserve(phi.size() * (k + 1));
    std::vector<Poly> cur = phi;
    for (int alpha = 0; alpha <= k; ++alpha) {
        for (auto& p : cur) out.push_back(p);
        if (alpha < k)
            for (auto& p : cur) p = total_derivative(p, k);
    }
    return out;
}

GradedChart top_core(const GradedChart& chart) {
    GradedChart c;
    c.base = chart.base;
    c.order = chart.order == 0 ? 0 : 1;
    for (auto& s : chart.fiber)
        if (s.weight == chart.order) c.fiber.push_back(s.with_weight(1));
    return c;
}

GradedChart reduce_chart(const GradedChart& chart, int j) {
    GradedChart c;
    c.base = chart.base;
    c.order = std::min(j, chart.order);
    for (auto& s : chart.fiber)
        if (s.weight <= j) c.fiber.push_back(s);
    return c;
}

std::vector<CoreComponent> core_decomposition(const JetChart& chart) {
    if (!chart.doubly_graded()) throw NotDoublyGraded("chart carries no bi-weights");
    int top = 0;
    for (auto& [l, g] : chart.biweights) {
        if (l != 0 && l != 1) throw NotDoublyGraded("linear leg must have weights 0 or 1");
        if (l == 1) top = std::max(top, g);
    }
    std::vector<CoreComponent> out;
    for (int j = 1; j <= top; ++j) {
        CoreComponent c;
        c.shift = j;
        for (std::size_t i = 0; i < chart.symbols.size(); ++i)
            if (chart.biweights[i] == BiWeight{1, j}) c.symbols.push_back(chart.symbols[i]);
        if (!c.symbols.empty()) out.push_back(std::move(c));
    }
    return out;
}

namespace {

void push(JetChart& c, const SymbolList& syms, BiWeight bw) {
    for (auto& s : syms) {
        c.symbols.push_back(s.with_weight(bw.second));
        c.biweights.push_back(bw);
    }
}

}  // namespace

JetChart t2e1_chart(int m, int n) {
    JetChart c;
    c.origin.base = indexed("x", m);
    c.origin.fiber = indexed("y", n, 0, 1);
    c.origin.order = 1;
    c.order = 2;
    for (int alpha = 0; alpha <= 2; ++alpha) push(c, indexed("x", m, alpha), {0, alpha});
    for (int alpha = 0; alpha <= 2; ++alpha) push(c, indexed("y", n, alpha), {1, alpha});
    return c;
}

JetChart te2_chart(int m, int n, int p) {
    JetChart c;
    c.origin.base = indexed("X", m);
    c.origin.fiber = indexed("Y", n, 0, 1);
    for (auto& z : indexed("Z", p, 0, 2)) c.origin.fiber.push_back(z);
    c.origin.order = 2;
    c.order = 1;
    push(c, indexed("X", m), {0, 0});
    push(c, indexed("Y", n), {0, 1});
    push(c, indexed("Z", p), {0, 2});
    push(c, indexed("X", m, 1), {1, 0});
    push(c, indexed("Y", n, 1), {1, 1});
    push(c, indexed("Z", p, 1), {1, 2});
    return c;
}

JetChart te1_chart(int m, int n) {
    JetChart c;
    c.origin.base = indexed("X", m);
    c.origin.fiber = indexed("Y", n, 0, 1);
    c.origin.order = 1;
    c.order = 1;
    push(c, indexed("X", m), {0, 0});
    push(c, indexed("Y", n), {0, 1});
    push(c, indexed("X", m, 1), {1, 0});
    push(c, indexed("Y", n, 1), {1, 1});
    return c;
}

}  // namespace algforge
