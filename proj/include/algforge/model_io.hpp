#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "algforge/algebroid.hpp"
#include "algforge/higher.hpp"
#include "algforge/liegroup.hpp"

namespace algforge {

struct ChartSpec {
    SymbolList base;
    SymbolList fiber;  // weights as declared
};

struct LieSpec {
    LieAlgebraModel g;
    bool admit_non_lie = false;
    std::optional<GradedSubspace> subspace;  // V0..V_{k−1}
};

struct LagrangianSpec {
    Poly L;
    std::string form;          // prolong2 | ep | standard | reduced, empty when unset
    PolyVec reconstruct;       // extra first-order equations appended to the ODE
    PolyVec conserved;         // monitored quantities
    std::optional<Section1> symmetry;
};

struct CurvesSpec {
    std::map<std::string, double> initial;  // keyed by state symbol, e.g. "a1.d2"
    std::optional<double> h;
    std::optional<double> T;
    std::map<std::string, Poly> exact;      // reference solutions in t
};

// Sections: [chart], [algebroid], [ha2], [liealgebra], [lagrangian], [curves].
struct Model {
    std::optional<ChartSpec> chart;
    std::optional<Algebroid1> algebroid;
    std::optional<HA2> ha2;
    std::optional<LieSpec> liealgebra;
    std::optional<LagrangianSpec> lagrangian;
    std::optional<CurvesSpec> curves;

    const Algebroid1& need_algebroid() const;
    const HA2& need_ha2() const;
    const LieSpec& need_liealgebra() const;
    const LagrangianSpec& need_lagrangian() const;
    const CurvesSpec& need_curves() const;
    const ChartSpec& need_chart() const;
};

// Throws SchemaError on malformed documents or unknown keys.
Model parse_model(std::string_view text, const std::string& origin = "<string>");
Model load_model(const std::string& path);

std::string dump_model(const Model& m);
Model model_of(const Algebroid1& A);
Model model_of(const HA2& ha);

}  // namespace algforge
