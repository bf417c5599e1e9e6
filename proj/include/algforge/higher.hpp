#pragma once

#include <optional>
#include <string>
#include <vector>

#include "algforge/algebroid.hpp"
#include "algforge/comorphism.hpp"
#include "algforge/expr.hpp"

namespace algforge {

// Order-2 higher algebroid in normal form. Coordinates on E² are (x^a, y^i, z^μ)
// of weights 0, 1, 2; κ² reads
//   ẋ^a   = Q^a_i y̲^i
//   ẍ^a   = ½ Q^a_{ij} y̲^i y̲^j + Q^a_μ z̲^μ
//   ẋ̲^a   = Q'^a_i y^i
//   ẏ̲^i   = ẏ^i + Q^i_{jk} y̲^j y^k
//   ż̲^μ   = Q^μ_i ÿ^i + Q^μ_{ij} y̲^i ẏ^j + Q^μ_{νi} z̲^ν y^i + ½ Q^μ_{ij,k} y̲^i y̲^j y^k
// with all Q polynomial in x.
struct HA2 {
    SymbolList base;
    int n = 0;  // rank of weight 1
    int p = 0;  // rank of weight 2
    PolyMatrix Qa_i;                             // m × n
    std::vector<PolyMatrix> Qa_ij;               // [a] n × n, symmetric
    PolyMatrix Qa_mu;                            // m × p
    PolyMatrix Qpa_i;                            // m × n
    std::vector<PolyMatrix> Qi_jk;               // [i] n × n
    PolyMatrix Qmu_i;                            // p × n
    std::vector<PolyMatrix> Qmu_ij;              // [μ] n × n
    std::vector<PolyMatrix> Qmu_nui;             // [μ] p × n
    std::vector<std::vector<PolyMatrix>> Qmu_ijk;  // [μ][k] n × n in (i, j), symmetric

    int m() const { return static_cast<int>(base.size()); }
    void validate() const;
    friend bool operator==(const HA2& a, const HA2& b);
};

// All-zero structure functions of the given shape.
HA2 zero_ha2(const SymbolList& base, int n, int p);
// T²M as an HA2 over E¹ = TM: the coordinate shuffle ẋ = y̲, ẍ = z̲, ẋ̲ = y, ẏ̲ = ẏ, ż̲ = ÿ.
HA2 tangent_ha2(const SymbolList& base);

// Coordinate names used by kappa2_of: source (x.dα | y{i}.dα), target (X, Y, Z | X.d1, Y.d1, Z.d1).
struct HA2Layout {
    SymbolList x0, x1, x2, y0, y1, y2;
    SymbolList X, Y, Z, Xd, Yd, Zd;
};
HA2Layout ha2_layout(const HA2& ha);

Comorphism kappa2_of(const HA2& ha);
// Reads the normal-form structure functions back off a comorphism laid out as in
// ha2_layout. Throws NotNormalForm or NotCoreIdentity when the equations do not fit.
HA2 ha2_of(const Comorphism& kappa2, const HA2Layout& layout, const SymbolList& base);

// κ²_M: T²τ_M ⇸ τ_{T²M} with the tangent fiber named xv.dα; the identity in these coordinates.
Comorphism kappa2_M(const SymbolList& base);

// Composition κ¹_E ∘ Tκ restricted to T²E × TE^[2], read off in normal form.
HA2 prolong2(const Algebroid1& A);
// The composed relation before normal-form extraction, already renamed into ha2_layout names.
Comorphism prolong2_relation(const Algebroid1& A);

Algebroid1 reduce_to_order1(const HA2& ha);

// Vector field on E² with components along (X, Y, Z).
using VectorField = PolyVec;

SymbolList e2_coordinates(const HA2& ha);
VectorField alg_lift(const HA2& ha, const Section1& s, int alpha);
VectorField vf_bracket(const VectorField& v, const VectorField& w, const SymbolList& coords);
// Weight of a homogeneous vector field, nullopt when mixed; the zero field reports nullopt too.
std::optional<int> vf_weight(const VectorField& v, const SymbolList& coords);

CheckResult is_skew2(const HA2& ha);
CheckResult al_check2(const HA2& ha);
// Runs al_check2 first, then every lifted-bracket identity over basis pairs and α, β ∈ {0,1,2}.
CheckResult lie_check2(const HA2& ha, int* identities_checked = nullptr);
// det(Q^μ_i) must be a nonzero constant; otherwise each sample point is tried and the
// witness says the result is pointwise only.
CheckResult is_strong(const HA2& ha, const std::vector<QVec>& samples = {});

// Graded subbundle by constant spans: base directions, weight-1 directions, weight-2 directions.
struct GradedSub {
    std::vector<QVec> base_span;
    std::vector<QVec> V1;
    std::vector<QVec> V2;
};

struct SubHAResult {
    CheckResult fine;
    std::optional<HA2> restricted;
};
SubHAResult sub_ha_check(const HA2& ha, const GradedSub& sub);

}  // namespace algforge
