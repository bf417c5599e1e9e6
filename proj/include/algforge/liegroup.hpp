#pragma once

#include <vector>

#include "algforge/algebroid.hpp"
#include "algforge/comorphism.hpp"
#include "algforge/linalg.hpp"

namespace algforge {

using Constants = std::vector<std::vector<std::vector<Rational>>>;  // c[k][i][j]

struct LieAlgebraModel {
    int n = 0;
    Constants c;

    // Throws SchemaError on broken antisymmetry, NotAlmostLie on a Jacobi failure unless admit_non_lie.
    static LieAlgebraModel make(Constants c, bool admit_non_lie = false);
    QVec bracket(const QVec& a, const QVec& b) const;
    CheckResult jacobi() const;
};

LieAlgebraModel so3();
Algebroid1 to_algebroid(const LieAlgebraModel& g);

// Tuples of algebra elements: X = (X_0, ..., X_k) ∈ T^k𝔤, Ȳ = (Y_0, ..., Y_{k-1}) ∈ T^{k-1}𝔤.
using Tuple = std::vector<QVec>;

// Ẏ_l = (l+1) X_{l+1} − Σ_{i+j=l} [X_i, Y_j], l = 0..k−1.
Tuple kappa_g(const LieAlgebraModel& g, int k, const Tuple& Ybar, const Tuple& X);

// The same relation as a comorphism over a point: source fiber X{a}_{i}, target base
// Y{a}_{j}, target fiber Yd{a}_{l}.
Comorphism kappa_g_comorphism(const LieAlgebraModel& g, int k);

// V[i] lists spanning vectors of V_i, i = 0..k−1.
using GradedSubspace = std::vector<std::vector<QVec>>;

// V_0 ⊂ V_i and [V_0, V_i] ⊂ V_j for all j ≥ i.
CheckResult subalgebroid_test(const LieAlgebraModel& g, int k, const GradedSubspace& V);
// The same question answered by fine_restriction of kappa_g_comorphism.
CheckResult subalgebroid_by_restriction(const LieAlgebraModel& g, int k, const GradedSubspace& V);

// E^k = ⊕ 𝔤_i with 𝔤_i in degree i. Elements are flat vectors, blocks in degree order.
struct GradedLieAlgebraModel {
    std::vector<int> dims;
    Constants c;                     // over the flat basis
    std::vector<QMatrix> alpha;      // alpha[i]: dims[i] × dims[0], alpha[0] = identity

    int k() const { return static_cast<int>(dims.size()); }
    int total() const;
    int offset(int degree) const;
    int degree_of(int index) const;
    QVec bracket(const QVec& a, const QVec& b) const;
    // α applied to a T^{k−1}𝔤₀ tuple.
    QVec apply_alpha(const Tuple& t) const;

    static GradedLieAlgebraModel make(std::vector<int> dims, Constants c, std::vector<QMatrix> alpha, bool check = true);
};

// T^{k−1}𝔤 = 𝔤 ⊗ ℝ[t]/(t^k) with α the identity.
GradedLieAlgebraModel truncated_current(const LieAlgebraModel& g, int k);

// Graded antisymmetry, degree compatibility and Jacobi over basis triples.
CheckResult jacobi_graded_check(const GradedLieAlgebraModel& gla);
// α respects brackets of T^{k−1}𝔤₀ (𝔤₀ read off the degree-0 block) and α₀ = id.
CheckResult alpha_homomorphism_check(const GradedLieAlgebraModel& gla);
// Degree-wise surjectivity of α.
CheckResult alpha_surjective(const GradedLieAlgebraModel& gla);

LieAlgebraModel degree0_algebra(const GradedLieAlgebraModel& gla);

// (X̄₀, X̄₁) = ((X_0..X_{k−1}), (X_1, 2X_2, ..., kX_k)).
std::pair<Tuple, Tuple> split_tangent(const Tuple& X);

// α(X̄₁) + [y, α(X̄₀)].
QVec quotient_kappa(const GradedLieAlgebraModel& gla, const QVec& y, const Tuple& X);
// Tα applied to κ^k_{𝔤₀} at a pre-image ỹ ∈ T^{k−1}𝔤₀ of y.
QVec quotient_kappa_lifted(const GradedLieAlgebraModel& gla, const Tuple& ytilde, const Tuple& X);

}  // namespace algforge
