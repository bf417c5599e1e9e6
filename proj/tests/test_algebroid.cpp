#include <doctest.h>

#include "algforge/algebroid.hpp"
#include "algforge/liegroup.hpp"
#include "support.hpp"

using namespace algforge;
using namespace testing_support;

namespace {

// ρ(e1) = x ∂x, ρ(e2) = ∂x on ℝ with [e1, e2] = −e2.
Algebroid1 affine_action() {
    Algebroid1 B = zero_algebroid(indexed("x", 1), 2);
    Poly x(Symbol("x1"));
    B.QL[0][0] = B.QR[0][0] = x;
    B.QL[0][1] = B.QR[0][1] = Poly(1);
    B.Qbr[1][0][1] = Poly(-1);
    B.Qbr[1][1][0] = Poly(1);
    return B;
}

}  // namespace

TEST_SUITE("algebroid") {

TEST_CASE("kappa round trip on random algebroids") {
    auto rng = make_rng(41);
    for (int trial = 0; trial < 15; ++trial) {
        Algebroid1 A = random_algebroid(rng, uniform(rng, 1, 3), uniform(rng, 1, 3), 2);
        CHECK(algebroid_of(kappa_of(A)) == A);
        CHECK(algebroid_of(kappa_of(A, velocity_layout(A)), velocity_layout(A)) == A);
    }
}

TEST_CASE("kappa of the tangent algebroid is the flip") {
    Comorphism k = kappa_of(tangent_algebroid(1));
    std::vector<std::string> expect{"X1.d1 = y1", "Y1.d1 = y1.d1", "x1 = X1", "x1.d1 = Y1"};
    CHECK(sorted_equations(k) == expect);
    CHECK_FALSE(biweight_violation(k).has_value());
}

TEST_CASE("bracket on basis sections reads off the structure constants") {
    Constants c = so3_constants();
    Algebroid1 A = constant_algebroid(c);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            QVec expect = bracket_oracle(c, unit(3, i), unit(3, j));
            Section1 got = bracket(A, basis_section(3, i), basis_section(3, j));
            for (int k = 0; k < 3; ++k) CHECK(got[k] == Poly(expect[k]));
        }
}

TEST_CASE("axioms of standard examples") {
    CHECK(is_lie(tangent_algebroid(3)).ok);
    CHECK(is_lie(constant_algebroid(so3_constants())).ok);
    CHECK(is_lie(affine_action()).ok);
    CHECK(leibniz_check(affine_action()).ok);

    CheckResult p = is_lie(constant_algebroid(perturbed_so3_constants()));
    CHECK_FALSE(p.ok);
    JacobiWitness w = jacobi_oracle(perturbed_so3_constants());
    REQUIRE(w.found());
    CHECK(p.witness.find("component " + std::to_string(w.comp + 1)) != std::string::npos);
    CHECK(p.witness.find(w.value.get_str()) != std::string::npos);
}

TEST_CASE("Jacobiator agrees with the brute-force oracle on random constants") {
    auto rng = make_rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        Constants c = zero_constants(3);
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    c[k][i][j] = small_rational(rng);
                    c[k][j][i] = -c[k][i][j];
                }
        Algebroid1 A = constant_algebroid(c);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    Section1 J = jacobiator(A, basis_section(3, i), basis_section(3, j), basis_section(3, k));
                    QVec ei = unit(3, i), ej = unit(3, j), ek = unit(3, k);
                    QVec s = qvec_add(qvec_add(bracket_oracle(c, bracket_oracle(c, ei, ej), ek),
                                               bracket_oracle(c, bracket_oracle(c, ej, ek), ei)),
                                      bracket_oracle(c, bracket_oracle(c, ek, ei), ej));
                    for (int q = 0; q < 3; ++q) CHECK(J[q] == Poly(s[q]));
                }
        CHECK(is_lie(A).ok == !jacobi_oracle(c).found());
    }
}

TEST_CASE("skew symmetry and transpose") {
    auto rng = make_rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        Algebroid1 A = random_algebroid(rng, 2, 2, 1);
        CHECK(transpose(transpose(A)) == A);
    }
    CHECK(is_skew(tangent_algebroid(2)).ok);
    Constants c = zero_constants(2);
    c[0][0][1] = 1;
    CheckResult s = is_skew(constant_algebroid(c));
    CHECK_FALSE(s.ok);
    CHECK_FALSE(s.witness.empty());
}

TEST_CASE("anchor and Leibniz on the affine action") {
    Algebroid1 B = affine_action();
    Poly f = parse_poly("x1^2");
    CHECK(anchor_apply(B, basis_section(2, 0), f) == parse_poly("2*x1^2"));
    CHECK(anchor_apply(B, basis_section(2, 1), f) == parse_poly("2*x1"));
    Section1 a{Poly(1), Poly(0)}, b{Poly(0), parse_poly("x1")};
    // [e1, x e2] = x [e1, e2] + ρ(e1)(x) e2 = −x e2 + x e2 = 0
    Section1 br = bracket(B, a, b);
    CHECK(br[0].is_zero());
    CHECK(br[1].is_zero());
    CHECK(leibniz_check(B, parse_poly("x1"), parse_poly("x1^3 + 1")).ok);
}

TEST_CASE("morphism and relation checks") {
    Algebroid1 A = constant_algebroid(so3_constants());
    VBundle e{"E", {}, indexed("y", 3)};
    VBMorphism id = identity_morphism(e);
    CHECK(morphism_check(id, A, A).ok);
    CHECK(algebroidal_relation_check(identity_comorphism(e), A, A).ok);
    // scaling by 2 is not a Lie algebra map of so(3)
    VBMorphism two = id;
    for (int i = 0; i < 3; ++i) two.matrix[i][i] = Poly(2);
    CHECK_FALSE(morphism_check(two, A, A).ok);
}

TEST_CASE("epsilon lifts") {
    Section1 s{parse_poly("x1^2"), Poly(3)};
    SectionLift v = epsilon_lift(s, 2, 0);
    CHECK(v.levels[0] == s);
    CHECK(v.levels[1][0] == parse_poly("2*x1*x1.d1"));
    SectionLift e1 = epsilon_lift(s, 2, 1);
    // ((2−1)!/2!) ε T²s: level 1 is ½·1·s, level 2 is ½·2·Ds
    CHECK(e1.levels[0][0].is_zero());
    CHECK(e1.levels[1][0] == parse_poly("1/2*x1^2"));
    CHECK(e1.levels[2][0] == parse_poly("2*x1*x1.d1"));
    SectionLift e2 = epsilon_lift(s, 2, 2);
    CHECK(e2.levels[2] == s);
    CHECK_THROWS_AS(epsilon_lift(s, 2, 3), JetOverflow);
}

TEST_CASE("lifted bracket law on the affine action at k = 2") {
    Algebroid1 B = affine_action();
    Algebroid1 TB = tangent_lift_algebroid(B, 2);
    CHECK(is_lie(TB).ok);
    std::vector<Section1> secs{basis_section(2, 0), basis_section(2, 1), Section1{parse_poly("x1"), Poly(1)}};
    for (auto& s1 : secs)
        for (auto& s2 : secs)
            for (int a = 0; a <= 2; ++a)
                for (int b = 0; b <= 2; ++b) {
                    Rational ca = factorial(2) / factorial(2 - a), cb = factorial(2) / factorial(2 - b);
                    PolyVec l = bracket(TB, scale(epsilon_lift(s1, 2, a), ca).flatten(), scale(epsilon_lift(s2, 2, b), cb).flatten());
                    CHECK(l == lifted_bracket(B, 2, s1, a, s2, b).flatten());
                }
}

}
