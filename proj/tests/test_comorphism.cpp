#include <doctest.h>

#include "algforge/algebroid.hpp"
#include "algforge/comorphism.hpp"
#include "algforge/higher.hpp"
#include "support.hpp"

using namespace algforge;
using namespace testing_support;

namespace {

VBundle bundle(const std::string& name, const std::string& bp, int m, const std::string& fp, int n) {
    return VBundle{name, indexed(bp, m), indexed(fp, n)};
}

Comorphism random_comorphism(std::mt19937_64& rng, const VBundle& s, const VBundle& t) {
    Comorphism r;
    r.source = s;
    r.target = t;
    for (std::size_t a = 0; a < s.base_dim(); ++a) r.base_map.push_back(random_poly(rng, t.base, 2, 2));
    r.matrix = zero_matrix(t.rank(), s.rank());
    for (auto& row : r.matrix)
        for (auto& e : row) e = random_poly(rng, t.base, 1, 2);
    return r;
}

bool same_data(const Comorphism& a, const Comorphism& b) { return a.base_map == b.base_map && a.matrix == b.matrix; }

}  // namespace

TEST_SUITE("comorphism") {

TEST_CASE("identity is neutral for composition") {
    auto rng = make_rng(31);
    VBundle e1 = bundle("E1", "x", 2, "u", 2), e2 = bundle("E2", "X", 2, "v", 3);
    for (int trial = 0; trial < 10; ++trial) {
        Comorphism r = random_comorphism(rng, e1, e2);
        CHECK(same_data(compose(r, identity_comorphism(e1)), r));
        CHECK(same_data(compose(identity_comorphism(e2), r), r));
    }
}

TEST_CASE("composition is associative") {
    auto rng = make_rng(32);
    VBundle a = bundle("A", "x", 2, "u", 2), b = bundle("B", "X", 1, "v", 2), c = bundle("C", "p", 2, "w", 1),
            d = bundle("D", "q", 1, "z", 2);
    for (int trial = 0; trial < 8; ++trial) {
        Comorphism r1 = random_comorphism(rng, a, b), r2 = random_comorphism(rng, b, c), r3 = random_comorphism(rng, c, d);
        CHECK(same_data(compose(r3, compose(r2, r1)), compose(compose(r3, r2), r1)));
    }
    Comorphism r1 = random_comorphism(rng, a, b);
    CHECK_THROWS_AS(compose(r1, r1), BundleMismatch);
}

TEST_CASE("pointwise application agrees with direct substitution") {
    auto rng = make_rng(33);
    VBundle e1 = bundle("E1", "x", 2, "u", 2), e2 = bundle("E2", "X", 2, "v", 2);
    Comorphism r = random_comorphism(rng, e1, e2);
    for (int trial = 0; trial < 20; ++trial) {
        QVec y = random_qvec(rng, 2), v = random_qvec(rng, 2);
        std::map<Symbol, Rational> at{{e2.base[0], y[0]}, {e2.base[1], y[1]}};
        QVec base_point;
        for (auto& p : r.base_map) base_point.push_back(poly_eval(p, at));
        FiberVector out = apply(r, y, FiberVector{base_point, v});
        auto expect = eval_comorphism(r, at, {{e1.fiber[0], v[0]}, {e1.fiber[1], v[1]}});
        CHECK(out.components == QVec{expect[e2.fiber[0]], expect[e2.fiber[1]]});
        CHECK(out.base_point == y);
    }
    QVec y{1, 2};
    std::map<Symbol, Rational> at{{e2.base[0], Rational(1)}, {e2.base[1], Rational(2)}};
    QVec wrong{poly_eval(r.base_map[0], at) + 1, poly_eval(r.base_map[1], at)};
    CHECK_THROWS_AS(apply(r, y, FiberVector{wrong, {1, 1}}), BasePointMismatch);
    CHECK_THROWS_AS(apply(r, QVec{1}, FiberVector{wrong, {1, 1}}), DimensionMismatch);
}

TEST_CASE("section map is functorial") {
    auto rng = make_rng(34);
    VBundle a = bundle("A", "x", 1, "u", 2), b = bundle("B", "X", 2, "v", 2), c = bundle("C", "p", 1, "w", 2);
    for (int trial = 0; trial < 8; ++trial) {
        Comorphism r1 = random_comorphism(rng, a, b), r2 = random_comorphism(rng, b, c);
        PolyVec s{random_poly(rng, a.base, 2), random_poly(rng, a.base, 2)};
        CHECK(section_map(compose(r2, r1), s) == section_map(r2, section_map(r1, s)));
    }
}

TEST_CASE("dualizing twice returns the same data") {
    auto rng = make_rng(35);
    VBundle e1 = bundle("E1", "x", 2, "u", 2), e2 = bundle("E2", "X", 1, "v", 3);
    Comorphism r = random_comorphism(rng, e1, e2);
    VBMorphism d = dualize(r);
    CHECK(d.matrix == transpose(r.matrix, r.source.rank()));
    Comorphism back = dualize(d);
    CHECK(same_data(back, r));
}

TEST_CASE("ZM morphism check") {
    VBundle e = bundle("E", "x", 1, "u", 2);
    Comorphism id = identity_comorphism(e);
    VBMorphism idm = identity_morphism(e);
    CHECK(zm_morphism_check(idm, idm, id, id).ok);
    VBMorphism twice = idm;
    twice.matrix = {{Poly(2), Poly(0)}, {Poly(0), Poly(2)}};
    CheckResult bad = zm_morphism_check(twice, idm, id, id);
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.witness.empty());
}

TEST_CASE("fine restriction") {
    VBundle e = bundle("E", "x", 1, "u", 3);
    Comorphism r = identity_comorphism(e);
    r.matrix[1][0] = parse_poly("x1");  // u1 ↦ u1 + x1·u2
    Restriction full = fine_restriction(r, full_subbundle(e), full_subbundle(e));
    REQUIRE(full.result.has_value());
    CHECK(same_data(*full.result, r));

    // span(u3) is invariant, span(u1) is not
    SubBundle s3 = span_subbundle(e, full_locus(e.base), {{0, 0, 1}});
    CHECK(fine_restriction(r, s3, s3).result.has_value());
    SubBundle s1 = span_subbundle(e, full_locus(e.base), {{1, 0, 0}});
    Restriction fail = fine_restriction(r, s1, s1);
    CHECK_FALSE(fail.result.has_value());
    CHECK(fail.witness.find("u2") != std::string::npos);
    // on the locus x1 = 0 span(u1) is invariant again
    BaseLocus zero{{}, {{Symbol("x1"), Poly(0)}}};
    CHECK(fine_restriction(r, span_subbundle(e, zero, {{1, 0, 0}}), span_subbundle(e, zero, {{1, 0, 0}})).result.has_value());
    CHECK_THROWS_AS(graph_subbundle(e, full_locus(e.base), {0}, {{Poly(2)}, {Poly(0)}, {Poly(0)}}), SchemaError);
}

TEST_CASE("order reduction of the second-order tangent relation") {
    SymbolList base = indexed("x", 2);
    Comorphism k2 = kappa2_of(tangent_ha2(base));
    Comorphism k1 = reduce_order(k2, 1);
    CHECK(sorted_equations(k1) == sorted_equations(kappa_of(tangent_algebroid(base))));
    CHECK(same_data(reduce_order(k2, 2), k2));
}

TEST_CASE("tangent lift") {
    VBundle e = bundle("E", "x", 1, "u", 2);
    Comorphism id = identity_comorphism(e);
    Comorphism t = tangent_lift(id, 2);
    CHECK(t.source.base.size() == 3);
    CHECK(t.matrix == identity_matrix(6));
    CHECK_FALSE(biweight_violation(t).has_value());

    Comorphism r = id;
    r.matrix[0][1] = parse_poly("x1^2");
    Comorphism t1 = tangent_lift(r, 1);
    // u1.d1 picks up 2 u2 x1 x1.d1 from the derivative of the coefficient
    bool found = false;
    for (auto& eq : t1.equations())
        if (eq.rfind("u1.d1 = ", 0) == 0) found = eq.find("2*u2*x1*x1.d1") != std::string::npos;
    CHECK(found);
    CHECK_FALSE(biweight_violation(t1).has_value());
}

TEST_CASE("bi-weight violations are reported") {
    Comorphism r;
    r.source = VBundle{"S", {Symbol("x")}, {Symbol("u")}};
    r.target = VBundle{"T", {Symbol("X"), Symbol("Y", 0, 1)}, {Symbol("V")}};
    r.base_map = {Poly(Symbol("X"))};
    r.matrix = {{Poly(Symbol("Y", 0, 1))}};
    auto v = biweight_violation(r);
    REQUIRE(v.has_value());
    CHECK(v->find("V") != std::string::npos);
    r.matrix = {{Poly(1)}};
    CHECK_FALSE(biweight_violation(r).has_value());
}

TEST_CASE("renaming round trips and validation catches shape errors") {
    VBundle e = bundle("E", "x", 1, "u", 1);
    Comorphism r = identity_comorphism(e);
    Comorphism q = rename(rename(r, {{Symbol("u1"), Symbol("w")}}), {{Symbol("w"), Symbol("u1")}});
    CHECK(sorted_equations(q) == sorted_equations(r));
    r.matrix = {{Poly(1), Poly(0)}};
    CHECK_THROWS_AS(r.validate(), DimensionMismatch);
}

}
