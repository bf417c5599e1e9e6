#include <doctest.h>

#include "algforge/expr.hpp"
#include "support.hpp"

using namespace algforge;
using namespace testing_support;

TEST_SUITE("expr") {

TEST_CASE("rationals parse in integer, fraction and decimal form") {
    CHECK(parse_rational("3") == Rational(3));
    CHECK(parse_rational("-6/4") == Rational(-3, 2));
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("abc"), ParseError);
    CHECK(to_string(Rational(-3, 2)) == "-3/2");
}

TEST_CASE("symbols carry jet and weight") {
    Symbol s = parse_symbol("y2.d3");
    CHECK(s.name == "y2");
    CHECK(s.jet == 3);
    CHECK(s.weight == 3);
    CHECK(s.prolonged().jet == 4);
    CHECK(s.str() == "y2.d3");
    Symbol w = parse_symbol("z1", [](const std::string&, int j) { return j + 2; });
    CHECK(w.weight == 2);
    // identity ignores weight
    CHECK(Symbol("a", 1, 5) == Symbol("a", 1, 1));
}

TEST_CASE("parsing and printing round trip") {
    Poly p = parse_poly("1/2*x.d1^2 - 3*x*y + 7");
    CHECK(parse_poly(p.str()) == p);
    CHECK(parse_poly("(x + y)^2") == parse_poly("x^2 + 2*x*y + y^2"));
    CHECK(parse_poly("-(x - 1)") == parse_poly("1 - x"));
    CHECK(parse_poly("0").is_zero());
    CHECK_THROWS_AS(parse_poly("x +"), ParseError);
    CHECK_THROWS_AS(parse_poly("x ** 2"), ParseError);
    CHECK_THROWS_AS(parse_poly("(x"), ParseError);
}

TEST_CASE("ring laws on random polynomials") {
    auto rng = make_rng(11);
    SymbolList vars{Symbol("x"), Symbol("y"), Symbol("x", 1)};
    for (int trial = 0; trial < 40; ++trial) {
        Poly a = random_poly(rng, vars, 3), b = random_poly(rng, vars, 3), c = random_poly(rng, vars, 2);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK((a - a).is_zero());
        CHECK(a + (-a) == Poly());
        CHECK(a.pow(2) == a * a);
    }
}

TEST_CASE("derivatives obey Leibniz and substitution commutes with evaluation") {
    auto rng = make_rng(12);
    SymbolList vars{Symbol("x"), Symbol("y")};
    for (int trial = 0; trial < 30; ++trial) {
        Poly a = random_poly(rng, vars, 3), b = random_poly(rng, vars, 3);
        CHECK(poly_diff(a * b, vars[0]) == poly_diff(a, vars[0]) * b + a * poly_diff(b, vars[0]));
        Poly s = random_poly(rng, vars, 2);
        Poly composed = subst(a, {{vars[0], s}});
        std::map<Symbol, Rational> pt{{vars[0], small_rational(rng)}, {vars[1], small_rational(rng)}};
        std::map<Symbol, Rational> inner = pt;
        inner[vars[0]] = poly_eval(s, pt);
        CHECK(poly_eval(composed, pt) == poly_eval(a, inner));
    }
}

TEST_CASE("total derivative") {
    Poly p = parse_poly("x*x.d1");
    CHECK(total_derivative(p, 2) == parse_poly("x.d1^2 + x*x.d2"));
    CHECK_THROWS_AS(total_derivative(p, 1), JetOverflow);
    CHECK(total_derivative(Poly(5), 0).is_zero());
}

TEST_CASE("evaluation reports missing symbols") {
    CHECK_THROWS_AS(poly_eval(parse_poly("x + y"), {{Symbol("x"), Rational(1)}}), MissingSymbol);
    CHECK(poly_eval_double(parse_poly("x^2 - 1/4"), {{Symbol("x"), 0.5}}) == doctest::Approx(0.0));
}

TEST_CASE("weights and splitting") {
    CHECK(weight_of(parse_poly("x.d1*y.d1 + x.d2")) == 2);
    CHECK_FALSE(weight_of(parse_poly("x.d1 + x.d2")).has_value());
    Poly p = parse_poly("a*u + b*u + c*v + 3");
    auto parts = split_by(p, {Symbol("u"), Symbol("v")});
    CHECK(parts.at(Monomial(Symbol("u"))) == parse_poly("a + b"));
    CHECK(parts.at(Monomial(Symbol("v"))) == parse_poly("c"));
    CHECK(parts.at(Monomial()) == Poly(3));
}

TEST_CASE("matrix helpers") {
    PolyMatrix a{{parse_poly("x"), Poly(1)}, {Poly(0), parse_poly("y")}};
    PolyMatrix id = identity_matrix(2);
    CHECK(matmul(a, id) == a);
    CHECK(transpose(transpose(a)) == a);
    CHECK(matvec(a, PolyVec{Poly(1), Poly(2)}) == PolyVec{parse_poly("x + 2"), parse_poly("2*y")});
    CHECK(symbols_of(a).size() == 2);
}

}
