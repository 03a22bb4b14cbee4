#include "quantact/expr.hpp"

#include <doctest.h>

#include <cmath>

using namespace quantact;

TEST_CASE("expanding a square matches the expanded polynomial") {
    CHECK(parse("x^2 + 2*x + 1") == parse("(x+1)^2"));
    CHECK(parse("(x - y)*(x + y)") == parse("x^2 - y^2"));
    CHECK(parse("-x^2") == -parse("x").pow(2));
}

TEST_CASE("trigonometric identities are exact zeros") {
    auto e = parse("sin(x)^2 + cos(x)^2 - 1");
    CHECK(e.is_zero());
    CHECK(is_zero(e).certificate == Certificate::Exact);
    CHECK(parse("sin(2*x) - 2*sin(x)*cos(x)").is_zero());
    CHECK(parse("exp(x)*exp(-x)") == Expr(1));
    CHECK(parse("exp(2*i*x) - exp(i*x)^2").is_zero());
}

TEST_CASE("decimal literals are exact rationals") {
    CHECK(parse("0.5") == Expr::fraction(1, 2));
    CHECK(parse("1.25*x") == parse("5/4*x"));
}

TEST_CASE("derivative of the boost phase agrees with finite differences") {
    auto phase = parse("exp(i*(m*v*x - 1/2*m*v^2*t))*(x^2 + t)");
    for (const char* var : {"x", "t", "v"}) {
        auto d = diff(phase, var);
        NumericPoint p{{"x", 0.3}, {"t", -0.7}, {"v", 1.1}, {"m", 0.9}};
        const double h = 1e-6;
        auto pp = p, pm = p;
        pp[var] += h;
        pm[var] -= h;
        auto fd = (eval(phase, pp) - eval(phase, pm)) / (2 * h);
        CHECK(std::abs(fd - eval(d, p)) < 1e-6);
    }
}

TEST_CASE("printing round trips through the parser") {
    for (const char* text : {"x^2 - 3/2*x*y + i", "exp(i*x)*(2+3*i) - y^-2", "exp(exp(x)) + 1/(x+1)",
                             "-1/2*i*x + 7", "sin(x)*cos(y)"}) {
        auto e = parse(text);
        INFO(text << " -> " << e.str());
        CHECK(parse(e.str()) == e);
    }
}

TEST_CASE("opaque atoms use the randomized zero test") {
    auto e = parse("1/(x+1) - 1/(1+x)");
    CHECK(e.is_zero());
    auto f = parse("(x+1)*(1/(x+1)) - 1");
    CHECK_FALSE(f.in_canonical_class());
    auto v = is_zero(f);
    CHECK(v.zero);
    CHECK(v.certificate == Certificate::Probabilistic);
    CHECK_FALSE(is_zero(parse("exp(exp(x)) - exp(exp(x))*x")).zero);
}

TEST_CASE("substitution and compiled evaluation") {
    auto e = parse("x^2*exp(i*y) + y");
    auto s = substitute(e, {{"x", parse("t+1")}, {"y", parse("2*t")}});
    CHECK(s == parse("(t+1)^2*exp(2*i*t) + 2*t"));
    CompiledExpr c(e, {"x", "y"});
    std::vector<std::complex<double>> vals{0.5, 0.25};
    CHECK(std::abs(c(vals) - eval(e, {{"x", 0.5}, {"y", 0.25}})) < 1e-14);
    CHECK_THROWS_AS(eval(e, {{"x", 1.0}}), UnboundSymbolError);
}

TEST_CASE("parser rejects malformed input with a position") {
    VarBinding b{{"x", VarRole::Coordinate}};
    CHECK_THROWS_AS(parse("y + x", b), ParseError);
    CHECK_THROWS_AS(parse("x^1.5"), ParseError);
    CHECK_THROWS_AS(parse("log(x)"), ParseError);
    CHECK_THROWS_AS(parse("(x + 1"), ParseError);
    try {
        parse("x + $");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
    CHECK_THROWS_AS(VarBinding().add("i", VarRole::Constant), std::invalid_argument);
}
