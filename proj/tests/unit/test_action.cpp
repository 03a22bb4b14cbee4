#include "quantact/action.hpp"

#include <doctest.h>

using namespace quantact;

TEST_CASE("built-in actions pass check_action") {
    for (const char* name : {"translations:2", "galilean", "rotations:4", "rotations:2", "reflection", "trivial:4:1",
                             "heisenberg", "multiplicative:1", "quarter-turns"}) {
        auto a = builtin_action(name);
        auto r = check_action(a);
        INFO(r.str());
        CHECK(r.passed());
    }
}

TEST_CASE("translations pass exactly") {
    auto r = check_action(translations(3));
    for (const auto& e : r.entries()) {
        CHECK(e.certificate == Certificate::Exact);
    }
}

TEST_CASE("wrong inverse is reported") {
    VarBinding b{{"x", VarRole::Coordinate}, {"c", VarRole::Parameter}};
    auto x = Expr::symbol("x");
    auto c = Expr::symbol("c");
    Action a("bad", b, ParamGroup({"c"}, {parse("c_l + c_r")}, {-c}, {Expr()}), Diffeo({"x"}, {x + c}, {x + c}));
    auto r = check_action(a);
    CHECK_FALSE(r.passed());
    bool saw = false;
    for (const auto& e : r.entries()) {
        saw = saw || (!e.passed && e.name.rfind("inverse", 0) == 0);
    }
    CHECK(saw);
}

TEST_CASE("compositions") {
    auto g = galilean_boosts();
    auto v1 = Element::param({Expr::symbol("v1")});
    auto v2 = Element::param({Expr::symbol("v2")});
    CHECK(compose(g.diffeo(v1), g.diffeo(v2)).equals(g.diffeo(Element::param({parse("v1+v2")}))).zero);
    auto rot = cyclic_rotations(4);
    Diffeo r = rot.diffeo(Element::finite(1));
    Diffeo acc = Diffeo::identity({"x", "y"});
    for (int k = 0; k < 4; ++k) {
        acc = compose(r, acc);
    }
    CHECK(acc.equals(Diffeo::identity({"x", "y"})).zero);
}

TEST_CASE("jacobian determinants") {
    CHECK(jacobian_det(Diffeo::identity({"x", "y"})) == Expr(1));
    CHECK(jacobian_det(galilean_boosts().diffeo(galilean_boosts().generic(1))) == Expr(1));
    auto x = Expr::symbol("x");
    Diffeo dbl({"x"}, {x * Expr(2)}, {x / Expr(2)});
    CHECK(jacobian_det(dbl) == Expr(2));
    // chain rule for determinants
    Diffeo cube({"x", "y"}, {parse("x + y^3"), parse("y")}, {parse("x - y^3"), parse("y")});
    Diffeo shear({"x", "y"}, {parse("x"), parse("y + x^2")}, {parse("x"), parse("y - x^2")});
    auto lhs = jacobian_det(compose(cube, shear));
    auto rhs = shear.precompose(jacobian_det(cube)) * jacobian_det(shear);
    CHECK(lhs == rhs);
}

TEST_CASE("act_on_symbol is a left action") {
    auto g = galilean_boosts();
    FormalSymbol p(2, 2);
    p.set(0, {0, 0}, parse("t*x^2"));
    p.set(1, {0, 1}, parse("exp(i*x)"));
    auto a = g.diffeo(Element::param({Expr::fraction(1, 3)}));
    auto b = g.diffeo(Element::param({Expr(-2)}));
    CHECK(act_on_symbol(compose(a, b), p) == act_on_symbol(a, act_on_symbol(b, p)));
    auto tr = translations(1).diffeo(Element::param({Expr::symbol("c")}));
    FormalSymbol q(1, 1);
    q.set(1, {1}, parse("x^2"));
    CHECK(act_on_symbol(tr, q).get(1, {1}) == parse("(x-c)^2"));
}

TEST_CASE("action file parsing") {
    const char* text = R"(
name = boosts
dimension = 2
coordinates = t, x
constants = m
group = param
parameters = v
product.v = v_l + v_r
inverse.v = -v
identity.v = 0
forward = t, x + v*t
inverse_map = t, x - v*t
sample = 1/2
sample = -3
volume_preserving = true
)";
    auto a = parse_action(text);
    CHECK(a.samples().size() == 2);
    CHECK(check_action(a).passed());

    const char* cyc = R"(
coordinates = x, y
group = cyclic
order = 4
forward = -y, x
inverse_map = y, -x
)";
    auto c = parse_action(cyc);
    CHECK(c.finite_group().size() == 4);
    CHECK(check_action(c).passed());

    try {
        parse_action("coordinates = x\ngroup = param\nparameters = c\nproduct.c = c_l +\ninverse.c = -c\nidentity.c = 0\n"
                     "forward = x + c\ninverse_map = x - c\n");
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}
