#include "quantact/opcalc.hpp"

#include <doctest.h>

#include <random>

using namespace quantact;

namespace {

FormalFunction monomial_function(const std::vector<std::string>& coords, const std::vector<int>& powers, int order) {
    Expr m(1);
    for (std::size_t k = 0; k < coords.size(); ++k) {
        m *= Expr::symbol(coords[k]).pow(powers[k]);
    }
    FormalFunction f(static_cast<std::size_t>(order) + 1);
    f[0] = m;
    return f;
}

bool same(const FormalFunction& a, const FormalFunction& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!is_zero(a[i] - b[i]).zero) {
            return false;
        }
    }
    return true;
}

FormalSymbol random_symbol(std::mt19937_64& rng, const std::vector<std::string>& coords, int order) {
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> deg(0, 2);
    FormalSymbol s(coords.size(), order);
    for (int n = 0; n <= order; ++n) {
        for (const auto& a : multi_indices(coords.size(), n)) {
            if (coef(rng) % 2 != 0) {
                continue;
            }
            Expr f(coef(rng));
            for (const auto& c : coords) {
                f = f * (Expr::symbol(c).pow(deg(rng)) + Expr(coef(rng)));
            }
            s.add_to(n, a, f);
        }
    }
    return s;
}

}  // namespace

TEST_CASE("trivial quantization applies the pullback") {
    auto tr = translations(1).diffeo(Element::param({Expr::symbol("c")}));
    auto t = to_operator(FormalSymbol::one(1, 2), tr);
    auto out = apply_operator(t, monomial_function({"x"}, {2}, 2));
    CHECK(out[0] == parse("(x-c)^2"));
    CHECK(out[1].is_zero());
}

TEST_CASE("hbar D applied to x^2") {
    FormalSymbol p(1, 1);
    p.set(1, {1}, Expr(1));
    auto out = apply_operator(to_operator(p, Diffeo::identity({"x"})), monomial_function({"x"}, {2}, 1));
    CHECK(out[0].is_zero());
    CHECK(out[1] == parse("2*x/i"));
}

TEST_CASE("composition of translations") {
    auto a = translations(1).diffeo(Element::param({Expr::symbol("a")}));
    auto b = translations(1).diffeo(Element::param({Expr::symbol("b")}));
    auto t = compose(to_operator(FormalSymbol::one(1, 2), a), to_operator(FormalSymbol::one(1, 2), b));
    CHECK(t.symbol == FormalSymbol::one(1, 2));
    CHECK(t.phi.equals(translations(1).diffeo(Element::param({parse("a+b")}))).zero);
}

TEST_CASE("standard product to first order") {
    FormalSymbol p(1, 2);
    p.set(1, {1}, parse("x^2"));
    FormalSymbol k = FormalSymbol::constant(1, 2, parse("exp(i*x)"));
    const auto id = Diffeo::identity({"x"});
    auto q = star(p, id, k, id);
    CHECK(q.get(1, {1}) == parse("x^2*exp(i*x)"));
    CHECK(q.get(1, {0}) == parse("(1/i)*x^2*i*exp(i*x)"));
}

TEST_CASE("phase exponents add along the first map") {
    auto g = galilean_boosts();
    auto p1 = g.diffeo(Element::param({Expr::symbol("v1")}));
    auto p2 = g.diffeo(Element::param({Expr::symbol("v2")}));
    auto s1 = parse("m*v1*x - 1/2*m*v1^2*t");
    auto s2 = parse("m*v2*x - 1/2*m*v2^2*t");
    auto a = FormalSymbol::constant(2, 2, exp(Expr::imag_unit() * s1));
    auto b = FormalSymbol::constant(2, 2, exp(Expr::imag_unit() * s2));
    auto q = star(a, p1, b, p2);
    CHECK(q == FormalSymbol::constant(2, 2, exp(Expr::imag_unit() * (s1 + p1.pullback(s2)))));
}

TEST_CASE("composition is functorial on monomials") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> coords{"x", "y"};
    auto rot = cyclic_rotations(4);
    Diffeo shear({"x", "y"}, {parse("x + y^2"), parse("y")}, {parse("x - y^2"), parse("y")});
    std::vector<Diffeo> maps{Diffeo::identity(coords), rot.diffeo(Element::finite(1)), shear};
    for (int trial = 0; trial < 6; ++trial) {
        auto t1 = to_operator(random_symbol(rng, coords, 3), maps[static_cast<std::size_t>(trial) % 3]);
        auto t2 = to_operator(random_symbol(rng, coords, 3), maps[static_cast<std::size_t>(trial + 1) % 3]);
        auto t12 = compose(t1, t2);
        for (int px = 0; px <= 4; ++px) {
            for (int py = 0; px + py <= 4; ++py) {
                auto psi = monomial_function(coords, {px, py}, 3);
                CHECK(same(apply_operator(t12, psi), apply_operator(t1, apply_operator(t2, psi))));
            }
        }
    }
}

TEST_CASE("order of composition matters by the chain-rule term") {
    FormalSymbol d1(1, 1);
    d1.set(1, {1}, Expr(1));
    auto id = Diffeo::identity({"x"});
    Diffeo sq({"x"}, {parse("2*x")}, {parse("x/2")});
    auto a = compose(to_operator(d1, id), to_operator(FormalSymbol::one(1, 1), sq));
    auto b = compose(to_operator(FormalSymbol::one(1, 1), sq), to_operator(d1, id));
    CHECK(a.symbol.get(1, {1}) == Expr::fraction(1, 2));
    CHECK(b.symbol.get(1, {1}) == Expr(1));
    for (int k = 0; k <= 4; ++k) {
        auto psi = monomial_function({"x"}, {k}, 1);
        CHECK(same(apply_operator(a, psi), apply_operator(to_operator(d1, id), apply_operator(to_operator(FormalSymbol::one(1, 1), sq), psi))));
    }
}

TEST_CASE("mixed associativity of star") {
    std::mt19937_64 rng(5);
    const std::vector<std::string> coords{"x", "y"};
    auto rot = cyclic_rotations(4);
    auto r1 = rot.diffeo(Element::finite(1));
    auto r3 = rot.diffeo(Element::finite(3));
    Diffeo shear({"x", "y"}, {parse("x + y"), parse("y")}, {parse("x - y"), parse("y")});
    auto p = random_symbol(rng, coords, 3);
    auto k = random_symbol(rng, coords, 3);
    auto l = random_symbol(rng, coords, 3);
    auto lhs = star(star(p, r1, k, shear), compose(r1, shear), l, r3);
    auto rhs = star(p, r1, star(k, shear, l, r3), compose(shear, r3));
    CHECK(lhs == rhs);
}

TEST_CASE("star inverse") {
    std::mt19937_64 rng(3);
    FormalSymbol u = FormalSymbol::one(1, 3);
    FormalSymbol w(1, 3);
    w.set(1, {1}, parse("x^2 + 1"));
    w.set(1, {0}, parse("x"));
    w.set(2, {2}, parse("3"));
    u += w;
    auto id = Diffeo::identity({"x"});
    auto inv = star_inverse(u, {"x"});
    CHECK(star(u, id, inv, id) == FormalSymbol::one(1, 3));
    CHECK(star(inv, id, u, id) == FormalSymbol::one(1, 3));
}
