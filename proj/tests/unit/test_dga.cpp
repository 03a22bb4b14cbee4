#include "quantact/dga.hpp"

#include <doctest.h>

#include <random>

using namespace quantact;

namespace {

std::shared_ptr<const Action> shared(Action a) { return std::make_shared<const Action>(std::move(a)); }

/// Random cochain with polynomial coefficients of degree <= 2 in the coordinates.
Cochain random_cochain(const std::shared_ptr<const Action>& action, int degree, int order, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> coef(-3, 3);
    const auto coords = action->coordinates();
    const auto fs = CoefficientBasis::monomials(coords, 2).functions();
    return Cochain::from_function(action, degree, order, [&](const std::vector<Element>&) {
        FormalSymbol s(action->dimension(), order);
        for (int n = 0; n <= order; ++n) {
            for (const auto& a : multi_indices(action->dimension(), n)) {
                Expr f;
                for (const auto& m : fs) {
                    f += m * Expr(coef(rng));
                }
                s.set(n, a, f);
            }
        }
        return s;
    });
}

Cochain unit_system(const std::shared_ptr<const Action>& action, int order) {
    return Cochain::constant(action, 1, FormalSymbol::constant(action->dimension(), order, Expr(1)));
}

}  // namespace

TEST_CASE("d squares to zero over C4") {
    auto c4 = shared(cyclic_rotations(4));
    for (int k = 1; k <= 2; ++k) {
        const auto a = random_cochain(c4, k, 1, 17u + static_cast<unsigned>(k));
        CHECK(d(d(a)).is_zero());
    }
    CHECK(d(random_cochain(c4, 0, 1, 3)).is_zero());
}

TEST_CASE("d of the constant one cochain") {
    auto c4 = shared(cyclic_rotations(4));
    const auto da = d(unit_system(c4, 0));
    for (std::size_t k = 0; k < da.stored_count(); ++k) {
        CHECK(da.stored(k) == FormalSymbol::constant(2, 0, Expr(-1)));
    }
}

TEST_CASE("the unit system is Maurer-Cartan and gauge images stay so") {
    auto c4 = shared(cyclic_rotations(4));
    const auto p0 = unit_system(c4, 2);
    CHECK(is_maurer_cartan(p0).zero);

    FormalSymbol u = FormalSymbol::constant(2, 2, Expr(1));
    u.set(1, {1, 0}, parse("x*y"));
    u.set(1, {0, 0}, parse("x^2 - 3*y"));
    u.set(2, {0, 2}, parse("y"));
    const auto a = gauge_transform(p0, u);
    const auto v = is_maurer_cartan(a);
    CHECK(v.zero);
    CHECK(v.certificate == Certificate::Exact);
    CHECK(gauge_check(a, p0, u).equivalent);

    const auto b = random_cochain(c4, 1, 2, 99);
    CHECK(twisted_d(a, twisted_d(a, b)).is_zero());
    CHECK_THROWS_AS(twisted_d(b, b), NotMaurerCartan);
}

TEST_CASE("galilean phase is a cocycle and its exponential is Maurer-Cartan") {
    auto gal = shared(galilean_boosts());
    const auto s = PhaseCochain::from_template(gal, parse("m*v*x - (1/2)*m*v^2*t"));
    const auto ds = delta_phase(s);
    CHECK(ds.zero_verdict().zero);
    CHECK(ds.zero_verdict().certificate == Certificate::Exact);
    const auto mc = is_maurer_cartan(exp_system(s, 2));
    CHECK(mc.zero);
    CHECK(mc.certificate == Certificate::Exact);
}

TEST_CASE("perturbed phase leaves the predicted defect") {
    auto gal = shared(galilean_boosts());
    const auto s = PhaseCochain::from_template(gal, parse("v*x^2"));
    const auto ds = delta_phase(s);
    CHECK(ds.stored(0) == parse("-2*v_1*v_2*t*x + v_1^2*v_2*t^2"));
    CHECK_FALSE(is_maurer_cartan(exp_system(s, 1)).zero);
}

TEST_CASE("phase from invariants") {
    auto qt = shared(quarter_turns());
    auto c4 = cyclic_rotations(4);
    const auto inv = CoefficientBasis::monomials({"x", "y"}, 2).invariants(c4);
    CHECK(inv.size() == 2);
    const auto s = phase_from_invariants(qt, inv, {parse("2*k"), parse("-k")});
    CHECK(delta_phase(s).zero_verdict().zero);
}

TEST_CASE("gauge equivalence through a coboundary") {
    auto gal = shared(galilean_boosts());
    const auto s = PhaseCochain::from_template(gal, parse("m*v*x - (1/2)*m*v^2*t"));
    const Expr k = parse("t*x^2 + x");
    const auto dk = delta_phase(PhaseCochain::from_function(gal, 0, [&](const std::vector<Element>&) { return k; }));
    const auto a = exp_system(s, 1);
    const auto b = exp_system(s + dk, 1);
    const auto u = FormalSymbol::constant(2, 1, exp(Expr::imag_unit() * k));
    CHECK(gauge_check(a, b, u).equivalent);
    const auto wrong = FormalSymbol::constant(2, 1, exp(Expr::imag_unit() * parse("t*x")));
    CHECK_FALSE(gauge_check(a, b, wrong).equivalent);
}

TEST_CASE("reflection cocycles and vanishing cohomology") {
    auto c2 = shared(reflection_line());
    const auto basis = CoefficientBasis::monomials({"x"}, 2);
    for (int n = 0; n <= 3; ++n) {
        const auto p0 = unit_system(c2, n);
        const auto r = solve_linear(p0, Cochain(c2, 2, n), n, basis);
        int expected = 0;
        for (int a = 0; a <= n; ++a) {
            expected += a % 2 == 0 ? 1 : 2;
        }
        CHECK(static_cast<int>(r.cocycle_basis.size()) == expected);
        CHECK(r.solved);
        CHECK(r.rhs_closed);
    }
    const auto rows = cohomology_dims(c2, basis, unit_system(c2, 3), 3);
    for (const auto& row : rows) {
        CHECK(row.h[1] == 0);
        CHECK(row.h[2] == 0);
    }
}

TEST_CASE("engineered right-hand side is obstructed") {
    auto c2 = shared(reflection_line());
    const auto basis = CoefficientBasis::monomials({"x"}, 2);
    const auto p0 = unit_system(c2, 1);
    Cochain rhs(c2, 2, 1);
    FormalSymbol odd(1, 1);
    odd.set(1, {0}, parse("x"));
    rhs.set_stored(3, odd);  // (sigma, sigma)
    const auto r = solve_linear(p0, rhs, 1, basis);
    CHECK_FALSE(r.solved);
    CHECK_FALSE(r.rhs_closed);
    REQUIRE(r.obstruction);
    CHECK_FALSE(r.obstruction->is_zero());
}

TEST_CASE("order-by-order solving from a gauge-transformed system") {
    auto c4 = shared(cyclic_rotations(4));
    const auto basis = CoefficientBasis::monomials({"x", "y"}, 2);
    FormalSymbol u = FormalSymbol::constant(2, 2, Expr(1));
    u.set(1, {0, 0}, parse("x + 2*y"));
    u.set(1, {1, 0}, Expr(3));
    const auto p = gauge_transform(unit_system(c4, 2), u);
    const auto p0 = p.order_part(0).truncated(2);
    const auto p1 = p.order_part(1).truncated(1);
    const auto r = solve_order(p0, {p1}, 2, basis);
    CHECK(r.rhs_closed);
    CHECK(r.solved);
    REQUIRE(r.solution);
    const auto total = p0 + p1.truncated(2) + *r.solution;
    CHECK(is_maurer_cartan(total).zero);
}

TEST_CASE("basis outside the action's span is rejected") {
    auto c4 = shared(cyclic_rotations(4));
    const CoefficientBasis basis({parse("x")});
    CHECK_FALSE(basis.closure_failures(*c4).empty());
    CHECK_THROWS_AS(cohomology_dims(c4, basis, unit_system(c4, 1), 1), BasisSpanError);
}
