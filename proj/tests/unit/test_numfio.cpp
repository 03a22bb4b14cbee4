#include "quantact/numfio.hpp"

#include <doctest.h>

#include <cmath>

using namespace quantact;

namespace {

GridSpec grid1(std::size_t m = 128, double L = 8.0, double h = 0.1) { return GridSpec{1, m, L, h}; }

NumericAmplitude amp(const std::string& text, std::vector<std::string> coords = {"x"}, NumericPoint c = {}) {
    return NumericAmplitude{parse(text), std::move(coords), std::move(c)};
}

double rel(const WaveGrid& a, const WaveGrid& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("identity amplitude and Parseval") {
    const auto psi = gaussian(grid1(), {0.3}, 0.7, {2.0});
    const auto out = kn_apply(amp("1"), psi);
    CHECK(rel(out, psi) < 1e-14);
    const auto fx = kn_apply(amp("exp(i*xi1*0)"), psi);
    CHECK(std::abs(fx.norm() - psi.norm()) < 1e-12);
}

TEST_CASE("momentum exponential shifts by grid multiples") {
    const auto spec = grid1();
    const double c = 8 * spec.spacing();
    const Expr f = parse("exp(-(x - 1/2)^2)");
    const auto psi = WaveGrid::sample(spec, f, {"x"});
    const auto shifted = kn_apply(amp("exp(i*xi1*c/hbar)", {"x"}, {{"c", c}}), psi);
    const auto expected = WaveGrid::sample(spec, parse("exp(-(x + c - 1/2)^2)"), {"x"}, {{"c", c}});
    CHECK(rel(shifted, expected) < 1e-12);
}

TEST_CASE("xi acts as hbar D") {
    const auto spec = grid1();
    const auto psi = WaveGrid::sample(spec, parse("exp(-x^2)"), {"x"});
    const auto out = kn_apply(amp("xi1"), psi);
    // hbar (-i) d/dx exp(-x^2) = 2 i hbar x exp(-x^2)
    const auto expected = WaveGrid::sample(spec, parse("2*i*hbar*x*exp(-x^2)"), {"x"});
    CHECK(rel(out, expected) < 1e-10);
}

TEST_CASE("non-separable amplitudes take the row path") {
    const auto spec = grid1(64);
    const auto psi = gaussian(spec, {0.0}, 0.8);
    // x * xi written inseparably through an exponential of x*xi, compared with its expansion
    const auto a = kn_apply(amp("exp(i*x*xi1/10)"), psi);
    const auto b = kn_apply(amp("1 + i*x*xi1/10 - x^2*xi1^2/200 - i*x^3*xi1^3/6000"), psi);
    CHECK(rel(a, b) < 1e-5);
}

TEST_CASE("grid-aligned maps permute exactly") {
    const auto spec = grid1();
    const double c = 5 * spec.spacing();
    const auto psi = gaussian(spec, {0.2}, 0.6);
    const Expr x = Expr::symbol("x");
    const Diffeo shift({"x"}, {x + Expr(Gauss(Rational(5, 8)))}, {x - Expr(Gauss(Rational(5, 8)))});
    FioDiagnostics dg;
    const auto out = fio_apply(amp("1"), shift, psi, &dg);
    CHECK(dg.path == PullbackPath::Permutation);
    CHECK(c == doctest::Approx(0.625));
    const auto expected = gaussian(spec, {0.825}, 0.6);
    CHECK(rel(out, expected) < 1e-12);

    GridSpec sq{2, 32, 6.0, 0.1};
    const auto rot = cyclic_rotations(4);
    const auto f = gaussian(sq, {1.0, -0.5}, 0.7);
    const auto r1 = rot.diffeo(Element::finite(1));
    const auto r2 = rot.diffeo(Element::finite(2));
    FioDiagnostics dr;
    const auto once = fio_apply(amp("1", {"x", "y"}), r1, f, &dr);
    CHECK(dr.path == PullbackPath::Permutation);
    CHECK(std::abs(once.norm() - 1.0) < 1e-12);
    const auto twice = fio_apply(amp("1", {"x", "y"}), r1, once);
    const auto direct = fio_apply(amp("1", {"x", "y"}), compose(r1, r1), f);
    CHECK((twice - direct).norm() == 0.0);
    CHECK((fio_apply(amp("1", {"x", "y"}), r2, f) - direct).norm() == 0.0);
}

TEST_CASE("dilation changes the norm") {
    const auto spec = grid1(256);
    const auto psi = gaussian(spec, {0.0}, 0.5);
    const Expr x = Expr::symbol("x");
    const Diffeo dil({"x"}, {x * Expr(2)}, {x * Expr(Gauss(Rational(1, 2)))});
    FioDiagnostics dg;
    const auto out = fio_apply(amp("1"), dil, psi, &dg);
    CHECK(dg.path == PullbackPath::Direct);
    CHECK(out.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(unitarity_residual(amp("1"), dil, {psi}) > 0.5);
}

TEST_CASE("unitarity of translations and a negative control") {
    const auto spec = grid1();
    std::vector<WaveGrid> tests{gaussian(spec, {0.0}, 0.6), gaussian(spec, {1.0}, 0.4, {3.0}),
                                gaussian(spec, {-1.0}, 0.8, {-1.0})};
    const Expr x = Expr::symbol("x");
    const Diffeo shift({"x"}, {x + Expr(Gauss(Rational(1, 3)))}, {x - Expr(Gauss(Rational(1, 3)))});
    FioDiagnostics dg;
    fio_apply(amp("1"), shift, tests[0], &dg);
    CHECK(dg.path == PullbackPath::Shear);
    CHECK(unitarity_residual(amp("1"), shift, tests) < 1e-12);
    const double res = unitarity_residual(amp("1 + x^2/10"), Diffeo::identity({"x"}), tests);
    CHECK(res > 1e-3);
}

TEST_CASE("galilean system on a small grid") {
    GridSpec spec{2, 128, 8.0, 0.1};
    auto gal = galilean_boosts();
    const auto sys = system_from_template(gal, parse("exp(i*(m*v*x - (1/2)*m*v^2*t))"), {{"m", 1.0}});
    std::vector<WaveGrid> tests{gaussian(spec, {0.0, 0.0}, 0.7), gaussian(spec, {0.5, -0.4}, 0.6, {0.0, 1.5})};
    const auto g = Element::param({Expr(Gauss(Rational(3, 4)))});
    CHECK(unitarity_residual(sys.amplitude(g), sys.map(g), tests) < 1e-10);
    std::vector<std::pair<Element, Element>> pairs{
        {Element::param({Expr(Gauss(Rational(1, 2)))}), Element::param({Expr(Gauss(Rational(-1, 3)))})}};
    CHECK(representation_residual(gal, sys, pairs, tests) < 1e-7);

    const auto bad = system_from_template(gal, parse("exp(i*v*x^2)"));
    CHECK(representation_residual(gal, bad, pairs, tests) > 1e-3);
}

TEST_CASE("standard product") {
    const auto spec = grid1(128, 8.0, 0.1);
    const auto psi = gaussian(spec, {0.2}, 0.7, {1.0});
    auto r = standard_product_residual(amp("1"), amp("x^2 + xi1"), psi);
    CHECK(r.quadrature_error < 1e-12);
    CHECK(r.closed_form_error < 1e-12);
    r = standard_product_residual(amp("xi1"), amp("x"), psi);
    CHECK(r.quadrature_error < 1e-10);
    CHECK(r.closed_form_error < 1e-8);
    r = standard_product_residual(amp("x*xi1^2 + 1"), amp("x^2*xi1 - 2*x"), psi);
    CHECK(r.quadrature_error < 1e-8);
    CHECK(r.closed_form_error < 1e-6);
    const double s = 4 * spec.spacing();
    r = standard_product_residual(amp("exp(i*xi1*a/hbar)", {"x"}, {{"a", s}}),
                                  amp("exp(i*xi1*b/hbar)", {"x"}, {{"b", -2 * s}}), psi);
    CHECK(r.quadrature_error < 1e-12);
    CHECK(std::isnan(r.closed_form_error));
}

TEST_CASE("asymptotic consistency") {
    GridSpec spec{1, 128, 8.0, 0.1};
    const Diffeo id = Diffeo::identity({"x"});
    const Expr psi = parse("exp(-x^2)");
    auto r = asymptotic_consistency({parse("1")}, id, psi, spec, {0.2, 0.1, 0.05}, 1);
    CHECK(r.exact);
    // second-order correction left out by the truncation
    r = asymptotic_consistency({parse("xi1*cos(x)"), Expr(), parse("sin(x)")}, id, psi, spec,
                               {0.2, 0.1, 0.05, 0.025}, 1);
    CHECK_FALSE(r.exact);
    CHECK(r.fit_ok);
    CHECK(r.slope == doctest::Approx(2.0).epsilon(0.05));

    GridSpec sq{2, 64, 8.0, 0.1};
    const Diffeo id2 = Diffeo::identity({"x", "y"});
    const Expr psi2 = parse("exp(-x^2 - y^2)");
    const std::vector<Expr> a{parse("xi1*xi2*cos(x)")};
    const std::vector<double> ladder{0.2, 0.1, 0.05, 0.025};
    const auto right = asymptotic_consistency(a, id2, psi2, sq, ladder, 2, TaylorConvention::MultiFactorial);
    const auto wrong = asymptotic_consistency(a, id2, psi2, sq, ladder, 2, TaylorConvention::TotalFactorial);
    CHECK(right.exact);
    CHECK_FALSE(wrong.exact);
    CHECK(wrong.slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("grid dump round trip") {
    const auto g = gaussian(GridSpec{2, 8, 3.0, 0.25}, {0.1, 0.2}, 0.9, {1.0, 0.0});
    const auto back = WaveGrid::parse_dump(g.dump());
    CHECK(back.spec().points == 8);
    CHECK(back.spec().hbar == 0.25);
    CHECK((back - g).norm() == 0.0);
    CHECK_THROWS_AS(WaveGrid::parse_dump("wave_grid dimension=1\n"), NumericError);
    CHECK_THROWS_AS(WaveGrid(GridSpec{1, 100, 1.0, 0.1}), NumericError);
}
