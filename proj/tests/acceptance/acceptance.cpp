// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any criterion fails.

#include "support/oracles.hpp"

#include "quantact/dga.hpp"
#include "quantact/numfio.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace quantact;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes;
};

std::shared_ptr<const Action> shared(Action a) { return std::make_shared<const Action>(std::move(a)); }

Cochain unit_system(const std::shared_ptr<const Action>& action, int order) {
    return Cochain::constant(action, 1, FormalSymbol::one(action->dimension(), order));
}

std::string sci(double v) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(2) << v;
    return s.str();
}

bool exact_zero(const Cochain& c) {
    const auto v = c.zero_verdict();
    return v.zero && v.certificate == Certificate::Exact;
}

Rational small_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-5, 5);
    std::uniform_int_distribution<int> den(1, 4);
    int n = 0;
    while (n == 0) {
        n = num(rng);
    }
    return Rational(n, den(rng));
}

Outcome dga_axioms() {
    const auto start = std::chrono::steady_clock::now();
    auto c4 = shared(cyclic_rotations(4));
    const auto fs = CoefficientBasis::monomials(c4->coordinates(), 1).functions();
    std::mt19937_64 rng(20240611);
    std::vector<Cochain> cs;
    for (int k = 0; k < 20; ++k) {
        cs.push_back(oracle::random_cochain(c4, k % 2 == 0 ? 1 : 2, 3, fs, rng, 1));
    }
    int d2 = 0;
    int leibniz = 0;
    int assoc = 0;
    for (const auto& a : cs) {
        d2 += exact_zero(d(d(a))) ? 1 : 0;
    }
    for (std::size_t i = 0; i + 1 < cs.size(); i += 2) {
        const auto& a = cs[i];
        const auto& b = cs[i + 1];
        const auto lhs = d(star_graded(a, b));
        auto rhs = star_graded(d(a), b);
        const auto adb = star_graded(a, d(b));
        rhs = a.degree() % 2 == 0 ? rhs + adb : rhs - adb;
        leibniz += exact_zero(lhs - rhs) ? 1 : 0;
    }
    // triples of degree-1 cochains
    for (std::size_t i = 0; i + 4 < cs.size(); i += 4) {
        const auto& a = cs[i];
        const auto& b = cs[i + 2];
        const auto& c = cs[i + 4];
        assoc += exact_zero(star_graded(star_graded(a, b), c) - star_graded(a, star_graded(b, c))) ? 1 : 0;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Outcome o;
    o.pass = d2 == 20 && leibniz == 10 && assoc == 4 && secs <= 60.0;
    std::ostringstream s;
    s << "d^2=0 " << d2 << "/20, Leibniz " << leibniz << "/10, associativity " << assoc << "/4, "
      << std::fixed << std::setprecision(1) << secs << " s";
    o.detail = s.str();
    return o;
}

/// Symbolic T_{g1} T_{g2} psi = T_{g1 g2} psi on monomials of degree <= 4, for every pair.
bool represents(const Cochain& a) {
    const auto& act = a.action();
    const auto coords = act.coordinates();
    const auto monos = CoefficientBasis::monomials(coords, 4).functions();
    const auto elements = act.elements();
    for (const auto& g1 : elements) {
        const auto t1 = to_operator(a.value({g1}), act.diffeo(g1));
        for (const auto& g2 : elements) {
            const auto t2 = to_operator(a.value({g2}), act.diffeo(g2));
            const auto g12 = act.multiply(g1, g2);
            const auto t12 = to_operator(a.value({g12}), act.diffeo(g12));
            for (const auto& m : monos) {
                FormalFunction psi(static_cast<std::size_t>(a.order() + 1));
                psi[0] = m;
                const auto lhs = apply_operator(t1, apply_operator(t2, psi));
                const auto rhs = apply_operator(t12, psi);
                if (lhs.size() != rhs.size()) {
                    return false;
                }
                for (std::size_t k = 0; k < lhs.size(); ++k) {
                    if (!(lhs[k] - rhs[k]).is_zero()) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

Outcome mc_iff_representation() {
    auto c4 = shared(cyclic_rotations(4));
    const int order = 2;
    const auto fs = CoefficientBasis::monomials(c4->coordinates(), 1).functions();
    std::mt19937_64 rng(77);
    int agree = 0;
    int mc_count = 0;
    for (int k = 0; k < 10; ++k) {
        FormalSymbol u = FormalSymbol::one(2, order);
        u += oracle::random_symbol(2, order, fs, rng, 2).multiply_hbar();
        auto a = gauge_transform(unit_system(c4, order), u);
        if (k >= 5) {
            FormalSymbol bump(2, order);
            bump.set(1, {1, 0}, fs[static_cast<std::size_t>(k % 3)] + Expr(1));
            const std::size_t slot = 1 + static_cast<std::size_t>(k % 3);
            a.set_stored(slot, a.stored(slot) + bump);
        }
        const bool mc = exact_zero(mc_residual(a));
        mc_count += mc ? 1 : 0;
        agree += mc == represents(a) ? 1 : 0;
    }
    Outcome o;
    o.pass = agree == 10 && mc_count == 5;
    o.detail = std::to_string(agree) + "/10 agree, " + std::to_string(mc_count) + " MC";
    return o;
}

Outcome phase_cocycle_equivalence() {
    auto gal = shared(galilean_boosts());
    Outcome o;
    const auto s = PhaseCochain::from_template(gal, parse("m*v*x - (1/2)*m*v^2*t"));
    const auto ds = delta_phase(s).zero_verdict();
    const auto mc = is_maurer_cartan(exp_system(s, 2));
    const bool good = ds.zero && mc.zero && ds.certificate == Certificate::Exact && mc.certificate == Certificate::Exact;

    const auto sp = PhaseCochain::from_template(gal, parse("v*x^2"));
    const auto dsp = delta_phase(sp);
    const Expr predicted = parse("-2*v_1*v_2*t*x + v_1^2*v_2*t^2");
    const bool residual_matches = (dsp.stored(0) - predicted).is_zero() || (dsp.stored(0) + predicted).is_zero();
    // exponent defect: a(g1) * a(g2) - a(g1 g2) = e^{i S(g1 g2)} (e^{i dS} - 1)
    const auto a = exp_system(sp, 1);
    const auto res = mc_residual(a);
    const auto g1 = gal->generic(1);
    const auto g2 = gal->generic(2);
    const Expr i = Expr::imag_unit();
    const Expr expected = exp(i * sp.value({gal->multiply(g1, g2)})) * (exp(i * dsp.stored(0)) - Expr(1));
    const bool defect = (res.stored(0).get(0, {0, 0}) - expected).is_zero();
    const auto bad = is_maurer_cartan(a);
    const auto dbad = dsp.zero_verdict();
    const bool perturbed_fails = !bad.zero && bad.certificate == Certificate::Exact && !dbad.zero &&
                                 dbad.certificate == Certificate::Exact;
    o.pass = good && residual_matches && defect && perturbed_fails;
    o.detail = std::string("galilean ") + (good ? "closed+MC" : "FAILED") + ", v*x^2 " +
               (perturbed_fails ? "not closed+not MC" : "UNEXPECTED") + ", predicted residual " +
               (residual_matches ? "matches" : "differs") + ", exponent defect " + (defect ? "matches" : "differs");
    return o;
}

Outcome invariant_phases() {
    auto qt = shared(quarter_turns());
    const auto inv = CoefficientBasis::monomials({"x", "y"}, 2).invariants(cyclic_rotations(4));
    std::mt19937_64 rng(5);
    const Expr k = Expr::symbol("k");
    std::vector<Expr> chars;
    for (std::size_t j = 0; j < inv.size(); ++j) {
        chars.push_back(Expr(Gauss(small_rational(rng))) * k);
    }
    const auto s = phase_from_invariants(qt, inv, chars);
    const auto ds = delta_phase(s).zero_verdict();
    const auto mc = is_maurer_cartan(exp_system(s, 2));
    Outcome o;
    bool spans = inv.size() == 2;
    o.pass = spans && ds.zero && ds.certificate == Certificate::Exact && mc.zero && mc.certificate == Certificate::Exact;
    o.detail = std::to_string(inv.size()) + " invariants, delta S " + (ds.zero ? "= 0" : "!= 0") + " (" +
               to_string(ds.certificate) + "), exp system " + (mc.zero ? "MC" : "not MC") + " (" +
               to_string(mc.certificate) + ")";
    return o;
}

Outcome gauge_equivalence() {
    auto gal = shared(galilean_boosts());
    const auto s = PhaseCochain::from_template(gal, parse("m*v*x - (1/2)*m*v^2*t"));
    const auto monos = CoefficientBasis::monomials({"t", "x"}, 2).functions();
    int ok = 0;
    int controls = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(seed);
        Expr kf;
        for (const auto& m : monos) {
            kf += m * Expr(Gauss(small_rational(rng)));
        }
        const auto dk =
            delta_phase(PhaseCochain::from_function(gal, 0, [&](const std::vector<Element>&) { return kf; }));
        const auto a = exp_system(s, 2);
        const auto b = exp_system(s + dk, 2);
        const Expr i = Expr::imag_unit();
        const auto v = gauge_check(a, b, FormalSymbol::constant(2, 2, exp(i * kf)));
        ok += v.equivalent && v.certificate == Certificate::Exact ? 1 : 0;
        const auto w = gauge_check(a, b, FormalSymbol::constant(2, 2, exp(i * (kf + monos[2]))));
        controls += w.equivalent ? 0 : 1;
    }
    Outcome o;
    o.pass = ok == 10;
    o.detail = std::to_string(ok) + "/10 seeds exact, wrong gauge rejected " + std::to_string(controls) + "/10";
    return o;
}

struct RecursionTally {
    int runs = 0;
    int steps = 0;
    int closed = 0;
    int solved = 0;
    int mc = 0;
};

/// Solves orders 1..n_max from P^0, adding a random cocycle at every order.
void recursion_run(const std::shared_ptr<const Action>& action, const CoefficientBasis& basis, int n_max,
                   std::uint64_t seed, RecursionTally& t) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-2, 2);
    const auto p0 = unit_system(action, n_max);
    std::vector<Cochain> below;
    bool all = true;
    for (int n = 1; n <= n_max; ++n) {
        const auto r = solve_order(p0, below, n, basis);
        ++t.steps;
        t.closed += r.rhs_closed ? 1 : 0;
        t.solved += r.solved ? 1 : 0;
        if (!r.solved || !r.solution) {
            all = false;
            break;
        }
        Cochain pn = *r.solution;
        for (const auto& z : r.cocycle_basis) {
            pn = pn + z.scaled(Expr(coef(rng)));
        }
        below.push_back(pn);
    }
    ++t.runs;
    if (all) {
        Cochain total = p0;
        for (const auto& p : below) {
            total = total + p.truncated(n_max);
        }
        t.mc += exact_zero(mc_residual(total)) ? 1 : 0;
    }
}

/// Re-solves every order of a gauge-transformed system from its true lower orders.
void gauge_run(const std::shared_ptr<const Action>& action, const CoefficientBasis& basis, const FormalSymbol& u,
               RecursionTally& t) {
    const int n_max = u.order();
    const auto p = gauge_transform(unit_system(action, n_max), u);
    const auto p0 = p.order_part(0);
    std::vector<Cochain> below;
    bool all = true;
    for (int n = 1; n <= n_max; ++n) {
        const auto r = solve_order(p0, below, n, basis);
        ++t.steps;
        t.closed += r.rhs_closed ? 1 : 0;
        t.solved += r.solved ? 1 : 0;
        if (!r.solved || !r.solution) {
            all = false;
            break;
        }
        below.push_back(*r.solution);
    }
    ++t.runs;
    if (all) {
        Cochain total = p0;
        for (const auto& q : below) {
            total = total + q;
        }
        t.mc += exact_zero(mc_residual(total)) ? 1 : 0;
    }
}

Outcome recursion_soundness() {
    RecursionTally t;
    auto c2 = shared(reflection_line());
    auto c4 = shared(cyclic_rotations(4));
    const CoefficientBasis constants({Expr(1)});
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        recursion_run(c2, constants, 3, seed, t);
        recursion_run(c4, constants, 3, seed + 10, t);
    }
    FormalSymbol u2 = FormalSymbol::one(1, 3);
    u2.set(1, {0}, parse("x"));
    u2.set(1, {1}, Expr(2));
    gauge_run(c2, CoefficientBasis::monomials({"x"}, 3), u2, t);
    FormalSymbol u4 = FormalSymbol::one(2, 3);
    u4.set(1, {0, 0}, parse("x + 2*y"));
    u4.set(1, {1, 0}, Expr(3));
    u4.set(2, {0, 1}, Expr(-1));
    gauge_run(c4, CoefficientBasis::monomials({"x", "y"}, 3), u4, t);
    Outcome o;
    o.pass = t.closed == t.steps && t.solved == t.steps && t.mc == t.runs;
    o.detail = std::to_string(t.runs) + " runs, " + std::to_string(t.steps) + " steps: RHS closed " +
               std::to_string(t.closed) + ", solved " + std::to_string(t.solved) + ", assembled MC " +
               std::to_string(t.mc) + "/" + std::to_string(t.runs);
    return o;
}

Outcome trivial_splitting() {
    Outcome o;
    o.pass = true;
    std::ostringstream s;
    for (int n : {2, 4}) {
        auto act = shared(trivial_cyclic(n, 1));
        const auto basis = CoefficientBasis::monomials(act->coordinates(), 2);
        const auto scalar = oracle::trivial_group_cohomology(act->finite_group(), 2);
        const auto rows = cohomology_dims(act, basis, unit_system(act, 3), 3, 2);
        int matches = 0;
        for (const auto& row : rows) {
            const int alphas = row.n + 1;
            bool same = true;
            for (std::size_t k = 0; k < 3; ++k) {
                same = same && row.h[k] == alphas * static_cast<int>(basis.size()) * scalar[k];
            }
            matches += same ? 1 : 0;
        }
        o.pass = o.pass && matches == static_cast<int>(rows.size()) && rows.size() == 4;
        s << "C" << n << " H(G)=(" << scalar[0] << "," << scalar[1] << "," << scalar[2] << ") " << matches << "/"
          << rows.size() << " orders; ";
    }
    o.detail = s.str();
    o.detail.resize(o.detail.size() - 2);
    return o;
}

Outcome numeric_unitarity() {
    const auto start = std::chrono::steady_clock::now();
    const GridSpec spec{2, 256, 16.0, 0.1};
    const double width = spec.half_width / 32.0;
    auto gal = galilean_boosts();
    const auto sys = system_from_template(gal, parse("exp(i*(m*v*x - (1/2)*m*v^2*t))"), {{"m", 1.0}});
    std::vector<WaveGrid> tests{gaussian(spec, {0.0, 0.0}, width), gaussian(spec, {0.3, -0.2}, width, {0.0, 1.5}),
                                gaussian(spec, {-0.4, 0.25}, width, {-1.0, -2.0})};
    auto boost = [](long p, long q) { return Element::param({Expr(Gauss(Rational(p, q)))}); };
    const std::vector<std::pair<Element, Element>> pairs{{boost(1, 2), boost(-1, 3)}, {boost(1, 1), boost(1, 1)},
                                                         {boost(-3, 4), boost(5, 4)}, {boost(2, 1), boost(-1, 4)},
                                                         {boost(-1, 1), boost(-2, 3)}};
    double worst_u = 0.0;
    for (const auto& [g1, g2] : pairs) {
        worst_u = std::max(worst_u, unitarity_residual(sys.amplitude(g1), sys.map(g1), tests));
        worst_u = std::max(worst_u, unitarity_residual(sys.amplitude(g2), sys.map(g2), tests));
    }
    const double rep = representation_residual(gal, sys, pairs, tests);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Outcome o;
    o.pass = worst_u <= 1e-8 && rep <= 1e-7 && secs <= 120.0;
    std::ostringstream s;
    s << "unitarity " << sci(worst_u) << ", representation " << sci(rep) << " over 5 pairs, " << std::fixed
      << std::setprecision(1) << secs << " s";
    o.detail = s.str();
    return o;
}

std::string brief(const AsymptoticResult& r) {
    if (r.exact) {
        return "exact, max error " + sci(*std::max_element(r.errors.begin(), r.errors.end()));
    }
    std::ostringstream s;
    s << "slope " << std::fixed << std::setprecision(2) << r.slope << (r.fit_ok ? "" : " (poor fit)");
    return s.str();
}

Outcome asymptotic() {
    const std::vector<double> ladder{0.2, 0.1, 0.05, 0.025};
    const GridSpec g1{1, 128, 8.0, 0.1};
    const auto one = asymptotic_consistency({parse("xi1*(cos(x) + sin(2*x)/2)")}, Diffeo::identity({"x"}),
                                            parse("exp(-x^2)"), g1, ladder, 1);
    const GridSpec g2{2, 64, 8.0, 0.1};
    const std::vector<Expr> a2{parse("xi1*(cos(x) + sin(2*x)/2)")};
    const Expr psi2 = parse("exp(-x^2 - y^2)");
    const auto id2 = Diffeo::identity({"x", "y"});
    const auto multi = asymptotic_consistency(a2, id2, psi2, g2, ladder, 1, TaylorConvention::MultiFactorial);
    const auto total = asymptotic_consistency(a2, id2, psi2, g2, ladder, 1, TaylorConvention::TotalFactorial);

    auto attains = [](const AsymptoticResult& r) { return !r.exact && r.fit_ok && r.slope >= 1.8; };
    Outcome o;
    o.pass = attains(one) && attains(multi) && !attains(total);
    o.detail = "d=1 " + brief(one) + "; d=2 1/a! " + brief(multi) + "; d=2 1/|a|! " + brief(total);
    if (!o.pass && one.exact && multi.exact && total.exact) {
        o.detail += "; the N=1 truncation of xi1*f is exact, so no slope exists and the conventions coincide";
    }

    // variants where the measurement is informative
    const auto second = asymptotic_consistency({parse("xi1*cos(x)"), Expr(), parse("sin(x)")}, Diffeo::identity({"x"}),
                                               parse("exp(-x^2)"), g1, ladder, 1);
    o.notes.push_back("hbar^2 sin(x) term added, N=1: " + brief(second));
    const std::vector<Expr> mixed{parse("xi1*xi2*cos(x)")};
    const auto mr = asymptotic_consistency(mixed, id2, psi2, g2, ladder, 2, TaylorConvention::MultiFactorial);
    const auto mw = asymptotic_consistency(mixed, id2, psi2, g2, ladder, 2, TaylorConvention::TotalFactorial);
    o.notes.push_back("xi1*xi2*cos(x), N=2: 1/a! " + brief(mr) + "; 1/|a|! " + brief(mw));
    return o;
}

Outcome standard_product() {
    const GridSpec spec{1, 128, 8.0, 0.1};
    const auto psi = gaussian(spec, {0.2}, 0.7, {1.0});
    auto amp = [](const std::string& t) { return NumericAmplitude{parse(t), {"x"}, {}}; };
    const std::vector<std::pair<std::string, std::string>> cases{
        {"x", "xi1"}, {"xi1", "x"}, {"x^2", "xi1^2"}, {"xi1^2", "x^2"}, {"x*xi1 + 1", "x + xi1^2"}, {"x^2 - xi1", "x*xi1"}};
    double worst_q = 0.0;
    double worst_c = 0.0;
    for (const auto& [a, b] : cases) {
        const auto r = standard_product_residual(amp(a), amp(b), psi);
        worst_q = std::max(worst_q, r.quadrature_error);
        worst_c = std::isnan(r.closed_form_error) ? INFINITY : std::max(worst_c, r.closed_form_error);
    }
    Outcome o;
    o.pass = worst_q <= 1e-6 && worst_c <= 1e-6;
    o.detail = std::to_string(cases.size()) + " pairs: quadrature " + sci(worst_q) + ", closed form " + sci(worst_c);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"DGA axioms over C4 at N=3", dga_axioms},
        {"MC iff representation", mc_iff_representation},
        {"phase cocycle iff exponential MC", phase_cocycle_equivalence},
        {"phases from C4 invariants", invariant_phases},
        {"gauge equivalence from coboundaries", gauge_equivalence},
        {"recursion soundness on C2 and C4", recursion_soundness},
        {"trivial-action splitting", trivial_splitting},
        {"numeric unitarity of galilean boosts", numeric_unitarity},
        {"asymptotic consistency and Taylor convention", asymptotic},
        {"standard product quadrature", standard_product},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::cout << "criterion " << (k + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[k].first
                  << " (" << o.detail << ")" << std::endl;
        for (const auto& n : o.notes) {
            std::cout << "    note: " << n << std::endl;
        }
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria pass"
              << std::endl;
    return failures == 0 ? 0 : 1;
}
