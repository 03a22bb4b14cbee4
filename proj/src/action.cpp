#include "quantact/action.hpp"

#include <fstream>
#include <functional>
#include <tuple>
#include <random>
#include <sstream>

namespace quantact {

namespace {

ZeroVerdict combine(ZeroVerdict a, const ZeroVerdict& b) {
    a.zero = a.zero && b.zero;
    if (b.certificate == Certificate::Probabilistic) {
        a.certificate = Certificate::Probabilistic;
    }
    return a;
}

ZeroVerdict tuples_equal(const std::vector<Expr>& a, const std::vector<Expr>& b, const ZeroTestOptions& opts) {
    ZeroVerdict v{true, Certificate::Exact};
    if (a.size() != b.size()) {
        return {false, Certificate::Exact};
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        v = combine(v, is_zero(a[i] - b[i], opts));
    }
    return v;
}

std::string tuple_str(const std::vector<Expr>& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        out += (i ? ", " : "") + t[i].str();
    }
    return out + ")";
}

std::vector<std::string> default_coordinates(std::size_t d) {
    static const char* small[] = {"x", "y", "z"};
    std::vector<std::string> out;
    for (std::size_t k = 0; k < d; ++k) {
        out.push_back(d <= 3 ? small[k] : "x" + std::to_string(k + 1));
    }
    return out;
}

std::vector<Expr> parse_tuple(const std::string& text, const VarBinding& binding) {
    std::vector<Expr> out;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        out.push_back(parse(part, binding));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Diffeo

Diffeo::Diffeo(std::vector<std::string> coordinates, std::vector<Expr> forward, std::vector<Expr> inverse)
    : coords_(std::move(coordinates)), forward_(std::move(forward)), inverse_(std::move(inverse)) {
    if (forward_.size() != coords_.size() || inverse_.size() != coords_.size()) {
        throw DimensionMismatch("diffeomorphism on R^" + std::to_string(coords_.size()) + " needs " +
                                std::to_string(coords_.size()) + " forward and inverse components");
    }
}

Diffeo Diffeo::identity(std::vector<std::string> coordinates) {
    std::vector<Expr> id;
    for (const auto& c : coordinates) {
        id.push_back(Expr::symbol(c));
    }
    return Diffeo(std::move(coordinates), id, id);
}

Expr substitute_point(const Expr& e, const std::vector<std::string>& coords, const std::vector<Expr>& point) {
    std::map<std::string, Expr> subs;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (point[i] != Expr::symbol(coords[i])) {
            subs[coords[i]] = point[i];
        }
    }
    return substitute(e, subs);
}

Expr Diffeo::pullback(const Expr& f) const { return substitute_point(f, coords_, inverse_); }

Expr Diffeo::precompose(const Expr& f) const { return substitute_point(f, coords_, forward_); }

Diffeo Diffeo::substituted(const std::map<std::string, Expr>& assignments) const {
    std::vector<Expr> f;
    std::vector<Expr> g;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        f.push_back(substitute(forward_[i], assignments));
        g.push_back(substitute(inverse_[i], assignments));
    }
    return Diffeo(coords_, std::move(f), std::move(g));
}

ZeroVerdict Diffeo::check_inverse(const ZeroTestOptions& opts) const {
    const Diffeo id = identity(coords_);
    std::vector<Expr> fg;
    std::vector<Expr> gf;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        fg.push_back(substitute_point(forward_[i], coords_, inverse_));
        gf.push_back(substitute_point(inverse_[i], coords_, forward_));
    }
    return combine(tuples_equal(fg, id.forward_, opts), tuples_equal(gf, id.forward_, opts));
}

ZeroVerdict Diffeo::equals(const Diffeo& o, const ZeroTestOptions& opts) const {
    if (coords_ != o.coords_) {
        return {false, Certificate::Exact};
    }
    return combine(tuples_equal(forward_, o.forward_, opts), tuples_equal(inverse_, o.inverse_, opts));
}

Diffeo compose(const Diffeo& a, const Diffeo& b) {
    if (a.coordinates() != b.coordinates()) {
        throw DimensionMismatch("cannot compose maps on different coordinate systems");
    }
    std::vector<Expr> f;
    std::vector<Expr> g;
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        f.push_back(substitute_point(a.forward()[i], a.coordinates(), b.forward()));
        g.push_back(substitute_point(b.inverse()[i], a.coordinates(), a.inverse()));
    }
    return Diffeo(a.coordinates(), std::move(f), std::move(g));
}

std::vector<std::vector<Expr>> jacobian(const std::vector<Expr>& map, const std::vector<std::string>& coords) {
    std::vector<std::vector<Expr>> j(map.size(), std::vector<Expr>(coords.size()));
    for (std::size_t r = 0; r < map.size(); ++r) {
        for (std::size_t c = 0; c < coords.size(); ++c) {
            j[r][c] = diff(map[r], coords[c]);
        }
    }
    return j;
}

Expr determinant(const std::vector<std::vector<Expr>>& m) {
    const std::size_t n = m.size();
    if (n == 0) {
        return Expr(1);
    }
    if (n == 1) {
        return m[0][0];
    }
    Expr det;
    for (std::size_t c = 0; c < n; ++c) {
        if (m[0][c].is_zero()) {
            continue;
        }
        std::vector<std::vector<Expr>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<Expr> row;
            for (std::size_t k = 0; k < n; ++k) {
                if (k != c) {
                    row.push_back(m[r][k]);
                }
            }
            minor.push_back(std::move(row));
        }
        Expr term = m[0][c] * determinant(minor);
        det += (c % 2 == 0) ? term : -term;
    }
    return det;
}

Expr jacobian_det(const Diffeo& phi) { return determinant(jacobian(phi.forward(), phi.coordinates())); }

FormalSymbol act_on_symbol(const Diffeo& phi, const FormalSymbol& p) {
    if (phi.dimension() != p.dimension()) {
        throw DimensionMismatch("action on R^" + std::to_string(phi.dimension()) + " applied to a symbol on R^" +
                                std::to_string(p.dimension()));
    }
    return p.map_coefficients([&](const Expr& f) { return phi.pullback(f); });
}

// ---------------------------------------------------------------------------
// Groups

FiniteGroup::FiniteGroup(std::vector<std::string> names, std::vector<std::vector<int>> table)
    : names_(std::move(names)), table_(std::move(table)) {
    const int n = size();
    if (n == 0) {
        throw std::invalid_argument("finite group needs at least one element");
    }
    if (static_cast<int>(table_.size()) != n) {
        throw std::invalid_argument("multiplication table must have one row per element");
    }
    for (const auto& row : table_) {
        if (static_cast<int>(row.size()) != n) {
            throw std::invalid_argument("multiplication table must be square");
        }
        for (int v : row) {
            if (v < 0 || v >= n) {
                throw std::invalid_argument("multiplication table entry out of range");
            }
        }
    }
    for (int e = 0; e < n && identity_ < 0; ++e) {
        bool ok = true;
        for (int g = 0; g < n && ok; ++g) {
            ok = multiply(e, g) == g && multiply(g, e) == g;
        }
        if (ok) {
            identity_ = e;
        }
    }
    if (identity_ < 0) {
        throw std::invalid_argument("multiplication table has no identity element");
    }
    inverse_.assign(static_cast<std::size_t>(n), -1);
    for (int g = 0; g < n; ++g) {
        for (int h = 0; h < n; ++h) {
            if (multiply(g, h) == identity_ && multiply(h, g) == identity_) {
                inverse_[static_cast<std::size_t>(g)] = h;
                break;
            }
        }
        if (inverse_[static_cast<std::size_t>(g)] < 0) {
            throw std::invalid_argument("element '" + name(g) + "' has no inverse");
        }
    }
}

FiniteGroup FiniteGroup::cyclic(int n) {
    if (n < 1) {
        throw std::invalid_argument("cyclic group order must be positive");
    }
    std::vector<std::string> names;
    std::vector<std::vector<int>> table(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a) {
        names.push_back(a == 0 ? "e" : (a == 1 ? "r" : "r^" + std::to_string(a)));
        for (int b = 0; b < n; ++b) {
            table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % n;
        }
    }
    return FiniteGroup(std::move(names), std::move(table));
}

int FiniteGroup::index_of(const std::string& n) const {
    auto it = std::find(names_.begin(), names_.end(), n);
    if (it == names_.end()) {
        throw std::invalid_argument("unknown group element '" + n + "'");
    }
    return static_cast<int>(it - names_.begin());
}

std::vector<std::string> FiniteGroup::axiom_failures() const {
    std::vector<std::string> out;
    const int n = size();
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                if (multiply(multiply(a, b), c) != multiply(a, multiply(b, c))) {
                    out.push_back("associativity fails at (" + name(a) + ", " + name(b) + ", " + name(c) + ")");
                    if (out.size() > 8) {
                        return out;
                    }
                }
            }
        }
    }
    return out;
}

std::string slot_symbol(const std::string& param, int slot) { return param + "_" + std::to_string(slot); }

ParamGroup::ParamGroup(std::vector<std::string> params, std::vector<Expr> product, std::vector<Expr> inverse,
                       std::vector<Expr> identity)
    : params_(std::move(params)), product_(std::move(product)), inverse_(std::move(inverse)),
      identity_(std::move(identity)) {
    const std::size_t m = params_.size();
    if (product_.size() != m || inverse_.size() != m || identity_.size() != m) {
        throw std::invalid_argument("group law needs one product, inverse and identity entry per parameter");
    }
}

std::vector<Expr> ParamGroup::multiply(const std::vector<Expr>& a, const std::vector<Expr>& b) const {
    std::map<std::string, Expr> subs;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        subs[params_[i] + "_l"] = a[i];
        subs[params_[i] + "_r"] = b[i];
    }
    std::vector<Expr> out;
    for (const auto& p : product_) {
        out.push_back(substitute(p, subs));
    }
    return out;
}

std::vector<Expr> ParamGroup::inverse(const std::vector<Expr>& a) const {
    std::map<std::string, Expr> subs;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        subs[params_[i]] = a[i];
    }
    std::vector<Expr> out;
    for (const auto& p : inverse_) {
        out.push_back(substitute(p, subs));
    }
    return out;
}

std::vector<Expr> ParamGroup::generic(int slot) const {
    std::vector<Expr> out;
    for (const auto& p : params_) {
        out.push_back(Expr::symbol(slot_symbol(p, slot)));
    }
    return out;
}

std::string Element::str() const {
    if (index >= 0) {
        return "#" + std::to_string(index);
    }
    return tuple_str(params);
}

// ---------------------------------------------------------------------------
// Action

Action::Action(std::string name, VarBinding binding, FiniteGroup group, std::vector<Diffeo> maps)
    : name_(std::move(name)), binding_(std::move(binding)), group_(std::move(group)), maps_(std::move(maps)) {
    if (static_cast<int>(maps_.size()) != finite_group().size()) {
        throw std::invalid_argument("finite action needs one map per group element");
    }
    for (const auto& m : maps_) {
        if (m.coordinates() != coordinates()) {
            throw DimensionMismatch("map coordinates differ from the declared coordinates");
        }
    }
}

Action::Action(std::string name, VarBinding binding, ParamGroup group, Diffeo map)
    : name_(std::move(name)), binding_(std::move(binding)), group_(std::move(group)), param_map_(std::move(map)) {
    if (param_map_->coordinates() != coordinates()) {
        throw DimensionMismatch("map coordinates differ from the declared coordinates");
    }
    random_samples(8, 0x5a3b1e5ULL);
}

Element Action::identity() const {
    if (is_finite()) {
        return Element::finite(finite_group().identity());
    }
    return Element::param(param_group().identity());
}

Element Action::multiply(const Element& a, const Element& b) const {
    if (is_finite()) {
        return Element::finite(finite_group().multiply(a.index, b.index));
    }
    return Element::param(param_group().multiply(a.params, b.params));
}

Element Action::inverse(const Element& a) const {
    if (is_finite()) {
        return Element::finite(finite_group().inverse(a.index));
    }
    return Element::param(param_group().inverse(a.params));
}

Diffeo Action::diffeo(const Element& g) const {
    if (is_finite()) {
        return maps_.at(static_cast<std::size_t>(g.index));
    }
    const auto& params = param_group().params();
    std::map<std::string, Expr> subs;
    for (std::size_t i = 0; i < params.size(); ++i) {
        subs[params[i]] = g.params.at(i);
    }
    return param_map_->substituted(subs);
}

std::vector<Element> Action::elements() const {
    std::vector<Element> out;
    if (is_finite()) {
        for (int g = 0; g < finite_group().size(); ++g) {
            out.push_back(Element::finite(g));
        }
    } else {
        for (const auto& s : samples_) {
            out.push_back(Element::param(s));
        }
    }
    return out;
}

Element Action::generic(int slot) const {
    if (is_finite()) {
        throw std::logic_error("finite groups have no generic element");
    }
    return Element::param(param_group().generic(slot));
}

void Action::set_samples(std::vector<std::vector<Expr>> samples) {
    for (const auto& s : samples) {
        if (s.size() != param_group().params().size()) {
            throw std::invalid_argument("sample tuple length differs from the parameter count");
        }
    }
    samples_ = std::move(samples);
}

void Action::random_samples(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(-8, 8);
    std::vector<std::vector<Expr>> samples;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<Expr> s;
        for (std::size_t i = 0; i < param_group().params().size(); ++i) {
            s.push_back(Expr::fraction(num(rng), 4));
        }
        samples.push_back(std::move(s));
    }
    samples_ = std::move(samples);
}

Report check_action(const Action& action, const ZeroTestOptions& opts) {
    Report report("check-action " + action.name());
    report.info("dimension", std::to_string(action.dimension()));
    report.info("group", action.is_finite() ? "finite of order " + std::to_string(action.finite_group().size())
                                            : "parametrized by " + std::to_string(action.param_group().params().size()) +
                                                  " parameter(s)");
    report.info("bounded (declared)", action.bounded ? "yes" : "no");
    report.info("volume_preserving (declared)", action.volume_preserving ? "yes" : "no");

    auto verdict_detail = [](const ZeroVerdict& v, const std::string& what) { return v.zero ? std::string() : what; };

    // Group axioms.
    if (action.is_finite()) {
        const auto failures = action.finite_group().axiom_failures();
        std::string detail;
        for (const auto& f : failures) {
            detail += (detail.empty() ? "" : "; ") + f;
        }
        report.check("group axioms (table)", failures.empty(), Certificate::Exact, detail);
    } else {
        const auto& grp = action.param_group();
        const auto g1 = grp.generic(1);
        const auto g2 = grp.generic(2);
        const auto g3 = grp.generic(3);
        auto v = tuples_equal(grp.multiply(grp.multiply(g1, g2), g3), grp.multiply(g1, grp.multiply(g2, g3)), opts);
        report.check("associativity (generic)", v.zero, v.certificate);
        v = combine(tuples_equal(grp.multiply(grp.identity(), g1), g1, opts),
                    tuples_equal(grp.multiply(g1, grp.identity()), g1, opts));
        report.check("identity law (generic)", v.zero, v.certificate);
        v = combine(tuples_equal(grp.multiply(g1, grp.inverse(g1)), grp.identity(), opts),
                    tuples_equal(grp.multiply(grp.inverse(g1), g1), grp.identity(), opts));
        report.check("inverse law (generic)", v.zero, v.certificate);
    }

    // Elements to check: every element, or the generic one plus samples.
    std::vector<std::pair<std::string, Element>> elems;
    if (action.is_finite()) {
        for (int g = 0; g < action.finite_group().size(); ++g) {
            elems.emplace_back(action.finite_group().name(g), Element::finite(g));
        }
    } else {
        elems.emplace_back("generic", action.generic(1));
        for (const auto& s : action.elements()) {
            elems.emplace_back(s.str(), s);
        }
    }

    const Diffeo id = Diffeo::identity(action.coordinates());
    {
        auto v = action.diffeo(action.identity()).equals(id, opts);
        report.check("phi_e = id", v.zero, v.certificate);
    }
    for (const auto& [label, g] : elems) {
        const Diffeo phi = action.diffeo(g);
        auto v = phi.check_inverse(opts);
        report.check("inverse " + label, v.zero, v.certificate,
                     verdict_detail(v, "forward " + tuple_str(phi.forward()) + " inverse " + tuple_str(phi.inverse())));
    }

    // Homomorphism phi_{g1 g2} = phi_{g1} o phi_{g2}.
    std::vector<std::tuple<std::string, Element, Element>> pairs;
    if (action.is_finite()) {
        for (std::size_t a = 0; a < elems.size(); ++a) {
            for (std::size_t b = 0; b < elems.size(); ++b) {
                pairs.emplace_back("(" + elems[a].first + ", " + elems[b].first + ")", elems[a].second, elems[b].second);
            }
        }
    } else {
        pairs.emplace_back("(generic, generic)", action.generic(1), action.generic(2));
        const auto samples = action.elements();
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const auto& a = samples[k];
            const auto& b = samples[(k + 1) % samples.size()];
            pairs.emplace_back("(" + a.str() + ", " + b.str() + ")", a, b);
        }
    }
    for (const auto& [label, a, b] : pairs) {
        const Diffeo lhs = action.diffeo(action.multiply(a, b));
        const Diffeo rhs = compose(action.diffeo(a), action.diffeo(b));
        auto v = lhs.equals(rhs, opts);
        report.check("homomorphism " + label, v.zero, v.certificate,
                     verdict_detail(v, "phi_{g1 g2} = " + tuple_str(lhs.forward()) + " but phi_g1 o phi_g2 = " +
                                           tuple_str(rhs.forward())));
    }

    // Volume.
    for (const auto& [label, g] : elems) {
        const Expr det = jacobian_det(action.diffeo(g));
        if (action.volume_preserving) {
            auto v = is_zero(det * conj(det) - Expr(1), opts);
            report.check("|det Dphi| = 1 " + label, v.zero, v.certificate, verdict_detail(v, "det = " + det.str()));
        } else if (label == elems.front().first) {
            report.info("jacobian_det " + label, det.str());
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Built-ins

Action translations(std::size_t d) {
    const auto coords = default_coordinates(d);
    VarBinding b;
    std::vector<std::string> params;
    for (std::size_t k = 0; k < d; ++k) {
        b.add(coords[k], VarRole::Coordinate);
    }
    for (std::size_t k = 0; k < d; ++k) {
        params.push_back(d == 1 ? "c" : "c" + std::to_string(k + 1));
        b.add(params.back(), VarRole::Parameter);
    }
    std::vector<Expr> prod;
    std::vector<Expr> inv;
    std::vector<Expr> fwd;
    std::vector<Expr> bwd;
    for (std::size_t k = 0; k < d; ++k) {
        const Expr c = Expr::symbol(params[k]);
        prod.push_back(Expr::symbol(params[k] + "_l") + Expr::symbol(params[k] + "_r"));
        inv.push_back(-c);
        fwd.push_back(Expr::symbol(coords[k]) + c);
        bwd.push_back(Expr::symbol(coords[k]) - c);
    }
    Action a("translations:" + std::to_string(d), b,
             ParamGroup(params, prod, inv, std::vector<Expr>(d, Expr())), Diffeo(coords, fwd, bwd));
    a.bounded = true;
    a.volume_preserving = true;
    return a;
}

Action galilean_boosts() {
    VarBinding b{{"t", VarRole::Coordinate},
                 {"x", VarRole::Coordinate},
                 {"v", VarRole::Parameter},
                 {"m", VarRole::Constant}};
    const Expr t = Expr::symbol("t");
    const Expr x = Expr::symbol("x");
    const Expr v = Expr::symbol("v");
    Action a("galilean", b,
             ParamGroup({"v"}, {Expr::symbol("v_l") + Expr::symbol("v_r")}, {-v}, {Expr()}),
             Diffeo({"t", "x"}, {t, x + v * t}, {t, x - v * t}));
    a.bounded = true;
    a.volume_preserving = true;
    return a;
}

Action cyclic_rotations(int n) {
    if (n != 1 && n != 2 && n != 4) {
        throw std::invalid_argument("exact rotation groups are available for n in {1, 2, 4}");
    }
    VarBinding b{{"x", VarRole::Coordinate}, {"y", VarRole::Coordinate}};
    const Expr x = Expr::symbol("x");
    const Expr y = Expr::symbol("y");
    // quarter-turn powers: (x, y), (-y, x), (-x, -y), (y, -x)
    const std::vector<std::vector<Expr>> quarter{{x, y}, {-y, x}, {-x, -y}, {y, -x}};
    std::vector<Diffeo> maps;
    const int step = 4 / n;
    for (int k = 0; k < n; ++k) {
        const int q = (k * step) % 4;
        maps.emplace_back(std::vector<std::string>{"x", "y"}, quarter[static_cast<std::size_t>(q)],
                          quarter[static_cast<std::size_t>((4 - q) % 4)]);
    }
    Action a("rotations:" + std::to_string(n), b, FiniteGroup::cyclic(n), std::move(maps));
    a.bounded = true;
    a.volume_preserving = true;
    return a;
}

Action reflection_line() {
    VarBinding b{{"x", VarRole::Coordinate}};
    const Expr x = Expr::symbol("x");
    std::vector<Diffeo> maps{Diffeo::identity({"x"}), Diffeo({"x"}, {-x}, {-x})};
    Action a("reflection", b, FiniteGroup::cyclic(2), std::move(maps));
    a.bounded = true;
    a.volume_preserving = true;
    return a;
}

Action trivial_cyclic(int n, std::size_t d) {
    const auto coords = default_coordinates(d);
    VarBinding b;
    for (const auto& c : coords) {
        b.add(c, VarRole::Coordinate);
    }
    std::vector<Diffeo> maps(static_cast<std::size_t>(n), Diffeo::identity(coords));
    Action a("trivial:" + std::to_string(n) + ":" + std::to_string(d), b, FiniteGroup::cyclic(n), std::move(maps));
    a.bounded = true;
    a.volume_preserving = true;
    return a;
}

Action heisenberg() {
    VarBinding b{{"x", VarRole::Coordinate}, {"y", VarRole::Coordinate}, {"z", VarRole::Coordinate},
                 {"a", VarRole::Parameter},  {"b", VarRole::Parameter},  {"c", VarRole::Parameter}};
    auto s = [](const char* n) { return Expr::symbol(n); };
    std::vector<Expr> prod{s("a_l") + s("a_r"), s("b_l") + s("b_r"),
                           s("c_l") + s("c_r") + Expr::fraction(1, 2) * (s("a_r") * s("b_l") - s("a_l") * s("b_r"))};
    std::vector<Expr> inv{-s("a"), -s("b"), -s("c")};
    const Expr shift = s("a") * s("y") - s("b") * s("x");
    Action a("heisenberg", b, ParamGroup({"a", "b", "c"}, prod, inv, {Expr(), Expr(), Expr()}),
             Diffeo({"x", "y", "z"}, {s("x"), s("y"), s("z") + shift}, {s("x"), s("y"), s("z") - shift}));
    a.bounded = true;
    a.volume_preserving = true;
    return a;
}

Action multiplicative_trivial(std::size_t d) {
    const auto coords = default_coordinates(d);
    VarBinding b;
    for (const auto& c : coords) {
        b.add(c, VarRole::Coordinate);
    }
    b.add("s", VarRole::Parameter);
    const Expr s = Expr::symbol("s");
    Action a("multiplicative:" + std::to_string(d), b,
             ParamGroup({"s"}, {Expr::symbol("s_l") * Expr::symbol("s_r")}, {s.pow(-1)}, {Expr(1)}),
             Diffeo::identity(coords));
    std::vector<std::vector<Expr>> samples;
    for (auto [p, q] : std::vector<std::pair<long, long>>{{1, 2}, {2, 1}, {3, 1}, {3, 4}, {5, 2}, {1, 3}, {4, 1}, {2, 3}}) {
        samples.push_back({Expr::fraction(p, q)});
    }
    a.set_samples(std::move(samples));
    a.bounded = true;
    a.volume_preserving = true;
    return a;
}

Action quarter_turns() {
    VarBinding b{{"x", VarRole::Coordinate}, {"y", VarRole::Coordinate}, {"k", VarRole::Parameter},
                 {"pi", VarRole::Constant}};
    const Expr c = parse("cos(k*pi/2)", b);
    const Expr s = parse("sin(k*pi/2)", b);
    const Expr x = Expr::symbol("x");
    const Expr y = Expr::symbol("y");
    Action a("quarter-turns", b,
             ParamGroup({"k"}, {Expr::symbol("k_l") + Expr::symbol("k_r")}, {-Expr::symbol("k")}, {Expr()}),
             Diffeo({"x", "y"}, {c * x - s * y, s * x + c * y}, {c * x + s * y, c * y - s * x}));
    std::vector<std::vector<Expr>> samples;
    for (long k : {1, 2, 3, -1, 4, -2, 5, 0}) {
        samples.push_back({Expr(k)});
    }
    a.set_samples(std::move(samples));
    a.bounded = true;
    a.volume_preserving = true;
    return a;
}

std::vector<std::string> builtin_action_names() {
    return {"translations:<d>", "galilean", "rotations:<1|2|4>", "reflection", "trivial:<n>:<d>",
            "heisenberg",       "multiplicative:<d>", "quarter-turns"};
}

Action builtin_action(const std::string& spec) {
    std::vector<std::string> parts;
    std::istringstream in(spec);
    std::string part;
    while (std::getline(in, part, ':')) {
        parts.push_back(part);
    }
    auto num = [&](std::size_t i, int fallback) {
        if (i >= parts.size()) {
            return fallback;
        }
        try {
            return std::stoi(parts[i]);
        } catch (const std::exception&) {
            throw std::invalid_argument("built-in action '" + spec + "': expected an integer in '" + parts[i] + "'");
        }
    };
    const std::string& name = parts.empty() ? spec : parts[0];
    if (name == "translations") {
        return translations(static_cast<std::size_t>(num(1, 1)));
    }
    if (name == "galilean") {
        return galilean_boosts();
    }
    if (name == "rotations") {
        return cyclic_rotations(num(1, 4));
    }
    if (name == "reflection") {
        return reflection_line();
    }
    if (name == "trivial") {
        return trivial_cyclic(num(1, 2), static_cast<std::size_t>(num(2, 1)));
    }
    if (name == "heisenberg") {
        return heisenberg();
    }
    if (name == "multiplicative") {
        return multiplicative_trivial(static_cast<std::size_t>(num(1, 1)));
    }
    if (name == "quarter-turns") {
        return quarter_turns();
    }
    std::string known;
    for (const auto& n : builtin_action_names()) {
        known += (known.empty() ? "" : ", ") + n;
    }
    throw std::invalid_argument("unknown built-in action '" + spec + "' (known: " + known + ")");
}

// ---------------------------------------------------------------------------
// Action definition files

namespace {

struct KeyValues {
    std::vector<std::tuple<std::string, std::string, std::size_t>> entries;

    const std::tuple<std::string, std::string, std::size_t>* find(const std::string& key) const {
        for (const auto& e : entries) {
            if (std::get<0>(e) == key) {
                return &e;
            }
        }
        return nullptr;
    }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, ',')) {
        part = trim(part);
        if (!part.empty()) {
            out.push_back(part);
        }
    }
    return out;
}

bool parse_bool(const std::string& v, std::size_t line) {
    if (v == "true" || v == "yes" || v == "1") {
        return true;
    }
    if (v == "false" || v == "no" || v == "0") {
        return false;
    }
    throw std::invalid_argument("action file line " + std::to_string(line) + ": expected true/false, got '" + v + "'");
}

}  // namespace

Action parse_action(const std::string& text) {
    KeyValues kv;
    {
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("action file line " + std::to_string(lineno) + ": expected 'key = value'");
            }
            kv.entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno);
        }
    }
    auto require = [&](const std::string& key) -> const std::tuple<std::string, std::string, std::size_t>& {
        const auto* e = kv.find(key);
        if (!e) {
            throw std::invalid_argument("action file: missing required key '" + key + "'");
        }
        return *e;
    };
    auto at_line = [](std::size_t line, const std::function<void()>& fn) {
        try {
            fn();
        } catch (const ParseError& e) {
            throw std::invalid_argument("action file line " + std::to_string(line) + ": " + e.what());
        } catch (const DimensionMismatch& e) {
            throw std::invalid_argument("action file line " + std::to_string(line) + ": " + e.what());
        }
    };

    const std::string name = kv.find("name") ? std::get<1>(*kv.find("name")) : "custom";
    const auto coords = split_list(std::get<1>(require("coordinates")));
    if (const auto* dim = kv.find("dimension")) {
        if (std::to_string(coords.size()) != std::get<1>(*dim)) {
            throw std::invalid_argument("action file line " + std::to_string(std::get<2>(*dim)) +
                                        ": dimension does not match the number of coordinates");
        }
    }
    VarBinding binding;
    for (const auto& c : coords) {
        binding.add(c, VarRole::Coordinate);
    }
    if (const auto* cs = kv.find("constants")) {
        for (const auto& c : split_list(std::get<1>(*cs))) {
            binding.add(c, VarRole::Constant);
        }
    }
    const std::string kind = std::get<1>(require("group"));

    auto tuple_at = [&](const std::string& key, const VarBinding& b) {
        const auto& e = require(key);
        std::vector<Expr> out;
        at_line(std::get<2>(e), [&] {
            out = parse_tuple(std::get<1>(e), b);
            if (out.size() != coords.size()) {
                throw DimensionMismatch("'" + key + "' needs " + std::to_string(coords.size()) + " components");
            }
        });
        return out;
    };

    std::optional<Action> action;
    if (kind == "param") {
        const auto params = split_list(std::get<1>(require("parameters")));
        VarBinding law = binding;
        for (const auto& p : params) {
            if (p.find('_') != std::string::npos) {
                throw std::invalid_argument("parameter names may not contain '_' (reserved for slot symbols)");
            }
            binding.add(p, VarRole::Parameter);
            law.add(p, VarRole::Parameter);
            law.add(p + "_l", VarRole::Parameter);
            law.add(p + "_r", VarRole::Parameter);
        }
        std::vector<Expr> prod;
        std::vector<Expr> inv;
        std::vector<Expr> ident;
        for (const auto& p : params) {
            const auto& pe = require("product." + p);
            const auto& ie = require("inverse." + p);
            const auto& de = require("identity." + p);
            at_line(std::get<2>(pe), [&] { prod.push_back(parse(std::get<1>(pe), law)); });
            at_line(std::get<2>(ie), [&] { inv.push_back(parse(std::get<1>(ie), law)); });
            at_line(std::get<2>(de), [&] { ident.push_back(parse(std::get<1>(de), binding)); });
        }
        Diffeo map(coords, tuple_at("forward", binding), tuple_at("inverse_map", binding));
        action.emplace(name, binding, ParamGroup(params, prod, inv, ident), map);
        std::vector<std::vector<Expr>> samples;
        for (const auto& [k, v, line] : kv.entries) {
            if (k == "sample") {
                at_line(line, [&, &v = v] {
                    auto s = parse_tuple(v, binding);
                    if (s.size() != params.size()) {
                        throw DimensionMismatch("sample needs " + std::to_string(params.size()) + " values");
                    }
                    samples.push_back(std::move(s));
                });
            }
        }
        if (!samples.empty()) {
            action->set_samples(std::move(samples));
        }
    } else if (kind == "cyclic") {
        const auto& oe = require("order");
        int order = 0;
        try {
            order = std::stoi(std::get<1>(oe));
        } catch (const std::exception&) {
            order = 0;
        }
        if (order < 1) {
            throw std::invalid_argument("action file line " + std::to_string(std::get<2>(oe)) +
                                        ": order must be a positive integer");
        }
        const Diffeo gen(coords, tuple_at("forward", binding), tuple_at("inverse_map", binding));
        std::vector<Diffeo> maps{Diffeo::identity(coords)};
        for (int k = 1; k < order; ++k) {
            maps.push_back(compose(gen, maps.back()));
        }
        action.emplace(name, binding, FiniteGroup::cyclic(order), std::move(maps));
    } else if (kind == "finite") {
        const auto names = split_list(std::get<1>(require("elements")));
        std::vector<std::vector<int>> table;
        std::vector<Diffeo> maps;
        for (const auto& g : names) {
            const auto& row = require("table." + g);
            std::vector<int> r;
            for (const auto& h : split_list(std::get<1>(row))) {
                auto it = std::find(names.begin(), names.end(), h);
                if (it == names.end()) {
                    throw std::invalid_argument("action file line " + std::to_string(std::get<2>(row)) +
                                                ": unknown element '" + h + "'");
                }
                r.push_back(static_cast<int>(it - names.begin()));
            }
            table.push_back(std::move(r));
            maps.emplace_back(coords, tuple_at("forward." + g, binding), tuple_at("inverse_map." + g, binding));
        }
        action.emplace(name, binding, FiniteGroup(names, table), std::move(maps));
    } else {
        throw std::invalid_argument("action file line " + std::to_string(std::get<2>(require("group"))) +
                                    ": group must be param, cyclic or finite");
    }
    if (const auto* e = kv.find("bounded")) {
        action->bounded = parse_bool(std::get<1>(*e), std::get<2>(*e));
    }
    if (const auto* e = kv.find("volume_preserving")) {
        action->volume_preserving = parse_bool(std::get<1>(*e), std::get<2>(*e));
    }
    return *action;
}

Action load_action(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open action file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_action(buf.str());
}

}  // namespace quantact
