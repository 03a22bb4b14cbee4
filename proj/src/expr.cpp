#include "quantact/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <random>
#include <unordered_set>

namespace quantact {

// ---------------------------------------------------------------------------
// Symbol interning

namespace {

struct SymbolTable {
    std::mutex mu;
    std::unordered_set<std::string> names;
};

SymbolTable& symbol_table() {
    static SymbolTable table;
    return table;
}

}  // namespace

Symbol::Symbol(std::string_view name) {
    auto& table = symbol_table();
    std::lock_guard lock(table.mu);
    name_ = &*table.names.emplace(name).first;
}

namespace detail {

struct Rep {
    std::vector<Term> terms;
    bool canonical_class = true;
    bool polynomial = true;
};

}  // namespace detail

using detail::Rep;
using RepPtr = std::shared_ptr<const Rep>;

namespace {

const std::vector<Term>& empty_terms() {
    static const std::vector<Term> empty;
    return empty;
}

int compare_rep(const Rep* a, const Rep* b);

int compare_gauss(const Gauss& a, const Gauss& b) { return a.compare(b); }

int compare_monomial(const Monomial& a, const Monomial& b) {
    const std::size_t np = std::min(a.powers.size(), b.powers.size());
    for (std::size_t i = 0; i < np; ++i) {
        if (int c = a.powers[i].first.compare(b.powers[i].first); c != 0) {
            return c < 0 ? -1 : 1;
        }
        if (a.powers[i].second != b.powers[i].second) {
            return a.powers[i].second < b.powers[i].second ? -1 : 1;
        }
    }
    if (a.powers.size() != b.powers.size()) {
        return a.powers.size() < b.powers.size() ? -1 : 1;
    }
    if (int c = compare_rep(a.exponent.get(), b.exponent.get()); c != 0) {
        return c;
    }
    const std::size_t na = std::min(a.atoms.size(), b.atoms.size());
    for (std::size_t i = 0; i < na; ++i) {
        if (int c = a.atoms[i].first.compare(b.atoms[i].first); c != 0) {
            return c;
        }
        if (a.atoms[i].second != b.atoms[i].second) {
            return a.atoms[i].second < b.atoms[i].second ? -1 : 1;
        }
    }
    if (a.atoms.size() != b.atoms.size()) {
        return a.atoms.size() < b.atoms.size() ? -1 : 1;
    }
    return 0;
}

int compare_rep(const Rep* a, const Rep* b) {
    if (a == b) {
        return 0;
    }
    const auto& ta = a ? a->terms : empty_terms();
    const auto& tb = b ? b->terms : empty_terms();
    const std::size_t n = std::min(ta.size(), tb.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = compare_monomial(ta[i].mono, tb[i].mono); c != 0) {
            return c;
        }
        if (int c = compare_gauss(ta[i].coeff, tb[i].coeff); c != 0) {
            return c;
        }
    }
    if (ta.size() != tb.size()) {
        return ta.size() < tb.size() ? -1 : 1;
    }
    return 0;
}

RepPtr make_rep(std::vector<Term> terms) {
    if (terms.empty()) {
        return nullptr;
    }
    auto rep = std::make_shared<Rep>();
    for (const auto& t : terms) {
        if (!t.mono.atoms.empty()) {
            rep->canonical_class = false;
            rep->polynomial = false;
        } else if (t.mono.exponent) {
            rep->polynomial = false;
        }
    }
    rep->terms = std::move(terms);
    return rep;
}

/// Sorts and merges like terms, dropping zeros.
RepPtr canonicalize(std::vector<Term> terms) {
    if (terms.empty()) {
        return nullptr;
    }
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return compare_monomial(a.mono, b.mono) < 0; });
    std::vector<Term> out;
    out.reserve(terms.size());
    for (auto& t : terms) {
        if (!out.empty() && compare_monomial(out.back().mono, t.mono) == 0) {
            out.back().coeff += t.coeff;
        } else {
            if (!out.empty() && out.back().coeff.is_zero()) {
                out.pop_back();
            }
            out.push_back(std::move(t));
        }
    }
    if (!out.empty() && out.back().coeff.is_zero()) {
        out.pop_back();
    }
    return make_rep(std::move(out));
}

Expr expr_of(RepPtr rep) { return Expr::from_rep(std::move(rep)); }

RepPtr add_reps(const RepPtr& a, const RepPtr& b) {
    if (!a) {
        return b;
    }
    if (!b) {
        return a;
    }
    std::vector<Term> out;
    out.reserve(a->terms.size() + b->terms.size());
    auto ia = a->terms.begin();
    auto ib = b->terms.begin();
    while (ia != a->terms.end() && ib != b->terms.end()) {
        int c = compare_monomial(ia->mono, ib->mono);
        if (c < 0) {
            out.push_back(*ia++);
        } else if (c > 0) {
            out.push_back(*ib++);
        } else {
            Gauss s = ia->coeff + ib->coeff;
            if (!s.is_zero()) {
                out.push_back(Term{ia->mono, std::move(s)});
            }
            ++ia;
            ++ib;
        }
    }
    out.insert(out.end(), ia, a->terms.end());
    out.insert(out.end(), ib, b->terms.end());
    return make_rep(std::move(out));
}

RepPtr scale_rep(const RepPtr& a, const Gauss& c) {
    if (!a || c.is_zero()) {
        return nullptr;
    }
    if (c.is_one()) {
        return a;
    }
    std::vector<Term> out = a->terms;
    for (auto& t : out) {
        t.coeff *= c;
    }
    return make_rep(std::move(out));
}

/// Splits terms into (polynomial terms, everything else).
std::pair<RepPtr, RepPtr> split_polynomial(const RepPtr& r) {
    if (!r) {
        return {nullptr, nullptr};
    }
    if (r->polynomial) {
        return {r, nullptr};
    }
    std::vector<Term> poly;
    std::vector<Term> rest;
    for (const auto& t : r->terms) {
        if (!t.mono.exponent && t.mono.atoms.empty()) {
            poly.push_back(t);
        } else {
            rest.push_back(t);
        }
    }
    return {make_rep(std::move(poly)), make_rep(std::move(rest))};
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial m;
    // powers: merge sorted lists
    {
        auto ia = a.powers.begin();
        auto ib = b.powers.begin();
        while (ia != a.powers.end() && ib != b.powers.end()) {
            int c = ia->first.compare(ib->first);
            if (c < 0) {
                m.powers.push_back(*ia++);
            } else if (c > 0) {
                m.powers.push_back(*ib++);
            } else {
                int e = ia->second + ib->second;
                if (e != 0) {
                    m.powers.emplace_back(ia->first, e);
                }
                ++ia;
                ++ib;
            }
        }
        m.powers.insert(m.powers.end(), ia, a.powers.end());
        m.powers.insert(m.powers.end(), ib, b.powers.end());
    }
    m.exponent = add_reps(a.exponent, b.exponent);
    if (a.atoms.empty()) {
        m.atoms = b.atoms;
        return m;
    }
    if (b.atoms.empty()) {
        m.atoms = a.atoms;
        return m;
    }
    // At most one Exp atom (power 1) and Inv atoms with positive powers.
    RepPtr exp_arg;
    std::vector<std::pair<Atom, int>> invs;
    for (const auto* src : {&a.atoms, &b.atoms}) {
        for (const auto& [atom, k] : *src) {
            if (atom.kind == Atom::Kind::Exp) {
                exp_arg = add_reps(exp_arg, atom.arg);
            } else {
                invs.emplace_back(atom, k);
            }
        }
    }
    std::sort(invs.begin(), invs.end(),
              [](const auto& x, const auto& y) { return x.first.compare(y.first) < 0; });
    if (exp_arg) {
        m.atoms.emplace_back(Atom{Atom::Kind::Exp, exp_arg}, 1);
    }
    for (auto& inv : invs) {
        if (!m.atoms.empty() && m.atoms.back().first.compare(inv.first) == 0) {
            m.atoms.back().second += inv.second;
        } else {
            m.atoms.push_back(inv);
        }
    }
    std::sort(m.atoms.begin(), m.atoms.end(),
              [](const auto& x, const auto& y) { return x.first.compare(y.first) < 0; });
    return m;
}

RepPtr mul_reps(const RepPtr& a, const RepPtr& b) {
    if (!a || !b) {
        return nullptr;
    }
    if (a->terms.size() == 1 && a->terms[0].mono.is_one()) {
        return scale_rep(b, a->terms[0].coeff);
    }
    if (b->terms.size() == 1 && b->terms[0].mono.is_one()) {
        return scale_rep(a, b->terms[0].coeff);
    }
    std::vector<Term> out;
    out.reserve(a->terms.size() * b->terms.size());
    for (const auto& ta : a->terms) {
        for (const auto& tb : b->terms) {
            out.push_back(Term{mono_mul(ta.mono, tb.mono), ta.coeff * tb.coeff});
        }
    }
    return canonicalize(std::move(out));
}

Expr term_expr(const Term& t) { return expr_of(make_rep({t})); }

Expr monomial_expr(Monomial m) { return expr_of(make_rep({Term{std::move(m), Gauss(1)}})); }

Expr inverse(const Expr& e) {
    const RepPtr& r = e.rep();
    if (!r) {
        throw std::domain_error("division by exact zero");
    }
    if (r->terms.size() == 1) {
        const Term& t = r->terms[0];
        Monomial m;
        for (const auto& [s, k] : t.mono.powers) {
            m.powers.emplace_back(s, -k);
        }
        m.exponent = scale_rep(t.mono.exponent, Gauss(-1));
        Expr extra(1);
        for (const auto& [atom, k] : t.mono.atoms) {
            if (atom.kind == Atom::Kind::Exp) {
                m.atoms.emplace_back(Atom{Atom::Kind::Exp, scale_rep(atom.arg, Gauss(-1))}, 1);
            } else {
                extra = extra * expr_of(atom.arg).pow(k);
            }
        }
        Term inv{std::move(m), t.coeff.inverse()};
        return term_expr(inv) * extra;
    }
    // Normalize the opaque argument so its leading coefficient is 1.
    const Gauss& lead = r->terms.back().coeff;
    RepPtr normalized = scale_rep(r, lead.inverse());
    Monomial m;
    m.atoms.emplace_back(Atom{Atom::Kind::Inv, normalized}, 1);
    return expr_of(make_rep({Term{std::move(m), lead.inverse()}}));
}

void collect_symbols(const Rep* r, std::set<std::string>& out) {
    if (!r) {
        return;
    }
    for (const auto& t : r->terms) {
        for (const auto& [s, k] : t.mono.powers) {
            out.insert(s.name());
        }
        collect_symbols(t.mono.exponent.get(), out);
        for (const auto& [atom, k] : t.mono.atoms) {
            collect_symbols(atom.arg.get(), out);
        }
    }
}

bool rep_depends_on(const Rep* r, const Symbol& s) {
    if (!r) {
        return false;
    }
    for (const auto& t : r->terms) {
        for (const auto& [sym, k] : t.mono.powers) {
            if (sym == s) {
                return true;
            }
        }
        if (rep_depends_on(t.mono.exponent.get(), s)) {
            return true;
        }
        for (const auto& [atom, k] : t.mono.atoms) {
            if (rep_depends_on(atom.arg.get(), s)) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

int Atom::compare(const Atom& o) const {
    if (kind != o.kind) {
        return kind < o.kind ? -1 : 1;
    }
    return compare_rep(arg.get(), o.arg.get());
}

int Monomial::compare(const Monomial& o) const { return compare_monomial(*this, o); }

// ---------------------------------------------------------------------------
// Expr basics

Expr::Expr(long v) : Expr(Gauss(v)) {}

Expr::Expr(const Gauss& c) {
    if (!c.is_zero()) {
        rep_ = make_rep({Term{Monomial{}, c}});
    }
}

Expr Expr::symbol(std::string_view name) {
    Monomial m;
    m.powers.emplace_back(Symbol(name), 1);
    return monomial_expr(std::move(m));
}

Expr Expr::from_rep(std::shared_ptr<const detail::Rep> rep) {
    Expr e;
    if (rep && !rep->terms.empty()) {
        e.rep_ = std::move(rep);
    }
    return e;
}

Expr Expr::from_terms(std::vector<Term> terms) { return from_rep(canonicalize(std::move(terms))); }

Expr operator+(const Expr& a, const Expr& b) { return expr_of(add_reps(a.rep_, b.rep_)); }
Expr operator-(const Expr& a) { return expr_of(scale_rep(a.rep_, Gauss(-1))); }
Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
Expr operator*(const Expr& a, const Expr& b) { return expr_of(mul_reps(a.rep_, b.rep_)); }
Expr operator/(const Expr& a, const Expr& b) { return a * inverse(b); }

Expr Expr::scaled(const Gauss& c) const { return expr_of(scale_rep(rep_, c)); }

Expr Expr::pow(int n) const {
    if (n == 0) {
        return Expr(1);
    }
    if (n < 0) {
        return inverse(*this).pow(-n);
    }
    Expr result(1);
    Expr base = *this;
    while (n > 0) {
        if (n & 1) {
            result = result * base;
        }
        n >>= 1;
        if (n > 0) {
            base = base * base;
        }
    }
    return result;
}

bool Expr::is_zero() const { return !rep_; }

bool Expr::is_constant() const { return !rep_ || (rep_->terms.size() == 1 && rep_->terms[0].mono.is_one()); }

std::optional<Gauss> Expr::constant_value() const {
    if (!rep_) {
        return Gauss(0);
    }
    if (is_constant()) {
        return rep_->terms[0].coeff;
    }
    return std::nullopt;
}

bool Expr::in_canonical_class() const { return !rep_ || rep_->canonical_class; }
bool Expr::is_polynomial() const { return !rep_ || rep_->polynomial; }

std::set<std::string> Expr::free_symbols() const {
    std::set<std::string> out;
    collect_symbols(rep_.get(), out);
    return out;
}

bool Expr::depends_on(std::string_view name) const { return rep_depends_on(rep_.get(), Symbol(name)); }

int Expr::degree_in(const std::vector<std::string>& names) const {
    if (!rep_) {
        return -1;
    }
    std::vector<Symbol> syms;
    syms.reserve(names.size());
    for (const auto& n : names) {
        syms.emplace_back(n);
    }
    int best = 0;
    for (const auto& t : rep_->terms) {
        int deg = 0;
        for (const auto& [s, k] : t.mono.powers) {
            if (std::find(syms.begin(), syms.end(), s) != syms.end()) {
                deg += k;
            }
        }
        best = std::max(best, deg);
    }
    return best;
}

const std::vector<Term>& Expr::terms() const { return rep_ ? rep_->terms : empty_terms(); }
std::size_t Expr::term_count() const { return rep_ ? rep_->terms.size() : 0; }

int Expr::compare(const Expr& o) const { return compare_rep(rep_.get(), o.rep_.get()); }

// ---------------------------------------------------------------------------
// Transcendental constructors

Expr exp(const Expr& arg) {
    auto [poly, rest] = split_polynomial(arg.rep());
    Monomial m;
    m.exponent = poly;
    if (rest) {
        m.atoms.emplace_back(Atom{Atom::Kind::Exp, rest}, 1);
    }
    return monomial_expr(std::move(m));
}

Expr sin(const Expr& arg) {
    Expr ia = arg * Expr::imag_unit();
    return (exp(ia) - exp(-ia)) * Expr(Gauss(Rational(0), Rational(-1, 2)));
}

Expr cos(const Expr& arg) {
    Expr ia = arg * Expr::imag_unit();
    return (exp(ia) + exp(-ia)) * Expr::fraction(1, 2);
}

Expr conj(const Expr& e) {
    std::vector<Term> out;
    for (const auto& t : e.terms()) {
        Term c{t.mono, t.coeff.conj()};
        if (c.mono.exponent) {
            c.mono.exponent = conj(expr_of(c.mono.exponent)).rep();
        }
        for (auto& [atom, k] : c.mono.atoms) {
            atom.arg = conj(expr_of(atom.arg)).rep();
        }
        out.push_back(std::move(c));
    }
    return Expr::from_terms(std::move(out));
}

// ---------------------------------------------------------------------------
// Calculus

Expr diff(const Expr& e, std::string_view var) {
    const Symbol sym(var);
    std::vector<Term> out;
    for (const auto& t : e.terms()) {
        // power part
        for (std::size_t i = 0; i < t.mono.powers.size(); ++i) {
            if (!(t.mono.powers[i].first == sym)) {
                continue;
            }
            Term dt = t;
            const int k = dt.mono.powers[i].second;
            dt.coeff *= Gauss(static_cast<long>(k));
            if (k == 1) {
                dt.mono.powers.erase(dt.mono.powers.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                dt.mono.powers[i].second = k - 1;
            }
            out.push_back(std::move(dt));
        }
        const bool exp_dep = rep_depends_on(t.mono.exponent.get(), sym);
        bool atom_dep = false;
        for (const auto& [atom, k] : t.mono.atoms) {
            atom_dep = atom_dep || rep_depends_on(atom.arg.get(), sym);
        }
        if (!exp_dep && !atom_dep) {
            continue;
        }
        const Expr te = term_expr(t);
        Expr factor;
        if (exp_dep) {
            factor += diff(expr_of(t.mono.exponent), var);
        }
        for (const auto& [atom, k] : t.mono.atoms) {
            if (!rep_depends_on(atom.arg.get(), sym)) {
                continue;
            }
            const Expr arg = expr_of(atom.arg);
            if (atom.kind == Atom::Kind::Exp) {
                factor += diff(arg, var);
            } else {
                factor -= diff(arg, var) * inverse(arg) * Expr(static_cast<long>(k));
            }
        }
        const Expr contribution = te * factor;
        out.insert(out.end(), contribution.terms().begin(), contribution.terms().end());
    }
    return Expr::from_terms(std::move(out));
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& assignments) {
    if (assignments.empty() || e.is_zero()) {
        return e;
    }
    std::vector<std::pair<Symbol, const Expr*>> subs;
    subs.reserve(assignments.size());
    for (const auto& [name, value] : assignments) {
        subs.emplace_back(Symbol(name), &value);
    }
    auto lookup = [&](const Symbol& s) -> const Expr* {
        for (const auto& [sym, value] : subs) {
            if (sym == s) {
                return value;
            }
        }
        return nullptr;
    };
    auto touches = [&](const Rep* r) {
        for (const auto& [sym, value] : subs) {
            if (rep_depends_on(r, sym)) {
                return true;
            }
        }
        return false;
    };
    std::map<std::pair<std::string, int>, Expr> power_cache;
    std::vector<Term> out;
    for (const auto& t : e.terms()) {
        bool hit = false;
        for (const auto& [s, k] : t.mono.powers) {
            hit = hit || lookup(s) != nullptr;
        }
        const bool exp_hit = touches(t.mono.exponent.get());
        bool atom_hit = false;
        for (const auto& [atom, k] : t.mono.atoms) {
            atom_hit = atom_hit || touches(atom.arg.get());
        }
        if (!hit && !exp_hit && !atom_hit) {
            out.push_back(t);
            continue;
        }
        Monomial kept;
        Expr factor(t.coeff);
        for (const auto& [s, k] : t.mono.powers) {
            if (const Expr* v = lookup(s)) {
                auto key = std::make_pair(s.name(), k);
                auto it = power_cache.find(key);
                if (it == power_cache.end()) {
                    it = power_cache.emplace(key, v->pow(k)).first;
                }
                factor = factor * it->second;
            } else {
                kept.powers.emplace_back(s, k);
            }
        }
        if (exp_hit) {
            factor = factor * exp(substitute(expr_of(t.mono.exponent), assignments));
        } else {
            kept.exponent = t.mono.exponent;
        }
        for (const auto& [atom, k] : t.mono.atoms) {
            if (!touches(atom.arg.get())) {
                kept.atoms.emplace_back(atom, k);
                continue;
            }
            const Expr arg = substitute(expr_of(atom.arg), assignments);
            if (atom.kind == Atom::Kind::Exp) {
                factor = factor * exp(arg);
            } else {
                factor = factor * inverse(arg).pow(k);
            }
        }
        const Expr contribution = monomial_expr(std::move(kept)) * factor;
        out.insert(out.end(), contribution.terms().begin(), contribution.terms().end());
    }
    return Expr::from_terms(std::move(out));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::complex<double> eval_rep(const Rep* r, const NumericPoint& point);

std::complex<double> eval_term(const Term& t, const NumericPoint& point) {
    std::complex<double> v = t.coeff.to_complex();
    for (const auto& [s, k] : t.mono.powers) {
        auto it = point.find(s.name());
        if (it == point.end()) {
            throw UnboundSymbolError(s.name());
        }
        v *= std::pow(it->second, k);
    }
    if (t.mono.exponent) {
        v *= std::exp(eval_rep(t.mono.exponent.get(), point));
    }
    for (const auto& [atom, k] : t.mono.atoms) {
        const auto a = eval_rep(atom.arg.get(), point);
        if (atom.kind == Atom::Kind::Exp) {
            v *= std::exp(a);
        } else {
            v /= std::pow(a, k);
        }
    }
    return v;
}

std::complex<double> eval_rep(const Rep* r, const NumericPoint& point) {
    std::complex<double> sum = 0.0;
    if (!r) {
        return sum;
    }
    for (const auto& t : r->terms) {
        sum += eval_term(t, point);
    }
    return sum;
}

}  // namespace

std::complex<double> eval(const Expr& e, const NumericPoint& point) { return eval_rep(e.rep().get(), point); }

const char* to_string(Certificate c) { return c == Certificate::Exact ? "exact" : "probabilistic"; }

ZeroVerdict is_zero(const Expr& e, const ZeroTestOptions& opts) {
    if (e.is_zero()) {
        return {true, Certificate::Exact};
    }
    if (e.in_canonical_class()) {
        return {false, Certificate::Exact};
    }
    const auto symbols = e.free_symbols();
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int samples = std::max(20, opts.samples);
    for (int s = 0; s < samples; ++s) {
        NumericPoint point;
        for (const auto& name : symbols) {
            point[name] = dist(rng);
        }
        std::complex<double> value = 0.0;
        double scale = 1.0;
        for (const auto& t : e.terms()) {
            const auto tv = eval_term(t, point);
            value += tv;
            scale += std::abs(tv);
        }
        if (!std::isfinite(std::abs(value)) || std::abs(value) > opts.tolerance * scale) {
            return {false, Certificate::Probabilistic};
        }
    }
    return {true, Certificate::Probabilistic};
}

// ---------------------------------------------------------------------------
// CompiledExpr

struct CompiledExpr::Node {
    struct CTerm {
        std::complex<double> coeff;
        std::vector<std::pair<std::size_t, int>> powers;
        std::shared_ptr<const Node> exponent;
        std::vector<std::pair<bool, std::shared_ptr<const Node>>> atoms;  // (is_exp, arg)
        std::vector<int> atom_powers;
    };
    std::vector<CTerm> terms;

    std::complex<double> eval(const std::complex<double>* values) const {
        std::complex<double> sum = 0.0;
        for (const auto& t : terms) {
            std::complex<double> v = t.coeff;
            for (const auto& [idx, k] : t.powers) {
                const auto x = values[idx];
                if (k == 1) {
                    v *= x;
                } else if (k == 2) {
                    v *= x * x;
                } else {
                    v *= std::pow(x, k);
                }
            }
            if (t.exponent) {
                v *= std::exp(t.exponent->eval(values));
            }
            for (std::size_t a = 0; a < t.atoms.size(); ++a) {
                const auto arg = t.atoms[a].second->eval(values);
                v = t.atoms[a].first ? v * std::exp(arg) : v / std::pow(arg, t.atom_powers[a]);
            }
            sum += v;
        }
        return sum;
    }
};

namespace {

std::shared_ptr<const CompiledExpr::Node> compile_rep(const Rep* r, const std::vector<std::string>& vars);

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e, std::vector<std::string> variables) : variables_(std::move(variables)) {
    for (const auto& name : e.free_symbols()) {
        if (std::find(variables_.begin(), variables_.end(), name) == variables_.end()) {
            throw UnboundSymbolError(name);
        }
    }
    root_ = compile_rep(e.rep().get(), variables_);
}

std::complex<double> CompiledExpr::operator()(const std::complex<double>* values) const {
    return root_ ? root_->eval(values) : 0.0;
}

namespace {

std::shared_ptr<const CompiledExpr::Node> compile_rep(const Rep* r, const std::vector<std::string>& vars) {
    if (!r) {
        return nullptr;
    }
    auto node = std::make_shared<CompiledExpr::Node>();
    for (const auto& t : r->terms) {
        CompiledExpr::Node::CTerm ct;
        ct.coeff = t.coeff.to_complex();
        for (const auto& [s, k] : t.mono.powers) {
            auto idx = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), s.name()) - vars.begin());
            ct.powers.emplace_back(idx, k);
        }
        ct.exponent = compile_rep(t.mono.exponent.get(), vars);
        for (const auto& [atom, k] : t.mono.atoms) {
            ct.atoms.emplace_back(atom.kind == Atom::Kind::Exp, compile_rep(atom.arg.get(), vars));
            ct.atom_powers.push_back(k);
        }
        node->terms.push_back(std::move(ct));
    }
    return node;
}

}  // namespace

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string rep_str(const Rep* r);

bool negative_coeff(const Gauss& c) {
    return (c.is_real() && sgn(c.re()) < 0) || (sgn(c.re()) == 0 && sgn(c.im()) < 0);
}

std::string factors_str(const Monomial& m) {
    std::string out;
    auto append = [&](const std::string& f) {
        if (!out.empty()) {
            out += "*";
        }
        out += f;
    };
    for (const auto& [s, k] : m.powers) {
        append(k == 1 ? s.name() : s.name() + "^" + std::to_string(k));
    }
    if (m.exponent) {
        append("exp(" + rep_str(m.exponent.get()) + ")");
    }
    for (const auto& [atom, k] : m.atoms) {
        if (atom.kind == Atom::Kind::Exp) {
            append("exp(" + rep_str(atom.arg.get()) + ")");
        } else {
            append("(" + rep_str(atom.arg.get()) + ")^-" + std::to_string(k));
        }
    }
    return out;
}

std::string term_str(const Gauss& c, const Monomial& m) {
    const std::string f = factors_str(m);
    if (f.empty()) {
        return c.str();
    }
    if (c.is_one()) {
        return f;
    }
    if (c == Gauss(-1)) {
        return "-" + f;
    }
    return c.str() + "*" + f;
}

std::string rep_str(const Rep* r) {
    if (!r) {
        return "0";
    }
    std::string out;
    bool first = true;
    for (auto it = r->terms.rbegin(); it != r->terms.rend(); ++it) {
        if (first) {
            out += term_str(it->coeff, it->mono);
            first = false;
        } else if (negative_coeff(it->coeff)) {
            out += " - " + term_str(-it->coeff, it->mono);
        } else {
            out += " + " + term_str(it->coeff, it->mono);
        }
    }
    return out;
}

}  // namespace

std::string Expr::str() const { return rep_str(rep_.get()); }

// ---------------------------------------------------------------------------
// Bindings

const char* to_string(VarRole r) {
    switch (r) {
        case VarRole::Coordinate:
            return "coordinate";
        case VarRole::Momentum:
            return "momentum";
        case VarRole::Parameter:
            return "parameter";
        case VarRole::Constant:
            return "constant";
    }
    return "?";
}

std::string momentum_name(std::size_t k) { return "xi" + std::to_string(k + 1); }

std::vector<std::string> momentum_names(std::size_t d) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < d; ++k) {
        out.push_back(momentum_name(k));
    }
    return out;
}

VarBinding::VarBinding(std::initializer_list<Var> vars) {
    for (const auto& v : vars) {
        add(v.name, v.role);
    }
}

VarBinding& VarBinding::add(std::string name, VarRole role) {
    if (name == "i" || name == "exp" || name == "sin" || name == "cos") {
        throw std::invalid_argument("'" + name + "' is reserved and cannot be declared");
    }
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) {
        throw std::invalid_argument("invalid identifier '" + name + "'");
    }
    for (char ch : name) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') {
            throw std::invalid_argument("invalid identifier '" + name + "'");
        }
    }
    if (declares(name)) {
        throw std::invalid_argument("duplicate declaration of '" + name + "'");
    }
    vars_.push_back({std::move(name), role});
    return *this;
}

VarBinding& VarBinding::with_momenta() {
    const std::size_t d = dimension();
    for (std::size_t k = 0; k < d; ++k) {
        if (!declares(momentum_name(k))) {
            add(momentum_name(k), VarRole::Momentum);
        }
    }
    return *this;
}

bool VarBinding::declares(std::string_view name) const { return role_of(name).has_value(); }

std::optional<VarRole> VarBinding::role_of(std::string_view name) const {
    for (const auto& v : vars_) {
        if (v.name == name) {
            return v.role;
        }
    }
    return std::nullopt;
}

std::vector<std::string> VarBinding::names(VarRole role) const {
    std::vector<std::string> out;
    for (const auto& v : vars_) {
        if (v.role == role) {
            out.push_back(v.name);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    Parser(std::string_view text, const VarBinding* binding) : text_(text), binding_(binding) {}

    Expr parse_all() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) {
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) {
                throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
            }
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr parse_sum() {
        Expr e = parse_product();
        for (;;) {
            if (accept('+')) {
                e = e + parse_product();
            } else if (accept('-')) {
                e = e - parse_product();
            } else {
                return e;
            }
        }
    }

    Expr parse_product() {
        Expr e = parse_unary();
        for (;;) {
            if (accept('*')) {
                e = e * parse_unary();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Expr d = parse_unary();
                if (d.is_zero()) {
                    throw ParseError("division by zero", at);
                }
                e = e / d;
            } else {
                return e;
            }
        }
    }

    Expr parse_unary() {
        if (accept('-')) {
            return -parse_unary();
        }
        if (accept('+')) {
            return parse_unary();
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (!accept('^')) {
            return base;
        }
        skip_ws();
        bool paren = accept('(');
        int sign = 1;
        if (accept('-')) {
            sign = -1;
        } else {
            accept('+');
        }
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (start == pos_) {
            throw ParseError("exponent must be an integer literal", start);
        }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            throw ParseError("exponent must be an integer literal", pos_);
        }
        const long n = std::stol(std::string(text_.substr(start, pos_ - start)));
        if (paren) {
            expect(')');
        }
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '^') {
            throw ParseError("chained '^' is ambiguous; use parentheses", pos_);
        }
        if (base.is_zero() && sign * n < 0) {
            throw ParseError("zero raised to a negative power", start);
        }
        return base.pow(static_cast<int>(sign * n));
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) {
            throw ParseError("unexpected end of input", pos_);
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string name(text_.substr(start, pos_ - start));
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                if (name != "exp" && name != "sin" && name != "cos") {
                    throw ParseError("unknown function '" + name + "'", start);
                }
                ++pos_;
                Expr arg = parse_sum();
                expect(')');
                if (name == "exp") {
                    return exp(arg);
                }
                return name == "sin" ? sin(arg) : cos(arg);
            }
            if (name == "i") {
                return Expr::imag_unit();
            }
            if (name == "exp" || name == "sin" || name == "cos") {
                throw ParseError("function '" + name + "' requires an argument", start);
            }
            if (binding_ && !binding_->declares(name)) {
                throw ParseError("undeclared identifier '" + name + "'", start);
            }
            return Expr::symbol(name);
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        std::string digits(text_.substr(start, pos_ - start));
        long scale = 0;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            const std::size_t frac_start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            digits += std::string(text_.substr(frac_start, pos_ - frac_start));
            scale = static_cast<long>(pos_ - frac_start);
        }
        if (digits.empty()) {
            throw ParseError("malformed number", start);
        }
        mpz_class num(digits, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(scale));
        Rational q(num, den);
        q.canonicalize();
        return Expr(Gauss(q));
    }

    std::string_view text_;
    const VarBinding* binding_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const VarBinding& binding) { return Parser(text, &binding).parse_all(); }

Expr parse(std::string_view text) { return Parser(text, nullptr).parse_all(); }

}  // namespace quantact
