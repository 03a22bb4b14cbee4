#include "quantact/dga.hpp"

#include <sstream>

namespace quantact {

namespace {

std::size_t tuple_count(const Action& action, int k) {
    if (!action.is_finite()) {
        return 1;
    }
    std::size_t n = 1;
    for (int i = 0; i < k; ++i) {
        n *= static_cast<std::size_t>(action.finite_group().size());
    }
    return n;
}

std::size_t finite_index(const Action& action, const std::vector<Element>& args) {
    const auto n = static_cast<std::size_t>(action.finite_group().size());
    std::size_t idx = 0;
    for (const auto& g : args) {
        idx = idx * n + static_cast<std::size_t>(g.index);
    }
    return idx;
}

/// Slot substitution for evaluating a parametrized template at `args`;
/// empty when args already are the generic slots.
std::map<std::string, Expr> slot_substitution(const Action& action, const std::vector<Element>& args) {
    std::map<std::string, Expr> subs;
    const auto& params = action.param_group().params();
    for (std::size_t s = 0; s < args.size(); ++s) {
        for (std::size_t p = 0; p < params.size(); ++p) {
            const std::string slot = slot_symbol(params[p], static_cast<int>(s) + 1);
            if (args[s].params.at(p) != Expr::symbol(slot)) {
                subs[slot] = args[s].params[p];
            }
        }
    }
    return subs;
}

std::vector<Element> merged(const Action& action, const std::vector<Element>& g, std::size_t i) {
    // g_1..g_{i-1}, g_i g_{i+1}, g_{i+2}.. with 1-based i
    std::vector<Element> out;
    for (std::size_t j = 0; j + 1 < i; ++j) {
        out.push_back(g[j]);
    }
    out.push_back(action.multiply(g[i - 1], g[i]));
    for (std::size_t j = i + 1; j < g.size(); ++j) {
        out.push_back(g[j]);
    }
    return out;
}

std::vector<Element> slice(const std::vector<Element>& g, std::size_t begin, std::size_t end) {
    return std::vector<Element>(g.begin() + static_cast<std::ptrdiff_t>(begin),
                                g.begin() + static_cast<std::ptrdiff_t>(end));
}

ZeroVerdict combine(ZeroVerdict a, const ZeroVerdict& b) {
    a.zero = a.zero && b.zero;
    if (b.certificate == Certificate::Probabilistic) {
        a.certificate = Certificate::Probabilistic;
    }
    return a;
}

ZeroVerdict symbol_zero(const FormalSymbol& s, const ZeroTestOptions& opts) {
    ZeroVerdict v{true, Certificate::Exact};
    for (int n = 0; n <= s.order(); ++n) {
        for (const auto& [a, f] : s.at(n)) {
            v = combine(v, is_zero(f, opts));
            if (!v.zero) {
                return v;
            }
        }
    }
    return v;
}


}  // namespace

std::vector<std::vector<Element>> argument_tuples(const Action& action, int k) {
    std::vector<std::vector<Element>> out;
    if (!action.is_finite()) {
        std::vector<Element> g;
        for (int s = 1; s <= k; ++s) {
            g.push_back(action.generic(s));
        }
        out.push_back(std::move(g));
        return out;
    }
    const int n = action.finite_group().size();
    const std::size_t total = tuple_count(action, k);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<Element> g(static_cast<std::size_t>(k));
        std::size_t rest = idx;
        for (int i = k - 1; i >= 0; --i) {
            g[static_cast<std::size_t>(i)] = Element::finite(static_cast<int>(rest % static_cast<std::size_t>(n)));
            rest /= static_cast<std::size_t>(n);
        }
        out.push_back(std::move(g));
    }
    return out;
}

Element product(const Action& action, const std::vector<Element>& g, std::size_t begin, std::size_t end) {
    Element p = action.identity();
    for (std::size_t i = begin; i < end; ++i) {
        p = (i == begin) ? g[i] : action.multiply(p, g[i]);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Cochain

Cochain::Cochain(std::shared_ptr<const Action> action, int degree, int order)
    : action_(std::move(action)), degree_(degree), order_(order) {
    if (degree < 0) {
        throw std::invalid_argument("cochain degree must be non-negative");
    }
    table_.assign(tuple_count(*action_, degree), FormalSymbol(action_->dimension(), order));
}

Cochain Cochain::constant(std::shared_ptr<const Action> action, int degree, const FormalSymbol& value) {
    Cochain c(std::move(action), degree, value.order());
    for (auto& v : c.table_) {
        v = value;
    }
    return c;
}

Cochain Cochain::from_function(std::shared_ptr<const Action> action, int degree, int order,
                               const std::function<FormalSymbol(const std::vector<Element>&)>& fn) {
    Cochain c(action, degree, order);
    const auto tuples = argument_tuples(*action, degree);
    for (std::size_t k = 0; k < tuples.size(); ++k) {
        c.set_stored(k, fn(tuples[k]));
    }
    return c;
}

void Cochain::set_stored(std::size_t k, FormalSymbol v) {
    if (v.dimension() != dimension()) {
        throw DimensionMismatch("cochain value has the wrong dimension");
    }
    table_.at(k) = v.order() == order_ ? std::move(v) : v.truncated(order_);
}

FormalSymbol Cochain::value(const std::vector<Element>& args) const {
    if (static_cast<int>(args.size()) != degree_) {
        throw std::invalid_argument("cochain of degree " + std::to_string(degree_) + " evaluated on " +
                                    std::to_string(args.size()) + " arguments");
    }
    if (action_->is_finite()) {
        return table_[finite_index(*action_, args)];
    }
    const auto subs = slot_substitution(*action_, args);
    if (subs.empty()) {
        return table_[0];
    }
    return table_[0].map_coefficients([&](const Expr& f) { return substitute(f, subs); });
}

bool Cochain::is_zero() const {
    return std::all_of(table_.begin(), table_.end(), [](const FormalSymbol& s) { return s.is_zero(); });
}

ZeroVerdict Cochain::zero_verdict(const ZeroTestOptions& opts) const {
    ZeroVerdict v{true, Certificate::Exact};
    for (const auto& s : table_) {
        v = combine(v, symbol_zero(s, opts));
        if (!v.zero) {
            break;
        }
    }
    return v;
}

void Cochain::check_compatible(const Cochain& o) const {
    if (action_ != o.action_ || degree_ != o.degree_) {
        throw std::invalid_argument("cochains of different actions or degrees");
    }
}

Cochain Cochain::operator+(const Cochain& o) const {
    check_compatible(o);
    Cochain r(action_, degree_, std::min(order_, o.order_));
    for (std::size_t k = 0; k < table_.size(); ++k) {
        r.table_[k] = table_[k].truncated(r.order_) + o.table_[k];
    }
    return r;
}

Cochain Cochain::operator-(const Cochain& o) const { return *this + o.scaled(Expr(-1)); }

Cochain Cochain::scaled(const Expr& c) const {
    Cochain r = *this;
    for (auto& v : r.table_) {
        v = v.scaled(c);
    }
    return r;
}

Cochain Cochain::order_part(int n) const {
    Cochain r = *this;
    for (auto& v : r.table_) {
        v = v.order_part(n);
    }
    return r;
}

Cochain Cochain::truncated(int order) const {
    Cochain r(action_, degree_, order);
    for (std::size_t k = 0; k < table_.size(); ++k) {
        r.table_[k] = table_[k].truncated(order);
    }
    return r;
}

std::string Cochain::serialize() const {
    std::ostringstream out;
    out << "cochain action=" << action_->name() << " degree=" << degree_ << " order=" << order_ << "\n";
    const auto tuples = argument_tuples(*action_, degree_);
    for (std::size_t k = 0; k < tuples.size(); ++k) {
        if (table_[k].is_zero()) {
            continue;
        }
        out << "at (";
        for (std::size_t i = 0; i < tuples[k].size(); ++i) {
            const auto& g = tuples[k][i];
            out << (i ? ", " : "") << (g.index >= 0 ? action_->finite_group().name(g.index) : g.str());
        }
        out << ")\n" << table_[k].serialize();
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// DGA operations

Cochain d(const Cochain& a) {
    const Action& action = a.action();
    const int k = a.degree();
    if (k == 0) {
        return Cochain(a.action_ptr(), 1, a.order());
    }
    if (a.is_zero()) {
        return Cochain(a.action_ptr(), k + 1, a.order());
    }
    return Cochain::from_function(a.action_ptr(), k + 1, a.order(), [&](const std::vector<Element>& g) {
        FormalSymbol sum(a.dimension(), a.order());
        for (std::size_t i = 1; i <= static_cast<std::size_t>(k); ++i) {
            FormalSymbol v = a.value(merged(action, g, i));
            if (v.is_zero()) {
                continue;
            }
            sum += (i % 2 == 1) ? -v : v;
        }
        return sum;
    });
}

Cochain star_graded(const Cochain& a, const Cochain& b) {
    if (a.action_ptr() != b.action_ptr()) {
        throw std::invalid_argument("cochains of different actions");
    }
    const Action& action = a.action();
    const auto k = static_cast<std::size_t>(a.degree());
    const auto l = static_cast<std::size_t>(b.degree());
    const int order = std::min(a.order(), b.order());
    if (a.is_zero() || b.is_zero()) {
        return Cochain(a.action_ptr(), static_cast<int>(k + l), order);
    }
    return Cochain::from_function(a.action_ptr(), static_cast<int>(k + l), order, [&](const std::vector<Element>& g) {
        const FormalSymbol av = a.value(slice(g, 0, k));
        if (av.is_zero()) {
            return FormalSymbol(a.dimension(), order);
        }
        const FormalSymbol bv = b.value(slice(g, k, k + l));
        if (bv.is_zero()) {
            return FormalSymbol(a.dimension(), order);
        }
        return star(av, action.diffeo(product(action, g, 0, k)), bv, action.diffeo(product(action, g, k, k + l)));
    });
}

Cochain mc_residual(const Cochain& a) {
    if (a.degree() != 1) {
        throw std::invalid_argument("the Maurer-Cartan residual is defined for degree-1 cochains");
    }
    return d(a) + star_graded(a, a);
}

ZeroVerdict is_maurer_cartan(const Cochain& a, const ZeroTestOptions& opts) {
    return mc_residual(a).zero_verdict(opts);
}

Cochain twisted_d(const Cochain& p0, const Cochain& a, bool verify) {
    if (p0.degree() != 1) {
        throw std::invalid_argument("twisting element must have degree 1");
    }
    if (verify) {
        const auto v = is_maurer_cartan(p0);
        if (!v.zero) {
            throw NotMaurerCartan("twisted differential needs a Maurer-Cartan element");
        }
    }
    Cochain out = d(a) + star_graded(p0, a);
    const Cochain right = star_graded(a, p0);
    return (a.degree() % 2 == 0) ? out - right : out + right;
}

Cochain gauge_transform(const Cochain& a, const FormalSymbol& u) {
    const Action& action = a.action();
    const Diffeo id = Diffeo::identity(action.coordinates());
    const FormalSymbol uinv = star_inverse(u, action.coordinates());
    const int order = std::min(a.order(), u.order());
    return Cochain::from_function(a.action_ptr(), a.degree(), order, [&](const std::vector<Element>& g) {
        const Diffeo phi = action.diffeo(product(action, g, 0, g.size()));
        return star(star(u, id, a.value(g), phi), phi, uinv, id);
    });
}

GaugeVerdict gauge_check(const Cochain& a, const Cochain& b, const FormalSymbol& u) {
    if (a.degree() != 1 || b.degree() != 1) {
        throw std::invalid_argument("gauge check compares degree-1 cochains");
    }
    const Action& action = a.action();
    const Diffeo id = Diffeo::identity(action.coordinates());
    std::vector<Element> elems;
    if (action.is_finite()) {
        elems = action.elements();
    } else {
        elems.push_back(action.generic(1));
        for (const auto& s : action.elements()) {
            elems.push_back(s);
        }
    }
    GaugeVerdict out{true, Certificate::Exact, {}};
    for (const auto& g : elems) {
        const Diffeo phi = action.diffeo(g);
        const FormalSymbol lhs = star(a.value({g}), phi, u, id);
        const FormalSymbol rhs = star(u, id, b.value({g}), phi);
        const FormalSymbol diff_sym = lhs - rhs;
        const auto v = symbol_zero(diff_sym, {});
        if (v.certificate == Certificate::Probabilistic) {
            out.certificate = Certificate::Probabilistic;
        }
        if (!v.zero) {
            out.equivalent = false;
            out.detail = "fails at " + (g.index >= 0 ? action.finite_group().name(g.index) : g.str()) + ":\n" +
                         diff_sym.serialize();
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phase cochains

PhaseCochain::PhaseCochain(std::shared_ptr<const Action> action, int degree)
    : action_(std::move(action)), degree_(degree) {
    table_.assign(tuple_count(*action_, degree), Expr());
}

PhaseCochain PhaseCochain::from_function(std::shared_ptr<const Action> action, int degree,
                                         const std::function<Expr(const std::vector<Element>&)>& fn) {
    PhaseCochain c(action, degree);
    const auto tuples = argument_tuples(*action, degree);
    for (std::size_t k = 0; k < tuples.size(); ++k) {
        c.table_[k] = fn(tuples[k]);
    }
    return c;
}

PhaseCochain PhaseCochain::from_template(std::shared_ptr<const Action> action, const Expr& s) {
    if (action->is_finite()) {
        throw std::invalid_argument("parameter templates need a parametrized group");
    }
    PhaseCochain c(action, 1);
    std::map<std::string, Expr> subs;
    for (const auto& p : action->param_group().params()) {
        subs[p] = Expr::symbol(slot_symbol(p, 1));
    }
    c.table_[0] = substitute(s, subs);
    return c;
}

Expr PhaseCochain::value(const std::vector<Element>& args) const {
    if (static_cast<int>(args.size()) != degree_) {
        throw std::invalid_argument("phase cochain evaluated on the wrong number of arguments");
    }
    if (action_->is_finite()) {
        return table_[finite_index(*action_, args)];
    }
    return substitute(table_[0], slot_substitution(*action_, args));
}

ZeroVerdict PhaseCochain::zero_verdict(const ZeroTestOptions& opts) const {
    ZeroVerdict v{true, Certificate::Exact};
    for (const auto& e : table_) {
        v = combine(v, is_zero(e, opts));
    }
    return v;
}

PhaseCochain PhaseCochain::operator+(const PhaseCochain& o) const {
    if (action_ != o.action_ || degree_ != o.degree_) {
        throw std::invalid_argument("phase cochains of different actions or degrees");
    }
    PhaseCochain r = *this;
    for (std::size_t k = 0; k < table_.size(); ++k) {
        r.table_[k] += o.table_[k];
    }
    return r;
}

PhaseCochain PhaseCochain::operator-(const PhaseCochain& o) const {
    PhaseCochain neg = o;
    for (auto& e : neg.table_) {
        e = -e;
    }
    return *this + neg;
}

PhaseCochain delta_phase(const PhaseCochain& s) {
    const Action& action = s.action();
    const int k = s.degree();
    return PhaseCochain::from_function(
        s.action_ptr(), k + 1, [&](const std::vector<Element>& g) {
            Expr sum = action.diffeo(g[0]).pullback(s.value(slice(g, 1, g.size())));
            for (std::size_t i = 1; i <= static_cast<std::size_t>(k); ++i) {
                const Expr v = s.value(merged(action, g, i));
                sum += (i % 2 == 1) ? -v : v;
            }
            const Expr last = s.value(slice(g, 0, static_cast<std::size_t>(k)));
            sum += (k % 2 == 0) ? -last : last;
            return sum;
        });
}


Cochain exp_system(const PhaseCochain& s, int order) {
    const std::size_t dim = s.action().dimension();
    std::vector<FormalSymbol> values;
    for (std::size_t k = 0; k < s.stored_count(); ++k) {
        values.push_back(FormalSymbol::constant(dim, order, exp(Expr::imag_unit() * s.stored(k))));
    }
    Cochain c(s.action_ptr(), s.degree(), order);
    for (std::size_t k = 0; k < values.size(); ++k) {
        c.set_stored(k, values[k]);
    }
    return c;
}

PhaseCochain phase_from_invariants(std::shared_ptr<const Action> action, const std::vector<Expr>& h,
                                   const std::vector<Expr>& characters) {
    if (h.size() != characters.size()) {
        throw std::invalid_argument("need one character per invariant function");
    }
    Expr s;
    for (std::size_t k = 0; k < h.size(); ++k) {
        s += h[k] * characters[k];
    }
    return PhaseCochain::from_template(std::move(action), s);
}

// ---------------------------------------------------------------------------
// Coefficient bases

CoefficientBasis::CoefficientBasis(std::vector<Expr> functions) : functions_(std::move(functions)) {
    std::vector<SparseVec> cols;
    for (const auto& f : functions_) {
        SparseVec col;
        for (const auto& t : f.terms()) {
            auto [it, inserted] = monomial_index_.emplace(t.mono, static_cast<int>(monomial_index_.size()));
            col[it->second] = t.coeff;
        }
        cols.push_back(std::move(col));
    }
    matrix_ = SparseMatrix::from_columns(static_cast<int>(monomial_index_.size()), cols);
    if (rank(matrix_) != static_cast<int>(functions_.size())) {
        throw std::invalid_argument("basis functions are linearly dependent");
    }
}

CoefficientBasis CoefficientBasis::monomials(const std::vector<std::string>& coords, int max_degree) {
    std::vector<Expr> fs;
    for (const auto& a : multi_indices(coords.size(), max_degree)) {
        Expr m(1);
        for (std::size_t k = 0; k < coords.size(); ++k) {
            if (a[k]) {
                m *= Expr::symbol(coords[k]).pow(a[k]);
            }
        }
        fs.push_back(m);
    }
    return CoefficientBasis(std::move(fs));
}

std::optional<std::vector<Gauss>> CoefficientBasis::coordinates_of(const Expr& f) const {
    SparseVec b;
    for (const auto& t : f.terms()) {
        auto it = monomial_index_.find(t.mono);
        if (it == monomial_index_.end()) {
            return std::nullopt;
        }
        b[it->second] = t.coeff;
    }
    const auto r = solve(matrix_, b);
    if (!r.consistent) {
        return std::nullopt;
    }
    std::vector<Gauss> out(functions_.size());
    for (const auto& [c, v] : r.solution) {
        out[static_cast<std::size_t>(c)] = v;
    }
    return out;
}

std::vector<std::string> CoefficientBasis::closure_failures(const Action& action) const {
    std::vector<std::string> out;
    for (const auto& g : action.elements()) {
        const Diffeo phi = action.diffeo(g);
        for (const auto& f : functions_) {
            const Expr moved = phi.pullback(f);
            if (!coordinates_of(moved)) {
                out.push_back("f = " + f.str() + " moved by " +
                              (g.index >= 0 ? action.finite_group().name(g.index) : g.str()) + " gives " +
                              moved.str() + ", outside the span");
            }
        }
    }
    return out;
}

std::vector<Expr> CoefficientBasis::invariants(const Action& action) const {
    const int m = static_cast<int>(functions_.size());
    std::vector<SparseVec> cols(static_cast<std::size_t>(m));
    int block = 0;
    for (const auto& g : action.elements()) {
        const Diffeo phi = action.diffeo(g);
        for (int j = 0; j < m; ++j) {
            const auto c = coordinates_of(phi.pullback(functions_[static_cast<std::size_t>(j)]));
            if (!c) {
                throw BasisSpanError("basis is not closed under the action");
            }
            auto& col = cols[static_cast<std::size_t>(j)];
            for (int i = 0; i < m; ++i) {
                Gauss v = (*c)[static_cast<std::size_t>(i)];
                if (i == j) {
                    v = v - Gauss(1);
                }
                if (!v.is_zero()) {
                    col[block + i] = v;
                }
            }
        }
        block += m;
    }
    const auto ker = kernel(SparseMatrix::from_columns(block, cols));
    std::vector<Expr> out;
    for (const auto& v : ker) {
        Expr f;
        for (const auto& [j, c] : v) {
            f += functions_[static_cast<std::size_t>(j)].scaled(c);
        }
        out.push_back(f);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pol^k(n)

namespace {

bool normalized_tuple(const Action& action, const std::vector<Element>& g) {
    const int e = action.finite_group().identity();
    return std::none_of(g.begin(), g.end(), [e](const Element& x) { return x.index == e; });
}

/// Row keys (stored tuple, alpha, monomial) for the canonical-term coordinates of cochains.
class RowIndexer {
public:
    int row(std::size_t tuple, const MultiIndex& a, const Monomial& m) {
        auto [it, inserted] = index_.emplace(Key{tuple, a, m}, static_cast<int>(keys_.size()));
        if (inserted) {
            keys_.push_back(it->first);
        }
        return it->second;
    }
    /// Coordinates of the order-n part of c, extending the index as needed.
    SparseVec coordinates(const Cochain& c, int n) {
        SparseVec v;
        for (std::size_t k = 0; k < c.stored_count(); ++k) {
            for (const auto& [a, f] : c.stored(k).at(n)) {
                for (const auto& t : f.terms()) {
                    v[row(k, a, t.mono)] = t.coeff;
                }
            }
        }
        return v;
    }
    int size() const { return static_cast<int>(keys_.size()); }
    /// Inverse of coordinates(): a cochain of pure order n.
    Cochain cochain(std::shared_ptr<const Action> action, int degree, int n, const SparseVec& v) const {
        Cochain c(action, degree, n);
        std::map<std::size_t, FormalSymbol> values;
        for (const auto& [r, coeff] : v) {
            const auto& [tuple, a, mono] = keys_[static_cast<std::size_t>(r)];
            auto it = values.try_emplace(tuple, action->dimension(), n).first;
            it->second.add_to(n, a, Expr::from_terms({Term{mono, coeff}}));
        }
        for (auto& [tuple, s] : values) {
            c.set_stored(tuple, std::move(s));
        }
        return c;
    }

private:
    using Key = std::tuple<std::size_t, MultiIndex, Monomial>;
    std::map<Key, int> index_;
    std::vector<Key> keys_;
};

void require_finite(const Action& action) {
    if (!action.is_finite()) {
        throw std::invalid_argument("the truncated complex needs a finite group");
    }
}

}  // namespace

PolSpace::PolSpace(std::shared_ptr<const Action> action, const CoefficientBasis& basis, int degree, int n)
    : action_(std::move(action)), basis_(basis), degree_(degree), n_(n) {
    require_finite(*action_);
    std::vector<std::size_t> tuples;
    const auto all = argument_tuples(*action_, degree);
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (normalized_tuple(*action_, all[k])) {
            tuples.push_back(k);
        }
    }
    const auto alphas = multi_indices(action_->dimension(), n);
    for (std::size_t b = 0; b < basis_.size(); ++b) {
        for (const auto& a : alphas) {
            for (std::size_t t : tuples) {
                index_[{t, a, b}] = static_cast<int>(coords_.size());
                coords_.push_back(Coord{t, a, b});
            }
        }
    }
}

Cochain PolSpace::element(const std::vector<Gauss>& coeffs) const {
    SparseVec v;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (!coeffs[k].is_zero()) {
            v[static_cast<int>(k)] = coeffs[k];
        }
    }
    return element(v);
}

Cochain PolSpace::element(const SparseVec& coeffs) const {
    Cochain c(action_, degree_, n_);
    std::map<std::size_t, FormalSymbol> values;
    for (const auto& [k, v] : coeffs) {
        const Coord& co = coords_.at(static_cast<std::size_t>(k));
        auto it = values.try_emplace(co.tuple, action_->dimension(), n_).first;
        it->second.add_to(n_, co.alpha, basis_.functions()[co.basis].scaled(v));
    }
    for (auto& [t, s] : values) {
        c.set_stored(t, std::move(s));
    }
    return c;
}

Cochain PolSpace::unit(int k) const { return element(SparseVec{{k, Gauss(1)}}); }

SparseVec PolSpace::coordinates_of(const Cochain& c) const {
    if (c.degree() != degree_) {
        throw std::invalid_argument("cochain degree does not match the space");
    }
    const auto tuples = argument_tuples(*action_, degree_);
    SparseVec out;
    for (std::size_t t = 0; t < c.stored_count(); ++t) {
        const FormalSymbol& s = c.stored(t);
        for (int m = 0; m <= s.order(); ++m) {
            if (s.at(m).empty()) {
                continue;
            }
            if (m != n_) {
                throw BasisSpanError("cochain has a component of order " + std::to_string(m) + ", expected pure order " +
                                     std::to_string(n_));
            }
            if (!normalized_tuple(*action_, tuples[t])) {
                throw BasisSpanError("cochain is not normalized: nonzero on a tuple containing the identity");
            }
            for (const auto& [a, f] : s.at(m)) {
                const auto coeffs = basis_.coordinates_of(f);
                if (!coeffs) {
                    throw BasisSpanError("coefficient " + f.str() + " lies outside the basis span");
                }
                for (std::size_t b = 0; b < coeffs->size(); ++b) {
                    if (!(*coeffs)[b].is_zero()) {
                        out[index_.at({t, a, b})] = (*coeffs)[b];
                    }
                }
            }
        }
    }
    return out;
}

std::string PolSpace::describe(int k) const {
    const Coord& co = coords_.at(static_cast<std::size_t>(k));
    const auto tuple = argument_tuples(*action_, degree_)[co.tuple];
    std::string g;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        g += (i ? "," : "") + action_->finite_group().name(tuple[i].index);
    }
    return "(" + g + ") xi^" + multi_index_str(co.alpha) + " " + basis_.functions()[co.basis].str();
}

namespace {

SparseMatrix twisted_matrix(const Cochain& p0, const PolSpace& domain, int n, RowIndexer& rows) {
    const Cochain p = p0.truncated(n);
    std::vector<SparseVec> cols;
    for (int k = 0; k < domain.dimension(); ++k) {
        cols.push_back(rows.coordinates(twisted_d(p, domain.unit(k), false), n));
    }
    return SparseMatrix::from_columns(rows.size(), cols);
}

void require_mc(const Cochain& p0) {
    if (!is_maurer_cartan(p0).zero) {
        throw NotMaurerCartan("twisting element is not Maurer-Cartan");
    }
}

void require_closed(const CoefficientBasis& basis, const Action& action) {
    const auto failures = basis.closure_failures(action);
    if (!failures.empty()) {
        throw BasisSpanError("coefficient basis not closed under the action: " + failures.front());
    }
}

}  // namespace

SparseMatrix twisted_d_matrix(const Cochain& p0, const PolSpace& domain, int n) {
    RowIndexer rows;
    return twisted_matrix(p0, domain, n, rows);
}

std::vector<CohomologyRow> cohomology_dims(std::shared_ptr<const Action> action, const CoefficientBasis& basis,
                                           const Cochain& p0, int n_max, int max_degree) {
    require_finite(*action);
    require_closed(basis, *action);
    require_mc(p0);
    std::vector<CohomologyRow> out;
    for (int n = 0; n <= n_max; ++n) {
        CohomologyRow row;
        row.n = n;
        for (int k = 0; k <= max_degree; ++k) {
            const PolSpace space(action, basis, k, n);
            row.cochain_dims.push_back(space.dimension());
            row.ranks.push_back(space.dimension() == 0 ? 0 : rank(twisted_d_matrix(p0, space, n)));
        }
        for (int k = 0; k <= max_degree; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const int below = k > 0 ? row.ranks[ku - 1] : 0;
            row.h.push_back(row.cochain_dims[ku] - row.ranks[ku] - below);
        }
        out.push_back(std::move(row));
    }
    return out;
}

OrderSolution solve_linear(const Cochain& p0, const Cochain& rhs, int n, const CoefficientBasis& basis) {
    if (rhs.degree() != 2) {
        throw std::invalid_argument("right-hand side must be a degree-2 cochain");
    }
    const auto action = p0.action_ptr();
    require_finite(*action);
    require_closed(basis, *action);
    require_mc(p0);

    OrderSolution out;
    const Cochain r = rhs.truncated(n).order_part(n);
    out.rhs_closed = twisted_d(p0.truncated(n), r, false).order_part(n).zero_verdict().zero;

    const PolSpace space(action, basis, 1, n);
    out.unknowns = space.dimension();
    RowIndexer rows;
    std::vector<SparseVec> cols;
    for (int k = 0; k < space.dimension(); ++k) {
        cols.push_back(rows.coordinates(twisted_d(p0.truncated(n), space.unit(k), false), n));
    }
    const SparseVec b = rows.coordinates(r, n);
    const SparseMatrix a = SparseMatrix::from_columns(rows.size(), cols);

    for (const auto& v : kernel(a)) {
        out.cocycle_basis.push_back(space.element(v));
    }
    for (std::size_t t = 0; t < r.stored_count() && out.rhs_in_span; ++t) {
        for (const auto& [alpha, f] : r.stored(t).at(n)) {
            if (!basis.coordinates_of(f)) {
                out.rhs_in_span = false;
                break;
            }
        }
    }
    if (!out.rhs_in_span) {
        return out;
    }
    const SolveResult sol = solve(a, b);
    out.solved = sol.consistent;
    if (sol.consistent) {
        out.solution = space.element(sol.solution);
    } else {
        out.obstruction = rows.cochain(action, 2, n, sol.residual);
    }
    return out;
}

OrderSolution solve_order(const Cochain& p0, const std::vector<Cochain>& below, int n,
                          const CoefficientBasis& basis) {
    if (n < 1 || below.size() + 1 != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("solve_order at order n needs P^1..P^{n-1}");
    }
    for (std::size_t i = 0; i < below.size(); ++i) {
        const Cochain& p = below[i];
        for (std::size_t t = 0; t < p.stored_count(); ++t) {
            for (int m = 0; m <= p.stored(t).order(); ++m) {
                for (const auto& [a, f] : p.stored(t).at(m)) {
                    if (!basis.coordinates_of(f)) {
                        throw BasisSpanError("P^" + std::to_string(i + 1) + " has coefficient " + f.str() +
                                             " outside the basis span");
                    }
                }
            }
        }
    }
    Cochain rhs(p0.action_ptr(), 2, n);
    for (int i = 1; i < n; ++i) {
        const Cochain& pi = below[static_cast<std::size_t>(i - 1)];
        const Cochain& pj = below[static_cast<std::size_t>(n - i - 1)];
        rhs = rhs - star_graded(pi.truncated(n), pj.truncated(n));
    }
    return solve_linear(p0, rhs, n, basis);
}

}  // namespace quantact
