#include "quantact/formal_symbol.hpp"

#include <numeric>
#include <sstream>

namespace quantact {

int total_degree(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

Rational multi_factorial(const MultiIndex& a) {
    Rational f(1);
    for (int k : a) {
        f *= factorial(static_cast<unsigned>(k));
    }
    return f;
}

bool GradedLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) {
        return da < db;
    }
    return b < a;
}

std::vector<MultiIndex> multi_indices(std::size_t d, int max_degree) {
    std::vector<MultiIndex> out;
    MultiIndex cur(d, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
        if (pos == d) {
            out.push_back(cur);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            cur[pos] = k;
            rec(pos + 1, left - k);
        }
        cur[pos] = 0;
    };
    if (max_degree >= 0) {
        rec(0, max_degree);
    }
    std::sort(out.begin(), out.end(), GradedLess{});
    return out;
}

std::string multi_index_str(const MultiIndex& a) {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) {
            out += ",";
        }
        out += std::to_string(a[i]);
    }
    return out.empty() ? "-" : out;
}

FormalSymbol::FormalSymbol(std::size_t dimension, int order) : dim_(dimension) {
    if (order < 0) {
        throw std::invalid_argument("truncation order must be non-negative");
    }
    terms_.resize(static_cast<std::size_t>(order) + 1);
}

FormalSymbol FormalSymbol::constant(std::size_t dimension, int order, const Expr& f) {
    FormalSymbol s(dimension, order);
    s.set(0, MultiIndex(dimension, 0), f);
    return s;
}

void FormalSymbol::set(int n, const MultiIndex& a, const Expr& f) {
    if (n < 0 || n > order()) {
        throw std::out_of_range("order " + std::to_string(n) + " outside truncation " + std::to_string(order()));
    }
    if (a.size() != dim_) {
        throw DimensionMismatch("multi-index length " + std::to_string(a.size()) + " but dimension is " +
                                std::to_string(dim_));
    }
    if (total_degree(a) > n) {
        throw std::invalid_argument("xi-degree " + std::to_string(total_degree(a)) + " exceeds order " +
                                    std::to_string(n));
    }
    auto& poly = terms_[static_cast<std::size_t>(n)];
    if (f.is_zero()) {
        poly.erase(a);
    } else {
        poly[a] = f;
    }
}

void FormalSymbol::add_to(int n, const MultiIndex& a, const Expr& f) {
    if (f.is_zero() || n > order()) {
        return;
    }
    set(n, a, get(n, a) + f);
}

Expr FormalSymbol::get(int n, const MultiIndex& a) const {
    if (n < 0 || n > order()) {
        return Expr();
    }
    const auto& poly = terms_[static_cast<std::size_t>(n)];
    auto it = poly.find(a);
    return it == poly.end() ? Expr() : it->second;
}

bool FormalSymbol::is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const PolyXi& p) { return p.empty(); });
}

std::size_t FormalSymbol::term_count() const {
    std::size_t n = 0;
    for (const auto& p : terms_) {
        n += p.size();
    }
    return n;
}

void FormalSymbol::check_compatible(const FormalSymbol& o) const {
    if (dim_ != o.dim_) {
        throw DimensionMismatch("symbols of dimension " + std::to_string(dim_) + " and " + std::to_string(o.dim_));
    }
}

FormalSymbol& FormalSymbol::operator+=(const FormalSymbol& o) {
    check_compatible(o);
    if (o.order() < order()) {
        terms_.resize(o.terms_.size());
    }
    for (int n = 0; n <= order(); ++n) {
        for (const auto& [a, f] : o.at(n)) {
            add_to(n, a, f);
        }
    }
    return *this;
}

FormalSymbol FormalSymbol::operator+(const FormalSymbol& o) const {
    FormalSymbol r = *this;
    r += o;
    return r;
}

FormalSymbol FormalSymbol::operator-() const { return scaled(Expr(-1)); }

FormalSymbol FormalSymbol::operator-(const FormalSymbol& o) const { return *this + (-o); }

FormalSymbol FormalSymbol::scaled(const Expr& c) const {
    return map_coefficients([&](const Expr& f) { return f * c; });
}

FormalSymbol FormalSymbol::multiply_hbar() const {
    FormalSymbol r(dim_, order());
    for (int n = 0; n < order(); ++n) {
        for (const auto& [a, f] : at(n)) {
            r.set(n + 1, a, f);
        }
    }
    return r;
}

FormalSymbol FormalSymbol::truncated(int new_order) const {
    FormalSymbol r(dim_, new_order);
    for (int n = 0; n <= std::min(new_order, order()); ++n) {
        r.terms_[static_cast<std::size_t>(n)] = terms_[static_cast<std::size_t>(n)];
    }
    return r;
}

FormalSymbol FormalSymbol::order_part(int n) const {
    FormalSymbol r(dim_, order());
    if (n >= 0 && n <= order()) {
        r.terms_[static_cast<std::size_t>(n)] = terms_[static_cast<std::size_t>(n)];
    }
    return r;
}

FormalSymbol FormalSymbol::map_coefficients(const std::function<Expr(const Expr&)>& fn) const {
    FormalSymbol r(dim_, order());
    for (int n = 0; n <= order(); ++n) {
        for (const auto& [a, f] : at(n)) {
            r.set(n, a, fn(f));
        }
    }
    return r;
}

Expr FormalSymbol::order_expr(int n) const {
    Expr sum;
    const auto xi = momentum_names(dim_);
    for (const auto& [a, f] : at(n)) {
        Expr m = f;
        for (std::size_t k = 0; k < dim_; ++k) {
            if (a[k]) {
                m *= Expr::symbol(xi[k]).pow(a[k]);
            }
        }
        sum += m;
    }
    return sum;
}

bool operator==(const FormalSymbol& a, const FormalSymbol& b) {
    if (a.dim_ != b.dim_ || a.order() != b.order()) {
        return false;
    }
    for (int n = 0; n <= a.order(); ++n) {
        const auto& pa = a.at(n);
        const auto& pb = b.at(n);
        if (pa.size() != pb.size()) {
            return false;
        }
        for (auto ia = pa.begin(), ib = pb.begin(); ia != pa.end(); ++ia, ++ib) {
            if (ia->first != ib->first || ia->second != ib->second) {
                return false;
            }
        }
    }
    return true;
}

std::string FormalSymbol::serialize() const {
    std::ostringstream out;
    out << "formal_symbol dimension=" << dim_ << " order=" << order() << "\n";
    for (int n = 0; n <= order(); ++n) {
        for (const auto& [a, f] : at(n)) {
            out << n << " " << multi_index_str(a) << " " << f.str() << "\n";
        }
    }
    return out.str();
}

FormalSymbol FormalSymbol::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument("formal symbol line " + std::to_string(lineno) + ": " + msg);
    };
    std::optional<FormalSymbol> sym;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') {
            continue;
        }
        if (!sym) {
            std::size_t d = 0;
            int order = -1;
            if (std::sscanf(line.c_str(), "formal_symbol dimension=%zu order=%d", &d, &order) != 2) {
                fail("expected header 'formal_symbol dimension=<d> order=<N>'");
            }
            sym.emplace(d, order);
            continue;
        }
        std::istringstream ls(line);
        int n = 0;
        std::string idx;
        if (!(ls >> n >> idx)) {
            fail("expected '<order> <a1,..,ad> <coefficient>'");
        }
        std::string coeff;
        std::getline(ls, coeff);
        MultiIndex a;
        if (idx != "-") {
            std::istringstream is(idx);
            std::string part;
            while (std::getline(is, part, ',')) {
                try {
                    a.push_back(std::stoi(part));
                } catch (const std::exception&) {
                    fail("bad multi-index '" + idx + "'");
                }
            }
        }
        try {
            sym->add_to(n, a, parse(coeff));
        } catch (const std::exception& e) {
            fail(e.what());
        }
    }
    if (!sym) {
        throw std::invalid_argument("formal symbol: missing header");
    }
    return *sym;
}

FormalSymbol taylor_from_amplitude(const std::vector<Expr>& amplitude, std::size_t dimension, int order,
                                   TaylorConvention convention) {
    FormalSymbol out(dimension, order);
    const auto xi = momentum_names(dimension);
    std::map<std::string, Expr> at_zero;
    for (const auto& name : xi) {
        at_zero[name] = Expr();
    }
    for (int k = 0; k <= order && k < static_cast<int>(amplitude.size()); ++k) {
        const int max_deg = order - k;
        // Derivatives d_xi^a a^k, built from the parent index with one fewer derivative.
        std::map<MultiIndex, Expr, GradedLess> derivs;
        for (const auto& a : multi_indices(dimension, max_deg)) {
            Expr d;
            if (total_degree(a) == 0) {
                d = amplitude[static_cast<std::size_t>(k)];
            } else {
                std::size_t j = 0;
                while (a[j] == 0) {
                    ++j;
                }
                MultiIndex parent = a;
                --parent[j];
                d = diff(derivs.at(parent), xi[j]);
            }
            derivs[a] = d;
            Rational c = multi_factorial(a);
            if (convention == TaylorConvention::TotalFactorial) {
                c = factorial(static_cast<unsigned>(total_degree(a)));
            }
            const Expr coeff = substitute(d, at_zero).scaled(Gauss(Rational(1) / c));
            out.add_to(k + total_degree(a), a, coeff);
        }
    }
    return out;
}

}  // namespace quantact
