#pragma once

// Truncated hbar-series sum_{n<=N} hbar^n P^n(x, xi) whose order-n term is a
// polynomial in xi of degree at most n.

#include "quantact/expr.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace quantact {

using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& a);
Rational multi_factorial(const MultiIndex& a);
/// All multi-indices of length d with |a| <= max_degree, graded then lexicographic.
std::vector<MultiIndex> multi_indices(std::size_t d, int max_degree);
std::string multi_index_str(const MultiIndex& a);

/// Graded order: total degree first, then reverse lexicographic (xi1 before xi2).
struct GradedLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

using PolyXi = std::map<MultiIndex, Expr, GradedLess>;

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FormalSymbol {
public:
    FormalSymbol(std::size_t dimension, int order);

    static FormalSymbol one(std::size_t dimension, int order) { return constant(dimension, order, Expr(1)); }
    /// f(x) placed at order zero.
    static FormalSymbol constant(std::size_t dimension, int order, const Expr& f);

    std::size_t dimension() const { return dim_; }
    int order() const { return static_cast<int>(terms_.size()) - 1; }

    /// Stores f at (n, a); zero coefficients are dropped, out-of-filtration indices rejected.
    void set(int n, const MultiIndex& a, const Expr& f);
    void add_to(int n, const MultiIndex& a, const Expr& f);
    Expr get(int n, const MultiIndex& a) const;
    const PolyXi& at(int n) const { return terms_.at(static_cast<std::size_t>(n)); }

    bool is_zero() const;
    std::size_t term_count() const;

    FormalSymbol operator+(const FormalSymbol& o) const;
    FormalSymbol operator-(const FormalSymbol& o) const;
    FormalSymbol operator-() const;
    FormalSymbol& operator+=(const FormalSymbol& o);
    FormalSymbol scaled(const Expr& c) const;
    /// Shifts every order up by one, dropping what falls past the truncation.
    FormalSymbol multiply_hbar() const;
    FormalSymbol truncated(int order) const;
    /// The single order n, other orders zeroed.
    FormalSymbol order_part(int n) const;
    FormalSymbol map_coefficients(const std::function<Expr(const Expr&)>& fn) const;

    /// P^n as an expression in the coordinates and xi1..xid.
    Expr order_expr(int n) const;

    friend bool operator==(const FormalSymbol& a, const FormalSymbol& b);
    friend bool operator!=(const FormalSymbol& a, const FormalSymbol& b) { return !(a == b); }

    /// One "n a1,..,ad coefficient" line per stored term.
    std::string serialize() const;
    static FormalSymbol deserialize(const std::string& text);

private:
    void check_compatible(const FormalSymbol& o) const;

    std::size_t dim_;
    std::vector<PolyXi> terms_;
};

enum class TaylorConvention {
    MultiFactorial,  // 1/a!
    TotalFactorial,  // 1/|a|!, kept for cross-checking only
};

/// Amplitude series a^0 + a^1 hbar + ... in (x, xi) -> FormalSymbol via
/// P^n = sum_{|a|<=n} c_a d_xi^a a^{n-|a|}(x, 0) xi^a.
FormalSymbol taylor_from_amplitude(const std::vector<Expr>& amplitude, std::size_t dimension, int order,
                                   TaylorConvention convention = TaylorConvention::MultiFactorial);

}  // namespace quantact
