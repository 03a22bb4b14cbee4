#pragma once

// Exact symbolic expressions over Gaussian rationals.
//
// Every Expr is kept in canonical form: a sum of terms
//     c * x1^k1 * ... * xn^kn * exp(P) * (opaque atoms)
// with c a Gaussian rational, integer (possibly negative) powers of named
// symbols, P a polynomial exponent, and sin/cos rewritten as complex
// exponentials. Within the polynomial-exponential-trigonometric class this
// form is unique, so zero testing there is exact. Anything else (exponentials
// of non-polynomials, reciprocals of sums) is kept as an opaque atom and zero
// tests fall back to randomized evaluation.

#include "quantact/gauss.hpp"

#include <boost/container/small_vector.hpp>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quantact {

/// Interned symbol name. Comparison is by name, so ordering is stable across runs.
class Symbol {
public:
    Symbol() = default;
    explicit Symbol(std::string_view name);

    const std::string& name() const { return *name_; }
    int compare(const Symbol& o) const {
        return name_ == o.name_ ? 0 : name_->compare(*o.name_);
    }
    friend bool operator==(const Symbol& a, const Symbol& b) { return a.name_ == b.name_; }
    friend bool operator<(const Symbol& a, const Symbol& b) { return a.compare(b) < 0; }

private:
    const std::string* name_ = nullptr;
};

class Expr;

namespace detail {
struct Rep;
}

/// Opaque factor outside the canonical class: exp(arg) for a non-polynomial
/// argument, or 1/arg for an argument that is not a single term.
struct Atom {
    enum class Kind { Exp, Inv };
    Kind kind;
    std::shared_ptr<const detail::Rep> arg;

    int compare(const Atom& o) const;
};

struct Monomial {
    boost::container::small_vector<std::pair<Symbol, int>, 4> powers;
    std::shared_ptr<const detail::Rep> exponent;  // null means exp(0)
    boost::container::small_vector<std::pair<Atom, int>, 1> atoms;

    bool is_one() const { return powers.empty() && !exponent && atoms.empty(); }
    int compare(const Monomial& o) const;
    friend bool operator<(const Monomial& a, const Monomial& b) { return a.compare(b) < 0; }
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.compare(b) == 0; }
};

struct Term {
    Monomial mono;
    Gauss coeff;
};

/// Immutable canonical expression. Cheap to copy; safe to share across threads.
class Expr {
public:
    Expr() = default;  // zero
    Expr(long v);      // NOLINT(google-explicit-constructor)
    Expr(const Gauss& c);  // NOLINT(google-explicit-constructor)

    static Expr symbol(std::string_view name);
    static Expr imag_unit() { return Expr(Gauss::i()); }
    static Expr fraction(long num, long den) { return Expr(Gauss::fraction(num, den)); }

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

    Expr pow(int n) const;
    Expr scaled(const Gauss& c) const;

    bool is_zero() const;  // canonical zero, i.e. exactly zero when in_canonical_class()
    bool is_constant() const;
    std::optional<Gauss> constant_value() const;
    /// True iff no opaque atoms occur anywhere.
    bool in_canonical_class() const;
    /// True iff the expression is a Laurent polynomial (no exp, no atoms).
    bool is_polynomial() const;

    std::set<std::string> free_symbols() const;
    bool depends_on(std::string_view name) const;
    /// Highest total power of the given symbols over all terms (-1 for zero).
    int degree_in(const std::vector<std::string>& names) const;

    const std::vector<Term>& terms() const;
    std::size_t term_count() const;

    std::string str() const;
    int compare(const Expr& o) const;
    friend bool operator==(const Expr& a, const Expr& b) { return a.compare(b) == 0; }
    friend bool operator!=(const Expr& a, const Expr& b) { return a.compare(b) != 0; }
    friend bool operator<(const Expr& a, const Expr& b) { return a.compare(b) < 0; }

    const std::shared_ptr<const detail::Rep>& rep() const { return rep_; }
    static Expr from_rep(std::shared_ptr<const detail::Rep> rep);
    static Expr from_terms(std::vector<Term> terms);  // canonicalizes

private:
    std::shared_ptr<const detail::Rep> rep_;  // null means zero
};

Expr exp(const Expr& arg);
Expr sin(const Expr& arg);
Expr cos(const Expr& arg);
/// Complex conjugate, treating every symbol as real.
Expr conj(const Expr& e);

Expr diff(const Expr& e, std::string_view var);
Expr substitute(const Expr& e, const std::map<std::string, Expr>& assignments);

enum class Certificate { Exact, Probabilistic };
const char* to_string(Certificate c);

struct ZeroVerdict {
    bool zero = false;
    Certificate certificate = Certificate::Exact;
    explicit operator bool() const { return zero; }
};

struct ZeroTestOptions {
    int samples = 24;          // never fewer than 20
    double tolerance = 1e-9;   // relative to the magnitude of the summed terms
    std::uint64_t seed = 0x5eedULL;
};

/// Exact for canonical-class inputs; randomized evaluation otherwise.
ZeroVerdict is_zero(const Expr& e, const ZeroTestOptions& opts = {});

using NumericPoint = std::map<std::string, std::complex<double>>;

class UnboundSymbolError : public std::runtime_error {
public:
    explicit UnboundSymbolError(const std::string& name)
        : std::runtime_error("unbound symbol '" + name + "' in evaluation"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

std::complex<double> eval(const Expr& e, const NumericPoint& point);

/// Expression flattened for repeated evaluation with a fixed variable order.
class CompiledExpr {
public:
    CompiledExpr(const Expr& e, std::vector<std::string> variables);
    std::complex<double> operator()(const std::complex<double>* values) const;
    std::complex<double> operator()(const std::vector<std::complex<double>>& values) const {
        return (*this)(values.data());
    }
    const std::vector<std::string>& variables() const { return variables_; }

    struct Node;

private:
    std::vector<std::string> variables_;
    std::shared_ptr<const Node> root_;
};

// ---------------------------------------------------------------------------
// Variable declarations and parsing

enum class VarRole { Coordinate, Momentum, Parameter, Constant };
const char* to_string(VarRole r);

class VarBinding {
public:
    struct Var {
        std::string name;
        VarRole role;
    };

    VarBinding() = default;
    VarBinding(std::initializer_list<Var> vars);

    VarBinding& add(std::string name, VarRole role);
    /// Adds momenta xi1..xid matching the coordinates.
    VarBinding& with_momenta();

    bool declares(std::string_view name) const;
    std::optional<VarRole> role_of(std::string_view name) const;
    std::vector<std::string> names(VarRole role) const;
    std::vector<std::string> coordinates() const { return names(VarRole::Coordinate); }
    std::size_t dimension() const { return coordinates().size(); }
    const std::vector<Var>& vars() const { return vars_; }

private:
    std::vector<Var> vars_;
};

/// Name of the k-th momentum variable (0-based k), "xi1", "xi2", ...
std::string momentum_name(std::size_t k);
std::vector<std::string> momentum_names(std::size_t d);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : std::runtime_error(msg + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Parses the infix grammar; every identifier must be declared in the binding.
Expr parse(std::string_view text, const VarBinding& binding);
/// Parses accepting any identifier as a symbol.
Expr parse(std::string_view text);

}  // namespace quantact
