#pragma once

// Cochains G^k -> FormalSymbol with the differential without boundary terms,
// the graded star product, Maurer-Cartan residuals, the phase complex and the
// order-by-order solver over finite groups.

#include "quantact/action.hpp"
#include "quantact/formal_symbol.hpp"
#include "quantact/linalg.hpp"
#include "quantact/opcalc.hpp"

#include <memory>
#include <optional>
#include <tuple>

namespace quantact {

/// Argument tuples a degree-k cochain is stored on: every tuple for a finite
/// group, the single generic tuple (slots 1..k) for a parametrized group.
std::vector<std::vector<Element>> argument_tuples(const Action& action, int k);
/// Product g_begin ... g_{end-1} (identity when empty).
Element product(const Action& action, const std::vector<Element>& g, std::size_t begin, std::size_t end);

class Cochain {
public:
    Cochain(std::shared_ptr<const Action> action, int degree, int order);

    static Cochain constant(std::shared_ptr<const Action> action, int degree, const FormalSymbol& value);
    static Cochain from_function(std::shared_ptr<const Action> action, int degree, int order,
                                 const std::function<FormalSymbol(const std::vector<Element>&)>& fn);

    const Action& action() const { return *action_; }
    const std::shared_ptr<const Action>& action_ptr() const { return action_; }
    int degree() const { return degree_; }
    int order() const { return order_; }
    std::size_t dimension() const { return action_->dimension(); }

    /// Value at arbitrary group elements (substituting slots for parametrized groups).
    FormalSymbol value(const std::vector<Element>& args) const;
    /// Storage slot k in argument_tuples order.
    const FormalSymbol& stored(std::size_t k) const { return table_[k]; }
    void set_stored(std::size_t k, FormalSymbol v);
    std::size_t stored_count() const { return table_.size(); }

    bool is_zero() const;
    /// Exact or probabilistic zero verdict over every stored coefficient.
    ZeroVerdict zero_verdict(const ZeroTestOptions& opts = {}) const;

    Cochain operator+(const Cochain& o) const;
    Cochain operator-(const Cochain& o) const;
    Cochain scaled(const Expr& c) const;
    Cochain order_part(int n) const;
    Cochain truncated(int order) const;

    std::string serialize() const;

private:
    void check_compatible(const Cochain& o) const;

    std::shared_ptr<const Action> action_;
    int degree_;
    int order_;
    std::vector<FormalSymbol> table_;
};

Cochain d(const Cochain& a);
Cochain star_graded(const Cochain& a, const Cochain& b);
Cochain mc_residual(const Cochain& a);
ZeroVerdict is_maurer_cartan(const Cochain& a, const ZeroTestOptions& opts = {});

class NotMaurerCartan : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// d a + P0 * a - (-1)^{|a|} a * P0. Throws NotMaurerCartan unless P0 is MC
/// (the check is skipped when verify is false).
Cochain twisted_d(const Cochain& p0, const Cochain& a, bool verify = true);

/// a_g = u * a_g * u^{-1}; maps MC elements to MC elements.
Cochain gauge_transform(const Cochain& a, const FormalSymbol& u);

struct GaugeVerdict {
    bool equivalent = false;
    Certificate certificate = Certificate::Exact;
    std::string detail;  // first failing element and residual
};
/// a_g *_{phi_g, id} u - u *_{id, phi_g} b_g = 0 for every (sampled) g.
GaugeVerdict gauge_check(const Cochain& a, const Cochain& b, const FormalSymbol& u);

// ---------------------------------------------------------------------------
// Phase cochains G^k -> functions

class PhaseCochain {
public:
    PhaseCochain(std::shared_ptr<const Action> action, int degree);
    static PhaseCochain from_function(std::shared_ptr<const Action> action, int degree,
                                      const std::function<Expr(const std::vector<Element>&)>& fn);
    /// Degree-1 cochain from a template in the action's own parameter names.
    static PhaseCochain from_template(std::shared_ptr<const Action> action, const Expr& s);

    const Action& action() const { return *action_; }
    const std::shared_ptr<const Action>& action_ptr() const { return action_; }
    int degree() const { return degree_; }
    Expr value(const std::vector<Element>& args) const;
    const Expr& stored(std::size_t k) const { return table_[k]; }
    std::size_t stored_count() const { return table_.size(); }
    ZeroVerdict zero_verdict(const ZeroTestOptions& opts = {}) const;

    PhaseCochain operator+(const PhaseCochain& o) const;
    PhaseCochain operator-(const PhaseCochain& o) const;

private:
    std::shared_ptr<const Action> action_;
    int degree_;
    std::vector<Expr> table_;
};

/// (dc)(g1..g_{k+1}) = g1.c(g2..) + sum_i (-1)^i c(.., g_i g_{i+1}, ..) + (-1)^{k+1} c(g1..g_k),
/// with (g.S)(x) = S(phi_g^{-1} x).
PhaseCochain delta_phase(const PhaseCochain& s);
/// a_g = exp(i S_g) as order-zero symbols truncated at `order`.
Cochain exp_system(const PhaseCochain& s, int order);
/// S_g = sum_k h_k(x) c_k(g) with invariant h_k and additive characters c_k
/// written in the action's parameter names.
PhaseCochain phase_from_invariants(std::shared_ptr<const Action> action, const std::vector<Expr>& h,
                                   const std::vector<Expr>& characters);

// ---------------------------------------------------------------------------
// Finite-dimensional truncation and solving (finite groups)

class CoefficientBasis {
public:
    explicit CoefficientBasis(std::vector<Expr> functions);
    /// Monomials in the coordinates of total degree <= max_degree, low degree first.
    static CoefficientBasis monomials(const std::vector<std::string>& coords, int max_degree);

    const std::vector<Expr>& functions() const { return functions_; }
    std::size_t size() const { return functions_.size(); }
    /// Coordinates of f in the basis, or nullopt when f leaves the span.
    std::optional<std::vector<Gauss>> coordinates_of(const Expr& f) const;
    /// Failures of closure under phi_g^{-1} for every g; empty when closed.
    std::vector<std::string> closure_failures(const Action& action) const;
    /// Subspace of functions fixed by every group element.
    std::vector<Expr> invariants(const Action& action) const;

private:
    std::vector<Expr> functions_;
    std::map<Monomial, int> monomial_index_;
    SparseMatrix matrix_{0, 0};  // monomial coordinates x basis functions
};

class BasisSpanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Normalized degree-k cochains with values of pure order n, xi-degree <= n
/// and coefficients in the basis: Pol^k(n).
class PolSpace {
public:
    PolSpace(std::shared_ptr<const Action> action, const CoefficientBasis& basis, int degree, int n);

    int dimension() const { return static_cast<int>(coords_.size()); }
    Cochain element(const std::vector<Gauss>& coeffs) const;
    Cochain element(const SparseVec& coeffs) const;
    Cochain unit(int k) const;
    /// Coordinates of a cochain; throws BasisSpanError if it leaves the space.
    SparseVec coordinates_of(const Cochain& c) const;
    std::string describe(int k) const;
    int degree() const { return degree_; }
    int order() const { return n_; }

private:
    struct Coord {
        std::size_t tuple;
        MultiIndex alpha;
        std::size_t basis;
    };
    std::shared_ptr<const Action> action_;
    CoefficientBasis basis_;
    int degree_;
    int n_;
    std::vector<Coord> coords_;
    std::map<std::tuple<std::size_t, MultiIndex, std::size_t>, int> index_;
};

/// Linear map a -> (d_{P0} a)_n on Pol^k(n), in the canonical-term coordinates of the output.
SparseMatrix twisted_d_matrix(const Cochain& p0, const PolSpace& domain, int n);

struct CohomologyRow {
    int n = 0;
    std::vector<int> cochain_dims;  // dim Pol^k(n), k = 0..max_degree
    std::vector<int> ranks;         // rank of d_{P0} on Pol^k(n)
    std::vector<int> h;             // dim H^k, k = 0..max_degree
};

std::vector<CohomologyRow> cohomology_dims(std::shared_ptr<const Action> action, const CoefficientBasis& basis,
                                           const Cochain& p0, int n_max, int max_degree = 2);

struct OrderSolution {
    bool solved = false;
    bool rhs_closed = false;             // d_{P0} of the right-hand side vanished exactly
    bool rhs_in_span = true;             // every coefficient of the right-hand side lies in the basis span
    std::optional<Cochain> solution;     // P^n, pure order n
    std::optional<Cochain> obstruction;  // residual representative when not solvable
    std::vector<Cochain> cocycle_basis;  // kernel of d_{P0} on Pol^1(n)
    int unknowns = 0;
};

/// Solves d_{P0} x = rhs on Pol^1(n). A right-hand side leaving the basis span
/// is reported through rhs_in_span and is not an obstruction. Among solutions the one with free basis
/// coordinates set to zero is returned (low-degree basis columns pivot first).
OrderSolution solve_linear(const Cochain& p0, const Cochain& rhs, int n, const CoefficientBasis& basis);
/// One step of the recursion d_{P0} P^n = -sum_{i+j=n, i,j>=1} P^i * P^j.
/// `below` holds P^1..P^{n-1}, each of pure order.
OrderSolution solve_order(const Cochain& p0, const std::vector<Cochain>& below, int n, const CoefficientBasis& basis);

}  // namespace quantact
