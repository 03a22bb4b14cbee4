#pragma once

// Formal operators sum_n hbar^n sum_a f_{n,a}(x) D^a followed by a pullback:
//   (Op(P, phi) psi)(x) = sum_n hbar^n sum_a f_{n,a}(x) (D^a psi)(phi^{-1}(x)),
// with D^a = i^{-|a|} d^a.

#include "quantact/action.hpp"
#include "quantact/formal_symbol.hpp"

#include <vector>

namespace quantact {

struct FormalOperator {
    FormalSymbol symbol;
    Diffeo phi;

    int order() const { return symbol.order(); }
};

/// Formal function psi^0 + hbar psi^1 + ...
using FormalFunction = std::vector<Expr>;

FormalOperator to_operator(const FormalSymbol& p, const Diffeo& phi);
FormalFunction apply_operator(const FormalOperator& t, const FormalFunction& psi);
/// Normal form of t1 o t2, truncated at the smaller order; pullback phi1 o phi2.
FormalOperator compose(const FormalOperator& t1, const FormalOperator& t2);
/// The symbol Q with Op(Q, phi1 o phi2) = Op(P, phi1) o Op(K, phi2).
FormalSymbol star(const FormalSymbol& p, const Diffeo& phi1, const FormalSymbol& k, const Diffeo& phi2);
/// Inverse for the star product with identity maps; needs an invertible order-zero coefficient.
FormalSymbol star_inverse(const FormalSymbol& u, const std::vector<std::string>& coords);

/// D^a f = i^{-|a|} d^a f.
Expr derivative(const Expr& f, const MultiIndex& a, const std::vector<std::string>& coords);

}  // namespace quantact
