#pragma once

// Independent oracles for the test suites.

#include "quantact/dga.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace quantact::oracle {

/// Rank of a dense integer matrix modulo the prime p by plain Gaussian elimination.
int rank_mod_p(std::vector<std::vector<std::int64_t>> m, std::int64_t p = 1000000009);

/// Dimensions of H^k(G; Q) for k = 0..max_degree from the normalized bar complex
/// with trivial coefficients, using rank_mod_p on the dense coboundary matrices.
std::vector<int> trivial_group_cohomology(const FiniteGroup& g, int max_degree);

/// Random cochain: every stored value gets, at each order n and |alpha| <= n,
/// a random integer combination of the given functions.
Cochain random_cochain(const std::shared_ptr<const Action>& action, int degree, int order,
                       const std::vector<Expr>& functions, std::mt19937_64& rng, int spread = 2);

FormalSymbol random_symbol(std::size_t dimension, int order, const std::vector<Expr>& functions,
                           std::mt19937_64& rng, int spread = 2);

}  // namespace quantact::oracle
