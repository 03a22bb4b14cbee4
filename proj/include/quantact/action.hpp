#pragma once

// Groups acting on R^d by symbolic diffeomorphisms.

#include "quantact/expr.hpp"
#include "quantact/formal_symbol.hpp"
#include "quantact/report.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace quantact {

/// A map on R^d together with its inverse, both as expression tuples in the coordinates.
class Diffeo {
public:
    Diffeo(std::vector<std::string> coordinates, std::vector<Expr> forward, std::vector<Expr> inverse);
    static Diffeo identity(std::vector<std::string> coordinates);

    std::size_t dimension() const { return coords_.size(); }
    const std::vector<std::string>& coordinates() const { return coords_; }
    const std::vector<Expr>& forward() const { return forward_; }
    const std::vector<Expr>& inverse() const { return inverse_; }
    Diffeo inverted() const { return Diffeo(coords_, inverse_, forward_); }

    /// f o phi^{-1}.
    Expr pullback(const Expr& f) const;
    /// f o phi.
    Expr precompose(const Expr& f) const;
    Diffeo substituted(const std::map<std::string, Expr>& assignments) const;

    /// Both round trips reduce to the identity tuple.
    ZeroVerdict check_inverse(const ZeroTestOptions& opts = {}) const;
    /// Component-wise equality with certificate.
    ZeroVerdict equals(const Diffeo& o, const ZeroTestOptions& opts = {}) const;

private:
    std::vector<std::string> coords_;
    std::vector<Expr> forward_;
    std::vector<Expr> inverse_;
};

/// a o b: forward a(b(x)), inverse b^{-1}(a^{-1}(x)).
Diffeo compose(const Diffeo& a, const Diffeo& b);
std::vector<std::vector<Expr>> jacobian(const std::vector<Expr>& map, const std::vector<std::string>& coords);
Expr determinant(const std::vector<std::vector<Expr>>& m);
Expr jacobian_det(const Diffeo& phi);
/// Coefficients f_a(x) replaced by f_a(phi^{-1}(x)); xi untouched.
FormalSymbol act_on_symbol(const Diffeo& phi, const FormalSymbol& p);

/// Substitutes a tuple of expressions for the coordinates, simultaneously.
Expr substitute_point(const Expr& e, const std::vector<std::string>& coords, const std::vector<Expr>& point);

class FiniteGroup {
public:
    FiniteGroup(std::vector<std::string> names, std::vector<std::vector<int>> table);
    static FiniteGroup cyclic(int n);

    int size() const { return static_cast<int>(names_.size()); }
    int identity() const { return identity_; }
    int multiply(int a, int b) const { return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
    int inverse(int a) const { return inverse_[static_cast<std::size_t>(a)]; }
    const std::string& name(int a) const { return names_[static_cast<std::size_t>(a)]; }
    const std::vector<std::string>& names() const { return names_; }
    int index_of(const std::string& name) const;

    /// Closure, associativity, identity and inverses; empty when all hold.
    std::vector<std::string> axiom_failures() const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<int>> table_;
    std::vector<int> inverse_;
    int identity_ = -1;
};

/// Group law written in parameter symbols: product uses p_l / p_r for the
/// left and right factors, inverse uses p itself.
class ParamGroup {
public:
    ParamGroup(std::vector<std::string> params, std::vector<Expr> product, std::vector<Expr> inverse,
               std::vector<Expr> identity);

    const std::vector<std::string>& params() const { return params_; }
    std::vector<Expr> multiply(const std::vector<Expr>& a, const std::vector<Expr>& b) const;
    std::vector<Expr> inverse(const std::vector<Expr>& a) const;
    const std::vector<Expr>& identity() const { return identity_; }
    /// Generic element of argument slot s (1-based): parameters renamed p_s.
    std::vector<Expr> generic(int slot) const;

    const std::vector<Expr>& product_law() const { return product_; }
    const std::vector<Expr>& inverse_law() const { return inverse_; }

private:
    std::vector<std::string> params_;
    std::vector<Expr> product_;
    std::vector<Expr> inverse_;
    std::vector<Expr> identity_;
};

std::string slot_symbol(const std::string& param, int slot);

/// Either a finite-group index or a parameter tuple.
struct Element {
    int index = -1;
    std::vector<Expr> params;

    static Element finite(int i) { return Element{i, {}}; }
    static Element param(std::vector<Expr> p) { return Element{-1, std::move(p)}; }
    std::string str() const;
};

class Action {
public:
    Action(std::string name, VarBinding binding, FiniteGroup group, std::vector<Diffeo> maps);
    Action(std::string name, VarBinding binding, ParamGroup group, Diffeo map);

    const std::string& name() const { return name_; }
    const VarBinding& binding() const { return binding_; }
    std::vector<std::string> coordinates() const { return binding_.coordinates(); }
    std::size_t dimension() const { return binding_.dimension(); }

    bool is_finite() const { return std::holds_alternative<FiniteGroup>(group_); }
    const FiniteGroup& finite_group() const { return std::get<FiniteGroup>(group_); }
    const ParamGroup& param_group() const { return std::get<ParamGroup>(group_); }

    Element identity() const;
    Element multiply(const Element& a, const Element& b) const;
    Element inverse(const Element& a) const;
    Diffeo diffeo(const Element& g) const;
    /// Finite: every element; parametrized: the sample set.
    std::vector<Element> elements() const;
    Element generic(int slot) const;

    const std::vector<std::vector<Expr>>& samples() const { return samples_; }
    void set_samples(std::vector<std::vector<Expr>> samples);
    /// Replaces the samples with n random rational tuples drawn from a fixed seed.
    void random_samples(std::size_t n, std::uint64_t seed);

    bool bounded = false;
    bool volume_preserving = false;

private:
    std::string name_;
    VarBinding binding_;
    std::variant<FiniteGroup, ParamGroup> group_;
    std::vector<Diffeo> maps_;
    std::optional<Diffeo> param_map_;
    std::vector<std::vector<Expr>> samples_;
};

/// Homomorphism, identity, inverse and volume checks with per-pair certificates.
Report check_action(const Action& action, const ZeroTestOptions& opts = {});

// Built-in actions.
Action translations(std::size_t d);
Action galilean_boosts();
Action cyclic_rotations(int n);  // n in {1, 2, 4}: rotations by multiples of 2pi/n on R^2
Action reflection_line();        // C2 acting on R by x -> -x
Action trivial_cyclic(int n, std::size_t d);
Action heisenberg();
Action multiplicative_trivial(std::size_t d);
Action quarter_turns();  // Z acting on R^2, k -> rotation by k*pi/2
std::vector<std::string> builtin_action_names();
/// Looks up a built-in by name, e.g. "translations:2", "rotations:4", "trivial:4:1".
Action builtin_action(const std::string& spec);

/// Parses the key = value action definition format.
Action parse_action(const std::string& text);
Action load_action(const std::string& path);

}  // namespace quantact
