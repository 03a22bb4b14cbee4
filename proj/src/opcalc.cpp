#include "quantact/opcalc.hpp"

namespace quantact {

namespace {

const Gauss kMinusI(Rational(0), Rational(-1));

// Coefficients g_b(y) of sum_b g_b(y) (D^b psi)(phi2^{-1}(y)).
using Family = std::map<MultiIndex, Expr, GradedLess>;

void accumulate(Family& f, const MultiIndex& b, const Expr& g) {
    if (g.is_zero()) {
        return;
    }
    auto [it, inserted] = f.emplace(b, g);
    if (!inserted) {
        it->second += g;
        if (it->second.is_zero()) {
            f.erase(it);
        }
    }
}

}  // namespace

Expr derivative(const Expr& f, const MultiIndex& a, const std::vector<std::string>& coords) {
    Expr out = f;
    for (std::size_t j = 0; j < a.size(); ++j) {
        for (int k = 0; k < a[j]; ++k) {
            out = diff(out, coords[j]).scaled(kMinusI);
        }
    }
    return out;
}

FormalOperator to_operator(const FormalSymbol& p, const Diffeo& phi) {
    if (p.dimension() != phi.dimension()) {
        throw DimensionMismatch("symbol and map dimensions differ");
    }
    return FormalOperator{p, phi};
}

FormalFunction apply_operator(const FormalOperator& t, const FormalFunction& psi) {
    const int order = std::min(t.order(), static_cast<int>(psi.size()) - 1);
    FormalFunction out(static_cast<std::size_t>(std::max(order + 1, 0)));
    const auto& coords = t.phi.coordinates();
    for (int j = 0; j <= order; ++j) {
        const Expr& f = psi[static_cast<std::size_t>(j)];
        if (f.is_zero()) {
            continue;
        }
        std::map<MultiIndex, Expr, GradedLess> pulled;  // (D^a psi^j) o phi^{-1}
        for (int n = 0; n + j <= order; ++n) {
            for (const auto& [a, c] : t.symbol.at(n)) {
                auto it = pulled.find(a);
                if (it == pulled.end()) {
                    it = pulled.emplace(a, t.phi.pullback(derivative(f, a, coords))).first;
                }
                out[static_cast<std::size_t>(n + j)] += c * it->second;
            }
        }
    }
    return out;
}

FormalOperator compose(const FormalOperator& t1, const FormalOperator& t2) {
    if (t1.symbol.dimension() != t2.symbol.dimension()) {
        throw DimensionMismatch("cannot compose operators of different dimensions");
    }
    const std::size_t d = t1.symbol.dimension();
    const int order = std::min(t1.order(), t2.order());
    FormalSymbol out(d, order);
    const Diffeo& phi1 = t1.phi;
    const Diffeo& phi2 = t2.phi;
    const auto& coords = phi1.coordinates();
    if (t1.symbol.is_zero() || t2.symbol.is_zero()) {
        return FormalOperator{out, compose(phi1, phi2)};
    }
    // d_j (phi2^{-1})_k
    const auto jinv = jacobian(phi2.inverse(), coords);

    for (int m = 0; m <= order; ++m) {
        for (const auto& [beta, h] : t2.symbol.at(m)) {
            const int max_alpha = order - m;
            std::map<MultiIndex, Family, GradedLess> families;
            families[MultiIndex(d, 0)] = Family{{beta, h}};
            std::map<MultiIndex, std::vector<std::pair<MultiIndex, Expr>>, GradedLess> pulled;
            auto family_for = [&](const MultiIndex& a) -> const std::vector<std::pair<MultiIndex, Expr>>& {
                auto pit = pulled.find(a);
                if (pit != pulled.end()) {
                    return pit->second;
                }
                // Build D^a from D^{a - e_j} via the single-derivative rule.
                std::vector<MultiIndex> chain;
                MultiIndex cur = a;
                while (!families.count(cur)) {
                    chain.push_back(cur);
                    std::size_t j = 0;
                    while (cur[j] == 0) {
                        ++j;
                    }
                    --cur[j];
                }
                for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                    const MultiIndex& target = *it;
                    std::size_t j = 0;
                    while (target[j] == 0) {
                        ++j;
                    }
                    MultiIndex parent = target;
                    --parent[j];
                    const Family& src = families.at(parent);
                    Family next;
                    for (const auto& [b, g] : src) {
                        accumulate(next, b, diff(g, coords[j]).scaled(kMinusI));
                        for (std::size_t k = 0; k < d; ++k) {
                            if (jinv[k][j].is_zero()) {
                                continue;
                            }
                            MultiIndex bk = b;
                            ++bk[k];
                            accumulate(next, bk, g * jinv[k][j]);
                        }
                    }
                    families[target] = std::move(next);
                }
                std::vector<std::pair<MultiIndex, Expr>> pb;
                for (const auto& [b, g] : families.at(a)) {
                    pb.emplace_back(b, phi1.pullback(g));
                }
                return pulled.emplace(a, std::move(pb)).first->second;
            };
            for (int n = 0; n <= max_alpha; ++n) {
                for (const auto& [alpha, f] : t1.symbol.at(n)) {
                    for (const auto& [b, g] : family_for(alpha)) {
                        out.add_to(n + m, b, f * g);
                    }
                }
            }
        }
    }
    return FormalOperator{out, compose(phi1, phi2)};
}

FormalSymbol star(const FormalSymbol& p, const Diffeo& phi1, const FormalSymbol& k, const Diffeo& phi2) {
    return compose(FormalOperator{p, phi1}, FormalOperator{k, phi2}).symbol;
}

FormalSymbol star_inverse(const FormalSymbol& u, const std::vector<std::string>& coords) {
    const MultiIndex zero(u.dimension(), 0);
    const Expr u0 = u.get(0, zero);
    if (u0.is_zero()) {
        throw std::domain_error("symbol with vanishing order-zero term is not invertible");
    }
    const Diffeo id = Diffeo::identity(coords);
    const FormalSymbol v0 = FormalSymbol::constant(u.dimension(), u.order(), Expr(1) / u0);
    // v0 * u = 1 + r with r of order >= 1, so (1 + r)^{-1} = sum_k (-r)^k terminates.
    const FormalSymbol one = FormalSymbol::one(u.dimension(), u.order());
    const FormalSymbol minus_r = one - star(v0, id, u, id);
    FormalSymbol sum = one;
    FormalSymbol power = one;
    for (int k = 1; k <= u.order(); ++k) {
        power = star(power, id, minus_r, id);
        if (power.is_zero()) {
            break;
        }
        sum += power;
    }
    return star(sum, id, v0, id);
}

}  // namespace quantact
