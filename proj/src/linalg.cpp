#include "quantact/linalg.hpp"

#include <set>
#include <stdexcept>

namespace quantact {

namespace {

// row -= factor * pivot_row
void axpy(SparseVec& row, const Gauss& factor, const SparseVec& pivot_row) {
    for (const auto& [c, v] : pivot_row) {
        auto [it, inserted] = row.emplace(c, Gauss());
        it->second -= factor * v;
        if (it->second.is_zero()) {
            row.erase(it);
        }
    }
}

void normalize(SparseVec& row, int pivot) {
    const Gauss inv = row.at(pivot).inverse();
    if (inv.is_one()) {
        return;
    }
    for (auto& [c, v] : row) {
        v *= inv;
    }
}

Echelon reduce_rows(std::vector<SparseVec> rows, int pivot_limit) {
    // Pivot search column by column; pick the sparsest candidate to limit fill-in.
    Echelon e;
    std::vector<bool> used(rows.size(), false);
    // Fill-in never introduces columns absent from every input row.
    std::set<int> columns;
    for (const auto& row : rows) {
        for (const auto& [c, v] : row) {
            columns.insert(c);
        }
    }
    std::vector<std::size_t> pivot_rows;
    for (int col : columns) {
        if (col >= pivot_limit) {
            break;
        }
        std::size_t best = rows.size();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (used[r] || !rows[r].count(col)) {
                continue;
            }
            if (best == rows.size() || rows[r].size() < rows[best].size()) {
                best = r;
            }
        }
        if (best == rows.size()) {
            continue;
        }
        used[best] = true;
        normalize(rows[best], col);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == best) {
                continue;
            }
            auto it = rows[r].find(col);
            if (it != rows[r].end()) {
                const Gauss factor = it->second;
                axpy(rows[r], factor, rows[best]);
            }
        }
        pivot_rows.push_back(best);
        e.pivots.push_back(col);
    }
    for (std::size_t r : pivot_rows) {
        e.rows.push_back(std::move(rows[r]));
    }
    return e;
}

}  // namespace

void SparseMatrix::add(int r, int c, const Gauss& v) {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
        throw std::out_of_range("matrix index out of range");
    }
    if (v.is_zero()) {
        return;
    }
    auto& row = data_[static_cast<std::size_t>(r)];
    auto [it, inserted] = row.emplace(c, v);
    if (!inserted) {
        it->second += v;
        if (it->second.is_zero()) {
            row.erase(it);
        }
    }
}

SparseMatrix SparseMatrix::from_columns(int rows, const std::vector<SparseVec>& cols) {
    SparseMatrix m(rows, static_cast<int>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (const auto& [r, v] : cols[c]) {
            m.add(r, static_cast<int>(c), v);
        }
    }
    return m;
}

Echelon row_reduce(const SparseMatrix& m) {
    std::vector<SparseVec> rows;
    for (int r = 0; r < m.rows(); ++r) {
        if (!m.row(r).empty()) {
            rows.push_back(m.row(r));
        }
    }
    return reduce_rows(std::move(rows), m.cols());
}

int rank(const SparseMatrix& m) { return row_reduce(m).rank(); }

SolveResult solve(const SparseMatrix& a, const SparseVec& b) {
    const int n = a.cols();
    SolveResult out;
    // Residual: reduce b against an echelon basis of the column space.
    {
        std::vector<SparseVec> image(static_cast<std::size_t>(n));
        for (int r = 0; r < a.rows(); ++r) {
            for (const auto& [c, v] : a.row(r)) {
                image[static_cast<std::size_t>(c)][r] = v;
            }
        }
        std::vector<SparseVec> nonzero;
        for (auto& v : image) {
            if (!v.empty()) {
                nonzero.push_back(std::move(v));
            }
        }
        const Echelon basis = reduce_rows(std::move(nonzero), a.rows());
        SparseVec rem = b;
        for (std::size_t k = 0; k < basis.rows.size(); ++k) {
            auto it = rem.find(basis.pivots[k]);
            if (it != rem.end()) {
                const Gauss factor = it->second;
                axpy(rem, factor, basis.rows[k]);
            }
        }
        out.residual = std::move(rem);
    }
    out.consistent = out.residual.empty();
    if (!out.consistent) {
        return out;
    }
    // Augmented system [A | b] with b in column n.
    std::vector<SparseVec> rows;
    for (int r = 0; r < a.rows(); ++r) {
        SparseVec row = a.row(r);
        auto it = b.find(r);
        if (it != b.end()) {
            row[n] = it->second;
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
        }
    }
    const Echelon e = reduce_rows(std::move(rows), n);
    for (std::size_t k = 0; k < e.rows.size(); ++k) {
        auto it = e.rows[k].find(n);
        if (it != e.rows[k].end()) {
            out.solution[e.pivots[k]] = it->second;
        }
    }
    return out;
}

std::vector<SparseVec> kernel(const SparseMatrix& a) {
    const Echelon e = row_reduce(a);
    std::vector<bool> is_pivot(static_cast<std::size_t>(a.cols()), false);
    for (int p : e.pivots) {
        is_pivot[static_cast<std::size_t>(p)] = true;
    }
    std::vector<SparseVec> out;
    for (int f = 0; f < a.cols(); ++f) {
        if (is_pivot[static_cast<std::size_t>(f)]) {
            continue;
        }
        SparseVec v;
        v[f] = Gauss(1);
        for (std::size_t k = 0; k < e.rows.size(); ++k) {
            auto it = e.rows[k].find(f);
            if (it != e.rows[k].end()) {
                v[e.pivots[k]] = -it->second;
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace quantact
