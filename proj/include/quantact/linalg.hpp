#pragma once

// Exact sparse linear algebra over the Gaussian rationals Q(i).

#include "quantact/gauss.hpp"

#include <map>
#include <vector>

namespace quantact {

using SparseVec = std::map<int, Gauss>;

class SparseMatrix {
public:
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows)) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    void add(int r, int c, const Gauss& v);
    const SparseVec& row(int r) const { return data_.at(static_cast<std::size_t>(r)); }
    /// Builds a matrix whose column c is cols[c].
    static SparseMatrix from_columns(int rows, const std::vector<SparseVec>& cols);

private:
    int rows_;
    int cols_;
    std::vector<SparseVec> data_;
};

/// Reduced row echelon form; pivots[k] is the pivot column of reduced row k.
struct Echelon {
    std::vector<SparseVec> rows;
    std::vector<int> pivots;
    int rank() const { return static_cast<int>(pivots.size()); }
};

Echelon row_reduce(const SparseMatrix& m);
int rank(const SparseMatrix& m);

struct SolveResult {
    bool consistent = false;
    SparseVec solution;  // free variables set to zero
    SparseVec residual;  // b reduced modulo the column space; empty iff consistent
};

/// Solves A x = b exactly. Columns earlier in the ordering are preferred as pivots.
SolveResult solve(const SparseMatrix& a, const SparseVec& b);
/// Basis of the null space, one vector per free column.
std::vector<SparseVec> kernel(const SparseMatrix& a);

}  // namespace quantact
