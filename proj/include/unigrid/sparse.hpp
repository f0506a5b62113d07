/// @file sparse.hpp
/// @brief CSR storage and the handful of sparse kernels the solvers need.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace unigrid {

using Index = std::size_t;
using DenseVector = std::vector<double>;

/// Thrown when operand shapes do not line up.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Compressed-sparse-row real matrix.
///
/// Rows hold strictly increasing column indices with no duplicates. The
/// storage is immutable once built; every kernel below returns a fresh
/// matrix.
class SparseMatrix {
public:
    SparseMatrix() : row_offsets_(1, 0) {}

    /// Takes ownership of raw CSR arrays; throws if they break the invariants.
    SparseMatrix(Index n_rows, Index n_cols, std::vector<Index> row_offsets,
                 std::vector<Index> col_indices, std::vector<double> values)
        : n_rows_(n_rows),
          n_cols_(n_cols),
          row_offsets_(std::move(row_offsets)),
          col_indices_(std::move(col_indices)),
          values_(std::move(values)) {
        if (auto msg = structure_error(); !msg.empty()) {
            throw std::invalid_argument("SparseMatrix: " + msg);
        }
    }

    /// Builds from unordered triplets. Duplicates are summed; explicit zeros kept.
    static SparseMatrix from_triplets(Index n_rows, Index n_cols, std::vector<Triplet> entries) {
        for (const auto& t : entries) {
            if (t.row >= n_rows || t.col >= n_cols) {
                throw std::out_of_range("SparseMatrix::from_triplets: index out of range");
            }
        }
        std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        std::vector<Index> offsets(n_rows + 1, 0);
        std::vector<Index> cols;
        std::vector<double> vals;
        cols.reserve(entries.size());
        vals.reserve(entries.size());
        for (std::size_t k = 0; k < entries.size();) {
            const Index r = entries[k].row;
            const Index c = entries[k].col;
            double sum = 0.0;
            while (k < entries.size() && entries[k].row == r && entries[k].col == c) {
                sum += entries[k].value;
                ++k;
            }
            cols.push_back(c);
            vals.push_back(sum);
            ++offsets[r + 1];
        }
        std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
        return {n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals)};
    }

    static SparseMatrix identity(Index n) {
        std::vector<Index> offsets(n + 1);
        std::iota(offsets.begin(), offsets.end(), Index{0});
        std::vector<Index> cols(n);
        std::iota(cols.begin(), cols.end(), Index{0});
        return {n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0)};
    }

    static SparseMatrix zero(Index n_rows, Index n_cols) {
        return {n_rows, n_cols, std::vector<Index>(n_rows + 1, 0), {}, {}};
    }

    Index rows() const { return n_rows_; }
    Index cols() const { return n_cols_; }
    Index nnz() const { return values_.size(); }
    bool square() const { return n_rows_ == n_cols_; }

    std::span<const Index> row_offsets() const { return row_offsets_; }
    std::span<const Index> col_indices() const { return col_indices_; }
    std::span<const double> values() const { return values_; }

    std::span<const Index> row_cols(Index i) const {
        return {col_indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
    }
    std::span<const double> row_values(Index i) const {
        return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
    }

    /// Entry lookup by binary search; 0 for structural zeros.
    double at(Index i, Index j) const {
        if (i >= n_rows_ || j >= n_cols_) {
            throw std::out_of_range("SparseMatrix::at: index out of range");
        }
        auto cols = row_cols(i);
        auto it = std::lower_bound(cols.begin(), cols.end(), j);
        if (it == cols.end() || *it != j) return 0.0;
        return values_[row_offsets_[i] + static_cast<Index>(it - cols.begin())];
    }

    DenseVector diagonal() const {
        DenseVector d(std::min(n_rows_, n_cols_), 0.0);
        for (Index i = 0; i < d.size(); ++i) d[i] = at(i, i);
        return d;
    }

    /// Empty string when every CSR invariant holds, otherwise a description
    /// of the first violation found.
    std::string structure_error() const {
        if (row_offsets_.size() != n_rows_ + 1) return "row_offsets has wrong length";
        if (row_offsets_.front() != 0) return "row_offsets[0] != 0";
        if (row_offsets_.back() != values_.size() || col_indices_.size() != values_.size()) {
            return "row_offsets[n_rows] does not match stored entry count";
        }
        for (Index i = 0; i < n_rows_; ++i) {
            if (row_offsets_[i + 1] < row_offsets_[i]) return "row_offsets decreasing at row " + std::to_string(i);
            for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
                if (col_indices_[k] >= n_cols_) return "column index out of range in row " + std::to_string(i);
                if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
                    return "columns not strictly increasing in row " + std::to_string(i);
                }
            }
        }
        return {};
    }

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    Index n_rows_ = 0;
    Index n_cols_ = 0;
    std::vector<Index> row_offsets_;
    std::vector<Index> col_indices_;
    std::vector<double> values_;
};

inline double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

/// y = A x, writing into a caller-owned buffer.
inline void spmv_into(const SparseMatrix& A, std::span<const double> x, std::span<double> y) {
    if (A.cols() != x.size() || A.rows() != y.size()) {
        throw DimensionError("spmv: dimension mismatch");
    }
    const auto offsets = A.row_offsets();
    const auto cols = A.col_indices();
    const auto vals = A.values();
    for (Index i = 0; i < A.rows(); ++i) {
        double s = 0.0;
        for (Index k = offsets[i]; k < offsets[i + 1]; ++k) s += vals[k] * x[cols[k]];
        y[i] = s;
    }
}

inline DenseVector spmv(const SparseMatrix& A, std::span<const double> x) {
    DenseVector y(A.rows());
    spmv_into(A, x, y);
    return y;
}

/// r = b - A u
inline DenseVector residual(const SparseMatrix& A, std::span<const double> u, std::span<const double> b) {
    if (A.cols() != u.size() || A.rows() != b.size()) {
        throw DimensionError("residual: dimension mismatch");
    }
    DenseVector r(A.rows());
    spmv_into(A, u, r);
    for (Index i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

inline SparseMatrix transpose(const SparseMatrix& A) {
    std::vector<Index> offsets(A.cols() + 1, 0);
    for (Index c : A.col_indices()) ++offsets[c + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<Index> cursor(offsets.begin(), offsets.end() - 1);
    std::vector<Index> cols(A.nnz());
    std::vector<double> vals(A.nnz());
    for (Index i = 0; i < A.rows(); ++i) {
        auto rc = A.row_cols(i);
        auto rv = A.row_values(i);
        for (std::size_t k = 0; k < rc.size(); ++k) {
            const Index dst = cursor[rc[k]]++;
            cols[dst] = i;
            vals[dst] = rv[k];
        }
    }
    return {A.cols(), A.rows(), std::move(offsets), std::move(cols), std::move(vals)};
}

/// C = A B (row-by-row Gustavson product). Entries with
/// |c_ij| <= drop_rel * max_j |c_ij| are removed from each row; drop_rel = 0
/// keeps every structurally generated entry.
inline SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B, double drop_rel = 0.0) {
    if (A.cols() != B.rows()) throw DimensionError("multiply: inner dimensions differ");
    constexpr Index unset = std::numeric_limits<Index>::max();
    std::vector<Index> marker(B.cols(), unset);
    std::vector<double> accum(B.cols(), 0.0);
    std::vector<Index> row_pattern;

    std::vector<Index> offsets(A.rows() + 1, 0);
    std::vector<Index> cols;
    std::vector<double> vals;
    for (Index i = 0; i < A.rows(); ++i) {
        row_pattern.clear();
        auto ac = A.row_cols(i);
        auto av = A.row_values(i);
        for (std::size_t ka = 0; ka < ac.size(); ++ka) {
            auto bc = B.row_cols(ac[ka]);
            auto bv = B.row_values(ac[ka]);
            for (std::size_t kb = 0; kb < bc.size(); ++kb) {
                const Index j = bc[kb];
                if (marker[j] != i) {
                    marker[j] = i;
                    accum[j] = 0.0;
                    row_pattern.push_back(j);
                }
                accum[j] += av[ka] * bv[kb];
            }
        }
        std::sort(row_pattern.begin(), row_pattern.end());
        double row_max = 0.0;
        for (Index j : row_pattern) row_max = std::max(row_max, std::abs(accum[j]));
        const double cutoff = drop_rel * row_max;
        for (Index j : row_pattern) {
            if (drop_rel > 0.0 && std::abs(accum[j]) <= cutoff) continue;
            cols.push_back(j);
            vals.push_back(accum[j]);
        }
        offsets[i + 1] = cols.size();
    }
    return {A.rows(), B.cols(), std::move(offsets), std::move(cols), std::move(vals)};
}

/// Relative drop tolerance applied to Galerkin coarse operators.
inline constexpr double galerkin_drop_tolerance = 1e-14;

/// R A P, with cancellation fill below the relative drop tolerance removed.
inline SparseMatrix galerkin_product(const SparseMatrix& R, const SparseMatrix& A, const SparseMatrix& P,
                                     double drop_rel = galerkin_drop_tolerance) {
    if (R.cols() != A.rows() || A.cols() != P.rows()) {
        throw DimensionError("galerkin_product: dimension mismatch");
    }
    return multiply(multiply(R, A), P, drop_rel);
}

struct ZMatrixCheck {
    bool ok = true;
    std::vector<std::pair<Index, Index>> violations;

    explicit operator bool() const { return ok; }
};

/// Nonnegative diagonal and nonpositive stored off-diagonals.
inline ZMatrixCheck is_z_matrix(const SparseMatrix& A) {
    if (!A.square()) throw DimensionError("is_z_matrix: matrix is not square");
    ZMatrixCheck out;
    for (Index i = 0; i < A.rows(); ++i) {
        auto rc = A.row_cols(i);
        auto rv = A.row_values(i);
        for (std::size_t k = 0; k < rc.size(); ++k) {
            const bool bad = rc[k] == i ? rv[k] < 0.0 : rv[k] > 0.0;
            if (bad) out.violations.emplace_back(i, rc[k]);
        }
    }
    out.ok = out.violations.empty();
    return out;
}

struct DominanceCheck {
    bool weakly_dominant = true;   // a_ii >= sum |a_ij| in every row
    bool some_row_strict = false;  // at least one row with strict inequality
    std::vector<Index> failing_rows;
};

/// Row-wise diagonal dominance, with a relative slack for rounding.
inline DominanceCheck diagonal_dominance(const SparseMatrix& A, double rel_slack = 1e-12) {
    if (!A.square()) throw DimensionError("diagonal_dominance: matrix is not square");
    DominanceCheck out;
    for (Index i = 0; i < A.rows(); ++i) {
        double diag = 0.0;
        double off = 0.0;
        auto rc = A.row_cols(i);
        auto rv = A.row_values(i);
        for (std::size_t k = 0; k < rc.size(); ++k) {
            if (rc[k] == i) diag = rv[k];
            else off += std::abs(rv[k]);
        }
        const double slack = rel_slack * std::max(std::abs(diag), off);
        if (diag < off - slack) {
            out.weakly_dominant = false;
            out.failing_rows.push_back(i);
        } else if (diag > off + slack) {
            out.some_row_strict = true;
        }
    }
    return out;
}

/// True when the directed graph of nonzero off-diagonals is strongly connected.
inline bool is_irreducible(const SparseMatrix& A) {
    if (!A.square()) throw DimensionError("is_irreducible: matrix is not square");
    const Index n = A.rows();
    if (n <= 1) return true;
    auto reaches_all = [n](const SparseMatrix& M) {
        std::vector<char> seen(n, 0);
        std::vector<Index> stack{0};
        seen[0] = 1;
        Index count = 1;
        while (!stack.empty()) {
            const Index i = stack.back();
            stack.pop_back();
            auto rc = M.row_cols(i);
            auto rv = M.row_values(i);
            for (std::size_t k = 0; k < rc.size(); ++k) {
                if (rv[k] != 0.0 && !seen[rc[k]]) {
                    seen[rc[k]] = 1;
                    ++count;
                    stack.push_back(rc[k]);
                }
            }
        }
        return count == n;
    };
    return reaches_all(A) && reaches_all(transpose(A));
}

}  // namespace unigrid
