/// @file amg.hpp
/// @brief Classical (Ruge-Stueben) AMG setup: strength of connection, two-pass
/// C/F splitting, classical interpolation, Galerkin coarsening, and the
/// composite interpolants that serve as unigrid directions.

#pragma once

#include "unigrid/sparse.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace unigrid {

inline constexpr Index no_index = static_cast<Index>(-1);

struct StrengthGraph {
    /// S_i: strong neighbours of i, ascending.
    std::vector<std::vector<Index>> strong;
    /// Undirected graph used for the independent set: i ~ j iff j in S_i or i in S_j.
    std::vector<std::vector<Index>> adjacency;

    Index size() const { return strong.size(); }
    bool is_strong(Index i, Index j) const {
        return std::binary_search(strong[i].begin(), strong[i].end(), j);
    }
};

/// j in S_i iff -a_ij >= theta * max_{k != i}(-a_ik). Positive off-diagonals
/// never qualify; rows whose largest negated off-diagonal is <= 0 get no
/// strong neighbours.
inline StrengthGraph strength_graph(const SparseMatrix& A, double theta) {
    if (!A.square()) throw DimensionError("strength_graph: matrix is not square");
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("strength_graph: theta must lie in (0, 1]");
    const Index n = A.rows();
    StrengthGraph S;
    S.strong.resize(n);
    S.adjacency.resize(n);
    for (Index i = 0; i < n; ++i) {
        auto rc = A.row_cols(i);
        auto rv = A.row_values(i);
        double max_neg = 0.0;
        for (std::size_t k = 0; k < rc.size(); ++k) {
            if (rc[k] != i) max_neg = std::max(max_neg, -rv[k]);
        }
        if (max_neg <= 0.0) continue;
        for (std::size_t k = 0; k < rc.size(); ++k) {
            if (rc[k] != i && rv[k] < 0.0 && -rv[k] >= theta * max_neg) S.strong[i].push_back(rc[k]);
        }
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j : S.strong[i]) {
            S.adjacency[i].push_back(j);
            S.adjacency[j].push_back(i);
        }
    }
    for (auto& adj : S.adjacency) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    return S;
}

enum class PointType : unsigned char { coarse, fine };

struct CfSplit {
    std::vector<PointType> label;
    /// Coarse-grid index of each C point; no_index for F points.
    std::vector<Index> coarse_index;
    Index n_coarse = 0;

    Index size() const { return label.size(); }
    bool is_coarse(Index i) const { return label[i] == PointType::coarse; }

    void renumber() {
        coarse_index.assign(label.size(), no_index);
        n_coarse = 0;
        for (Index i = 0; i < label.size(); ++i) {
            if (is_coarse(i)) coarse_index[i] = n_coarse++;
        }
    }
};

/// First pass: greedy maximal independent set over the symmetrized strength
/// graph, visiting nodes in index order.
inline CfSplit cf_first_pass(const StrengthGraph& S) {
    const Index n = S.size();
    CfSplit split;
    split.label.assign(n, PointType::fine);
    std::vector<char> decided(n, 0);
    for (Index i = 0; i < n; ++i) {
        if (decided[i]) continue;
        decided[i] = 1;
        split.label[i] = PointType::coarse;
        for (Index j : S.adjacency[i]) decided[j] = 1;
    }
    split.renumber();
    return split;
}

/// Second pass: every F point must have a strong C neighbour, and each pair
/// of strongly connected F points i, k (k in S_i) must share one, i.e.
/// S_k intersects C_i. The smaller index of an offending pair is promoted.
inline void cf_second_pass(const StrengthGraph& S, CfSplit& split) {
    const Index n = S.size();
    auto has_coarse = [&](const std::vector<Index>& set) {
        return std::any_of(set.begin(), set.end(), [&](Index j) { return split.is_coarse(j); });
    };
    for (Index i = 0; i < n; ++i) {
        if (split.is_coarse(i)) continue;
        if (!has_coarse(S.strong[i])) {
            split.label[i] = PointType::coarse;
            continue;
        }
        for (Index k : S.strong[i]) {
            if (split.is_coarse(k)) continue;
            const bool shared = std::any_of(S.strong[k].begin(), S.strong[k].end(), [&](Index j) {
                return split.is_coarse(j) && S.is_strong(i, j);
            });
            if (shared) continue;
            split.label[std::min(i, k)] = PointType::coarse;
            if (split.is_coarse(i)) break;
        }
    }
    split.renumber();
}

/// Classical first pass: repeatedly take the undecided point that the most
/// undecided points strongly depend on (ties to the smallest index), make it
/// C, and make its strong dependents F. Points left with no strong
/// connections at all become C.
inline CfSplit cf_first_pass_influence(const StrengthGraph& S) {
    const Index n = S.size();
    std::vector<std::vector<Index>> dependents(n);  // S_i^T
    for (Index i = 0; i < n; ++i) {
        for (Index j : S.strong[i]) dependents[j].push_back(i);
    }
    enum : unsigned char { undecided, coarse, fine };
    std::vector<unsigned char> state(n, undecided);
    std::vector<Index> measure(n, 0);
    // Buckets keyed by measure; std::set keeps the smallest index first.
    std::vector<std::set<Index>> buckets(2 * n + 2);
    auto insert = [&](Index i) { buckets[measure[i]].insert(i); };
    auto erase = [&](Index i) { buckets[measure[i]].erase(i); };
    Index top = 0;
    for (Index i = 0; i < n; ++i) {
        if (S.strong[i].empty() && dependents[i].empty()) {
            state[i] = coarse;
            continue;
        }
        measure[i] = dependents[i].size();
        insert(i);
        top = std::max(top, measure[i]);
    }
    for (;;) {
        while (top > 0 && buckets[top].empty()) --top;
        if (buckets[top].empty()) break;
        const Index c = *buckets[top].begin();
        erase(c);
        state[c] = coarse;
        for (Index f : dependents[c]) {
            if (state[f] != undecided) continue;
            erase(f);
            state[f] = fine;
            for (Index k : S.strong[f]) {
                if (state[k] != undecided) continue;
                erase(k);
                ++measure[k];
                insert(k);
                top = std::max(top, measure[k]);
            }
        }
        for (Index k : S.strong[c]) {
            if (state[k] != undecided || measure[k] == 0) continue;
            erase(k);
            --measure[k];
            insert(k);
        }
    }
    CfSplit split;
    split.label.resize(n);
    for (Index i = 0; i < n; ++i) split.label[i] = state[i] == fine ? PointType::fine : PointType::coarse;
    split.renumber();
    return split;
}

enum class CoarseningOrder { lexicographic, influence };

inline CfSplit cf_split(const StrengthGraph& S, CoarseningOrder order = CoarseningOrder::lexicographic) {
    CfSplit split = order == CoarseningOrder::influence ? cf_first_pass_influence(S) : cf_first_pass(S);
    cf_second_pass(S, split);
    return split;
}

/// Classical interpolation I_{k+1}^k. C rows are unit rows; an F row i gets
///   w_ij = -(a_ij + sum_{k in F_i} a_ik a_kj / sum_{m in C_i} a_km)
///          / (a_ii + sum_{l in W_i} a_il),   j in C_i,
/// where W_i holds every non-strong neighbour (positive entries included).
inline SparseMatrix build_interpolation(const SparseMatrix& A, const StrengthGraph& S, const CfSplit& split) {
    const Index n = A.rows();
    if (S.size() != n || split.size() != n) throw DimensionError("build_interpolation: size mismatch");

    std::vector<Index> offsets(n + 1, 0);
    std::vector<Index> cols;
    std::vector<double> vals;
    // Position of a C_i member inside the row under construction, or no_index.
    std::vector<Index> slot(n, no_index);
    std::vector<Index> coarse_nbrs;
    std::vector<double> weights;

    for (Index i = 0; i < n; ++i) {
        if (split.is_coarse(i)) {
            cols.push_back(split.coarse_index[i]);
            vals.push_back(1.0);
            offsets[i + 1] = cols.size();
            continue;
        }
        coarse_nbrs.clear();
        for (Index j : S.strong[i]) {
            if (split.is_coarse(j)) {
                slot[j] = coarse_nbrs.size();
                coarse_nbrs.push_back(j);
            }
        }
        if (coarse_nbrs.empty()) {
            throw std::runtime_error("build_interpolation: F point " + std::to_string(i) +
                                     " has no strong C neighbour");
        }
        weights.assign(coarse_nbrs.size(), 0.0);
        double lumped_diag = 0.0;
        auto rc = A.row_cols(i);
        auto rv = A.row_values(i);
        for (std::size_t e = 0; e < rc.size(); ++e) {
            const Index j = rc[e];
            const double a_ij = rv[e];
            if (j == i) {
                lumped_diag += a_ij;
            } else if (!S.is_strong(i, j)) {
                lumped_diag += a_ij;
            } else if (split.is_coarse(j)) {
                weights[slot[j]] += a_ij;
            } else {
                // Strong F neighbour k = j: e_k ~ sum_{m in C_i} a_km e_m / sum_{m in C_i} a_km.
                double denom = 0.0;
                auto kc = A.row_cols(j);
                auto kv = A.row_values(j);
                for (std::size_t q = 0; q < kc.size(); ++q) {
                    if (kc[q] != j && slot[kc[q]] != no_index) denom += kv[q];
                }
                if (denom == 0.0) {
                    throw std::runtime_error("build_interpolation: zero distribution denominator at F point " +
                                             std::to_string(i));
                }
                for (std::size_t q = 0; q < kc.size(); ++q) {
                    if (kc[q] != j && slot[kc[q]] != no_index) weights[slot[kc[q]]] += a_ij * kv[q] / denom;
                }
            }
        }
        if (lumped_diag == 0.0) {
            throw std::runtime_error("build_interpolation: vanishing lumped diagonal at row " + std::to_string(i));
        }
        // coarse_nbrs is ascending in fine index, hence in coarse index too.
        for (std::size_t q = 0; q < coarse_nbrs.size(); ++q) {
            cols.push_back(split.coarse_index[coarse_nbrs[q]]);
            vals.push_back(-weights[q] / lumped_diag);
            slot[coarse_nbrs[q]] = no_index;
        }
        offsets[i + 1] = cols.size();
    }
    return {n, split.n_coarse, std::move(offsets), std::move(cols), std::move(vals)};
}

struct Level {
    SparseMatrix A;
    /// Interpolation from the next coarser level; empty on the coarsest level.
    SparseMatrix P;
    /// Restriction P^T.
    SparseMatrix R;
};

struct AmgOptions {
    double theta = 0.25;
    CoarseningOrder order = CoarseningOrder::lexicographic;
    Index max_levels = 40;
};

struct CoarsenedLevel {
    Level level;
    SparseMatrix coarse;
};

/// One coarsening step: P from the classical split, R = P^T, A_c = R A P.
inline CoarsenedLevel coarsen_level(const SparseMatrix& A, double theta) {
    const StrengthGraph S = strength_graph(A, theta);
    const CfSplit split = cf_split(S);
    CoarsenedLevel out{{A, build_interpolation(A, S, split), {}}, {}};
    out.level.R = transpose(out.level.P);
    out.coarse = galerkin_product(out.level.R, A, out.level.P);
    return out;
}

/// I_k^0 = I_1^0 I_2^1 ... I_k^{k-1}; identity for k = 0.
inline SparseMatrix composite_interpolant(const std::vector<Level>& levels, Index k) {
    if (levels.empty() || k >= levels.size()) {
        throw std::out_of_range("composite_interpolant: level out of range");
    }
    SparseMatrix out = SparseMatrix::identity(levels.front().A.rows());
    for (Index q = 0; q < k; ++q) out = multiply(out, levels[q].P);
    return out;
}

struct HierarchyLevelSummary {
    Index n = 0;
    Index nnz = 0;

    friend bool operator==(const HierarchyLevelSummary&, const HierarchyLevelSummary&) = default;
};

struct HierarchySummary {
    std::vector<HierarchyLevelSummary> levels;
    double operator_complexity = 0.0;
    double grid_complexity = 0.0;

    friend bool operator==(const HierarchySummary&, const HierarchySummary&) = default;
};

/// A built AMG hierarchy together with everything a unigrid sweep needs.
///
/// For every level k the directions d_j^(k) = I_k^0 e_j are stored row-wise
/// in `directions[k]` (the transpose of I_k^0), the products A d_j^(k)
/// row-wise in `applied_directions[k]`, and <A d_j, d_j> in
/// `galerkin_diagonals[k]`.
struct Hierarchy {
    std::vector<Level> levels;
    std::vector<SparseMatrix> composite;
    std::vector<SparseMatrix> directions;
    std::vector<SparseMatrix> applied_directions;
    std::vector<DenseVector> galerkin_diagonals;

    Index num_levels() const { return levels.size(); }
    const SparseMatrix& fine() const { return levels.front().A; }

    HierarchySummary summary() const {
        HierarchySummary s;
        double nnz_total = 0.0;
        double n_total = 0.0;
        for (const auto& lvl : levels) {
            s.levels.push_back({lvl.A.rows(), lvl.A.nnz()});
            nnz_total += static_cast<double>(lvl.A.nnz());
            n_total += static_cast<double>(lvl.A.rows());
        }
        const auto& f = fine();
        s.operator_complexity = f.nnz() ? nnz_total / static_cast<double>(f.nnz()) : 0.0;
        s.grid_complexity = f.rows() ? n_total / static_cast<double>(f.rows()) : 0.0;
        return s;
    }
};

/// Recursive coarsening until the next split would leave at most one C point
/// or would not reduce the grid at all. The coarsest level is only ever
/// relaxed, never factored.
inline Hierarchy build_hierarchy(const SparseMatrix& A, const AmgOptions& opts = {}) {
    if (!A.square()) throw DimensionError("build_hierarchy: matrix is not square");
    Hierarchy h;
    SparseMatrix current = A;
    while (h.levels.size() + 1 < opts.max_levels) {
        const StrengthGraph S = strength_graph(current, opts.theta);
        const CfSplit split = cf_split(S, opts.order);
        if (split.n_coarse <= 1 || split.n_coarse == current.rows()) break;
        Level level{current, build_interpolation(current, S, split), {}};
        level.R = transpose(level.P);
        SparseMatrix coarse = galerkin_product(level.R, current, level.P);
        h.levels.push_back(std::move(level));
        current = std::move(coarse);
    }
    h.levels.push_back({std::move(current), {}, {}});

    const SparseMatrix At = transpose(A);
    SparseMatrix comp = SparseMatrix::identity(A.rows());
    for (Index k = 0; k < h.levels.size(); ++k) {
        if (k > 0) comp = multiply(comp, h.levels[k - 1].P);
        SparseMatrix dirs = transpose(comp);
        // Row j of (A I_k^0)^T = (I_k^0)^T A^T is A d_j.
        SparseMatrix applied = multiply(dirs, At);
        DenseVector diag(dirs.rows());
        for (Index j = 0; j < dirs.rows(); ++j) {
            // Sparse dot of two ascending rows.
            auto dc = dirs.row_cols(j);
            auto dv = dirs.row_values(j);
            auto ac = applied.row_cols(j);
            auto av = applied.row_values(j);
            double s = 0.0;
            std::size_t p = 0, q = 0;
            while (p < dc.size() && q < ac.size()) {
                if (dc[p] < ac[q]) ++p;
                else if (ac[q] < dc[p]) ++q;
                else s += dv[p++] * av[q++];
            }
            diag[j] = s;
        }
        h.composite.push_back(comp);
        h.directions.push_back(std::move(dirs));
        h.applied_directions.push_back(std::move(applied));
        h.galerkin_diagonals.push_back(std::move(diag));
    }
    return h;
}

}  // namespace unigrid
