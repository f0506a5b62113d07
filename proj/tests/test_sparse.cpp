#include "support/dense_oracle.hpp"
#include "unigrid/discretization.hpp"
#include "unigrid/sparse.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace unigrid;

namespace {

SparseMatrix laplacian_1d(Index n_elements) {
    return assemble_fd_1d([](double) { return 1.0; }, {}, {}, n_elements, 0.0, 0.0).A;
}

SparseMatrix random_sparse(std::mt19937_64& rng, Index rows, Index cols, double density) {
    std::uniform_real_distribution<double> val(-2.0, 2.0), coin(0.0, 1.0);
    std::vector<Triplet> t;
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            if (coin(rng) < density) t.push_back({i, j, val(rng)});
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

double max_abs_diff(const oracle::Dense& a, const oracle::Dense& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    return m;
}

}  // namespace

TEST(SparseMatrix, RejectsMalformedCsr) {
    EXPECT_THROW(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), std::invalid_argument);               // offsets too short
    EXPECT_THROW(SparseMatrix(2, 2, {0, 2, 2}, {1, 0}, {1.0, 1.0}), std::invalid_argument);    // unsorted
    EXPECT_THROW(SparseMatrix(2, 2, {0, 2, 2}, {1, 1}, {1.0, 1.0}), std::invalid_argument);    // duplicate
    EXPECT_THROW(SparseMatrix(2, 2, {0, 1, 2}, {0, 2}, {1.0, 1.0}), std::invalid_argument);    // column range
    EXPECT_THROW(SparseMatrix(2, 2, {0, 1, 1}, {0}, {1.0, 2.0}), std::invalid_argument);       // value count
    EXPECT_NO_THROW(SparseMatrix(2, 2, {0, 1, 2}, {1, 0}, {1.0, 1.0}));
}

TEST(SparseMatrix, FromTripletsSumsDuplicatesAndSorts) {
    const auto A = SparseMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {0, 1, 0.5}});
    EXPECT_TRUE(A.structure_error().empty());
    EXPECT_EQ(A.nnz(), 3u);
    EXPECT_DOUBLE_EQ(A.at(0, 1), 2.5);
    EXPECT_DOUBLE_EQ(A.at(1, 0), 3.0);
    EXPECT_DOUBLE_EQ(A.at(1, 2), 1.0);
    EXPECT_DOUBLE_EQ(A.at(0, 0), 0.0);
}

TEST(Spmv, IdentityAndZero) {
    const DenseVector x{1, 2, 3};
    EXPECT_EQ(spmv(SparseMatrix::identity(3), x), x);
    EXPECT_EQ(spmv(SparseMatrix::zero(3, 3), x), (DenseVector{0, 0, 0}));
}

TEST(Spmv, LaplacianStencilOnConstants) {
    const DenseVector y = spmv(laplacian_1d(4), DenseVector{1, 1, 1});
    EXPECT_DOUBLE_EQ(y[0], 16.0);
    EXPECT_DOUBLE_EQ(y[1], 0.0);
    EXPECT_DOUBLE_EQ(y[2], 16.0);
}

TEST(Spmv, DimensionMismatchThrows) {
    EXPECT_THROW(spmv(SparseMatrix::identity(3), DenseVector{1, 2}), DimensionError);
}

TEST(Spmv, MatchesDenseOracleOnRandomInstances) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const SparseMatrix A = random_sparse(rng, 20, 20, 0.2);
        DenseVector x(20);
        for (double& v : x) v = val(rng);
        const DenseVector y = spmv(A, x);
        const oracle::Vec ref = oracle::matvec(oracle::to_dense(A), x);
        const double scale = std::max(1.0, norm2(ref));
        for (Index i = 0; i < 20; ++i) EXPECT_NEAR(y[i], ref[i], 1e-13 * scale);
    }
}

TEST(Transpose, SmallCases) {
    EXPECT_EQ(transpose(SparseMatrix::identity(4)), SparseMatrix::identity(4));
    const auto A = SparseMatrix::from_triplets(2, 3, {{0, 2, 5.0}});
    const auto T = transpose(A);
    EXPECT_EQ(T.rows(), 3u);
    EXPECT_EQ(T.cols(), 2u);
    EXPECT_EQ(T.nnz(), 1u);
    EXPECT_DOUBLE_EQ(T.at(2, 0), 5.0);
}

TEST(Transpose, IsAnInvolution) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const SparseMatrix A = random_sparse(rng, 10, 10, 0.3);
        const SparseMatrix T = transpose(A);
        EXPECT_TRUE(T.structure_error().empty());
        EXPECT_EQ(transpose(T), A);
    }
}

TEST(Multiply, MatchesDenseOracle) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const SparseMatrix A = random_sparse(rng, 12, 9, 0.3);
        const SparseMatrix B = random_sparse(rng, 9, 14, 0.3);
        const SparseMatrix C = multiply(A, B);
        EXPECT_TRUE(C.structure_error().empty());
        EXPECT_LT(max_abs_diff(oracle::to_dense(C), oracle::matmul(oracle::to_dense(A), oracle::to_dense(B))), 1e-13);
    }
    EXPECT_THROW(multiply(SparseMatrix::identity(3), SparseMatrix::identity(4)), DimensionError);
}

TEST(Galerkin, IdentityTransfersCopyA) {
    const SparseMatrix A = laplacian_1d(8);
    const SparseMatrix I = SparseMatrix::identity(A.rows());
    EXPECT_EQ(galerkin_product(I, A, I), A);
}

TEST(Galerkin, LinearInterpolationCoarsensLaplacian) {
    // 7 fine interior points, coarse points at fine indices 1, 3, 5 (0-based).
    const SparseMatrix A = laplacian_1d(8);
    std::vector<Triplet> t;
    for (Index J = 0; J < 3; ++J) {
        const Index c = 2 * J + 1;
        t.push_back({c - 1, J, 0.5});
        t.push_back({c, J, 1.0});
        t.push_back({c + 1, J, 0.5});
    }
    const SparseMatrix P = SparseMatrix::from_triplets(7, 3, std::move(t));
    const SparseMatrix Ac = galerkin_product(transpose(P), A, P);
    const oracle::Dense Pd = oracle::to_dense(P);
    const oracle::Dense ref = oracle::matmul(oracle::transpose(Pd), oracle::matmul(oracle::to_dense(A), Pd));
    EXPECT_LT(max_abs_diff(oracle::to_dense(Ac), ref), 1e-12);
    // (1/h^2)[-1,2,-1] with h = 1/8 becomes (1/(2 h^2))[-1,2,-1] = 32 [-1,2,-1].
    for (Index i = 0; i < 3; ++i) {
        EXPECT_NEAR(Ac.at(i, i), 64.0, 1e-12);
        if (i + 1 < 3) { EXPECT_NEAR(Ac.at(i, i + 1), -32.0, 1e-12); }
    }
    EXPECT_EQ(Ac.nnz(), 7u);
}

TEST(Galerkin, SymmetricInputGivesSymmetricOutput) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const SparseMatrix B = random_sparse(rng, 15, 15, 0.2);
        const SparseMatrix A = multiply(transpose(B), B);
        const SparseMatrix P = random_sparse(rng, 15, 6, 0.3);
        const SparseMatrix Ac = galerkin_product(transpose(P), A, P);
        const oracle::Dense D = oracle::to_dense(Ac);
        double scale = 0.0;
        for (const auto& row : D)
            for (double v : row) scale = std::max(scale, std::abs(v));
        EXPECT_LE(max_abs_diff(D, oracle::transpose(D)), 1e-14 * std::max(scale, 1.0));
    }
}

TEST(Galerkin, DropsCancelledFill) {
    // R A P where the (0,1) coarse entry cancels exactly.
    const auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
    const auto P = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, -1.0}});
    const SparseMatrix Ac = galerkin_product(transpose(P), A, P);
    for (Index i = 0; i < Ac.rows(); ++i)
        for (double v : Ac.row_values(i)) EXPECT_NE(v, 0.0);
}

TEST(Residual, Cases) {
    const auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 2}, {0, 1, -1}, {1, 0, -1}, {1, 1, 2}});
    EXPECT_EQ(residual(A, DenseVector{1, 1}, DenseVector{1, 1}), (DenseVector{0, 0}));
    EXPECT_EQ(residual(A, DenseVector{0, 0}, DenseVector{3, 4}), (DenseVector{3, 4}));
    EXPECT_THROW(residual(A, DenseVector{0, 0, 0}, DenseVector{3, 4}), DimensionError);

    const SparseMatrix L = laplacian_1d(16);
    oracle::Vec b(L.rows());
    for (Index i = 0; i < b.size(); ++i) b[i] = 1.0 + static_cast<double>(i % 3);
    const oracle::Vec u = oracle::solve(oracle::to_dense(L), b);
    EXPECT_LE(norm2(residual(L, u, b)), 1e-12 * norm2(b));
}

TEST(ZMatrix, Checks) {
    EXPECT_TRUE(is_z_matrix(laplacian_1d(8)).ok);
    const auto bad = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 0.5}, {1, 1, 1}});
    const ZMatrixCheck z = is_z_matrix(bad);
    EXPECT_FALSE(z.ok);
    ASSERT_EQ(z.violations.size(), 1u);
    EXPECT_EQ(z.violations[0], (std::pair<Index, Index>{0, 1}));
    EXPECT_THROW(is_z_matrix(SparseMatrix::zero(2, 3)), DimensionError);

    const auto fem = assemble_fem_2d([](double, double) { return 1.0; }, {}, 4).A;
    EXPECT_TRUE(is_z_matrix(fem).ok);
}

TEST(DiagonalDominance, LaplacianIsWeaklyDominantWithStrictBoundaryRows) {
    const DominanceCheck d = diagonal_dominance(laplacian_1d(8));
    EXPECT_TRUE(d.weakly_dominant);
    EXPECT_TRUE(d.some_row_strict);
    EXPECT_TRUE(d.failing_rows.empty());
    const auto bad = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, -2}, {1, 1, 1}});
    EXPECT_FALSE(diagonal_dominance(bad).weakly_dominant);
}

TEST(Irreducible, Checks) {
    EXPECT_TRUE(is_irreducible(laplacian_1d(8)));
    EXPECT_FALSE(is_irreducible(SparseMatrix::identity(3)));
    const auto one_way = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, -1}, {1, 1, 1}});
    EXPECT_FALSE(is_irreducible(one_way));
}
