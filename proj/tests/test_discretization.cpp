#include "support/dense_oracle.hpp"
#include "unigrid/discretization.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace unigrid;

namespace {

void expect_row(const SparseMatrix& A, Index i, std::vector<std::pair<Index, double>> expected) {
    auto c = A.row_cols(i);
    auto v = A.row_values(i);
    ASSERT_EQ(c.size(), expected.size()) << "row " << i;
    for (std::size_t k = 0; k < c.size(); ++k) {
        EXPECT_EQ(c[k], expected[k].first);
        EXPECT_DOUBLE_EQ(v[k], expected[k].second);
    }
}

}  // namespace

TEST(AssembleFd1d, ConstantCoefficientStencil) {
    const auto p = assemble_fd_1d([](double) { return 1.0; }, {}, [](double) { return 0.0; }, 4, 0.0, 0.0);
    ASSERT_EQ(p.size(), 3u);
    expect_row(p.A, 0, {{0, 32}, {1, -16}});
    expect_row(p.A, 1, {{0, -16}, {1, 32}, {2, -16}});
    expect_row(p.A, 2, {{1, -16}, {2, 32}});
    EXPECT_EQ(p.b, (DenseVector{0, 0, 0}));
    EXPECT_EQ(p.x, (std::vector<double>{0.25, 0.5, 0.75}));
}

TEST(AssembleFd1d, TwoElementsWithBoundaryLift) {
    const auto p = assemble_fd_1d([](double) { return 1.0; }, {}, {}, 2, 0.0, 1.0);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_DOUBLE_EQ(p.A.at(0, 0), 8.0);
    EXPECT_DOUBLE_EQ(p.b[0], 4.0);
    EXPECT_DOUBLE_EQ(p.b[0] / p.A.at(0, 0), 0.5);
}

TEST(AssembleFd1d, ReactionTermOnDiagonal) {
    const auto p = assemble_fd_1d([](double) { return 1.0; }, [](double x) { return x; }, {}, 4, 0.0, 0.0);
    EXPECT_DOUBLE_EQ(p.A.at(1, 1), 32.5);
}

TEST(AssembleFd1d, Errors) {
    EXPECT_THROW(assemble_fd_1d([](double) { return 1.0; }, {}, {}, 1, 0, 0), std::invalid_argument);
    EXPECT_THROW(assemble_fd_1d([](double x) { return x < 0.5 ? 1.0 : 0.0; }, {}, {}, 4, 0, 0),
                 std::invalid_argument);
}

TEST(Coefficients, PiecewiseDefinitions) {
    EXPECT_EQ(coefficients::sigma_1d_jump(0.375), 1e12);
    EXPECT_EQ(coefficients::sigma_1d_jump(0.4375), 1.0);
    EXPECT_EQ(coefficients::sigma_1d_jump(0.2), 1e12);
    EXPECT_EQ(coefficients::sigma_1d_jump(0.7), 1.0);
    EXPECT_EQ(coefficients::sigma_2d_region(0.5, 0.5), 1e6);
    EXPECT_EQ(coefficients::sigma_2d_region(0.9, 0.9), 1.0);
    EXPECT_EQ(coefficients::sigma_2d_region(0.5, 0.7), 1.0);
    EXPECT_EQ(coefficients::sigma_checkerboard(0.125, 0.125, 4), 1.0);
    EXPECT_EQ(coefficients::sigma_checkerboard(0.125, 0.01, 4), 1000.0);
    EXPECT_EQ(coefficients::mesh_density_a(0.49), 1000.0);
    EXPECT_EQ(coefficients::mesh_density_a(0.5), 1.0);
}

TEST(AssemblePicard1d, ConstantCoefficientIsLaplacian) {
    const DenseVector u{0.3, 0.1, 0.9};
    const auto p = assemble_picard_1d([](double, double) { return 1.0; }, u, 4, 0.0, 1.0);
    expect_row(p.A, 1, {{0, -16}, {1, 32}, {2, -16}});
    EXPECT_EQ(p.b, (DenseVector{0, 0, 16}));
}

TEST(AssemblePicard1d, SamplesCoefficientAtMidpointValues) {
    std::vector<double> seen;
    const auto a = [&](double, double u) {
        seen.push_back(u);
        return coefficients::mesh_density_a(u);
    };
    const auto p = assemble_picard_1d(a, DenseVector{0.25, 0.5, 0.75}, 4, 0.0, 1.0);
    EXPECT_EQ(seen, (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
    // sigma half-cells (1000, 1000, 1, 1), scaled by 1/h^2 = 16.
    expect_row(p.A, 0, {{0, 32000}, {1, -16000}});
    expect_row(p.A, 1, {{0, -16000}, {1, 16016}, {2, -16}});
    expect_row(p.A, 2, {{1, -16}, {2, 32}});
    EXPECT_EQ(p.b, (DenseVector{0, 0, 16}));
    const oracle::Vec u = oracle::solve(oracle::to_dense(p.A), p.b);
    for (double v : u) EXPECT_GT(v, 0.0);
}

TEST(AssemblePicard1d, Errors) {
    const auto a = [](double, double) { return 1.0; };
    EXPECT_THROW(assemble_picard_1d(a, DenseVector{1.0}, 4, 0, 1), DimensionError);
    EXPECT_THROW(assemble_picard_1d(a, DenseVector{}, 1, 0, 1), std::invalid_argument);
}

TEST(ElementStiffness, MatchesQuadratureOracle) {
    const ElementMatrix K = bilinear_element_stiffness();
    const auto Q = oracle::bilinear_stiffness_quadrature();
    for (int a = 0; a < 4; ++a) {
        double row = 0.0;
        for (int b = 0; b < 4; ++b) {
            EXPECT_NEAR(K[a][b], Q[a][b], 1e-15);
            row += K[a][b];
        }
        EXPECT_NEAR(row, 0.0, 1e-15);
    }
}

TEST(AssembleFem2d, SingleInteriorNode) {
    const auto p = assemble_fem_2d([](double, double) { return 1.0; }, [](double, double) { return 1.0; }, 2);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_NEAR(p.A.at(0, 0), 8.0 / 3.0, 1e-15);
    // Four elements, each contributing f(center) h^2 / 4 with h = 1/2.
    EXPECT_DOUBLE_EQ(p.b[0], 0.25);
}

TEST(AssembleFem2d, InteriorRowsAnnihilateConstants) {
    const Index N = 8, m = N - 1;
    const auto p = assemble_fem_2d([](double, double) { return 1.0; }, {}, N);
    const DenseVector y = spmv(p.A, DenseVector(p.size(), 1.0));
    for (Index j = 1; j + 1 < m; ++j)
        for (Index i = 1; i + 1 < m; ++i) EXPECT_NEAR(y[j * m + i], 0.0, 1e-13);
}

TEST(AssembleFem2d, NodeOrderingIsXFastest) {
    const auto p = assemble_fem_2d([](double, double) { return 1.0; }, {}, 4);
    ASSERT_EQ(p.x.size(), 9u);
    EXPECT_DOUBLE_EQ(p.x[1], 0.5);
    EXPECT_DOUBLE_EQ(p.y[1], 0.25);
    EXPECT_DOUBLE_EQ(p.x[3], 0.25);
    EXPECT_DOUBLE_EQ(p.y[3], 0.5);
}

TEST(AssembleFem2d, SymmetricZMatrixForAllFields) {
    const std::vector<Coefficient2d> fields{
        [](double, double) { return 1.0; },
        [](double x, double y) { return coefficients::sigma_2d_region(x, y); },
        [](double x, double y) { return coefficients::sigma_checkerboard(x, y, 2); },
    };
    for (const auto& s : fields) {
        const auto p = assemble_fem_2d(s, [](double, double) { return 1.0; }, 32);
        EXPECT_TRUE(is_z_matrix(p.A).ok);
        const oracle::Dense D = oracle::to_dense(p.A);
        double scale = 0.0, asym = 0.0;
        for (Index i = 0; i < D.size(); ++i)
            for (Index j = 0; j < D.size(); ++j) {
                scale = std::max(scale, std::abs(D[i][j]));
                asym = std::max(asym, std::abs(D[i][j] - D[j][i]));
            }
        EXPECT_LE(asym, 1e-13 * scale);
    }
}

// Property suite for the 1D operators.

TEST(Fd1dProperties, ZMatrixIrreducibleWeaklyDominant) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> coef(0.01, 100.0);
    for (Index N : {4u, 9u, 32u, 64u, 256u}) {
        std::vector<double> jumps(5);
        for (double& c : jumps) c = coef(rng);
        const auto sigma = [&](double x) { return jumps[static_cast<std::size_t>(x * 5.0)]; };
        for (const LinearProblem& p :
             {assemble_fd_1d(sigma, {}, {}, N, 0.0, 0.0),
              assemble_fd_1d([](double x) { return coefficients::sigma_1d_jump(x); }, {}, {}, N, 0.0, 0.0),
              assemble_picard_1d([](double, double u) { return coefficients::mesh_density_a(u); },
                                 DenseVector(N - 1, 0.4), N, 0.0, 1.0)}) {
            EXPECT_TRUE(is_z_matrix(p.A).ok);
            EXPECT_TRUE(is_irreducible(p.A));
            const DominanceCheck d = diagonal_dominance(p.A);
            EXPECT_TRUE(d.weakly_dominant);
            EXPECT_TRUE(d.some_row_strict);
        }
    }
}

TEST(Fd1dProperties, NonnegativeLoadGivesPositiveSolution) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> coef(0.001, 1000.0), load(0.0, 1.0), coin(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const Index N = 2 + static_cast<Index>(coin(rng) * 63.0);  // N - 1 <= 63 unknowns
        std::vector<double> sig(N);
        for (double& s : sig) s = coef(rng);
        const auto p = assemble_fd_1d([&](double x) { return sig[std::min<Index>(N - 1, static_cast<Index>(x * N))]; },
                                      {}, {}, N, 0.0, 0.0);
        oracle::Vec b(p.size());
        for (double& v : b) v = coin(rng) < 0.3 ? load(rng) : 0.0;
        b[static_cast<std::size_t>(coin(rng) * static_cast<double>(b.size()))] = 1.0;
        const oracle::Vec u = oracle::solve(oracle::to_dense(p.A), b);
        for (double v : u) EXPECT_GT(v, 0.0);
    }
}

TEST(Fd1dProperties, SecondOrderConvergence) {
    // -(σ u')' = f with σ = 1 + x, u = sin(πx).
    using std::numbers::pi;
    const auto sigma = [](double x) { return 1.0 + x; };
    const auto f = [](double x) { return -std::cos(pi * x) * pi + (1.0 + x) * pi * pi * std::sin(pi * x); };
    auto error = [&](Index N) {
        const auto p = assemble_fd_1d(sigma, {}, f, N, 0.0, 0.0);
        const oracle::Vec u = oracle::solve(oracle::to_dense(p.A), p.b);
        double e = 0.0;
        for (Index i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - std::sin(pi * p.x[i])));
        return e;
    };
    const double e32 = error(32), e64 = error(64);
    EXPECT_GT(e32 / e64, 3.5);
    EXPECT_LT(e32 / e64, 4.5);
}
