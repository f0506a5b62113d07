#include "unigrid/picard.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>

using namespace unigrid;

namespace {

PicardProblem constant_problem(Index n) {
    return {[](double, double) { return 1.0; }, n, 0.0, 1.0};
}

PicardProblem mesh_problem(Index n) {
    return {[](double, double u) { return coefficients::mesh_density_a(u); }, n, 0.0, 1.0};
}

DenseVector squared_guess(Index n) {
    DenseVector u = uniform_grid_guess(n);
    for (double& v : u) v *= v;
    return u;
}

SolveOptions v2() {
    SolveOptions o;
    o.nu1 = 2;
    o.max_iters = 200;
    return o;
}

}  // namespace

TEST(Picard, UniformGuessSolvesConstantCoefficientExactly) {
    // u = x is the solution of -u'' = 0, u(0) = 0, u(1) = 1.
    const PicardResult r = picard_solve(constant_problem(32), uniform_grid_guess(32), make_inner_solver(Method::amg), v2());
    EXPECT_TRUE(r.record.converged);
    EXPECT_EQ(r.record.iters, 0u);
}

TEST(Picard, ConstantCoefficientIsOneLinearSolve) {
    // The inner solve stops at its relative tolerance, which can leave one
    // more Picard step.
    const PicardResult loose =
        picard_solve(constant_problem(64), squared_guess(64), make_inner_solver(Method::amg), v2());
    EXPECT_TRUE(loose.record.converged);
    EXPECT_LE(loose.record.iters, 2u);

    PicardOptions tight;
    tight.inner_rel_tol = 1e-14;
    const PicardResult exact =
        picard_solve(constant_problem(64), squared_guess(64), make_inner_solver(Method::amg), v2(), tight);
    EXPECT_EQ(exact.record.iters, 1u);
    for (Index i = 0; i < exact.u.size(); ++i) {
        EXPECT_NEAR(exact.u[i], static_cast<double>(i + 1) / 64.0, 1e-12);
    }
}

class PicardMesh : public ::testing::TestWithParam<Method> {};

TEST_P(PicardMesh, ConvergesToMonotonePositiveMap) {
    const Index n = 256;
    const PicardResult r =
        picard_solve(mesh_problem(n), uniform_grid_guess(n), make_inner_solver(GetParam()), v2());
    ASSERT_TRUE(r.record.converged);
    EXPECT_GE(r.record.iters, 6u);
    EXPECT_LE(r.record.iters, 16u);
    EXPECT_LE(r.record.nonlinear_residuals.back(), 1e-10);
    EXPECT_EQ(r.record.linear_iterations.size(), r.record.iters);
    EXPECT_EQ(r.record.stats.size(), r.record.iters);
    for (Index i = 0; i < r.u.size(); ++i) {
        EXPECT_GT(r.u[i], 0.0);
        if (i > 0) {
            EXPECT_GT(r.u[i], r.u[i - 1]);
        }
        EXPECT_LT(r.u[i], 1.0);
    }
    // Discrete oracle. At h = 1/256 the a = 1000 layer of the continuous map
    // is under-resolved: only the last cell sees a = 1, the other cells carry
    // a = 1000, and flux balance 1000 u_{N-1} / (1 - h) = (1 - u_{N-1}) / h
    // gives u_i = i / (1000 + N - 1). Two a = 1 cells would put the average
    // of the second-to-last cell below 1/2, so this fixed point is unique.
    for (Index i = 0; i < r.u.size(); ++i) {
        const double expected = static_cast<double>(i + 1) / static_cast<double>(1000 + n - 1);
        EXPECT_NEAR(r.u[i], expected, 1e-9) << "node " << i + 1;
    }
}

INSTANTIATE_TEST_SUITE_P(Methods, PicardMesh,
                         ::testing::Values(Method::amg, Method::ug_threshold, Method::ug_lininterp, Method::ug_gs),
                         [](const auto& info) {
                             std::string s(to_string(info.param));
                             for (char& c : s) {
                                 if (c == '-') c = '_';
                             }
                             return s;
                         });

TEST(Picard, EveryFrozenOperatorIsAnMMatrixCandidate) {
    const Index n = 128;
    Index calls = 0;
    const InnerSolver base = make_inner_solver(Method::ug_threshold);
    const InnerSolver checking = [&](const LinearProblem& p, std::span<double> u, const SolveOptions& o) {
        ++calls;
        EXPECT_TRUE(is_z_matrix(p.A).ok);
        EXPECT_TRUE(is_irreducible(p.A));
        EXPECT_TRUE(diagonal_dominance(p.A).weakly_dominant);
        for (double v : u) EXPECT_GT(v, 0.0);
        return base(p, u, o);
    };
    const PicardResult r = picard_solve(mesh_problem(n), uniform_grid_guess(n), checking, v2());
    EXPECT_TRUE(r.record.converged);
    EXPECT_EQ(calls, r.record.iters);
}

TEST(Picard, BudgetExhaustionCarriesTheRecord) {
    PicardOptions opts;
    opts.max_picard = 2;
    try {
        picard_solve(mesh_problem(128), uniform_grid_guess(128), make_inner_solver(Method::amg), v2(), opts);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.record().iters, 2u);
        EXPECT_FALSE(e.record().converged);
        EXPECT_EQ(e.record().nonlinear_residuals.size(), 2u);
    }
}

TEST(Picard, InvalidOptionsRejected) {
    PicardOptions opts;
    opts.tau_nl = 0.0;
    EXPECT_THROW(picard_solve(mesh_problem(8), uniform_grid_guess(8), make_inner_solver(Method::amg), v2(), opts),
                 std::invalid_argument);
}

TEST(Picard, UniformGuessIsTheGrid) {
    EXPECT_EQ(uniform_grid_guess(4), (DenseVector{0.25, 0.5, 0.75}));
}
