#include <cmath>

#include <gtest/gtest.h>

#include "sprank1/amm.hpp"
#include "sprank1/bench.hpp"
#include "test_util.hpp"

namespace sprank1 {
namespace {

using testing::random_tensor;
using testing::random_units;

TEST(AmmBlockUpdate, RankOneRecoversLastFactor) {
    Rng rng(1);
    const auto f = random_units(rng, {3, 4, 5});
    const DenseTensor t = testing::outer(f, 1.7);
    std::vector<Vector> xs{f[0], f[1], Vector(5, 0.0)};
    const Vector w = amm_block_update(t, xs, 2, 0.0);
    EXPECT_NEAR(std::abs(dot(w, f[2])), 1.0, 1e-12);
}

TEST(AmmBlockUpdate, LargeWeightFallsBackToBasisVector) {
    Rng rng(2);
    const DenseTensor t = random_tensor(rng, {3, 3, 3});
    const auto xs = random_units(rng, t.shape());
    const Vector a = contract_all_but(t, xs, 1);
    const Vector w = amm_block_update(t, xs, 1, max_abs(a) + 1.0);
    EXPECT_EQ(count_nonzero(w), 1u);
    EXPECT_EQ(norm1(w), 1.0);
}

TEST(AmmBlockUpdate, NeverDecreasesObjective) {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const DenseTensor t = random_tensor(rng, {2 + static_cast<std::size_t>(trial % 4), 3, 4});
        auto xs = random_units(rng, t.shape());
        const RegParams params = RegParams::scaled_for(t.shape(), rng.uniform());
        const double before = objective_value(t, xs, params);
        const std::size_t j = trial % 3;
        xs[j] = amm_block_update(t, xs, j, params[j]);
        EXPECT_GE(objective_value(t, xs, params), before - 1e-12);
    }
}

TEST(AmmBlockUpdate, ZeroContractionThrows) {
    const Vector e1{1, 0}, e2{0, 1};
    const DenseTensor t = testing::outer({e1, e1, e1});
    const std::vector<Vector> xs{e2, e1, e1};
    EXPECT_THROW(amm_block_update(t, xs, 1, 0.0), degenerate_block_error);
}

TEST(AmmSolve, FixedPointConvergesInOneSweep) {
    Rng rng(4);
    const auto f = random_units(rng, {4, 3, 5});
    const DenseTensor t = testing::outer(f, 3.0);
    const AmmTrace tr = amm_solve(t, RegParams::zeros(3), f, AmmConfig{});
    EXPECT_TRUE(tr.converged);
    EXPECT_EQ(tr.sweeps, 1);
    EXPECT_LT(tr.movement_per_sweep[0], 1e-12);
    EXPECT_NEAR(tr.final.lambda, 3.0, 1e-12);
}

TEST(AmmSolve, MonotoneAscentAndFixedPointConsistency) {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const InstanceSpec spec{Shape(3 + trial % 2, 6 + trial % 5), 10, 0.5, static_cast<std::uint64_t>(trial)};
        const DenseTensor t = generate_instance(spec);
        const RegParams params = RegParams::default_for(t.shape());
        AmmConfig cfg;
        cfg.init = static_cast<AmmInit>(trial % 3);
        cfg.seed = trial;
        const AmmTrace tr = amm_solve(t, params, cfg);
        ASSERT_FALSE(tr.degenerate);
        double prev = tr.initial_objective;
        for (double obj : tr.objective_per_sweep) {
            EXPECT_GE(obj, prev - 1e-12);
            prev = obj;
        }
        ASSERT_TRUE(tr.converged);
        EXPECT_EQ(static_cast<int>(tr.objective_per_sweep.size()), tr.sweeps);

        // one more sweep from the final point barely moves
        AmmConfig once = cfg;
        once.max_sweeps = 1;
        const AmmTrace again = amm_solve(t, params, tr.final.xs, once);
        EXPECT_LT(again.movement_per_sweep[0], cfg.stop_tol);

        const double fro = t.frobenius_norm();
        EXPECT_LE(std::abs(tr.final.lambda - multilinear_value(t, tr.final.xs)), 1e-10 * fro);
        EXPECT_LE(std::abs(tr.final.objective - objective_value(t, tr.final.xs, params)), 1e-10 * fro);
        EXPECT_LE(tr.final.lambda, upper_bound_vub(t) + 1e-8 * fro);
    }
}

TEST(AmmSolve, PrescaleOnlyChangesUnitsOfTrace) {
    Rng rng(6);
    const DenseTensor t = random_tensor(rng, {4, 5, 3});
    const RegParams params = RegParams::zeros(3);
    AmmConfig cfg;
    const AmmTrace scaled = amm_solve(t, params, cfg);
    cfg.prescale = false;
    const AmmTrace raw = amm_solve(t, params, cfg);
    EXPECT_NEAR(scaled.final.lambda, raw.final.lambda, 1e-8 * t.frobenius_norm());
    EXPECT_NEAR(scaled.initial_objective * t.max_abs(), raw.initial_objective, 1e-8 * t.frobenius_norm());
}

TEST(AmmSolve, DegenerateBlockKeepsLastIterate) {
    const Vector e1{1, 0}, e2{0, 1};
    const DenseTensor t = testing::outer({e1, e1, e1});
    const std::vector<Vector> start{e1, e2, e1};
    const AmmTrace tr = amm_solve(t, RegParams::zeros(3), start, AmmConfig{});
    EXPECT_TRUE(tr.degenerate);
    EXPECT_FALSE(tr.converged);
    EXPECT_FALSE(tr.degenerate_reason.empty());
    EXPECT_EQ(tr.final.xs, start);
    EXPECT_EQ(tr.final.lambda, 0.0);
}

TEST(AmmSolve, ConfigErrors) {
    Rng rng(7);
    const DenseTensor t = random_tensor(rng, {2, 2, 2});
    AmmConfig bad;
    bad.stop_tol = 0.0;
    EXPECT_THROW(amm_solve(t, RegParams::zeros(3), bad), validation_error);
    bad = AmmConfig{};
    bad.max_sweeps = 0;
    EXPECT_THROW(amm_solve(t, RegParams::zeros(3), bad), validation_error);
    EXPECT_THROW(amm_solve(DenseTensor::zeros({2, 2, 2}), RegParams::zeros(3)), numeric_error);
    EXPECT_THROW(amm_solve(t, RegParams::zeros(2)), dimension_error);
    EXPECT_THROW(amm_solve(t, RegParams::zeros(3), std::vector<Vector>{{1, 0}, {1, 0}}, AmmConfig{}),
                 dimension_error);
}

TEST(RandomInit, UnitDeterministicAndSparse) {
    const Shape shape{50, 50, 50, 50};
    const RegParams params = RegParams::default_for(shape);
    EXPECT_EQ(random_init(shape, params, 9), random_init(shape, params, 9));
    EXPECT_NE(random_init(shape, params, 9), random_init(shape, params, 10));
    double nnz_ratio = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (const Vector& x : random_init(shape, params, seed)) {
            EXPECT_NEAR(norm2(x), 1.0, 1e-12);
            nnz_ratio += static_cast<double>(count_nonzero(x)) / static_cast<double>(x.size());
            ++count;
        }
    }
    EXPECT_LT(nnz_ratio / count, 1.0);
}

}  // namespace
}  // namespace sprank1
