#include <cmath>

#include <gtest/gtest.h>

#include "sprank1/oracles.hpp"
#include "sprank1/sparsify.hpp"
#include "test_util.hpp"

namespace sprank1 {
namespace {

using testing::random_unit;
using testing::random_vector;

double sphere_objective(std::span<const double> a, std::span<const double> x, double omega) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * x[i] - omega * std::abs(x[i]);
    return s;
}

TEST(SoftThreshold, Examples) {
    EXPECT_EQ(soft_threshold(Vector{2.0, -1.0, 0.5}, 1.0), (Vector{1.0, 0.0, 0.0}));
    const Vector a{0.3, -7.0, 0.0, 1e-300};
    EXPECT_EQ(soft_threshold(a, 0.0), a);
}

TEST(SoftThreshold, BoundaryGoesToZero) {
    EXPECT_EQ(soft_threshold(Vector{0.25, -0.25, 0.2500001}, 0.25)[0], 0.0);
    EXPECT_EQ(soft_threshold(Vector{0.25, -0.25}, 0.25)[1], 0.0);
    EXPECT_GT(soft_threshold(Vector{0.2500001}, 0.25)[0], 0.0);
}

TEST(SoftThreshold, MatchesPerCoordinateOracle) {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const Vector a = random_vector(rng, 1 + trial % 9);
        const double omega = rng.uniform() * 2.0;
        const Vector s = soft_threshold(a, omega);
        for (std::size_t i = 0; i < a.size(); ++i) {
            double expect = 0.0;
            if (a[i] > omega) expect = a[i] - omega;
            if (a[i] < -omega) expect = a[i] + omega;
            EXPECT_EQ(s[i], expect);
        }
    }
}

TEST(SoftThreshold, NegativeWeightThrows) {
    EXPECT_THROW(soft_threshold(Vector{1.0}, -0.1), validation_error);
    EXPECT_THROW(soft_threshold(Vector{1.0}, std::nan("")), validation_error);
}

TEST(SphereL1Maximize, SingleEntry) {
    const auto r = sphere_l1_maximize(Vector{1.0, 0.0, 0.0}, 0.5);
    EXPECT_EQ(r.x_star, (Vector{1.0, 0.0, 0.0}));
    EXPECT_DOUBLE_EQ(r.value, 0.5);
    EXPECT_EQ(r.branch, SparsifyBranch::soft_threshold_normalized);
}

TEST(SphereL1Maximize, FallbackBranch) {
    const auto r = sphere_l1_maximize(Vector{0.1, 0.2}, 0.5);
    EXPECT_EQ(r.branch, SparsifyBranch::standard_basis_fallback);
    EXPECT_EQ(r.x_star, (Vector{0.0, 1.0}));
    EXPECT_DOUBLE_EQ(r.value, -0.3);
}

TEST(SphereL1Maximize, FallbackKeepsSignAndFirstIndexOnTies) {
    const auto neg = sphere_l1_maximize(Vector{0.1, -0.3, 0.2}, 1.0);
    EXPECT_EQ(neg.x_star, (Vector{0.0, -1.0, 0.0}));
    const auto tie = sphere_l1_maximize(Vector{0.2, -0.2, 0.2}, 0.5);
    EXPECT_EQ(tie.x_star, (Vector{1.0, 0.0, 0.0}));
    // the maximum ties with |a_i| == w exactly: still the fallback branch
    const auto edge = sphere_l1_maximize(Vector{0.5, -0.5}, 0.5);
    EXPECT_EQ(edge.branch, SparsifyBranch::standard_basis_fallback);
    EXPECT_EQ(edge.value, 0.0);
}

TEST(SphereL1Maximize, ZeroWeightNormalizes) {
    const Vector a{3.0, -4.0};
    const auto r = sphere_l1_maximize(a, 0.0);
    EXPECT_DOUBLE_EQ(r.x_star[0], 0.6);
    EXPECT_DOUBLE_EQ(r.x_star[1], -0.8);
    EXPECT_DOUBLE_EQ(r.value, 5.0);
}

TEST(SphereL1Maximize, TinySupportIsNotMisclassified) {
    const auto r = sphere_l1_maximize(Vector{std::nextafter(0.5, 1.0), 0.1}, 0.5);
    EXPECT_EQ(r.branch, SparsifyBranch::soft_threshold_normalized);
    EXPECT_EQ(r.x_star, (Vector{1.0, 0.0}));
}

TEST(SphereL1Maximize, Errors) {
    EXPECT_THROW(sphere_l1_maximize(Vector{0.0, 0.0}, 0.1), validation_error);
    EXPECT_THROW(sphere_l1_maximize(Vector{}, 0.1), validation_error);
    EXPECT_THROW(sphere_l1_maximize(Vector{1.0}, -1.0), validation_error);
}

TEST(SphereL1Maximize, MatchesProjectedGradientSearch) {
    Rng rng(2025);
    for (int trial = 0; trial < 5; ++trial) {
        const Vector a = random_unit(rng, 3);
        const auto r = sphere_l1_maximize(a, 0.4);
        const auto oracle = oracles::oracle_sphere_l1(a, 0.4, 200, 77 + trial);
        EXPECT_NEAR(r.value, oracle.search_value, 1e-6);
    }
}

// Invariants over random inputs.
TEST(SphereL1Maximize, Properties) {
    Rng rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 12;
        const Vector a = random_vector(rng, n);
        const double omega = rng.uniform() * 1.5;
        const auto r = sphere_l1_maximize(a, omega);

        EXPECT_NEAR(norm2(r.x_star), 1.0, 1e-12);
        EXPECT_EQ(r.branch == SparsifyBranch::standard_basis_fallback, all_zero(soft_threshold(a, omega)));
        for (std::size_t i = 0; i < n; ++i) {
            if (r.x_star[i] != 0.0) {
                EXPECT_EQ(std::signbit(r.x_star[i]), std::signbit(a[i]));
            }
        }
        if (r.branch == SparsifyBranch::soft_threshold_normalized) {
            EXPECT_NEAR(r.value, sphere_objective(a, r.x_star, omega), 1e-12);
        }

        for (int k = 0; k < 10; ++k) {
            const Vector z = random_unit(rng, n);
            EXPECT_LE(sphere_objective(a, z, omega), r.value + 1e-12);
        }

        const double bigger = omega + rng.uniform();
        const auto r2 = sphere_l1_maximize(a, bigger);
        EXPECT_LE(r2.value, r.value + 1e-15);
        EXPECT_LE(count_nonzero(soft_threshold(a, bigger)), count_nonzero(soft_threshold(a, omega)));
    }
}

TEST(SphereL1Maximize, OptimalityDominanceThousandDirections) {
    Rng rng(4242);
    const Vector a = random_vector(rng, 6);
    const double omega = 0.3;
    const auto r = sphere_l1_maximize(a, omega);
    for (int k = 0; k < 1000; ++k) {
        EXPECT_LE(sphere_objective(a, random_unit(rng, 6), omega), r.value + 1e-12);
    }
}

TEST(SphereL1Maximize, UnitInputLowerBound) {
    Rng rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 30;
        const Vector a = random_unit(rng, n);
        const double omega = rng.uniform() / std::sqrt(static_cast<double>(n));
        const auto r = sphere_l1_maximize(a, omega);
        EXPECT_EQ(r.branch, SparsifyBranch::soft_threshold_normalized);
        EXPECT_GE(sphere_objective(a, r.x_star, omega), 1.0 - omega * std::sqrt(static_cast<double>(n)) - 1e-12);
    }
}

TEST(XiLowerBound, Examples) {
    EXPECT_NEAR(xi_lower_bound(1, 1e-9), 1.0, 1e-8);
    EXPECT_DOUBLE_EQ(xi_lower_bound(4, 0.25), 0.25);
}

TEST(XiLowerBound, MatchesSupportEnumeration) {
    const std::size_t n = 10;
    const double omega = 0.3;
    double best = 1e300;
    for (std::size_t k = 1; k <= n; ++k) {
        const double g = 1.0 / std::sqrt(static_cast<double>(k)) - omega;
        best = std::min(best, k * g * g);
    }
    EXPECT_NEAR(xi_lower_bound(n, omega), best, 1e-15);
}

TEST(XiLowerBound, DomainErrors) {
    EXPECT_THROW(xi_lower_bound(4, 0.0), validation_error);
    EXPECT_THROW(xi_lower_bound(4, 0.5), validation_error);
    EXPECT_THROW(xi_lower_bound(4, -0.1), validation_error);
    EXPECT_THROW(xi_lower_bound(0, 0.1), validation_error);
}

TEST(XiEmpirical, StaysAboveBound) {
    EXPECT_GE(xi_empirical(2, 0.1, 100), xi_lower_bound(2, 0.1) - 1e-8);
    const double near_edge = xi_empirical(5, 0.44, 100);
    EXPECT_GE(near_edge, xi_lower_bound(5, 0.44) - 1e-8);
    EXPECT_LT(near_edge, 1e-3);
}

TEST(XiEmpirical, OneDimensionIsExact) {
    for (double omega : {0.1, 0.5, 0.9}) {
        EXPECT_EQ(xi_empirical(1, omega, 10), (1.0 - omega) * (1.0 - omega));
    }
}

}  // namespace
}  // namespace sprank1
