#pragma once

// Soft thresholding and its sphere-constrained counterpart.
//
//   S(a, w) = sgn(a) * max(|a| - w, 0)                    (entrywise)
//   N(a, w) = argmax_{||x|| = 1} <a, x> - w ||x||_1
//           = S(a, w) / ||S(a, w)||     if S(a, w) != 0
//           = sgn(a_i) e_i              otherwise, i = argmax |a_i|
//
// plus the quantity xi(n) = min_{||x|| = 1} sum (|x_i| - w)_+^2, which bounds
// how much of a unit vector survives thresholding.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>

#include "sprank1/errors.hpp"
#include "sprank1/rng.hpp"
#include "sprank1/vector_ops.hpp"

namespace sprank1 {

enum class SparsifyBranch { soft_threshold_normalized, standard_basis_fallback };

struct SparsifyResult {
    Vector x_star;  ///< unit-norm maximizer
    double value;   ///< max of <a, x> - w ||x||_1 over the unit sphere
    SparsifyBranch branch;
};

namespace detail {

inline void check_weight(double omega, const char* who) {
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
        throw validation_error(std::string(who) + ": regularization weight must be finite and >= 0");
    }
}

}  // namespace detail

inline Vector soft_threshold(std::span<const double> a, double omega) {
    detail::check_weight(omega, "soft_threshold");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double shrunk = std::abs(a[i]) - omega;
        // |a_i| == omega lands on the zero side.
        out[i] = shrunk > 0.0 ? std::copysign(shrunk, a[i]) : 0.0;
    }
    return out;
}

inline SparsifyResult sphere_l1_maximize(std::span<const double> a, double omega) {
    detail::check_weight(omega, "sphere_l1_maximize");
    if (a.empty() || all_zero(a)) {
        throw validation_error("sphere_l1_maximize: input vector must be nonzero");
    }
    Vector s = soft_threshold(a, omega);
    if (!all_zero(s)) {
        const double n = norm2(s);
        for (double& v : s) v /= n;
        return {std::move(s), n, SparsifyBranch::soft_threshold_normalized};
    }
    // Every |a_i| <= omega: the best unit vector is a signed basis vector at
    // the largest magnitude (first one on ties).
    std::size_t best = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (std::abs(a[i]) > std::abs(a[best])) best = i;
    }
    Vector x(a.size(), 0.0);
    x[best] = a[best] < 0.0 ? -1.0 : 1.0;
    return {std::move(x), std::abs(a[best]) - omega, SparsifyBranch::standard_basis_fallback};
}

/// n (1/sqrt(n) - w)^2, the lower bound on xi(n) for 0 < w < 1/sqrt(n).
inline double xi_lower_bound(std::size_t n, double omega) {
    if (n == 0) throw validation_error("xi_lower_bound: n must be positive");
    const double r = 1.0 / std::sqrt(static_cast<double>(n));
    if (!(omega > 0.0 && omega < r)) {
        throw validation_error("xi_lower_bound: weight must lie in (0, 1/sqrt(n))");
    }
    const double gap = r - omega;
    return static_cast<double>(n) * gap * gap;
}

/// Empirical estimate of xi(n): best of `trials` projected gradient descents
/// of sum (|x_i| - w)_+^2 on the unit sphere from random starts. Test-side
/// check on xi_lower_bound; it shares none of its arithmetic.
inline double xi_empirical(std::size_t n, double omega, int trials, std::uint64_t seed = 2024) {
    xi_lower_bound(n, omega);  // domain check
    if (trials < 1) throw validation_error("xi_empirical: need at least one trial");
    auto f = [omega](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) {
            const double e = std::abs(v) - omega;
            if (e > 0.0) s += e * e;
        }
        return s;
    };
    Rng rng(seed);
    double best = std::numeric_limits<double>::infinity();
    constexpr int kIters = 600;
    constexpr double kStep0 = 0.5;
    const double decay = std::pow(1e-9 / kStep0, 1.0 / kIters);
    Vector x(n), g(n);
    for (int t = 0; t < trials; ++t) {
        for (double& v : x) v = rng.normal();
        x = normalized(x);
        double step = kStep0;
        for (int it = 0; it < kIters; ++it) {
            for (std::size_t i = 0; i < n; ++i) {
                const double e = std::abs(x[i]) - omega;
                g[i] = e > 0.0 ? 2.0 * std::copysign(e, x[i]) : 0.0;
            }
            for (std::size_t i = 0; i < n; ++i) x[i] -= step * g[i];
            x = normalized(x);
            step *= decay;
        }
        best = std::min(best, f(x));
    }
    return best;
}

}  // namespace sprank1
