#pragma once

// Brute-force reference implementations. Slow on purpose and written against
// raw indices and scalar arithmetic only, so they can check the fast paths
// without sharing their kernels. Restrict them to small inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sprank1/errors.hpp"
#include "sprank1/rng.hpp"
#include "sprank1/tensor.hpp"

namespace sprank1::oracles {

struct OracleReport {
    double value = 0.0;
    std::vector<Vector> argopt;
    int starts_used = 0;
    int iterations = 0;
    /// Best value over the random starts alone (sphere oracle only).
    double search_value = 0.0;
};

/// sum over every multi-index of A(i_1..i_d) * prod_j x_j(i_j), odometer order.
inline double oracle_multilinear(const DenseTensor& t, std::span<const Vector> xs) {
    const Shape& shape = t.shape();
    if (xs.size() != shape.size()) throw dimension_error("oracle_multilinear: wrong number of factors");
    for (std::size_t j = 0; j < shape.size(); ++j) {
        if (xs[j].size() != shape[j]) throw dimension_error("oracle_multilinear: factor length mismatch");
    }
    std::vector<std::size_t> idx(shape.size(), 0);
    double total = 0.0;
    while (true) {
        double term = t(idx);
        for (std::size_t j = 0; j < shape.size(); ++j) term *= xs[j][idx[j]];
        total += term;
        std::size_t j = 0;
        while (j < shape.size() && ++idx[j] == shape[j]) idx[j++] = 0;
        if (j == shape.size()) break;
    }
    return total;
}

struct JacobiResult {
    std::vector<double> eigenvalues;  ///< unsorted diagonal after convergence
    int sweeps = 0;
    double off_norm = 0.0;
};

/// Cyclic Jacobi rotations on a symmetric n x n matrix (row-major, n*n).
/// Sweeps until the off-diagonal Frobenius norm is below rel_tol * ||G||_F.
inline JacobiResult jacobi_eigenvalues(std::vector<double> g, std::size_t n, double rel_tol = 1e-13,
                                       int max_sweeps = 100) {
    if (g.size() != n * n) throw dimension_error("jacobi_eigenvalues: not square");
    auto at = [&](std::size_t i, std::size_t j) -> double& { return g[i * n + j]; };
    double total = 0.0;
    for (double v : g) total += v * v;
    total = std::sqrt(total);
    auto off = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += at(i, j) * at(i, j);
        return std::sqrt(s);
    };
    JacobiResult res;
    res.off_norm = off();
    while (res.off_norm > rel_tol * total && res.sweeps < max_sweeps) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double tan = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(tan * tan + 1.0);
                const double s = tan * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
        ++res.sweeps;
        res.off_norm = off();
    }
    res.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.eigenvalues[i] = at(i, i);
    return res;
}

/// Largest singular value: sqrt of the top eigenvalue of the smaller Gram
/// matrix (M^T M or M M^T; both carry the same nonzero spectrum).
inline double oracle_lambda_max(const MatrixView& m) {
    const bool use_rows = m.rows <= m.cols;
    const std::size_t n = use_rows ? m.rows : m.cols;
    std::vector<double> g(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            double s = 0.0;
            if (use_rows) {
                for (std::size_t k = 0; k < m.cols; ++k) s += m(a, k) * m(b, k);
            } else {
                for (std::size_t k = 0; k < m.rows; ++k) s += m(k, a) * m(k, b);
            }
            g[a * n + b] = s;
            g[b * n + a] = s;
        }
    }
    const JacobiResult res = jacobi_eigenvalues(std::move(g), n);
    const double top = *std::max_element(res.eigenvalues.begin(), res.eigenvalues.end());
    return std::sqrt(std::max(top, 0.0));
}

/// max <a, x> - w ||x||_1 over the unit sphere by projected (sub)gradient
/// ascent from `starts` random unit vectors, geometric step decay. The value
/// of `candidate` (if given) is evaluated with the same objective and folded
/// into `value`; `search_value` keeps the random-start optimum on its own.
inline OracleReport oracle_sphere_l1(std::span<const double> a, double omega, int starts, std::uint64_t seed,
                                     std::span<const double> candidate = {}) {
    const std::size_t n = a.size();
    if (n == 0) throw validation_error("oracle_sphere_l1: empty vector");
    auto objective = [&](std::span<const double> x) {
        double inner = 0.0;
        double l1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inner += a[i] * x[i];
            l1 += std::abs(x[i]);
        }
        return inner - omega * l1;
    };
    auto project = [n](std::vector<double>& x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        s = std::sqrt(s);
        for (double& v : x) v /= s;
    };

    constexpr int kIters = 2000;
    constexpr double kStep0 = 0.5;
    const double decay = std::pow(1e-12 / kStep0, 1.0 / kIters);

    OracleReport rep;
    rep.search_value = -std::numeric_limits<double>::infinity();
    Rng rng(seed);
    std::vector<double> x(n), best_x;
    for (int s = 0; s < starts; ++s) {
        double norm = 0.0;
        do {
            for (double& v : x) v = rng.normal();
            norm = 0.0;
            for (double v : x) norm += v * v;
        } while (norm == 0.0);
        project(x);
        double step = kStep0;
        double local_best = objective(x);
        std::vector<double> local_x = x;
        for (int it = 0; it < kIters; ++it) {
            for (std::size_t i = 0; i < n; ++i) {
                const double sg = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
                x[i] += step * (a[i] - omega * sg);
            }
            double nn = 0.0;
            for (double v : x) nn += v * v;
            if (nn == 0.0) break;
            project(x);
            const double f = objective(x);
            if (f > local_best) {
                local_best = f;
                local_x = x;
            }
            step *= decay;
        }
        rep.iterations += kIters;
        ++rep.starts_used;
        if (local_best > rep.search_value) {
            rep.search_value = local_best;
            best_x = local_x;
        }
    }
    rep.value = rep.search_value;
    if (!candidate.empty()) {
        const double f = objective(candidate);
        if (f > rep.value) {
            rep.value = f;
            best_x.assign(candidate.begin(), candidate.end());
        }
    }
    rep.argopt.push_back(std::move(best_x));
    return rep;
}

/// min over support sizes k = 1..n of k ((1/sqrt(k) - w)_+)^2: every KKT point
/// of the xi problem has k nonzero entries of equal magnitude 1/sqrt(k).
inline double oracle_xi(std::size_t n, double omega) {
    if (n == 0) throw validation_error("oracle_xi: n must be positive");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= n; ++k) {
        const double gap = std::max(1.0 / std::sqrt(static_cast<double>(k)) - omega, 0.0);
        best = std::min(best, static_cast<double>(k) * gap * gap);
    }
    return best;
}

}  // namespace sprank1::oracles
