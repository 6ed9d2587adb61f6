#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sprank1/errors.hpp"
#include "sprank1/rng.hpp"
#include "sprank1/tensor.hpp"
#include "sprank1/vector_ops.hpp"

namespace sprank1 {

struct RowSelection {
    std::size_t index;  ///< 0-based row index
    Vector row;
};

/// Row with the largest Euclidean norm; the first such row on ties.
inline RowSelection max_energy_row(const MatrixView& m) {
    Vector energy(m.rows, 0.0);
    for (std::size_t j = 0; j < m.cols; ++j) {
        const auto col = m.column(j);
        for (std::size_t i = 0; i < m.rows; ++i) energy[i] += col[i] * col[i];
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < m.rows; ++i) {
        if (energy[i] > energy[best]) best = i;
    }
    if (energy[best] == 0.0) throw numeric_error("max_energy_row: matrix is zero");
    Vector row(m.cols);
    for (std::size_t j = 0; j < m.cols; ++j) row[j] = m(best, j);
    return {best, std::move(row)};
}

struct SingularPair {
    Vector x;  ///< unit left singular vector
    Vector y;  ///< unit right singular vector
    double sigma = 0.0;
    int iterations = 0;
    bool converged = false;
    /// sigma estimate after each half step (||M y||, then ||M^T x|| ...).
    std::vector<double> sigma_trace;
};

inline constexpr std::uint64_t kPowerStartSeed = 0x5eed5eedULL;

struct PowerIterationOptions {
    double tol = 1e-10;
    int max_iter = 2000;
};

/// Dominant singular pair of `m` by alternating power iteration
/// (x <- M y / ||M y||, y <- M^T x / ||M^T x||). The start is the max-energy
/// row plus a fixed-seed Gaussian vector: the row alone can be orthogonal to
/// the top right singular vector (block-sparse unfoldings are common), and
/// the iteration never leaves the span it starts in.
///
/// Stops once the relative change of sigma and the relative residual
/// ||M^T x - sigma y_prev|| / sigma both drop below `tol`. The sigma change
/// alone lags the vectors quadratically, so it is not enough to pin x and y.
/// If `max_iter` is exhausted the last iterate comes back with
/// `converged == false`.
inline SingularPair leading_singular_pair(const MatrixView& m, PowerIterationOptions opts = {}) {
    if (!(opts.tol > 0.0)) throw validation_error("leading_singular_pair: tol must be positive");
    if (opts.max_iter < 1) throw validation_error("leading_singular_pair: max_iter must be >= 1");
    if (all_zero(m.data)) throw numeric_error("leading_singular_pair: matrix is zero");

    SingularPair out;
    {
        Vector start = normalized(max_energy_row(m).row);
        Rng rng(kPowerStartSeed);
        Vector noise(start.size());
        for (double& v : noise) v = rng.normal();
        const double scale = 0.5 / norm2(noise);
        for (std::size_t j = 0; j < start.size(); ++j) start[j] += scale * noise[j];
        out.y = normalized(start);
    }
    Vector x_raw = mat_vec(m, out.y);
    double sigma = norm2(x_raw);
    out.sigma_trace.push_back(sigma);
    out.x = x_raw;
    for (double& v : out.x) v /= sigma;

    for (int it = 1; it <= opts.max_iter; ++it) {
        Vector y_raw = mat_vec_left(m, out.x);
        const double s = norm2(y_raw);
        out.sigma_trace.push_back(s);
        double residual = 0.0;
        for (std::size_t j = 0; j < y_raw.size(); ++j) {
            const double r = y_raw[j] - s * out.y[j];
            residual += r * r;
        }
        residual = std::sqrt(residual);
        for (double& v : y_raw) v /= s;
        out.y = std::move(y_raw);
        const double change = std::abs(s - sigma);
        sigma = s;
        out.iterations = it;

        Vector x_next = mat_vec(m, out.y);
        const double sx = norm2(x_next);
        out.sigma_trace.push_back(sx);
        for (double& v : x_next) v /= sx;
        out.x = std::move(x_next);
        sigma = sx;

        if (change <= opts.tol * s && residual <= opts.tol * s) {
            out.converged = true;
            break;
        }
    }
    out.sigma = sigma;
    return out;
}

}  // namespace sprank1
