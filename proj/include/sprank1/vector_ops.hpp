#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sprank1/errors.hpp"

namespace sprank1 {

using Vector = std::vector<double>;

inline void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw dimension_error(std::string(what) + ": length " + std::to_string(a) +
                              " does not match " + std::to_string(b));
    }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

/// Euclidean norm, rescaled by the largest magnitude so that tiny or huge
/// entries neither underflow nor overflow.
inline double norm2(std::span<const double> a) {
    const double scale = max_abs(a);
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double s = 0.0;
    for (double v : a) {
        const double r = v / scale;
        s += r * r;
    }
    return scale * std::sqrt(s);
}

inline double norm1(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += std::abs(v);
    return s;
}

inline bool all_zero(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
}

inline std::size_t count_nonzero(std::span<const double> a) {
    return static_cast<std::size_t>(
        std::count_if(a.begin(), a.end(), [](double v) { return v != 0.0; }));
}

/// a / ||a||. Throws numeric_error on a zero vector.
inline Vector normalized(std::span<const double> a) {
    const double n = norm2(a);
    if (n == 0.0) throw numeric_error("normalized: zero vector");
    Vector out(a.begin(), a.end());
    for (double& v : out) v /= n;
    return out;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "distance");
    Vector diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    return norm2(diff);
}

}  // namespace sprank1
