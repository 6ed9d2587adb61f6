#pragma once

// Approximation algorithms for
//
//   max  <A, x_1 o ... o x_d> - sum_j w_j ||x_j||_1   s.t. ||x_j|| = 1,
//
// built by multilinear relaxation: unfold, extract a dense candidate x_j*,
// sparsify it with N(x_j*, w_j), contract it out, repeat on the next mode.
//
//   V1 extracts x_j* as the leading left singular vector of A_j.
//   V2 takes the largest-norm row r of A_j and sets x_j* = A_j r / ||A_j r||,
//      which costs one pass over the data.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sprank1/errors.hpp"
#include "sprank1/linalg.hpp"
#include "sprank1/sparsify.hpp"
#include "sprank1/tensor.hpp"
#include "sprank1/vector_ops.hpp"

namespace sprank1 {

/// Per-mode regularization weights.
class RegParams {
public:
    explicit RegParams(std::vector<double> omegas) : omegas_(std::move(omegas)) {
        for (double w : omegas_) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                throw validation_error("RegParams: weights must be finite and >= 0");
            }
        }
    }

    /// w_j = 1/sqrt(n_j) - 1e-5, just inside the range where the bounds hold.
    static RegParams default_for(std::span<const std::size_t> shape) {
        std::vector<double> w(shape.size());
        for (std::size_t j = 0; j < shape.size(); ++j) {
            w[j] = 1.0 / std::sqrt(static_cast<double>(shape[j])) - 1e-5;
        }
        return RegParams(std::move(w));
    }

    /// w_j = c / sqrt(n_j).
    static RegParams scaled_for(std::span<const std::size_t> shape, double c) {
        std::vector<double> w(shape.size());
        for (std::size_t j = 0; j < shape.size(); ++j) {
            w[j] = c / std::sqrt(static_cast<double>(shape[j]));
        }
        return RegParams(std::move(w));
    }

    static RegParams zeros(std::size_t d) { return RegParams(std::vector<double>(d, 0.0)); }

    const std::vector<double>& omegas() const { return omegas_; }
    double operator[](std::size_t j) const { return omegas_[j]; }
    std::size_t size() const { return omegas_.size(); }

    /// True when w_j < 1/sqrt(n_j) for every mode; the approximation bounds
    /// only hold in that range.
    bool valid_for(std::span<const std::size_t> shape) const {
        if (shape.size() != omegas_.size()) return false;
        for (std::size_t j = 0; j < shape.size(); ++j) {
            if (!(omegas_[j] < 1.0 / std::sqrt(static_cast<double>(shape[j])))) return false;
        }
        return true;
    }

    void check_matches(std::span<const std::size_t> shape) const {
        if (shape.size() != omegas_.size()) {
            throw dimension_error("RegParams: " + std::to_string(omegas_.size()) +
                                  " weights for an order-" + std::to_string(shape.size()) + " tensor");
        }
    }

private:
    std::vector<double> omegas_;
};

struct Rank1Solution {
    std::vector<Vector> xs;
    double lambda = 0.0;     ///< <A, x_1 o ... o x_d>
    double objective = 0.0;  ///< lambda - sum_j w_j ||x_j||_1
    std::vector<double> sparsity_ratios;
};

enum class Variant { v1, v2 };

inline const char* to_string(Variant v) { return v == Variant::v1 ? "v1" : "v2"; }

struct AlgoReport {
    Variant variant = Variant::v1;
    Rank1Solution solution;
    /// Guaranteed ratio; empty when some w_j >= 1/sqrt(n_j).
    std::optional<double> bound_ratio;
    /// lambda_max(A_1) for V1, ||A||_F for V2.
    double lower_bound_reference = 0.0;
    /// min_j lambda_max(A_(j)); NaN if not requested.
    double upper_bound = std::numeric_limits<double>::quiet_NaN();
    std::chrono::duration<double> wall_time{0};
    bool params_valid = false;
    /// False if any power iteration hit its iteration cap.
    bool extraction_converged = true;
    /// Norm of A_j after each contraction (A_1 is the input); all positive.
    std::vector<double> intermediate_norms;
};

struct AlgoOptions {
    /// Run on A / ||A||_inf and scale lambda back afterwards.
    bool prescale = true;
    bool compute_upper_bound = true;
    PowerIterationOptions power{};
};

inline double sparsity_ratio(std::span<const double> v) {
    if (v.empty()) throw validation_error("sparsity_ratio: empty input");
    return static_cast<double>(v.size() - count_nonzero(v)) / static_cast<double>(v.size());
}

namespace detail {

inline void check_unit(std::span<const Vector> xs) {
    for (std::size_t j = 0; j < xs.size(); ++j) {
        if (std::abs(norm2(xs[j]) - 1.0) > 1e-8) {
            throw validation_error("factor " + std::to_string(j + 1) + " is not unit norm");
        }
    }
}

inline double product_factor(std::span<const std::size_t> shape, const RegParams& params) {
    double num = 1.0;
    for (std::size_t j = 0; j < shape.size(); ++j) {
        const double root = std::sqrt(static_cast<double>(shape[j]));
        num *= 1.0 - params[j] * root + params[j];
    }
    return num;
}

inline void check_bound_inputs(std::span<const std::size_t> shape, const RegParams& params,
                               const char* who) {
    if (shape.size() < 3) throw validation_error(std::string(who) + ": order must be at least 3");
    params.check_matches(shape);
    if (!params.valid_for(shape)) {
        throw validation_error(std::string(who) + ": bound needs w_j < 1/sqrt(n_j) for every mode");
    }
}

/// Flip so the largest-magnitude entry (first on ties) is positive.
inline bool canonicalize_sign(Vector& x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (std::abs(x[i]) > std::abs(x[best])) best = i;
    }
    if (x[best] < 0.0) {
        for (double& v : x) v = -v;
        return true;
    }
    return false;
}

}  // namespace detail

inline double objective_value(const DenseTensor& t, std::span<const Vector> xs, const RegParams& params) {
    params.check_matches(t.shape());
    detail::check_unit(xs);
    double penalty = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) penalty += params[j] * norm1(xs[j]);
    return multilinear_value(t, xs) - penalty;
}

/// prod_j (1 - w_j sqrt(n_j) + w_j) / sqrt(n_2 ... n_{d-1}).
inline double bound_ratio_v1(std::span<const std::size_t> shape, const RegParams& params) {
    detail::check_bound_inputs(shape, params, "bound_ratio_v1");
    double denom = 1.0;
    for (std::size_t j = 1; j + 1 < shape.size(); ++j) denom *= static_cast<double>(shape[j]);
    return detail::product_factor(shape, params) / std::sqrt(denom);
}

/// prod_j (1 - w_j sqrt(n_j) + w_j) / sqrt(n_1 ... n_{d-1}).
inline double bound_ratio_v2(std::span<const std::size_t> shape, const RegParams& params) {
    detail::check_bound_inputs(shape, params, "bound_ratio_v2");
    double denom = 1.0;
    for (std::size_t j = 0; j + 1 < shape.size(); ++j) denom *= static_cast<double>(shape[j]);
    return detail::product_factor(shape, params) / std::sqrt(denom);
}

/// min over modes of the top singular value of each mode unfolding. No unit
/// rank-1 tensor can have a larger multilinear value.
inline double upper_bound_vub(const DenseTensor& t, PowerIterationOptions opts = {}) {
    if (t.is_zero()) throw numeric_error("upper_bound_vub: tensor is zero");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < t.order(); ++j) {
        best = std::min(best, leading_singular_pair(mode_unfolding(t, j), opts).sigma);
    }
    return best;
}

namespace detail {

struct Extraction {
    Vector x_star;
    double reference = 0.0;  // sigma for V1
    bool converged = true;
};

inline Extraction extract_v1(const MatrixView& a, const PowerIterationOptions& opts) {
    SingularPair pair = leading_singular_pair(a, opts);
    canonicalize_sign(pair.x);
    return {std::move(pair.x), pair.sigma, pair.converged};
}

inline Extraction extract_v2(const MatrixView& a) {
    const RowSelection sel = max_energy_row(a);
    return {normalized(mat_vec(a, sel.row)), 0.0, true};
}

inline AlgoReport run_relaxation(const DenseTensor& t, const RegParams& params, Variant variant,
                                 const AlgoOptions& opts) {
    if (t.order() < 3) throw validation_error("approximation algorithms need a tensor of order >= 3");
    params.check_matches(t.shape());
    const double inf_norm = t.max_abs();
    if (inf_norm == 0.0) throw numeric_error("approximation algorithms: tensor is zero");

    AlgoReport report;
    report.variant = variant;
    report.params_valid = params.valid_for(t.shape());

    const auto start = std::chrono::steady_clock::now();
    const double scale = opts.prescale ? inf_norm : 1.0;
    Vector current(t.data().begin(), t.data().end());
    if (scale != 1.0) {
        for (double& v : current) v /= scale;
    }

    const Shape& shape = t.shape();
    const std::size_t d = shape.size();
    std::vector<Vector> xs(d);
    for (std::size_t j = 0; j + 1 < d; ++j) {
        const MatrixView a = as_matrix(current, shape[j], current.size() / shape[j]);
        const double a_norm = frobenius_norm(a);
        if (a_norm == 0.0) throw numeric_error("A_" + std::to_string(j + 1) + " vanished");
        report.intermediate_norms.push_back(a_norm * scale);

        Extraction ex = variant == Variant::v1 ? extract_v1(a, opts.power) : extract_v2(a);
        report.extraction_converged = report.extraction_converged && ex.converged;
        if (j == 0) {
            report.lower_bound_reference = variant == Variant::v1 ? ex.reference * scale : t.frobenius_norm();
        }
        xs[j] = sphere_l1_maximize(ex.x_star, params[j]).x_star;
        current = mat_vec_left(a, xs[j]);
    }

    const double last_norm = norm2(current);
    if (last_norm == 0.0) throw numeric_error("A_" + std::to_string(d - 1) + "^T x vanished");
    xs[d - 1] = sphere_l1_maximize(normalized(current), params[d - 1]).x_star;
    // <A_{d-1}^T x_{d-1}, x_d> is the multilinear value of the whole chain.
    const double lambda = dot(current, xs[d - 1]) * scale;
    report.wall_time = std::chrono::steady_clock::now() - start;

    Rank1Solution& sol = report.solution;
    sol.lambda = lambda;
    double penalty = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        penalty += params[j] * norm1(xs[j]);
        sol.sparsity_ratios.push_back(sparsity_ratio(xs[j]));
    }
    sol.objective = lambda - penalty;
    sol.xs = std::move(xs);

    if (report.params_valid) {
        report.bound_ratio = variant == Variant::v1 ? bound_ratio_v1(shape, params) : bound_ratio_v2(shape, params);
    }
    if (opts.compute_upper_bound) report.upper_bound = upper_bound_vub(t, opts.power);
    return report;
}

}  // namespace detail

/// Singular-vector extraction at every mode. Cost is dominated by the power
/// iteration on the n_1 x (n_2 ... n_d) unfolding.
inline AlgoReport algorithm_v1(const DenseTensor& t, const RegParams& params, const AlgoOptions& opts = {}) {
    return detail::run_relaxation(t, params, Variant::v1, opts);
}

/// Max-energy-row extraction at every mode; linear in the number of entries.
inline AlgoReport algorithm_v2(const DenseTensor& t, const RegParams& params, const AlgoOptions& opts = {}) {
    return detail::run_relaxation(t, params, Variant::v2, opts);
}

inline AlgoReport run_algorithm(Variant v, const DenseTensor& t, const RegParams& params,
                                const AlgoOptions& opts = {}) {
    return v == Variant::v1 ? algorithm_v1(t, params, opts) : algorithm_v2(t, params, opts);
}

}  // namespace sprank1
