#pragma once

// Alternating maximization: cycle through the modes, and for mode j replace
// x_j by the exact maximizer of the objective with the other factors fixed,
// i.e. N(a_j, w_j) where a_j contracts the tensor against every x_k, k != j.
// Every block update is an exact maximization, so the objective never drops.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sprank1/algorithms.hpp"
#include "sprank1/errors.hpp"
#include "sprank1/rng.hpp"
#include "sprank1/sparsify.hpp"
#include "sprank1/tensor.hpp"

namespace sprank1 {

enum class AmmInit { from_v1, from_v2, random };

inline const char* to_string(AmmInit init) {
    switch (init) {
        case AmmInit::from_v1: return "v1";
        case AmmInit::from_v2: return "v2";
        case AmmInit::random: return "random";
    }
    return "?";
}

struct AmmConfig {
    /// Stop once max_j ||x_j(new) - x_j(old)|| over a full sweep drops below this.
    double stop_tol = 1e-6;
    int max_sweeps = 200;
    AmmInit init = AmmInit::from_v1;
    std::uint64_t seed = 0;  ///< used by AmmInit::random
    /// Solve on A / ||A||_inf (as the approximation algorithms do).
    bool prescale = true;
    PowerIterationOptions power{};
};

struct AmmTrace {
    /// Objective of the problem actually iterated on (the prescaled tensor when
    /// AmmConfig::prescale is set) at the start and after every sweep.
    double initial_objective = 0.0;
    std::vector<double> objective_per_sweep;
    std::vector<double> movement_per_sweep;
    int sweeps = 0;
    bool converged = false;
    /// A block contraction vanished; the solve stopped at the last iterate.
    bool degenerate = false;
    std::string degenerate_reason;
    /// Final point; lambda and objective in the units of the input tensor.
    Rank1Solution final;
    std::chrono::duration<double> init_time{0};
    std::chrono::duration<double> solve_time{0};
};

class degenerate_block_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

/// Exact maximizer over x_j of the objective with the other factors fixed.
inline Vector amm_block_update(const DenseTensor& t, std::span<const Vector> xs, std::size_t mode,
                               double omega) {
    const Vector a = contract_all_but(t, xs, mode);
    if (all_zero(a)) {
        throw degenerate_block_error("block " + std::to_string(mode + 1) + ": contraction vanished");
    }
    return sphere_l1_maximize(a, omega).x_star;
}

/// Per mode: standard normal draw, normalized, then N(., w_j).
inline std::vector<Vector> random_init(std::span<const std::size_t> shape, const RegParams& params,
                                       std::uint64_t seed) {
    params.check_matches(shape);
    Rng rng(seed);
    std::vector<Vector> xs(shape.size());
    for (std::size_t j = 0; j < shape.size(); ++j) {
        Vector x(shape[j]);
        do {
            for (double& v : x) v = rng.normal();
        } while (all_zero(x));
        xs[j] = sphere_l1_maximize(normalized(x), params[j]).x_star;
    }
    return xs;
}

namespace detail {

inline void check_amm_config(const AmmConfig& config) {
    if (!(config.stop_tol > 0.0)) throw validation_error("amm_solve: stop_tol must be positive");
    if (config.max_sweeps < 1) throw validation_error("amm_solve: max_sweeps must be >= 1");
}

/// Sweeps on `work` (already scaled by 1/scale) starting from `xs`.
inline void amm_iterate(const DenseTensor& original, const DenseTensor& work, const RegParams& params,
                        std::vector<Vector> xs, const AmmConfig& config, AmmTrace& trace) {
    const auto clock = std::chrono::steady_clock::now();
    trace.initial_objective = objective_value(work, xs, params);
    const std::size_t d = work.order();
    for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
        const std::vector<Vector> previous = xs;
        try {
            for (std::size_t j = 0; j < d; ++j) xs[j] = amm_block_update(work, xs, j, params[j]);
        } catch (const degenerate_block_error& e) {
            trace.degenerate = true;
            trace.degenerate_reason = e.what();
            xs = previous;
            break;
        }
        double movement = 0.0;
        for (std::size_t j = 0; j < d; ++j) movement = std::max(movement, distance(xs[j], previous[j]));
        trace.sweeps = sweep;
        trace.objective_per_sweep.push_back(objective_value(work, xs, params));
        trace.movement_per_sweep.push_back(movement);
        if (movement < config.stop_tol) {
            trace.converged = true;
            break;
        }
    }
    trace.solve_time = std::chrono::steady_clock::now() - clock;

    Rank1Solution& sol = trace.final;
    sol.lambda = multilinear_value(original, xs);
    sol.objective = objective_value(original, xs, params);
    for (const Vector& x : xs) sol.sparsity_ratios.push_back(sparsity_ratio(x));
    sol.xs = std::move(xs);
}

inline double amm_scale(const DenseTensor& t, const AmmConfig& config) {
    const double inf_norm = t.max_abs();
    if (inf_norm == 0.0) throw numeric_error("amm_solve: tensor is zero");
    return config.prescale ? inf_norm : 1.0;
}

}  // namespace detail

/// AMM from the initialization named in `config.init`.
inline AmmTrace amm_solve(const DenseTensor& t, const RegParams& params, const AmmConfig& config = {}) {
    detail::check_amm_config(config);
    params.check_matches(t.shape());
    const double scale = detail::amm_scale(t, config);
    const DenseTensor work = scale == 1.0 ? t : t.scaled(1.0 / scale);

    AmmTrace trace;
    const auto clock = std::chrono::steady_clock::now();
    std::vector<Vector> xs;
    AlgoOptions algo;
    algo.prescale = false;  // `work` is already scaled
    algo.compute_upper_bound = false;
    algo.power = config.power;
    switch (config.init) {
        case AmmInit::from_v1: xs = algorithm_v1(work, params, algo).solution.xs; break;
        case AmmInit::from_v2: xs = algorithm_v2(work, params, algo).solution.xs; break;
        case AmmInit::random: xs = random_init(t.shape(), params, config.seed); break;
    }
    trace.init_time = std::chrono::steady_clock::now() - clock;
    detail::amm_iterate(t, work, params, std::move(xs), config, trace);
    return trace;
}

/// AMM from caller-supplied unit vectors; `config.init` is ignored.
inline AmmTrace amm_solve(const DenseTensor& t, const RegParams& params, std::vector<Vector> start,
                          const AmmConfig& config) {
    detail::check_amm_config(config);
    params.check_matches(t.shape());
    detail::check_factor_lengths(t.shape(), start);
    const double scale = detail::amm_scale(t, config);
    const DenseTensor work = scale == 1.0 ? t : t.scaled(1.0 / scale);
    AmmTrace trace;
    detail::amm_iterate(t, work, params, std::move(start), config, trace);
    return trace;
}

}  // namespace sprank1
