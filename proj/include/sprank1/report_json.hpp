#pragma once

// JSON views of reports, traces and experiment summaries (nlohmann/json).
// Every document carries `schema_version`; bump it on incompatible changes.

#include <cmath>
#include <string>

#include <json.hpp>

#include "sprank1/algorithms.hpp"
#include "sprank1/amm.hpp"
#include "sprank1/bench.hpp"

namespace sprank1 {

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json to_json(const Rank1Solution& s) {
    return {{"lambda", s.lambda},
            {"objective", s.objective},
            {"sparsity_ratios", s.sparsity_ratios},
            {"xs", s.xs}};
}

inline nlohmann::json to_json(const AlgoReport& r, const DenseTensor& t, const RegParams& params) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "algo_report";
    j["variant"] = to_string(r.variant);
    j["shape"] = t.shape();
    j["omegas"] = params.omegas();
    j["params_valid"] = r.params_valid;
    j["lambda"] = r.solution.lambda;
    j["objective"] = r.solution.objective;
    j["bound_ratio"] = r.bound_ratio ? nlohmann::json(*r.bound_ratio) : nlohmann::json(nullptr);
    j["lower_bound_reference"] = r.lower_bound_reference;
    j["vub"] = detail::number_or_null(r.upper_bound);
    j["frobenius_norm"] = t.frobenius_norm();
    j["wall_time_ms"] = r.wall_time.count() * 1e3;
    j["extraction_converged"] = r.extraction_converged;
    j["solution"] = to_json(r.solution);
    return j;
}

inline nlohmann::json to_json(const AmmTrace& tr, const DenseTensor& t, const RegParams& params,
                              const AmmConfig& cfg, bool include_timing = true) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "amm_trace";
    j["init"] = to_string(cfg.init);
    j["seed"] = cfg.seed;
    j["stop_tol"] = cfg.stop_tol;
    j["max_sweeps"] = cfg.max_sweeps;
    j["prescale"] = cfg.prescale;
    j["shape"] = t.shape();
    j["omegas"] = params.omegas();
    j["initial_objective"] = tr.initial_objective;
    j["objective_per_sweep"] = tr.objective_per_sweep;
    j["movement_per_sweep"] = tr.movement_per_sweep;
    j["sweeps"] = tr.sweeps;
    j["converged"] = tr.converged;
    j["degenerate"] = tr.degenerate;
    if (tr.degenerate) j["degenerate_reason"] = tr.degenerate_reason;
    if (include_timing) {
        j["init_time_ms"] = tr.init_time.count() * 1e3;
        j["solve_time_ms"] = tr.solve_time.count() * 1e3;
    }
    j["final"] = to_json(tr.final);
    return j;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    return {{"kind", to_string(c.kind)},   {"d", c.order},
            {"n", c.n},                    {"sr_grid", c.sr_grid},
            {"sr", c.sr},                  {"n_grid", c.n_grid},
            {"instances", c.instances},    {"terms", c.num_terms},
            {"seed", c.seed},              {"amm_stop_tol", c.amm_stop_tol},
            {"amm_max_sweeps", c.amm_max_sweeps}};
}

inline nlohmann::json summary_json(const ExperimentResult& res, bool include_timing = true) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "experiment_summary";
    j["config"] = to_json(res.config);
    j["records"] = res.records.size();
    nlohmann::json aggs = nlohmann::json::array();
    for (const ExperimentAggregate& a : res.aggregates) {
        nlohmann::json e{{"variant", a.variant},
                         {"grid_value", a.grid_value},
                         {"count", a.count},
                         {"failures", a.failures},
                         {"mean_lambda", a.mean_lambda},
                         {"mean_objective", a.mean_objective},
                         {"mean_vub", a.mean_vub},
                         {"mean_sparsity_out", a.mean_sparsity_out},
                         {"mean_sr_tensor", a.mean_sr_tensor},
                         {"mean_sr_factor", a.mean_sr_factor},
                         {"mean_sweeps", a.mean_sweeps}};
        if (include_timing) e["mean_time_ms"] = a.mean_time_ms;
        aggs.push_back(std::move(e));
    }
    j["aggregates"] = std::move(aggs);
    return j;
}

/// Parses an experiment config object; missing keys keep the values in `base`.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentConfig base) {
    try {
        if (j.contains("d")) base.order = j.at("d").get<std::size_t>();
        if (j.contains("n")) base.n = j.at("n").get<std::size_t>();
        if (j.contains("sr_grid")) base.sr_grid = j.at("sr_grid").get<std::vector<double>>();
        if (j.contains("sr")) base.sr = j.at("sr").get<double>();
        if (j.contains("n_grid")) base.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
        if (j.contains("instances")) base.instances = j.at("instances").get<int>();
        if (j.contains("terms")) base.num_terms = j.at("terms").get<int>();
        if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("amm_stop_tol")) base.amm_stop_tol = j.at("amm_stop_tol").get<double>();
        if (j.contains("amm_max_sweeps")) base.amm_max_sweeps = j.at("amm_max_sweeps").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("experiment config: ") + e.what());
    }
    base.validate();
    return base;
}

}  // namespace sprank1
