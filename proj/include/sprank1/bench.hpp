#pragma once

// Synthetic instances and the experiment drivers.
//
// An instance is a sum of `num_terms` rank-1 tensors whose factor entries are
// standard normal, each zeroed independently with probability sr. Every
// record's instance seed is derived from the master seed and the record's
// position, so a record can be regenerated on its own.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sprank1/algorithms.hpp"
#include "sprank1/amm.hpp"
#include "sprank1/errors.hpp"
#include "sprank1/rng.hpp"
#include "sprank1/tensor.hpp"
#include "sprank1/tensor_io.hpp"

namespace sprank1 {

struct InstanceSpec {
    Shape shape;
    int num_terms = 10;
    /// Probability that a factor entry is zeroed.
    double sparsity_ratio = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (shape.empty()) throw validation_error("InstanceSpec: empty shape");
        for (std::size_t n : shape) {
            if (n == 0) throw validation_error("InstanceSpec: dimensions must be positive");
        }
        if (num_terms < 1) throw validation_error("InstanceSpec: num_terms must be >= 1");
        if (!(sparsity_ratio >= 0.0 && sparsity_ratio <= 1.0)) {
            throw validation_error("InstanceSpec: sparsity ratio must lie in [0, 1]");
        }
    }
};

struct Instance {
    DenseTensor tensor;
    double factor_sparsity;  ///< realized fraction of zeroed factor entries
    double tensor_sparsity;  ///< fraction of exactly-zero tensor entries
    int draws;               ///< 1 unless the first draws were all zero
};

inline constexpr int kMaxRegenerations = 10;

inline Instance generate_instance_detailed(const InstanceSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t d = spec.shape.size();
    const std::size_t total = shape_product(spec.shape);
    for (int draw = 1; draw <= kMaxRegenerations + 1; ++draw) {
        Vector data(total, 0.0);
        std::size_t factor_entries = 0;
        std::size_t factor_zeros = 0;
        for (int r = 0; r < spec.num_terms; ++r) {
            std::vector<Vector> factors(d);
            for (std::size_t j = 0; j < d; ++j) {
                factors[j].resize(spec.shape[j]);
                for (double& v : factors[j]) {
                    const double g = rng.normal();
                    v = rng.uniform() < spec.sparsity_ratio ? 0.0 : g;
                    ++factor_entries;
                    if (v == 0.0) ++factor_zeros;
                }
            }
            // Column-major outer product = kron(x_d, ..., x_1).
            Vector term = factors[0];
            for (std::size_t j = 1; j < d; ++j) {
                Vector next(term.size() * factors[j].size());
                for (std::size_t k = 0; k < factors[j].size(); ++k)
                    for (std::size_t i = 0; i < term.size(); ++i) next[i + term.size() * k] = term[i] * factors[j][k];
                term = std::move(next);
            }
            for (std::size_t i = 0; i < total; ++i) data[i] += term[i];
        }
        if (!all_zero(data)) {
            const double fs = static_cast<double>(factor_zeros) / static_cast<double>(factor_entries);
            const double ts = sparsity_ratio(data);
            return Instance{DenseTensor(spec.shape, std::move(data)), fs, ts, draw};
        }
    }
    throw numeric_error("generate_instance: every draw produced the zero tensor (sr = " +
                        format_double(spec.sparsity_ratio) + ")");
}

inline DenseTensor generate_instance(const InstanceSpec& spec) {
    return generate_instance_detailed(spec).tensor;
}

/// Fraction of exactly-zero entries of a tensor.
inline double sparsity_ratio(const DenseTensor& t) { return sparsity_ratio(t.data()); }

namespace detail {

template <class T>
T parse_number(std::string_view text, const char* what) {
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw validation_error(std::string("cannot parse ") + what + " from '" + std::string(text) + "'");
    }
    return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace detail

/// Parses "d=4,n=20,terms=10,sr=0.7,seed=1". `dims=20x30x40` may replace d/n.
inline InstanceSpec parse_instance_spec(std::string_view text) {
    InstanceSpec spec;
    std::optional<std::size_t> d, n;
    for (std::string_view part : detail::split(text, ',')) {
        if (part.empty()) continue;
        const std::size_t eq = part.find('=');
        if (eq == std::string_view::npos) throw validation_error("generator spec: expected key=value, got '" + std::string(part) + "'");
        const std::string_view key = part.substr(0, eq);
        const std::string_view value = part.substr(eq + 1);
        if (key == "d") {
            d = detail::parse_number<std::size_t>(value, "d");
        } else if (key == "n") {
            n = detail::parse_number<std::size_t>(value, "n");
        } else if (key == "dims") {
            spec.shape.clear();
            for (std::string_view dim : detail::split(value, 'x')) spec.shape.push_back(detail::parse_number<std::size_t>(dim, "dims"));
        } else if (key == "terms") {
            spec.num_terms = detail::parse_number<int>(value, "terms");
        } else if (key == "sr") {
            spec.sparsity_ratio = detail::parse_number<double>(value, "sr");
        } else if (key == "seed") {
            spec.seed = detail::parse_number<std::uint64_t>(value, "seed");
        } else {
            throw validation_error("generator spec: unknown key '" + std::string(key) + "'");
        }
    }
    if (spec.shape.empty()) {
        if (!d || !n) throw validation_error("generator spec: need dims=..., or both d= and n=");
        spec.shape.assign(*d, *n);
    } else if (d && *d != spec.shape.size()) {
        throw validation_error("generator spec: d disagrees with dims");
    }
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Experiments

enum class ExperimentKind { vary_sr, vary_n, amm };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::vary_sr: return "vary-sr";
        case ExperimentKind::vary_n: return "vary-n";
        case ExperimentKind::amm: return "amm";
    }
    return "?";
}

inline ExperimentKind parse_experiment_kind(std::string_view s) {
    if (s == "vary-sr") return ExperimentKind::vary_sr;
    if (s == "vary-n") return ExperimentKind::vary_n;
    if (s == "amm") return ExperimentKind::amm;
    throw validation_error("unknown experiment kind '" + std::string(s) + "' (expected vary-sr, vary-n or amm)");
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::vary_sr;
    std::size_t order = 4;
    std::size_t n = 20;              ///< mode size for vary-sr
    std::vector<double> sr_grid;     ///< vary-sr
    double sr = 0.7;                 ///< vary-n and amm
    std::vector<std::size_t> n_grid; ///< vary-n and amm
    int instances = 10;
    int num_terms = 10;
    std::uint64_t seed = 1;
    double amm_stop_tol = 1e-6;
    int amm_max_sweeps = 200;

    /// Desk-scale defaults: n_j = 20, 10 instances.
    static ExperimentConfig desk(ExperimentKind kind) {
        ExperimentConfig c;
        c.kind = kind;
        c.sr_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        c.n_grid = kind == ExperimentKind::amm ? std::vector<std::size_t>{10, 15, 20}
                                               : std::vector<std::size_t>{10, 14, 20, 28, 40};
        c.instances = kind == ExperimentKind::vary_sr ? 10 : 5;
        return c;
    }

    /// Full-scale setting: n_j = 50 for vary-sr, n_j = 20..100 otherwise, 50 instances.
    static ExperimentConfig full(ExperimentKind kind) {
        ExperimentConfig c = desk(kind);
        c.n = 50;
        c.n_grid = {20, 40, 60, 80, 100};
        c.instances = 50;
        return c;
    }

    void validate() const {
        if (order < 3) throw validation_error("experiment: order must be >= 3");
        if (n == 0) throw validation_error("experiment: n must be positive");
        if (instances < 0) throw validation_error("experiment: instances must be >= 0");
        if (num_terms < 1) throw validation_error("experiment: terms must be >= 1");
        for (double s : sr_grid) {
            if (!(s >= 0.0 && s <= 1.0)) throw validation_error("experiment: sr grid values must lie in [0, 1]");
        }
        if (!(sr >= 0.0 && sr <= 1.0)) throw validation_error("experiment: sr must lie in [0, 1]");
        for (std::size_t v : n_grid) {
            if (v == 0) throw validation_error("experiment: n grid values must be positive");
        }
    }
};

struct ExperimentRecord {
    std::string variant;  ///< v1, v2, amm_v1, amm_v2, amm_random
    Shape shape;
    double grid_value = 0.0;  ///< sr for vary-sr, n otherwise
    double sr_target = 0.0;
    double sr_tensor = 0.0;
    double sr_factor = 0.0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    double lambda = 0.0;
    double objective = 0.0;
    double vub = 0.0;
    double frobenius = 0.0;
    double lambda_max_a1 = 0.0;  ///< V1 only
    std::optional<double> bound_ratio;
    std::vector<double> sparsity_out;
    double time_ms = 0.0;
    std::optional<int> sweeps;
    bool converged = true;
};

struct ExperimentAggregate {
    std::string variant;
    double grid_value = 0.0;
    int count = 0;
    int failures = 0;
    double mean_lambda = 0.0;
    double mean_objective = 0.0;
    double mean_vub = 0.0;
    double mean_sparsity_out = 0.0;
    double mean_sr_tensor = 0.0;
    double mean_sr_factor = 0.0;
    double mean_time_ms = 0.0;
    double mean_sweeps = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ExperimentRecord> records;
    std::vector<ExperimentAggregate> aggregates;
};

namespace detail {

inline double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline ExperimentRecord base_record(const std::string& variant, const InstanceSpec& spec, double grid_value) {
    ExperimentRecord rec;
    rec.variant = variant;
    rec.shape = spec.shape;
    rec.grid_value = grid_value;
    rec.sr_target = spec.sparsity_ratio;
    rec.seed = spec.seed;
    return rec;
}

inline void fill_from_instance(ExperimentRecord& rec, const Instance& inst, double vub) {
    rec.sr_tensor = inst.tensor_sparsity;
    rec.sr_factor = inst.factor_sparsity;
    rec.vub = vub;
    rec.frobenius = inst.tensor.frobenius_norm();
}

/// Aggregates in first-appearance order of (grid value, variant).
inline std::vector<ExperimentAggregate> aggregate(const std::vector<ExperimentRecord>& records) {
    std::vector<ExperimentAggregate> out;
    std::vector<std::vector<const ExperimentRecord*>> groups;
    for (const auto& rec : records) {
        std::size_t g = 0;
        while (g < out.size() && !(out[g].variant == rec.variant && out[g].grid_value == rec.grid_value)) ++g;
        if (g == out.size()) {
            out.push_back(ExperimentAggregate{rec.variant, rec.grid_value});
            groups.emplace_back();
        }
        groups[g].push_back(&rec);
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        std::vector<double> lambda, objective, vub, sparsity, srt, srf, time, sweeps;
        for (const ExperimentRecord* r : groups[g]) {
            if (!r->ok) {
                ++out[g].failures;
                continue;
            }
            lambda.push_back(r->lambda);
            objective.push_back(r->objective);
            vub.push_back(r->vub);
            sparsity.push_back(mean(r->sparsity_out));
            srt.push_back(r->sr_tensor);
            srf.push_back(r->sr_factor);
            time.push_back(r->time_ms);
            if (r->sweeps) sweeps.push_back(*r->sweeps);
        }
        ExperimentAggregate& a = out[g];
        a.count = static_cast<int>(lambda.size());
        a.mean_lambda = mean(lambda);
        a.mean_objective = mean(objective);
        a.mean_vub = mean(vub);
        a.mean_sparsity_out = mean(sparsity);
        a.mean_sr_tensor = mean(srt);
        a.mean_sr_factor = mean(srf);
        a.mean_time_ms = mean(time);
        a.mean_sweeps = mean(sweeps);
    }
    return out;
}

inline void run_algorithm_records(const InstanceSpec& spec, double grid_value, std::vector<ExperimentRecord>& out) {
    constexpr Variant kVariants[] = {Variant::v1, Variant::v2};
    std::optional<Instance> inst;
    double vub = 0.0;
    std::string failure;
    try {
        inst = generate_instance_detailed(spec);
        vub = upper_bound_vub(inst->tensor);
    } catch (const std::exception& e) {
        failure = e.what();
    }
    for (Variant v : kVariants) {
        ExperimentRecord rec = base_record(to_string(v), spec, grid_value);
        if (!inst) {
            rec.ok = false;
            rec.error = failure;
            out.push_back(std::move(rec));
            continue;
        }
        fill_from_instance(rec, *inst, vub);
        try {
            const RegParams params = RegParams::default_for(spec.shape);
            AlgoOptions opts;
            opts.compute_upper_bound = false;
            const AlgoReport rep = run_algorithm(v, inst->tensor, params, opts);
            rec.lambda = rep.solution.lambda;
            rec.objective = rep.solution.objective;
            rec.bound_ratio = rep.bound_ratio;
            rec.sparsity_out = rep.solution.sparsity_ratios;
            rec.time_ms = rep.wall_time.count() * 1e3;
            rec.converged = rep.extraction_converged;
            if (v == Variant::v1) rec.lambda_max_a1 = rep.lower_bound_reference;
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
        }
        out.push_back(std::move(rec));
    }
}

inline void run_amm_records(const InstanceSpec& spec, double grid_value, const ExperimentConfig& cfg,
                            std::vector<ExperimentRecord>& out) {
    constexpr AmmInit kInits[] = {AmmInit::from_v1, AmmInit::from_v2, AmmInit::random};
    std::optional<Instance> inst;
    double vub = 0.0;
    std::string failure;
    try {
        inst = generate_instance_detailed(spec);
        vub = upper_bound_vub(inst->tensor);
    } catch (const std::exception& e) {
        failure = e.what();
    }
    for (AmmInit init : kInits) {
        ExperimentRecord rec = base_record(std::string("amm_") + to_string(init), spec, grid_value);
        if (!inst) {
            rec.ok = false;
            rec.error = failure;
            out.push_back(std::move(rec));
            continue;
        }
        fill_from_instance(rec, *inst, vub);
        try {
            const RegParams params = RegParams::default_for(spec.shape);
            AmmConfig amm;
            amm.init = init;
            amm.seed = derive_seed(spec.seed, 1);
            amm.stop_tol = cfg.amm_stop_tol;
            amm.max_sweeps = cfg.amm_max_sweeps;
            const AmmTrace trace = amm_solve(inst->tensor, params, amm);
            rec.lambda = trace.final.lambda;
            rec.objective = trace.final.objective;
            rec.sparsity_out = trace.final.sparsity_ratios;
            rec.time_ms = (trace.init_time + trace.solve_time).count() * 1e3;
            rec.sweeps = trace.sweeps;
            rec.converged = trace.converged;
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
        }
        out.push_back(std::move(rec));
    }
}

}  // namespace detail

/// Fixed n_j = cfg.n, sweep the factor sparsity over cfg.sr_grid; V1 and V2 per instance.
inline ExperimentResult experiment_vary_sr(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res{cfg, {}, {}};
    const auto instances = static_cast<std::uint64_t>(cfg.instances);
    for (std::size_t g = 0; g < cfg.sr_grid.size(); ++g) {
        for (std::uint64_t i = 0; i < instances; ++i) {
            InstanceSpec spec{Shape(cfg.order, cfg.n), cfg.num_terms, cfg.sr_grid[g], derive_seed(cfg.seed, g * instances + i)};
            detail::run_algorithm_records(spec, cfg.sr_grid[g], res.records);
        }
    }
    res.aggregates = detail::aggregate(res.records);
    return res;
}

/// Fixed sr = cfg.sr, sweep n_j over cfg.n_grid; V1 and V2 per instance, timed.
inline ExperimentResult experiment_vary_n(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res{cfg, {}, {}};
    const auto instances = static_cast<std::uint64_t>(cfg.instances);
    for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
        for (std::uint64_t i = 0; i < instances; ++i) {
            InstanceSpec spec{Shape(cfg.order, cfg.n_grid[g]), cfg.num_terms, cfg.sr, derive_seed(cfg.seed, g * instances + i)};
            detail::run_algorithm_records(spec, static_cast<double>(cfg.n_grid[g]), res.records);
        }
    }
    res.aggregates = detail::aggregate(res.records);
    return res;
}

/// AMM from V1, V2 and random starts on every instance.
inline ExperimentResult experiment_amm(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res{cfg, {}, {}};
    const auto instances = static_cast<std::uint64_t>(cfg.instances);
    for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
        for (std::uint64_t i = 0; i < instances; ++i) {
            InstanceSpec spec{Shape(cfg.order, cfg.n_grid[g]), cfg.num_terms, cfg.sr, derive_seed(cfg.seed, g * instances + i)};
            detail::run_amm_records(spec, static_cast<double>(cfg.n_grid[g]), cfg, res.records);
        }
    }
    res.aggregates = detail::aggregate(res.records);
    return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::vary_sr: return experiment_vary_sr(cfg);
        case ExperimentKind::vary_n: return experiment_vary_n(cfg);
        case ExperimentKind::amm: return experiment_amm(cfg);
    }
    throw validation_error("run_experiment: unknown kind");
}

struct CsvOptions {
    /// When false the time_ms column is written as 0 so reruns are byte-identical.
    bool include_timing = true;
};

/// One row per record. Header:
/// variant,d,dims,sr_target,sr_tensor,seed,lambda,objective,vub,bound_ratio,
/// sparsity_out_1..sparsity_out_d,time_ms,sweeps
inline void write_csv(std::ostream& os, const ExperimentResult& res, CsvOptions opts = {}) {
    const std::size_t d = res.config.order;
    os << "variant,d,dims,sr_target,sr_tensor,seed,lambda,objective,vub,bound_ratio";
    for (std::size_t j = 1; j <= d; ++j) os << ",sparsity_out_" << j;
    os << ",time_ms,sweeps\n";
    for (const ExperimentRecord& r : res.records) {
        os << r.variant << ',' << r.shape.size() << ',' << shape_to_string(r.shape) << ','
           << format_double(r.sr_target) << ',' << (r.ok ? format_double(r.sr_tensor) : "") << ',' << r.seed << ',';
        if (r.ok) {
            os << format_double(r.lambda) << ',' << format_double(r.objective) << ',' << format_double(r.vub) << ','
               << (r.bound_ratio ? format_double(*r.bound_ratio) : "");
        } else {
            os << ",,,";
        }
        for (std::size_t j = 0; j < d; ++j) {
            os << ',';
            if (r.ok && j < r.sparsity_out.size()) os << format_double(r.sparsity_out[j]);
        }
        os << ',' << (r.ok ? format_double(opts.include_timing ? r.time_ms : 0.0) : "") << ','
           << (r.sweeps ? std::to_string(*r.sweeps) : "") << '\n';
    }
}

}  // namespace sprank1
