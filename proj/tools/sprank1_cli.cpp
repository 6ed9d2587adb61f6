// sprank1: command-line front end.
//
//   sprank1 run        --variant v1|v2  (--input FILE | --gen SPEC) [--omega default|w1,w2,...]
//   sprank1 amm        --init v1|v2|random [--seed N] (--input FILE | --gen SPEC) [--omega ...]
//   sprank1 experiment --kind vary-sr|vary-n|amm [--preset desk|full] [--config FILE] --out-dir DIR
//   sprank1 gen        --gen SPEC --out FILE [--binary]
//   sprank1 bounds     --dims 20x20x20 [--omega ...]
//
// Exit codes: 0 ok, 1 I/O error, 2 invalid input, 3 numeric failure.
// Data goes to --out (stdout with "-"); diagnostics go to stderr.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sprank1/algorithms.hpp"
#include "sprank1/amm.hpp"
#include "sprank1/bench.hpp"
#include "sprank1/oracles.hpp"
#include "sprank1/report_json.hpp"
#include "sprank1/tensor_io.hpp"

namespace {

using namespace sprank1;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumeric = 3;

struct InputOptions {
    std::string input;
    std::string gen;
    std::string omega = "default";
    std::string out = "-";
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    auto* input = cmd->add_option("--input,-i", in.input, "tensor file (.dten, text or binary)");
    auto* gen = cmd->add_option("--gen,-g", in.gen, "synthetic instance, e.g. \"d=4,n=20,terms=10,sr=0.7,seed=1\"");
    input->excludes(gen);
    cmd->add_option("--omega,-w", in.omega, "\"default\" (1/sqrt(n_j) - 1e-5) or a comma-separated list")
        ->capture_default_str();
    cmd->add_option("--out,-o", in.out, "output path, \"-\" for stdout")->capture_default_str();
}

DenseTensor load_tensor(const InputOptions& in) {
    if (in.input.empty() == in.gen.empty()) throw validation_error("give exactly one of --input or --gen");
    if (!in.input.empty()) return read_dten_file(in.input);
    return generate_instance(parse_instance_spec(in.gen));
}

RegParams parse_omegas(const std::string& text, const Shape& shape) {
    if (text == "default") return RegParams::default_for(shape);
    std::vector<double> w;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            w.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw validation_error("cannot parse omega value '" + item + "'");
        }
    }
    RegParams params(std::move(w));
    params.check_matches(shape);
    return params;
}

Shape parse_dims(const std::string& text) {
    Shape shape;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, 'x')) {
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(item, &used);
            if (used != item.size() || v == 0) throw std::invalid_argument(item);
            shape.push_back(v);
        } catch (const std::logic_error&) {
            throw validation_error("cannot parse dimension '" + item + "'");
        }
    }
    if (shape.empty()) throw validation_error("empty --dims");
    return shape;
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw io_error("write to '" + path + "' failed");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

int cmd_run(const InputOptions& in, const std::string& variant, const AlgoOptions& opts) {
    const DenseTensor t = load_tensor(in);
    const RegParams params = parse_omegas(in.omega, t.shape());
    const Variant v = variant == "v1" ? Variant::v1 : Variant::v2;
    const AlgoReport rep = run_algorithm(v, t, params, opts);
    write_json(in.out, to_json(rep, t, params));
    if (!rep.extraction_converged) {
        std::cerr << "sprank1: power iteration hit its iteration cap\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int cmd_amm(const InputOptions& in, const AmmConfig& cfg, bool timing) {
    const DenseTensor t = load_tensor(in);
    const RegParams params = parse_omegas(in.omega, t.shape());
    const AmmTrace tr = amm_solve(t, params, cfg);
    write_json(in.out, to_json(tr, t, params, cfg, timing));
    if (tr.degenerate) {
        std::cerr << "sprank1: " << tr.degenerate_reason << '\n';
        return kExitNumeric;
    }
    if (!tr.converged) {
        std::cerr << "sprank1: no convergence within " << cfg.max_sweeps << " sweeps\n";
        return kExitNumeric;
    }
    return kExitOk;
}

struct ExperimentOptions {
    std::string kind;
    std::string preset = "desk";
    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> instances;
    bool no_timing = false;
};

int cmd_experiment(const ExperimentOptions& o) {
    const ExperimentKind kind = parse_experiment_kind(o.kind);
    ExperimentConfig cfg = o.preset == "full" ? ExperimentConfig::full(kind) : ExperimentConfig::desk(kind);
    if (!o.config.empty()) {
        std::ifstream is(o.config);
        if (!is) throw io_error("cannot open config '" + o.config + "'");
        json j;
        try {
            j = json::parse(is);
        } catch (const json::parse_error& e) {
            throw validation_error(std::string("config: ") + e.what());
        }
        cfg = experiment_config_from_json(j, cfg);
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.instances) cfg.instances = *o.instances;
    cfg.validate();

    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec) throw io_error("cannot create '" + o.out_dir + "': " + ec.message());

    const ExperimentResult res = run_experiment(cfg);
    std::ostringstream csv;
    write_csv(csv, res, CsvOptions{!o.no_timing});
    const std::string stem = (std::filesystem::path(o.out_dir) / to_string(kind)).string();
    write_text(stem + ".csv", csv.str());
    write_json(stem + ".json", summary_json(res, !o.no_timing));

    std::size_t failures = 0;
    for (const auto& r : res.records) failures += r.ok ? 0 : 1;
    std::cerr << "sprank1: " << res.records.size() << " records (" << failures << " failed) -> " << stem
              << ".csv\n";
    return kExitOk;
}

int cmd_gen(const std::string& spec, const std::string& out, bool binary) {
    const Instance inst = generate_instance_detailed(parse_instance_spec(spec));
    if (out == "-") {
        if (binary) {
            write_dten_binary(std::cout, inst.tensor);
        } else {
            write_dten_text(std::cout, inst.tensor);
        }
        std::cout.flush();
    } else {
        write_dten_file(out, inst.tensor, binary);
    }
    std::cerr << "sprank1: factor sparsity " << format_double(inst.factor_sparsity) << ", tensor sparsity "
              << format_double(inst.tensor_sparsity) << '\n';
    return kExitOk;
}

int cmd_bounds(const std::string& dims, const std::string& omega, const std::string& out) {
    const Shape shape = parse_dims(dims);
    const RegParams params = parse_omegas(omega, shape);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "bounds";
    j["shape"] = shape;
    j["omegas"] = params.omegas();
    j["valid"] = params.valid_for(shape);
    if (shape.size() >= 3 && params.valid_for(shape)) {
        j["ratio_v1"] = bound_ratio_v1(shape, params);
        j["ratio_v2"] = bound_ratio_v2(shape, params);
    } else {
        j["ratio_v1"] = nullptr;
        j["ratio_v2"] = nullptr;
    }
    write_json(out, j);
    return kExitOk;
}

// Cross-checks one run against the brute-force reference routines.
int cmd_verify(const InputOptions& in) {
    const DenseTensor t = load_tensor(in);
    const RegParams params = parse_omegas(in.omega, t.shape());
    const double fro = t.frobenius_norm();
    const double lmax = oracles::oracle_lambda_max(mode_unfolding(t, 0));
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "verify";
    j["lambda_max_a1_reference"] = lmax;
    bool ok = true;
    for (Variant v : {Variant::v1, Variant::v2}) {
        const AlgoReport rep = run_algorithm(v, t, params);
        const double brute = oracles::oracle_multilinear(t, rep.solution.xs);
        json e;
        e["lambda"] = rep.solution.lambda;
        e["lambda_reference"] = brute;
        e["vub"] = rep.upper_bound;
        const bool value_ok = std::abs(brute - rep.solution.lambda) <= 1e-10 * fro;
        const bool upper_ok = rep.solution.lambda <= rep.upper_bound + 1e-8 * fro;
        bool lower_ok = true;
        if (rep.bound_ratio) {
            const double base = v == Variant::v1 ? lmax : fro;
            lower_ok = rep.solution.lambda >= *rep.bound_ratio * base - 1e-8 * fro;
            e["guaranteed"] = *rep.bound_ratio * base;
        }
        e["ok"] = value_ok && upper_ok && lower_ok;
        ok = ok && value_ok && upper_ok && lower_ok;
        j[to_string(v)] = std::move(e);
    }
    j["ok"] = ok;
    write_json(in.out, j);
    return ok ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse rank-1 approximation of dense tensors with l1 regularization"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "sprank1 1.0.0");

    InputOptions run_in;
    std::string variant = "v1";
    AlgoOptions algo;
    bool no_prescale = false;
    auto* run = app.add_subcommand("run", "run algorithm V1 or V2 and write a JSON report");
    add_input_options(run, run_in);
    run->add_option("--variant,-v", variant, "v1 (singular vectors) or v2 (max-energy rows)")
        ->check(CLI::IsMember({"v1", "v2"}))
        ->capture_default_str();
    run->add_option("--tol", algo.power.tol, "power iteration relative tolerance")->capture_default_str();
    run->add_option("--max-iter", algo.power.max_iter, "power iteration cap")->capture_default_str();
    run->add_flag("--no-prescale", no_prescale, "do not divide by the max-abs entry before solving");
    run->add_flag("!--no-vub", algo.compute_upper_bound, "skip the upper bound computation");

    InputOptions amm_in;
    AmmConfig amm_cfg;
    std::string init = "v1";
    bool amm_no_timing = false;
    auto* amm = app.add_subcommand("amm", "run alternating maximization and write its trace as JSON");
    add_input_options(amm, amm_in);
    amm->add_option("--init", init, "starting point: v1, v2 or random")
        ->check(CLI::IsMember({"v1", "v2", "random"}))
        ->capture_default_str();
    amm->add_option("--seed", amm_cfg.seed, "seed for --init random")->capture_default_str();
    amm->add_option("--stop-tol", amm_cfg.stop_tol, "stop when no block moves more than this")->capture_default_str();
    amm->add_option("--max-sweeps", amm_cfg.max_sweeps, "sweep cap")->capture_default_str();
    amm->add_flag("--no-timing", amm_no_timing, "omit timings so reruns are byte-identical");

    ExperimentOptions exp_opts;
    auto* exp = app.add_subcommand("experiment", "run a benchmark sweep and write <kind>.csv and <kind>.json");
    exp->add_option("--kind,-k", exp_opts.kind, "vary-sr, vary-n or amm")->required();
    exp->add_option("--preset", exp_opts.preset, "desk (small) or full (large grids)")
        ->check(CLI::IsMember({"desk", "full"}))
        ->capture_default_str();
    exp->add_option("--config,-c", exp_opts.config, "JSON file overriding preset fields");
    exp->add_option("--out-dir,-d", exp_opts.out_dir, "output directory")->capture_default_str();
    exp->add_option("--seed", exp_opts.seed, "master seed");
    exp->add_option("--instances", exp_opts.instances, "instances per grid point");
    exp->add_flag("--no-timing", exp_opts.no_timing, "write time_ms as 0 so reruns are byte-identical");

    std::string gen_spec, gen_out;
    bool gen_binary = false;
    auto* gen = app.add_subcommand("gen", "write a synthetic instance as a .dten file");
    gen->add_option("--gen,-g", gen_spec, "instance spec, e.g. \"d=4,n=20,terms=10,sr=0.7,seed=1\"")->required();
    gen->add_option("--out,-o", gen_out, "output path, \"-\" for stdout")->required();
    gen->add_flag("--binary", gen_binary, "binary instead of text format");

    std::string dims, bounds_omega = "default", bounds_out = "-";
    auto* bounds = app.add_subcommand("bounds", "print the guaranteed approximation ratios for a shape");
    bounds->add_option("--dims", dims, "shape, e.g. 20x20x20")->required();
    bounds->add_option("--omega,-w", bounds_omega, "\"default\" or a comma-separated list")->capture_default_str();
    bounds->add_option("--out,-o", bounds_out, "output path, \"-\" for stdout")->capture_default_str();

    InputOptions verify_in;
    auto* verify = app.add_subcommand("verify", "");
    verify->group("");
    add_input_options(verify, verify_in);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*run) {
            algo.prescale = !no_prescale;
            return cmd_run(run_in, variant, algo);
        }
        if (*amm) {
            amm_cfg.init = init == "v1" ? AmmInit::from_v1 : init == "v2" ? AmmInit::from_v2 : AmmInit::random;
            return cmd_amm(amm_in, amm_cfg, !amm_no_timing);
        }
        if (*exp) return cmd_experiment(exp_opts);
        if (*gen) return cmd_gen(gen_spec, gen_out, gen_binary);
        if (*bounds) return cmd_bounds(dims, bounds_omega, bounds_out);
        if (*verify) return cmd_verify(verify_in);
    } catch (const io_error& e) {
        std::cerr << "sprank1: " << e.what() << '\n';
        return kExitIo;
    } catch (const validation_error& e) {
        std::cerr << "sprank1: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const numeric_error& e) {
        std::cerr << "sprank1: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitInvalid;
}
