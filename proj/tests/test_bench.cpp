#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "sprank1/bench.hpp"
#include "test_util.hpp"

namespace sprank1 {
namespace {

ExperimentConfig tiny(ExperimentKind kind) {
    ExperimentConfig c = ExperimentConfig::desk(kind);
    c.order = 3;
    c.n = 6;
    c.sr_grid = {0.2, 0.6};
    c.n_grid = {4, 6};
    c.instances = 2;
    c.num_terms = 3;
    c.seed = 42;
    return c;
}

std::string csv_of(const ExperimentResult& res, bool timing = false) {
    std::ostringstream os;
    write_csv(os, res, CsvOptions{timing});
    return os.str();
}

TEST(GenerateInstance, DenseWhenNotSparsified) {
    const Instance inst = generate_instance_detailed({{5, 5, 5}, 10, 0.0, 3});
    EXPECT_EQ(inst.factor_sparsity, 0.0);
    EXPECT_EQ(inst.tensor_sparsity, 0.0);
    EXPECT_EQ(inst.draws, 1);
}

TEST(GenerateInstance, FullySparsifiedFails) {
    EXPECT_THROW(generate_instance({{3, 3, 3}, 2, 1.0, 1}), numeric_error);
}

TEST(GenerateInstance, RealizedSparsityMatchesRecount) {
    const InstanceSpec spec{{50, 50, 50, 50}, 10, 0.7, 11};
    const Instance inst = generate_instance_detailed(spec);
    std::size_t zeros = 0;
    for (double v : inst.tensor.data()) zeros += v == 0.0;
    EXPECT_DOUBLE_EQ(inst.tensor_sparsity, static_cast<double>(zeros) / static_cast<double>(inst.tensor.size()));
    EXPECT_NEAR(inst.factor_sparsity, 0.7, 0.03);
    // a tensor entry is nonzero only if its factor entries survive in some term
    EXPECT_GT(inst.tensor_sparsity, 0.7);
}

TEST(GenerateInstance, SeedDeterminism) {
    const InstanceSpec spec{{4, 5, 6}, 3, 0.4, 77};
    EXPECT_EQ(generate_instance(spec), generate_instance(spec));
    InstanceSpec other = spec;
    other.seed = 78;
    EXPECT_FALSE(generate_instance(spec) == generate_instance(other));
}

TEST(GenerateInstance, RankOneTermIsOuterProduct) {
    // One term with no sparsification: every mode unfolding has rank one.
    const DenseTensor t = generate_instance({{3, 4, 5}, 1, 0.0, 5});
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(leading_singular_pair(mode_unfolding(t, j)).sigma, t.frobenius_norm(), 1e-10 * t.frobenius_norm());
    }
}

TEST(GenerateInstance, SpecValidation) {
    EXPECT_THROW(generate_instance({{}, 1, 0.5, 1}), validation_error);
    EXPECT_THROW(generate_instance({{3, 0}, 1, 0.5, 1}), validation_error);
    EXPECT_THROW(generate_instance({{3, 3}, 0, 0.5, 1}), validation_error);
    EXPECT_THROW(generate_instance({{3, 3}, 1, 1.5, 1}), validation_error);
}

TEST(SparsityRatio, Examples) {
    EXPECT_EQ(sparsity_ratio(DenseTensor({2, 2}, {0, 1, 0, 0})), 0.75);
    EXPECT_EQ(sparsity_ratio(Vector{1.0, 2.0}), 0.0);
    EXPECT_THROW(sparsity_ratio(Vector{}), validation_error);
}

TEST(ParseInstanceSpec, Forms) {
    const InstanceSpec a = parse_instance_spec("d=4,n=20,terms=10,sr=0.7,seed=1");
    EXPECT_EQ(a.shape, (Shape{20, 20, 20, 20}));
    EXPECT_EQ(a.num_terms, 10);
    EXPECT_EQ(a.sparsity_ratio, 0.7);
    EXPECT_EQ(a.seed, 1u);
    const InstanceSpec b = parse_instance_spec("dims=3x4x5,sr=0.2");
    EXPECT_EQ(b.shape, (Shape{3, 4, 5}));
    EXPECT_EQ(b.num_terms, 10);
    EXPECT_THROW(parse_instance_spec("d=3"), validation_error);
    EXPECT_THROW(parse_instance_spec("d=3,n=4,bogus=1"), validation_error);
    EXPECT_THROW(parse_instance_spec("d=3,n=four"), validation_error);
    EXPECT_THROW(parse_instance_spec("d=2,dims=3x4x5"), validation_error);
    EXPECT_THROW(parse_instance_spec("d=3,n=4,sr=2"), validation_error);
}

TEST(ExperimentKind, RoundTrip) {
    for (ExperimentKind k : {ExperimentKind::vary_sr, ExperimentKind::vary_n, ExperimentKind::amm}) {
        EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_experiment_kind("fig1"), validation_error);
}

TEST(Experiment, RecordCountsAndAggregates) {
    const ExperimentResult sr = run_experiment(tiny(ExperimentKind::vary_sr));
    EXPECT_EQ(sr.records.size(), 2u * 2u * 2u);
    EXPECT_EQ(sr.aggregates.size(), 4u);
    EXPECT_EQ(sr.aggregates[0].variant, "v1");
    EXPECT_EQ(sr.aggregates[0].count, 2);

    const ExperimentResult n = run_experiment(tiny(ExperimentKind::vary_n));
    EXPECT_EQ(n.records.size(), 8u);
    EXPECT_EQ(n.records.front().shape, (Shape{4, 4, 4}));

    const ExperimentResult amm = run_experiment(tiny(ExperimentKind::amm));
    EXPECT_EQ(amm.records.size(), 2u * 2u * 3u);
    for (const auto& r : amm.records) {
        ASSERT_TRUE(r.ok) << r.error;
        ASSERT_TRUE(r.sweeps.has_value());
        // a random start can hit a vanishing block on these very sparse tensors
        if (*r.sweeps == 0) {
            EXPECT_FALSE(r.converged);
        }
        if (r.variant != "amm_random") {
            EXPECT_GE(*r.sweeps, 1);
        }
    }
}

TEST(Experiment, RecordsSatisfyBounds) {
    ExperimentConfig cfg = tiny(ExperimentKind::vary_sr);
    cfg.instances = 4;
    const ExperimentResult res = run_experiment(cfg);
    for (const auto& r : res.records) {
        ASSERT_TRUE(r.ok) << r.error;
        EXPECT_LE(r.lambda, r.vub + 1e-8 * r.frobenius);
        ASSERT_TRUE(r.bound_ratio.has_value());
        const double base = r.variant == "v1" ? r.lambda_max_a1 : r.frobenius;
        EXPECT_GE(r.lambda, *r.bound_ratio * base - 1e-8 * r.frobenius);
    }
}

TEST(Experiment, SameSeedGivesIdenticalCsv) {
    for (ExperimentKind k : {ExperimentKind::vary_sr, ExperimentKind::vary_n, ExperimentKind::amm}) {
        EXPECT_EQ(csv_of(run_experiment(tiny(k))), csv_of(run_experiment(tiny(k))));
    }
    ExperimentConfig other = tiny(ExperimentKind::vary_sr);
    other.seed = 43;
    EXPECT_NE(csv_of(run_experiment(tiny(ExperimentKind::vary_sr))), csv_of(run_experiment(other)));
}

TEST(Experiment, RecordsCanBeRegeneratedAlone) {
    const ExperimentConfig cfg = tiny(ExperimentKind::vary_sr);
    const ExperimentResult res = run_experiment(cfg);
    // record of grid point 1, instance 1 (two variants per instance)
    const ExperimentRecord& r = res.records[(1 * 2 + 1) * 2];
    EXPECT_EQ(r.seed, derive_seed(cfg.seed, 3));
    const DenseTensor t = generate_instance({Shape(3, 6), cfg.num_terms, 0.6, r.seed});
    EXPECT_EQ(sparsity_ratio(t), r.sr_tensor);
}

TEST(Experiment, EmptyGridWritesHeaderOnly) {
    ExperimentConfig cfg = tiny(ExperimentKind::vary_sr);
    cfg.sr_grid.clear();
    const ExperimentResult res = run_experiment(cfg);
    EXPECT_TRUE(res.records.empty());
    EXPECT_EQ(csv_of(res),
              "variant,d,dims,sr_target,sr_tensor,seed,lambda,objective,vub,bound_ratio,"
              "sparsity_out_1,sparsity_out_2,sparsity_out_3,time_ms,sweeps\n");
}

TEST(Experiment, FailedInstancesAreRecorded) {
    ExperimentConfig cfg = tiny(ExperimentKind::vary_sr);
    cfg.sr_grid = {1.0};
    cfg.instances = 1;
    const ExperimentResult res = run_experiment(cfg);
    ASSERT_EQ(res.records.size(), 2u);
    EXPECT_FALSE(res.records[0].ok);
    EXPECT_EQ(res.aggregates[0].failures, 1);
    EXPECT_EQ(res.aggregates[0].count, 0);
    const std::string csv = csv_of(res);
    EXPECT_NE(csv.find("\nv1,3,6x6x6,1,,"), std::string::npos);
}

TEST(Experiment, CsvRowShape) {
    const ExperimentResult res = run_experiment(tiny(ExperimentKind::amm));
    std::istringstream is(csv_of(res, true));
    std::string line;
    std::getline(is, line);
    const auto columns = std::count(line.begin(), line.end(), ',');
    while (std::getline(is, line)) EXPECT_EQ(std::count(line.begin(), line.end(), ','), columns);
}

TEST(Experiment, ConfigValidation) {
    ExperimentConfig cfg = tiny(ExperimentKind::vary_sr);
    cfg.order = 2;
    EXPECT_THROW(run_experiment(cfg), validation_error);
    cfg = tiny(ExperimentKind::vary_sr);
    cfg.sr_grid = {-0.1};
    EXPECT_THROW(run_experiment(cfg), validation_error);
    cfg = tiny(ExperimentKind::vary_n);
    cfg.n_grid = {0};
    EXPECT_THROW(run_experiment(cfg), validation_error);
}

}  // namespace
}  // namespace sprank1
