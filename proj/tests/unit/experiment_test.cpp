#include "daggp/error.hpp"
#include "daggp/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace daggp;

namespace {

ExperimentConfig small(const std::string& dag, TaskKind kind, ModelVariant model) {
    ExperimentConfig c;
    c.dag = dag;
    c.kind = kind;
    c.model = model;
    c.replicates = 3;
    c.grid = {8, 4, 3, 2};
    c.mc_samples = 100;
    c.cov_samples = 20;
    c.truth_mc = 2000;
    c.obs_mc = 200;
    c.budget = 3;
    return c;
}

std::string csv(const Report& r) {
    std::ostringstream os;
    write_report_csv(r, os);
    return os.str();
}

} // namespace

TEST(Config, Validation) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    c.dag = "dag7";
    EXPECT_THROW(c.validate(), ArgumentError);
    c = {};
    c.model = ModelVariant::Do;
    c.kind = TaskKind::Al;
    EXPECT_THROW(c.validate(), ArgumentError);
    c = {};
    c.replicates = 0;
    EXPECT_THROW(c.validate(), ArgumentError);
    EXPECT_EQ(parse_task_kind("bo"), TaskKind::Bo);
    EXPECT_EQ(parse_al_strategy("random"), AlStrategy::Random);
    EXPECT_THROW(parse_task_kind("sweep"), ArgumentError);
}

TEST(Config, DefaultInitialPoints) {
    EXPECT_EQ(default_n_int("dag1", TaskKind::Fit), 5u);
    EXPECT_EQ(default_n_int("dag2", TaskKind::Fit), 3u);
    EXPECT_EQ(default_n_int("dag3", TaskKind::Fit), 1u);
    EXPECT_EQ(default_n_int("dag1", TaskKind::Al), 0u);
    ExperimentConfig c;
    c.n_int = 7;
    EXPECT_EQ(c.initial_points(), 7u);
}

TEST(Fit, CsvIsByteIdenticalAcrossRuns) {
    for (auto model : {ModelVariant::DagGpPlus, ModelVariant::Gp, ModelVariant::Do}) {
        ExperimentConfig c = small("dag2", TaskKind::Fit, model);
        const std::string a = csv(run_experiment(c));
        c.workers = 3;
        EXPECT_EQ(csv(run_experiment(c)), a) << to_string(model);
        EXPECT_EQ(a.rfind(std::string("# schema: ") + kFitSchema, 0), 0u);
    }
}

TEST(Fit, StandardErrorMatchesReplicates) {
    const Report r = run_experiment(small("dag1", TaskKind::Fit, ModelVariant::DagGp));
    ASSERT_EQ(r.replicates.size(), 3u);
    double mean = 0.0;
    for (const auto& rep : r.replicates) mean += rep.metric / 3.0;
    double ss = 0.0;
    for (const auto& rep : r.replicates) ss += (rep.metric - mean) * (rep.metric - mean);
    EXPECT_NEAR(r.mean, mean, 1e-12);
    EXPECT_NEAR(r.standard_error, std::sqrt(ss / 2.0) / std::sqrt(3.0), 1e-12);

    ExperimentConfig one = small("dag1", TaskKind::Fit, ModelVariant::DagGp);
    one.replicates = 1;
    EXPECT_EQ(run_experiment(one).standard_error, 0.0);
}

TEST(Fit, DoIgnoresInterventionalSettings) {
    ExperimentConfig c = small("dag1", TaskKind::Fit, ModelVariant::Do);
    const Report base = run_experiment(c);
    c.n_int = 9;
    c.noise_var = 0.5;
    const Report other = run_experiment(c);
    for (std::size_t r = 0; r < base.replicates.size(); ++r)
        EXPECT_EQ(base.replicates[r].metric, other.replicates[r].metric);
}

TEST(Fit, ConditionalFamilyReachesTheDensityOnly) {
    ExperimentConfig c = small("dag1", TaskKind::Fit, ModelVariant::Do);
    const Report affine = run_experiment(c);
    c.conditionals = ConditionalFamily::Gp;
    const Report gp = run_experiment(c);
    EXPECT_NE(affine.mean, gp.mean);
    EXPECT_EQ(csv(run_experiment(c)), csv(gp));
    EXPECT_EQ(report_json(gp).at("config").at("conditionals"), "gp");

    // The zero-mean single-task GP never reads the fitted density.
    ExperimentConfig g = small("dag1", TaskKind::Fit, ModelVariant::Gp);
    const double a = run_experiment(g).mean;
    g.conditionals = ConditionalFamily::Gp;
    EXPECT_EQ(run_experiment(g).mean, a);
}

TEST(Al, BudgetZeroIsTheFitRmse) {
    ExperimentConfig al = small("dag1", TaskKind::Al, ModelVariant::DagGpPlus);
    al.budget = 0;
    const Report r = run_experiment(al);
    for (const auto& rep : r.replicates) {
        ASSERT_EQ(rep.curve.size(), 1u);
        EXPECT_EQ(rep.curve[0].metric, rep.metric);
    }
    ExperimentConfig fit = al;
    fit.kind = TaskKind::Fit;
    fit.n_int = 0;
    const Report f = run_experiment(fit);
    for (std::size_t i = 0; i < r.replicates.size(); ++i) EXPECT_EQ(f.replicates[i].metric, r.replicates[i].metric);
}

TEST(Al, CurveShapeAndDeterminism) {
    for (auto strategy : {AlStrategy::MutualInformation, AlStrategy::Random}) {
        ExperimentConfig c = small("dag1", TaskKind::Al, ModelVariant::DagGp);
        c.strategy = strategy;
        const Report r = run_experiment(c);
        for (const auto& rep : r.replicates) {
            ASSERT_EQ(rep.curve.size(), c.budget + 1);
            EXPECT_EQ(rep.metric, rep.curve.back().metric);
            for (std::size_t s = 1; s < rep.curve.size(); ++s) {
                EXPECT_TRUE(rep.curve[s].point.has_value());
                EXPECT_TRUE(rep.curve[s].y.has_value());
            }
        }
        EXPECT_EQ(csv(run_experiment(c)), csv(r));
    }
    ExperimentConfig too_big = small("dag1", TaskKind::Al, ModelVariant::Gp);
    too_big.budget = 1000;
    EXPECT_THROW(run_experiment(too_big), ArgumentError);
}

TEST(Bo, GapIsNonIncreasingAndReachesZeroOnTinyGrid) {
    ExperimentConfig c = small("dag1", TaskKind::Bo, ModelVariant::DagGpPlus);
    c.grid = {1, 1, 1, 1};
    c.budget = 2;
    const Report r = run_experiment(c);
    for (const auto& rep : r.replicates) {
        for (std::size_t s = 2; s < rep.curve.size(); ++s) EXPECT_LE(rep.curve[s].metric, rep.curve[s - 1].metric);
        EXPECT_EQ(rep.curve.back().metric, 0.0);
        EXPECT_LE(rep.metric, 2.0);
    }
    ExperimentConfig d = small("dag1", TaskKind::Bo, ModelVariant::Gp);
    const Report rd = run_experiment(d);
    for (const auto& rep : rd.replicates)
        for (std::size_t s = 2; s < rep.curve.size(); ++s) EXPECT_LE(rep.curve[s].metric, rep.curve[s - 1].metric);
    EXPECT_EQ(csv(run_experiment(d)), csv(rd));
    EXPECT_EQ(csv(rd).rfind(std::string("# schema: ") + kCurveSchema, 0), 0u);
}

TEST(Report, JsonEchoesConfig) {
    const Report r = run_experiment(small("dag3", TaskKind::Fit, ModelVariant::GpPlus));
    const nlohmann::json j = report_json(r);
    EXPECT_EQ(j.at("config").at("dag"), "dag3");
    EXPECT_EQ(j.at("replicates").size(), 3u);
    EXPECT_FALSE(r.manifest_hash.empty());
    EXPECT_TRUE(j.contains("wall_seconds"));
}
