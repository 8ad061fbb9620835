#include "daggp/causal_prior.hpp"
#include "daggp/dag_gp.hpp"
#include "daggp/density.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace daggp;

namespace {

struct Bench {
    SCM scm;
    FittedDAGDensity density;
    std::vector<Task> tasks;
};

Bench make(const std::string& dag, ConditionalFamily family = ConditionalFamily::Affine) {
    SCM scm = builtin_scm(dag);
    FittedDAGDensity d = fit_dag_density(sample(scm, 100, 1), scm.graph(), conditional_fitter(family));
    auto tasks = default_tasks(scm.graph(), scm.domains());
    return {std::move(scm), std::move(d), std::move(tasks)};
}

std::vector<TaskPoint> points(const std::vector<Task>& tasks, std::size_t n) {
    std::mt19937_64 rng(2);
    std::vector<TaskPoint> out;
    for (std::size_t i = 0; i < n; ++i) {
        TaskPoint p{i % tasks.size(), {}};
        for (const auto& iv : tasks[p.task].domain) p.x.push_back(std::uniform_real_distribution<double>(iv.lo, iv.hi)(rng));
        out.push_back(std::move(p));
    }
    return out;
}

void BM_MeasureSample(benchmark::State& state) {
    const Bench b = make("dag2");
    const IntegratingMeasure m(b.density, {"B"});
    const std::vector<double> x{0.5};
    for (auto _ : state) benchmark::DoNotOptimize(m.sample(x, static_cast<std::size_t>(state.range(0)), 3));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MeasureSample)->Arg(100)->Arg(1000)->Arg(10000);

// Fresh prior per iteration, so point summaries are recomputed.
void BM_GramAssembly(benchmark::State& state) {
    const Bench b = make("dag2");
    const auto pts = points(b.tasks, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const auto prior = make_task_prior(ModelVariant::DagGpPlus, b.tasks, b.density, {});
        benchmark::DoNotOptimize(prior->gram(pts));
    }
}
BENCHMARK(BM_GramAssembly)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Posterior(benchmark::State& state) {
    const Bench b = make("dag1");
    const auto prior = make_task_prior(ModelVariant::DagGpPlus, b.tasks, b.density, {});
    const auto obs = points(b.tasks, 10);
    const std::vector<double> y(obs.size(), 0.1);
    const auto query = points(b.tasks, static_cast<std::size_t>(state.range(0)));
    const MultiTaskGP model(prior, obs, y);
    model.predict(query);
    for (auto _ : state) benchmark::DoNotOptimize(model.predict(query));
}
BENCHMARK(BM_Posterior)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_ConditionalMean(benchmark::State& state) {
    const auto family = state.range(0) ? ConditionalFamily::Gp : ConditionalFamily::Affine;
    const Bench b = make("dag2", family);
    const ConditionalGaussian& y = b.density.conditional("Y");
    const std::vector<double> v{0.1, 0.2, 0.3, 0.4};
    for (auto _ : state) benchmark::DoNotOptimize(y.mean(v));
    state.SetLabel(to_string(family));
}
BENCHMARK(BM_ConditionalMean)->Arg(0)->Arg(1);

void BM_FitGpConditional(benchmark::State& state) {
    const SCM scm = builtin_scm("dag1");
    const Dataset data = sample(scm, static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(fit_gp_conditional(data, "Z", {"X"}));
}
BENCHMARK(BM_FitGpConditional)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
