#include "daggp/experiment.hpp"

#include "daggp/dataset_io.hpp"
#include "daggp/error.hpp"
#include "daggp/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>

namespace daggp {

std::string to_string(TaskKind k) {
    switch (k) {
    case TaskKind::Fit: return "fit";
    case TaskKind::Al: return "al";
    case TaskKind::Bo: return "bo";
    }
    return "unknown";
}

TaskKind parse_task_kind(const std::string& name) {
    for (auto k : {TaskKind::Fit, TaskKind::Al, TaskKind::Bo})
        if (to_string(k) == name) return k;
    throw ArgumentError("unknown experiment kind '" + name + "'");
}

std::string to_string(AlStrategy s) { return s == AlStrategy::MutualInformation ? "mi" : "random"; }

AlStrategy parse_al_strategy(const std::string& name) {
    if (name == "mi") return AlStrategy::MutualInformation;
    if (name == "random") return AlStrategy::Random;
    throw ArgumentError("unknown active-learning strategy '" + name + "'");
}

std::size_t default_n_int(const std::string& dag, TaskKind kind) {
    if (kind != TaskKind::Fit) return 0;
    if (dag == "dag1") return 5;
    if (dag == "dag2") return 3;
    if (dag == "dag3") return 1;
    return 1;
}

void ExperimentConfig::validate() const {
    const auto names = builtin_names();
    if (std::find(names.begin(), names.end(), dag) == names.end()) throw ArgumentError("unknown dag '" + dag + "'");
    if (n_obs < 1) throw ArgumentError("n_obs must be at least 1");
    if (replicates < 1) throw ArgumentError("replicates must be at least 1");
    if (mc_samples < 2 || cov_samples < 1 || truth_mc < 2 || obs_mc < 2)
        throw ArgumentError("MC budgets must be at least 2 (cov_samples at least 1)");
    if (!(noise_var >= 0.0)) throw ArgumentError("noise_var must be nonnegative");
    if (model == ModelVariant::Do && kind != TaskKind::Fit)
        throw ArgumentError("model 'do' is only valid for fit experiments");
    if (grid.one_d < 1 || grid.two_d < 1 || grid.three_d < 1 || grid.higher < 1)
        throw ArgumentError("grid resolutions must be positive");
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["dag"] = dag;
    j["kind"] = to_string(kind);
    j["model"] = to_string(model);
    j["n_obs"] = n_obs;
    j["n_int"] = initial_points();
    j["replicates"] = replicates;
    j["seed"] = seed;
    j["grid"] = {grid.one_d, grid.two_d, grid.three_d};
    j["mc_samples"] = mc_samples;
    j["cov_samples"] = cov_samples;
    j["noise_var"] = noise_var;
    j["truth_mc"] = truth_mc;
    j["obs_mc"] = obs_mc;
    if (kind != TaskKind::Fit) j["budget"] = budget;
    if (kind == TaskKind::Al) j["strategy"] = to_string(strategy);
    if (kind == TaskKind::Bo) j["gap_threshold"] = gap_threshold;
    j["conditionals"] = to_string(conditionals);
    j["noise_sd"] = scm_options.noise_sd;
    j["noise_sd_overrides"] = scm_options.noise_sd_overrides;
    return j;
}

const std::vector<double>& grid_truth(const SCM& scm, const std::vector<Task>& tasks, const CandidateGrid& grid,
                                      std::size_t n_mc) {
    static std::mutex mutex;
    static std::map<std::string, std::unique_ptr<std::vector<double>>> cache;

    std::string key = scm.manifest().dump() + "|" + std::to_string(n_mc);
    for (const auto& p : grid.points) {
        key += "|" + std::to_string(p.task) + ":";
        for (double v : p.x) key += format_double(v) + ",";
    }
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;

    auto values = std::make_unique<std::vector<double>>(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const TaskPoint& p = grid.points[i];
        const Task& t = tasks.at(p.task);
        const std::uint64_t seed = derive_seed(stream_id("truth"), {stream_id(t.name()), hash_values(p.x)});
        (*values)[i] = true_intervention_function(scm, InterventionAssignment::from_set(t.variables, p.x), n_mc, seed).mean;
    }
    return *cache.emplace(std::move(key), std::move(values)).first->second;
}

namespace {

struct Context {
    SCM scm;
    std::vector<Task> tasks;
    CandidateGrid grid;
    const std::vector<double>* truth = nullptr;
};

Context make_context(const ExperimentConfig& c) {
    c.validate();
    SCM scm = builtin_scm(c.dag, c.scm_options);
    auto tasks = default_tasks(scm.graph(), scm.domains());
    auto grid = make_grid(tasks, c.grid);
    Context ctx{std::move(scm), std::move(tasks), std::move(grid), nullptr};
    ctx.truth = &grid_truth(ctx.scm, ctx.tasks, ctx.grid, c.truth_mc);
    return ctx;
}

// Noisy interventional observation y = t_s(x) + eps, eps ~ N(0, noise_var).
double observe(const ExperimentConfig& c, const Context& ctx, const TaskPoint& p, std::uint64_t seed) {
    const Task& t = ctx.tasks.at(p.task);
    const double value =
        true_intervention_function(ctx.scm, InterventionAssignment::from_set(t.variables, p.x), c.obs_mc,
                                   derive_seed(seed, {stream_id("scm")}))
            .mean;
    Rng rng(derive_seed(seed, {stream_id("likelihood-noise")}));
    std::normal_distribution<double> normal(0.0, 1.0);
    return value + std::sqrt(c.noise_var) * normal(rng);
}

std::uint64_t observation_seed(std::uint64_t replicate_seed, const Task& t, const TaskPoint& p, std::size_t ordinal) {
    return derive_seed(replicate_seed, {stream_id("observation"), stream_id(t.name()), hash_values(p.x), ordinal});
}

struct Replicate {
    std::uint64_t seed = 0;
    FittedDAGDensity density;
    std::vector<TaskPoint> points;
    std::vector<double> y;
};

Replicate make_replicate(const ExperimentConfig& c, const Context& ctx, std::size_t r) {
    const std::uint64_t seed = derive_seed(c.seed, {stream_id("replicate"), r});
    const Dataset obs = sample(ctx.scm, c.n_obs, derive_seed(seed, {stream_id("observational")}));
    Replicate rep{seed, fit_dag_density(obs, ctx.scm.graph(), conditional_fitter(c.conditionals)), {}, {}};

    Rng rng(derive_seed(seed, {stream_id("interventional-design")}));
    const std::size_t n_int = c.initial_points();
    for (std::size_t s = 0; s < ctx.tasks.size(); ++s) {
        const Task& t = ctx.tasks[s];
        for (std::size_t i = 0; i < n_int; ++i) {
            TaskPoint p{s, {}};
            if (c.kind == TaskKind::Bo) {
                const std::size_t lo = ctx.grid.offsets[s];
                const std::size_t hi = s + 1 < ctx.tasks.size() ? ctx.grid.offsets[s + 1] : ctx.grid.size();
                p = ctx.grid.points[std::uniform_int_distribution<std::size_t>(lo, hi - 1)(rng)];
            } else {
                for (const auto& iv : t.domain) p.x.push_back(std::uniform_real_distribution<double>(iv.lo, iv.hi)(rng));
                for (std::size_t d = 0; d < p.x.size(); ++d) p.x[d] = std::clamp(p.x[d], t.domain[d].lo, t.domain[d].hi);
            }
            rep.y.push_back(observe(c, ctx, p, observation_seed(seed, t, p, rep.points.size())));
            rep.points.push_back(std::move(p));
        }
    }
    return rep;
}

std::shared_ptr<const TaskPrior> make_prior(const ExperimentConfig& c, const Context& ctx, const Replicate& rep) {
    GpSettings s;
    s.mc_samples = c.mc_samples;
    s.cov_samples = c.cov_samples;
    s.noise_var = c.noise_var;
    s.seed = derive_seed(rep.seed, {stream_id("model")});
    s.workers = c.workers;
    return make_task_prior(c.model, ctx.tasks, rep.density, s);
}

double model_rmse(const MultiTaskGP& model, const Context& ctx) {
    const Prediction pred = model.predict(ctx.grid.points);
    return rmse(std::span<const double>(pred.mean.data(), static_cast<std::size_t>(pred.mean.size())), *ctx.truth);
}

void aggregate(Report& report) {
    const auto n = static_cast<double>(report.replicates.size());
    double mean = 0.0;
    for (const auto& r : report.replicates) mean += r.metric;
    mean /= n;
    double ss = 0.0;
    for (const auto& r : report.replicates) ss += (r.metric - mean) * (r.metric - mean);
    report.mean = mean;
    report.standard_error = report.replicates.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
}

std::string manifest_hash(const SCM& scm) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stream_id(scm.manifest().dump())));
    return buf;
}

template <class Body>
Report run(const ExperimentConfig& c, Body body) {
    const auto start = std::chrono::steady_clock::now();
    Context ctx = make_context(c);
    Report report;
    report.config = c;
    report.tasks = ctx.tasks;
    report.manifest_hash = manifest_hash(ctx.scm);
    report.optimum = *std::min_element(ctx.truth->begin(), ctx.truth->end());
    for (std::size_t r = 0; r < c.replicates; ++r) {
        ReplicateResult res = body(ctx, make_replicate(c, ctx, r));
        res.replicate = r;
        report.replicates.push_back(std::move(res));
    }
    aggregate(report);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace

Report run_fit_experiment(const ExperimentConfig& config) {
    if (config.kind != TaskKind::Fit) throw ArgumentError("run_fit_experiment needs kind 'fit'");
    return run(config, [&](const Context& ctx, const Replicate& rep) {
        ReplicateResult res;
        res.seed = rep.seed;
        if (config.model == ModelVariant::Do) {
            std::vector<double> pred(ctx.grid.size());
            for (std::size_t i = 0; i < ctx.grid.size(); ++i) {
                const TaskPoint& p = ctx.grid.points[i];
                const Task& t = ctx.tasks[p.task];
                pred[i] = do_baseline(rep.density, ctx.scm.graph(), t.variables, p.x, config.mc_samples,
                                      derive_seed(rep.seed, {stream_id("do"), stream_id(t.name()), hash_values(p.x)}))
                              .mean;
            }
            res.metric = rmse(pred, *ctx.truth);
        } else {
            res.metric = model_rmse(MultiTaskGP(make_prior(config, ctx, rep), rep.points, rep.y), ctx);
        }
        res.curve.push_back({0, std::nullopt, 0.0, std::nullopt, res.metric});
        return res;
    });
}

Report run_al_experiment(const ExperimentConfig& config) {
    if (config.kind != TaskKind::Al) throw ArgumentError("run_al_experiment needs kind 'al'");
    return run(config, [&](const Context& ctx, const Replicate& rep) {
        ReplicateResult res;
        res.seed = rep.seed;
        if (config.budget > ctx.grid.size()) throw ArgumentError("budget exceeds the candidate grid");
        MultiTaskGP model(make_prior(config, ctx, rep), rep.points, rep.y);
        res.curve.push_back({0, std::nullopt, 0.0, std::nullopt, model_rmse(model, ctx)});

        std::vector<Selection> design;
        if (config.strategy == AlStrategy::MutualInformation) {
            design = al_greedy_mi(model, ctx.grid, config.budget).steps;
        } else {
            std::vector<std::size_t> order(ctx.grid.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            Rng rng(derive_seed(rep.seed, {stream_id("random-design")}));
            for (std::size_t i = 0; i < config.budget; ++i) {
                const std::size_t j = std::uniform_int_distribution<std::size_t>(i, order.size() - 1)(rng);
                std::swap(order[i], order[j]);
                design.push_back({ctx.grid.points[order[i]], order[i], 0.0, std::nullopt, std::nullopt});
            }
        }
        for (std::size_t step = 0; step < design.size(); ++step) {
            const Selection& sel = design[step];
            const Task& t = ctx.tasks[sel.point.task];
            const double y = observe(config, ctx, sel.point,
                                     observation_seed(rep.seed, t, sel.point, model.points().size()));
            model = model.condition({sel.point}, {y});
            res.curve.push_back({step + 1, sel.point, sel.acquisition, y, model_rmse(model, ctx)});
        }
        res.metric = res.curve.back().metric;
        return res;
    });
}

Report run_bo_experiment(const ExperimentConfig& config) {
    if (config.kind != TaskKind::Bo) throw ArgumentError("run_bo_experiment needs kind 'bo'");
    return run(config, [&](const Context& ctx, const Replicate& rep) {
        ReplicateResult res;
        res.seed = rep.seed;
        const std::vector<double>& truth = *ctx.truth;
        const double optimum = *std::min_element(truth.begin(), truth.end());
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : rep.points) {
            const auto it = std::lower_bound(ctx.grid.points.begin(), ctx.grid.points.end(), p);
            best = std::min(best, truth[static_cast<std::size_t>(it - ctx.grid.points.begin())]);
        }
        MultiTaskGP model(make_prior(config, ctx, rep), rep.points, rep.y);
        res.curve.push_back({0, std::nullopt, 0.0, std::nullopt, best - optimum});
        std::optional<std::size_t> reached;
        if (best - optimum <= config.gap_threshold) reached = 0;
        for (std::size_t step = 1; step <= config.budget; ++step) {
            const BoChoice choice = bo_step(model, ctx.grid);
            const Task& t = ctx.tasks[choice.point.task];
            const double y = observe(config, ctx, choice.point,
                                     observation_seed(rep.seed, t, choice.point, model.points().size()));
            model = model.condition({choice.point}, {y});
            best = std::min(best, truth[choice.grid_index]);
            res.curve.push_back({step, choice.point, choice.acquisition, y, best - optimum});
            if (!reached && best - optimum <= config.gap_threshold) reached = step;
        }
        res.metric = static_cast<double>(reached.value_or(config.budget + 1));
        return res;
    });
}

Report run_experiment(const ExperimentConfig& config) {
    switch (config.kind) {
    case TaskKind::Fit: return run_fit_experiment(config);
    case TaskKind::Al: return run_al_experiment(config);
    case TaskKind::Bo: return run_bo_experiment(config);
    }
    throw ArgumentError("unknown experiment kind");
}

void write_report_csv(const Report& report, std::ostream& out) {
    const ExperimentConfig& c = report.config;
    if (c.kind == TaskKind::Fit) {
        out << "# schema: " << kFitSchema << '\n';
        out << "dag,model,n_obs,n_int,replicate,seed,rmse\n";
        for (const auto& r : report.replicates)
            out << c.dag << ',' << to_string(c.model) << ',' << c.n_obs << ',' << c.initial_points() << ','
                << r.replicate << ',' << r.seed << ',' << format_double(r.metric) << '\n';
        return;
    }
    std::size_t width = 0;
    for (const auto& t : report.tasks) width = std::max(width, t.dimension());
    out << "# schema: " << kCurveSchema << '\n';
    out << "kind,dag,model,strategy,n_obs,n_int,replicate,seed,step,task";
    for (std::size_t i = 1; i <= width; ++i) out << ",x" << i;
    out << ",acquisition,y," << (c.kind == TaskKind::Bo ? "gap" : "rmse") << '\n';
    const std::string strategy = c.kind == TaskKind::Al ? to_string(c.strategy) : "ei";
    for (const auto& r : report.replicates) {
        for (const auto& row : r.curve) {
            out << to_string(c.kind) << ',' << c.dag << ',' << to_string(c.model) << ',' << strategy << ','
                << c.n_obs << ',' << c.initial_points() << ',' << r.replicate << ',' << r.seed << ',' << row.step
                << ',';
            if (row.point) out << report.tasks.at(row.point->task).name();
            for (std::size_t i = 0; i < width; ++i) {
                out << ',';
                if (row.point && i < row.point->x.size()) out << format_double(row.point->x[i]);
            }
            out << ',';
            if (row.point) out << format_double(row.acquisition);
            out << ',';
            if (row.y) out << format_double(*row.y);
            out << ',' << format_double(row.metric) << '\n';
        }
    }
}

nlohmann::json report_json(const Report& report) {
    nlohmann::json j;
    j["schema"] = report.config.kind == TaskKind::Fit ? kFitSchema : kCurveSchema;
    j["config"] = report.config.to_json();
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& t : report.tasks) tasks.push_back(t.name());
    j["tasks"] = tasks;
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : report.replicates) reps.push_back({{"replicate", r.replicate}, {"seed", r.seed}, {"metric", r.metric}});
    j["replicates"] = reps;
    j["metric"] = report.config.kind == TaskKind::Bo ? "steps_to_gap_threshold" : "rmse";
    j["mean"] = report.mean;
    j["standard_error"] = report.standard_error;
    if (report.config.kind == TaskKind::Bo) j["grid_optimum"] = report.optimum;
    j["scm_manifest_hash"] = report.manifest_hash;
    j["wall_seconds"] = report.wall_seconds;
    return j;
}

} // namespace daggp
