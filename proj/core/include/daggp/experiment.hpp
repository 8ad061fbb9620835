#pragma once

#include "daggp/dag_gp.hpp"
#include "daggp/decision.hpp"
#include "daggp/density.hpp"
#include "daggp/scm.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace daggp {

enum class TaskKind { Fit, Al, Bo };
enum class AlStrategy { MutualInformation, Random };

std::string to_string(TaskKind k);
TaskKind parse_task_kind(const std::string& name);
std::string to_string(AlStrategy s);
AlStrategy parse_al_strategy(const std::string& name);

/// Initial interventional points per task when n_int is unset: 5 for dag1,
/// 3 for dag2, 1 for dag3 (fit experiments); 0 for al and bo.
std::size_t default_n_int(const std::string& dag, TaskKind kind);

struct ExperimentConfig {
    std::string dag = "dag1";
    TaskKind kind = TaskKind::Fit;
    ModelVariant model = ModelVariant::DagGpPlus;
    std::size_t n_obs = 30;
    std::optional<std::size_t> n_int;
    std::size_t replicates = 10;
    std::uint64_t seed = 0;
    GridResolution grid;
    std::size_t mc_samples = 1000;
    std::size_t cov_samples = 100;
    double noise_var = 1e-3;
    std::size_t truth_mc = 100000;   // SCM draws per evaluation-grid truth value
    std::size_t obs_mc = 10000;      // SCM draws behind one noisy observation
    std::size_t budget = 10;         // al / bo acquisitions
    AlStrategy strategy = AlStrategy::MutualInformation;
    double gap_threshold = 0.05;     // bo: replicate metric is the first step with gap <= threshold
    ConditionalFamily conditionals = ConditionalFamily::Affine;
    BuiltinOptions scm_options;
    std::size_t workers = 0;

    std::size_t initial_points() const { return n_int.value_or(default_n_int(dag, kind)); }
    /// Throws ArgumentError for invalid counts or model/kind combinations.
    void validate() const;
    nlohmann::json to_json() const;
};

struct CurveRow {
    std::size_t step = 0;
    std::optional<TaskPoint> point;
    double acquisition = 0.0;
    std::optional<double> y;
    double metric = 0.0;   // rmse (fit, al) or gap to the grid optimum (bo)
};

struct ReplicateResult {
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    double metric = 0.0;   // fit/al: final rmse; bo: steps to reach the gap threshold
    std::vector<CurveRow> curve;
};

struct Report {
    ExperimentConfig config;
    std::vector<Task> tasks;
    std::vector<ReplicateResult> replicates;
    double mean = 0.0;
    double standard_error = 0.0;   // sample sd / sqrt(R); 0 for R = 1
    double optimum = 0.0;          // bo: minimum truth over the grid
    std::string manifest_hash;
    double wall_seconds = 0.0;
};

/// Evaluation truth t_s(x) for every grid point, from the SCM oracle. Cached
/// per process; independent of the experiment seed.
const std::vector<double>& grid_truth(const SCM& scm, const std::vector<Task>& tasks, const CandidateGrid& grid,
                                      std::size_t n_mc);

Report run_fit_experiment(const ExperimentConfig& config);
Report run_al_experiment(const ExperimentConfig& config);
Report run_bo_experiment(const ExperimentConfig& config);
Report run_experiment(const ExperimentConfig& config);

inline constexpr const char* kFitSchema = "daggp.fit.v1";
inline constexpr const char* kCurveSchema = "daggp.curve.v1";

/// Fit: one row per replicate. al/bo: one row per replicate and step.
/// Deterministic given the config; wall time goes to the JSON report only.
void write_report_csv(const Report& report, std::ostream& out);
nlohmann::json report_json(const Report& report);

} // namespace daggp
