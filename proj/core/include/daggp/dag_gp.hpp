#pragma once

#include "daggp/causal_prior.hpp"
#include "daggp/density.hpp"
#include "daggp/scm.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace daggp {

enum class ModelVariant { DagGpPlus, DagGp, GpPlus, Gp, Do };

std::string to_string(ModelVariant v);
/// Throws ArgumentError for unknown names.
ModelVariant parse_variant(const std::string& name);
bool is_gp_variant(ModelVariant v);
bool uses_causal_prior(ModelVariant v);
bool shares_across_tasks(ModelVariant v);

/// One intervention function t_s with its domain D(X_s).
struct Task {
    VarSet variables;
    std::vector<Interval> domain;   // aligned with variables

    std::size_t dimension() const { return variables.size(); }
    /// Members joined by '+', e.g. "D+E".
    std::string name() const;
};

/// Tasks for every distinct transferable intervention set of `graph`.
std::vector<Task> default_tasks(const CausalGraph& graph, const std::map<std::string, Interval>& domains);
Task make_task(const VarSet& variables, const std::map<std::string, Interval>& domains);

struct TaskPoint {
    std::size_t task = 0;
    std::vector<double> x;

    auto operator<=>(const TaskPoint&) const = default;
};

struct GpSettings {
    std::size_t mc_samples = 1000;   // samples for the prior mean integral
    std::size_t cov_samples = 100;   // per-point samples entering covariance double sums
    double noise_var = 1e-3;
    RbfParams rbf;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
};

/// Monte Carlo representation of one task point under its integrating measure.
struct PointSummary {
    double mean = 0.0;          // (1/S) sum_k m(b_k)
    double sd_mean = 0.0;       // average sd_hat over the covariance samples
    Eigen::MatrixXd base;       // covariance samples as base points, one per row
};

/// Joint prior over all tasks. Base-function prior: causal (plus variants) or
/// zero mean with an RBF kernel; tasks are linked through their integrating
/// measures (DAG-GP variants) or kept independent (single-task variants).
///
/// Each task point owns a sample set seeded from (seed, task, x), so
/// covariances are inner products of empirical kernel embeddings: the Gram
/// matrix is exactly symmetric and PSD, and point-mass tasks reduce to the
/// base prior with no Monte Carlo error.
class TaskPrior {
public:
    TaskPrior(ModelVariant variant, std::vector<Task> tasks, std::optional<FittedDAGDensity> density,
              std::vector<IntegratingMeasure> measures, GpSettings settings);

    ModelVariant variant() const { return variant_; }
    const std::vector<Task>& tasks() const { return tasks_; }
    const GpSettings& settings() const { return settings_; }
    const std::optional<FittedDAGDensity>& density() const { return density_; }
    const CausalPrior* causal_prior() const { return causal_.get(); }
    const IntegratingMeasure& measure(std::size_t task) const;

    /// Throws ArgumentError on a bad task index or dimension, DomainError
    /// outside D(X_s).
    void check(const TaskPoint& p) const;

    const PointSummary& summary(const TaskPoint& p) const;
    double mean(const TaskPoint& p) const;
    double cov(const TaskPoint& p, const TaskPoint& q) const;

    Eigen::VectorXd mean(const std::vector<TaskPoint>& points) const;
    /// Symmetric by construction (upper triangle mirrored).
    Eigen::MatrixXd gram(const std::vector<TaskPoint>& points) const;
    Eigen::MatrixXd cross(const std::vector<TaskPoint>& rows, const std::vector<TaskPoint>& cols) const;
    Eigen::VectorXd variance(const std::vector<TaskPoint>& points) const;

    /// Precomputes summaries in parallel.
    void warm(const std::vector<TaskPoint>& points) const;

private:
    PointSummary compute_summary(const TaskPoint& p) const;

    ModelVariant variant_;
    std::vector<Task> tasks_;
    std::optional<FittedDAGDensity> density_;
    std::vector<IntegratingMeasure> measures_;
    GpSettings settings_;
    std::shared_ptr<const CausalPrior> causal_;

    struct Cache {
        std::mutex mutex;
        std::map<TaskPoint, std::unique_ptr<PointSummary>> entries;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Builds the measures of every task (TransferError for non-transferable
/// sets) and the prior of `variant`. `density` is ignored by ModelVariant::Gp.
std::shared_ptr<const TaskPrior> make_task_prior(ModelVariant variant, const std::vector<Task>& tasks,
                                                 const std::optional<FittedDAGDensity>& density,
                                                 const GpSettings& settings);

/// Cholesky factor of a Gram matrix with the jitter ladder 0, 1e-8, 1e-6, 1e-4.
struct JitteredCholesky {
    Eigen::MatrixXd lower;
    double jitter = 0.0;
};
/// Throws NumericalError with the minimum eigenvalue when the ladder is exhausted.
JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& k);

/// Negative variances above this are rounding and clamp to 0.
inline constexpr double kVarianceTolerance = 1e-8;

struct Prediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
    Eigen::MatrixXd cov;   // filled on request only
    Eigen::VectorXd sd() const { return variance.cwiseSqrt(); }
};

/// GP conditioned on noisy interventional observations y = t_s(x) + eps,
/// eps ~ N(0, noise_var).
class MultiTaskGP {
public:
    explicit MultiTaskGP(std::shared_ptr<const TaskPrior> prior, std::vector<TaskPoint> points = {},
                         std::vector<double> y = {});

    const TaskPrior& prior() const { return *prior_; }
    std::shared_ptr<const TaskPrior> prior_ptr() const { return prior_; }
    const std::vector<TaskPoint>& points() const { return points_; }
    const std::vector<double>& targets() const { return y_; }
    const Eigen::MatrixXd& gram() const { return gram_; }
    double jitter() const { return jitter_; }

    Prediction predict(const std::vector<TaskPoint>& query, bool full_cov = false) const;

    /// Same prior, extra observations appended.
    MultiTaskGP condition(const std::vector<TaskPoint>& points, const std::vector<double>& y) const;

private:
    std::shared_ptr<const TaskPrior> prior_;
    std::vector<TaskPoint> points_;
    std::vector<double> y_;
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

/// Single-task model for one task of a Gp or GpPlus prior using only the
/// observations made on that task.
MultiTaskGP fit_single_task(std::shared_ptr<const TaskPrior> prior, std::size_t task,
                            const std::vector<TaskPoint>& points, const std::vector<double>& y);

/// Pure do-calculus estimate of t_s(x) from the fitted observational density.
MonteCarloEstimate do_baseline(const FittedDAGDensity& density, const CausalGraph& graph,
                               const VarSet& variables, std::span<const double> x, std::size_t n_mc,
                               std::uint64_t seed);

/// Throws ArgumentError for empty or mismatched inputs.
double rmse(std::span<const double> predictions, std::span<const double> truth);

} // namespace daggp
