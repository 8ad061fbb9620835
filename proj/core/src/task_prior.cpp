#include "daggp/dag_gp.hpp"

#include "daggp/error.hpp"
#include "daggp/parallel.hpp"
#include "daggp/rng.hpp"

#include <algorithm>
#include <cmath>

namespace daggp {

std::string to_string(ModelVariant v) {
    switch (v) {
    case ModelVariant::DagGpPlus: return "dag_gp_plus";
    case ModelVariant::DagGp: return "dag_gp";
    case ModelVariant::GpPlus: return "gp_plus";
    case ModelVariant::Gp: return "gp";
    case ModelVariant::Do: return "do";
    }
    return "unknown";
}

ModelVariant parse_variant(const std::string& name) {
    for (auto v : {ModelVariant::DagGpPlus, ModelVariant::DagGp, ModelVariant::GpPlus, ModelVariant::Gp, ModelVariant::Do})
        if (to_string(v) == name) return v;
    throw ArgumentError("unknown model variant '" + name + "'");
}

bool is_gp_variant(ModelVariant v) { return v != ModelVariant::Do; }
bool uses_causal_prior(ModelVariant v) { return v == ModelVariant::DagGpPlus || v == ModelVariant::GpPlus; }
bool shares_across_tasks(ModelVariant v) { return v == ModelVariant::DagGpPlus || v == ModelVariant::DagGp; }

std::string Task::name() const {
    std::string out;
    for (const auto& v : variables) out += (out.empty() ? "" : "+") + v;
    return out;
}

Task make_task(const VarSet& variables, const std::map<std::string, Interval>& domains) {
    Task t;
    t.variables = make_set(variables);
    for (const auto& v : t.variables) {
        auto it = domains.find(v);
        if (it == domains.end()) throw DomainError("variable " + v + " has no intervention domain");
        t.domain.push_back(it->second);
    }
    return t;
}

std::vector<Task> default_tasks(const CausalGraph& graph, const std::map<std::string, Interval>& domains) {
    const auto transferable = transferable_subset(graph);
    std::vector<Task> out;
    for (const auto& s : distinct_intervention_sets(graph))
        if (std::find(transferable.begin(), transferable.end(), s) != transferable.end())
            out.push_back(make_task(s, domains));
    return out;
}

TaskPrior::TaskPrior(ModelVariant variant, std::vector<Task> tasks, std::optional<FittedDAGDensity> density,
                     std::vector<IntegratingMeasure> measures, GpSettings settings)
    : variant_(variant), tasks_(std::move(tasks)), density_(std::move(density)), measures_(std::move(measures)),
      settings_(settings) {
    if (!is_gp_variant(variant_)) throw ArgumentError("model 'do' has no Gaussian process prior");
    if (tasks_.empty()) throw ArgumentError("a task prior needs at least one task");
    if (settings_.mc_samples < 1 || settings_.cov_samples < 1) throw ArgumentError("MC budgets must be positive");
    if (!(settings_.noise_var >= 0.0)) throw ArgumentError("noise variance must be nonnegative");
    if (variant_ != ModelVariant::Gp) {
        if (!density_) throw ArgumentError("model '" + to_string(variant_) + "' needs a fitted density");
        if (measures_.size() != tasks_.size()) throw ArgumentError("one integrating measure per task is required");
        for (std::size_t s = 0; s < tasks_.size(); ++s)
            if (measures_[s].intervention_set() != tasks_[s].variables)
                throw ArgumentError("measure " + format_set(measures_[s].intervention_set()) +
                                    " does not match task " + tasks_[s].name());
        if (uses_causal_prior(variant_))
            causal_ = std::make_shared<const CausalPrior>(*density_, std::max<std::size_t>(settings_.mc_samples, 2),
                                                          derive_seed(settings_.seed, {stream_id("causal-prior")}),
                                                          settings_.rbf);
    }
}

const IntegratingMeasure& TaskPrior::measure(std::size_t task) const {
    if (task >= measures_.size()) throw ArgumentError("task has no integrating measure");
    return measures_[task];
}

void TaskPrior::check(const TaskPoint& p) const {
    if (p.task >= tasks_.size()) throw ArgumentError("task index " + std::to_string(p.task) + " out of range");
    const Task& t = tasks_[p.task];
    if (p.x.size() != t.dimension())
        throw ArgumentError("task " + t.name() + " expects " + std::to_string(t.dimension()) + " values, got " +
                            std::to_string(p.x.size()));
    for (std::size_t i = 0; i < p.x.size(); ++i)
        if (!(t.domain[i].contains(p.x[i])))
            throw DomainError("value " + std::to_string(p.x[i]) + " for " + t.variables[i] + " outside [" +
                              std::to_string(t.domain[i].lo) + ", " + std::to_string(t.domain[i].hi) + "]");
}

PointSummary TaskPrior::compute_summary(const TaskPoint& p) const {
    const IntegratingMeasure& m = measures_[p.task];
    const std::size_t n = m.is_point_mass() ? 1 : settings_.mc_samples;
    const std::uint64_t seed =
        derive_seed(settings_.seed, {stream_id("task-point"), stream_id(tasks_[p.task].name()), hash_values(p.x)});
    const Eigen::MatrixXd base = m.base_points(p.x, m.sample(p.x, n, seed));
    const Eigen::Index n_cov = std::min<Eigen::Index>(base.rows(), static_cast<Eigen::Index>(settings_.cov_samples));

    PointSummary s;
    s.base = base.topRows(n_cov);
    if (causal_) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < base.rows(); ++k) {
            const Eigen::VectorXd row = base.row(k);
            acc += causal_->mean(as_span(row));
        }
        s.mean = acc / static_cast<double>(base.rows());
        double sd_acc = 0.0;
        for (Eigen::Index k = 0; k < n_cov; ++k) {
            const Eigen::VectorXd row = base.row(k);
            sd_acc += causal_->sd(as_span(row));
        }
        s.sd_mean = sd_acc / static_cast<double>(n_cov);
    }
    return s;
}

const PointSummary& TaskPrior::summary(const TaskPoint& p) const {
    check(p);
    if (variant_ == ModelVariant::Gp) throw ArgumentError("model 'gp' has no integrating measures");
    {
        std::lock_guard lock(cache_->mutex);
        auto it = cache_->entries.find(p);
        if (it != cache_->entries.end()) return *it->second;
    }
    auto s = std::make_unique<PointSummary>(compute_summary(p));
    std::lock_guard lock(cache_->mutex);
    auto [it, inserted] = cache_->entries.emplace(p, std::move(s));
    return *it->second;
}

void TaskPrior::warm(const std::vector<TaskPoint>& points) const {
    if (variant_ == ModelVariant::Gp) return;
    parallel_for(points.size(), [&](std::size_t i) { summary(points[i]); }, settings_.workers);
}

double TaskPrior::mean(const TaskPoint& p) const {
    if (variant_ == ModelVariant::Gp) {
        check(p);
        return 0.0;
    }
    return summary(p).mean;
}

double TaskPrior::cov(const TaskPoint& p, const TaskPoint& q) const {
    if (variant_ == ModelVariant::Gp) {
        check(p);
        check(q);
        return p.task == q.task ? rbf(p.x, q.x, settings_.rbf) : 0.0;
    }
    if (!shares_across_tasks(variant_) && p.task != q.task) {
        check(p);
        check(q);
        return 0.0;
    }
    const PointSummary& a = summary(p);
    const PointSummary& b = summary(q);
    const Eigen::Index d = a.base.cols();
    const double inv_two_l2 = 1.0 / (2.0 * settings_.rbf.lengthscale * settings_.rbf.lengthscale);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < a.base.rows(); ++k) {
        for (Eigen::Index m = 0; m < b.base.rows(); ++m) {
            double d2 = 0.0;
            for (Eigen::Index j = 0; j < d; ++j) {
                const double diff = a.base(k, j) - b.base(m, j);
                d2 += diff * diff;
            }
            acc += std::exp(-d2 * inv_two_l2);
        }
    }
    const double k_rbf = settings_.rbf.variance * acc / static_cast<double>(a.base.rows() * b.base.rows());
    return k_rbf + a.sd_mean * b.sd_mean;
}

Eigen::VectorXd TaskPrior::mean(const std::vector<TaskPoint>& points) const {
    warm(points);
    Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) out[static_cast<Eigen::Index>(i)] = mean(points[i]);
    return out;
}

Eigen::MatrixXd TaskPrior::gram(const std::vector<TaskPoint>& points) const {
    warm(points);
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd k(n, n);
    parallel_for(points.size(), [&](std::size_t i) {
        for (std::size_t j = i; j < points.size(); ++j) {
            const double v = cov(points[i], points[j]);
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }, settings_.workers);
    return k;
}

Eigen::MatrixXd TaskPrior::cross(const std::vector<TaskPoint>& rows, const std::vector<TaskPoint>& cols) const {
    warm(rows);
    warm(cols);
    Eigen::MatrixXd k(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    parallel_for(rows.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < cols.size(); ++j)
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov(rows[i], cols[j]);
    }, settings_.workers);
    return k;
}

Eigen::VectorXd TaskPrior::variance(const std::vector<TaskPoint>& points) const {
    warm(points);
    Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
    parallel_for(points.size(), [&](std::size_t i) {
        out[static_cast<Eigen::Index>(i)] = cov(points[i], points[i]);
    }, settings_.workers);
    return out;
}

std::shared_ptr<const TaskPrior> make_task_prior(ModelVariant variant, const std::vector<Task>& tasks,
                                                 const std::optional<FittedDAGDensity>& density,
                                                 const GpSettings& settings) {
    std::vector<IntegratingMeasure> measures;
    if (variant != ModelVariant::Gp) {
        if (!density) throw ArgumentError("model '" + to_string(variant) + "' needs a fitted density");
        for (const auto& t : tasks)
            measures.push_back(build_integrating_measure(*density, density->graph(), t.variables));
    }
    return std::make_shared<const TaskPrior>(variant, tasks, variant == ModelVariant::Gp ? std::nullopt : density,
                                             std::move(measures), settings);
}

} // namespace daggp
