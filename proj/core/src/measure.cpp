#include "daggp/density.hpp"

#include "daggp/error.hpp"
#include "daggp/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <random>

namespace daggp {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::size_t position(const std::vector<std::string>& v, const std::string& s) {
    auto it = std::find(v.begin(), v.end(), s);
    return it == v.end() ? npos : static_cast<std::size_t>(it - v.begin());
}

// Square root of a PSD matrix that tolerates exact singularity.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
    if (cov.size() == 0) return cov;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal();
}

ConfounderFactor make_factor_a(const FittedDAGDensity& density, const SetPartition& p) {
    ConfounderFactor f;
    f.targets = p.intervened_confounders;
    f.given = p.unintervened_confounders;
    const auto nt = static_cast<Eigen::Index>(f.targets.size());
    const auto ng = static_cast<Eigen::Index>(f.given.size());
    f.offset = Eigen::VectorXd::Zero(nt);
    f.gain = Eigen::MatrixXd::Zero(nt, ng);
    f.chol = Eigen::MatrixXd::Zero(nt, nt);
    if (nt == 0) return f;

    std::vector<std::string> names = f.targets;
    names.insert(names.end(), f.given.begin(), f.given.end());
    const GaussianJoint j = density.observational_joint().select(names);
    const Eigen::VectorXd mt = j.mean.head(nt);
    const Eigen::MatrixXd Stt = j.cov.topLeftCorner(nt, nt);
    Eigen::MatrixXd cond = Stt;
    if (ng > 0) {
        const Eigen::VectorXd mg = j.mean.tail(ng);
        const Eigen::MatrixXd Stg = j.cov.topRightCorner(nt, ng);
        const Eigen::MatrixXd Sgg = j.cov.bottomRightCorner(ng, ng);
        f.gain = Sgg.ldlt().solve(Stg.transpose()).transpose();
        f.offset = mt - f.gain * mg;
        cond = Stt - f.gain * Stg.transpose();
    } else {
        f.offset = mt;
    }
    cond = 0.5 * (cond + cond.transpose());
    f.chol = psd_factor(cond);
    return f;
}

} // namespace

IntegratingMeasure::IntegratingMeasure(const FittedDAGDensity& density, const VarSet& intervention_set)
    : density_(std::make_shared<const FittedDAGDensity>(density)) {
    const CausalGraph& graph = density_->graph();
    const BaseSets& base = density_->base();
    for (const auto& v : intervention_set)
        if (!graph.has_node(v)) throw ArgumentError("intervention variable " + v + " is not in the graph");
    partition_ = partition_for_set(base, make_set(intervention_set));
    layout_ = base.layout();

    columns_ = partition_.unintervened_parents;
    columns_.insert(columns_.end(), base.confounded_non_colliders.begin(), base.confounded_non_colliders.end());

    factor_a_ = make_factor_a(*density_, partition_);

    // Ancestral composition over the graph mutilated by do(X_s).
    const VarSet& xs = partition_.intervention_set;
    const CausalGraph mutilated = graph.without_incoming(xs);
    const VarSet drawn = set_union(partition_.unintervened_parents, partition_.unintervened_confounders);
    VarSet needed = drawn;
    for (const auto& v : drawn) needed = set_union(needed, mutilated.ancestors(v));

    std::vector<std::string> slots;
    for (const auto& v : topological_order(mutilated)) {
        if (!contains(needed, v)) continue;
        if (v == graph.output) throw TransferError("integrating measure would need the output " + v);
        Step step;
        step.slot = slots.size();
        slots.push_back(v);
        if (contains(xs, v)) {
            step.clamped = true;
            step.x_index = position(xs, v);
        } else {
            step.conditional = &density_->conditional(v);
            for (const auto& p : step.conditional->conditioners) {
                const std::size_t s = position(slots, p);
                if (s == npos) throw ArgumentError("conditional for " + v + " reads " + p + " outside the mutilated ancestry");
                step.parent_slots.push_back(s);
            }
        }
        steps_.push_back(std::move(step));
    }
    slot_count_ = slots.size();

    for (const auto& c : columns_)
        column_slot_.push_back(contains(factor_a_.targets, c) ? npos : position(slots, c));
    for (const auto& t : factor_a_.targets) factor_a_column_.push_back(position(columns_, t));
    for (const auto& g : factor_a_.given) factor_a_given_.push_back(position(columns_, g));

    for (const auto& v : layout_) {
        if (contains(partition_.intervened_parents, v)) {
            layout_from_x_.push_back(position(xs, v));
            layout_from_col_.push_back(npos);
        } else {
            layout_from_x_.push_back(npos);
            layout_from_col_.push_back(position(columns_, v));
        }
    }
}

Eigen::MatrixXd IntegratingMeasure::sample(std::span<const double> x, std::size_t n, std::uint64_t seed) const {
    if (x.size() != partition_.intervention_set.size())
        throw ArgumentError("intervention value has " + std::to_string(x.size()) + " entries, expected " +
                            std::to_string(partition_.intervention_set.size()));
    const auto d = static_cast<Eigen::Index>(columns_.size());
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
    if (pinned_) {
        for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) = pinned_->transpose();
        return out;
    }
    if (d == 0) return out;

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> work(slot_count_);
    std::vector<double> parents;
    const auto nt = static_cast<Eigen::Index>(factor_a_.targets.size());
    const auto ng = static_cast<Eigen::Index>(factor_a_.given.size());
    Eigen::VectorXd z(nt), g(ng);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (const auto& step : steps_) {
            if (step.clamped) {
                work[step.slot] = x[step.x_index];
                continue;
            }
            parents.resize(step.parent_slots.size());
            for (std::size_t i = 0; i < parents.size(); ++i) parents[i] = work[step.parent_slots[i]];
            work[step.slot] = step.conditional->mean(parents) + step.conditional->noise_sd * normal(rng);
        }
        for (Eigen::Index c = 0; c < d; ++c) {
            const std::size_t s = column_slot_[static_cast<std::size_t>(c)];
            if (s != npos) out(r, c) = work[s];
        }
        if (nt > 0) {
            for (Eigen::Index i = 0; i < ng; ++i) g[i] = out(r, static_cast<Eigen::Index>(factor_a_given_[static_cast<std::size_t>(i)]));
            for (Eigen::Index i = 0; i < nt; ++i) z[i] = normal(rng);
            const Eigen::VectorXd t = factor_a_.offset + factor_a_.gain * g + factor_a_.chol * z;
            for (Eigen::Index i = 0; i < nt; ++i)
                out(r, static_cast<Eigen::Index>(factor_a_column_[static_cast<std::size_t>(i)])) = t[i];
        }
    }
    return out;
}

Eigen::MatrixXd IntegratingMeasure::base_points(std::span<const double> x, const Eigen::MatrixXd& samples) const {
    if (samples.cols() != static_cast<Eigen::Index>(columns_.size()))
        throw ArgumentError("sample matrix has the wrong number of columns");
    const auto m = static_cast<Eigen::Index>(layout_.size());
    Eigen::MatrixXd out(samples.rows(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const std::size_t xi = layout_from_x_[static_cast<std::size_t>(j)];
        if (xi != npos)
            out.col(j).setConstant(x[xi]);
        else
            out.col(j) = samples.col(static_cast<Eigen::Index>(layout_from_col_[static_cast<std::size_t>(j)]));
    }
    return out;
}

IntegratingMeasure IntegratingMeasure::pinned(std::span<const double> row) const {
    if (row.size() != columns_.size()) throw ArgumentError("pinned location has the wrong dimension");
    IntegratingMeasure copy = *this;
    copy.pinned_ = Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
    return copy;
}

IntegratingMeasure build_integrating_measure(const FittedDAGDensity& density, const CausalGraph& graph,
                                             const VarSet& intervention_set) {
    const VarSet s = make_set(intervention_set);
    const auto allowed = transferable_subset(graph);
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end())
        throw TransferError("intervention set " + format_set(s) + " does not admit a shared base function");
    return IntegratingMeasure(density, s);
}

Eigen::MatrixXd sample_measure(const IntegratingMeasure& measure, std::span<const double> x, std::size_t n,
                               std::uint64_t seed) {
    return measure.sample(x, n, seed);
}

} // namespace daggp
