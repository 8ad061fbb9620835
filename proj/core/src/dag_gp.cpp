#include "daggp/dag_gp.hpp"

#include "daggp/error.hpp"
#include "daggp/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>

namespace daggp {

JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& k) {
    if (k.rows() != k.cols()) throw ArgumentError("Gram matrix is not square");
    if (k.rows() == 0) return {};
    const Eigen::MatrixXd sym = 0.5 * (k + k.transpose());
    for (double jitter : {0.0, 1e-8, 1e-6, 1e-4}) {
        Eigen::MatrixXd a = sym;
        a.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
    }
    const double min_ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues()[0];
    std::ostringstream os;
    os << "Gram matrix not positive definite after jitter 1e-4 (min eigenvalue " << min_ev << ")";
    throw NumericalError(os.str());
}

MultiTaskGP::MultiTaskGP(std::shared_ptr<const TaskPrior> prior, std::vector<TaskPoint> points, std::vector<double> y)
    : prior_(std::move(prior)), points_(std::move(points)), y_(std::move(y)) {
    if (!prior_) throw ArgumentError("model has no prior");
    if (points_.size() != y_.size()) throw ArgumentError("training points and targets differ in length");
    for (const auto& p : points_) prior_->check(p);
    if (points_.empty()) return;

    gram_ = prior_->gram(points_);
    Eigen::MatrixXd noisy = gram_;
    noisy.diagonal().array() += prior_->settings().noise_var;
    auto chol = jittered_cholesky(noisy);
    chol_ = std::move(chol.lower);
    jitter_ = chol.jitter;

    const Eigen::VectorXd resid =
        Eigen::Map<const Eigen::VectorXd>(y_.data(), static_cast<Eigen::Index>(y_.size())) - prior_->mean(points_);
    alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(
        chol_.triangularView<Eigen::Lower>().solve(resid));
}

Prediction MultiTaskGP::predict(const std::vector<TaskPoint>& query, bool full_cov) const {
    for (const auto& q : query) prior_->check(q);
    Prediction out;
    out.mean = prior_->mean(query);
    Eigen::MatrixXd prior_cov;
    if (full_cov)
        prior_cov = prior_->gram(query);
    out.variance = full_cov ? Eigen::VectorXd(prior_cov.diagonal()) : prior_->variance(query);

    if (!points_.empty()) {
        const Eigen::MatrixXd kqt = prior_->cross(query, points_);
        out.mean += kqt * alpha_;
        const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(kqt.transpose());
        out.variance -= v.colwise().squaredNorm().transpose();
        if (full_cov) prior_cov -= v.transpose() * v;
    }
    for (Eigen::Index i = 0; i < out.variance.size(); ++i) {
        double& var = out.variance[i];
        if (var < 0.0) {
            if (var < -kVarianceTolerance) {
                std::ostringstream os;
                os << "negative predictive variance " << var << " at query " << i;
                throw NumericalError(os.str());
            }
            var = 0.0;
        }
    }
    if (full_cov) {
        prior_cov.diagonal() = out.variance;
        out.cov = std::move(prior_cov);
    }
    return out;
}

MultiTaskGP MultiTaskGP::condition(const std::vector<TaskPoint>& points, const std::vector<double>& y) const {
    auto all_points = points_;
    auto all_y = y_;
    all_points.insert(all_points.end(), points.begin(), points.end());
    all_y.insert(all_y.end(), y.begin(), y.end());
    return MultiTaskGP(prior_, std::move(all_points), std::move(all_y));
}

MultiTaskGP fit_single_task(std::shared_ptr<const TaskPrior> prior, std::size_t task,
                            const std::vector<TaskPoint>& points, const std::vector<double>& y) {
    if (!prior) throw ArgumentError("model has no prior");
    if (shares_across_tasks(prior->variant()))
        throw ArgumentError("single-task fitting needs model 'gp' or 'gp_plus'");
    if (points.size() != y.size()) throw ArgumentError("training points and targets differ in length");
    std::vector<TaskPoint> own;
    std::vector<double> own_y;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].task == task) {
            own.push_back(points[i]);
            own_y.push_back(y[i]);
        }
    return MultiTaskGP(std::move(prior), std::move(own), std::move(own_y));
}

MonteCarloEstimate do_baseline(const FittedDAGDensity& density, const CausalGraph& graph, const VarSet& variables,
                               std::span<const double> x, std::size_t n_mc, std::uint64_t seed) {
    if (n_mc < 2) throw ArgumentError("n_mc must be at least 2");
    const IntegratingMeasure m = build_integrating_measure(density, graph, variables);
    const Eigen::MatrixXd base =
        m.base_points(x, m.sample(x, n_mc, derive_seed(seed, {stream_id("do-measure")})));
    const ConditionalGaussian& y = density.conditional(graph.output);

    Rng rng(derive_seed(seed, {stream_id("do-outcome")}));
    std::normal_distribution<double> normal(0.0, 1.0);
    double mean = 0.0, m2 = 0.0;
    for (Eigen::Index k = 0; k < base.rows(); ++k) {
        const Eigen::VectorXd row = base.row(k);
        const double v = y.mean(as_span(row)) + y.noise_sd * normal(rng);
        const double delta = v - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (v - mean);
    }
    const double var = m2 / static_cast<double>(n_mc - 1);
    return {mean, std::sqrt(var / static_cast<double>(n_mc)), n_mc};
}

double rmse(std::span<const double> predictions, std::span<const double> truth) {
    if (predictions.empty()) throw ArgumentError("rmse of an empty vector");
    if (predictions.size() != truth.size())
        throw ArgumentError("rmse inputs differ in length (" + std::to_string(predictions.size()) + " vs " +
                            std::to_string(truth.size()) + ")");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - truth[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(predictions.size()));
}

} // namespace daggp
