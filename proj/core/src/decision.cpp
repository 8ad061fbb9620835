#include "daggp/decision.hpp"

#include "daggp/dataset_io.hpp"
#include "daggp/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace daggp {

namespace {

constexpr double kVarianceFloor = 1e-300;

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return out;
}

// var(x | D \ (A u {x})) = 1 / (M^-1)_xx - noise_var for M = cov_R + noise_var I
// over R = D \ A, evaluated for every member of R at once.
Eigen::VectorXd leave_one_in_variances(const Eigen::MatrixXd& cov, double noise_var,
                                       const std::vector<std::size_t>& rest) {
    Eigen::MatrixXd m = submatrix(cov, rest, rest);
    m.diagonal().array() += noise_var;
    const auto chol = jittered_cholesky(m);
    const Eigen::MatrixXd linv = chol.lower.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    const Eigen::VectorXd inv_diag = linv.colwise().squaredNorm().transpose();
    Eigen::VectorXd out(inv_diag.size());
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out[i] = std::max(1.0 / inv_diag[i] - noise_var - chol.jitter, kVarianceFloor);
    return out;
}

void check_cov(const Eigen::MatrixXd& cov, double noise_var) {
    if (cov.rows() != cov.cols()) throw ArgumentError("grid covariance is not square");
    if (!(noise_var >= 0.0)) throw ArgumentError("noise variance must be nonnegative");
}

} // namespace

std::size_t GridResolution::per_axis(std::size_t dimension) const {
    switch (dimension) {
    case 1: return one_d;
    case 2: return two_d;
    case 3: return three_d;
    default: return higher;
    }
}

CandidateGrid make_grid(const std::vector<Task>& tasks, const GridResolution& resolution) {
    CandidateGrid grid;
    for (std::size_t s = 0; s < tasks.size(); ++s) {
        const Task& t = tasks[s];
        const std::size_t n = resolution.per_axis(t.dimension());
        if (n == 0 || t.dimension() == 0) throw ArgumentError("empty grid for task " + t.name());
        grid.offsets.push_back(grid.points.size());
        const std::size_t d = t.dimension();
        std::vector<std::size_t> idx(d, 0);
        auto axis_value = [&](std::size_t axis, std::size_t i) {
            const Interval& iv = t.domain[axis];
            if (n == 1) return 0.5 * (iv.lo + iv.hi);
            if (i + 1 == n) return iv.hi;
            return iv.lo + iv.width() * static_cast<double>(i) / static_cast<double>(n - 1);
        };
        while (true) {
            TaskPoint p{s, std::vector<double>(d)};
            for (std::size_t a = 0; a < d; ++a) p.x[a] = axis_value(a, idx[a]);
            grid.points.push_back(std::move(p));
            std::size_t a = d;
            while (a > 0 && ++idx[a - 1] == n) idx[--a] = 0;
            if (a == 0) break;
        }
    }
    return grid;
}

Eigen::VectorXd conditional_variances(const Eigen::MatrixXd& cov, double noise_var,
                                      const std::vector<std::size_t>& conditioned) {
    check_cov(cov, noise_var);
    Eigen::VectorXd var = cov.diagonal();
    if (conditioned.empty()) return var;
    std::vector<std::size_t> all(static_cast<std::size_t>(cov.rows()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Eigen::MatrixXd kaa = submatrix(cov, conditioned, conditioned);
    kaa.diagonal().array() += noise_var;
    const auto chol = jittered_cholesky(kaa);
    const Eigen::MatrixXd v = chol.lower.triangularView<Eigen::Lower>().solve(submatrix(cov, conditioned, all));
    var -= v.colwise().squaredNorm().transpose();
    return var.cwiseMax(kVarianceFloor);
}

double mi_gain(const Eigen::MatrixXd& cov, double noise_var, std::size_t candidate,
               const std::vector<std::size_t>& selected) {
    check_cov(cov, noise_var);
    const auto n = static_cast<std::size_t>(cov.rows());
    if (candidate >= n) throw ArgumentError("candidate index out of range");
    if (std::find(selected.begin(), selected.end(), candidate) != selected.end()) {
        // x duplicated in A: its variance given A sits at the noise floor.
        const double given_a = conditional_variances(cov, noise_var, selected)[static_cast<Eigen::Index>(candidate)];
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < n; ++i)
            if (i != candidate && std::find(selected.begin(), selected.end(), i) == selected.end()) rest.push_back(i);
        const double given_rest = conditional_variances(cov, noise_var, rest)[static_cast<Eigen::Index>(candidate)];
        return 0.5 * std::log(given_a) - 0.5 * std::log(given_rest);
    }
    const double given_a = conditional_variances(cov, noise_var, selected)[static_cast<Eigen::Index>(candidate)];
    std::vector<std::size_t> rest;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::find(selected.begin(), selected.end(), i) == selected.end()) {
            if (i == candidate) pos = rest.size();
            rest.push_back(i);
        }
    const double given_rest = leave_one_in_variances(cov, noise_var, rest)[static_cast<Eigen::Index>(pos)];
    return 0.5 * std::log(given_a) - 0.5 * std::log(given_rest);
}

DesignTrace al_greedy_mi(const MultiTaskGP& model, const CandidateGrid& grid, std::size_t budget) {
    if (budget > grid.size())
        throw ArgumentError("budget " + std::to_string(budget) + " exceeds the grid size " + std::to_string(grid.size()));
    DesignTrace trace;
    if (budget == 0) return trace;
    const Prediction pred = model.predict(grid.points, true);
    const double noise = model.prior().settings().noise_var;
    const auto n = grid.size();
    std::vector<std::size_t> selected;
    std::vector<bool> taken(n, false);
    for (std::size_t step = 0; step < budget; ++step) {
        const Eigen::VectorXd given_a = conditional_variances(pred.cov, noise, selected);
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < n; ++i)
            if (!taken[i]) rest.push_back(i);
        const Eigen::VectorXd given_rest = leave_one_in_variances(pred.cov, noise, rest);
        std::size_t best = rest.front();
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rest.size(); ++r) {
            const std::size_t i = rest[r];
            const double gain = 0.5 * std::log(given_a[static_cast<Eigen::Index>(i)]) -
                                0.5 * std::log(given_rest[static_cast<Eigen::Index>(r)]);
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        taken[best] = true;
        selected.push_back(best);
        trace.steps.push_back({grid.points[best], best, best_gain, std::nullopt, std::nullopt});
    }
    return trace;
}

double expected_improvement(double mean, double sd, double best, bool minimize) {
    if (!(sd >= 0.0)) throw ArgumentError("expected improvement needs sd >= 0");
    const double improvement = minimize ? best - mean : mean - best;
    if (sd == 0.0) return std::max(improvement, 0.0);
    const double u = improvement / sd;
    const double cdf = 0.5 * std::erfc(-u / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    return std::max(improvement * cdf + sd * pdf, 0.0);
}

BoChoice bo_step(const MultiTaskGP& model, const CandidateGrid& grid, bool minimize) {
    if (grid.size() == 0) throw ArgumentError("empty candidate grid");
    const Prediction pred = model.predict(grid.points);
    double incumbent;
    const auto& y = model.targets();
    if (!y.empty())
        incumbent = minimize ? *std::min_element(y.begin(), y.end()) : *std::max_element(y.begin(), y.end());
    else
        incumbent = minimize ? pred.mean.minCoeff() : pred.mean.maxCoeff();
    BoChoice choice;
    choice.incumbent = incumbent;
    choice.acquisition = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto I = static_cast<Eigen::Index>(i);
        const double ei = expected_improvement(pred.mean[I], std::sqrt(pred.variance[I]), incumbent, minimize);
        if (ei > choice.acquisition) {
            choice.acquisition = ei;
            choice.grid_index = i;
        }
    }
    choice.point = grid.points[choice.grid_index];
    return choice;
}

void write_trace_csv(const DesignTrace& trace, const std::vector<Task>& tasks, std::ostream& out) {
    std::size_t width = 0;
    for (const auto& t : tasks) width = std::max(width, t.dimension());
    out << "step,task";
    for (std::size_t i = 1; i <= width; ++i) out << ",x" << i;
    out << ",acquisition,y,running_metric\n";
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const Selection& sel = trace.steps[s];
        out << s + 1 << ',' << tasks.at(sel.point.task).name();
        for (std::size_t i = 0; i < width; ++i) {
            out << ',';
            if (i < sel.point.x.size()) out << format_double(sel.point.x[i]);
        }
        out << ',' << format_double(sel.acquisition) << ',';
        if (sel.y) out << format_double(*sel.y);
        out << ',';
        if (sel.metric) out << format_double(*sel.metric);
        out << '\n';
    }
}

} // namespace daggp
