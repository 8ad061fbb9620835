#pragma once

#include "daggp/dag_gp.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <vector>

namespace daggp {

/// Points per axis of a task grid, by task dimension.
struct GridResolution {
    std::size_t one_d = 50;
    std::size_t two_d = 15;
    std::size_t three_d = 7;
    std::size_t higher = 4;

    std::size_t per_axis(std::size_t dimension) const;
};

/// Union of uniform per-task grids, ordered by task index then
/// lexicographically in x. `offsets[s]` is the first index of task s.
struct CandidateGrid {
    std::vector<TaskPoint> points;
    std::vector<std::size_t> offsets;

    std::size_t size() const { return points.size(); }
};

CandidateGrid make_grid(const std::vector<Task>& tasks, const GridResolution& resolution);

/// Variance of each grid point after conditioning on noisy observations at
/// `conditioned` (indices into the covariance).
Eigen::VectorXd conditional_variances(const Eigen::MatrixXd& cov, double noise_var,
                                      const std::vector<std::size_t>& conditioned);

/// Entropy reduction 1/2 log var(x | A) - 1/2 log var(x | D \ (A u {x})) with
/// kernel-only conditioning on `cov`, the model covariance over the grid D.
double mi_gain(const Eigen::MatrixXd& cov, double noise_var, std::size_t candidate,
               const std::vector<std::size_t>& selected);

struct Selection {
    TaskPoint point;
    std::size_t grid_index = 0;
    double acquisition = 0.0;
    std::optional<double> y;
    std::optional<double> metric;
};

struct DesignTrace {
    std::vector<Selection> steps;
};

/// Greedy mutual-information design of `budget` grid points under `model`.
/// Ties go to the earliest grid point. Throws ArgumentError when budget > |D|.
DesignTrace al_greedy_mi(const MultiTaskGP& model, const CandidateGrid& grid, std::size_t budget);

/// Expected improvement over `best`; sd = 0 gives max(best - mean, 0) when minimizing.
double expected_improvement(double mean, double sd, double best, bool minimize = true);

struct BoChoice {
    std::size_t grid_index = 0;
    TaskPoint point;
    double acquisition = 0.0;
    double incumbent = 0.0;
};

/// argmax of EI over every grid point. The incumbent is the best observed
/// target of `model`, or the best prior mean over the grid without data.
BoChoice bo_step(const MultiTaskGP& model, const CandidateGrid& grid, bool minimize = true);

/// Columns: step,task,x1..xD,acquisition,y,running_metric (D = widest task).
void write_trace_csv(const DesignTrace& trace, const std::vector<Task>& tasks, std::ostream& out);

} // namespace daggp
