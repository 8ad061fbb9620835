#pragma once

#include "daggp/analysis.hpp"
#include "daggp/graph.hpp"
#include "daggp/scm.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace daggp {

/// Fitted residual sds below this are clamped so samplers stay defined.
inline constexpr double kMinNoiseSd = 1e-8;

/// Posterior mean of a constant-mean GP regression with an isotropic RBF
/// kernel on standardized inputs.
struct GpMean {
    Eigen::VectorXd center;
    Eigen::VectorXd scale;
    Eigen::MatrixXd inputs;   // standardized training inputs, one row each
    Eigen::VectorXd alpha;    // (K + noise I)^-1 (y - constant)
    double constant = 0.0;
    double lengthscale = 1.0;
    double signal_var = 1.0;

    double eval(std::span<const double> values) const;

    nlohmann::json to_json() const;
    static GpMean from_json(const nlohmann::json& j);
};

/// target | conditioners ~ N(mean(conditioners), noise_sd^2). The mean is
/// intercept + weights . conditioners unless `gp` is set; weights and
/// intercept always hold the affine least-squares fit.
struct ConditionalGaussian {
    std::string target;
    std::vector<std::string> conditioners;
    Eigen::VectorXd weights;
    double intercept = 0.0;
    double noise_sd = 0.0;
    std::size_t fitted_rows = 0;
    std::shared_ptr<const GpMean> gp;

    double mean(std::span<const double> values) const;

    nlohmann::json to_json() const;
    static ConditionalGaussian from_json(const nlohmann::json& j);
};

/// Maximum-likelihood affine fit; noise_sd is the residual sd (divide by n).
/// Throws DegeneracyError naming collinear columns, ArgumentError for fewer
/// than |conditioners| + 2 rows.
ConditionalGaussian fit_conditional_gaussian(const Dataset& data,
                                             const std::string& target,
                                             const std::vector<std::string>& conditioners);

/// Gaussian conditional with a GP regression mean. The constant, signal and
/// noise variances are profiled and the lengthscale and noise ratio picked by
/// maximum marginal likelihood over a fixed grid. The GP sees at most the first
/// 1000 rows; the affine part uses all of them. Root nodes fall back to the
/// marginal Gaussian. Errors as fit_conditional_gaussian.
ConditionalGaussian fit_gp_conditional(const Dataset& data, const std::string& target,
                                       const std::vector<std::string>& conditioners);

/// Mean and covariance over a list of named variables.
struct GaussianJoint {
    std::vector<std::string> names;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    GaussianJoint select(const std::vector<std::string>& subset) const;
};

/// Fitted densities keyed by node. Non-output nodes condition on their graph
/// parents; the output conditions on the base-set layout (Pa(Y), then the
/// non-collider confounders) so its fitted mean is the base-function estimate.
class FittedDAGDensity {
public:
    FittedDAGDensity(CausalGraph graph, std::map<std::string, ConditionalGaussian> conditionals);

    const CausalGraph& graph() const { return graph_; }
    const BaseSets& base() const { return base_; }
    const ConditionalGaussian& conditional(const std::string& node) const;
    const std::map<std::string, ConditionalGaussian>& conditionals() const { return conditionals_; }

    /// Joint of the non-output nodes under the fitted linear-Gaussian system
    /// (the affine parts of the conditionals).
    GaussianJoint observational_joint() const;

    nlohmann::json to_json() const;
    static FittedDAGDensity from_json(const CausalGraph& graph, const nlohmann::json& j);

private:
    CausalGraph graph_;
    BaseSets base_;
    std::map<std::string, ConditionalGaussian> conditionals_;
};

using ConditionalFitter = std::function<ConditionalGaussian(
    const Dataset&, const std::string&, const std::vector<std::string>&)>;

/// Fits every node of `graph` from observational data. `fitter` replaces the
/// affine least-squares family when given.
FittedDAGDensity fit_dag_density(const Dataset& data, const CausalGraph& graph,
                                 const ConditionalFitter& fitter = {});

enum class ConditionalFamily { Affine, Gp };
std::string to_string(ConditionalFamily f);
/// "affine" or "gp"; ArgumentError otherwise.
ConditionalFamily parse_conditional_family(const std::string& name);
/// Empty (the affine default) for Affine.
ConditionalFitter conditional_fitter(ConditionalFamily family);

/// Conditional Gaussian law of `targets` given `given`, parameterised as
/// targets = offset + gain * given + chol * z.
struct ConfounderFactor {
    std::vector<std::string> targets;
    std::vector<std::string> given;
    Eigen::VectorXd offset;
    Eigen::MatrixXd gain;
    Eigen::MatrixXd chol;
};

/// Integrating measure of one intervention set: a do-free factor for the
/// intervened confounders given the remaining ones, times the law of the
/// unintervened parents and confounders under do(X_s = x), composed from the
/// fitted conditionals of the mutilated graph.
class IntegratingMeasure {
public:
    IntegratingMeasure(const FittedDAGDensity& density, const VarSet& intervention_set);

    const SetPartition& partition() const { return partition_; }
    const VarSet& intervention_set() const { return partition_.intervention_set; }
    const ConfounderFactor& confounder_factor() const { return factor_a_; }

    /// Sample columns: unintervened parents (lexicographic), then all
    /// non-collider confounders (lexicographic).
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t dimension() const { return columns_.size(); }
    bool is_point_mass() const { return columns_.empty() || pinned_.has_value(); }

    /// n x dimension() matrix; deterministic in seed. `x` is ordered like
    /// intervention_set().
    Eigen::MatrixXd sample(std::span<const double> x, std::size_t n, std::uint64_t seed) const;

    /// Expands samples to full base points in BaseSets::layout() order.
    Eigen::MatrixXd base_points(std::span<const double> x, const Eigen::MatrixXd& samples) const;

    /// Point-mass copy located at `row` (one value per column).
    IntegratingMeasure pinned(std::span<const double> row) const;

private:
    struct Step {
        std::size_t slot = 0;
        bool clamped = false;
        std::size_t x_index = 0;
        const ConditionalGaussian* conditional = nullptr;
        std::vector<std::size_t> parent_slots;
    };

    SetPartition partition_;
    std::vector<std::string> layout_;
    std::vector<std::string> columns_;
    ConfounderFactor factor_a_;
    std::vector<Step> steps_;
    std::size_t slot_count_ = 0;
    std::vector<std::size_t> column_slot_;       // slot feeding each column, or npos for factor_a
    std::vector<std::size_t> factor_a_column_;   // column index of each factor_a target
    std::vector<std::size_t> factor_a_given_;    // column index of each factor_a conditioning value
    std::vector<std::size_t> layout_from_x_;     // per layout entry: x index or npos
    std::vector<std::size_t> layout_from_col_;   // per layout entry: column index or npos
    std::optional<Eigen::VectorXd> pinned_;
    std::shared_ptr<const FittedDAGDensity> density_;
};

/// Throws TransferError when `intervention_set` is outside transferable_subset(graph).
IntegratingMeasure build_integrating_measure(const FittedDAGDensity& density,
                                             const CausalGraph& graph,
                                             const VarSet& intervention_set);

/// sample() as a free function.
Eigen::MatrixXd sample_measure(const IntegratingMeasure& measure, std::span<const double> x,
                               std::size_t n, std::uint64_t seed);

} // namespace daggp
