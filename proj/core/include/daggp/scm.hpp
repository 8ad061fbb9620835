#pragma once

#include "daggp/graph.hpp"
#include "daggp/rng.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace daggp {

enum class NoiseKind { Gaussian, Uniform };

/// Exogenous law. Gaussian: (mean, sd). Uniform: (lo, hi).
struct NoiseLaw {
    NoiseKind kind = NoiseKind::Gaussian;
    double first = 0.0;
    double second = 1.0;

    static NoiseLaw gaussian(double mean, double sd) { return {NoiseKind::Gaussian, mean, sd}; }
    static NoiseLaw uniform(double lo, double hi) { return {NoiseKind::Uniform, lo, hi}; }

    double draw(Rng& rng) const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    double width() const { return hi - lo; }
};

/// Structural equation v = fn(parents, noises). `inputs` lists the node's graph
/// parents in the order `fn` reads them; `noises` the exogenous terms it reads.
struct Equation {
    using Fn = std::function<double(std::span<const double>, std::span<const double>)>;

    std::vector<std::string> inputs;
    std::vector<std::string> noises;
    Fn fn;
    std::string description;
    std::optional<double> constant;

    static Equation fixed(double value);
};

/// do(X_s = x). `variables` and `values` are index-aligned.
struct InterventionAssignment {
    std::vector<std::string> variables;
    std::vector<double> values;

    static InterventionAssignment from_set(const VarSet& set, std::span<const double> x);
    std::optional<double> value_of(const std::string& name) const;
};

enum class DatasetKind { Observational, Interventional };

struct Dataset {
    std::vector<std::string> columns;
    Eigen::MatrixXd rows;
    DatasetKind kind = DatasetKind::Observational;
    std::optional<InterventionAssignment> assignment;

    std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
    /// Throws ArgumentError when absent.
    Eigen::Index column_index(const std::string& name) const;
    Eigen::VectorXd column(const std::string& name) const;
};

/// Structural causal model. Immutable once built; `apply_do` returns a new value.
class SCM {
public:
    SCM(std::string name,
        CausalGraph graph,
        std::map<std::string, Equation> equations,
        std::map<std::string, NoiseLaw> exogenous,
        std::map<Edge, std::string> shared_exogenous,
        std::map<std::string, Interval> domains);

    const std::string& name() const { return name_; }
    const CausalGraph& graph() const { return graph_; }
    const std::map<std::string, Equation>& equations() const { return equations_; }
    const std::map<std::string, NoiseLaw>& exogenous() const { return exogenous_; }
    const std::map<Edge, std::string>& shared_exogenous() const { return shared_; }
    const std::map<std::string, Interval>& domains() const { return domains_; }
    const std::vector<std::string>& order() const { return order_; }

    /// Throws DomainError for non-manipulable, duplicate or out-of-domain entries.
    void check_assignment(const InterventionAssignment& a) const;

    /// Draws one row into `out` (ordered as graph().nodes) using the scratch
    /// noise buffer. Every exogenous term is drawn in name order on every row.
    void draw_row(Rng& rng, std::span<double> out, std::vector<double>& noise_scratch) const;

    nlohmann::json manifest() const;

private:
    std::string name_;
    CausalGraph graph_;
    std::map<std::string, Equation> equations_;
    std::map<std::string, NoiseLaw> exogenous_;
    std::map<Edge, std::string> shared_;
    std::map<std::string, Interval> domains_;

    // resolved evaluation plan
    std::vector<std::string> order_;
    std::vector<std::size_t> order_index_;
    std::vector<std::vector<std::size_t>> input_index_;
    std::vector<std::vector<std::size_t>> noise_index_;
    std::vector<NoiseLaw> noise_laws_;
};

/// Graph mutilation: intervened nodes get constant equations and lose their
/// incoming edges and confounder pairs.
SCM apply_do(const SCM& scm, const InterventionAssignment& a);

/// n ancestral draws; bit-identical for identical (scm, n, seed).
Dataset sample(const SCM& scm, std::size_t n, std::uint64_t seed);

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
};

/// E[Y | do(a)] by sampling the mutilated SCM.
MonteCarloEstimate true_intervention_function(const SCM& scm,
                                              const InterventionAssignment& a,
                                              std::size_t n_mc,
                                              std::uint64_t seed);

struct BuiltinOptions {
    /// Standard deviation of every additive Gaussian equation noise whose scale
    /// the builtin model leaves unstated (dag1, dag2).
    double noise_sd = 1.0;
    /// Per-noise-term overrides, keyed by noise name (e.g. "eps_Z").
    std::map<std::string, double> noise_sd_overrides;
};

/// "dag1", "dag2" or "dag3". Throws ArgumentError for other names.
SCM builtin_scm(const std::string& name, const BuiltinOptions& options = {});
std::vector<std::string> builtin_names();

} // namespace daggp
