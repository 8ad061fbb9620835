#pragma once

#include "daggp/graph.hpp"

#include <json.hpp>

#include <vector>

namespace daggp {

/// Every non-empty subset of the manipulable variables, ordered by size then
/// lexicographically.
std::vector<VarSet> intervention_sets(const CausalGraph& graph);

/// intervention_sets() without the sets whose function coincides with a smaller
/// one: a set strictly containing Pa(Y) has t_s = t_{Pa(Y)}.
std::vector<VarSet> distinct_intervention_sets(const CausalGraph& graph);

/// Base set of the graph.
///   outcome_parents:            Pa(Y)
///   confounded:                 variables sharing a hidden cause with Y
///   confounded_non_colliders:   members of `confounded` not causally influenced
///                               by both a manipulable variable and Y
struct BaseSets {
    VarSet outcome_parents;
    VarSet confounded;
    VarSet confounded_non_colliders;

    /// Input layout of the base function: parents, then non-collider confounders.
    std::vector<std::string> layout() const;
    std::size_t dimension() const { return outcome_parents.size() + confounded_non_colliders.size(); }
};

BaseSets base_sets(const CausalGraph& graph);

/// Per-intervention-set split of the base set.
struct SetPartition {
    VarSet intervention_set;
    VarSet unintervened_parents;       // Pa(Y) \ X_s
    VarSet intervened_confounders;     // C_N intersected with X_s
    VarSet unintervened_confounders;   // C_N \ X_s
    VarSet intervened_parents;         // Pa(Y) intersected with X_s
};

SetPartition partition_for_set(const BaseSets& base, const VarSet& intervention_set);

struct TransferReport {
    bool exists = true;
    VarSet blocking_nodes;
    std::vector<VarSet> transferable_sets;
};

/// A shared base function fails to exist iff some confounded node has both an
/// unconfounded incoming and an unconfounded outgoing directed edge.
TransferReport base_function_exists(const CausalGraph& graph);

/// Intervention sets admitting partial transfer: drops every set that contains
/// a blocking node or a direct cause of one.
std::vector<VarSet> transferable_subset(const CausalGraph& graph);

nlohmann::json to_json(const TransferReport& report);
nlohmann::json to_json(const BaseSets& base);

/// d-separation over a causal graph whose confounder pairs are expanded into
/// explicit latent parents. Edge surgery is applied before the test.
class DSeparation {
public:
    explicit DSeparation(const CausalGraph& graph);

    /// Removes directed edges into `nodes`, including latent ones.
    DSeparation& cut_incoming(const VarSet& nodes);
    /// Removes directed edges out of `nodes`.
    DSeparation& cut_outgoing(const VarSet& nodes);

    bool separated(const VarSet& xs, const VarSet& ys, const VarSet& given) const;

    /// Ancestors (reflexive) of a set in the current, possibly cut, graph.
    VarSet ancestors_of(const VarSet& nodes) const;

private:
    std::vector<std::string> nodes_;
    std::vector<Edge> edges_;
};

} // namespace daggp
