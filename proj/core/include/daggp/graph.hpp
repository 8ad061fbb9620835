#pragma once

#include <string>
#include <utility>
#include <vector>

namespace daggp {

/// Sorted, duplicate-free list of variable names. All set-valued results in
/// the library use this representation so iteration order is lexicographic.
using VarSet = std::vector<std::string>;

VarSet make_set(std::vector<std::string> names);
bool contains(const VarSet& set, const std::string& name);
bool is_subset(const VarSet& sub, const VarSet& super);
VarSet set_union(const VarSet& a, const VarSet& b);
VarSet set_intersection(const VarSet& a, const VarSet& b);
VarSet set_difference(const VarSet& a, const VarSet& b);
std::string format_set(const VarSet& set);

using Edge = std::pair<std::string, std::string>;

/// DAG over named variables. Dashed (confounded) edges are stored as
/// unordered pairs with `first < second`.
struct CausalGraph {
    std::vector<std::string> nodes;
    std::vector<Edge> directed_edges;
    std::vector<Edge> confounder_pairs;
    std::string output;
    VarSet manipulable;
    VarSet non_manipulable;

    /// Throws StructuralError on dangling references, cycles, self loops,
    /// overlapping manipulable/non-manipulable flags or a manipulable output.
    void validate() const;

    bool has_node(const std::string& name) const;
    bool has_edge(const std::string& from, const std::string& to) const;
    bool confounded(const std::string& a, const std::string& b) const;

    VarSet parents(const std::string& node) const;
    VarSet children(const std::string& node) const;
    /// Nodes reachable by directed paths of length >= 1.
    VarSet descendants(const std::string& node) const;
    VarSet ancestors(const std::string& node) const;
    /// Nodes sharing a confounder pair with `node`.
    VarSet confounded_with(const std::string& node) const;

    /// Copy with every directed edge into a member of `targets` removed, and
    /// every confounder pair touching `targets` cut.
    CausalGraph without_incoming(const VarSet& targets) const;

    /// Copy with an extra directed edge; `from` is added as a manipulable node
    /// when it does not exist yet.
    CausalGraph with_edge(const std::string& from, const std::string& to) const;
};

/// Deterministic topological order: Kahn's algorithm with ties broken by name.
/// Throws StructuralError naming an edge on a cycle.
std::vector<std::string> topological_order(const CausalGraph& graph);

} // namespace daggp
