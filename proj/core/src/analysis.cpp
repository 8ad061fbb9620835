#include "daggp/analysis.hpp"

#include "daggp/error.hpp"

#include <algorithm>

namespace daggp {

std::vector<VarSet> intervention_sets(const CausalGraph& graph) {
    const VarSet& xs = graph.manipulable;
    if (xs.size() > 20) throw ArgumentError("too many manipulable variables to enumerate the power set");
    std::vector<VarSet> out;
    const std::size_t n = xs.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        VarSet s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) s.push_back(xs[i]);
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const VarSet& a, const VarSet& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

std::vector<VarSet> distinct_intervention_sets(const CausalGraph& graph) {
    const VarSet parents = graph.parents(graph.output);
    std::vector<VarSet> out;
    for (auto& s : intervention_sets(graph)) {
        bool redundant = !parents.empty() && s.size() > parents.size() && is_subset(parents, s);
        if (!redundant) out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> BaseSets::layout() const {
    std::vector<std::string> out = outcome_parents;
    out.insert(out.end(), confounded_non_colliders.begin(), confounded_non_colliders.end());
    return out;
}

BaseSets base_sets(const CausalGraph& graph) {
    if (graph.output.empty()) throw ArgumentError("graph has no designated output");
    BaseSets b;
    b.outcome_parents = graph.parents(graph.output);
    b.confounded = graph.confounded_with(graph.output);

    const VarSet y_desc = graph.descendants(graph.output);
    VarSet x_desc;
    for (const auto& x : graph.manipulable) x_desc = set_union(x_desc, graph.descendants(x));
    for (const auto& c : b.confounded) {
        const bool collider = contains(y_desc, c) && contains(x_desc, c);
        if (!collider) b.confounded_non_colliders.push_back(c);
    }
    return b;
}

SetPartition partition_for_set(const BaseSets& base, const VarSet& intervention_set) {
    SetPartition p;
    p.intervention_set = intervention_set;
    p.intervened_parents = set_intersection(base.outcome_parents, intervention_set);
    p.unintervened_parents = set_difference(base.outcome_parents, p.intervened_parents);
    p.intervened_confounders = set_intersection(base.confounded_non_colliders, intervention_set);
    p.unintervened_confounders = set_difference(base.confounded_non_colliders, p.intervened_confounders);
    return p;
}

namespace {

VarSet blocking_nodes(const CausalGraph& graph) {
    VarSet out;
    for (const auto& c : graph.confounded_with(graph.output)) {
        bool unconfounded_in = false, unconfounded_out = false;
        for (const auto& p : graph.parents(c))
            if (!graph.confounded(p, c)) unconfounded_in = true;
        for (const auto& ch : graph.children(c))
            if (!graph.confounded(c, ch)) unconfounded_out = true;
        if (unconfounded_in && unconfounded_out) out.push_back(c);
    }
    return out;
}

} // namespace

std::vector<VarSet> transferable_subset(const CausalGraph& graph) {
    const VarSet blocking = blocking_nodes(graph);
    auto sets = intervention_sets(graph);
    if (blocking.empty()) return sets;

    VarSet excluded = blocking;
    for (const auto& c : blocking) excluded = set_union(excluded, graph.parents(c));
    std::erase_if(sets, [&](const VarSet& s) { return !set_intersection(s, excluded).empty(); });
    return sets;
}

TransferReport base_function_exists(const CausalGraph& graph) {
    TransferReport r;
    r.blocking_nodes = blocking_nodes(graph);
    r.exists = r.blocking_nodes.empty();
    r.transferable_sets = transferable_subset(graph);
    return r;
}

nlohmann::json to_json(const TransferReport& report) {
    nlohmann::json j;
    j["exists"] = report.exists;
    j["blocking_nodes"] = report.blocking_nodes;
    j["transferable_sets"] = report.transferable_sets;
    return j;
}

nlohmann::json to_json(const BaseSets& base) {
    return {{"outcome_parents", base.outcome_parents},
            {"confounded", base.confounded},
            {"confounded_non_colliders", base.confounded_non_colliders}};
}

} // namespace daggp
