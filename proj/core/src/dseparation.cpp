#include "daggp/analysis.hpp"

#include "daggp/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace daggp {

DSeparation::DSeparation(const CausalGraph& graph) : nodes_(graph.nodes), edges_(graph.directed_edges) {
    for (const auto& [a, b] : graph.confounder_pairs) {
        std::string latent = "__U(" + a + "," + b + ")";
        nodes_.push_back(latent);
        edges_.emplace_back(latent, a);
        edges_.emplace_back(latent, b);
    }
}

DSeparation& DSeparation::cut_incoming(const VarSet& nodes) {
    std::erase_if(edges_, [&](const Edge& e) { return contains(nodes, e.second); });
    return *this;
}

DSeparation& DSeparation::cut_outgoing(const VarSet& nodes) {
    std::erase_if(edges_, [&](const Edge& e) { return contains(nodes, e.first); });
    return *this;
}

VarSet DSeparation::ancestors_of(const VarSet& start) const {
    std::set<std::string> found(start.begin(), start.end());
    std::vector<std::string> stack(start.begin(), start.end());
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        for (const auto& [from, to] : edges_) {
            if (to == cur && found.insert(from).second) stack.push_back(from);
        }
    }
    return VarSet(found.begin(), found.end());
}

// Moralized ancestral graph: xs and ys are d-separated by `given` iff they are
// disconnected in the moral graph of An(xs, ys, given) after deleting `given`.
bool DSeparation::separated(const VarSet& xs, const VarSet& ys, const VarSet& given) const {
    for (const auto* set : {&xs, &ys, &given})
        for (const auto& n : *set)
            if (std::find(nodes_.begin(), nodes_.end(), n) == nodes_.end())
                throw ArgumentError("d-separation query on unknown node '" + n + "'");
    if (!set_intersection(xs, ys).empty()) return false;

    VarSet relevant = ancestors_of(set_union(set_union(xs, ys), given));
    std::map<std::string, std::set<std::string>> adj;
    std::map<std::string, std::vector<std::string>> parents;
    for (const auto& [from, to] : edges_) {
        if (!contains(relevant, from) || !contains(relevant, to)) continue;
        adj[from].insert(to);
        adj[to].insert(from);
        parents[to].push_back(from);
    }
    for (const auto& [child, ps] : parents) {
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                adj[ps[i]].insert(ps[j]);
                adj[ps[j]].insert(ps[i]);
            }
    }

    std::set<std::string> seen;
    std::vector<std::string> stack;
    for (const auto& x : xs) {
        if (contains(given, x)) continue;
        stack.push_back(x);
        seen.insert(x);
    }
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        if (contains(ys, cur)) return false;
        for (const auto& nb : adj[cur]) {
            if (contains(given, nb) || seen.count(nb)) continue;
            seen.insert(nb);
            stack.push_back(nb);
        }
    }
    return true;
}

} // namespace daggp
