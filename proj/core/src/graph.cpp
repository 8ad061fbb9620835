#include "daggp/graph.hpp"

#include "daggp/error.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace daggp {

VarSet make_set(std::vector<std::string> names) {
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

bool contains(const VarSet& set, const std::string& name) {
    return std::binary_search(set.begin(), set.end(), name);
}

bool is_subset(const VarSet& sub, const VarSet& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

VarSet set_union(const VarSet& a, const VarSet& b) {
    VarSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VarSet set_intersection(const VarSet& a, const VarSet& b) {
    VarSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VarSet set_difference(const VarSet& a, const VarSet& b) {
    VarSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::string format_set(const VarSet& set) {
    std::string out = "{";
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (i) out += ",";
        out += set[i];
    }
    return out + "}";
}

void CausalGraph::validate() const {
    std::set<std::string> seen;
    for (const auto& n : nodes) {
        if (n.empty()) throw StructuralError("empty node name");
        if (!seen.insert(n).second) throw StructuralError("duplicate node '" + n + "'");
    }
    auto require = [&](const std::string& n, const char* what) {
        if (!seen.count(n)) {
            throw StructuralError(std::string(what) + " references unknown node '" + n + "'");
        }
    };
    for (const auto& [from, to] : directed_edges) {
        require(from, "edge");
        require(to, "edge");
        if (from == to) throw StructuralError("self loop on '" + from + "'");
    }
    for (const auto& [a, b] : confounder_pairs) {
        require(a, "confounder pair");
        require(b, "confounder pair");
        if (a == b) throw StructuralError("confounder pair on a single node '" + a + "'");
    }
    if (!output.empty()) require(output, "output");
    for (const auto& m : manipulable) require(m, "manipulable set");
    for (const auto& m : non_manipulable) require(m, "non-manipulable set");
    if (!set_intersection(manipulable, non_manipulable).empty()) {
        throw StructuralError("variables flagged both manipulable and non-manipulable: " +
                              format_set(set_intersection(manipulable, non_manipulable)));
    }
    if (!output.empty() && contains(manipulable, output)) {
        throw StructuralError("output '" + output + "' cannot be manipulable");
    }
    (void)topological_order(*this);
}

bool CausalGraph::has_node(const std::string& name) const {
    return std::find(nodes.begin(), nodes.end(), name) != nodes.end();
}

bool CausalGraph::has_edge(const std::string& from, const std::string& to) const {
    return std::find(directed_edges.begin(), directed_edges.end(), Edge{from, to}) !=
           directed_edges.end();
}

bool CausalGraph::confounded(const std::string& a, const std::string& b) const {
    Edge key = a < b ? Edge{a, b} : Edge{b, a};
    return std::find(confounder_pairs.begin(), confounder_pairs.end(), key) !=
           confounder_pairs.end();
}

VarSet CausalGraph::parents(const std::string& node) const {
    std::vector<std::string> out;
    for (const auto& [from, to] : directed_edges)
        if (to == node) out.push_back(from);
    return make_set(std::move(out));
}

VarSet CausalGraph::children(const std::string& node) const {
    std::vector<std::string> out;
    for (const auto& [from, to] : directed_edges)
        if (from == node) out.push_back(to);
    return make_set(std::move(out));
}

VarSet CausalGraph::descendants(const std::string& node) const {
    std::set<std::string> found;
    std::vector<std::string> stack{node};
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        for (const auto& [from, to] : directed_edges) {
            if (from == cur && found.insert(to).second) stack.push_back(to);
        }
    }
    return VarSet(found.begin(), found.end());
}

VarSet CausalGraph::ancestors(const std::string& node) const {
    std::set<std::string> found;
    std::vector<std::string> stack{node};
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        for (const auto& [from, to] : directed_edges) {
            if (to == cur && found.insert(from).second) stack.push_back(from);
        }
    }
    return VarSet(found.begin(), found.end());
}

VarSet CausalGraph::confounded_with(const std::string& node) const {
    std::vector<std::string> out;
    for (const auto& [a, b] : confounder_pairs) {
        if (a == node) out.push_back(b);
        if (b == node) out.push_back(a);
    }
    return make_set(std::move(out));
}

CausalGraph CausalGraph::without_incoming(const VarSet& targets) const {
    CausalGraph g = *this;
    std::erase_if(g.directed_edges, [&](const Edge& e) { return contains(targets, e.second); });
    std::erase_if(g.confounder_pairs, [&](const Edge& e) {
        return contains(targets, e.first) || contains(targets, e.second);
    });
    return g;
}

CausalGraph CausalGraph::with_edge(const std::string& from, const std::string& to) const {
    CausalGraph g = *this;
    if (!g.has_node(from)) {
        g.nodes.push_back(from);
        g.manipulable = set_union(g.manipulable, VarSet{from});
    }
    if (!g.has_edge(from, to)) g.directed_edges.emplace_back(from, to);
    return g;
}

std::vector<std::string> topological_order(const CausalGraph& graph) {
    std::map<std::string, std::size_t> in_degree;
    for (const auto& n : graph.nodes) in_degree[n] = 0;
    for (const auto& [from, to] : graph.directed_edges) {
        if (!in_degree.count(from) || !in_degree.count(to)) {
            throw StructuralError("edge " + from + "->" + to + " references an unknown node");
        }
        ++in_degree[to];
    }

    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [n, d] : in_degree)
        if (d == 0) ready.push(n);

    std::vector<std::string> order;
    order.reserve(graph.nodes.size());
    while (!ready.empty()) {
        std::string cur = ready.top();
        ready.pop();
        order.push_back(cur);
        for (const auto& [from, to] : graph.directed_edges) {
            if (from == cur && --in_degree[to] == 0) ready.push(to);
        }
    }

    if (order.size() != graph.nodes.size()) {
        // every leftover node has a leftover parent; walk parents until one repeats
        std::set<std::string> placed(order.begin(), order.end());
        std::string cur;
        for (const auto& [n, d] : in_degree)
            if (!placed.count(n)) { cur = n; break; }
        std::map<std::string, std::string> next_parent;
        std::set<std::string> visited;
        while (visited.insert(cur).second) {
            for (const auto& [from, to] : graph.directed_edges) {
                if (to == cur && !placed.count(from)) {
                    next_parent[cur] = from;
                    cur = from;
                    break;
                }
            }
        }
        std::ostringstream msg;
        msg << "cycle detected through edge " << next_parent[cur] << "->" << cur;
        throw StructuralError(msg.str());
    }
    return order;
}

} // namespace daggp
