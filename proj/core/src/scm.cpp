#include "daggp/scm.hpp"

#include "daggp/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace daggp {

double NoiseLaw::draw(Rng& rng) const {
    if (kind == NoiseKind::Uniform) {
        return std::uniform_real_distribution<double>(first, second)(rng);
    }
    return first + second * std::normal_distribution<double>(0.0, 1.0)(rng);
}

Equation Equation::fixed(double value) {
    Equation eq;
    eq.constant = value;
    eq.description = "constant " + std::to_string(value);
    return eq;
}

InterventionAssignment InterventionAssignment::from_set(const VarSet& set, std::span<const double> x) {
    if (set.size() != x.size()) {
        throw ArgumentError("intervention set " + format_set(set) + " expects " +
                            std::to_string(set.size()) + " values, got " + std::to_string(x.size()));
    }
    return {set, std::vector<double>(x.begin(), x.end())};
}

std::optional<double> InterventionAssignment::value_of(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i] == name) return values[i];
    return std::nullopt;
}

Eigen::Index Dataset::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ArgumentError("dataset has no column '" + name + "'");
    return static_cast<Eigen::Index>(it - columns.begin());
}

Eigen::VectorXd Dataset::column(const std::string& name) const {
    return rows.col(column_index(name));
}

SCM::SCM(std::string name,
         CausalGraph graph,
         std::map<std::string, Equation> equations,
         std::map<std::string, NoiseLaw> exogenous,
         std::map<Edge, std::string> shared_exogenous,
         std::map<std::string, Interval> domains)
    : name_(std::move(name)),
      graph_(std::move(graph)),
      equations_(std::move(equations)),
      exogenous_(std::move(exogenous)),
      shared_(std::move(shared_exogenous)),
      domains_(std::move(domains)) {
    graph_.validate();
    order_ = topological_order(graph_);

    std::map<std::string, std::size_t> node_pos;
    for (std::size_t i = 0; i < graph_.nodes.size(); ++i) node_pos[graph_.nodes[i]] = i;
    std::map<std::string, std::size_t> noise_pos;
    for (const auto& [n, law] : exogenous_) {
        noise_pos[n] = noise_laws_.size();
        noise_laws_.push_back(law);
    }

    for (const auto& node : order_) {
        auto it = equations_.find(node);
        if (it == equations_.end()) throw StructuralError("no structural equation for '" + node + "'");
        const Equation& eq = it->second;
        order_index_.push_back(node_pos.at(node));
        std::vector<std::size_t> ins, noises;
        if (!eq.constant) {
            if (!eq.fn) throw StructuralError("equation for '" + node + "' has no function");
            if (make_set(eq.inputs) != graph_.parents(node)) {
                throw StructuralError("equation for '" + node + "' reads " + format_set(make_set(eq.inputs)) +
                                      " but its graph parents are " + format_set(graph_.parents(node)));
            }
            for (const auto& p : eq.inputs) ins.push_back(node_pos.at(p));
            for (const auto& u : eq.noises) {
                auto nit = noise_pos.find(u);
                if (nit == noise_pos.end()) {
                    throw StructuralError("equation for '" + node + "' reads unknown noise '" + u + "'");
                }
                noises.push_back(nit->second);
            }
        }
        input_index_.push_back(std::move(ins));
        noise_index_.push_back(std::move(noises));
    }

    for (const auto& [pair, noise] : shared_) {
        if (!noise_pos.count(noise)) {
            throw StructuralError("shared exogenous term '" + noise + "' has no law");
        }
        if (!graph_.has_node(pair.first) || !graph_.has_node(pair.second)) {
            throw StructuralError("shared exogenous term '" + noise + "' references unknown nodes");
        }
    }
}

void SCM::check_assignment(const InterventionAssignment& a) const {
    if (a.variables.size() != a.values.size()) {
        throw ArgumentError("intervention variables and values differ in length");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < a.variables.size(); ++i) {
        const auto& v = a.variables[i];
        if (!seen.insert(v).second) throw DomainError("variable '" + v + "' intervened twice");
        if (v == graph_.output) throw DomainError("cannot intervene on the output '" + v + "'");
        if (!contains(graph_.manipulable, v)) throw DomainError("variable '" + v + "' is not manipulable");
        auto d = domains_.find(v);
        if (d != domains_.end() && !d->second.contains(a.values[i])) {
            throw DomainError("value " + std::to_string(a.values[i]) + " for '" + v +
                              "' is outside its interventional domain");
        }
    }
}

void SCM::draw_row(Rng& rng, std::span<double> out, std::vector<double>& noise) const {
    noise.resize(noise_laws_.size());
    std::normal_distribution<double> std_normal(0.0, 1.0);
    for (std::size_t k = 0; k < noise_laws_.size(); ++k) {
        const NoiseLaw& law = noise_laws_[k];
        if (law.kind == NoiseKind::Gaussian) {
            noise[k] = law.first + law.second * std_normal(rng);
        } else {
            noise[k] = std::uniform_real_distribution<double>(law.first, law.second)(rng);
        }
    }

    double in_buf[16];
    double noise_buf[16];
    for (std::size_t k = 0; k < order_.size(); ++k) {
        const Equation& eq = equations_.find(order_[k])->second;
        double& slot = out[order_index_[k]];
        if (eq.constant) {
            slot = *eq.constant;
            continue;
        }
        const auto& ins = input_index_[k];
        const auto& ns = noise_index_[k];
        std::vector<double> in_heap, noise_heap;
        double* in_ptr = in_buf;
        double* noise_ptr = noise_buf;
        if (ins.size() > 16) { in_heap.resize(ins.size()); in_ptr = in_heap.data(); }
        if (ns.size() > 16) { noise_heap.resize(ns.size()); noise_ptr = noise_heap.data(); }
        for (std::size_t j = 0; j < ins.size(); ++j) in_ptr[j] = out[ins[j]];
        for (std::size_t j = 0; j < ns.size(); ++j) noise_ptr[j] = noise[ns[j]];
        slot = eq.fn(std::span<const double>(in_ptr, ins.size()),
                     std::span<const double>(noise_ptr, ns.size()));
    }
}

nlohmann::json SCM::manifest() const {
    nlohmann::json j;
    j["name"] = name_;
    j["nodes"] = graph_.nodes;
    j["output"] = graph_.output;
    j["manipulable"] = graph_.manipulable;
    j["non_manipulable"] = graph_.non_manipulable;
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& [from, to] : graph_.directed_edges) edges.push_back({from, to});
    auto& conf = j["confounder_pairs"] = nlohmann::json::array();
    for (const auto& [a, b] : graph_.confounder_pairs) conf.push_back({a, b});
    auto& doms = j["domains"] = nlohmann::json::object();
    for (const auto& [v, d] : domains_) doms[v] = {d.lo, d.hi};
    auto& noises = j["noise"] = nlohmann::json::object();
    for (const auto& [n, law] : exogenous_) {
        if (law.kind == NoiseKind::Gaussian) {
            noises[n] = {{"kind", "gaussian"}, {"mean", law.first}, {"sd", law.second}};
        } else {
            noises[n] = {{"kind", "uniform"}, {"lo", law.first}, {"hi", law.second}};
        }
    }
    auto& shared = j["shared_exogenous"] = nlohmann::json::array();
    for (const auto& [pair, n] : shared_) shared.push_back({{"pair", {pair.first, pair.second}}, {"noise", n}});
    auto& eqs = j["equations"] = nlohmann::json::object();
    for (const auto& [v, eq] : equations_) eqs[v] = eq.description;
    return j;
}

SCM apply_do(const SCM& scm, const InterventionAssignment& a) {
    scm.check_assignment(a);
    VarSet targets = make_set(a.variables);
    CausalGraph g = scm.graph().without_incoming(targets);
    auto equations = scm.equations();
    for (std::size_t i = 0; i < a.variables.size(); ++i) {
        equations[a.variables[i]] = Equation::fixed(a.values[i]);
    }
    return SCM(scm.name() + "|do" + format_set(targets), std::move(g), std::move(equations),
               scm.exogenous(), scm.shared_exogenous(), scm.domains());
}

Dataset sample(const SCM& scm, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ArgumentError("sample size must be at least 1");
    Dataset data;
    data.columns = scm.graph().nodes;
    const auto width = static_cast<Eigen::Index>(data.columns.size());
    // row-major scratch so draw_row can fill a contiguous span
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(static_cast<Eigen::Index>(n), width);
    Rng rng(seed);
    std::vector<double> noise;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        scm.draw_row(rng, std::span<double>(rows.row(i).data(), static_cast<std::size_t>(width)), noise);
    }
    data.rows = rows;
    return data;
}

MonteCarloEstimate true_intervention_function(const SCM& scm,
                                              const InterventionAssignment& a,
                                              std::size_t n_mc,
                                              std::uint64_t seed) {
    if (n_mc == 0) throw ArgumentError("n_mc must be at least 1");
    SCM mutilated = apply_do(scm, a);
    const auto& nodes = mutilated.graph().nodes;
    const auto y_pos = static_cast<std::size_t>(
        std::find(nodes.begin(), nodes.end(), mutilated.graph().output) - nodes.begin());
    std::vector<double> row(nodes.size());
    std::vector<double> noise;
    Rng rng(seed);
    // Welford
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n_mc; ++i) {
        mutilated.draw_row(rng, row, noise);
        const double y = row[y_pos];
        const double delta = y - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (y - mean);
    }
    MonteCarloEstimate est;
    est.mean = mean;
    est.samples = n_mc;
    est.standard_error = n_mc > 1 ? std::sqrt(m2 / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc)) : 0.0;
    return est;
}

} // namespace daggp
