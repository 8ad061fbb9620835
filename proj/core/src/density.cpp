#include "daggp/density.hpp"

#include "daggp/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace daggp {

namespace {

constexpr double kRankThreshold = 1e-9;

} // namespace

double ConditionalGaussian::mean(std::span<const double> values) const {
    if (values.size() != static_cast<std::size_t>(weights.size()))
        throw ArgumentError("conditional for " + target + " expects " + std::to_string(weights.size()) +
                            " inputs, got " + std::to_string(values.size()));
    if (gp) return gp->eval(values);
    double m = intercept;
    for (std::size_t i = 0; i < values.size(); ++i) m += weights[static_cast<Eigen::Index>(i)] * values[i];
    return m;
}

nlohmann::json ConditionalGaussian::to_json() const {
    nlohmann::json j;
    j["target"] = target;
    j["conditioners"] = conditioners;
    j["weights"] = std::vector<double>(weights.data(), weights.data() + weights.size());
    j["intercept"] = intercept;
    j["noise_sd"] = noise_sd;
    j["fitted_rows"] = fitted_rows;
    if (gp) j["gp"] = gp->to_json();
    return j;
}

ConditionalGaussian ConditionalGaussian::from_json(const nlohmann::json& j) {
    ConditionalGaussian c;
    c.target = j.at("target").get<std::string>();
    c.conditioners = j.at("conditioners").get<std::vector<std::string>>();
    const auto w = j.at("weights").get<std::vector<double>>();
    if (w.size() != c.conditioners.size())
        throw ArgumentError("conditional for " + c.target + ": weight count does not match conditioners");
    c.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    c.intercept = j.at("intercept").get<double>();
    c.noise_sd = j.at("noise_sd").get<double>();
    c.fitted_rows = j.value("fitted_rows", std::size_t{0});
    if (j.contains("gp")) {
        c.gp = std::make_shared<const GpMean>(GpMean::from_json(j.at("gp")));
        if (static_cast<std::size_t>(c.gp->center.size()) != c.conditioners.size())
            throw ArgumentError("conditional for " + c.target + ": GP input count does not match conditioners");
    }
    return c;
}

ConditionalGaussian fit_conditional_gaussian(const Dataset& data, const std::string& target,
                                             const std::vector<std::string>& conditioners) {
    const std::size_t n = data.size();
    const std::size_t k = conditioners.size();
    if (n < k + 2)
        throw ArgumentError("fitting " + target + " on " + std::to_string(k) + " conditioners needs at least " +
                            std::to_string(k + 2) + " rows, got " + std::to_string(n));

    const Eigen::VectorXd y = data.column(target);
    const double y_mean = y.mean();

    ConditionalGaussian c;
    c.target = target;
    c.conditioners = conditioners;
    c.fitted_rows = n;
    c.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));

    if (k == 0) {
        c.intercept = y_mean;
        c.noise_sd = std::max(std::sqrt((y.array() - y_mean).square().mean()), kMinNoiseSd);
        return c;
    }

    // Centred, unit-scaled design so the rank test does not depend on units.
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    Eigen::VectorXd means(static_cast<Eigen::Index>(k)), scales(static_cast<Eigen::Index>(k));
    std::vector<std::string> constant_columns;
    for (std::size_t j = 0; j < k; ++j) {
        const auto J = static_cast<Eigen::Index>(j);
        const Eigen::VectorXd col = data.column(conditioners[j]);
        means[J] = col.mean();
        const double sd = std::sqrt((col.array() - means[J]).square().mean());
        if (!(sd > 0.0) || sd <= kRankThreshold * std::max(1.0, std::abs(means[J])))
            constant_columns.push_back(conditioners[j]);
        scales[J] = sd > 0.0 ? sd : 1.0;
        design.col(J) = (col.array() - means[J]) / scales[J];
    }
    if (!constant_columns.empty())
        throw DegeneracyError("fitting " + target + ": columns collinear with the intercept: " +
                              format_set(make_set(constant_columns)));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < static_cast<Eigen::Index>(k)) {
        std::vector<std::string> culprits;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index i = qr.rank(); i < static_cast<Eigen::Index>(k); ++i)
            culprits.push_back(conditioners[static_cast<std::size_t>(perm[i])]);
        throw DegeneracyError("fitting " + target + ": collinear columns " + format_set(make_set(culprits)));
    }

    const Eigen::VectorXd yc = y.array() - y_mean;
    const Eigen::VectorXd beta = qr.solve(yc);
    c.weights = beta.array() / scales.array();
    c.intercept = y_mean - c.weights.dot(means);
    const Eigen::VectorXd resid = yc - design * beta;
    c.noise_sd = std::max(std::sqrt(resid.squaredNorm() / static_cast<double>(n)), kMinNoiseSd);
    return c;
}

GaussianJoint GaussianJoint::select(const std::vector<std::string>& subset) const {
    std::vector<Eigen::Index> idx;
    for (const auto& s : subset) {
        auto it = std::find(names.begin(), names.end(), s);
        if (it == names.end()) throw ArgumentError("variable " + s + " is not part of the joint");
        idx.push_back(static_cast<Eigen::Index>(it - names.begin()));
    }
    GaussianJoint out;
    out.names = subset;
    const auto m = static_cast<Eigen::Index>(idx.size());
    out.mean.resize(m);
    out.cov.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        out.mean[a] = mean[idx[static_cast<std::size_t>(a)]];
        for (Eigen::Index b = 0; b < m; ++b)
            out.cov(a, b) = cov(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    return out;
}

FittedDAGDensity::FittedDAGDensity(CausalGraph graph, std::map<std::string, ConditionalGaussian> conditionals)
    : graph_(std::move(graph)), base_(base_sets(graph_)), conditionals_(std::move(conditionals)) {
    for (const auto& node : graph_.nodes)
        if (!conditionals_.count(node)) throw ArgumentError("no fitted conditional for node " + node);
}

const ConditionalGaussian& FittedDAGDensity::conditional(const std::string& node) const {
    auto it = conditionals_.find(node);
    if (it == conditionals_.end()) throw ArgumentError("no fitted conditional for node " + node);
    return it->second;
}

GaussianJoint FittedDAGDensity::observational_joint() const {
    // Linear-Gaussian system v = c + B v + s e over the non-output nodes that
    // do not descend from the output.
    const VarSet excluded = set_union(graph_.descendants(graph_.output), VarSet{graph_.output});
    std::vector<std::string> names;
    for (const auto& v : topological_order(graph_))
        if (!contains(excluded, v)) names.push_back(v);

    const auto m = static_cast<Eigen::Index>(names.size());
    auto index_of = [&](const std::string& v) {
        return static_cast<Eigen::Index>(std::find(names.begin(), names.end(), v) - names.begin());
    };
    GaussianJoint j;
    j.names = names;
    j.mean = Eigen::VectorXd::Zero(m);
    j.cov = Eigen::MatrixXd::Zero(m, m);
    // Rows of A express each node as a combination of the independent noises.
    Eigen::MatrixXd loadings = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& c = conditional(names[static_cast<std::size_t>(i)]);
        double mu = c.intercept;
        for (std::size_t p = 0; p < c.conditioners.size(); ++p) {
            const Eigen::Index pi = index_of(c.conditioners[p]);
            if (pi >= i)
                throw ArgumentError("conditional for " + c.target + " reads " + c.conditioners[p] +
                                    " which is not an earlier node of the joint");
            const double w = c.weights[static_cast<Eigen::Index>(p)];
            mu += w * j.mean[pi];
            loadings.row(i) += w * loadings.row(pi);
        }
        loadings(i, i) += c.noise_sd;
        j.mean[i] = mu;
    }
    j.cov = loadings * loadings.transpose();
    return j;
}

nlohmann::json FittedDAGDensity::to_json() const {
    nlohmann::json nodes = nlohmann::json::object();
    for (const auto& [name, c] : conditionals_) nodes[name] = c.to_json();
    return nlohmann::json{{"conditionals", nodes}, {"base", daggp::to_json(base_)}};
}

FittedDAGDensity FittedDAGDensity::from_json(const CausalGraph& graph, const nlohmann::json& j) {
    std::map<std::string, ConditionalGaussian> out;
    for (const auto& [name, c] : j.at("conditionals").items()) out.emplace(name, ConditionalGaussian::from_json(c));
    return FittedDAGDensity(graph, std::move(out));
}

FittedDAGDensity fit_dag_density(const Dataset& data, const CausalGraph& graph, const ConditionalFitter& fitter) {
    graph.validate();
    const BaseSets base = base_sets(graph);
    std::map<std::string, ConditionalGaussian> out;
    for (const auto& node : graph.nodes) {
        const std::vector<std::string> cond = node == graph.output ? base.layout() : graph.parents(node);
        out.emplace(node, fitter ? fitter(data, node, cond) : fit_conditional_gaussian(data, node, cond));
    }
    return FittedDAGDensity(graph, std::move(out));
}

} // namespace daggp
