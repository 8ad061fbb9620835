#include "daggp/snapshot.hpp"

#include "daggp/error.hpp"

namespace daggp {

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
        rows.push_back(r);
    }
    return rows;
}

} // namespace

nlohmann::json snapshot(const MultiTaskGP& model) {
    const TaskPrior& prior = model.prior();
    const GpSettings& s = prior.settings();
    nlohmann::json j;
    j["schema"] = kSnapshotSchema;
    j["variant"] = to_string(prior.variant());
    j["settings"] = {{"mc_samples", s.mc_samples},
                     {"cov_samples", s.cov_samples},
                     {"noise_var", s.noise_var},
                     {"rbf_lengthscale", s.rbf.lengthscale},
                     {"rbf_variance", s.rbf.variance},
                     {"seed", s.seed}};
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& t : prior.tasks()) {
        nlohmann::json dom = nlohmann::json::array();
        for (const auto& iv : t.domain) dom.push_back({iv.lo, iv.hi});
        tasks.push_back({{"variables", t.variables}, {"domain", dom}});
    }
    j["tasks"] = tasks;
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : model.points()) points.push_back({{"task", p.task}, {"x", p.x}});
    j["points"] = points;
    j["y"] = model.targets();
    j["gram"] = matrix_json(model.gram());
    j["jitter"] = model.jitter();
    if (prior.density()) j["density"] = prior.density()->to_json();
    return j;
}

MultiTaskGP restore(const nlohmann::json& snap, const CausalGraph& graph) {
    if (snap.value("schema", std::string{}) != kSnapshotSchema)
        throw ArgumentError("unsupported snapshot schema '" + snap.value("schema", std::string{}) + "'");
    const ModelVariant variant = parse_variant(snap.at("variant").get<std::string>());
    const auto& js = snap.at("settings");
    GpSettings s;
    s.mc_samples = js.at("mc_samples").get<std::size_t>();
    s.cov_samples = js.at("cov_samples").get<std::size_t>();
    s.noise_var = js.at("noise_var").get<double>();
    s.rbf.lengthscale = js.at("rbf_lengthscale").get<double>();
    s.rbf.variance = js.at("rbf_variance").get<double>();
    s.seed = js.at("seed").get<std::uint64_t>();

    std::vector<Task> tasks;
    for (const auto& jt : snap.at("tasks")) {
        Task t;
        t.variables = jt.at("variables").get<VarSet>();
        for (const auto& d : jt.at("domain")) t.domain.push_back({d.at(0).get<double>(), d.at(1).get<double>()});
        tasks.push_back(std::move(t));
    }
    std::optional<FittedDAGDensity> density;
    if (snap.contains("density")) density = FittedDAGDensity::from_json(graph, snap.at("density"));

    std::vector<TaskPoint> points;
    for (const auto& jp : snap.at("points"))
        points.push_back({jp.at("task").get<std::size_t>(), jp.at("x").get<std::vector<double>>()});
    auto y = snap.at("y").get<std::vector<double>>();

    MultiTaskGP model(make_task_prior(variant, tasks, density, s), std::move(points), std::move(y));
    if (matrix_json(model.gram()) != snap.at("gram"))
        throw ArgumentError("restored Gram matrix differs from the snapshot");
    return model;
}

} // namespace daggp
