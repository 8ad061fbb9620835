#include "daggp/density.hpp"

#include "daggp/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace daggp {

namespace {

// Leading rows used by the hyperparameter search and by the final solve.
// Rows of an observational sample are exchangeable, so these are random subsets.
constexpr std::size_t kSearchRows = 200;
constexpr std::size_t kFitRows = 1000;
constexpr double kLengthscales[] = {0.2, 0.3, 0.5, 0.8, 1.2, 2.0, 3.0, 5.0, 8.0};
constexpr double kNoiseRatios[] = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0};

Eigen::MatrixXd correlation(const Eigen::MatrixXd& u, double lengthscale) {
    const Eigen::Index n = u.rows();
    const double inv_two_l2 = 1.0 / (2.0 * lengthscale * lengthscale);
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) r(i, j) = r(j, i) = std::exp(-(u.row(i) - u.row(j)).squaredNorm() * inv_two_l2);
    }
    return r;
}

struct Profile {
    double loglik = -std::numeric_limits<double>::infinity();
    double constant = 0.0;
    double scale2 = 0.0;   // profiled signal variance
};

// Concentrated log likelihood of y ~ N(m 1, s2 (R + ratio I)) with m and s2 at
// their maximisers.
Profile profile(const Eigen::MatrixXd& r, double ratio, const Eigen::VectorXd& y) {
    Eigen::MatrixXd a = r;
    a.diagonal().array() += ratio;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) return {};
    const auto n = static_cast<double>(y.size());
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(y.size());
    const Eigen::VectorXd ai_y = llt.solve(y), ai_1 = llt.solve(ones);
    Profile p;
    p.constant = ones.dot(ai_y) / ones.dot(ai_1);
    const Eigen::VectorXd resid = y - p.constant * ones;
    p.scale2 = resid.dot(llt.solve(resid)) / n;
    if (!(p.scale2 > 0.0)) return {};
    const Eigen::MatrixXd l = llt.matrixL();
    p.loglik = -0.5 * n * std::log(p.scale2) - l.diagonal().array().log().sum();
    return p;
}

} // namespace

double GpMean::eval(std::span<const double> values) const {
    if (values.size() != static_cast<std::size_t>(center.size()))
        throw ArgumentError("GP mean expects " + std::to_string(center.size()) + " inputs, got " +
                            std::to_string(values.size()));
    const double inv_two_l2 = 1.0 / (2.0 * lengthscale * lengthscale);
    const Eigen::Index k = center.size();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        double d2 = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            const double d = (values[static_cast<std::size_t>(j)] - center[j]) / scale[j] - inputs(i, j);
            d2 += d * d;
        }
        acc += alpha[i] * std::exp(-d2 * inv_two_l2);
    }
    return constant + signal_var * acc;
}

nlohmann::json GpMean::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        const Eigen::VectorXd r = inputs.row(i);
        rows.push_back(std::vector<double>(r.data(), r.data() + r.size()));
    }
    return {{"center", std::vector<double>(center.data(), center.data() + center.size())},
            {"scale", std::vector<double>(scale.data(), scale.data() + scale.size())},
            {"inputs", rows},
            {"alpha", std::vector<double>(alpha.data(), alpha.data() + alpha.size())},
            {"constant", constant},
            {"lengthscale", lengthscale},
            {"signal_var", signal_var}};
}

GpMean GpMean::from_json(const nlohmann::json& j) {
    auto vec = [](const nlohmann::json& a) {
        const auto v = a.get<std::vector<double>>();
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    GpMean g;
    g.center = vec(j.at("center"));
    g.scale = vec(j.at("scale"));
    g.alpha = vec(j.at("alpha"));
    const auto& rows = j.at("inputs");
    g.inputs.resize(static_cast<Eigen::Index>(rows.size()), g.center.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Eigen::VectorXd r = vec(rows[i]);
        if (r.size() != g.center.size() ) throw ArgumentError("GP input row has the wrong width");
        g.inputs.row(static_cast<Eigen::Index>(i)) = r;
    }
    if (g.alpha.size() != g.inputs.rows() || g.scale.size() != g.center.size())
        throw ArgumentError("GP mean arrays disagree in size");
    g.constant = j.at("constant").get<double>();
    g.lengthscale = j.at("lengthscale").get<double>();
    g.signal_var = j.at("signal_var").get<double>();
    return g;
}

ConditionalGaussian fit_gp_conditional(const Dataset& data, const std::string& target,
                                       const std::vector<std::string>& conditioners) {
    ConditionalGaussian c = fit_conditional_gaussian(data, target, conditioners);
    const std::size_t k = conditioners.size();
    if (k == 0) return c;

    const auto n = static_cast<Eigen::Index>(std::min(data.size(), kFitRows));
    const auto K = static_cast<Eigen::Index>(k);
    auto gp = std::make_shared<GpMean>();
    gp->center.resize(K);
    gp->scale.resize(K);
    gp->inputs.resize(n, K);
    for (Eigen::Index j = 0; j < K; ++j) {
        const Eigen::VectorXd col = data.column(conditioners[static_cast<std::size_t>(j)]).head(n);
        gp->center[j] = col.mean();
        gp->scale[j] = std::sqrt((col.array() - gp->center[j]).square().mean());
        gp->inputs.col(j) = (col.array() - gp->center[j]) / gp->scale[j];
    }
    const Eigen::VectorXd y = data.column(target).head(n);

    // Lengthscales are per unit of standardized distance, so scale by sqrt(k).
    const Eigen::Index m = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(kSearchRows));
    const Eigen::MatrixXd u = gp->inputs.topRows(m);
    const Eigen::VectorXd ys = y.head(m);
    double best_l = 1.0, best_ratio = 1.0, best = -std::numeric_limits<double>::infinity();
    for (double l0 : kLengthscales) {
        const double l = l0 * std::sqrt(static_cast<double>(k));
        const Eigen::MatrixXd r = correlation(u, l);
        for (double ratio : kNoiseRatios) {
            const Profile p = profile(r, ratio, ys);
            if (p.loglik > best) {
                best = p.loglik;
                best_l = l;
                best_ratio = ratio;
            }
        }
    }
    if (!std::isfinite(best)) throw NumericalError("GP fit of " + target + " failed for every hyperparameter");

    const Eigen::MatrixXd r = correlation(gp->inputs, best_l);
    const Profile p = profile(r, best_ratio, y);
    if (!std::isfinite(p.loglik)) throw NumericalError("GP fit of " + target + " is not positive definite");
    Eigen::MatrixXd a = r;
    a.diagonal().array() += best_ratio;
    gp->alpha = a.llt().solve(y - p.constant * Eigen::VectorXd::Ones(n)) / p.scale2;
    gp->constant = p.constant;
    gp->lengthscale = best_l;
    gp->signal_var = p.scale2;
    c.noise_sd = std::max(std::sqrt(best_ratio * p.scale2), kMinNoiseSd);
    c.gp = std::move(gp);
    return c;
}

std::string to_string(ConditionalFamily f) { return f == ConditionalFamily::Gp ? "gp" : "affine"; }

ConditionalFamily parse_conditional_family(const std::string& name) {
    if (name == "affine") return ConditionalFamily::Affine;
    if (name == "gp") return ConditionalFamily::Gp;
    throw ArgumentError("unknown conditional family '" + name + "'");
}

ConditionalFitter conditional_fitter(ConditionalFamily family) {
    if (family == ConditionalFamily::Affine) return {};
    return fit_gp_conditional;
}

} // namespace daggp
