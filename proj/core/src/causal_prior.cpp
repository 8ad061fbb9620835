#include "daggp/causal_prior.hpp"

#include "daggp/error.hpp"
#include "daggp/rng.hpp"

#include <cmath>
#include <random>

namespace daggp {

namespace {

struct NormalSummary {
    double mean = 0.0;
    double sd = 0.0;
};

// Sample mean and (n - 1) standard deviation of n standard normals.
NormalSummary summarize_normals(std::size_t n, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {stream_id("do-effect")}));
    std::normal_distribution<double> normal(0.0, 1.0);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double z = normal(rng);
        const double delta = z - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (z - mean);
    }
    return {mean, std::sqrt(m2 / static_cast<double>(n - 1))};
}

const ConditionalGaussian& outcome_conditional(const FittedDAGDensity& density) {
    const auto& c = density.conditional(density.graph().output);
    if (c.conditioners != density.base().layout())
        throw ArgumentError("outcome conditional does not read the base-set layout");
    return c;
}

} // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return d2;
}

double rbf(std::span<const double> a, std::span<const double> b, const RbfParams& params) {
    const double inv_two_l2 = 1.0 / (2.0 * params.lengthscale * params.lengthscale);
    return params.variance * std::exp(-squared_distance(a, b) * inv_two_l2);
}

DoEffect estimate_do_effect(const FittedDAGDensity& density, const CausalGraph& graph,
                            std::span<const double> b, std::size_t n_mc, std::uint64_t seed) {
    if (n_mc < 2) throw ArgumentError("n_mc must be at least 2");
    if (graph.output != density.graph().output) throw ArgumentError("graph and density disagree on the output");
    const auto& y = outcome_conditional(density);
    if (b.size() != y.conditioners.size())
        throw ArgumentError("base point has " + std::to_string(b.size()) + " entries, expected " +
                            std::to_string(y.conditioners.size()));
    // Under do(I = v) with C_N clamped, every input of the outcome conditional
    // is fixed, so only the outcome noise is simulated.
    const NormalSummary z = summarize_normals(n_mc, seed);
    return {y.mean(b) + y.noise_sd * z.mean, y.noise_sd * z.sd};
}

CausalPrior::CausalPrior(const FittedDAGDensity& density, std::size_t n_mc, std::uint64_t seed, RbfParams rbf)
    : outcome_(outcome_conditional(density)), layout_(density.base().layout()), rbf_(rbf), n_mc_(n_mc), seed_(seed) {
    if (n_mc < 2) throw ArgumentError("n_mc must be at least 2");
    if (!(rbf.lengthscale > 0.0) || !(rbf.variance >= 0.0)) throw ArgumentError("invalid RBF hyperparameters");
    const NormalSummary z = summarize_normals(n_mc, seed);
    z_mean_ = z.mean;
    z_sd_ = z.sd;
}

double CausalPrior::mean(std::span<const double> b) const {
    return outcome_.mean(b) + outcome_.noise_sd * z_mean_;
}

double CausalPrior::sd(std::span<const double> b) const {
    if (b.size() != layout_.size()) throw ArgumentError("base point has the wrong dimension");
    return outcome_.noise_sd * z_sd_;
}

double CausalPrior::kernel(std::span<const double> b, std::span<const double> b2) const {
    if (b.size() != layout_.size() || b2.size() != layout_.size())
        throw ArgumentError("base point has the wrong dimension");
    return rbf(b, b2, rbf_) + sd(b) * sd(b2);
}

} // namespace daggp
