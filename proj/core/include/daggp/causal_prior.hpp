#pragma once

#include "daggp/density.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>

namespace daggp {

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

struct RbfParams {
    double lengthscale = 1.0;
    double variance = 1.0;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double rbf(std::span<const double> a, std::span<const double> b, const RbfParams& params);

struct DoEffect {
    double mean = 0.0;
    double sd = 0.0;
};

/// MC estimate of E[Y | do(I = v), C_N = c] and its standard deviation for a
/// base point b laid out as BaseSets::layout(). Throws ArgumentError for
/// n_mc < 2 or a wrong-sized b.
DoEffect estimate_do_effect(const FittedDAGDensity& density, const CausalGraph& graph,
                            std::span<const double> b, std::size_t n_mc, std::uint64_t seed);

/// Causal prior over the base function:
///   m(b) = f_hat(b),  K(b, b') = k_rbf(b, b') + sd_hat(b) sd_hat(b').
/// Every base point is estimated from the same paired noise stream, so m and
/// sd_hat are deterministic functions of b.
class CausalPrior {
public:
    CausalPrior(const FittedDAGDensity& density, std::size_t n_mc = 1000, std::uint64_t seed = 0,
                RbfParams rbf = {});

    std::size_t dimension() const { return layout_.size(); }
    const std::vector<std::string>& layout() const { return layout_; }
    const RbfParams& rbf_params() const { return rbf_; }
    std::size_t mc_samples() const { return n_mc_; }
    std::uint64_t seed() const { return seed_; }

    double mean(std::span<const double> b) const;
    double sd(std::span<const double> b) const;
    double kernel(std::span<const double> b, std::span<const double> b2) const;

private:
    ConditionalGaussian outcome_;
    std::vector<std::string> layout_;
    RbfParams rbf_;
    std::size_t n_mc_;
    std::uint64_t seed_;
    double z_mean_ = 0.0;
    double z_sd_ = 0.0;
};

} // namespace daggp
