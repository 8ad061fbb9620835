#pragma once

#include "daggp/scm.hpp"

#include <Eigen/Core>

#include <cmath>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

namespace daggp::fixtures {

inline Dataset make_dataset(std::vector<std::string> columns, std::initializer_list<std::initializer_list<double>> rows) {
    Dataset d;
    d.columns = std::move(columns);
    d.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.columns.size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) d.rows(r, c++) = v;
        ++r;
    }
    return d;
}

// Binary chain A -> B -> Y with uniform noises thresholded at fixed rates.
//   P(A=1) = 0.3, P(B=1 | A) = 0.2 + 0.6 A, P(Y=1 | B) = 0.1 + 0.7 B.
inline double p_a() { return 0.3; }
inline double p_b(double a) { return 0.2 + 0.6 * a; }
inline double p_y(double b) { return 0.1 + 0.7 * b; }

inline SCM binary_chain() {
    CausalGraph g;
    g.nodes = {"A", "B", "Y"};
    g.directed_edges = {{"A", "B"}, {"B", "Y"}};
    g.output = "Y";
    g.manipulable = {"A", "B"};
    std::map<std::string, Equation> eqs;
    auto bernoulli = [](std::vector<std::string> inputs, std::string noise, auto prob) {
        Equation e;
        e.inputs = std::move(inputs);
        e.noises = {std::move(noise)};
        e.fn = [prob](std::span<const double> pa, std::span<const double> u) {
            return u[0] < prob(pa) ? 1.0 : 0.0;
        };
        e.description = "bernoulli";
        return e;
    };
    eqs["A"] = bernoulli({}, "u_A", [](std::span<const double>) { return p_a(); });
    eqs["B"] = bernoulli({"A"}, "u_B", [](std::span<const double> pa) { return p_b(pa[0]); });
    eqs["Y"] = bernoulli({"B"}, "u_Y", [](std::span<const double> pa) { return p_y(pa[0]); });
    std::map<std::string, NoiseLaw> noise{{"u_A", NoiseLaw::uniform(0, 1)},
                                          {"u_B", NoiseLaw::uniform(0, 1)},
                                          {"u_Y", NoiseLaw::uniform(0, 1)}};
    std::map<std::string, Interval> domains{{"A", {0.0, 1.0}}, {"B", {0.0, 1.0}}};
    return SCM("binary_chain", std::move(g), std::move(eqs), std::move(noise), {}, std::move(domains));
}

// Exact P(A=a, B=b, Y=y) of the binary chain.
inline double chain_joint(int a, int b, int y) {
    const double pa = a ? p_a() : 1 - p_a();
    const double pb = b ? p_b(a) : 1 - p_b(a);
    const double py = y ? p_y(b) : 1 - p_y(b);
    return pa * pb * py;
}

// Exact E[Y | do(A=a)] and E[Y | do(B=b)].
inline double chain_do_a(double a) { return p_b(a) * p_y(1) + (1 - p_b(a)) * p_y(0); }
inline double chain_do_b(double b) { return p_y(b); }

// Standard normal cdf / pdf for closed-form oracles.
inline double phi(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI); }

} // namespace daggp::fixtures
