#include "daggp/error.hpp"
#include "daggp/scm.hpp"

#include <cmath>

namespace daggp {
namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

Equation equation(std::vector<std::string> inputs, std::vector<std::string> noises,
                  Equation::Fn fn, std::string description) {
    Equation eq;
    eq.inputs = std::move(inputs);
    eq.noises = std::move(noises);
    eq.fn = std::move(fn);
    eq.description = std::move(description);
    return eq;
}

class NoiseScales {
public:
    explicit NoiseScales(const BuiltinOptions& o) : options_(o) {}

    NoiseLaw gaussian(const std::string& name, double default_sd) const {
        auto it = options_.noise_sd_overrides.find(name);
        return NoiseLaw::gaussian(0.0, it == options_.noise_sd_overrides.end() ? default_sd : it->second);
    }
    NoiseLaw unstated(const std::string& name) const { return gaussian(name, options_.noise_sd); }

private:
    const BuiltinOptions& options_;
};

// X -> Z -> Y
SCM make_dag1(const BuiltinOptions& options) {
    NoiseScales scales(options);
    CausalGraph g;
    g.nodes = {"X", "Z", "Y"};
    g.directed_edges = {{"X", "Z"}, {"Z", "Y"}};
    g.output = "Y";
    g.manipulable = {"X", "Z"};

    std::map<std::string, Equation> eqs;
    eqs["X"] = equation({}, {"eps_X"}, [](auto, auto u) { return u[0]; }, "X = eps_X");
    eqs["Z"] = equation({"X"}, {"eps_Z"}, [](auto p, auto u) { return std::exp(-p[0]) + u[0]; },
                        "Z = exp(-X) + eps_Z");
    eqs["Y"] = equation({"Z"}, {"eps_Y"},
                        [](auto p, auto u) { return std::cos(p[0]) - std::exp(-p[0] / 20.0) + u[0]; },
                        "Y = cos(Z) - exp(-Z/20) + eps_Y");

    std::map<std::string, NoiseLaw> noise{{"eps_X", scales.unstated("eps_X")},
                                          {"eps_Z", scales.unstated("eps_Z")},
                                          {"eps_Y", scales.unstated("eps_Y")}};
    std::map<std::string, Interval> domains{{"X", {-5.0, 5.0}}, {"Z", {-5.0, 20.0}}};
    return SCM("dag1", std::move(g), std::move(eqs), std::move(noise), {}, std::move(domains));
}

// A <-U1-> Y, B <-U2-> Y, B -> C -> {D, E}, A -> E, {D, E} -> Y
SCM make_dag2(const BuiltinOptions& options) {
    NoiseScales scales(options);
    CausalGraph g;
    g.nodes = {"A", "B", "C", "D", "E", "Y"};
    g.directed_edges = {{"B", "C"}, {"C", "D"}, {"C", "E"}, {"A", "E"}, {"D", "Y"}, {"E", "Y"}};
    g.confounder_pairs = {{"A", "Y"}, {"B", "Y"}};
    g.output = "Y";
    g.manipulable = {"B", "D", "E"};
    g.non_manipulable = {"A", "C"};

    std::map<std::string, Equation> eqs;
    eqs["A"] = equation({}, {"U1", "eps_A"}, [](auto, auto u) { return u[0] + u[1]; }, "A = U1 + eps_A");
    eqs["B"] = equation({}, {"U2", "eps_B"}, [](auto, auto u) { return u[0] + u[1]; }, "B = U2 + eps_B");
    eqs["C"] = equation({"B"}, {"eps_C"}, [](auto p, auto u) { return std::exp(-p[0]) + u[0]; },
                        "C = exp(-B) + eps_C");
    eqs["D"] = equation({"C"}, {"eps_D"}, [](auto p, auto u) { return std::exp(-p[0]) / 10.0 + u[0]; },
                        "D = exp(-C)/10 + eps_D");
    eqs["E"] = equation({"A", "C"}, {"eps_E"},
                        [](auto p, auto u) { return std::cos(p[0]) + p[1] / 10.0 + u[0]; },
                        "E = cos(A) + C/10 + eps_E");
    eqs["Y"] = equation({"D", "E"}, {"U1", "U2", "eps_Y"},
                        [](auto p, auto u) { return std::cos(p[0]) + std::sin(p[1]) + u[0] + u[1] + u[2]; },
                        "Y = cos(D) + sin(E) + U1 + U2 + eps_Y");

    std::map<std::string, NoiseLaw> noise;
    for (const char* n : {"U1", "U2", "eps_A", "eps_B", "eps_C", "eps_D", "eps_E", "eps_Y"}) {
        noise[n] = scales.unstated(n);
    }
    std::map<Edge, std::string> shared{{{"A", "Y"}, "U1"}, {{"B", "Y"}, "U2"}};
    std::map<std::string, Interval> domains{{"B", {-3.0, 4.0}}, {"D", {-3.0, 3.0}}, {"E", {-3.0, 3.0}}};
    return SCM("dag2", std::move(g), std::move(eqs), std::move(noise), std::move(shared), std::move(domains));
}

// statin / PSA model
SCM make_dag3(const BuiltinOptions& options) {
    NoiseScales scales(options);
    CausalGraph g;
    g.nodes = {"age", "bmi", "aspirin", "statin", "cancer", "Y"};
    g.directed_edges = {{"age", "bmi"},     {"age", "aspirin"},   {"bmi", "aspirin"},
                        {"age", "statin"},  {"bmi", "statin"},    {"age", "cancer"},
                        {"bmi", "cancer"},  {"statin", "cancer"}, {"aspirin", "cancer"},
                        {"age", "Y"},       {"bmi", "Y"},         {"statin", "Y"},
                        {"aspirin", "Y"},   {"cancer", "Y"}};
    g.output = "Y";
    g.manipulable = {"aspirin", "statin"};
    g.non_manipulable = {"age", "bmi", "cancer"};

    std::map<std::string, Equation> eqs;
    eqs["age"] = equation({}, {"u_age"}, [](auto, auto u) { return u[0]; }, "age = U(55, 75)");
    eqs["bmi"] = equation({"age"}, {"eps_bmi"}, [](auto p, auto u) { return 27.0 - 0.01 * p[0] + u[0]; },
                          "bmi = N(27.0 - 0.01 age, 0.7)");
    eqs["aspirin"] = equation({"age", "bmi"}, {},
                              [](auto p, auto) { return sigmoid(-8.0 + 0.10 * p[0] + 0.03 * p[1]); },
                              "aspirin = sigmoid(-8.0 + 0.10 age + 0.03 bmi)");
    eqs["statin"] = equation({"age", "bmi"}, {},
                             [](auto p, auto) { return sigmoid(-13.0 + 0.10 * p[0] + 0.20 * p[1]); },
                             "statin = sigmoid(-13.0 + 0.10 age + 0.20 bmi)");
    eqs["cancer"] = equation({"age", "bmi", "statin", "aspirin"}, {},
                             [](auto p, auto) {
                                 return sigmoid(2.2 - 0.05 * p[0] + 0.01 * p[1] - 0.04 * p[2] + 0.02 * p[3]);
                             },
                             "cancer = sigmoid(2.2 - 0.05 age + 0.01 bmi - 0.04 statin + 0.02 aspirin)");
    eqs["Y"] = equation({"age", "bmi", "statin", "aspirin", "cancer"}, {"eps_Y"},
                        [](auto p, auto u) {
                            return 6.8 + 0.04 * p[0] - 0.15 * p[1] - 0.60 * p[2] + 0.55 * p[3] + 1.00 * p[4] + u[0];
                        },
                        "Y = N(6.8 + 0.04 age - 0.15 bmi - 0.60 statin + 0.55 aspirin + 1.00 cancer, 0.4)");

    std::map<std::string, NoiseLaw> noise{{"u_age", NoiseLaw::uniform(55.0, 75.0)},
                                          {"eps_bmi", scales.gaussian("eps_bmi", 0.7)},
                                          {"eps_Y", scales.gaussian("eps_Y", 0.4)}};
    std::map<std::string, Interval> domains{{"aspirin", {0.0, 1.0}}, {"statin", {0.0, 1.0}}};
    return SCM("dag3", std::move(g), std::move(eqs), std::move(noise), {}, std::move(domains));
}

} // namespace

SCM builtin_scm(const std::string& name, const BuiltinOptions& options) {
    if (name == "dag1") return make_dag1(options);
    if (name == "dag2") return make_dag2(options);
    if (name == "dag3") return make_dag3(options);
    throw ArgumentError("unknown builtin SCM '" + name + "' (expected dag1, dag2 or dag3)");
}

std::vector<std::string> builtin_names() { return {"dag1", "dag2", "dag3"}; }

} // namespace daggp
