// daggp: fit / al / bo experiments on the builtin SCMs.
#include "daggp/error.hpp"
#include "daggp/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using daggp::ExperimentConfig;

struct Options {
    std::string dag = "dag1";
    std::string model = "dag_gp_plus";
    std::size_t n_obs = 30;
    long n_int = -1;
    std::size_t replicates = 10;
    std::uint64_t seed = 0;
    std::vector<std::size_t> grid{50, 15, 7};
    std::size_t mc_samples = 1000;
    std::size_t cov_samples = 100;
    double noise_var = 1e-3;
    std::size_t truth_mc = 100000;
    std::size_t obs_mc = 10000;
    std::size_t budget = 10;
    std::string strategy = "mi";
    double gap = 0.05;
    double noise_sd = 1.0;
    std::string conditionals = "affine";
    std::size_t threads = 0;
    std::string out;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--dag", o.dag, "builtin SCM: dag1, dag2 or dag3")->capture_default_str();
    cmd->add_option("--model", o.model, "dag_gp_plus, dag_gp, gp_plus, gp or do")->capture_default_str();
    cmd->add_option("--n-obs", o.n_obs, "observational sample size N")->capture_default_str();
    cmd->add_option("--n-int", o.n_int, "initial interventional points per task (default depends on dag and kind)");
    cmd->add_option("--replicates", o.replicates, "seeded replicates")->capture_default_str();
    cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
    cmd->add_option("--grid", o.grid, "points per axis for 1-D, 2-D and 3-D tasks")->expected(1, 3)->capture_default_str();
    cmd->add_option("--mc-samples", o.mc_samples, "samples per prior-mean integral")->capture_default_str();
    cmd->add_option("--cov-samples", o.cov_samples, "samples per point in covariance double sums")->capture_default_str();
    cmd->add_option("--noise-var", o.noise_var, "likelihood noise variance")->capture_default_str();
    cmd->add_option("--truth-mc", o.truth_mc, "SCM draws per evaluation truth value")->capture_default_str();
    cmd->add_option("--obs-mc", o.obs_mc, "SCM draws per interventional observation")->capture_default_str();
    cmd->add_option("--conditionals", o.conditionals, "fitted conditional family: affine or gp")->capture_default_str();
    cmd->add_option("--scm-noise-sd", o.noise_sd, "sd of the unstated additive SCM noises (dag1, dag2)")->capture_default_str();
    cmd->add_option("--threads", o.threads, "worker threads (0 = DAGGP_THREADS or hardware)")->capture_default_str();
    cmd->add_option("--out", o.out, "CSV output path; the JSON report is written next to it")->required();
}

ExperimentConfig make_config(const Options& o, daggp::TaskKind kind) {
    ExperimentConfig c;
    c.dag = o.dag;
    c.kind = kind;
    c.model = daggp::parse_variant(o.model);
    c.n_obs = o.n_obs;
    if (o.n_int >= 0) c.n_int = static_cast<std::size_t>(o.n_int);
    c.replicates = o.replicates;
    c.seed = o.seed;
    if (o.grid.size() > 0) c.grid.one_d = o.grid[0];
    if (o.grid.size() > 1) c.grid.two_d = o.grid[1];
    if (o.grid.size() > 2) c.grid.three_d = o.grid[2];
    c.mc_samples = o.mc_samples;
    c.cov_samples = o.cov_samples;
    c.noise_var = o.noise_var;
    c.truth_mc = o.truth_mc;
    c.obs_mc = o.obs_mc;
    c.budget = o.budget;
    c.strategy = daggp::parse_al_strategy(o.strategy);
    c.gap_threshold = o.gap;
    c.conditionals = daggp::parse_conditional_family(o.conditionals);
    c.scm_options.noise_sd = o.noise_sd;
    c.workers = o.threads;
    return c;
}

void write_outputs(const daggp::Report& report, const std::string& out) {
    const std::filesystem::path csv(out);
    if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
    std::ofstream f(csv, std::ios::binary);
    if (!f) throw daggp::ArgumentError("cannot open " + out + " for writing");
    daggp::write_report_csv(report, f);
    std::filesystem::path json = csv;
    json.replace_extension(".json");
    std::ofstream j(json, std::ios::binary);
    if (!j) throw daggp::ArgumentError("cannot open " + json.string() + " for writing");
    j << daggp::report_json(report).dump(2) << '\n';
}

std::string one_line(std::string s) {
    for (char& ch : s)
        if (ch == '\n') ch = ' ';
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-task causal GP experiments on builtin SCMs"};
    app.require_subcommand(1);
    Options o;
    auto* fit = app.add_subcommand("fit", "RMSE of a model variant on the evaluation grid");
    auto* al = app.add_subcommand("al", "active-learning RMSE curve");
    auto* bo = app.add_subcommand("bo", "Bayesian-optimization gap curve");
    for (auto* cmd : {fit, al, bo}) add_common(cmd, o);
    al->add_option("--budget", o.budget, "acquisitions")->capture_default_str();
    al->add_option("--strategy", o.strategy, "mi or random")->capture_default_str();
    bo->add_option("--budget", o.budget, "acquisitions")->capture_default_str();
    bo->add_option("--gap", o.gap, "gap threshold defining the replicate metric")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: kind=argument message=" << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        const daggp::TaskKind kind = fit->parsed() ? daggp::TaskKind::Fit
                                     : al->parsed() ? daggp::TaskKind::Al
                                                    : daggp::TaskKind::Bo;
        const daggp::Report report = daggp::run_experiment(make_config(o, kind));
        write_outputs(report, o.out);
        std::cout << daggp::to_string(kind) << ' ' << o.dag << ' ' << o.model << ": mean="
                  << report.mean << " se=" << report.standard_error << " (" << report.replicates.size()
                  << " replicates, " << report.wall_seconds << " s)\n";
    } catch (const daggp::Error& e) {
        std::cerr << "error: kind=" << e.kind() << " message=" << one_line(e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: kind=internal message=" << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}
