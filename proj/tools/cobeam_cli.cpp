// cobeam: runs the figure sweeps and the beampattern sweep, writing CSV.
//
//   cobeam --figure 1                       # BER vs gamma2, desk-scale trials
//   cobeam --figure 3 --trials 1000000      # full-scale Monte Carlo
//   cobeam --spec my_sweep.cfg --out x.csv
//   cobeam --figure beampattern --trials 0  # analytic only
//
// Exit codes: 0 success, 2 usage or I/O error, 3 an analytic ordering
// (exact <= closed bound <= simple bound, floors <= exact) was violated.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "cobeam/experiment.hpp"

namespace {

cobeam::ExperimentKind figure_kind(const std::string& figure) {
    static const std::map<std::string, cobeam::ExperimentKind> table = {
        {"1", cobeam::ExperimentKind::fig1_ber_vs_gamma2},
        {"2", cobeam::ExperimentKind::fig2_ber_vs_n},
        {"3", cobeam::ExperimentKind::fig3_ber_vs_k},
        {"4", cobeam::ExperimentKind::fig4_ber_vs_gamma1},
        {"beampattern", cobeam::ExperimentKind::beampattern},
    };
    return table.at(figure);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collaborative beamforming SEP/BER sweeps"};
    std::string spec_path;
    std::string figure;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string methods;
    bool full_scale = false;
    bool print_spec = false;

    auto* spec_opt = app.add_option("--spec", spec_path, "Experiment spec file (key = value)")
                         ->check(CLI::ExistingFile);
    auto* figure_opt = app.add_option("--figure", figure, "Built-in experiment")
                           ->check(CLI::IsMember({"1", "2", "3", "4", "beampattern"}));
    spec_opt->excludes(figure_opt);
    auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials per point");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
    app.add_option("--out", out_path, "Output CSV path");
    app.add_option("--methods", methods,
                   "Comma list of monte_carlo, exact_quadrature, closed_bound, simple_bound, "
                   "awgn_floor, power_floor");
    auto* full_opt = app.add_flag("--full-scale", full_scale, "Use 10^6 trials per point");
    full_opt->excludes(trials_opt);
    app.add_flag("--print-spec", print_spec, "Print the resolved spec and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cobeam::ExperimentSpec spec;
        if (!spec_path.empty()) {
            spec = cobeam::load_spec(spec_path);
        } else if (!figure.empty()) {
            spec = cobeam::default_spec(figure_kind(figure));
        } else {
            std::cerr << "one of --spec or --figure is required\n" << app.help();
            return 2;
        }
        if (*trials_opt) spec.trials = trials;
        if (full_scale) spec.trials = cobeam::kFullScaleTrials;
        if (*seed_opt) spec.base.rng_seed = seed;
        if (!out_path.empty()) spec.output_path = out_path;
        if (!methods.empty()) spec.methods = cobeam::parse_method_list(methods);
        spec.validate();

        if (print_spec) {
            std::cout << cobeam::to_spec_text(spec);
            return 0;
        }

        const cobeam::ExperimentSummary summary = cobeam::run_experiment(spec);
        std::cout << cobeam::format_summary(spec, summary);
        return summary.violations.empty() ? 0 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
