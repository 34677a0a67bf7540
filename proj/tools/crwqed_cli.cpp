// crwqed_cli.cpp — scenario driver: run / figure / compare / sweep.
//
// Exit codes: 0 success, 2 scenario parse error, 3 solver error,
// 4 law assertion failed (compare --assert-law on a broken trapping law).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crwqed/crwqed.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitLaw = 4;

void print_report(const std::string& name, const crw::ComparisonReport& rep) {
    std::printf("%-14s max|dev|=%.3e at t*2J=%.1f  plateau=%.4f predicted=%.4f "
                "err=%.4f osc=%.4f  law=%s\n",
                name.c_str(), rep.max_abs_deviation, rep.time_of_max_2J,
                rep.plateau_estimate, rep.plateau_predicted, rep.plateau_error,
                rep.oscillation_amplitude, crw::to_string(rep.law_status));
}

crw::SweepAxis parse_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw crw::ParseError("--axis", "expected key=v1,v2,... got '" + spec + "'");
    crw::SweepAxis ax;
    ax.key = spec.substr(0, eq);
    std::string rest = spec.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        const auto comma = rest.find(',', pos);
        const std::string v =
            rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!v.empty()) ax.values.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (ax.values.empty()) throw crw::ParseError("--axis", "axis has no values");
    return ax;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"crwqed — collective single-photon emission in a coupled-resonator "
                 "waveguide (dual numeric/analytic solver)"};
    app.set_version_flag("--version", std::string("crwqed ") + crw::kEngineVersion +
                                          " (scenario schema v" +
                                          std::to_string(crw::kSchemaVersion) + ")");
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".", solver = "";
    bool assert_law = false;
    int jobs = 0;
    std::string figure_name;
    std::vector<std::string> axis_specs;

    auto* cmd_run = app.add_subcommand("run", "run one scenario and write CSV output");
    cmd_run->add_option("scenario", scenario_path, "scenario file")->required();
    cmd_run->add_option("--out", out_dir, "output directory");
    cmd_run->add_option("--solver", solver, "numeric|analytic|both (overrides the file)");

    auto* cmd_fig = app.add_subcommand("figure", "run a figure preset family");
    cmd_fig->add_option("name", figure_name, "fig1|fig2a|fig2b|fig3a|fig3b")->required();
    cmd_fig->add_option("--out", out_dir, "output directory");

    auto* cmd_cmp = app.add_subcommand("compare", "cross-compare both solvers");
    cmd_cmp->add_option("scenario", scenario_path, "scenario file")->required();
    cmd_cmp->add_flag("--assert-law", assert_law, "exit 4 if the trapping law is broken");

    auto* cmd_sweep = app.add_subcommand("sweep", "run a parameter grid");
    cmd_sweep->add_option("scenario", scenario_path, "base scenario file")->required();
    cmd_sweep->add_option("--axis", axis_specs, "axis as key=v1,v2,... (repeatable)")
        ->required();
    cmd_sweep->add_option("--jobs", jobs, "worker threads (default: hardware)");
    cmd_sweep->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            crw::ScenarioConfig cfg = crw::parse_scenario_file(scenario_path);
            if (!solver.empty()) {
                crw::apply_scenario_key(cfg, "solvers", solver);
                cfg.refresh_default_outputs();
            }
            cfg.output_dir = out_dir;
            crw::validate_scenario(cfg);
            const auto res = crw::run_scenario(cfg);
            for (const auto& r : res.runs)
                std::printf("wrote %s\n", r.csv_path.c_str());
            std::printf("wrote %s\n", res.meta_path.c_str());
        } else if (*cmd_fig) {
            for (auto cfg : crw::figure_preset(figure_name)) {
                cfg.output_dir = out_dir;
                const auto res = crw::run_scenario(cfg);
                print_report(cfg.name, crw::compare_runs(res));
            }
        } else if (*cmd_cmp) {
            crw::ScenarioConfig cfg = crw::parse_scenario_file(scenario_path);
            cfg.output_dir = out_dir;
            const auto rep = crw::compare_solvers(cfg);
            print_report(cfg.name, rep);
            if (assert_law && rep.law_status == crw::LawStatus::broken) {
                std::fprintf(stderr, "law assertion failed: %s\n",
                             crw::to_string(rep.law_status));
                return kExitLaw;
            }
        } else if (*cmd_sweep) {
            crw::ScenarioConfig base = crw::parse_scenario_file(scenario_path);
            base.output_dir = out_dir;
            std::vector<crw::SweepAxis> axes;
            axes.reserve(axis_specs.size());
            for (const auto& s : axis_specs) axes.push_back(parse_axis(s));
            const auto res = crw::sweep(base, axes, jobs);
            int failed = 0;
            for (const auto& row : res.rows)
                if (!row.ok) ++failed;
            std::printf("sweep: %zu points (%d failed), summary at %s\n", res.rows.size(),
                        failed, res.summary_path.c_str());
        }
    } catch (const crw::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitParse;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolver;
    }
    return 0;
}
