// runner.hpp — scenario execution: dual-solver runs, CSV + metadata output,
// solver cross-comparison and parameter sweeps.
//
// Output contract: one CSV per solver (`<name>_numeric.csv`, `<name>_analytic.csv`)
// with a fixed leading block t_2J,re_be,im_be,abs_be and solver-specific tail
// columns, plus a `<name>.meta` sidecar listing every resolved parameter.
// Identical configs produce byte-identical files.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "crwqed/analytic.hpp"
#include "crwqed/errors.hpp"
#include "crwqed/model.hpp"
#include "crwqed/propagator.hpp"
#include "crwqed/scenario.hpp"
#include "crwqed/version.hpp"

namespace crw {

inline constexpr int kSweepMaxPoints = 4096;

struct SolverRun {
    std::string solver; // "numeric" or "analytic"
    std::vector<double> t_2J;
    std::vector<Complex> be;
    std::vector<double> norm;              // numeric only
    std::vector<AmplitudeBreakdown> parts; // analytic only
    std::string csv_path;                  // set when written
};

struct RunResult {
    ScenarioConfig cfg;
    std::vector<SolverRun> runs;
    double horizon_2J = 0.0;
    double dt_internal_used = 0.0;
    std::string meta_path;

    const SolverRun* find(const std::string& solver) const {
        for (const auto& r : runs)
            if (r.solver == solver) return &r;
        return nullptr;
    }
};

enum class LawStatus { holds, oscillatory_holds, broken };

inline const char* to_string(LawStatus s) {
    switch (s) {
        case LawStatus::holds: return "holds";
        case LawStatus::oscillatory_holds: return "oscillatory-holds";
        case LawStatus::broken: return "broken";
    }
    return "?";
}

struct ComparisonReport {
    double max_abs_deviation = 0.0;
    double time_of_max_2J = 0.0;
    double plateau_estimate = 0.0;
    double plateau_predicted = 0.0;
    double plateau_error = 0.0;
    double oscillation_amplitude = 0.0;
    LawStatus law_status = LawStatus::holds;
};

// Windowed plateau estimator: mean of |b_e| over the final `frac` of the grid,
// oscillation amplitude = (max - min)/2 over the same window.
struct PlateauStats {
    double mean = 0.0;
    double oscillation = 0.0;
};

inline PlateauStats plateau_stats(const std::vector<double>& t_2J,
                                  const std::vector<Complex>& be, double frac = 0.2) {
    if (t_2J.empty() || t_2J.size() != be.size())
        throw std::invalid_argument("plateau_stats: empty or mismatched series");
    const double t_lo = t_2J.back() - frac * (t_2J.back() - t_2J.front());
    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t_2J.size(); ++i) {
        if (t_2J[i] < t_lo) continue;
        const double a = std::abs(be[i]);
        sum += a;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
        ++n;
    }
    return {sum / static_cast<double>(n), 0.5 * (hi - lo)};
}

inline LawStatus classify_law(double plateau_error, double oscillation) {
    if (plateau_error < 0.02) return LawStatus::holds;
    if (plateau_error < 0.05 && oscillation < 0.1) return LawStatus::oscillatory_holds;
    return LawStatus::broken;
}

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline const SpeciesConfig& excited_species_cfg(const ScenarioConfig& cfg) {
    for (const auto& s : cfg.species)
        if (s.m > 0) return s;
    throw SolverError("scenario '" + cfg.name + "': no excited species");
}

} // namespace detail

// Compute both requested solvers in memory; no files touched.
inline RunResult compute_scenario(const ScenarioConfig& cfg) {
    validate_scenario(cfg);
    RunResult res;
    res.cfg = cfg;

    const SystemSpec sys = cfg.to_system();
    res.horizon_2J = recurrence_horizon(sys); // 2J = 1 in scenario units

    if (cfg.solver_numeric) {
        if (cfg.t_max_2J > res.horizon_2J)
            throw SolverError("scenario '" + cfg.name + "': t_max_2J=" +
                              std::to_string(cfg.t_max_2J) + " exceeds the recurrence horizon " +
                              std::to_string(res.horizon_2J) + "; increase waveguide.N");
        SolverRun run;
        run.solver = "numeric";
        const auto H = build_single_excitation_hamiltonian(sys);
        const auto psi0 = initial_state(sys);
        Trajectory traj;
        try {
            traj = evolve(H, psi0, cfg.to_grid());
        } catch (const std::exception& e) {
            throw SolverError("scenario '" + cfg.name + "': " + e.what());
        }
        const int exc = sys.excited_species_index();
        const auto& be = excited_amplitude_series(traj, sys.species[exc].label);
        run.t_2J = traj.times; // raw time == t*2J here
        run.be = be;
        run.norm = traj.norm_series;
        res.dt_internal_used = traj.dt_internal_used;
        res.runs.push_back(std::move(run));
    }

    if (cfg.solver_analytic) {
        SolverRun run;
        run.solver = "analytic";
        try {
            const AnalyticSolution sol(sys);
            const TimeGrid grid = cfg.to_grid();
            run.t_2J.reserve(grid.num_samples);
            run.be.reserve(grid.num_samples);
            run.parts.reserve(grid.num_samples);
            for (int i = 0; i < grid.num_samples; ++i) {
                const double t = grid.t_start + (grid.t_end - grid.t_start) * i /
                                                    (grid.num_samples - 1);
                auto parts = sol.breakdown(t);
                run.t_2J.push_back(t);
                run.be.push_back(parts.total()); // omega_c = 0 in scenario units
                run.parts.push_back(std::move(parts));
            }
        } catch (const SolverError&) {
            throw;
        } catch (const std::exception& e) {
            throw SolverError("scenario '" + cfg.name + "': " + e.what());
        }
        res.runs.push_back(std::move(run));
    }
    return res;
}

namespace detail {

inline void write_csv(const std::string& path, const ScenarioConfig& cfg,
                      const SolverRun& run) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SolverError("cannot open output file " + path);
    const bool numeric = run.solver == "numeric";
    const bool with_norm = numeric && cfg.wants(OutputSeries::norm);
    const bool with_dark = !numeric && cfg.wants(OutputSeries::dark_term);
    const bool with_bound = !numeric && cfg.wants(OutputSeries::bound_terms);
    const bool with_cut = !numeric && cfg.wants(OutputSeries::cut_term);
    const bool with_trap = cfg.wants(OutputSeries::trapping_line);

    out << "t_2J,re_be,im_be,abs_be";
    if (with_norm) out << ",norm";
    if (with_dark) out << ",dark_re,dark_im";
    if (with_bound) out << ",bound_re,bound_im";
    if (with_cut) out << ",cut_re,cut_im";
    if (with_trap) out << ",trapping_line";
    out << "\n";

    const auto& sp = excited_species_cfg(cfg);
    const double trap = trapping_limit(sp.m, sp.M);
    for (std::size_t i = 0; i < run.t_2J.size(); ++i) {
        out << fmt17(run.t_2J[i]) << ',' << fmt17(run.be[i].real()) << ','
            << fmt17(run.be[i].imag()) << ',' << fmt17(std::abs(run.be[i]));
        if (with_norm) out << ',' << fmt17(run.norm[i]);
        if (with_dark)
            out << ',' << fmt17(run.parts[i].dark_term.real()) << ','
                << fmt17(run.parts[i].dark_term.imag());
        if (with_bound) {
            Complex b{0.0, 0.0};
            for (const auto& v : run.parts[i].bound_terms) b += v;
            out << ',' << fmt17(b.real()) << ',' << fmt17(b.imag());
        }
        if (with_cut)
            out << ',' << fmt17(run.parts[i].branch_cut_term.real()) << ','
                << fmt17(run.parts[i].branch_cut_term.imag());
        if (with_trap) out << ',' << fmt17(trap);
        out << "\n";
    }
}

inline void write_meta(const std::string& path, const RunResult& res) {
    const auto& cfg = res.cfg;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SolverError("cannot open output file " + path);
    out << "schema_version = " << kSchemaVersion << "\n";
    out << "engine_version = " << kEngineVersion << "\n";
    out << render_scenario(cfg);
    out << "resolved.coupling_site = " << cfg.num_sites / 2 << "\n";
    out << "resolved.horizon_2J = " << fmt17(res.horizon_2J) << "\n";
    if (cfg.solver_numeric) {
        out << "resolved.dt_internal_2J = " << fmt17(res.dt_internal_used) << "\n";
        out << "resolved.norm_tol = " << fmt17(kDefaultNormTol) << "\n";
    }
    if (cfg.solver_analytic) {
        out << "resolved.pole_residual_tol_2J = " << fmt17(kPoleResidualTol) << "\n";
        out << "resolved.cut_panels_floor = " << kCutBasePanelsFloor << "\n";
        out << "resolved.cut_panels_per_time = " << kCutPanelsPerTime << "\n";
    }
}

} // namespace detail

// Run and persist: one CSV per solver plus the metadata sidecar.
inline RunResult run_scenario(const ScenarioConfig& cfg) {
    RunResult res = compute_scenario(cfg);
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    for (auto& run : res.runs) {
        const std::string path =
            (fs::path(cfg.output_dir) / (cfg.name + "_" + run.solver + ".csv")).string();
        detail::write_csv(path, cfg, run);
        run.csv_path = path;
    }
    res.meta_path = (fs::path(cfg.output_dir) / (cfg.name + ".meta")).string();
    detail::write_meta(res.meta_path, res);
    return res;
}

// Cross-validate the two solvers and judge the trapping law. The plateau is
// estimated from the numeric run (the reference side of the pair).
inline ComparisonReport compare_runs(const RunResult& res) {
    const ScenarioConfig& cfg = res.cfg;
    const SolverRun* num = res.find("numeric");
    const SolverRun* ana = res.find("analytic");
    if (!num || !ana)
        throw SolverError("compare_runs: both solvers must be enabled");

    ComparisonReport rep;
    for (std::size_t i = 0; i < num->t_2J.size(); ++i) {
        const double d = std::abs(ana->be[i] - num->be[i]);
        if (d > rep.max_abs_deviation) {
            rep.max_abs_deviation = d;
            rep.time_of_max_2J = num->t_2J[i];
        }
    }
    const auto ps = plateau_stats(num->t_2J, num->be);
    const auto& sp = detail::excited_species_cfg(cfg);
    rep.plateau_estimate = ps.mean;
    rep.oscillation_amplitude = ps.oscillation;
    rep.plateau_predicted = trapping_limit(sp.m, sp.M);
    rep.plateau_error = std::abs(rep.plateau_estimate - rep.plateau_predicted);
    rep.law_status = classify_law(rep.plateau_error, rep.oscillation_amplitude);
    return rep;
}

inline ComparisonReport compare_solvers(const ScenarioConfig& cfg) {
    if (!cfg.solver_numeric || !cfg.solver_analytic)
        throw SolverError("compare_solvers: both solvers must be enabled");
    return compare_runs(compute_scenario(cfg));
}

// ------------------------------------------------------------------- sweeps

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

struct SweepRow {
    int index = 0;
    std::vector<std::pair<std::string, std::string>> assignment;
    bool ok = false;
    std::string error;
    double plateau_estimate = std::nan("");
    double plateau_predicted = std::nan("");
    double plateau_error = std::nan("");
    LawStatus law_status = LawStatus::broken;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::string summary_path;
};

// Cross product of the axes over the base config; each point runs independently
// (numeric solver preferred for the plateau, analytic used when numeric is off)
// and writes into its own subdirectory. Failures land in the row, never abort
// the sweep.
inline SweepResult sweep(const ScenarioConfig& base, const std::vector<SweepAxis>& axes,
                         int jobs = 0) {
    long total = 1;
    for (const auto& ax : axes) {
        if (ax.values.empty()) throw ParseError(ax.key, "sweep axis has no values");
        total *= static_cast<long>(ax.values.size());
        if (total > kSweepMaxPoints)
            throw ParseError(ax.key, "sweep grid exceeds " + std::to_string(kSweepMaxPoints) +
                                         " points");
    }

    SweepResult result;
    result.rows.resize(static_cast<std::size_t>(total));

    const auto point_config = [&](int index, SweepRow& row) {
        ScenarioConfig cfg = base;
        int rem = index;
        for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
            const int n = static_cast<int>(it->values.size());
            const std::string& v = it->values[static_cast<std::size_t>(rem % n)];
            row.assignment.emplace_back(it->key, v);
            apply_scenario_key(cfg, it->key, v);
            rem /= n;
        }
        std::reverse(row.assignment.begin(), row.assignment.end());
        char buf[32];
        std::snprintf(buf, sizeof(buf), "point_%04d", index);
        cfg.name = base.name + "_" + buf;
        cfg.output_dir = (std::filesystem::path(base.output_dir) / buf).string();
        return cfg;
    };

    std::atomic<int> next{0};
    const auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= total) return;
            SweepRow& row = result.rows[static_cast<std::size_t>(i)];
            row.index = i;
            try {
                ScenarioConfig cfg = point_config(i, row);
                validate_scenario(cfg);
                const RunResult res = run_scenario(cfg);
                const SolverRun* run = res.find("numeric");
                if (!run) run = res.find("analytic");
                const auto ps = plateau_stats(run->t_2J, run->be);
                const auto& sp = detail::excited_species_cfg(cfg);
                row.plateau_estimate = ps.mean;
                row.plateau_predicted = trapping_limit(sp.m, sp.M);
                row.plateau_error = std::abs(row.plateau_estimate - row.plateau_predicted);
                row.law_status = classify_law(row.plateau_error, ps.oscillation);
                row.ok = true;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        }
    };

    int n_threads = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(total)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    namespace fs = std::filesystem;
    fs::create_directories(base.output_dir);
    result.summary_path = (fs::path(base.output_dir) / "sweep_summary.csv").string();
    std::ofstream out(result.summary_path, std::ios::binary);
    if (!out) throw SolverError("cannot open " + result.summary_path);
    out << "index";
    for (const auto& ax : axes) out << ',' << ax.key;
    out << ",plateau_estimate,plateau_predicted,plateau_error,law_status,status,error\n";
    for (const auto& row : result.rows) {
        out << row.index;
        for (std::size_t a = 0; a < axes.size(); ++a)
            out << ',' << (a < row.assignment.size() ? row.assignment[a].second : "");
        out << ',' << detail::fmt17(row.plateau_estimate) << ','
            << detail::fmt17(row.plateau_predicted) << ','
            << detail::fmt17(row.plateau_error) << ','
            << (row.ok ? to_string(row.law_status) : "") << ','
            << (row.ok ? "ok" : "error") << ',';
        std::string msg = row.error;
        for (auto& c : msg)
            if (c == ',' || c == '\n') c = ';';
        out << msg << "\n";
    }
    return result;
}

} // namespace crw
