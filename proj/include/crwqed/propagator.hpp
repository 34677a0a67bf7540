// propagator.hpp — exact time evolution of the single-excitation Schrodinger
// equation on the finite chain. This is the numerical reference the closed-form
// solver is validated against, so nothing here may share code with it.
//
// Integrator: fixed-step classical RK4 on the split state psi = u + i v,
//   u' = H v,  v' = -H u,
// with the step chosen from a cheap spectral-radius bound. Fixed stepping keeps
// sampled output bit-for-bit reproducible across runs. The norm is monitored,
// never renormalized.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "crwqed/errors.hpp"
#include "crwqed/model.hpp"

namespace crw {

inline constexpr double kDefaultNormTol = 1e-8;  // per unit time 1/(2J)
inline constexpr double kSpreadTol = 1e-10;      // same-role amplitude agreement
inline constexpr double kHorizonSafety = 0.9;
inline constexpr double kStepFactor = 0.02;      // dt = kStepFactor / rho(H)

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    int num_samples = 2;
    double dt_internal = 0.0; // 0 = derive from the spectral-radius bound

    void validate() const {
        if (!(t_start >= 0.0) || !(t_end > t_start))
            throw std::invalid_argument("TimeGrid: need t_end > t_start >= 0");
        if (num_samples < 2)
            throw std::invalid_argument("TimeGrid: need at least 2 samples");
        if (dt_internal < 0.0)
            throw std::invalid_argument("TimeGrid: dt_internal must be >= 0");
    }
};

struct IntegratorOptions {
    double norm_tol = kDefaultNormTol;
    bool allow_reflections = false;
    bool store_fields = false;
};

struct SpeciesSeries {
    std::string label;
    int total = 0;
    int excited = 0;
    std::vector<Complex> excited_amp;   // common amplitude of the excited group
    std::vector<Complex> unexcited_amp; // empty when excited == total
};

struct Trajectory {
    std::vector<double> times; // raw units; multiply by 2J for figure units
    std::vector<SpeciesSeries> species;
    std::vector<double> norm_series;
    std::vector<double> spread_series; // max same-role deviation per sample
    std::vector<Eigen::VectorXcd> field_snapshots; // photon amplitudes, optional
    double dt_internal_used = 0.0;
    double norm_tol = kDefaultNormTol;
};

// Reflection-free window: time for the fastest wavefront (speed 2J) to reach
// the nearer boundary and come back, with a safety factor.
inline double recurrence_horizon(const SystemSpec& sys) {
    const auto& wg = sys.waveguide;
    const int x0 = wg.resolved_coupling_site();
    const int reach = std::min(x0, wg.num_sites - 1 - x0);
    return kHorizonSafety * (2.0 * reach) / (2.0 * wg.hopping_J);
}

namespace detail {

// rho(H) >= max eigenvalue magnitude: max|diag| + 2J + sqrt(sum_i M_i V_i^2).
// The coupling term is read off the coupling-site row of the matrix itself.
inline double spectral_radius_bound(const HamiltonianMatrix& H) {
    double max_diag = 0.0;
    for (int r = 0; r < H.mat.rows(); ++r)
        max_diag = std::max(max_diag, std::abs(H.mat.coeff(r, r)));
    double coupling_sq = 0.0;
    const int x0_row = H.index.photon_row(H.index.coupling_site);
    for (Eigen::SparseMatrix<double>::InnerIterator it(H.mat, x0_row); it; ++it)
        if (it.row() < H.index.photon_offset) coupling_sq += it.value() * it.value();
    return max_diag + 2.0 * H.waveguide.hopping_J + std::sqrt(coupling_sq);
}

struct EmitterGroups {
    std::vector<std::vector<int>> excited;   // rows per species
    std::vector<std::vector<int>> unexcited; // rows per species
};

// Partition emitters of each species by their initial amplitude. The supported
// family has one excited species whose excited emitters share one amplitude.
inline EmitterGroups partition_emitters(const StateVector& psi0) {
    const auto& idx = psi0.layout;
    EmitterGroups g;
    g.excited.resize(idx.num_species());
    g.unexcited.resize(idx.num_species());
    int excited_species = 0;
    for (std::size_t i = 0; i < idx.num_species(); ++i) {
        Complex ref(0, 0);
        for (int j = 0; j < idx.species_total[i]; ++j) {
            const Complex a = psi0.amp[idx.emitter_row(i, j)];
            if (std::abs(a) > 0.0) {
                if (g.excited[i].empty()) ref = a;
                else if (std::abs(a - ref) > 1e-12)
                    throw InitialStateError(
                        "evolve: excited emitters must share one amplitude");
                g.excited[i].push_back(idx.emitter_row(i, j));
            } else {
                g.unexcited[i].push_back(idx.emitter_row(i, j));
            }
        }
        if (!g.excited[i].empty()) ++excited_species;
    }
    if (excited_species == 0)
        throw InitialStateError("evolve: no emitter carries initial excitation");
    if (excited_species > 1)
        throw InitialStateError("evolve: more than one species initially excited");
    return g;
}

inline Complex group_amplitude(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                               const std::vector<int>& rows, double* spread) {
    const Complex ref(u[rows[0]], v[rows[0]]);
    for (std::size_t k = 1; k < rows.size(); ++k)
        *spread = std::max(*spread, std::abs(Complex(u[rows[k]], v[rows[k]]) - ref));
    return ref;
}

} // namespace detail

inline Trajectory evolve(const HamiltonianMatrix& H, const StateVector& psi0,
                         const TimeGrid& grid, const IntegratorOptions& opts = {}) {
    grid.validate();
    if (std::abs(psi0.norm() - 1.0) > 1e-9)
        throw InitialStateError("evolve: initial state must be normalized");

    const double two_J = 2.0 * H.waveguide.hopping_J;
    {
        SystemSpec probe; // horizon depends only on geometry and J
        probe.waveguide = H.waveguide;
        const double horizon = recurrence_horizon(probe);
        if (!opts.allow_reflections && grid.t_end > horizon)
            throw HorizonError("evolve: t_end exceeds the recurrence horizon (" +
                               std::to_string(horizon) +
                               "); enlarge the lattice or allow reflections");
    }

    const auto groups = detail::partition_emitters(psi0);
    const double rho = detail::spectral_radius_bound(H);
    const double sample_dt =
        (grid.t_end - grid.t_start) / (grid.num_samples - 1);
    double dt_target = grid.dt_internal > 0.0 ? grid.dt_internal : kStepFactor / rho;
    dt_target = std::min(dt_target, sample_dt);

    Trajectory traj;
    traj.norm_tol = opts.norm_tol;
    traj.times.reserve(static_cast<std::size_t>(grid.num_samples));
    traj.norm_series.reserve(static_cast<std::size_t>(grid.num_samples));
    traj.spread_series.reserve(static_cast<std::size_t>(grid.num_samples));
    for (std::size_t i = 0; i < psi0.layout.num_species(); ++i) {
        SpeciesSeries s;
        s.label = psi0.layout.species_label[i];
        s.total = psi0.layout.species_total[i];
        s.excited = static_cast<int>(groups.excited[i].size());
        traj.species.push_back(std::move(s));
    }

    const auto& M = H.mat;
    Eigen::VectorXd u = psi0.amp.real();
    Eigen::VectorXd v = psi0.amp.imag();
    Eigen::VectorXd k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;

    const auto record = [&](double t) {
        traj.times.push_back(t);
        double spread = 0.0;
        for (std::size_t i = 0; i < traj.species.size(); ++i) {
            auto& s = traj.species[i];
            if (!groups.excited[i].empty())
                s.excited_amp.push_back(
                    detail::group_amplitude(u, v, groups.excited[i], &spread));
            if (!groups.unexcited[i].empty())
                s.unexcited_amp.push_back(
                    detail::group_amplitude(u, v, groups.unexcited[i], &spread));
        }
        traj.spread_series.push_back(spread);
        const double norm = std::sqrt(u.squaredNorm() + v.squaredNorm());
        traj.norm_series.push_back(norm);
        const double elapsed_2J = (t - grid.t_start) * two_J;
        if (std::abs(norm - 1.0) > 10.0 * opts.norm_tol * std::max(elapsed_2J, 1.0))
            throw IntegratorError("evolve: norm drift " +
                                  std::to_string(std::abs(norm - 1.0)) +
                                  " at t=" + std::to_string(t) +
                                  " exceeds 10x tolerance");
        if (opts.store_fields) {
            const auto& idx = psi0.layout;
            Eigen::VectorXcd field(idx.num_sites);
            for (int x = 0; x < idx.num_sites; ++x)
                field[x] = Complex(u[idx.photon_row(x)], v[idx.photon_row(x)]);
            traj.field_snapshots.push_back(std::move(field));
        }
    };

    record(grid.t_start);
    double dt_used = dt_target;
    for (int s = 1; s < grid.num_samples; ++s) {
        const double t0 = grid.t_start + sample_dt * (s - 1);
        const double t1 = grid.t_start + sample_dt * s;
        const int nsub = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt_target - 1e-12)));
        const double dt = (t1 - t0) / nsub;
        dt_used = dt;
        for (int q = 0; q < nsub; ++q) {
            k1u = M * v;
            k1v = -(M * u);
            k2u = M * (v + (0.5 * dt) * k1v);
            k2v = -(M * (u + (0.5 * dt) * k1u));
            k3u = M * (v + (0.5 * dt) * k2v);
            k3v = -(M * (u + (0.5 * dt) * k2u));
            k4u = M * (v + dt * k3v);
            k4v = -(M * (u + dt * k3u));
            u += (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        record(t1);
    }
    traj.dt_internal_used = dt_used;
    return traj;
}

// Common amplitude series of the initially excited emitters of one species.
// Refuses to answer if the permutation symmetry ever degraded.
inline const std::vector<Complex>& excited_amplitude_series(const Trajectory& traj,
                                                            const std::string& label) {
    for (const auto& s : traj.species) {
        if (s.label != label) continue;
        if (s.excited < 1)
            throw InitialStateError("excited_amplitude_series: species " + label +
                                    " had no excited emitters");
        const double worst =
            traj.spread_series.empty()
                ? 0.0
                : *std::max_element(traj.spread_series.begin(), traj.spread_series.end());
        if (worst > kSpreadTol)
            throw SymmetryError("excited_amplitude_series: same-role spread " +
                                std::to_string(worst) + " exceeds threshold");
        return s.excited_amp;
    }
    throw std::invalid_argument("excited_amplitude_series: unknown species " + label);
}

} // namespace crw
