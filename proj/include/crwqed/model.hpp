// model.hpp — domain types for a coupled-resonator waveguide with point-like
// quantum emitters, plus band helpers and single-excitation Hamiltonian assembly.
//
// Conventions: hbar = 1, lattice constant = 1. The waveguide dispersion is
// omega(k) = omega_c + 2J cos(k), a cosine band of width 4J centered on omega_c.
// All M_i emitters of a species couple to the single resonator at coupling_site,
// so the single-excitation Hilbert space is {emitter excitations} + {photon sites}.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "crwqed/errors.hpp"

namespace crw {

using Complex = std::complex<double>;

// ----------------------------------------------------------- waveguide spec

struct WaveguideSpec {
    double omega_c = 0.0;   // resonator frequency (band center)
    double hopping_J = 0.5; // nearest-neighbour hopping, J > 0
    int num_sites = 2001;   // chain length N
    int coupling_site = -1; // emitter attachment point x0; -1 means N/2

    int resolved_coupling_site() const {
        return coupling_site < 0 ? num_sites / 2 : coupling_site;
    }
    double band_halfwidth() const { return 2.0 * hopping_J; }

    void validate() const {
        if (!(hopping_J > 0.0))
            throw std::invalid_argument("WaveguideSpec: hopping_J must be > 0");
        if (num_sites < 3)
            throw std::invalid_argument("WaveguideSpec: num_sites must be >= 3");
        const int x0 = resolved_coupling_site();
        if (x0 < 0 || x0 >= num_sites)
            throw std::invalid_argument("WaveguideSpec: coupling_site out of range");
    }
};

// ------------------------------------------------------------ emitter spec

struct EmitterSpecies {
    std::string label = "A";
    double omega = 0.0;     // transition frequency Omega_i
    double coupling_V = 0.0;
    int total = 1;          // M_i
    int excited = 0;        // m_i, number initially excited

    void validate() const {
        if (total < 1)
            throw std::invalid_argument("EmitterSpecies " + label + ": total must be >= 1");
        if (excited < 0 || excited > total)
            throw std::invalid_argument("EmitterSpecies " + label +
                                        ": excited must be in [0, total]");
        if (coupling_V < 0.0)
            throw std::invalid_argument("EmitterSpecies " + label + ": coupling_V must be >= 0");
    }
};

// ------------------------------------------------------------- system spec

struct SystemSpec {
    WaveguideSpec waveguide;
    std::vector<EmitterSpecies> species; // one or two entries

    // Detuning of species i from the band center.
    double detuning(std::size_t i) const { return species[i].omega - waveguide.omega_c; }

    int total_emitters() const {
        int n = 0;
        for (const auto& s : species) n += s.total;
        return n;
    }

    // Index of the unique species with excited > 0, or -1 if none.
    int excited_species_index() const {
        int found = -1;
        for (std::size_t i = 0; i < species.size(); ++i) {
            if (species[i].excited > 0) {
                if (found >= 0) return -2; // more than one
                found = static_cast<int>(i);
            }
        }
        return found;
    }

    // An empty species list is a bare waveguide: valid for spectra and
    // Hamiltonian assembly, rejected by initial_state and the solvers.
    void validate() const {
        waveguide.validate();
        if (species.size() > 2)
            throw std::invalid_argument("SystemSpec: at most 2 emitter species supported");
        for (const auto& s : species) s.validate();
        if (species.size() == 2 && species[0].label == species[1].label)
            throw std::invalid_argument("SystemSpec: species labels must be unique");
        for (std::size_t i = 0; i < species.size(); ++i)
            if (!std::isfinite(detuning(i)))
                throw std::invalid_argument("SystemSpec: detuning must be finite");
    }
};

// ------------------------------------------------------------- index layout
//
// Basis ordering: all emitter rows first (species-major, emitters in species
// order), then the N photon-site rows.

struct SystemIndex {
    std::vector<int> species_offset; // row of emitter (i, 0)
    std::vector<int> species_total;  // M_i
    std::vector<std::string> species_label;
    int photon_offset = 0;
    int num_sites = 0;
    int coupling_site = 0;
    int dim = 0;

    static SystemIndex build(const SystemSpec& sys) {
        SystemIndex idx;
        int off = 0;
        for (const auto& s : sys.species) {
            idx.species_offset.push_back(off);
            idx.species_total.push_back(s.total);
            idx.species_label.push_back(s.label);
            off += s.total;
        }
        idx.photon_offset = off;
        idx.num_sites = sys.waveguide.num_sites;
        idx.coupling_site = sys.waveguide.resolved_coupling_site();
        idx.dim = off + idx.num_sites;
        return idx;
    }

    int emitter_row(std::size_t species, int j) const {
        return species_offset[species] + j;
    }
    int photon_row(int x) const { return photon_offset + x; }
    std::size_t num_species() const { return species_offset.size(); }
};

// -------------------------------------------------------------- state vector

struct StateVector {
    Eigen::VectorXcd amp;
    SystemIndex layout;

    Complex emitter_amp(std::size_t species, int j) const {
        return amp[layout.emitter_row(species, j)];
    }
    Complex photon_amp(int x) const { return amp[layout.photon_row(x)]; }
    double norm() const { return amp.norm(); }
};

// --------------------------------------------------------------- Hamiltonian
//
// The single-excitation block is real symmetric: omega_c on photon sites,
// J on nearest-neighbour bonds (open chain), Omega_i on emitter rows and V_i
// between each emitter and the coupling-site row.

struct HamiltonianMatrix {
    Eigen::SparseMatrix<double> mat;
    SystemIndex index;
    WaveguideSpec waveguide;
};

// ------------------------------------------------------------- band helpers

// omega(k) = omega_c + 2J cos k, |k| <= pi.
inline double dispersion(double k, const WaveguideSpec& wg) {
    return wg.omega_c + 2.0 * wg.hopping_J * std::cos(k);
}

// v_g(k) = -2J sin k; vanishes at both band edges, extremal at band center.
inline double group_velocity(double k, const WaveguideSpec& wg) {
    return -2.0 * wg.hopping_J * std::sin(k);
}

// Density of states of the cosine band, D(delta) = 1 / (pi sqrt(4J^2 - delta^2))
// with delta measured from the band center. Singular at the edges, so those are
// rejected rather than returned as infinities.
inline double density_of_states(double delta, const WaveguideSpec& wg) {
    const double hw = wg.band_halfwidth();
    if (!(std::abs(delta) < hw))
        throw OutOfBandError("density_of_states: |delta| must be < 2J");
    return 1.0 / (M_PI * std::sqrt(hw * hw - delta * delta));
}

// --------------------------------------------------- Hamiltonian construction

inline HamiltonianMatrix build_single_excitation_hamiltonian(const SystemSpec& sys) {
    sys.validate();
    const SystemIndex idx = SystemIndex::build(sys);
    const auto& wg = sys.waveguide;
    const int x0_row = idx.photon_row(idx.coupling_site);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(3 * idx.dim));

    for (std::size_t i = 0; i < sys.species.size(); ++i) {
        const auto& sp = sys.species[i];
        for (int j = 0; j < sp.total; ++j) {
            const int row = idx.emitter_row(i, j);
            trip.emplace_back(row, row, sp.omega);
            if (sp.coupling_V != 0.0) {
                trip.emplace_back(row, x0_row, sp.coupling_V);
                trip.emplace_back(x0_row, row, sp.coupling_V);
            }
        }
    }
    for (int x = 0; x < idx.num_sites; ++x) {
        const int row = idx.photon_row(x);
        if (wg.omega_c != 0.0) trip.emplace_back(row, row, wg.omega_c);
        if (x + 1 < idx.num_sites) {
            trip.emplace_back(row, row + 1, wg.hopping_J);
            trip.emplace_back(row + 1, row, wg.hopping_J);
        }
    }

    HamiltonianMatrix H;
    H.index = idx;
    H.waveguide = wg;
    H.mat.resize(idx.dim, idx.dim);
    H.mat.setFromTriplets(trip.begin(), trip.end());
    H.mat.makeCompressed();
    return H;
}

// ---------------------------------------------------------------- initial state
//
// The first m_i emitters of the (single) excited species carry amplitude
// 1/sqrt(m_i); everything else, including all photon sites, starts at zero.

inline StateVector initial_state(const SystemSpec& sys) {
    sys.validate();
    const int exc = sys.excited_species_index();
    if (exc == -1)
        throw InitialStateError("initial_state: no species has excited emitters");
    if (exc == -2)
        throw InitialStateError(
            "initial_state: simultaneous excitation of two species is unsupported");

    StateVector psi;
    psi.layout = SystemIndex::build(sys);
    psi.amp = Eigen::VectorXcd::Zero(psi.layout.dim);
    const int m = sys.species[static_cast<std::size_t>(exc)].excited;
    const double a = 1.0 / std::sqrt(static_cast<double>(m));
    for (int j = 0; j < m; ++j)
        psi.amp[psi.layout.emitter_row(static_cast<std::size_t>(exc), j)] = a;
    return psi;
}

} // namespace crw
