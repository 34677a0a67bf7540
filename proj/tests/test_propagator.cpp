#include <catch2/catch.hpp>

#include <cmath>
#include <complex>

#include "crwqed/model.hpp"
#include "crwqed/propagator.hpp"

using namespace crw;

namespace {

SystemSpec one_species(double J, int N, double omega, double V, int M, int m,
                       double omega_c = 0.0) {
    SystemSpec sys;
    sys.waveguide = {omega_c, J, N, -1};
    sys.species = {EmitterSpecies{"A", omega, V, M, m}};
    return sys;
}

Trajectory run(const SystemSpec& sys, double t_end, int samples,
               IntegratorOptions opts = {}, double dt_internal = 0.0) {
    const auto H = build_single_excitation_hamiltonian(sys);
    const auto psi0 = initial_state(sys);
    TimeGrid grid{0.0, t_end, samples, dt_internal};
    return evolve(H, psi0, grid, opts);
}

} // namespace

TEST_CASE("recurrence horizon arithmetic", "[propagator]") {
    SystemSpec sys = one_species(0.5, 2001, 0.0, 0.1, 1, 1);
    CHECK(recurrence_horizon(sys) == Approx(0.9 * 2000.0 / 1.0)); // 1800 / (2J)

    sys.waveguide.coupling_site = 0;
    CHECK(recurrence_horizon(sys) == 0.0);

    sys.waveguide.coupling_site = -1;
    sys.waveguide.num_sites = 4001;
    CHECK(recurrence_horizon(sys) == Approx(2.0 * 0.9 * 2000.0 / 1.0));
}

TEST_CASE("decoupled emitters evolve by a pure phase", "[propagator]") {
    const double omega = 0.3;
    const auto sys = one_species(0.5, 51, omega, 0.0, 3, 2);
    const auto traj = run(sys, 20.0, 41);
    const auto& be = excited_amplitude_series(traj, "A");
    const double a = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const Complex expect = a * std::polar(1.0, -omega * traj.times[i]);
        CHECK(std::abs(be[i] - expect) < 1e-10);
        CHECK(std::abs(std::abs(be[i]) - a) < 1e-10);
    }
}

TEST_CASE("excited amplitude starts at 1/sqrt(m) and spreads stay tiny", "[propagator]") {
    const auto sys = one_species(0.5, 201, 0.1, 0.12, 5, 3);
    const auto traj = run(sys, 80.0, 81);
    const auto& be = excited_amplitude_series(traj, "A");
    CHECK(std::abs(be.front() - 1.0 / std::sqrt(3.0)) < 1e-14);
    for (const double s : traj.spread_series) CHECK(s < kSpreadTol);
}

TEST_CASE("norm is conserved to the declared tolerance", "[propagator]") {
    const auto sys = one_species(0.5, 201, 0.2, 0.15, 4, 2);
    const auto traj = run(sys, 150.0, 151);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double budget = kDefaultNormTol * std::max(traj.times[i] * 1.0, 1.0);
        CHECK(std::abs(traj.norm_series[i] - 1.0) < budget);
    }
}

TEST_CASE("dark-difference law is exact up to integrator error", "[propagator]") {
    // b_exc(t) - b_unexc(t) = (1/sqrt m) e^{-i Omega t}, a pure dark-sector phase
    const double omega = 0.2;
    const auto sys = one_species(0.5, 201, omega, 0.1, 4, 2);
    const auto traj = run(sys, 80.0, 161);
    const auto& be = excited_amplitude_series(traj, "A");
    const auto& bu = traj.species[0].unexcited_amp;
    REQUIRE(bu.size() == be.size());
    const double a = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < be.size(); ++i) {
        const Complex expect = a * std::polar(1.0, -omega * traj.times[i]);
        CHECK(std::abs(be[i] - bu[i] - expect) < 1e-8);
    }
}

TEST_CASE("two-species dark-difference law holds per species", "[propagator]") {
    SystemSpec sys = one_species(0.5, 301, 0.3, 0.1, 5, 2);
    sys.species.push_back(EmitterSpecies{"B", 0.2, 0.1, 2, 0});
    const auto traj = run(sys, 100.0, 101);
    const auto& be = excited_amplitude_series(traj, "A");
    const auto& bu = traj.species[0].unexcited_amp;
    const double a = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < be.size(); ++i) {
        const Complex expect = a * std::polar(1.0, -0.3 * traj.times[i]);
        CHECK(std::abs(be[i] - bu[i] - expect) < 1e-8);
    }
    // species B never acquires emitter excitation symmetric-mode amplitude
    CHECK(traj.species[1].excited == 0);
    CHECK(traj.species[1].excited_amp.empty());
    REQUIRE_FALSE(traj.species[1].unexcited_amp.empty());
}

TEST_CASE("m = M leaves no unexcited series", "[propagator]") {
    const auto sys = one_species(0.5, 101, 0.0, 0.1, 3, 3);
    const auto traj = run(sys, 30.0, 31);
    CHECK(traj.species[0].unexcited_amp.empty());
    CHECK_FALSE(excited_amplitude_series(traj, "A").empty());
}

TEST_CASE("halving the internal step changes samples below 1e-6", "[propagator]") {
    const auto sys = one_species(0.5, 201, 0.0, 0.14, 4, 2);
    const auto coarse = run(sys, 60.0, 61);
    const auto fine = run(sys, 60.0, 61, {}, coarse.dt_internal_used / 2.0);
    const auto& b1 = excited_amplitude_series(coarse, "A");
    const auto& b2 = excited_amplitude_series(fine, "A");
    double worst = 0.0;
    for (std::size_t i = 0; i < b1.size(); ++i)
        worst = std::max(worst, std::abs(b1[i] - b2[i]));
    CHECK(worst < 1e-6);
    CHECK(worst > 0.0); // the step actually changed
}

TEST_CASE("results are lattice-size independent inside the horizon", "[propagator]") {
    const auto small = run(one_species(0.5, 401, 0.1, 0.12, 3, 1), 100.0, 101);
    const auto large = run(one_species(0.5, 801, 0.1, 0.12, 3, 1), 100.0, 101);
    const auto& b1 = excited_amplitude_series(small, "A");
    const auto& b2 = excited_amplitude_series(large, "A");
    double worst = 0.0;
    for (std::size_t i = 0; i < b1.size(); ++i)
        worst = std::max(worst, std::abs(b1[i] - b2[i]));
    CHECK(worst < 1e-8);
}

TEST_CASE("field snapshots are stored on request", "[propagator]") {
    const auto sys = one_species(0.5, 101, 0.0, 0.2, 2, 1);
    IntegratorOptions opts;
    opts.store_fields = true;
    const auto traj = run(sys, 30.0, 16, opts);
    REQUIRE(traj.field_snapshots.size() == traj.times.size());
    for (const auto& f : traj.field_snapshots) CHECK(f.size() == 101);
    CHECK(traj.field_snapshots.front().norm() == Approx(0.0).margin(1e-14));
    CHECK(traj.field_snapshots.back().norm() > 0.1); // photon actually emitted
}

TEST_CASE("observables do not depend on the coupling-site placement", "[propagator]") {
    // moving x0 off-center only shortens the reflection-free window
    SystemSpec centered = one_species(0.5, 401, 0.1, 0.12, 3, 2);
    SystemSpec shifted = centered;
    shifted.waveguide.coupling_site = 160; // nearer boundary at distance 160
    const double t_end = 0.9 * 2 * 160 - 10.0;
    const auto t1 = run(centered, t_end, 101);
    const auto t2 = run(shifted, t_end, 101);
    const auto& b1 = excited_amplitude_series(t1, "A");
    const auto& b2 = excited_amplitude_series(t2, "A");
    double worst = 0.0;
    for (std::size_t i = 0; i < b1.size(); ++i)
        worst = std::max(worst, std::abs(b1[i] - b2[i]));
    CHECK(worst < 1e-8);
}

TEST_CASE("horizon violations are rejected unless overridden", "[propagator]") {
    const auto sys = one_species(0.5, 101, 0.0, 0.1, 2, 1); // horizon = 0.9*100 = 90
    CHECK_THROWS_AS(run(sys, 120.0, 21), HorizonError);
    IntegratorOptions opts;
    opts.allow_reflections = true;
    CHECK_NOTHROW(run(sys, 120.0, 21, opts));
}

TEST_CASE("unstable step sizes trip the norm guard", "[propagator]") {
    const auto sys = one_species(0.5, 101, 0.0, 0.1, 2, 1);
    CHECK_THROWS_AS(run(sys, 80.0, 11, {}, 5.0), IntegratorError);
}

TEST_CASE("symmetry violations are reported, not silently returned", "[propagator]") {
    Trajectory traj;
    SpeciesSeries s;
    s.label = "A";
    s.total = 2;
    s.excited = 2;
    s.excited_amp = {Complex(0.7, 0.0)};
    traj.species.push_back(s);
    traj.spread_series = {1e-6}; // way above threshold
    CHECK_THROWS_AS(excited_amplitude_series(traj, "A"), SymmetryError);
    CHECK_THROWS_AS(excited_amplitude_series(traj, "B"), std::invalid_argument);
}

TEST_CASE("non-normalized or unexcited initial states are rejected", "[propagator]") {
    const auto sys = one_species(0.5, 101, 0.0, 0.1, 2, 1);
    const auto H = build_single_excitation_hamiltonian(sys);
    auto psi0 = initial_state(sys);
    psi0.amp *= 2.0;
    CHECK_THROWS_AS(evolve(H, psi0, TimeGrid{0.0, 10.0, 11}), InitialStateError);

    auto zero = initial_state(sys);
    zero.amp.setZero();
    zero.amp[zero.layout.photon_row(50)] = 1.0;
    CHECK_THROWS_AS(evolve(H, zero, TimeGrid{0.0, 10.0, 11}), InitialStateError);
}

TEST_CASE("time grid invariants", "[propagator]") {
    CHECK_THROWS_AS(TimeGrid({10.0, 5.0, 11}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({-1.0, 5.0, 11}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.0, 5.0, 1}).validate(), std::invalid_argument);
    CHECK_NOTHROW(TimeGrid({0.0, 5.0, 2}).validate());
}
