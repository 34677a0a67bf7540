#include <catch2/catch.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "crwqed/model.hpp"
#include "crwqed/quadrature.hpp"

using namespace crw;

namespace {

// Independent density-of-states oracle: histogram of omega(k) over a dense
// uniform k grid, as a fraction per unit energy.
double dos_histogram(double delta, double J, double half_bin) {
    const int n = 1'000'000;
    long count = 0;
    for (int i = 0; i < n; ++i) {
        const double k = -M_PI + 2.0 * M_PI * (i + 0.5) / n;
        if (std::abs(2.0 * J * std::cos(k) - delta) < half_bin) ++count;
    }
    return static_cast<double>(count) / n / (2.0 * half_bin);
}

SystemSpec one_species(double omega_c, double J, int N, double omega, double V, int M,
                       int m) {
    SystemSpec sys;
    sys.waveguide = {omega_c, J, N, -1};
    sys.species = {EmitterSpecies{"A", omega, V, M, m}};
    return sys;
}

} // namespace

TEST_CASE("dispersion hits band center and edges", "[model]") {
    WaveguideSpec wg{1.3, 0.7, 101, -1};
    CHECK(dispersion(0.0, wg) == Approx(wg.omega_c + 2 * wg.hopping_J));
    CHECK(dispersion(M_PI / 2, wg) == Approx(wg.omega_c).margin(1e-15));
    CHECK(dispersion(M_PI, wg) == Approx(wg.omega_c - 2 * wg.hopping_J));
}

TEST_CASE("group velocity vanishes at edges, extremal at band center", "[model]") {
    WaveguideSpec wg{0.0, 0.7, 101, -1};
    CHECK(group_velocity(M_PI, wg) == Approx(0.0).margin(1e-12));
    CHECK(group_velocity(-M_PI, wg) == Approx(0.0).margin(1e-12));
    CHECK(group_velocity(-M_PI / 2, wg) == Approx(2 * wg.hopping_J));
    CHECK(group_velocity(0.0, wg) == Approx(0.0).margin(1e-15));

    // |v_g| <= 2J across the zone, extrema at +-pi/2
    for (int i = 0; i <= 200; ++i) {
        const double k = -M_PI + 2 * M_PI * i / 200.0;
        CHECK(std::abs(group_velocity(k, wg)) <= 2 * wg.hopping_J + 1e-12);
    }
}

TEST_CASE("density of states matches histogram oracle and closed values", "[model]") {
    const double J = 0.5;
    WaveguideSpec wg{0.0, J, 101, -1};

    // band center: 1/(2 pi J), consistent with Gamma(0) = M V^2 / J
    CHECK(density_of_states(0.0, wg) == Approx(1.0 / (2 * M_PI * J)).epsilon(1e-12));
    CHECK(density_of_states(0.0, wg) == Approx(dos_histogram(0.0, J, 0.002)).epsilon(2e-3));

    // delta = J closed form 1/(pi J sqrt(3))
    CHECK(density_of_states(J, wg) == Approx(1.0 / (M_PI * J * std::sqrt(3.0))).epsilon(1e-12));
    CHECK(density_of_states(J, wg) == Approx(dos_histogram(J, J, 0.002)).epsilon(2e-3));

    // grows monotonically toward the upper edge
    const double d1 = dos_histogram(1.5 * J, J, 0.002);
    const double d2 = dos_histogram(1.9 * J, J, 0.002);
    CHECK(density_of_states(1.5 * J, wg) > density_of_states(J, wg));
    CHECK(density_of_states(1.9 * J, wg) > density_of_states(1.5 * J, wg));
    CHECK(d2 > d1);

    CHECK_THROWS_AS(density_of_states(2.0 * J, wg), OutOfBandError);
    CHECK_THROWS_AS(density_of_states(-2.5 * J, wg), OutOfBandError);
}

TEST_CASE("density of states integrates to one", "[model]") {
    const double J = 0.8;
    WaveguideSpec wg{0.0, J, 101, -1};
    // delta = -2J cos(theta) keeps quadrature nodes strictly inside the band
    const double total = integrate(
        [&](double th) {
            return density_of_states(-2 * J * std::cos(th), wg) * 2 * J * std::sin(th);
        },
        0.0, M_PI, 64);
    CHECK(total == Approx(1.0).margin(1e-6));
}

TEST_CASE("bare waveguide Hamiltonian is tridiagonal", "[model]") {
    SystemSpec sys;
    sys.waveguide = {2.0, 0.5, 3, 1};
    const auto H = build_single_excitation_hamiltonian(sys);
    REQUIRE(H.mat.rows() == 3);
    Eigen::MatrixXd d = Eigen::MatrixXd(H.mat);
    Eigen::MatrixXd expect(3, 3);
    expect << 2.0, 0.5, 0.0, 0.5, 2.0, 0.5, 0.0, 0.5, 2.0;
    CHECK((d - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single emitter Hamiltonian couples only at x0", "[model]") {
    auto sys = one_species(2.0, 0.5, 3, 2.4, 0.3, 1, 1);
    sys.waveguide.coupling_site = 1;
    const auto H = build_single_excitation_hamiltonian(sys);
    REQUIRE(H.mat.rows() == 4);
    Eigen::MatrixXd d = Eigen::MatrixXd(H.mat);
    // row 0: emitter; rows 1..3: photon sites
    CHECK(d(0, 0) == 2.4);
    CHECK(d(0, 2) == 0.3); // x0 = 1 -> photon row 2
    CHECK(d(2, 0) == 0.3);
    CHECK(d(0, 1) == 0.0);
    CHECK(d(0, 3) == 0.0);
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Hamiltonian is exactly Hermitian for random systems", "[model][property]") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> ud(0.05, 1.0);
    std::uniform_int_distribution<int> mdist(1, 5);
    for (int trial = 0; trial < 20; ++trial) {
        SystemSpec sys;
        sys.waveguide = {ud(rng), ud(rng), 21 + 2 * mdist(rng), -1};
        const int n_species = 1 + (trial % 2);
        for (int i = 0; i < n_species; ++i) {
            EmitterSpecies s;
            s.label = i == 0 ? "A" : "B";
            s.omega = ud(rng);
            s.coupling_V = ud(rng);
            s.total = mdist(rng);
            s.excited = i == 0 ? 1 : 0;
            sys.species.push_back(s);
        }
        const auto H = build_single_excitation_hamiltonian(sys);
        Eigen::MatrixXd d = Eigen::MatrixXd(H.mat);
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);

        // row sparsity: <= 3 everywhere except the coupling-site row
        const int x0_row = H.index.photon_row(H.index.coupling_site);
        for (int r = 0; r < d.rows(); ++r) {
            const int nnz = static_cast<int>((d.row(r).array() != 0.0).count());
            if (r == x0_row)
                CHECK(nnz <= 3 + sys.total_emitters());
            else
                CHECK(nnz <= 3);
        }
    }
}

TEST_CASE("same-species emitters are interchangeable in the matrix", "[model][property]") {
    auto sys = one_species(0.0, 0.5, 31, 0.2, 0.15, 4, 2);
    const auto H = build_single_excitation_hamiltonian(sys);
    Eigen::MatrixXd d = Eigen::MatrixXd(H.mat);
    // swapping emitter rows/cols j <-> l leaves the matrix unchanged
    for (int j = 0; j < 4; ++j)
        for (int l = j + 1; l < 4; ++l) {
            Eigen::MatrixXd p = d;
            p.row(j).swap(p.row(l));
            p.col(j).swap(p.col(l));
            CHECK((p - d).cwiseAbs().maxCoeff() == 0.0);
        }
}

TEST_CASE("bound-state eigenvalues match the resonant closed form", "[model]") {
    // Delta = 0: out-of-band pair at omega_c +- sqrt(2J^2 + sqrt(4J^4 + V^4))
    const double J = 0.5, V = 0.3;
    auto sys = one_species(0.0, J, 401, 0.0, V, 1, 1);
    const auto H = build_single_excitation_hamiltonian(sys);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(H.mat),
                                                      Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    std::vector<double> outside;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev[i]) > 2 * J) outside.push_back(ev[i]);
    REQUIRE(outside.size() == 2);
    const double expect = std::sqrt(2 * J * J + std::sqrt(4 * std::pow(J, 4) + std::pow(V, 4)));
    CHECK(outside.front() == Approx(-expect).margin(1e-10));
    CHECK(outside.back() == Approx(expect).margin(1e-10));
}

TEST_CASE("initial state follows the equal-amplitude convention", "[model]") {
    {
        const auto psi = initial_state(one_species(0, 0.5, 11, 0.1, 0.2, 3, 1));
        CHECK(psi.emitter_amp(0, 0) == Complex(1.0, 0.0));
        CHECK(psi.emitter_amp(0, 1) == Complex(0.0, 0.0));
        CHECK(psi.emitter_amp(0, 2) == Complex(0.0, 0.0));
        for (int x = 0; x < 11; ++x) CHECK(psi.photon_amp(x) == Complex(0.0, 0.0));
    }
    {
        const auto psi = initial_state(one_species(0, 0.5, 11, 0.1, 0.2, 3, 3));
        const double a = 1.0 / std::sqrt(3.0);
        for (int j = 0; j < 3; ++j) CHECK(std::abs(psi.emitter_amp(0, j) - a) < 1e-15);
    }
    {
        const auto psi = initial_state(one_species(0, 0.5, 11, 0.1, 0.2, 5, 2));
        CHECK(psi.norm() == Approx(1.0).margin(1e-14));
        CHECK(psi.amp.size() == 11 + 5);
    }
}

TEST_CASE("initial state rejects unsupported excitation patterns", "[model]") {
    CHECK_THROWS_AS(initial_state(one_species(0, 0.5, 11, 0.1, 0.2, 3, 0)), InitialStateError);

    SystemSpec two = one_species(0, 0.5, 11, 0.1, 0.2, 3, 1);
    two.species.push_back(EmitterSpecies{"B", 0.2, 0.1, 2, 1});
    CHECK_THROWS_AS(initial_state(two), InitialStateError);
}

TEST_CASE("spec invariants are enforced", "[model]") {
    CHECK_THROWS_AS(WaveguideSpec({0.0, -0.5, 11, -1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(WaveguideSpec({0.0, 0.5, 2, -1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(WaveguideSpec({0.0, 0.5, 11, 11}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(EmitterSpecies({"A", 0.0, 0.1, 3, 4}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(EmitterSpecies({"A", 0.0, -0.1, 3, 1}).validate(), std::invalid_argument);

    SystemSpec dup = one_species(0, 0.5, 11, 0.1, 0.2, 3, 1);
    dup.species.push_back(EmitterSpecies{"A", 0.2, 0.1, 2, 0});
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
}
