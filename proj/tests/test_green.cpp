#include <catch2/catch.hpp>

#include <cmath>
#include <complex>

#include "crwqed/green.hpp"

using namespace crw;

namespace {

// Brute-force finite-lattice sum (1/N) sum_k 1/(z - omega_k), uniform k grid.
// Independent of the closed form under test.
Complex green_sum(Complex z, double omega_c, double J, int n = 1'000'000) {
    Complex acc(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const double k = -M_PI + 2.0 * M_PI * (i + 0.5) / n;
        acc += 1.0 / (z - omega_c - 2.0 * J * std::cos(k));
    }
    return acc / static_cast<double>(n);
}

} // namespace

TEST_CASE("Green function matches the brute-force lattice sum off the band", "[green]") {
    const double J = 0.7, omega_c = 0.3;
    WaveguideSpec wg{omega_c, J, 101, -1};

    // z = omega_c + 10J -> 1/(J sqrt(96)); odd about the band center
    const double expect = 1.0 / (J * std::sqrt(96.0));
    const Complex above = lattice_green_function(Complex(omega_c + 10 * J, 0.0), wg);
    const Complex below = lattice_green_function(Complex(omega_c - 10 * J, 0.0), wg);
    CHECK(above.real() == Approx(expect).epsilon(1e-12));
    CHECK(above.imag() == Approx(0.0).margin(1e-14));
    CHECK(below.real() == Approx(-expect).epsilon(1e-12));

    const Complex oracle = green_sum(Complex(omega_c + 10 * J, 0.0), omega_c, J);
    CHECK(std::abs(above - oracle) < 1e-6);
    CHECK(std::abs(below - green_sum(Complex(omega_c - 10 * J, 0.0), omega_c, J)) < 1e-6);

    // generic complex arguments
    for (const Complex z : {Complex(0.9, 0.4), Complex(-1.1, -0.3), Complex(2.5, 1e-3)}) {
        const Complex zl = z + omega_c;
        CHECK(std::abs(lattice_green_function(zl, wg) - green_sum(zl, omega_c, J)) < 1e-5);
    }
}

TEST_CASE("Green function decays as 1/z at infinity", "[green]") {
    WaveguideSpec wg{0.0, 0.5, 101, -1};
    for (const Complex z : {Complex(1e8, 0.0), Complex(0.0, 1e8), Complex(-7e7, 3e7)}) {
        const Complex prod = z * lattice_green_function(z, wg);
        CHECK(std::abs(prod - 1.0) < 1e-12);
    }
}

TEST_CASE("real-branch values carry the sign of E - omega_c", "[green]") {
    WaveguideSpec wg{0.4, 0.6, 101, -1};
    CHECK(green_real(wg.omega_c + 1.3, wg) > 0.0);
    CHECK(green_real(wg.omega_c - 1.3, wg) < 0.0);
    CHECK(green_real(wg.omega_c + 1.3, wg) ==
          Approx(-green_real(wg.omega_c - 1.3, wg)).epsilon(1e-14));
    CHECK_THROWS_AS(green_real(wg.omega_c + 0.5, wg), BranchCutError);

    // derivative against a central difference
    const double E = wg.omega_c + 1.7, h = 1e-6;
    const double fd = (green_real(E + h, wg) - green_real(E - h, wg)) / (2 * h);
    CHECK(green_real_derivative(E, wg) == Approx(fd).epsilon(1e-7));
}

TEST_CASE("side limits recover the eta -> 0 limit of the lattice sum", "[green]") {
    const double J = 0.5, omega_c = 0.2;
    WaveguideSpec wg{omega_c, J, 101, -1};

    // E = omega_c: limit is -i/(2J), with zero real part by band symmetry
    const Complex at_center = green_side_limit(omega_c, +1, wg);
    CHECK(at_center.real() == 0.0);
    CHECK(at_center.imag() == Approx(-1.0 / (2 * J)).epsilon(1e-12));

    // eta-sequence oracle, linearly extrapolated from the two smallest values
    const Complex f2 = green_sum(Complex(omega_c, 1e-3 * J), omega_c, J, 4'000'000);
    const Complex f3 = green_sum(Complex(omega_c, 1e-4 * J), omega_c, J, 4'000'000);
    const Complex extrap = (1e-3 * f3 - 1e-4 * f2) / (1e-3 - 1e-4);
    CHECK(std::abs(extrap - at_center) < 1e-4);

    // off-center: magnitude equals f(y) = 1/(2J sqrt(1-y^2))
    const double y = 0.37;
    const Complex side = green_side_limit(omega_c + 2 * J * y, +1, wg);
    CHECK(std::abs(side) == Approx(cut_weight(y, wg)).epsilon(1e-12));

    // Schwarz reflection: lower side is the conjugate of the upper
    const Complex lower = green_side_limit(omega_c + 2 * J * y, -1, wg);
    CHECK(lower == std::conj(side));

    CHECK_THROWS_AS(green_side_limit(omega_c + 2 * J, +1, wg), OutOfBandError);
}

TEST_CASE("band segment is rejected as a branch cut", "[green]") {
    WaveguideSpec wg{0.0, 0.5, 101, -1};
    CHECK_THROWS_AS(lattice_green_function(Complex(0.3, 0.0), wg), BranchCutError);
    CHECK_THROWS_AS(lattice_green_derivative(Complex(-1.0, 0.0), wg), BranchCutError);
    CHECK_NOTHROW(lattice_green_function(Complex(1.0 + 1e-12, 0.0), wg));
}

TEST_CASE("complex conjugation symmetry holds off the cut", "[green][property]") {
    WaveguideSpec wg{0.1, 0.8, 101, -1};
    for (const Complex z : {Complex(0.4, 0.9), Complex(-2.0, 0.1), Complex(3.0, -2.0)}) {
        const Complex f = lattice_green_function(z, wg);
        const Complex fc = lattice_green_function(std::conj(z), wg);
        CHECK(std::abs(fc - std::conj(f)) < 1e-14);
        const Complex df = lattice_green_derivative(z, wg);
        // derivative consistency with a complex step
        const Complex h(1e-7, 0.0);
        const Complex fd =
            (lattice_green_function(z + h, wg) - lattice_green_function(z - h, wg)) / (2.0 * h);
        CHECK(std::abs(df - fd) < 1e-6 * std::max(1.0, std::abs(df)));
    }
}
