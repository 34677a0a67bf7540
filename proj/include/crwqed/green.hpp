// green.hpp — lattice Green's function of the infinite cosine band.
//
// F(z) = lim_{N->inf} (1/N) sum_k 1/(z - omega_k) = 1 / sqrt((z-omega_c)^2 - 4J^2),
// with the branch fixed by F(z) -> 1/z at large |z|. Computed via the factored
// form sqrt(zt - 2J) * sqrt(zt + 2J) (zt = z - omega_c): the two principal-branch
// cuts cancel on (-inf, -2J], leaving a single cut on the band segment [-2J, 2J],
// which is exactly the physical branch cut.

#pragma once

#include <complex>
#include <cmath>

#include "crwqed/errors.hpp"
#include "crwqed/model.hpp"

namespace crw {

namespace detail {

// sqrt(zt - 2J) * sqrt(zt + 2J) with principal square roots.
inline Complex band_root(Complex zt, double J) {
    return std::sqrt(zt - 2.0 * J) * std::sqrt(zt + 2.0 * J);
}

inline bool on_band_segment(Complex zt, double J) {
    return zt.imag() == 0.0 && std::abs(zt.real()) <= 2.0 * J;
}

} // namespace detail

// F at complex energy z off the band segment.
inline Complex lattice_green_function(Complex z, const WaveguideSpec& wg) {
    const Complex zt = z - wg.omega_c;
    if (detail::on_band_segment(zt, wg.hopping_J))
        throw BranchCutError("lattice_green_function: z on the band segment; "
                             "use green_side_limit");
    return 1.0 / detail::band_root(zt, wg.hopping_J);
}

// dF/dz = -(z-omega_c) * F^3; same branch handling as F itself.
inline Complex lattice_green_derivative(Complex z, const WaveguideSpec& wg) {
    const Complex zt = z - wg.omega_c;
    if (detail::on_band_segment(zt, wg.hopping_J))
        throw BranchCutError("lattice_green_derivative: z on the band segment");
    const Complex f = 1.0 / detail::band_root(zt, wg.hopping_J);
    return -zt * f * f * f;
}

// F restricted to the real axis outside the band: real, sign(E - omega_c).
inline double green_real(double E, const WaveguideSpec& wg) {
    const double et = E - wg.omega_c;
    const double hw = wg.band_halfwidth();
    if (!(std::abs(et) > hw))
        throw BranchCutError("green_real: |E - omega_c| must be > 2J");
    const double r = 1.0 / std::sqrt(et * et - hw * hw);
    return et > 0.0 ? r : -r;
}

// d/dE of green_real; equals -(E-omega_c) * F^3 on either real branch.
inline double green_real_derivative(double E, const WaveguideSpec& wg) {
    const double f = green_real(E, wg);
    return -(E - wg.omega_c) * f * f * f;
}

// Side limit F(E +- i0) for E strictly inside the band. For the cosine band the
// principal-value (real) part vanishes identically, leaving
//   F(E +- i0) = -+ i / sqrt(4J^2 - (E-omega_c)^2) = -+ i * pi * D(E-omega_c).
// `side` is +1 for the upper side, -1 for the lower.
inline Complex green_side_limit(double E, int side, const WaveguideSpec& wg) {
    const double et = E - wg.omega_c;
    const double hw = wg.band_halfwidth();
    if (!(std::abs(et) < hw))
        throw OutOfBandError("green_side_limit: |E - omega_c| must be < 2J");
    const double mag = 1.0 / std::sqrt(hw * hw - et * et);
    return Complex(0.0, side >= 0 ? -mag : mag);
}

// f(y) = 1/(2J sqrt(1-y^2)): the side-limit magnitude at E - omega_c = 2Jy.
inline double cut_weight(double y, const WaveguideSpec& wg) {
    return 1.0 / (2.0 * wg.hopping_J * std::sqrt(1.0 - y * y));
}

} // namespace crw
