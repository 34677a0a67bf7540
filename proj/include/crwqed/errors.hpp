// errors.hpp — exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace crw {

// Energy argument lies on or beyond the scattering band where the requested
// quantity is singular or undefined.
struct OutOfBandError : std::domain_error {
    using std::domain_error::domain_error;
};

// Complex energy sits on the branch cut (the band segment of the real axis).
struct BranchCutError : std::domain_error {
    using std::domain_error::domain_error;
};

// Requested evolution time exceeds the reflection-free window of the finite
// lattice and reflections were not explicitly allowed.
struct HorizonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integrator norm drift exceeded 10x the configured tolerance.
struct IntegratorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Amplitudes of same-role emitters diverged beyond the symmetry threshold;
// indicates a Hamiltonian or integrator bug, never a physical effect.
struct SymmetryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Initial condition outside the supported family (one excited species,
// equal-amplitude excited emitters).
struct InitialStateError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Scenario document error; `key` carries the offending key path.
struct ParseError : std::runtime_error {
    std::string key;
    ParseError(std::string key_path, const std::string& what)
        : std::runtime_error(key_path.empty() ? what : key_path + ": " + what),
          key(std::move(key_path)) {}
};

// Solver failure surfaced with scenario context attached.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace crw
