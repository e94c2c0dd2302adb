/*
 * types.hpp: shared domain types for single-photon transport in
 * coupled-resonator waveguide (CRW) clusters.
 *
 * Conventions (hbar = 1, lattice constant = 1):
 *   - A uniform CRW lead has mode frequency omega and nearest-neighbor
 *     photon hopping J > 0, giving the band E_k = omega - 2 J cos(k)
 *     for wavenumbers 0 < k < pi.
 *   - A scattering site is a cavity with bare energy epsilon (defaults
 *     to omega) and an optional two-level emitter (omega0, g) coupled
 *     Jaynes-Cummings style. In the single-excitation sector the emitter
 *     renormalizes the site energy by g^2 / (E_k - omega0).
 *   - All formulas are evaluated at J = 1 after dividing energies by J;
 *     reflectance and transmittance are invariant under that rescaling.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace crw {

using complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for all domain errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Wavenumber outside the open band interval (0, pi); the group velocity
/// vanishes at the edges and every amplitude formula becomes singular.
class BandEdgeError : public Error {
public:
    explicit BandEdgeError(double k)
        : Error("wavenumber k=" + std::to_string(k) +
                " outside the open interval (0, pi)"),
          k_(k) {}
    double wavenumber() const { return k_; }

private:
    double k_;
};

/// A non-finite value reached an operation that requires finite input.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// A site's emitter is resonant with the photon (detuning below tolerance);
/// the effective site energy diverges and the caller must take the analytic
/// total-reflection limit instead of evaluating the matrix recursion.
class ResonantPoleError : public Error {
public:
    explicit ResonantPoleError(std::size_t site_index)
        : Error("site " + std::to_string(site_index) +
                " is resonant (detuning below pole tolerance)"),
          site_(site_index) {}
    std::size_t site_index() const { return site_; }

private:
    std::size_t site_;
};

/// A channel matrix has |a| too small for the parallel-channel closed form,
/// which divides by a. Callers fall back to the brute-force network solver.
class DegenerateChannelError : public Error {
public:
    explicit DegenerateChannelError(std::size_t channel_index)
        : Error("channel " + std::to_string(channel_index) +
                " has a degenerate transfer matrix (|a| below tolerance)"),
          channel_(channel_index) {}
    std::size_t channel_index() const { return channel_; }

private:
    std::size_t channel_;
};

/// The ring denominator 1 - 2 gamma e^{ik} vanished. Reported, never
/// silently regularized.
class GammaPoleError : public Error {
public:
    using Error::Error;
};

/// The dense network system is numerically singular.
class SingularSystemError : public Error {
public:
    SingularSystemError(const std::string& what, double condition_estimate)
        : Error(what), cond_(condition_estimate) {}
    double condition_estimate() const { return cond_; }

private:
    double cond_;
};

/// Configuration document errors carry the offending document path,
/// e.g. "channels[1][2].emitter.g".
class ConfigError : public Error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class ConfigParseError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ConfigValidationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// ---------------------------------------------------------------------------
// Lattice and mode
// ---------------------------------------------------------------------------

/// Global lead parameters: cavity mode frequency omega and hopping J > 0.
struct LatticeParams {
    double omega = 0.0;
    double hopping = 1.0;

    friend bool operator==(const LatticeParams&, const LatticeParams&) = default;
};

/// A propagating lead mode: wavenumber k in (0, pi) and its band energy
/// E_k = omega - 2 J cos(k). Carries the lattice parameters it was built
/// from so downstream formulas can rescale by J.
struct ModeContext {
    double k = 0.0;
    double energy = 0.0;
    LatticeParams params{};
};

/// Band dispersion. Throws BandEdgeError for k outside the open band.
inline ModeContext dispersion(double k, const LatticeParams& params) {
    if (!(k > 0.0) || !(k < pi)) {
        throw BandEdgeError(k);
    }
    if (!(params.hopping > 0.0)) {
        throw Error("hopping must be positive");
    }
    return ModeContext{k, params.omega - 2.0 * params.hopping * std::cos(k),
                       params};
}

// ---------------------------------------------------------------------------
// Sites and emitters
// ---------------------------------------------------------------------------

/// Two-level emitter embedded in a cavity: transition frequency omega0 and
/// photon-atom coupling strength g >= 0.
struct Emitter {
    double transition_frequency = 0.0;
    double coupling = 0.0;

    friend bool operator==(const Emitter&, const Emitter&) = default;
};

/// One resonator of the scattering cluster. epsilon defaults to the global
/// omega when unset; a nonzero imaginary part marks the site non-Hermitian
/// and disables flux-conservation claims for any cluster containing it.
struct CavitySite {
    std::optional<complex> epsilon{};
    std::optional<Emitter> emitter{};

    complex site_energy(const LatticeParams& params) const {
        return epsilon.value_or(complex(params.omega, 0.0));
    }

    bool hermitian() const { return !epsilon || epsilon->imag() == 0.0; }

    friend bool operator==(const CavitySite&, const CavitySite&) = default;
};

/// Convenience constructors used throughout tests and builders.
inline CavitySite bare_site() { return CavitySite{}; }

inline CavitySite atom_site(double transition_frequency, double coupling) {
    return CavitySite{std::nullopt, Emitter{transition_frequency, coupling}};
}

} // namespace crw
