/*
 * sweep.hpp: spectra over wavenumber, total-reflection window detection,
 * and randomized cross-validation of the closed forms against the dense
 * network solver.
 *
 * Dispatch: serial chains, general parallel clusters, identical-copy
 * bundles, and rings (parallel clusters of single bare-energy cavities)
 * each route to their closed form. A channel whose transfer matrix is too
 * degenerate for the general parallel form falls back to the network
 * solver for that row; both failing is reported, never papered over.
 *
 * Rows whose energy sits within the sweep pole window of an emitter line
 * are evaluated in the exact-resonance limit (the emitter is snapped onto
 * the line) rather than through a nearly-divergent site energy.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cluster.hpp"
#include "oracle.hpp"
#include "scattering.hpp"
#include "types.hpp"

namespace crw {

enum class Method { closed_form, oracle };

inline const char* method_name(Method m) {
    return m == Method::closed_form ? "closed-form" : "oracle";
}

/// A sweep row failed; carries the offending wavenumber.
class SweepRowError : public Error {
public:
    SweepRowError(double k, const std::string& inner)
        : Error("sweep row at k=" + std::to_string(k) + " failed: " + inner),
          k_(k) {}
    double wavenumber() const { return k_; }

private:
    double k_;
};

// ---------------------------------------------------------------------------
// Cluster evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::optional<Emitter>>
ring_arms(const ClusterSpec& cluster) {
    std::vector<std::optional<Emitter>> arms;
    const auto& channels = std::get<Parallel>(cluster.topology).channels;
    arms.reserve(channels.size());
    for (const auto& channel : channels) {
        arms.push_back(channel.front().emitter);
    }
    return arms;
}

} // namespace detail

/// Closed-form amplitudes for any supported topology.
inline ScatteringResult evaluate_closed_form(const ClusterSpec& cluster,
                                             const ModeContext& mode) {
    if (const auto* serial = std::get_if<Serial>(&cluster.topology)) {
        return serial_amplitudes(serial->sites, mode);
    }
    if (const auto* ident = std::get_if<IdenticalParallel>(&cluster.topology)) {
        return identical_parallel_amplitudes(ident->copies, ident->channel,
                                             mode);
    }
    if (is_ring(cluster)) {
        return ring_amplitudes(detail::ring_arms(cluster), mode);
    }
    return parallel_amplitudes(std::get<Parallel>(cluster.topology).channels,
                               mode);
}

inline ScatteringResult to_scattering_result(const NetworkSolution& sol) {
    return ScatteringResult{sol.r, sol.t_n, sol.reflectance,
                            sol.transmittance, sol.hermitian};
}

struct Evaluation {
    ScatteringResult result{};
    Method method = Method::closed_form;
};

/// Closed form first; a degenerate channel matrix falls back to the dense
/// network solver. Any other failure propagates.
inline Evaluation evaluate_with_fallback(const ClusterSpec& cluster,
                                         const ModeContext& mode) {
    try {
        return Evaluation{evaluate_closed_form(cluster, mode),
                          Method::closed_form};
    } catch (const DegenerateChannelError&) {
        return Evaluation{to_scattering_result(solve_network(cluster, mode)),
                          Method::oracle};
    }
}

// ---------------------------------------------------------------------------
// Emitter bookkeeping
// ---------------------------------------------------------------------------

/// Emitters in channel-major site order; the identical-parallel prototype
/// is listed once. Used for the detuning column and resonance snapping.
inline std::vector<Emitter> list_emitters(const ClusterSpec& cluster) {
    std::vector<Emitter> out;
    for (const auto* channel : channel_views(cluster)) {
        for (const CavitySite& site : *channel) {
            if (site.emitter) {
                out.push_back(*site.emitter);
            }
        }
    }
    return out;
}

namespace detail {

/// Snap every emitter within `window` of the row energy exactly onto it so
/// the evaluation takes the analytic resonance limit. Returns nothing when
/// no emitter is that close.
inline std::optional<ClusterSpec>
snap_resonant(const ClusterSpec& cluster, double energy, double window) {
    bool any = false;
    ClusterSpec snapped = cluster;
    auto snap_channel = [&](std::vector<CavitySite>& channel) {
        for (CavitySite& site : channel) {
            if (site.emitter &&
                std::abs(energy - site.emitter->transition_frequency) <
                    window) {
                site.emitter->transition_frequency = energy;
                any = true;
            }
        }
    };
    if (auto* serial = std::get_if<Serial>(&snapped.topology)) {
        snap_channel(serial->sites);
    } else if (auto* par = std::get_if<Parallel>(&snapped.topology)) {
        for (auto& channel : par->channels) {
            snap_channel(channel);
        }
    } else {
        snap_channel(std::get<IdenticalParallel>(snapped.topology).channel);
    }
    if (!any) {
        return std::nullopt;
    }
    return snapped;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepSpec {
    ClusterSpec cluster{};
    double k_min = 0.0;
    double k_max = 0.0;
    int points = 0;
    /// Index into list_emitters(cluster) used for the detuning column.
    std::optional<std::size_t> reference_emitter{};
};

struct SpectrumRow {
    double k = 0.0;
    double energy = 0.0;
    std::optional<double> detuning{};
    double reflectance = 0.0;
    double transmittance = 0.0;
    Method method = Method::closed_form;
};

struct SpectrumRecord {
    std::vector<SpectrumRow> rows{};
};

inline constexpr double sweep_pole_window = 1e-9;

inline SpectrumRecord sweep_k(const SweepSpec& spec) {
    if (spec.points < 2) {
        throw Error("sweep needs at least 2 points");
    }
    if (!(spec.k_min > 0.0) || !(spec.k_max < pi) ||
        !(spec.k_min < spec.k_max)) {
        throw BandEdgeError(spec.k_min < spec.k_max ? spec.k_min : spec.k_max);
    }
    const std::vector<Emitter> emitters = list_emitters(spec.cluster);
    std::optional<double> reference;
    if (spec.reference_emitter) {
        if (*spec.reference_emitter >= emitters.size()) {
            throw Error("reference emitter index out of range");
        }
        reference = emitters[*spec.reference_emitter].transition_frequency;
    }

    SpectrumRecord record;
    record.rows.reserve(static_cast<std::size_t>(spec.points));
    for (int i = 0; i < spec.points; ++i) {
        const double frac =
            static_cast<double>(i) / static_cast<double>(spec.points - 1);
        const double k = spec.k_min + frac * (spec.k_max - spec.k_min);
        try {
            const ModeContext mode = dispersion(k, spec.cluster.params);
            const std::optional<ClusterSpec> snapped =
                detail::snap_resonant(spec.cluster, mode.energy,
                                      sweep_pole_window);
            const Evaluation eval = evaluate_with_fallback(
                snapped ? *snapped : spec.cluster, mode);
            SpectrumRow row;
            row.k = k;
            row.energy = mode.energy;
            if (reference) {
                row.detuning = mode.energy - *reference;
            }
            row.reflectance = eval.result.reflectance;
            row.transmittance = eval.result.transmittance;
            row.method = eval.method;
            record.rows.push_back(row);
        } catch (const Error& e) {
            throw SweepRowError(k, e.what());
        }
    }
    return record;
}

// ---------------------------------------------------------------------------
// Total-reflection windows
// ---------------------------------------------------------------------------

/// Contiguous region of a spectrum with R above a threshold. Edges are
/// linearly interpolated between the bracketing rows; slopes are the
/// finite differences of R over k across those same brackets.
struct ReflectionWindow {
    double k_lo = 0.0;
    double k_hi = 0.0;
    double max_reflectance = 0.0;
    double slope_lo = 0.0;
    double slope_hi = 0.0;
};

inline std::vector<ReflectionWindow>
find_windows(const SpectrumRecord& record, double threshold) {
    if (!(threshold > 0.0) || !(threshold < 1.0)) {
        throw Error("window threshold must lie in (0, 1)");
    }
    const auto& rows = record.rows;
    std::vector<ReflectionWindow> windows;
    std::size_t i = 0;
    while (i < rows.size()) {
        if (!(rows[i].reflectance > threshold)) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < rows.size() && rows[i].reflectance > threshold) {
            ++i;
        }
        const std::size_t end = i; // run is [begin, end)

        auto slope_between = [&](std::size_t lo, std::size_t hi) {
            return (rows[hi].reflectance - rows[lo].reflectance) /
                   (rows[hi].k - rows[lo].k);
        };
        auto cross = [&](std::size_t lo, std::size_t hi) {
            // k where the R polyline crosses the threshold in [lo, hi]
            const double dr = rows[hi].reflectance - rows[lo].reflectance;
            const double f = (threshold - rows[lo].reflectance) / dr;
            return rows[lo].k + f * (rows[hi].k - rows[lo].k);
        };

        ReflectionWindow w;
        if (begin == 0) {
            w.k_lo = rows.front().k;
            w.slope_lo = rows.size() > 1 ? slope_between(0, 1) : 0.0;
        } else {
            w.k_lo = cross(begin - 1, begin);
            w.slope_lo = slope_between(begin - 1, begin);
        }
        if (end == rows.size()) {
            w.k_hi = rows.back().k;
            w.slope_hi =
                rows.size() > 1 ? slope_between(rows.size() - 2,
                                                rows.size() - 1)
                                : 0.0;
        } else {
            w.k_hi = cross(end - 1, end);
            w.slope_hi = slope_between(end - 1, end);
        }
        for (std::size_t j = begin; j < end; ++j) {
            w.max_reflectance = std::max(w.max_reflectance,
                                         rows[j].reflectance);
        }
        windows.push_back(w);
    }
    return windows;
}

// ---------------------------------------------------------------------------
// Randomized verification
// ---------------------------------------------------------------------------

struct VerificationReport {
    int samples = 0;
    std::uint64_t seed = 0;
    double max_abs_dr = 0.0;
    double max_abs_dt = 0.0;
    double worst_k = 0.0;
};

namespace detail {

/// Uniform double in [0, 1) from raw engine bits; bit-stable across
/// platforms, unlike std::uniform_real_distribution.
inline double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Wavenumber admissibility for closed-form-vs-network comparison: the
/// energy must clear every emitter line and every channel matrix must be
/// comfortably non-degenerate, otherwise both routes lose digits (or the
/// network becomes underdetermined) for reasons the comparison is not
/// about.
inline bool comparison_admissible(const ClusterSpec& cluster,
                                  const ModeContext& mode) {
    const double margin = 0.05 * mode.params.hopping;
    for (const Emitter& em : list_emitters(cluster)) {
        if (std::abs(mode.energy - em.transition_frequency) < margin) {
            return false;
        }
    }
    for (const auto* channel : channel_views(cluster)) {
        const std::vector<AlphaTerm> terms = channel_alphas(*channel, mode);
        const ScaledMatrix s = scaled_product(terms, 0, terms.size());
        if (std::abs(s.m.a) < 1e-6 * s.m.max_abs()) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Compares closed-form and network amplitudes on a jittered uniform grid
/// of wavenumbers in (0, pi), deterministically re-drawing any point that
/// lands in a pole or degeneracy neighborhood. Identical inputs produce
/// identical reports.
inline VerificationReport verify_against_oracle(const ClusterSpec& cluster,
                                                int samples,
                                                std::uint64_t seed) {
    if (samples < 1) {
        throw Error("verification needs at least 1 sample");
    }
    const double k_lo = 0.02;
    const double k_hi = pi - 0.02;
    const double cell = (k_hi - k_lo) / static_cast<double>(samples);

    std::mt19937_64 rng(seed);
    VerificationReport report;
    report.samples = samples;
    report.seed = seed;

    for (int s = 0; s < samples; ++s) {
        bool done = false;
        for (int attempt = 0; attempt < 256 && !done; ++attempt) {
            // Stratified draw from this grid cell first; if the cell sits
            // inside an excluded neighborhood, fall back to the full band.
            const double u = detail::next_unit(rng);
            const double k =
                attempt < 64
                    ? k_lo + (static_cast<double>(s) + u) * cell
                    : k_lo + u * (k_hi - k_lo);
            ModeContext mode;
            try {
                mode = dispersion(k, cluster.params);
            } catch (const BandEdgeError&) {
                continue;
            }
            if (!detail::comparison_admissible(cluster, mode)) {
                continue;
            }
            ScatteringResult closed;
            NetworkSolution network;
            try {
                closed = evaluate_closed_form(cluster, mode);
                network = solve_network(cluster, mode);
            } catch (const DegenerateChannelError&) {
                continue;
            } catch (const SingularSystemError&) {
                continue;
            }
            const double dr = std::abs(closed.r - network.r);
            const double dt = std::abs(closed.t_n - network.t_n);
            if (std::max(dr, dt) >
                std::max(report.max_abs_dr, report.max_abs_dt)) {
                report.worst_k = k;
            }
            report.max_abs_dr = std::max(report.max_abs_dr, dr);
            report.max_abs_dt = std::max(report.max_abs_dt, dt);
            done = true;
        }
        if (!done) {
            throw Error("verification could not find an admissible "
                        "wavenumber in grid cell " +
                        std::to_string(s));
        }
    }
    return report;
}

} // namespace crw
