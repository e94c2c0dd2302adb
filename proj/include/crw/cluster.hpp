/*
 * cluster.hpp: declarative description of a scattering cluster: which
 * cavities sit between the two lead junctions and how they are wired
 * (one serial chain, a list of parallel channels, or N0 identical copies
 * of one channel). Builders cover the recurring laboratory shapes;
 * validate() reports structural problems without throwing so callers can
 * distinguish fatal errors from advisory flags.
 */

#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "types.hpp"

namespace crw {

struct Serial {
    std::vector<CavitySite> sites{};

    friend bool operator==(const Serial&, const Serial&) = default;
};

struct Parallel {
    std::vector<std::vector<CavitySite>> channels{};

    friend bool operator==(const Parallel&, const Parallel&) = default;
};

struct IdenticalParallel {
    std::vector<CavitySite> channel{};
    long copies = 1;

    friend bool operator==(const IdenticalParallel&,
                           const IdenticalParallel&) = default;
};

struct ClusterSpec {
    LatticeParams params{};
    std::variant<Serial, Parallel, IdenticalParallel> topology = Serial{};

    friend bool operator==(const ClusterSpec&, const ClusterSpec&) = default;
};

/// Structural problem found by validate(). Non-fatal entries flag physics
/// caveats (non-Hermitian sites) that downstream code must surface but may
/// proceed with.
struct Violation {
    std::string path;
    std::string message;
    bool fatal = true;
};

// ---------------------------------------------------------------------------
// Views
// ---------------------------------------------------------------------------

/// Channels as stored, without materializing identical copies. The
/// identical-parallel prototype appears once.
inline std::vector<const std::vector<CavitySite>*>
channel_views(const ClusterSpec& cluster) {
    std::vector<const std::vector<CavitySite>*> views;
    if (const auto* serial = std::get_if<Serial>(&cluster.topology)) {
        views.push_back(&serial->sites);
    } else if (const auto* par = std::get_if<Parallel>(&cluster.topology)) {
        for (const auto& channel : par->channels) {
            views.push_back(&channel);
        }
    } else {
        const auto& ident = std::get<IdenticalParallel>(cluster.topology);
        views.push_back(&ident.channel);
    }
    return views;
}

/// Fully materialized channel list; identical copies are expanded. Guarded
/// so a sweep-scale copy count cannot be fed to the dense network solver.
inline std::vector<std::vector<CavitySite>>
expanded_channels(const ClusterSpec& cluster, std::size_t max_sites = 100000) {
    std::vector<std::vector<CavitySite>> channels;
    if (const auto* serial = std::get_if<Serial>(&cluster.topology)) {
        channels.push_back(serial->sites);
    } else if (const auto* par = std::get_if<Parallel>(&cluster.topology)) {
        channels = par->channels;
    } else {
        const auto& ident = std::get<IdenticalParallel>(cluster.topology);
        if (ident.copies < 1) {
            throw Error("copies must be at least 1");
        }
        const std::size_t total =
            static_cast<std::size_t>(ident.copies) * ident.channel.size();
        if (total > max_sites) {
            throw Error("expanded cluster exceeds " +
                        std::to_string(max_sites) + " sites");
        }
        channels.assign(static_cast<std::size_t>(ident.copies), ident.channel);
    }
    return channels;
}

inline std::size_t total_sites(const ClusterSpec& cluster) {
    std::size_t total = 0;
    if (const auto* ident = std::get_if<IdenticalParallel>(&cluster.topology)) {
        return static_cast<std::size_t>(ident->copies) * ident->channel.size();
    }
    for (const auto* channel : channel_views(cluster)) {
        total += channel->size();
    }
    return total;
}

inline bool cluster_hermitian(const ClusterSpec& cluster) {
    for (const auto* channel : channel_views(cluster)) {
        for (const CavitySite& site : *channel) {
            if (!site.hermitian()) {
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Serial chain of `count` cavities all holding the same emitter.
inline ClusterSpec build_identical_chain(const LatticeParams& params,
                                         std::size_t count,
                                         const Emitter& atom) {
    ClusterSpec cluster{params, Serial{}};
    CavitySite site;
    site.emitter = atom;
    std::get<Serial>(cluster.topology).sites.assign(count, site);
    return cluster;
}

/// Two-species superlattice pattern: each element of `sequence` is 'A' or
/// 'B' and selects which atom the cavity hosts.
struct AtomPattern {
    std::string sequence;
    Emitter atom_a{};
    Emitter atom_b{};
};

inline ClusterSpec build_pattern_chain(const LatticeParams& params,
                                       const AtomPattern& pattern) {
    ClusterSpec cluster{params, Serial{}};
    auto& sites = std::get<Serial>(cluster.topology).sites;
    sites.reserve(pattern.sequence.size());
    for (char label : pattern.sequence) {
        if (label != 'A' && label != 'B') {
            throw Error("pattern labels must be 'A' or 'B'");
        }
        const Emitter& atom = (label == 'A') ? pattern.atom_a : pattern.atom_b;
        CavitySite site;
        site.emitter = atom;
        sites.push_back(site);
    }
    return cluster;
}

/// Ring: every branch is a single cavity at the lead energy, optionally
/// holding an emitter. Expressed as a parallel cluster of unit-length
/// channels so every evaluation path accepts it.
inline ClusterSpec build_ring(const LatticeParams& params,
                              const std::vector<std::optional<Emitter>>& arms) {
    ClusterSpec cluster{params, Parallel{}};
    auto& channels = std::get<Parallel>(cluster.topology).channels;
    channels.reserve(arms.size());
    for (const auto& arm : arms) {
        CavitySite site;
        site.emitter = arm;
        channels.push_back({site});
    }
    return cluster;
}

/// True when every channel is a single cavity pinned at the lead energy,
/// which is the shape the ring closed form covers.
inline bool is_ring(const ClusterSpec& cluster) {
    const auto* par = std::get_if<Parallel>(&cluster.topology);
    if (par == nullptr || par->channels.empty()) {
        return false;
    }
    for (const auto& channel : par->channels) {
        if (channel.size() != 1) {
            return false;
        }
        const CavitySite& site = channel.front();
        if (site.epsilon &&
            *site.epsilon != complex(cluster.params.omega, 0.0)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

inline void validate_channel(const std::vector<CavitySite>& channel,
                             const std::string& path,
                             std::vector<Violation>& out) {
    if (channel.empty()) {
        out.push_back({path, "channel must contain at least one site", true});
        return;
    }
    for (std::size_t j = 0; j < channel.size(); ++j) {
        const CavitySite& site = channel[j];
        const std::string site_path = path + "[" + std::to_string(j) + "]";
        if (site.emitter && site.emitter->coupling < 0.0) {
            out.push_back(
                {site_path + ".emitter.g", "coupling must be >= 0", true});
        }
        if (!site.hermitian()) {
            out.push_back({site_path + ".epsilon",
                           "site is non-Hermitian (Im epsilon != 0); "
                           "flux conservation does not apply",
                           false});
        }
    }
}

} // namespace detail

/// Collects structural violations; empty means valid. Entries with
/// fatal=false are advisories (currently only non-Hermitian sites).
inline std::vector<Violation> validate(const ClusterSpec& cluster) {
    std::vector<Violation> out;
    if (!(cluster.params.hopping > 0.0)) {
        out.push_back({"hopping", "hopping must be positive", true});
    }
    if (const auto* serial = std::get_if<Serial>(&cluster.topology)) {
        detail::validate_channel(serial->sites, "channels[0]", out);
    } else if (const auto* par = std::get_if<Parallel>(&cluster.topology)) {
        if (par->channels.empty()) {
            out.push_back(
                {"channels", "cluster must contain at least one channel", true});
        }
        for (std::size_t i = 0; i < par->channels.size(); ++i) {
            detail::validate_channel(par->channels[i],
                                     "channels[" + std::to_string(i) + "]", out);
        }
    } else {
        const auto& ident = std::get<IdenticalParallel>(cluster.topology);
        if (ident.copies < 1) {
            out.push_back({"copies", "copies must be >= 1", true});
        }
        detail::validate_channel(ident.channel, "channels[0]", out);
    }
    return out;
}

inline bool has_fatal(const std::vector<Violation>& violations) {
    for (const Violation& v : violations) {
        if (v.fatal) {
            return true;
        }
    }
    return false;
}

} // namespace crw
