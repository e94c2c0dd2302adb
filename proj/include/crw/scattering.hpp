/*
 * scattering.hpp: closed-form single-photon scattering amplitudes for
 * clusters of coupled-resonator channels side-coupled between two CRW leads.
 *
 * Geometry: the left lead occupies sites ... -2, -1 and the right lead
 * N, N+1, ... ; between them sit m parallel channels, channel i holding
 * n_i cavities in series. Both junction cavities (lead sites -1 and N)
 * are plain lead cavities at energy omega.
 *
 * Ansatz: psi(x) = e^{ikx} + r e^{ikx * (-1)} on the left lead and
 * psi(x) = t e^{ikx} on the right; t_N = t e^{ik(N-1)} is the amplitude
 * referenced to the last cluster site, so |r|^2 + |t_N|^2 = 1 for
 * Hermitian clusters. Junction matching gives
 *     sum_i psi_i(0)       = 1 + r,
 *     sum_i psi_i(n_i - 1) = t_N,
 * and inside a channel the stationary equation is the two-term recursion
 *     psi(j+1) = alpha_j psi(j) - psi(j-1),
 * with the dimensionless effective site energy
 *     alpha_j = (epsilon_j - E_k)/J + g_j^2 / (J (E_k - omega0_j)).
 *
 * The recursion is a 2x2 transfer matrix with unit determinant; all
 * amplitude formulas below exploit det = 1 analytically instead of
 * forming a*d - b*c, which cancels catastrophically for long or
 * near-resonant channels. A channel whose matrix entries overflow is
 * rescaled on the fly; only the overall scale of t_N is affected and it
 * is restored from the accumulated log scale.
 *
 * A site whose emitter is exactly resonant (E_k = omega0) acts as a hard
 * wall: the diverging alpha forces psi = 0 there. Amplitudes in that limit
 * come from the partial matrix products on either side of the wall; a
 * serial chain then reflects perfectly, and a parallel channel with a wall
 * still conducts through its siblings.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "types.hpp"

namespace crw {

// ---------------------------------------------------------------------------
// Effective site energy
// ---------------------------------------------------------------------------

/// Dimensionless effective site energy alpha for one cavity at a given mode.
/// When pole_flag is set the emitter term diverges and alpha holds only the
/// finite bare part; callers must branch to the hard-wall limit.
struct AlphaTerm {
    complex alpha{};
    double detuning = 0.0; // E_k - omega0; zero when the site has no emitter
    bool pole_flag = false;
};

inline double pole_tolerance(const ModeContext& mode) {
    return 1e-12 * std::max(1.0, std::abs(mode.energy));
}

inline AlphaTerm effective_alpha(const CavitySite& site,
                                 const ModeContext& mode) {
    const double j_hop = mode.params.hopping;
    AlphaTerm term;
    term.alpha = (site.site_energy(mode.params) - mode.energy) / j_hop;
    if (site.emitter) {
        const Emitter& em = *site.emitter;
        term.detuning = mode.energy - em.transition_frequency;
        if (std::abs(term.detuning) < pole_tolerance(mode)) {
            term.pole_flag = true;
        } else {
            term.alpha += em.coupling * em.coupling / (j_hop * term.detuning);
        }
    }
    if (!std::isfinite(term.alpha.real()) || !std::isfinite(term.alpha.imag())) {
        throw NonFiniteError("effective site energy is not finite");
    }
    return term;
}

// ---------------------------------------------------------------------------
// Transfer matrices
// ---------------------------------------------------------------------------

/// 2x2 complex matrix [[a, b], [c, d]] propagating (psi(j+1), psi(j)) from
/// (psi(0), psi(-1)) along a channel. Products of elementary matrices have
/// unit determinant.
struct TransferMatrix {
    complex a{}, b{}, c{}, d{};

    complex det() const { return a * d - b * c; }

    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)),
                        std::max(std::abs(c), std::abs(d)));
    }
};

/// Single-site step [[alpha, -1], [1, 0]].
inline TransferMatrix elementary_matrix(complex alpha) {
    return TransferMatrix{alpha, complex(-1.0), complex(1.0), complex(0.0)};
}

namespace detail {

inline std::vector<AlphaTerm> channel_alphas(std::span<const CavitySite> sites,
                                             const ModeContext& mode) {
    std::vector<AlphaTerm> terms;
    terms.reserve(sites.size());
    for (const CavitySite& site : sites) {
        terms.push_back(effective_alpha(site, mode));
    }
    return terms;
}

/// Transfer matrix with an exponent split off: true matrix = m * e^{log_scale}.
/// Keeps long or near-resonant channels inside double range; amplitude
/// ratios (r, b/a, c/a) are scale-free, and t_N restores the scale once.
struct ScaledMatrix {
    TransferMatrix m{complex(1.0), complex(0.0), complex(0.0), complex(1.0)};
    double log_scale = 0.0;
};

inline void rescale_if_large(ScaledMatrix& s) {
    const double mag = s.m.max_abs();
    if (mag > 1e140) {
        s.m.a /= mag;
        s.m.b /= mag;
        s.m.c /= mag;
        s.m.d /= mag;
        s.log_scale += std::log(mag);
    }
}

/// Product E(alpha_{last}) * ... * E(alpha_{first}) over terms[first, last).
/// Empty range yields the identity.
inline ScaledMatrix scaled_product(std::span<const AlphaTerm> terms,
                                   std::size_t first, std::size_t last) {
    ScaledMatrix s;
    if (first >= last) {
        return s;
    }
    s.m = elementary_matrix(terms[first].alpha);
    for (std::size_t n = first + 1; n < last; ++n) {
        const complex an = terms[n].alpha;
        const TransferMatrix prev = s.m;
        s.m.a = an * prev.a - prev.c;
        s.m.b = an * prev.b - prev.d;
        s.m.c = prev.a;
        s.m.d = prev.b;
        rescale_if_large(s);
    }
    return s;
}

inline bool all_hermitian(std::span<const CavitySite> sites) {
    for (const CavitySite& site : sites) {
        if (!site.hermitian()) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Full channel matrix: the ordered elementary-matrix product
///     M = E(alpha_{n-1}) * ... * E(alpha_0),
/// built by the entry recursion (a, b, c, d) -> (alpha a - c, alpha b - d,
/// a, b) seeded with (alpha_0, -1, 1, 0). Throws ResonantPoleError when any
/// site is at its emitter pole; the matrix does not exist in that limit.
inline TransferMatrix channel_matrix(std::span<const CavitySite> sites,
                                     const ModeContext& mode) {
    if (sites.empty()) {
        throw Error("channel must contain at least one site");
    }
    const std::vector<AlphaTerm> terms = detail::channel_alphas(sites, mode);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].pole_flag) {
            throw ResonantPoleError(i);
        }
    }
    TransferMatrix m = elementary_matrix(terms[0].alpha);
    for (std::size_t n = 1; n < terms.size(); ++n) {
        const complex an = terms[n].alpha;
        const TransferMatrix prev = m;
        m.a = an * prev.a - prev.c;
        m.b = an * prev.b - prev.d;
        m.c = prev.a;
        m.d = prev.b;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Scattering results
// ---------------------------------------------------------------------------

/// Scattering amplitudes at one mode. r is referenced to lead site -1 and
/// t_N to the last cluster column, so R + T = 1 whenever hermitian is true.
struct ScatteringResult {
    complex r{};
    complex t_n{};
    double reflectance = 0.0;
    double transmittance = 0.0;
    bool hermitian = true;
};

namespace detail {

inline ScatteringResult make_result(complex r, complex t_n, bool hermitian) {
    return ScatteringResult{r, t_n, std::norm(r), std::norm(t_n), hermitian};
}

/// Hard-wall serial limit: with the first resonant site at index p, psi
/// vanishes there, and the partial product R over sites [0, p) closes the
/// left lead on itself:  r = -(R_a + R_b e^{-ik}) / (R_a + R_b e^{ik}).
inline ScatteringResult serial_wall_limit(std::span<const AlphaTerm> terms,
                                          std::size_t wall,
                                          const ModeContext& mode,
                                          bool hermitian) {
    const ScaledMatrix pre = scaled_product(terms, 0, wall);
    const complex u = pre.m.a;
    const complex v = pre.m.b;
    const complex phase(std::cos(mode.k), std::sin(mode.k));
    const complex den = u + v * phase;
    if (std::abs(den) < 1e-14 * std::max(std::abs(u), std::abs(v))) {
        throw DegenerateChannelError(0);
    }
    const complex num = u + v * std::conj(phase);
    return make_result(-num / den, complex(0.0), hermitian);
}

} // namespace detail

/// Reflection and transmission of a single serial chain (m = 1).
inline ScatteringResult serial_amplitudes(std::span<const CavitySite> sites,
                                          const ModeContext& mode) {
    if (sites.empty()) {
        throw Error("channel must contain at least one site");
    }
    const std::vector<AlphaTerm> terms = detail::channel_alphas(sites, mode);
    const bool hermitian = detail::all_hermitian(sites);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].pole_flag) {
            return detail::serial_wall_limit(terms, i, mode, hermitian);
        }
    }
    const detail::ScaledMatrix s =
        detail::scaled_product(terms, 0, terms.size());
    const TransferMatrix& m = s.m;
    const complex eik(std::cos(mode.k), std::sin(mode.k));
    const complex emk = std::conj(eik);
    const complex den = m.a + (m.b - m.c) * eik - m.d * eik * eik;
    const complex num = -m.a - m.b * emk + m.c * eik + m.d;
    // det(M) = 1 exactly; t_N = -2i sin(k) / den restores the split scale.
    const complex t_n = complex(0.0, -2.0 * std::sin(mode.k)) / den *
                        std::exp(-s.log_scale);
    return detail::make_result(num / den, t_n, hermitian);
}

// ---------------------------------------------------------------------------
// Parallel clusters
// ---------------------------------------------------------------------------

/// Channel-summed aggregates entering the parallel closed form:
///   P  = sum 1 / a_i            Q  = -sum b_i / a_i
///   Pp = sum c_i / a_i          Qp = sum det_i / a_i  (= P for unit det)
/// A channel at its emitter pole contributes the hard-wall limits
/// P_i = Qp_i = 0, Q_i = -Rb/Ra, Pp_i = Lc/La, where R and L are the
/// partial products before the first and after the last wall site.
struct ParallelAggregates {
    complex p{};
    complex q{};
    complex p_prime{};
    complex q_prime{};
};

namespace detail {

struct ChannelContribution {
    complex p{}, q{}, p_prime{}, q_prime{};
};

inline ChannelContribution
channel_contribution(std::span<const CavitySite> sites, const ModeContext& mode,
                     std::size_t channel_index) {
    if (sites.empty()) {
        throw Error("channel must contain at least one site");
    }
    const std::vector<AlphaTerm> terms = channel_alphas(sites, mode);

    std::size_t first_wall = terms.size();
    std::size_t last_wall = terms.size();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].pole_flag) {
            if (first_wall == terms.size()) {
                first_wall = i;
            }
            last_wall = i;
        }
    }

    ChannelContribution out;
    if (first_wall == terms.size()) {
        const ScaledMatrix s = scaled_product(terms, 0, terms.size());
        const TransferMatrix& m = s.m;
        if (std::abs(m.a) < 1e-10 * m.max_abs()) {
            throw DegenerateChannelError(channel_index);
        }
        const complex inv_a = std::exp(-s.log_scale) / m.a;
        out.p = inv_a;
        out.q = -m.b / m.a;
        out.p_prime = m.c / m.a;
        out.q_prime = inv_a; // det = 1
        return out;
    }

    const ScaledMatrix before = scaled_product(terms, 0, first_wall);
    const ScaledMatrix after = scaled_product(terms, last_wall + 1, terms.size());
    if (std::abs(before.m.a) < 1e-10 * before.m.max_abs() ||
        std::abs(after.m.a) < 1e-10 * after.m.max_abs()) {
        throw DegenerateChannelError(channel_index);
    }
    out.p = complex(0.0);
    out.q = -before.m.b / before.m.a;
    out.p_prime = after.m.c / after.m.a;
    out.q_prime = complex(0.0);
    return out;
}

/// Shared final step of every parallel-form amplitude.
inline ScatteringResult
amplitudes_from_aggregates(const ParallelAggregates& agg,
                           const ModeContext& mode, bool hermitian) {
    const complex eik(std::cos(mode.k), std::sin(mode.k));
    const complex emk = std::conj(eik);
    const complex den =
        (agg.q * eik - 1.0) * (agg.p_prime * eik - 1.0) -
        agg.p * agg.q_prime * eik * eik;
    const complex num =
        (agg.p_prime * eik - 1.0) * (1.0 - agg.q * emk) + agg.p * agg.q_prime;
    const complex t_n =
        complex(0.0, -2.0 * std::sin(mode.k)) * agg.q_prime / den;
    return make_result(num / den, t_n, hermitian);
}

} // namespace detail

/// Aggregates of a list of parallel channels. Throws DegenerateChannelError
/// (carrying the channel index) when a channel matrix has |a| below
/// 1e-10 times its max-norm; callers may fall back to the network solver.
inline ParallelAggregates
parallel_aggregates(const std::vector<std::vector<CavitySite>>& channels,
                    const ModeContext& mode) {
    if (channels.empty()) {
        throw Error("cluster must contain at least one channel");
    }
    ParallelAggregates agg;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const detail::ChannelContribution c =
            detail::channel_contribution(channels[i], mode, i);
        agg.p += c.p;
        agg.q += c.q;
        agg.p_prime += c.p_prime;
        agg.q_prime += c.q_prime;
    }
    return agg;
}

/// General parallel cluster of m channels between common junctions:
///   r   = [(Pp e^{ik} - 1)(1 - Q e^{-ik}) + P Qp] / D
///   t_N = -2i Qp sin(k) / D
///   D   = (Q e^{ik} - 1)(Pp e^{ik} - 1) - P Qp e^{2ik}
inline ScatteringResult
parallel_amplitudes(const std::vector<std::vector<CavitySite>>& channels,
                    const ModeContext& mode) {
    bool hermitian = true;
    for (const auto& channel : channels) {
        hermitian = hermitian && detail::all_hermitian(channel);
    }
    return detail::amplitudes_from_aggregates(
        parallel_aggregates(channels, mode), mode, hermitian);
}

/// N0 identical copies of one channel. Uses the reduced closed form
///   r   = (-a - N0 b e^{-ik} + N0 c e^{ik} + N0^2 d) / D
///   t_N = -2i N0 sin(k) / D
///   D   = a + N0 e^{ik} (b - c - N0 d e^{ik})
/// which never divides by a, so degenerate channel matrices are fine here;
/// a channel at an emitter pole routes through the aggregate limits.
inline ScatteringResult
identical_parallel_amplitudes(long copies, std::span<const CavitySite> sites,
                              const ModeContext& mode) {
    if (copies < 1) {
        throw Error("copies must be at least 1");
    }
    if (sites.empty()) {
        throw Error("channel must contain at least one site");
    }
    const bool hermitian = detail::all_hermitian(sites);
    const std::vector<AlphaTerm> terms = detail::channel_alphas(sites, mode);
    for (const AlphaTerm& term : terms) {
        if (term.pole_flag) {
            detail::ChannelContribution c =
                detail::channel_contribution(sites, mode, 0);
            const double n0 = static_cast<double>(copies);
            ParallelAggregates agg{n0 * c.p, n0 * c.q, n0 * c.p_prime,
                                   n0 * c.q_prime};
            return detail::amplitudes_from_aggregates(agg, mode, hermitian);
        }
    }
    const detail::ScaledMatrix s =
        detail::scaled_product(terms, 0, terms.size());
    const TransferMatrix& m = s.m;
    const double n0 = static_cast<double>(copies);
    const complex eik(std::cos(mode.k), std::sin(mode.k));
    const complex emk = std::conj(eik);
    const complex den = m.a + n0 * eik * (m.b - m.c - n0 * m.d * eik);
    const complex num =
        -m.a - n0 * m.b * emk + n0 * m.c * eik + n0 * n0 * m.d;
    const complex t_n = complex(0.0, -2.0 * n0 * std::sin(mode.k)) / den *
                        std::exp(-s.log_scale);
    return detail::make_result(num / den, t_n, hermitian);
}

// ---------------------------------------------------------------------------
// Rings of single-site branches
// ---------------------------------------------------------------------------

/// One branch of a ring: a single cavity at the lead energy omega holding an
/// optional emitter. excited_response is G_j = g_j / (E_k - omega0_j); the
/// branch weight in gamma is J / q_j with q_j = omega - E_k + g_j G_j.
struct RingBranchTerm {
    complex excited_response{};
    complex q{};
    bool pole_flag = false;     // emitter exactly resonant: weight is zero
    bool band_resonant = false; // q = 0: the branch weight diverges
};

/// gamma = sum over branches of J / q_j. saturated marks a diverging gamma
/// (some q_j = 0), where the amplitudes reach the gamma -> infinity limit
/// r = -cos(k) e^{-ik}, t_N = i sin(k) e^{-ik} regardless of the other
/// branches.
struct RingAggregates {
    complex gamma{};
    std::vector<RingBranchTerm> branches{};
    bool saturated = false;
};

inline RingAggregates
ring_aggregates(std::span<const std::optional<Emitter>> branches,
                const ModeContext& mode) {
    if (branches.empty()) {
        throw Error("ring must contain at least one branch");
    }
    const double j_hop = mode.params.hopping;
    const double tol = pole_tolerance(mode);
    RingAggregates agg;
    agg.branches.reserve(branches.size());
    for (const std::optional<Emitter>& emitter : branches) {
        RingBranchTerm term;
        term.q = complex(mode.params.omega - mode.energy);
        if (emitter) {
            const double delta = mode.energy - emitter->transition_frequency;
            if (std::abs(delta) < tol) {
                term.pole_flag = true; // hard wall, contributes nothing
            } else {
                term.excited_response = emitter->coupling / delta;
                term.q += emitter->coupling * term.excited_response;
            }
        }
        if (!term.pole_flag) {
            if (std::abs(term.q) < tol * j_hop) {
                term.band_resonant = true;
                agg.saturated = true;
            } else {
                agg.gamma += j_hop / term.q;
            }
        }
        agg.branches.push_back(term);
    }
    return agg;
}

/// Ring cluster: m single-site branches between the two junctions.
///   r = (2 gamma cos(k) - 1) / (1 - 2 gamma e^{ik})
///   t_N = -2i gamma sin(k) / (1 - 2 gamma e^{ik})
/// The saturated limit always reflects R = cos^2(k), not R = 1.
inline ScatteringResult
ring_amplitudes(std::span<const std::optional<Emitter>> branches,
                const ModeContext& mode) {
    const RingAggregates agg = ring_aggregates(branches, mode);
    const complex emk(std::cos(mode.k), -std::sin(mode.k));
    if (agg.saturated) {
        const complex r = -std::cos(mode.k) * emk;
        const complex t_n = complex(0.0, std::sin(mode.k)) * emk;
        return detail::make_result(r, t_n, true);
    }
    const complex eik = std::conj(emk);
    const complex den = 1.0 - 2.0 * agg.gamma * eik;
    if (std::abs(den) < 1e-14) {
        throw GammaPoleError("ring denominator 1 - 2 gamma e^{ik} vanished");
    }
    const complex r = (2.0 * agg.gamma * std::cos(mode.k) - 1.0) / den;
    const complex t_n =
        complex(0.0, -2.0 * std::sin(mode.k)) * agg.gamma / den;
    return detail::make_result(r, t_n, true);
}

} // namespace crw
