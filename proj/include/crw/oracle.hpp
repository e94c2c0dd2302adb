/*
 * oracle.hpp: brute-force reference for the closed-form amplitudes.
 *
 * Instead of transfer matrices, the full stationary scattering problem is
 * written as one dense linear system over the unknowns
 *     [ r, t, psi_i(j) for every cluster site, phi_ij for every emitter ]
 * by substituting the lead ansatz analytically: the left lead carries
 * e^{ikx} + r e^{-ikx}, the right lead t e^{ikx}, and the lead equations
 * at the two junction cavities (lead coordinates -1 and N) close the
 * system without truncating the lattice. Everything downstream treats
 * this route and the closed forms as independent and cross-checks them.
 *
 * Emitters are handled two ways, selectable for cross-validation:
 *   - explicit: each excited-atom amplitude phi is an unknown with its own
 *     equation (omega0 - E) phi + g psi = 0; valid even exactly on
 *     resonance, where it enforces psi = 0 at the site.
 *   - eliminated: phi is folded into the site energy as g^2 / (E - omega0),
 *     which must agree with the explicit route away from resonance.
 *
 * The solver is plain Gaussian elimination with partial pivoting on
 * row-max-scaled equations; systems stay small (a few hundred unknowns),
 * so clarity wins over sophistication here.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "cluster.hpp"
#include "scattering.hpp"
#include "types.hpp"

namespace crw {

enum class EmitterTreatment { explicit_amplitudes, eliminated };

/// Solution of the dense network system. Amplitudes are channel-major;
/// emitter_amplitudes entries are set only where a site hosts an emitter.
struct NetworkSolution {
    complex r{};
    complex t_n{};
    double reflectance = 0.0;
    double transmittance = 0.0;
    bool hermitian = true;
    std::vector<std::vector<complex>> site_amplitudes{};
    std::vector<std::vector<std::optional<complex>>> emitter_amplitudes{};
    double residual = 0.0;
    double system_norm = 0.0;
};

namespace detail {

/// Gaussian elimination with partial pivoting; rows are scaled to unit
/// max-norm first. Throws SingularSystemError when a pivot collapses.
inline std::vector<complex> solve_dense(std::vector<complex> a,
                                        std::vector<complex> b,
                                        std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            scale = std::max(scale, std::abs(a[i * n + j]));
        }
        if (scale == 0.0) {
            throw SingularSystemError("network system has an all-zero row",
                                      std::numeric_limits<double>::infinity());
        }
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] /= scale;
        }
        b[i] /= scale;
    }

    double max_pivot = 0.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot_row = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double mag = std::abs(a[row * n + col]);
            if (mag > best) {
                best = mag;
                pivot_row = row;
            }
        }
        max_pivot = std::max(max_pivot, best);
        if (best < 1e-13) {
            throw SingularSystemError(
                "network system is numerically singular (pivot " +
                    std::to_string(best) + " at column " + std::to_string(col) +
                    "); scattering amplitudes are underdetermined here",
                best > 0.0 ? max_pivot / best
                           : std::numeric_limits<double>::infinity());
        }
        if (pivot_row != col) {
            for (std::size_t j = col; j < n; ++j) {
                std::swap(a[col * n + j], a[pivot_row * n + j]);
            }
            std::swap(b[col], b[pivot_row]);
        }
        const complex pivot = a[col * n + col];
        for (std::size_t row = col + 1; row < n; ++row) {
            const complex factor = a[row * n + col] / pivot;
            if (factor == complex(0.0)) {
                continue;
            }
            a[row * n + col] = complex(0.0);
            for (std::size_t j = col + 1; j < n; ++j) {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }

    std::vector<complex> x(n);
    for (std::size_t i = n; i-- > 0;) {
        complex acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            acc -= a[i * n + j] * x[j];
        }
        x[i] = acc / a[i * n + i];
    }
    return x;
}

} // namespace detail

inline NetworkSolution solve_network(
    const ClusterSpec& cluster, const ModeContext& mode,
    EmitterTreatment treatment = EmitterTreatment::explicit_amplitudes) {
    const std::vector<std::vector<CavitySite>> channels =
        expanded_channels(cluster);
    if (channels.empty()) {
        throw Error("cluster must contain at least one channel");
    }
    std::size_t width = 0;
    for (const auto& channel : channels) {
        if (channel.empty()) {
            throw Error("channel must contain at least one site");
        }
        width = std::max(width, channel.size());
    }

    const double j_hop = mode.params.hopping;
    const double e_k = mode.energy;
    const complex eik(std::cos(mode.k), std::sin(mode.k));
    const complex emk = std::conj(eik);
    const complex lead_gap(mode.params.omega - e_k); // = 2 J cos k
    const double tol = pole_tolerance(mode);

    // Unknown layout: [r, t, sites channel-major, explicit emitters].
    std::vector<std::size_t> site_base(channels.size());
    std::size_t count = 2;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        site_base[i] = count;
        count += channels[i].size();
    }
    std::vector<std::vector<std::size_t>> emitter_index(channels.size());
    if (treatment == EmitterTreatment::explicit_amplitudes) {
        for (std::size_t i = 0; i < channels.size(); ++i) {
            emitter_index[i].assign(channels[i].size(), 0);
            for (std::size_t j = 0; j < channels[i].size(); ++j) {
                if (channels[i][j].emitter) {
                    emitter_index[i][j] = count++;
                }
            }
        }
    }

    const std::size_t n = count;
    std::vector<complex> a(n * n, complex(0.0));
    std::vector<complex> b(n, complex(0.0));
    std::size_t row = 0;
    auto at = [&](std::size_t r_, std::size_t c_) -> complex& {
        return a[r_ * n + c_];
    };

    // Lead coordinate of the right junction; t_N = t e^{ik(N-1)} is gauge
    // invariant under this choice, t alone is not.
    const double n_right = static_cast<double>(width);
    const complex e_ik_n = std::polar(1.0, mode.k * n_right);

    // Left junction cavity at lead coordinate -1, energy omega.
    at(row, 0) = lead_gap * eik - j_hop * eik * eik;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        at(row, site_base[i]) += -j_hop;
    }
    b[row] = j_hop * emk * emk - lead_gap * emk;
    ++row;

    // Right junction cavity at lead coordinate N, energy omega.
    at(row, 1) = lead_gap * e_ik_n - j_hop * e_ik_n * eik;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        at(row, site_base[i] + channels[i].size() - 1) += -j_hop;
    }
    ++row;

    // Cluster sites.
    for (std::size_t i = 0; i < channels.size(); ++i) {
        for (std::size_t j = 0; j < channels[i].size(); ++j) {
            const CavitySite& site = channels[i][j];
            complex eps = site.site_energy(mode.params);
            const std::size_t col = site_base[i] + j;
            if (site.emitter) {
                if (treatment == EmitterTreatment::explicit_amplitudes) {
                    at(row, emitter_index[i][j]) = site.emitter->coupling;
                } else {
                    const double delta =
                        e_k - site.emitter->transition_frequency;
                    if (std::abs(delta) < tol) {
                        throw ResonantPoleError(j);
                    }
                    eps += site.emitter->coupling * site.emitter->coupling /
                           delta;
                }
            }
            at(row, col) += eps - e_k;
            if (j == 0) {
                at(row, 0) += -j_hop * eik;
                b[row] += j_hop * emk;
            } else {
                at(row, col - 1) += -j_hop;
            }
            if (j + 1 == channels[i].size()) {
                at(row, 1) += -j_hop * e_ik_n;
            } else {
                at(row, col + 1) += -j_hop;
            }
            ++row;
        }
    }

    // Explicit excited-atom amplitudes.
    if (treatment == EmitterTreatment::explicit_amplitudes) {
        for (std::size_t i = 0; i < channels.size(); ++i) {
            for (std::size_t j = 0; j < channels[i].size(); ++j) {
                if (!channels[i][j].emitter) {
                    continue;
                }
                const Emitter& em = *channels[i][j].emitter;
                at(row, emitter_index[i][j]) = em.transition_frequency - e_k;
                at(row, site_base[i] + j) = em.coupling;
                ++row;
            }
        }
    }

    const std::vector<complex> a_copy = a;
    const std::vector<complex> b_copy = b;
    const std::vector<complex> x = detail::solve_dense(std::move(a), std::move(b), n);

    NetworkSolution sol;
    sol.r = x[0];
    sol.t_n = x[1] * std::polar(1.0, mode.k * (n_right - 1.0));
    sol.reflectance = std::norm(sol.r);
    sol.transmittance = std::norm(sol.t_n);
    sol.hermitian = cluster_hermitian(cluster);
    sol.site_amplitudes.resize(channels.size());
    sol.emitter_amplitudes.resize(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i) {
        sol.site_amplitudes[i].assign(channels[i].size(), complex(0.0));
        sol.emitter_amplitudes[i].assign(channels[i].size(), std::nullopt);
        for (std::size_t j = 0; j < channels[i].size(); ++j) {
            const complex psi = x[site_base[i] + j];
            sol.site_amplitudes[i][j] = psi;
            if (channels[i][j].emitter) {
                if (treatment == EmitterTreatment::explicit_amplitudes) {
                    sol.emitter_amplitudes[i][j] = x[emitter_index[i][j]];
                } else {
                    const Emitter& em = *channels[i][j].emitter;
                    sol.emitter_amplitudes[i][j] =
                        em.coupling * psi /
                        (e_k - em.transition_frequency);
                }
            }
        }
    }

    // Residual of the original (unscaled) equations.
    double residual = 0.0;
    double row_norm = 0.0;
    double x_norm = 0.0;
    double b_norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        x_norm = std::max(x_norm, std::abs(x[j]));
        b_norm = std::max(b_norm, std::abs(b_copy[j]));
    }
    for (std::size_t i = 0; i < n; ++i) {
        complex acc(0.0);
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += a_copy[i * n + j] * x[j];
            sum += std::abs(a_copy[i * n + j]);
        }
        residual = std::max(residual, std::abs(acc - b_copy[i]));
        row_norm = std::max(row_norm, sum);
    }
    sol.residual = residual;
    sol.system_norm = row_norm * x_norm + b_norm;
    return sol;
}

} // namespace crw
