#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "xxgraph/core/basis.hpp"

namespace xxgraph {

enum class TargetForm { LiteralEq1, CzCircuit };

inline void check_target_size(int sites) {
    if (sites < 2 || sites > 7) throw Error("graph states are supported for 2 <= N <= 7, got " + std::to_string(sites));
}

/// Number of up spins in a 2-level basis index (bit 0 of a site = up).
inline int count_up(std::size_t index, int sites) {
    return sites - std::popcount(static_cast<std::uint64_t>(index));
}

/// Complete graph state in the product-form definition with σ^z|u> = +|u>:
/// amplitude 2^{-N/2} (-1)^{m(m-1)/2} on every basis state with m up spins.
/// The all-down amplitude is +2^{-N/2}.
inline StateVector complete_graph_state(int sites) {
    check_target_size(sites);
    const std::size_t dim = std::size_t{1} << sites;
    const double amp = std::pow(2.0, -0.5 * sites);
    StateVector psi(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        const int m = count_up(k, sites);
        psi(static_cast<Eigen::Index>(k)) = ((m * (m - 1) / 2) % 2 == 0) ? amp : -amp;
    }
    return psi;
}

/// ∏_{i<j} CZ_ij |+>^N with |u> ≡ |0> and |d> ≡ |1>, applied gate by gate.
inline StateVector cz_graph_state(int sites) {
    check_target_size(sites);
    const std::size_t dim = std::size_t{1} << sites;
    StateVector psi = StateVector::Constant(static_cast<Eigen::Index>(dim), std::pow(2.0, -0.5 * sites));
    for (int i = 0; i < sites; ++i) {
        for (int j = i + 1; j < sites; ++j) {
            const std::size_t bi = std::size_t{1} << (sites - 1 - i);
            const std::size_t bj = std::size_t{1} << (sites - 1 - j);
            for (std::size_t k = 0; k < dim; ++k) {
                if ((k & bi) && (k & bj)) psi(static_cast<Eigen::Index>(k)) *= -1.0;
            }
        }
    }
    return psi;
}

inline StateVector graph_target(int sites, TargetForm form) {
    return form == TargetForm::LiteralEq1 ? complete_graph_state(sites) : cz_graph_state(sites);
}

/// ⊗ (|u> + phase |d>)/√2 in the given basis; other levels stay empty.
inline StateVector plus_product_state(int sites, Complex phase, const LocalBasis& basis = LocalBasis::spin()) {
    if (sites < 1) throw Error("plus_product_state: N must be >= 1");
    if (std::abs(std::abs(phase) - 1.0) > 1e-12) throw Error("plus_product_state: phase must have unit modulus");
    if (!basis.has(Level::Up) || !basis.has(Level::Down)) throw Error("plus_product_state: basis lacks u/d levels");
    const int up = basis.index(Level::Up);
    const int down = basis.index(Level::Down);
    const std::size_t dim = basis.hilbert_dim(sites);
    StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(dim));
    const double amp = std::pow(2.0, -0.5 * sites);
    for (std::size_t k = 0; k < dim; ++k) {
        Complex a = amp;
        for (int s = 0; s < sites && a != Complex{}; ++s) {
            const int digit = basis.digit(k, s, sites);
            if (digit == down) a *= phase;
            else if (digit != up) a = 0.0;
        }
        psi(static_cast<Eigen::Index>(k)) = a;
    }
    return psi;
}

/// One slot of a qubit-to-level relabelling: qubit value -> (level, phase).
struct LevelSlot {
    Level level;
    Complex phase{1.0, 0.0};
};

/// Re-embeds a 2-level state (index bit 0 = up) into `basis`, sending the up
/// slot of every site to `up_slot` and the down slot to `down_slot`.
inline StateVector remap_qubit_state(const StateVector& qubits, int sites, const LocalBasis& basis, LevelSlot up_slot,
                                     LevelSlot down_slot) {
    if (qubits.size() != (Eigen::Index{1} << sites)) throw Error("remap_qubit_state: dimension mismatch");
    const std::size_t dim = basis.hilbert_dim(sites);
    const int iu = basis.index(up_slot.level);
    const int id = basis.index(down_slot.level);
    StateVector out = StateVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < (std::size_t{1} << sites); ++k) {
        std::size_t target = 0;
        Complex phase = 1.0;
        for (int s = 0; s < sites; ++s) {
            const bool down = (k >> (sites - 1 - s)) & 1U;
            target = target * static_cast<std::size_t>(basis.dim()) + static_cast<std::size_t>(down ? id : iu);
            phase *= down ? down_slot.phase : up_slot.phase;
        }
        out(static_cast<Eigen::Index>(target)) = phase * qubits(static_cast<Eigen::Index>(k));
    }
    return out;
}

/// <ψ| σ^x_i ∏_{j≠i} σ^z_j |ψ> on a 2-level state.
inline double complete_graph_stabilizer(const StateVector& psi, int sites, int vertex) {
    if (psi.size() != (Eigen::Index{1} << sites)) throw Error("stabilizer: dimension mismatch");
    const std::size_t flip = std::size_t{1} << (sites - 1 - vertex);
    Complex acc = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(psi.size()); ++k) {
        // Sign from σ^z on every other site of the ket k.
        const int downs_elsewhere = std::popcount(static_cast<std::uint64_t>(k & ~flip));
        const double sign = (downs_elsewhere % 2 == 0) ? 1.0 : -1.0;
        acc += std::conj(psi(static_cast<Eigen::Index>(k ^ flip))) * sign * psi(static_cast<Eigen::Index>(k));
    }
    return acc.real();
}

/// [[basis, re, im], ...] for every basis state.
inline nlohmann::json state_to_json(const StateVector& psi, int sites, const LocalBasis& basis = LocalBasis::spin()) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
        out.push_back({basis.label(static_cast<std::size_t>(k), sites), psi(k).real(), psi(k).imag()});
    }
    return out;
}

}  // namespace xxgraph
