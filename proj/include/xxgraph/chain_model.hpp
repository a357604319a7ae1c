#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "xxgraph/constants.hpp"
#include "xxgraph/core/basis.hpp"

namespace xxgraph {

/// Atom positions (μm) plus the interaction constants that turn them into
/// couplings. `distance_offset` is added to every pairwise distance; it models
/// a uniform range error without moving the atoms, so pair angles keep
/// following the positions.
struct ChainGeometry {
    std::vector<Eigen::Vector3d> positions;
    double c3 = default_constants().c3;
    double c6_up = default_constants().c6_up;
    double c6_down = default_constants().c6_down;
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
    double distance_offset = 0.0;
    // Columns: lab directions of the tweezer x, y, z axes (z = beam axis).
    // The chain runs along the quantization axis in the focal plane, so the
    // beam axis is transverse to it.
    Eigen::Matrix3d trap_frame = (Eigen::Matrix3d() << 0, 0, 1, 1, 0, 0, 0, 1, 0).finished();

    /// position_i = (0, 0, i·R).
    static ChainGeometry regular(int sites, const PhysicalConstants& constants = default_constants()) {
        if (sites < 2) throw Error("a chain needs at least 2 atoms");
        ChainGeometry g;
        g.c3 = constants.c3;
        g.c6_up = constants.c6_up;
        g.c6_down = constants.c6_down;
        for (int i = 0; i < sites; ++i) g.positions.emplace_back(0.0, 0.0, i * constants.spacing);
        return g;
    }

    int size() const { return static_cast<int>(positions.size()); }

    double distance(int i, int j) const {
        check_pair(i, j);
        return (positions[static_cast<std::size_t>(j)] - positions[static_cast<std::size_t>(i)]).norm() +
               distance_offset;
    }

    /// cos of the angle between r_j - r_i and the quantization axis.
    double cos_theta(int i, int j) const {
        check_pair(i, j);
        const Eigen::Vector3d d = positions[static_cast<std::size_t>(j)] - positions[static_cast<std::size_t>(i)];
        return d.dot(axis) / (d.norm() * axis.norm());
    }

    /// Throws if N < 2, or any pair is closer than 1 nm.
    void validate() const {
        if (size() < 2) throw Error("a chain needs at least 2 atoms");
        if (!(axis.norm() > 0.0)) throw Error("quantization axis must be nonzero");
        if ((trap_frame.transpose() * trap_frame - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
            throw Error("trap frame must be orthonormal");
        }
        for (int i = 0; i < size(); ++i) {
            for (int j = i + 1; j < size(); ++j) {
                if (!(distance(i, j) > 1e-3)) {
                    throw Error("atoms " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
                }
            }
        }
    }

private:
    void check_pair(int i, int j) const {
        if (i == j) throw Error("pair coupling needs i != j");
        if (i < 0 || j < 0 || i >= size() || j >= size()) throw Error("atom index out of range");
        const Eigen::Vector3d d = positions[static_cast<std::size_t>(j)] - positions[static_cast<std::size_t>(i)];
        if (!(d.norm() > 1e-3)) throw Error("coincident atom positions");
    }
};

struct IdealModel {
    double coupling = 1.0;
};

struct RydbergModel {
    ChainGeometry geometry;
};

using ModelKind = std::variant<IdealModel, RydbergModel>;

inline bool is_rydberg(const ModelKind& model) { return std::holds_alternative<RydbergModel>(model); }

/// (J/2)(σxσx + σyσy) between sites i and j, i.e. J times the flip-flop term.
inline Operator flip_flop(int i, int j, int sites, double coupling, const LocalBasis& basis) {
    const Operator raise = basis.transition(Level::Up, Level::Down);
    const Operator lower = basis.transition(Level::Down, Level::Up);
    return coupling * (embed_pair_operator(raise, i, lower, j, sites, basis) +
                       embed_pair_operator(lower, i, raise, j, sites, basis));
}

/// Open-boundary nearest-neighbour XX chain with uniform coupling.
inline Operator build_xx_chain(int sites, double coupling, const LocalBasis& basis = LocalBasis::spin()) {
    if (sites < 2) throw Error("build_xx_chain: N must be >= 2");
    const auto dim = static_cast<Eigen::Index>(basis.hilbert_dim(sites));
    Operator h = Operator::Zero(dim, dim);
    for (int i = 0; i + 1 < sites; ++i) h += flip_flop(i, i + 1, sites, coupling, basis);
    return h;
}

/// Σ_i S^z_i. Diagonal; levels outside {u, d} carry S^z = 0.
inline Operator build_control_hz(int sites, const LocalBasis& basis = LocalBasis::spin()) {
    if (sites < 1) throw Error("build_control_hz: N must be >= 1");
    const std::size_t dim = basis.hilbert_dim(sites);
    const int up = basis.index(Level::Up);
    const int down = basis.index(Level::Down);
    Operator h = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        double value = 0.0;
        for (int s = 0; s < sites; ++s) {
            const int digit = basis.digit(k, s, sites);
            if (digit == up) value += 0.5;
            else if (digit == down) value -= 0.5;
        }
        h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = value;
    }
    return h;
}

/// C3 (1 - 3cos²θ) / R³ for the pair (i, j).
inline double dipole_strength(const ChainGeometry& geometry, int i, int j) {
    const double r = geometry.distance(i, j);
    if (!(r > 0.0)) throw Error("dipole_strength: non-positive pair distance");
    const double c = geometry.cos_theta(i, j);
    return geometry.c3 * (1.0 - 3.0 * c * c) / (r * r * r);
}

/// -C6/R⁶ for like-state pairs.
inline double vdw_shift_up(const ChainGeometry& geometry, int i, int j) {
    return -geometry.c6_up / std::pow(geometry.distance(i, j), 6);
}
inline double vdw_shift_down(const ChainGeometry& geometry, int i, int j) {
    return -geometry.c6_down / std::pow(geometry.distance(i, j), 6);
}

/// van der Waals shifts over all pairs plus dipolar exchange over pairs with
/// |i - j| > 1.
inline Operator build_error_hamiltonian(const ChainGeometry& geometry, const LocalBasis& basis = LocalBasis::spin()) {
    geometry.validate();
    const int sites = geometry.size();
    const auto dim = static_cast<Eigen::Index>(basis.hilbert_dim(sites));
    const Operator pu = basis.projector(Level::Up);
    const Operator pd = basis.projector(Level::Down);
    Operator h = Operator::Zero(dim, dim);
    for (int i = 0; i < sites; ++i) {
        for (int j = i + 1; j < sites; ++j) {
            h += vdw_shift_up(geometry, i, j) * embed_pair_operator(pu, i, pu, j, sites, basis);
            h += vdw_shift_down(geometry, i, j) * embed_pair_operator(pd, i, pd, j, sites, basis);
            if (j > i + 1) h += flip_flop(i, j, sites, dipole_strength(geometry, i, j), basis);
        }
    }
    return h;
}

/// Drift H0 and control Hz; the total Hamiltonian is H0 + B(t) Hz.
struct SystemHamiltonian {
    Operator drift;
    Operator control;
};

inline int model_sites(const ModelKind& model, int sites) {
    if (const auto* ryd = std::get_if<RydbergModel>(&model)) {
        if (sites != ryd->geometry.size()) {
            throw Error("requested N = " + std::to_string(sites) + " but the geometry holds " +
                        std::to_string(ryd->geometry.size()) + " atoms");
        }
    }
    return sites;
}

inline SystemHamiltonian assemble_system(const ModelKind& model, int sites, const LocalBasis& basis = LocalBasis::spin()) {
    if (sites < 2) throw Error("assemble_system: N must be >= 2");
    model_sites(model, sites);
    SystemHamiltonian sys;
    sys.control = build_control_hz(sites, basis);
    if (const auto* ideal = std::get_if<IdealModel>(&model)) {
        if (ideal->coupling == 0.0 || !std::isfinite(ideal->coupling)) throw Error("ideal coupling must be finite and nonzero");
        sys.drift = build_xx_chain(sites, ideal->coupling, basis);
    } else {
        const auto& geometry = std::get<RydbergModel>(model).geometry;
        geometry.validate();
        const auto dim = static_cast<Eigen::Index>(basis.hilbert_dim(sites));
        sys.drift = Operator::Zero(dim, dim);
        for (int i = 0; i + 1 < sites; ++i) {
            sys.drift += flip_flop(i, i + 1, sites, dipole_strength(geometry, i, i + 1), basis);
        }
        sys.drift += build_error_hamiltonian(geometry, basis);
    }
    return sys;
}

}  // namespace xxgraph
