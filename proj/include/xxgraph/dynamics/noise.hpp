#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>

#include "xxgraph/chain_model.hpp"
#include "xxgraph/schedule.hpp"

namespace xxgraph {

struct NoiseSpec {
    std::array<double, 3> position_sigma_nm{0.0, 0.0, 0.0};
    double field_sigma = 0.0;  // rad/μs, per slice
    int samples = 50;
    std::uint64_t base_seed = 0;
    std::optional<double> delta_r_nm;

    bool has_position_noise() const {
        return position_sigma_nm[0] > 0.0 || position_sigma_nm[1] > 0.0 || position_sigma_nm[2] > 0.0;
    }

    void validate() const {
        for (double s : position_sigma_nm) {
            if (!(s >= 0.0)) throw Error("position sigma must be >= 0");
        }
        if (!(field_sigma >= 0.0)) throw Error("field sigma must be >= 0");
        if (samples < 1) throw Error("noise samples must be >= 1");
        if (delta_r_nm && has_position_noise()) {
            throw Error("delta_r and random position noise are mutually exclusive");
        }
    }
};

namespace detail {

/// Independent generator streams for one seed.
enum class NoiseStream : std::uint32_t { Positions = 1, Field = 2 };

inline std::mt19937_64 noise_rng(std::uint64_t seed, NoiseStream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffU), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

}  // namespace detail

/// Static geometry for one disorder sample. A deterministic delta_r shifts
/// every pairwise distance by the same amount; otherwise each atom moves by
/// an independent Gaussian 3-vector drawn from seed base_seed + sample_index.
/// The sigmas are tweezer-frame components, rotated into the lab through
/// geometry.trap_frame.
inline ChainGeometry sample_geometry_noise(const ChainGeometry& geometry, const NoiseSpec& spec, int sample_index) {
    spec.validate();
    ChainGeometry out = geometry;
    if (spec.delta_r_nm) {
        out.distance_offset += *spec.delta_r_nm * 1e-3;
    } else if (spec.has_position_noise()) {
        auto rng = detail::noise_rng(spec.base_seed + static_cast<std::uint64_t>(sample_index),
                                     detail::NoiseStream::Positions);
        std::normal_distribution<double> unit(0.0, 1.0);
        for (auto& p : out.positions) {
            Eigen::Vector3d shift;
            for (int axis = 0; axis < 3; ++axis) shift(axis) = unit(rng) * spec.position_sigma_nm[static_cast<std::size_t>(axis)] * 1e-3;
            p += geometry.trap_frame * shift;
        }
    }
    out.validate();
    return out;
}

/// B_k + δB_k with δB_k ~ N(0, field_sigma) i.i.d. per slice.
inline ControlSchedule sample_field_noise(const ControlSchedule& schedule, double field_sigma, std::uint64_t seed) {
    if (!(field_sigma >= 0.0)) throw Error("field sigma must be >= 0");
    ControlSchedule out = schedule;
    if (field_sigma == 0.0) return out;
    auto rng = detail::noise_rng(seed, detail::NoiseStream::Field);
    std::normal_distribution<double> dist(0.0, field_sigma);
    for (double& b : out.amplitudes) b += dist(rng);
    return out;
}

}  // namespace xxgraph
