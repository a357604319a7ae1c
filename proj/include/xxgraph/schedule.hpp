#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "xxgraph/constants.hpp"
#include "xxgraph/core/basis.hpp"

namespace xxgraph {

/// Piecewise-constant global field: `amplitudes[k]` (rad/μs) holds on
/// [k δt, (k+1) δt) with δt = duration / n.
struct ControlSchedule {
    double duration = 0.0;
    std::vector<double> amplitudes;

    int slices() const { return static_cast<int>(amplitudes.size()); }
    double slice_duration() const { return duration / static_cast<double>(amplitudes.size()); }

    /// Σ_k B_k δt.
    double area() const {
        return std::accumulate(amplitudes.begin(), amplitudes.end(), 0.0) * slice_duration();
    }

    void validate() const {
        if (amplitudes.empty()) throw Error("control schedule needs at least one slice");
        if (!(duration > 0.0) || !std::isfinite(duration)) throw Error("control schedule duration must be positive");
        for (double b : amplitudes) {
            if (!std::isfinite(b)) throw Error("control schedule has a non-finite amplitude");
        }
    }

    bool operator==(const ControlSchedule&) const = default;
};

inline ControlSchedule constant_schedule(int slices, double duration, double amplitude) {
    if (slices < 1) throw Error("slice count must be >= 1");
    return {duration, std::vector<double>(static_cast<std::size_t>(slices), amplitude)};
}

/// B0/(√(2π)σ) exp(-t_g²/2σ²) sampled at slice midpoints mapped onto
/// t_g ∈ [-0.5, 0.5].
inline ControlSchedule gaussian_guess(int slices, double duration, double b0, double sigma) {
    if (slices < 1) throw Error("gaussian_guess: n must be >= 1");
    if (sigma == 0.0 || !std::isfinite(sigma)) throw Error("gaussian_guess: sigma must be nonzero");
    ControlSchedule s{duration, std::vector<double>(static_cast<std::size_t>(slices))};
    const double peak = b0 / (std::sqrt(kTwoPi) * sigma);
    for (int k = 0; k < slices; ++k) {
        const double tg = (k + 0.5) / slices - 0.5;
        s.amplitudes[static_cast<std::size_t>(k)] = peak * std::exp(-tg * tg / (2.0 * sigma * sigma));
    }
    return s;
}

/// B0 ξ_k with ξ_k uniform on [0, 1) from mt19937_64(seed).
inline ControlSchedule random_guess(int slices, double duration, double b0, std::uint64_t seed) {
    if (slices < 1) throw Error("random_guess: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xi(0.0, 1.0);
    ControlSchedule s{duration, std::vector<double>(static_cast<std::size_t>(slices))};
    for (auto& b : s.amplitudes) b = b0 * xi(rng);
    return s;
}

}  // namespace xxgraph
