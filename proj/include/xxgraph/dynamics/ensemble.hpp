#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "xxgraph/dynamics/noise.hpp"
#include "xxgraph/grape.hpp"
#include "xxgraph/parallel.hpp"

namespace xxgraph {

struct EnsembleResult {
    std::vector<double> times;  // slice boundaries
    std::vector<double> mean;
    std::vector<double> min;
    std::vector<double> max;
    std::vector<std::vector<double>> traces;  // [sample][time]
    std::vector<std::uint64_t> seeds;
    double mean_final = 0.0;
    double std_final = 0.0;
};

/// Population trace for one disorder realization: geometry and/or field
/// noise drawn from base_seed + sample_index, H0 rebuilt, same schedule.
inline std::vector<double> ensemble_sample(const ModelKind& model, const ControlSchedule& schedule, const NoiseSpec& spec,
                                           const StateVector& initial, const StateVector& target, int sample_index) {
    ModelKind sample_model = model;
    if (auto* ryd = std::get_if<RydbergModel>(&sample_model)) {
        ryd->geometry = sample_geometry_noise(ryd->geometry, spec, sample_index);
    } else if (spec.has_position_noise() || spec.delta_r_nm) {
        throw Error("geometry noise requires the Rydberg model");
    }
    const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(sample_index);
    const ControlSchedule noisy = sample_field_noise(schedule, spec.field_sigma, seed);
    const int sites = static_cast<int>(std::lround(std::log2(static_cast<double>(initial.size()))));
    const ControlProblem problem(assemble_system(sample_model, sites), initial, target);
    return problem.population_trace(noisy);
}

/// Runs `spec.samples` realizations (in parallel when workers > 1) and folds
/// them in sample order, so the statistics do not depend on scheduling.
inline EnsembleResult ensemble_average(const ModelKind& model, const ControlSchedule& schedule, const NoiseSpec& spec,
                                       const StateVector& initial, const StateVector& target, int workers = 1) {
    spec.validate();
    schedule.validate();
    EnsembleResult r;
    r.traces.resize(static_cast<std::size_t>(spec.samples));
    for (int i = 0; i < spec.samples; ++i) r.seeds.push_back(spec.base_seed + static_cast<std::uint64_t>(i));

    parallel_for(spec.samples, workers, [&](int i) {
        try {
            r.traces[static_cast<std::size_t>(i)] = ensemble_sample(model, schedule, spec, initial, target, i);
        } catch (const std::exception& e) {
            throw Error("ensemble sample with seed " + std::to_string(r.seeds[static_cast<std::size_t>(i)]) +
                        " failed: " + e.what());
        }
    });

    const std::size_t points = static_cast<std::size_t>(schedule.slices()) + 1;
    const double dt = schedule.slice_duration();
    for (std::size_t t = 0; t < points; ++t) {
        r.times.push_back(dt * static_cast<double>(t));
        double sum = 0.0, lo = 1e300, hi = -1e300;
        for (const auto& trace : r.traces) {
            sum += trace[t];
            lo = std::min(lo, trace[t]);
            hi = std::max(hi, trace[t]);
        }
        r.mean.push_back(sum / spec.samples);
        r.min.push_back(lo);
        r.max.push_back(hi);
    }
    r.mean_final = r.mean.back();
    if (spec.samples > 1) {
        double ss = 0.0;
        for (const auto& trace : r.traces) ss += (trace.back() - r.mean_final) * (trace.back() - r.mean_final);
        r.std_final = std::sqrt(ss / (spec.samples - 1));
    }
    return r;
}

}  // namespace xxgraph
