#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "xxgraph/chain_model.hpp"
#include "xxgraph/core/propagate.hpp"
#include "xxgraph/graph_targets.hpp"
#include "xxgraph/schedule.hpp"

namespace xxgraph {

/// Resonant global drive (Ω/2)(e^{iφ}|to><from| + h.c.) on every atom.
struct Drive {
    Level from;
    Level to;
    double rabi;  // rad/μs
    double phase = 0.0;
};

struct ProtocolStage {
    std::string label;
    std::vector<Drive> drives;
    double duration = 0.0;
    bool core = false;          // runs the optimized B(t) instead of drives
    bool interactions = true;   // H_sys drift terms on the {u, d} sublevels
};

struct ProtocolPlan {
    int sites = 3;
    ChainGeometry geometry;
    ControlSchedule core_schedule;
    std::vector<ProtocolStage> stages;
    int trace_points_per_stage = 25;

    double total_duration() const {
        double t = 0.0;
        for (const auto& s : stages) t += s.core ? core_schedule.duration : s.duration;
        return t;
    }

    /// Prepare u, split into (u - i d)/√2, core evolution, shelve d in r,
    /// then map u -> 0 and r -> 1 in one shared π window.
    static ProtocolPlan standard(ChainGeometry geometry, ControlSchedule core,
                                 const PhysicalConstants& c = default_constants()) {
        const double pi = std::numbers::pi;
        ProtocolPlan plan;
        plan.sites = geometry.size();
        plan.geometry = std::move(geometry);
        plan.core_schedule = std::move(core);
        plan.stages = {
            {"prepare-up", {{Level::Zero, Level::Up, c.rabi_two_photon}}, pi / c.rabi_two_photon},
            {"prepare-superposition", {{Level::Up, Level::Down, c.rabi_mw_a}}, pi / (2.0 * c.rabi_mw_a)},
            {"core", {}, plan.core_schedule.duration, true},
            {"decouple", {{Level::Down, Level::Rydberg, c.rabi_mw_b}}, pi / c.rabi_mw_b},
            {"map-to-clock",
             {{Level::Up, Level::Zero, c.rabi_two_photon}, {Level::Rydberg, Level::One, c.rabi_two_photon}},
             pi / c.rabi_two_photon},
        };
        return plan;
    }
};

/// The four reference states tracked through the protocol, on the 5-level basis.
inline std::array<StateVector, 4> protocol_reference_states(int sites) {
    const LocalBasis basis = LocalBasis::protocol();
    const StateVector k = complete_graph_state(sites);
    return {
        plus_product_state(sites, Complex(0.0, -1.0), basis),
        remap_qubit_state(k, sites, basis, {Level::Up}, {Level::Down, Complex(0.0, -1.0)}),
        remap_qubit_state(k, sites, basis, {Level::Up}, {Level::Rydberg, -1.0}),
        remap_qubit_state(k, sites, basis, {Level::Zero, -1.0}, {Level::One}),
    };
}

inline Operator drive_hamiltonian(const std::vector<Drive>& drives, int sites, const LocalBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.hilbert_dim(sites));
    Operator h = Operator::Zero(dim, dim);
    for (const auto& d : drives) {
        if (!basis.has(d.from) || !basis.has(d.to)) throw Error("drive refers to a level outside the basis");
        if (d.from == d.to) throw Error("drive levels must differ");
        const Operator local = 0.5 * d.rabi *
                               (std::polar(1.0, d.phase) * basis.transition(d.to, d.from) +
                                std::polar(1.0, -d.phase) * basis.transition(d.from, d.to));
        for (int s = 0; s < sites; ++s) h += embed_local_operator(local, s, sites, basis);
    }
    return h;
}

struct TimelineRow {
    double time;
    std::array<double, 4> populations;
    std::string stage;
};

namespace detail {

inline std::array<double, 4> reference_populations(const StateVector& psi, const std::array<StateVector, 4>& refs) {
    return {population(psi, refs[0]), population(psi, refs[1]), population(psi, refs[2]), population(psi, refs[3])};
}

}  // namespace detail

/// Evolves a 5-level chain state through one stage. The drift (dipolar +
/// error terms) acts on u/d only; the field B is zero outside the core.
inline StateVector run_stage(const StateVector& state, const ProtocolStage& stage, const ModelKind& model, int sites,
                             const ControlSchedule* core_schedule = nullptr,
                             std::vector<TimelineRow>* timeline = nullptr, double start_time = 0.0,
                             int trace_points = 25) {
    const LocalBasis basis = LocalBasis::protocol();
    if (state.size() != static_cast<Eigen::Index>(basis.hilbert_dim(sites))) throw Error("run_stage: dimension mismatch");
    require_normalized(state, 1e-8, "run_stage input");
    for (const auto& d : stage.drives) {
        if (!basis.has(d.from) || !basis.has(d.to)) throw Error("run_stage: drive on absent level");
    }
    // a lone atom has no couplings
    const SystemHamiltonian sys = sites >= 2 ? assemble_system(model, sites, basis)
                                             : SystemHamiltonian{Operator::Zero(state.size(), state.size()),
                                                                 build_control_hz(1, basis)};
    const auto dim = state.size();
    const Operator drift = stage.interactions ? sys.drift : Operator(Operator::Zero(dim, dim));

    std::optional<std::array<StateVector, 4>> refs;
    if (timeline) refs = protocol_reference_states(sites);
    auto log = [&](double t, const StateVector& psi) {
        if (timeline) timeline->push_back({start_time + t, detail::reference_populations(psi, *refs), stage.label});
    };

    StateVector psi = state;
    if (stage.core) {
        if (!core_schedule) throw Error("run_stage: core stage without an optimized schedule");
        core_schedule->validate();
        const double dt = core_schedule->slice_duration();
        log(0.0, psi);
        for (int k = 0; k < core_schedule->slices(); ++k) {
            const double b = core_schedule->amplitudes[static_cast<std::size_t>(k)];
            psi = HermitianSpectrum(drift + b * sys.control).evolve(psi, dt);
            log(dt * (k + 1), psi);
        }
        return psi;
    }
    if (!(stage.duration > 0.0)) throw Error("run_stage: stage duration must be positive");
    const HermitianSpectrum spec(drift + drive_hamiltonian(stage.drives, sites, basis));
    if (timeline) {
        const int points = std::max(trace_points, 1);
        log(0.0, psi);
        for (int p = 1; p <= points; ++p) log(stage.duration * p / points, spec.evolve(state, stage.duration * p / points));
    }
    return spec.evolve(state, stage.duration);
}

struct ProtocolResult {
    StateVector final_state;
    std::vector<double> stage_end_times;
    std::vector<std::array<double, 4>> stage_populations;  // reference populations after each stage
    std::vector<TimelineRow> timeline;
    double total_duration = 0.0;

    /// Population of reference state k (0-based) after the stage that is
    /// supposed to produce it: ψ1 after stage 2, ψ2 after 3, ψ3 after 4, ψ4 after 5.
    double boundary_population(int k) const {
        const std::size_t stage = static_cast<std::size_t>(k) + 1;
        if (k < 0 || k > 3 || stage >= stage_populations.size()) throw Error("boundary_population: index out of range");
        return stage_populations[stage][static_cast<std::size_t>(k)];
    }
};

/// Starts from |0...0> and runs every stage in order.
inline ProtocolResult run_full_protocol(const ProtocolPlan& plan, bool record_timeline = true) {
    const LocalBasis basis = LocalBasis::protocol();
    if (plan.stages.empty()) throw Error("protocol plan has no stages");
    if (plan.geometry.size() != plan.sites) throw Error("protocol geometry does not match N");
    basis.hilbert_dim(plan.sites);
    bool has_core = false;
    for (const auto& s : plan.stages) has_core |= s.core;
    if (has_core && plan.core_schedule.amplitudes.empty()) throw Error("protocol plan is missing its core schedule");

    const ModelKind model = RydbergModel{plan.geometry};
    const auto refs = protocol_reference_states(plan.sites);
    StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(basis.hilbert_dim(plan.sites)));
    psi(0) = 1.0;  // |0...0>

    ProtocolResult out;
    double t = 0.0;
    for (const auto& stage : plan.stages) {
        psi = run_stage(psi, stage, model, plan.sites, &plan.core_schedule, record_timeline ? &out.timeline : nullptr, t,
                        plan.trace_points_per_stage);
        t += stage.core ? plan.core_schedule.duration : stage.duration;
        out.stage_end_times.push_back(t);
        out.stage_populations.push_back(detail::reference_populations(psi, refs));
    }
    out.final_state = psi;
    out.total_duration = t;
    return out;
}

}  // namespace xxgraph
