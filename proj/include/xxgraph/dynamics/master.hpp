#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "xxgraph/chain_model.hpp"
#include "xxgraph/constants.hpp"
#include "xxgraph/core/propagate.hpp"
#include "xxgraph/graph_targets.hpp"
#include "xxgraph/schedule.hpp"

namespace xxgraph {

/// Spontaneous decay |from> -> |to> on every site at `rate` (1/μs).
struct JumpChannel {
    Level from;
    Level to;
    double rate;
};

struct JumpChannels {
    std::vector<JumpChannel> channels;

    /// u -> g at 1/τ_u and d -> g at 1/τ_d.
    static JumpChannels rydberg_default(const PhysicalConstants& c = default_constants()) {
        return {{{Level::Up, Level::Ground, c.decay_rate_up()}, {Level::Down, Level::Ground, c.decay_rate_down()}}};
    }

    static JumpChannels none() { return {}; }

    void validate(const LocalBasis& basis) const {
        for (const auto& ch : channels) {
            if (!(ch.rate >= 0.0) || !std::isfinite(ch.rate)) throw Error("jump rates must be finite and >= 0");
            if (!basis.has(ch.from) || !basis.has(ch.to)) throw Error("jump channel refers to a level outside the basis");
            if (ch.from == ch.to) throw Error("jump channel must change the level");
        }
    }
};

enum class CheckpointValidation { All, Final, None };
enum class MasterFrame { Auto, Lab };

struct MasterOptions {
    double max_step = 1e-3;  // μs
    bool check_convergence = true;
    double convergence_tolerance = 1e-6;
    CheckpointValidation checkpoints = CheckpointValidation::All;
    MasterFrame frame = MasterFrame::Auto;
};

struct MasterCheckpoint {
    double time = 0.0;
    double trace_error = 0.0;
    double hermiticity = 0.0;
    double min_eigenvalue = 0.0;
};

struct MasterResult {
    DensityMatrix final_state;
    std::vector<double> times;        // slice boundaries
    std::vector<double> populations;  // target population at `times`
    std::vector<MasterCheckpoint> checkpoints;
    int substeps_per_slice = 0;
    double convergence_delta = 0.0;
    bool rotating_frame = false;
};

/// Lifts a 2-level chain state into {u, d, g} with |g> empty.
inline StateVector lift_to_ground_basis(const StateVector& qubits, int sites) {
    return remap_qubit_state(qubits, sites, LocalBasis::spin_with_ground(), {Level::Up}, {Level::Down});
}

namespace detail {

/// Right-hand side of dρ/dt = -i(H_eff ρ - ρ H_eff^dag) + Σ γ s ρ s^dag with
/// H_eff = H - (i/2) Σ γ s^dag s. Uses Hermiticity of ρ: ρ H_eff^dag = (H_eff ρ)^dag.
class LindbladGenerator {
public:
    LindbladGenerator(const Operator& drift, Eigen::VectorXd control, int sites, const LocalBasis& basis,
                      const JumpChannels& jumps)
        : control_(std::move(control)) {
        const Eigen::Index d = drift.rows();
        Operator heff = drift;
        for (const auto& ch : jumps.channels) {
            if (ch.rate == 0.0) continue;
            Channel c{ch.rate, {}, {}};
            const int from = basis.index(ch.from);
            const int to = basis.index(ch.to);
            for (int site = 0; site < sites; ++site) {
                c.src.clear();
                c.dst.clear();
                const auto stride = static_cast<Eigen::Index>(basis.stride(site, sites));
                for (Eigen::Index k = 0; k < d; ++k) {
                    if (basis.digit(static_cast<std::size_t>(k), site, sites) == from) {
                        c.src.push_back(k);
                        c.dst.push_back(k + (to - from) * stride);
                        heff(k, k) -= Complex(0.0, 0.5 * ch.rate);
                    }
                }
                channels_.push_back(c);
            }
        }
        heff_ = heff.sparseView(Complex(0.0), 0.0);
        heff_.makeCompressed();
    }

    void apply(const Operator& rho, double field, Operator& out) const {
        Operator x = heff_ * rho;
        if (field != 0.0) x += (field * control_).asDiagonal() * rho;
        out = Complex(0.0, -1.0) * x + Complex(0.0, 1.0) * x.adjoint();
        for (const auto& c : channels_) out(c.dst, c.dst) += c.rate * rho(c.src, c.src);
    }

private:
    struct Channel {
        double rate;
        std::vector<Eigen::Index> src;
        std::vector<Eigen::Index> dst;
    };
    Eigen::SparseMatrix<Complex, Eigen::RowMajor> heff_;
    Eigen::VectorXd control_;
    std::vector<Channel> channels_;
};

/// ρ_lab = R ρ R^dag with R = diag(exp(-i θ h)).
inline Operator rotate_by_control(const Operator& rho, const Eigen::VectorXd& charges, double theta) {
    const Eigen::VectorXcd r = (charges.cast<Complex>() * Complex(0.0, -theta)).array().exp();
    return r.asDiagonal() * rho * r.conjugate().asDiagonal();
}

}  // namespace detail

/// Lindblad evolution of ρ0 over the piecewise-constant schedule on the
/// {u, d, g} basis, with fixed-step RK4 at dt = δt/m ≤ min(δt, max_step).
///
/// When the control term is diagonal and commutes with the drift the
/// integration runs in the frame rotating with exp(-i Θ(t) Hz), where
/// Θ(t) = ∫B: the decay channels only shift Hz by a constant, so the
/// dissipator is unchanged by the transformation and the frame is exact.
inline MasterResult evolve_master_fixed(const ModelKind& model, const ControlSchedule& schedule,
                                        const JumpChannels& jumps, const DensityMatrix& rho0,
                                        const StateVector& target, int substeps, const MasterOptions& options) {
    const LocalBasis basis = LocalBasis::spin_with_ground();
    const Eigen::Index dim = rho0.dim();
    int sites = 0;
    for (Eigen::Index d = 1; d < dim; d *= 3) ++sites;
    if (static_cast<Eigen::Index>(basis.hilbert_dim(std::max(sites, 1))) != dim || sites < 2) {
        throw Error("evolve_master: density matrix is not a {u,d,g} chain state");
    }
    if (target.size() != dim) throw Error("evolve_master: target dimension mismatch");
    schedule.validate();
    jumps.validate(basis);
    rho0.validate("evolve_master initial state");

    const SystemHamiltonian sys = assemble_system(model, sites, basis);
    const Eigen::VectorXd charges = sys.control.diagonal().real();
    const bool rotating = options.frame == MasterFrame::Auto &&
                          commutator_max(sys.drift, sys.control) < 1e-12 * std::max(1.0, max_abs(sys.drift));
    const detail::LindbladGenerator generator(sys.drift, charges, sites, basis, jumps);

    MasterResult result;
    result.rotating_frame = rotating;
    result.substeps_per_slice = substeps;

    const double slice_dt = schedule.slice_duration();
    const double h = slice_dt / substeps;
    Operator rho = rho0.matrix();
    Operator k1, k2, k3, k4, tmp;
    double theta = 0.0;

    auto lab_state = [&]() { return rotating ? detail::rotate_by_control(rho, charges, theta) : rho; };
    auto record = [&](double t, bool last) {
        const Operator lab = lab_state();
        const DensityMatrix dm(lab);
        result.times.push_back(t);
        result.populations.push_back(population(dm, target));
        const bool check = options.checkpoints == CheckpointValidation::All ||
                           (options.checkpoints == CheckpointValidation::Final && last);
        if (check) {
            MasterCheckpoint cp{t, dm.trace_error(), dm.hermiticity(), dm.min_eigenvalue()};
            result.checkpoints.push_back(cp);
            dm.validate("evolve_master checkpoint");
        }
    };

    record(0.0, false);
    for (int k = 0; k < schedule.slices(); ++k) {
        const double b = schedule.amplitudes[static_cast<std::size_t>(k)];
        const double field = rotating ? 0.0 : b;
        for (int s = 0; s < substeps; ++s) {
            generator.apply(rho, field, k1);
            tmp = rho + (0.5 * h) * k1;
            generator.apply(tmp, field, k2);
            tmp = rho + (0.5 * h) * k2;
            generator.apply(tmp, field, k3);
            tmp = rho + h * k3;
            generator.apply(tmp, field, k4);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        theta += b * slice_dt;
        record(slice_dt * (k + 1), k + 1 == schedule.slices());
    }
    result.final_state = DensityMatrix(lab_state());
    return result;
}

inline MasterResult evolve_master(const ModelKind& model, const ControlSchedule& schedule, const JumpChannels& jumps,
                                  const DensityMatrix& rho0, const StateVector& target, const MasterOptions& options = {}) {
    if (!(options.max_step > 0.0)) throw Error("evolve_master: max_step must be positive");
    schedule.validate();
    const int m = std::max(1, static_cast<int>(std::ceil(schedule.slice_duration() / options.max_step - 1e-9)));
    if (!options.check_convergence) return evolve_master_fixed(model, schedule, jumps, rho0, target, m, options);

    MasterOptions coarse_opts = options;
    coarse_opts.checkpoints = CheckpointValidation::None;
    const MasterResult coarse = evolve_master_fixed(model, schedule, jumps, rho0, target, m, coarse_opts);
    MasterResult fine = evolve_master_fixed(model, schedule, jumps, rho0, target, 2 * m, options);
    fine.convergence_delta = std::abs(fine.populations.back() - coarse.populations.back());
    if (fine.convergence_delta >= options.convergence_tolerance) {
        throw Error("evolve_master: step halving changed the final population by " +
                    std::to_string(fine.convergence_delta));
    }
    return fine;
}

}  // namespace xxgraph
