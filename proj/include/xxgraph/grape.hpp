#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "xxgraph/chain_model.hpp"
#include "xxgraph/core/propagate.hpp"
#include "xxgraph/graph_targets.hpp"
#include "xxgraph/schedule.hpp"

namespace xxgraph {

struct LandscapeGradient {
    double phi = 0.0;
    std::vector<double> gradient;
    bool finite_difference = false;
};

/// A fixed (H0, Hz, ψ0, target) quadruple, evaluated for many schedules.
///
/// When Hz is diagonal and commutes with H0, H0 is diagonalized inside each
/// magnetization sector once; every slice propagator is then a diagonal phase
/// in that joint eigenbasis and a landscape evaluation costs O(n·dim).
/// Otherwise each slice is exponentiated separately and gradients fall back
/// to central finite differences.
class ControlProblem {
public:
    static constexpr double kFiniteDifferenceStep = 1e-6;

    ControlProblem(SystemHamiltonian system, StateVector initial, StateVector target)
        : system_(std::move(system)), initial_(std::move(initial)), target_(std::move(target)) {
        const auto dim = system_.drift.rows();
        if (system_.drift.cols() != dim || system_.control.rows() != dim || system_.control.cols() != dim) {
            throw Error("ControlProblem: drift/control dimensions differ");
        }
        if (initial_.size() != dim || target_.size() != dim) throw Error("ControlProblem: state dimension mismatch");
        require_hermitian(system_.drift, "drift Hamiltonian");
        require_hermitian(system_.control, "control Hamiltonian");
        require_normalized(initial_, 1e-10, "initial state");
        require_normalized(target_, 1e-8, "target state");

        const Operator off_diag = system_.control - Operator(system_.control.diagonal().asDiagonal());
        const double scale = std::max(1.0, max_abs(system_.drift));
        commuting_ = max_abs(off_diag) == 0.0 && commutator_max(system_.drift, system_.control) < 1e-12 * scale;
        if (commuting_) build_joint_basis();
    }

    bool commuting() const { return commuting_; }
    const SystemHamiltonian& system() const { return system_; }
    const StateVector& initial() const { return initial_; }
    const StateVector& target() const { return target_; }
    Eigen::Index dim() const { return initial_.size(); }

    /// <target|U(T,0)|ψ0>.
    Complex overlap(const ControlSchedule& s) const {
        s.validate();
        if (commuting_) {
            const double area = s.area();
            Complex acc = 0.0;
            for (Eigen::Index j = 0; j < dim(); ++j) {
                const double phase = energies_(j) * s.duration + charges_(j) * area;
                acc += target_eig_(j) * initial_eig_(j) * std::polar(1.0, -phase);
            }
            return acc;
        }
        return target_.dot(evolve_generic(s, s.slices()));
    }

    double landscape(const ControlSchedule& s) const { return std::norm(overlap(s)); }

    /// Φ and ∂Φ/∂B_k.
    LandscapeGradient landscape_and_gradient(const ControlSchedule& s) const {
        s.validate();
        return commuting_ ? exact_gradient(s) : finite_difference_gradient(s);
    }

    /// Central-difference gradient on the landscape; valid for any model.
    LandscapeGradient finite_difference_gradient(const ControlSchedule& s, double step = kFiniteDifferenceStep) const {
        LandscapeGradient out;
        out.phi = landscape(s);
        out.finite_difference = true;
        out.gradient.resize(s.amplitudes.size());
        ControlSchedule probe = s;
        for (std::size_t k = 0; k < s.amplitudes.size(); ++k) {
            probe.amplitudes[k] = s.amplitudes[k] + step;
            const double up = landscape(probe);
            probe.amplitudes[k] = s.amplitudes[k] - step;
            const double down = landscape(probe);
            probe.amplitudes[k] = s.amplitudes[k];
            out.gradient[k] = (up - down) / (2.0 * step);
        }
        return out;
    }

    StateVector final_state(const ControlSchedule& s) const { return state_after(s, s.slices()); }

    /// State after the first `slices_done` slices.
    StateVector state_after(const ControlSchedule& s, int slices_done) const {
        s.validate();
        if (slices_done < 0 || slices_done > s.slices()) throw Error("state_after: slice index out of range");
        if (!commuting_) return evolve_generic(s, slices_done);
        const double dt = s.slice_duration();
        double area = 0.0;
        for (int k = 0; k < slices_done; ++k) area += s.amplitudes[static_cast<std::size_t>(k)] * dt;
        const double t = dt * slices_done;
        Eigen::VectorXcd c(dim());
        for (Eigen::Index j = 0; j < dim(); ++j) {
            c(j) = initial_eig_(j) * std::polar(1.0, -(energies_(j) * t + charges_(j) * area));
        }
        return joint_basis_ * c;
    }

    /// Target population at every slice boundary (n + 1 values).
    std::vector<double> population_trace(const ControlSchedule& s) const {
        s.validate();
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(s.slices()) + 1);
        if (commuting_) {
            for (int k = 0; k <= s.slices(); ++k) out.push_back(std::norm(target_.dot(state_after(s, k))));
            return out;
        }
        StateVector psi = initial_;
        out.push_back(std::norm(target_.dot(psi)));
        const double dt = s.slice_duration();
        for (double b : s.amplitudes) {
            psi = HermitianSpectrum(system_.drift + b * system_.control).evolve(psi, dt);
            out.push_back(std::norm(target_.dot(psi)));
        }
        return out;
    }

private:
    void build_joint_basis() {
        const Eigen::Index d = dim();
        std::map<double, std::vector<Eigen::Index>> sectors;
        for (Eigen::Index k = 0; k < d; ++k) sectors[system_.control(k, k).real()].push_back(k);
        joint_basis_ = Operator::Zero(d, d);
        energies_.resize(d);
        charges_.resize(d);
        Eigen::Index col = 0;
        for (const auto& [charge, idx] : sectors) {
            const auto m = static_cast<Eigen::Index>(idx.size());
            Operator block(m, m);
            for (Eigen::Index a = 0; a < m; ++a) {
                for (Eigen::Index b = 0; b < m; ++b) {
                    block(a, b) = system_.drift(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
                }
            }
            const HermitianSpectrum spec(block);
            for (Eigen::Index v = 0; v < m; ++v, ++col) {
                energies_(col) = spec.values()(v);
                charges_(col) = charge;
                for (Eigen::Index a = 0; a < m; ++a) joint_basis_(idx[static_cast<std::size_t>(a)], col) = spec.vectors()(a, v);
            }
        }
        initial_eig_ = joint_basis_.adjoint() * initial_;
        target_eig_ = (joint_basis_.adjoint() * target_).conjugate();
    }

    LandscapeGradient exact_gradient(const ControlSchedule& s) const {
        // Forward amplitudes f_j(t_{k+1}) and backward amplitudes b_j(t_{k+1})
        // in the joint eigenbasis; Hz is diag(charges) there.
        const int n = s.slices();
        const double dt = s.slice_duration();
        const Eigen::Index d = dim();
        Eigen::VectorXcd forward = initial_eig_;
        std::vector<Eigen::VectorXcd> forwards(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const double b = s.amplitudes[static_cast<std::size_t>(k)];
            for (Eigen::Index j = 0; j < d; ++j) forward(j) *= std::polar(1.0, -(energies_(j) + b * charges_(j)) * dt);
            forwards[static_cast<std::size_t>(k)] = forward;
        }
        const Complex amp = target_eig_.cwiseProduct(forward).sum();
        LandscapeGradient out;
        out.phi = std::norm(amp);
        out.gradient.assign(static_cast<std::size_t>(n), 0.0);
        Eigen::VectorXcd backward = target_eig_;  // <target|U(T, t_{k+1}) in eigen components
        for (int k = n - 1; k >= 0; --k) {
            Complex m = 0.0;
            const auto& f = forwards[static_cast<std::size_t>(k)];
            for (Eigen::Index j = 0; j < d; ++j) m += backward(j) * charges_(j) * f(j);
            out.gradient[static_cast<std::size_t>(k)] = 2.0 * dt * (m * std::conj(amp)).imag();
            const double b = s.amplitudes[static_cast<std::size_t>(k)];
            for (Eigen::Index j = 0; j < d; ++j) backward(j) *= std::polar(1.0, -(energies_(j) + b * charges_(j)) * dt);
        }
        return out;
    }

    StateVector evolve_generic(const ControlSchedule& s, int slices_done) const {
        StateVector psi = initial_;
        const double dt = s.slice_duration();
        for (int k = 0; k < slices_done; ++k) {
            psi = HermitianSpectrum(system_.drift + s.amplitudes[static_cast<std::size_t>(k)] * system_.control)
                      .evolve(psi, dt);
        }
        return psi;
    }

    SystemHamiltonian system_;
    StateVector initial_;
    StateVector target_;
    bool commuting_ = false;
    Operator joint_basis_;
    Eigen::VectorXd energies_;
    Eigen::VectorXd charges_;
    Eigen::VectorXcd initial_eig_;
    Eigen::VectorXcd target_eig_;  // conjugated components of the target
};

inline LandscapeGradient landscape_and_gradient(const ModelKind& model, const ControlSchedule& schedule,
                                                const StateVector& initial, const StateVector& target) {
    const int sites = static_cast<int>(std::lround(std::log2(static_cast<double>(initial.size()))));
    if ((Eigen::Index{1} << sites) != initial.size()) throw Error("landscape_and_gradient: state is not a 2-level chain state");
    return ControlProblem(assemble_system(model, sites), initial, target).landscape_and_gradient(schedule);
}

enum class GuessKind { Gaussian, Random };

struct GuessSpec {
    GuessKind kind = GuessKind::Gaussian;
    double amplitude = 1.0;  // B0
    double sigma = 0.1;
    std::uint64_t seed = 0;
    int slices = 0;  // 0 -> 100 for Gaussian, 10 for random

    int resolved_slices() const { return slices > 0 ? slices : (kind == GuessKind::Gaussian ? 100 : 10); }

    ControlSchedule build(double duration) const {
        return kind == GuessKind::Gaussian ? gaussian_guess(resolved_slices(), duration, amplitude, sigma)
                                           : random_guess(resolved_slices(), duration, amplitude, seed);
    }
};

/// Step control for the ascent. After an accepted step the rate grows by
/// `growth`; a step that would lower Φ is retried at `backtrack` times the
/// rate until the rate drops below `min_rate`.
struct LearningSpec {
    double initial_rate = 1.0;
    double backtrack = 0.5;
    double growth = 2.0;
    double min_rate = 1e-6;
    int max_iterations = 5000;
    double tolerance = 1e-8;
    int patience = 10;
    int restarts = 4;

    void validate() const {
        if (!(initial_rate > 0.0)) throw Error("learning rate must be positive");
        if (!(backtrack > 0.0 && backtrack < 1.0)) throw Error("backtracking factor must lie in (0, 1)");
        if (!(growth >= 1.0)) throw Error("growth factor must be >= 1");
        if (max_iterations < 1) throw Error("max iterations must be >= 1");
        if (!(tolerance > 0.0)) throw Error("stop tolerance must be positive");
        if (patience < 1) throw Error("patience must be >= 1");
        if (restarts < 1) throw Error("restarts must be >= 1");
    }
};

struct GrapeConfig {
    ModelKind model = IdealModel{};
    int sites = 3;
    double duration = 1.0;
    TargetForm target = TargetForm::LiteralEq1;
    GuessSpec guess;
    LearningSpec learning;
};

struct GrapeResult {
    ControlSchedule schedule;
    std::vector<double> phi_history;
    double final_population = 0.0;
    int iterations = 0;
    bool converged = false;
    bool finite_difference = false;
    int start_index = 0;
    std::uint64_t seed = 0;
};

/// Gradient ascent B_k <- B_k + α g_k from one starting schedule.
inline GrapeResult ascend(const ControlProblem& problem, ControlSchedule start, const LearningSpec& learning) {
    learning.validate();
    GrapeResult result;
    result.schedule = std::move(start);
    LandscapeGradient current = problem.landscape_and_gradient(result.schedule);
    auto check_finite = [](const LandscapeGradient& lg) {
        if (!std::isfinite(lg.phi)) throw Error("GRAPE: landscape value is not finite");
        for (double g : lg.gradient) {
            if (!std::isfinite(g)) throw Error("GRAPE: gradient is not finite");
        }
    };
    check_finite(current);
    result.finite_difference = current.finite_difference;
    result.phi_history.push_back(current.phi);

    const bool zero_gradient = std::all_of(current.gradient.begin(), current.gradient.end(), [](double g) { return g == 0.0; });
    if (zero_gradient) {
        result.converged = true;
        result.final_population = problem.landscape(result.schedule);
        return result;
    }

    double rate = learning.initial_rate;
    int calm = 0;
    ControlSchedule trial = result.schedule;
    for (int it = 1; it <= learning.max_iterations; ++it) {
        double trial_phi = 0.0;
        bool accepted = false;
        while (rate >= learning.min_rate) {
            for (std::size_t k = 0; k < trial.amplitudes.size(); ++k) {
                trial.amplitudes[k] = result.schedule.amplitudes[k] + rate * current.gradient[k];
            }
            trial_phi = problem.landscape(trial);
            if (!std::isfinite(trial_phi)) throw Error("GRAPE: landscape value is not finite");
            if (trial_phi >= current.phi) {
                accepted = true;
                break;
            }
            rate *= learning.backtrack;
        }
        if (!accepted) {
            // No ascent direction left at the smallest admissible rate.
            result.converged = true;
            break;
        }
        const double delta = trial_phi - current.phi;
        result.schedule = trial;
        current = problem.landscape_and_gradient(result.schedule);
        check_finite(current);
        result.phi_history.push_back(current.phi);
        result.iterations = it;
        rate *= learning.growth;
        calm = std::abs(delta) < learning.tolerance ? calm + 1 : 0;
        if (calm >= learning.patience) {
            result.converged = true;
            break;
        }
    }
    result.final_population = problem.landscape(result.schedule);
    return result;
}

/// Ascent from the guess and from `restarts - 1` copies of it shifted by a
/// uniform field j·2π/(restarts·T); the best final population wins (earliest
/// start on ties).
inline GrapeResult optimize(const ControlProblem& problem, const ControlSchedule& guess, const LearningSpec& learning) {
    learning.validate();
    std::optional<GrapeResult> best;
    for (int j = 0; j < learning.restarts; ++j) {
        ControlSchedule start = guess;
        const double offset = kTwoPi * j / (learning.restarts * guess.duration);
        for (double& b : start.amplitudes) b += offset;
        GrapeResult r = ascend(problem, std::move(start), learning);
        r.start_index = j;
        if (!best || r.final_population > best->final_population) best = std::move(r);
    }
    return *best;
}

inline ControlProblem make_problem(const GrapeConfig& config, const StateVector& initial) {
    return ControlProblem(assemble_system(config.model, config.sites), initial, graph_target(config.sites, config.target));
}

inline GrapeResult optimize(const GrapeConfig& config, const StateVector& initial) {
    const ControlProblem problem = make_problem(config, initial);
    GrapeResult r = optimize(problem, config.guess.build(config.duration), config.learning);
    r.seed = config.guess.seed;
    return r;
}

/// Interior local maxima of `values` that reach `floor`.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& values, double floor) {
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] >= floor) peaks.push_back(i);
    }
    return peaks;
}

struct DurationScan {
    std::vector<double> durations;
    std::vector<double> populations;
    std::vector<std::size_t> peaks;
};

inline DurationScan scan_duration(const GrapeConfig& config, const StateVector& initial, double t_min, double t_max,
                                  int steps, double peak_floor = 0.9) {
    if (!(t_min < t_max)) throw Error("scan_duration: t_min must be below t_max");
    if (!(t_min > 0.0)) throw Error("scan_duration: durations must be positive");
    if (steps < 2) throw Error("scan_duration: need at least 2 grid points");
    const ControlProblem problem = make_problem(config, initial);
    DurationScan scan;
    for (int i = 0; i < steps; ++i) {
        const double t = t_min + (t_max - t_min) * i / (steps - 1);
        scan.durations.push_back(t);
        scan.populations.push_back(optimize(problem, config.guess.build(t), config.learning).final_population);
    }
    scan.peaks = local_maxima(scan.populations, peak_floor);
    return scan;
}

}  // namespace xxgraph
