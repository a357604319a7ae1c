#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string_view>
#include <vector>

#include "xxgraph/chain_model.hpp"
#include "xxgraph/graph_targets.hpp"

namespace xxgraph {

// Closed-form three-spin dynamics under a constant global field.
//
// The closed forms belong to H_con = J Σ_<ij> (σxσx + σyσy) + (field term),
// i.e. the flip-flop amplitude is 2J: they match build_xx_chain with coupling
// 2J. Propagation against exp(-iHt) shows that the field B in the closed forms
// enters as -B Σ S^z under the σ^z|u> = +|u> convention used everywhere
// else; constant_field_hamiltonian() applies that mapping.

/// Basis order of the closed-form amplitudes.
inline constexpr std::array<std::string_view, 8> kAnalyticOrder = {"ddd", "ddu", "dud", "duu",
                                                                   "udd", "udu", "uud", "uuu"};

inline std::array<Complex, 8> analytic_n3_amplitudes(double coupling, double field, double t) {
    using std::exp;
    const double s2 = std::numbers::sqrt2;
    const Complex i = kI;
    const Complex hop = exp(-0.5 * i * t * (4.0 * s2 * coupling + field));
    const Complex osc = exp(4.0 * i * s2 * coupling * t);
    const double c = std::cos(4.0 * coupling * t / s2);
    const double s = std::sin(4.0 * coupling * t / s2);
    const Complex pair_phase = 0.25 * exp(0.5 * i * t * field);
    return {
        exp(-1.5 * i * t * field) / (2.0 * s2),
        hop * (2.0 + s2 - (s2 - 2.0) * osc) / (8.0 * s2),
        hop * (1.0 + s2 - (s2 - 1.0) * osc) / (4.0 * s2),
        pair_phase * (s2 * c - i * s),
        hop * (2.0 + s2 - (s2 - 2.0) * osc) / (8.0 * s2),
        pair_phase * (s2 * c - 2.0 * i * s),
        pair_phase * (s2 * c - i * s),
        exp(1.5 * i * t * field) / (2.0 * s2),
    };
}

/// Closed-form amplitudes placed into the chain basis ordering.
inline StateVector analytic_n3_state(double coupling, double field, double t) {
    const auto amps = analytic_n3_amplitudes(coupling, field, t);
    StateVector psi = StateVector::Zero(8);
    for (std::size_t k = 0; k < 8; ++k) {
        std::size_t index = 0;
        for (char ch : kAnalyticOrder[k]) index = 2 * index + (ch == 'd' ? 1U : 0U);
        psi(static_cast<Eigen::Index>(index)) = amps[k];
    }
    return psi;
}

/// H_con for three spins with the field sign matched to the closed forms.
inline Operator constant_field_hamiltonian(double coupling, double field) {
    return build_xx_chain(3, 2.0 * coupling) - field * build_control_hz(3);
}

struct ConstantFieldSolution {
    double field = 0.0;
    double t_star = 0.0;
    int c1 = 0;
    int c2 = 0;
    Complex global_phase{0.0, -1.0};
};

/// B = 4J(1 - 4C1)/(√2 (2C1 - 2C2 - 1)), reached at t = √2π[1 + 2(C2 - C1)]/(4J).
inline ConstantFieldSolution constant_field_params(int c1, int c2, double coupling) {
    if (c2 < c1) throw Error("constant_field_params: requires C2 >= C1");
    if (!(coupling > 0.0)) throw Error("constant_field_params: coupling must be positive");
    const double s2 = std::numbers::sqrt2;
    ConstantFieldSolution s;
    s.c1 = c1;
    s.c2 = c2;
    s.field = 4.0 * coupling * (1.0 - 4.0 * c1) / (s2 * (2.0 * c1 - 2.0 * c2 - 1.0));
    s.t_star = s2 * std::numbers::pi * (1.0 + 2.0 * (c2 - c1)) / (4.0 * coupling);
    return s;
}

inline double analytic_k3_population(double coupling, double field, double t) {
    return std::norm(complete_graph_state(3).dot(analytic_n3_state(coupling, field, t)));
}

struct ConstantFieldScan {
    std::vector<double> fields;
    std::vector<double> times;
    Eigen::MatrixXd population;  // [field][time]
    std::vector<std::pair<std::size_t, std::size_t>> maxima;
};

/// |K3> population over a (B, t) grid, with interior 8-neighbour maxima at or
/// above `peak_floor`.
inline ConstantFieldScan scan_constant_field(double coupling, std::vector<double> fields, std::vector<double> times,
                                             double peak_floor = 0.99) {
    if (fields.empty() || times.empty()) throw Error("scan_constant_field: grids must be non-empty");
    ConstantFieldScan scan{std::move(fields), std::move(times), {}, {}};
    const auto nb = static_cast<Eigen::Index>(scan.fields.size());
    const auto nt = static_cast<Eigen::Index>(scan.times.size());
    scan.population.resize(nb, nt);
    for (Eigen::Index a = 0; a < nb; ++a) {
        for (Eigen::Index b = 0; b < nt; ++b) {
            scan.population(a, b) = analytic_k3_population(coupling, scan.fields[static_cast<std::size_t>(a)],
                                                           scan.times[static_cast<std::size_t>(b)]);
        }
    }
    for (Eigen::Index a = 1; a + 1 < nb; ++a) {
        for (Eigen::Index b = 1; b + 1 < nt; ++b) {
            const double v = scan.population(a, b);
            if (v < peak_floor) continue;
            bool peak = true;
            for (int da = -1; da <= 1 && peak; ++da) {
                for (int db = -1; db <= 1; ++db) {
                    if ((da != 0 || db != 0) && scan.population(a + da, b + db) > v) {
                        peak = false;
                        break;
                    }
                }
            }
            if (peak) scan.maxima.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        }
    }
    return scan;
}

}  // namespace xxgraph
