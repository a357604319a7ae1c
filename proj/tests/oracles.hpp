#pragma once
// Slow but independent reference computations used to check the library.

#include <complex>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "xxgraph/xxgraph.hpp"

namespace oracle {

using xxgraph::Complex;
using xxgraph::Operator;
using xxgraph::StateVector;

inline Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < b.rows(); ++k)
                for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

/// I ⊗ ... ⊗ op(site) ⊗ ... ⊗ I; site 0 leftmost.
inline Operator site_op(const Operator& op, int site, int sites) {
    const auto d = op.rows();
    Operator out = Operator::Identity(1, 1);
    for (int s = 0; s < sites; ++s) out = kron(out, s == site ? op : Operator(Operator::Identity(d, d)));
    return out;
}

inline Operator sx() { return (Operator(2, 2) << 0, 1, 1, 0).finished(); }
inline Operator sy() { return (Operator(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished(); }
inline Operator sz() { return (Operator(2, 2) << 1, 0, 0, -1).finished(); }

/// (J/2) Σ (σxσx + σyσy) by Kronecker products.
inline Operator xx_chain(int sites, double j) {
    const auto dim = Eigen::Index(1) << sites;
    Operator h = Operator::Zero(dim, dim);
    for (int i = 0; i + 1 < sites; ++i) {
        h += 0.5 * j * (site_op(sx(), i, sites) * site_op(sx(), i + 1, sites) +
                        site_op(sy(), i, sites) * site_op(sy(), i + 1, sites));
    }
    return h;
}

inline Operator total_sz(int sites) {
    const auto dim = Eigen::Index(1) << sites;
    Operator h = Operator::Zero(dim, dim);
    for (int i = 0; i < sites; ++i) h += 0.5 * site_op(sz(), i, sites);
    return h;
}

/// Literal tensor product of the graph-state definition:
/// 2^{-N/2} ⊗_i [ |u_i> (-1)^{N-i} Π_{j>i} σz_j + |d_i> ], expanded term by
/// term. Each factor either picks |d_i>, or picks |u_i> and multiplies the
/// remaining factors by a sign and a σz string; the operator string acts on
/// sites that are chosen later, so expand recursively with a pending
/// Z-parity per site.
inline StateVector literal_graph_state(int sites) {
    const auto dim = std::size_t(1) << sites;
    StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(dim));
    // Products of σz from earlier factors act on later kets; σz|u> = +|u>,
    // σz|d> = -|d>. Running over every choice list reproduces the product.
    for (std::size_t pick = 0; pick < dim; ++pick) {
        // bit (sites-1-i) set => factor i chose |d>
        double sign = 1.0;
        std::vector<int> z_count(static_cast<std::size_t>(sites), 0);
        for (int i = 0; i < sites; ++i) {
            const bool down = (pick >> (sites - 1 - i)) & 1U;
            if (!down) {
                if ((sites - (i + 1)) % 2) sign = -sign;  // (-1)^{N-i}, i counted from 1
                for (int j = i + 1; j < sites; ++j) ++z_count[static_cast<std::size_t>(j)];
            }
        }
        for (int j = 0; j < sites; ++j) {
            const bool down = (pick >> (sites - 1 - j)) & 1U;
            if (down && z_count[static_cast<std::size_t>(j)] % 2) sign = -sign;
        }
        psi(static_cast<Eigen::Index>(pick)) = sign * std::pow(2.0, -0.5 * sites);
    }
    return psi;
}

/// ∏ CZ (|u> = |0>) on |+>^N using full gate matrices.
inline StateVector cz_circuit_state(int sites) {
    const auto dim = Eigen::Index(1) << sites;
    StateVector psi = StateVector::Constant(dim, std::pow(2.0, -0.5 * sites));
    const Operator p_down = (Operator(2, 2) << 0, 0, 0, 1).finished();
    for (int i = 0; i < sites; ++i) {
        for (int j = i + 1; j < sites; ++j) {
            const Operator cz = Operator::Identity(dim, dim) - 2.0 * site_op(p_down, i, sites) * site_op(p_down, j, sites);
            psi = cz * psi;
        }
    }
    return psi;
}

/// exp(-iHt) via Eigen's matrix exponential (Padé), not the spectral path.
inline Operator expm_propagator(const Operator& h, double t) {
    const Operator a = Complex(0.0, -t) * h;
    return a.exp();
}

/// Slice-by-slice Schrödinger propagation with MatrixExponential.
inline StateVector propagate_schedule(const Operator& drift, const Operator& control, const xxgraph::ControlSchedule& s,
                                      const StateVector& psi0) {
    StateVector psi = psi0;
    const double dt = s.slice_duration();
    for (double b : s.amplitudes) psi = expm_propagator(drift + b * control, dt) * psi;
    return psi;
}

inline double landscape(const Operator& drift, const Operator& control, const xxgraph::ControlSchedule& s,
                        const StateVector& psi0, const StateVector& target) {
    return std::norm(target.dot(propagate_schedule(drift, control, s, psi0)));
}

/// Central differences on the independent landscape.
inline std::vector<double> fd_gradient(const Operator& drift, const Operator& control, const xxgraph::ControlSchedule& s,
                                       const StateVector& psi0, const StateVector& target, double step = 1e-6) {
    std::vector<double> g(s.amplitudes.size());
    xxgraph::ControlSchedule p = s;
    for (std::size_t k = 0; k < g.size(); ++k) {
        p.amplitudes[k] = s.amplitudes[k] + step;
        const double up = landscape(drift, control, p, psi0, target);
        p.amplitudes[k] = s.amplitudes[k] - step;
        const double dn = landscape(drift, control, p, psi0, target);
        p.amplitudes[k] = s.amplitudes[k];
        g[k] = (up - dn) / (2.0 * step);
    }
    return g;
}

/// Lindblad right-hand side built from full operators, lab frame.
struct DenseLindblad {
    Operator h;
    std::vector<Operator> jumps;  // already scaled by sqrt(rate)

    Operator rhs(const Operator& rho) const {
        Operator out = Complex(0, -1) * (h * rho - rho * h);
        for (const auto& l : jumps) {
            const Operator ldl = l.adjoint() * l;
            out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
        }
        return out;
    }
};

inline Operator rk4(const DenseLindblad& l, Operator rho, double t, int steps) {
    const double h = t / steps;
    for (int s = 0; s < steps; ++s) {
        const Operator k1 = l.rhs(rho);
        const Operator k2 = l.rhs(rho + 0.5 * h * k1);
        const Operator k3 = l.rhs(rho + 0.5 * h * k2);
        const Operator k4 = l.rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

inline StateVector random_state(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    StateVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(n(rng), n(rng));
    return v.normalized();
}

}  // namespace oracle
