#pragma once

#include <cmath>

#include <Eigen/Eigenvalues>

#include "xxgraph/core/basis.hpp"

namespace xxgraph {

/// Hermiticity tolerance used by every propagator: 1e-12 in the operator's
/// own energy units, scaled up for operators with large entries.
inline double hermiticity_tolerance(const Operator& h) { return 1e-12 * std::max(1.0, max_abs(h)); }

inline void require_hermitian(const Operator& h, const char* what) {
    if (h.rows() != h.cols()) throw Error(std::string(what) + ": operator is not square");
    if (!all_finite(h)) throw Error(std::string(what) + ": operator has NaN/Inf entries");
    const double err = hermiticity_error(h);
    if (err > hermiticity_tolerance(h)) {
        throw Error(std::string(what) + ": operator is not Hermitian (max |H - H^dag| = " + std::to_string(err) + ")");
    }
}

/// Eigendecomposition H = V diag(w) V^dag, reused for any number of
/// propagation times.
class HermitianSpectrum {
public:
    HermitianSpectrum() = default;

    explicit HermitianSpectrum(const Operator& h) {
        require_hermitian(h, "HermitianSpectrum");
        // Symmetrize so the solver sees an exactly Hermitian input.
        const Operator sym = 0.5 * (h + h.adjoint());
        Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
        if (solver.info() != Eigen::Success) throw Error("Hermitian eigendecomposition failed");
        values_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
    }

    HermitianSpectrum(Eigen::VectorXd values, Operator vectors)
        : values_(std::move(values)), vectors_(std::move(vectors)) {}

    const Eigen::VectorXd& values() const { return values_; }
    const Operator& vectors() const { return vectors_; }
    Eigen::Index dim() const { return values_.size(); }

    /// exp(-iHt).
    Operator propagator(double t) const {
        const Eigen::VectorXcd phases = (values_.cast<Complex>() * Complex(0.0, -t)).array().exp();
        return vectors_ * phases.asDiagonal() * vectors_.adjoint();
    }

    StateVector evolve(const StateVector& psi, double t) const {
        if (psi.size() != dim()) throw Error("state dimension does not match the Hamiltonian");
        if (t == 0.0) return psi;
        const Eigen::VectorXcd phases = (values_.cast<Complex>() * Complex(0.0, -t)).array().exp();
        return vectors_ * phases.cwiseProduct(vectors_.adjoint() * psi);
    }

private:
    Eigen::VectorXd values_;
    Operator vectors_;
};

/// exp(-iHt) psi by spectral decomposition.
inline StateVector evolve_unitary(const Operator& h, double t, const StateVector& psi) {
    if (!std::isfinite(t)) throw Error("evolve_unitary: time is not finite");
    if (t < 0.0) throw Error("evolve_unitary: negative time");
    if (!psi.allFinite()) throw Error("evolve_unitary: state has NaN/Inf entries");
    if (h.rows() != psi.size()) throw Error("evolve_unitary: dimension mismatch");
    return HermitianSpectrum(h).evolve(psi, t);
}

inline void require_normalized(const StateVector& v, double tol, const char* what) {
    const double dev = std::abs(v.norm() - 1.0);
    if (!(dev <= tol)) throw Error(std::string(what) + ": state is not normalized (|norm - 1| = " + std::to_string(dev) + ")");
}

/// |<target|psi>|^2.
inline double population(const StateVector& psi, const StateVector& target) {
    if (psi.size() != target.size()) throw Error("population: dimension mismatch");
    require_normalized(target, 1e-8, "population target");
    return std::norm(target.dot(psi));
}

/// Dense density matrix with the physical-state checks used at checkpoints.
class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(Operator m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols()) throw Error("density matrix must be square");
    }

    static DensityMatrix pure(const StateVector& psi) {
        require_normalized(psi, 1e-10, "DensityMatrix::pure");
        return DensityMatrix(psi * psi.adjoint());
    }

    const Operator& matrix() const { return m_; }
    Operator& matrix() { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

    double trace_error() const { return std::abs(m_.trace() - Complex(1.0, 0.0)); }
    double hermiticity() const { return hermiticity_error(m_); }

    double min_eigenvalue() const {
        const Operator sym = 0.5 * (m_ + m_.adjoint());
        Eigen::SelfAdjointEigenSolver<Operator> solver(sym, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    }

    /// Throws unless Hermitian within 1e-10, unit trace within 1e-8 and
    /// min eigenvalue > -1e-8.
    void validate(const char* what = "density matrix") const {
        if (!m_.allFinite()) throw Error(std::string(what) + ": NaN/Inf entries");
        if (const double h = hermiticity(); h > 1e-10) {
            throw Error(std::string(what) + ": not Hermitian (" + std::to_string(h) + ")");
        }
        if (const double t = trace_error(); t > 1e-8) {
            throw Error(std::string(what) + ": trace deviates from 1 by " + std::to_string(t));
        }
        if (const double e = min_eigenvalue(); e < -1e-8) {
            throw Error(std::string(what) + ": negative eigenvalue " + std::to_string(e));
        }
    }

private:
    Operator m_;
};

/// <target|rho|target>.
inline double population(const DensityMatrix& rho, const StateVector& target) {
    if (rho.dim() != target.size()) throw Error("population: dimension mismatch");
    require_normalized(target, 1e-8, "population target");
    return target.dot(rho.matrix() * target).real();
}

}  // namespace xxgraph
