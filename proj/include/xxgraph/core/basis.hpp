#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace xxgraph {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Named single-site levels. Spin levels are the dipolar-coupled Rydberg pair,
/// Ground is the empty decay sink, Zero/One the hyperfine clock states and
/// Rydberg the auxiliary non-interacting level used for decoupling.
enum class Level { Up, Down, Ground, Zero, One, Rydberg };

inline char level_symbol(Level level) {
    switch (level) {
        case Level::Up: return 'u';
        case Level::Down: return 'd';
        case Level::Ground: return 'g';
        case Level::Zero: return '0';
        case Level::One: return '1';
        case Level::Rydberg: return 'r';
    }
    return '?';
}

/// Ordered list of levels on one site. The index of a level inside the list is
/// its row in every local matrix; site 0 is the leftmost tensor factor.
///
///   spin()              {u, d}
///   spin_with_ground()  {u, d, g}
///   protocol()          {0, 1, u, d, r}
class LocalBasis {
public:
    static LocalBasis spin() { return LocalBasis({Level::Up, Level::Down}); }
    static LocalBasis spin_with_ground() { return LocalBasis({Level::Up, Level::Down, Level::Ground}); }
    static LocalBasis protocol() {
        return LocalBasis({Level::Zero, Level::One, Level::Up, Level::Down, Level::Rydberg});
    }

    int dim() const { return static_cast<int>(levels_.size()); }
    std::span<const Level> levels() const { return levels_; }

    bool has(Level level) const {
        return std::find(levels_.begin(), levels_.end(), level) != levels_.end();
    }

    int index(Level level) const {
        auto it = std::find(levels_.begin(), levels_.end(), level);
        if (it == levels_.end()) {
            throw Error(std::string("level '") + level_symbol(level) + "' is not part of the local basis");
        }
        return static_cast<int>(it - levels_.begin());
    }

    /// d^N, with an overflow guard for the dense representation.
    std::size_t hilbert_dim(int sites) const {
        if (sites < 1) throw Error("site count must be >= 1");
        std::size_t total = 1;
        for (int i = 0; i < sites; ++i) {
            total *= static_cast<std::size_t>(dim());
            if (total > 4096) throw Error("Hilbert space dimension exceeds the dense limit of 4096");
        }
        return total;
    }

    /// |to><from| on one site.
    Operator transition(Level to, Level from) const {
        Operator m = Operator::Zero(dim(), dim());
        m(index(to), index(from)) = 1.0;
        return m;
    }

    Operator projector(Level level) const { return transition(level, level); }

    /// Pauli matrices act on the {u, d} pair and vanish on every other level.
    Operator pauli_x() const { return transition(Level::Up, Level::Down) + transition(Level::Down, Level::Up); }
    Operator pauli_y() const {
        return -kI * transition(Level::Up, Level::Down) + kI * transition(Level::Down, Level::Up);
    }
    Operator pauli_z() const { return projector(Level::Up) - projector(Level::Down); }
    Operator spin_z() const { return 0.5 * pauli_z(); }
    Operator identity() const { return Operator::Identity(dim(), dim()); }

    /// Digit of `site` inside a global basis index.
    int digit(std::size_t global, int site, int sites) const {
        for (int s = sites - 1; s > site; --s) global /= static_cast<std::size_t>(dim());
        return static_cast<int>(global % static_cast<std::size_t>(dim()));
    }

    std::size_t stride(int site, int sites) const {
        std::size_t s = 1;
        for (int k = site + 1; k < sites; ++k) s *= static_cast<std::size_t>(dim());
        return s;
    }

    /// Basis string such as "udd" for a global index.
    std::string label(std::size_t global, int sites) const {
        std::string out(static_cast<std::size_t>(sites), '?');
        for (int s = sites - 1; s >= 0; --s) {
            out[static_cast<std::size_t>(s)] = level_symbol(levels_[global % static_cast<std::size_t>(dim())]);
            global /= static_cast<std::size_t>(dim());
        }
        return out;
    }

    bool operator==(const LocalBasis&) const = default;

private:
    explicit LocalBasis(std::vector<Level> levels) : levels_(std::move(levels)) {}
    std::vector<Level> levels_;
};

inline double max_abs(const Operator& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermiticity_error(const Operator& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return max_abs(m - m.adjoint());
}

inline double commutator_max(const Operator& a, const Operator& b) { return max_abs(a * b - b * a); }

inline bool all_finite(const Operator& m) { return m.allFinite(); }

/// I ⊗ … ⊗ op ⊗ … ⊗ I with op at `site`, built by index arithmetic.
inline Operator embed_local_operator(const Operator& op, int site, int sites, const LocalBasis& basis) {
    const int d = basis.dim();
    if (op.rows() != d || op.cols() != d) {
        throw Error("local operator is " + std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                    " but the basis has dimension " + std::to_string(d));
    }
    if (site < 0 || site >= sites) throw Error("site " + std::to_string(site) + " out of range");
    const std::size_t dim = basis.hilbert_dim(sites);
    const std::size_t stride = basis.stride(site, sites);
    Operator out = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        const int c = basis.digit(col, site, sites);
        const std::size_t base = col - static_cast<std::size_t>(c) * stride;
        for (int r = 0; r < d; ++r) {
            const Complex v = op(r, c);
            if (v != Complex{}) out(static_cast<Eigen::Index>(base + static_cast<std::size_t>(r) * stride),
                                    static_cast<Eigen::Index>(col)) = v;
        }
    }
    return out;
}

/// Product of two local operators on distinct sites, embedded without a dense
/// matrix product.
inline Operator embed_pair_operator(const Operator& op_a, int site_a, const Operator& op_b, int site_b, int sites,
                                    const LocalBasis& basis) {
    if (site_a == site_b) throw Error("pair operator needs two distinct sites");
    const int d = basis.dim();
    if (op_a.rows() != d || op_a.cols() != d || op_b.rows() != d || op_b.cols() != d) {
        throw Error("local operator dimension does not match the basis");
    }
    if (site_a < 0 || site_a >= sites || site_b < 0 || site_b >= sites) throw Error("site out of range");
    const std::size_t dim = basis.hilbert_dim(sites);
    const std::size_t sa = basis.stride(site_a, sites);
    const std::size_t sb = basis.stride(site_b, sites);
    Operator out = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        const int ca = basis.digit(col, site_a, sites);
        const int cb = basis.digit(col, site_b, sites);
        const std::size_t base = col - static_cast<std::size_t>(ca) * sa - static_cast<std::size_t>(cb) * sb;
        for (int ra = 0; ra < d; ++ra) {
            const Complex va = op_a(ra, ca);
            if (va == Complex{}) continue;
            for (int rb = 0; rb < d; ++rb) {
                const Complex vb = op_b(rb, cb);
                if (vb == Complex{}) continue;
                const std::size_t row = base + static_cast<std::size_t>(ra) * sa + static_cast<std::size_t>(rb) * sb;
                out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += va * vb;
            }
        }
    }
    return out;
}

}  // namespace xxgraph
