#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace xxgraph;

namespace {

StateVector basis_state(Eigen::Index dim, Eigen::Index k) {
    StateVector v = StateVector::Zero(dim);
    v(k) = 1.0;
    return v;
}

}  // namespace

TEST(Embedding, IdentityEmbedsToGlobalIdentity) {
    const auto b = LocalBasis::spin();
    for (int site = 0; site < 3; ++site) {
        const Operator id = embed_local_operator(b.identity(), site, 3, b);
        EXPECT_EQ(id.rows(), 8);
        EXPECT_EQ(max_abs(id - Operator::Identity(8, 8)), 0.0);
    }
}

TEST(Embedding, SigmaZOnLeftmostSite) {
    const auto b = LocalBasis::spin();
    const Operator z0 = embed_local_operator(b.pauli_z(), 0, 2, b);
    Eigen::VectorXcd d(4);
    d << 1, 1, -1, -1;
    EXPECT_EQ(max_abs(z0 - Operator(d.asDiagonal())), 0.0);
}

TEST(Embedding, SigmaXOnSecondSiteMatchesHandKronecker) {
    const auto b = LocalBasis::spin();
    const Operator x1 = embed_local_operator(b.pauli_x(), 1, 2, b);
    // |uu>=0 |ud>=1 |du>=2 |dd>=3; <ud| X_1 |uu> = 1
    EXPECT_EQ(x1(1, 0), Complex(1.0));
    Operator hand = Operator::Zero(4, 4);
    hand(0, 1) = hand(1, 0) = hand(2, 3) = hand(3, 2) = 1.0;
    EXPECT_EQ(max_abs(x1 - hand), 0.0);
}

TEST(Embedding, MatchesKroneckerOracleForEveryBasis) {
    for (const auto& b : {LocalBasis::spin(), LocalBasis::spin_with_ground(), LocalBasis::protocol()}) {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> n(0, 1);
        Operator a(b.dim(), b.dim()), c(b.dim(), b.dim());
        for (int i = 0; i < b.dim(); ++i)
            for (int j = 0; j < b.dim(); ++j) {
                a(i, j) = Complex(n(rng), n(rng));
                c(i, j) = Complex(n(rng), n(rng));
            }
        const int sites = 3;
        for (int s = 0; s < sites; ++s) {
            EXPECT_LT(max_abs(embed_local_operator(a, s, sites, b) - oracle::site_op(a, s, sites)), 1e-14);
        }
        EXPECT_LT(max_abs(embed_pair_operator(a, 0, c, 2, sites, b) - oracle::site_op(a, 0, sites) * oracle::site_op(c, 2, sites)),
                  1e-13);
        EXPECT_LT(max_abs(embed_pair_operator(a, 2, c, 1, sites, b) - oracle::site_op(a, 2, sites) * oracle::site_op(c, 1, sites)),
                  1e-13);
    }
}

TEST(Embedding, RejectsBadInputs) {
    const auto b = LocalBasis::spin();
    EXPECT_THROW(embed_local_operator(b.pauli_x(), 3, 3, b), Error);
    EXPECT_THROW(embed_local_operator(Operator::Identity(3, 3), 0, 3, b), Error);
    EXPECT_THROW(embed_pair_operator(b.pauli_x(), 1, b.pauli_x(), 1, 3, b), Error);
    EXPECT_THROW(LocalBasis::protocol().hilbert_dim(6), Error);  // 5^6 over the dense budget
}

TEST(Basis, LevelsAndLabels) {
    const auto p = LocalBasis::protocol();
    EXPECT_EQ(p.dim(), 5);
    EXPECT_TRUE(p.has(Level::Rydberg));
    EXPECT_FALSE(LocalBasis::spin().has(Level::Ground));
    EXPECT_THROW(LocalBasis::spin().index(Level::Ground), Error);
    EXPECT_EQ(LocalBasis::spin().label(1, 3), "uud");
    // S^z vanishes on levels outside {u, d}
    const Operator sz = LocalBasis::spin_with_ground().spin_z();
    EXPECT_EQ(sz(2, 2), Complex(0.0));
    EXPECT_EQ(sz(0, 0), Complex(0.5));
}

TEST(EvolveUnitary, ZeroTimeIsIdentity) {
    std::mt19937_64 rng(3);
    const StateVector psi = oracle::random_state(8, rng);
    const Operator h = build_xx_chain(3, 1.3) + 0.7 * build_control_hz(3);
    EXPECT_EQ((evolve_unitary(h, 0.0, psi) - psi).cwiseAbs().maxCoeff(), 0.0);
}

TEST(EvolveUnitary, SingleSpinPhase) {
    const double b = 2.1, t = 0.37;
    const Operator h = b * LocalBasis::spin().spin_z();
    const StateVector out = evolve_unitary(h, t, basis_state(2, 0));
    EXPECT_LT(std::abs(out(0) - std::exp(Complex(0, -b * t / 2))), 1e-14);
    EXPECT_LT(std::abs(out(1)), 1e-15);
}

TEST(EvolveUnitary, TwoSiteFlipFlop) {
    const double j = 1.7, t = 0.9;
    const StateVector out = evolve_unitary(build_xx_chain(2, j), t, basis_state(4, 1));  // |ud>
    EXPECT_LT(std::abs(out(1) - std::cos(j * t)), 1e-13);
    EXPECT_LT(std::abs(out(2) - Complex(0, -std::sin(j * t))), 1e-13);
}

TEST(EvolveUnitary, MatchesPadeExponentialAndPreservesNorm) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const Operator h = build_xx_chain(4, 0.8 + trial) - 1.1 * trial * build_control_hz(4);
        const StateVector psi = oracle::random_state(16, rng);
        const StateVector a = evolve_unitary(h, 1.3, psi);
        const StateVector b = oracle::expm_propagator(h, 1.3) * psi;
        EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(a.norm(), 1.0, 1e-10);
    }
}

TEST(EvolveUnitary, ForwardTimesBackwardIsIdentity) {
    const HermitianSpectrum s(build_xx_chain(5, 1.0) + 0.3 * build_control_hz(5));
    const Operator prod = s.propagator(2.7) * s.propagator(-2.7);
    EXPECT_LT(max_abs(prod - Operator::Identity(32, 32)), 1e-10);
}

TEST(EvolveUnitary, RejectsNonHermitianAndNegativeTime) {
    Operator h = build_xx_chain(2, 1.0);
    h(0, 1) = 1e-3;
    EXPECT_THROW(evolve_unitary(h, 1.0, basis_state(4, 0)), Error);
    EXPECT_THROW(evolve_unitary(build_xx_chain(2, 1.0), -1.0, basis_state(4, 0)), Error);
}

TEST(Population, BasicIdentities) {
    std::mt19937_64 rng(5);
    const StateVector psi = oracle::random_state(8, rng);
    EXPECT_NEAR(population(psi, psi), 1.0, 1e-14);
    EXPECT_EQ(population(basis_state(2, 0), basis_state(2, 1)), 0.0);
    EXPECT_NEAR(population(std::polar(1.0, 0.77) * psi, psi), 1.0, 1e-14);
    EXPECT_NEAR(population(DensityMatrix::pure(psi), psi), 1.0, 1e-14);
    EXPECT_THROW(population(psi, basis_state(4, 0)), Error);
}

TEST(DensityMatrix, ValidationCatchesBadStates) {
    Operator m = Operator::Zero(2, 2);
    m(0, 0) = 0.6;
    m(1, 1) = 0.6;
    EXPECT_THROW(DensityMatrix(m).validate(), Error);
    m(1, 1) = 0.4;
    m(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix(m).validate(), Error);  // not Hermitian
    m(1, 0) = 0.1;
    EXPECT_NO_THROW(DensityMatrix(m).validate());
}
