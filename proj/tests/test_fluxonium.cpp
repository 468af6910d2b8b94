#include "oracles.hpp"
#include "sfqgate/fluxonium.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace sfq;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const QubitModel& default_model() {
    static const QubitModel model = diagonalize_model(CircuitParams{});
    return model;
}

} // namespace

TEST(FockOperators, TwoLevelLadder) {
    const auto ops = build_fock_operators(2, 1.0, 1.0);
    const double phi_zpf = std::pow(8.0, 0.25) / std::sqrt(2.0);
    const double n_zpf = std::pow(1.0 / 8.0, 0.25) / std::sqrt(2.0);
    EXPECT_NEAR(ops.phi(0, 1).real(), phi_zpf, 1e-15);
    EXPECT_NEAR(ops.phi(1, 0).real(), phi_zpf, 1e-15);
    EXPECT_NEAR(std::abs(ops.phi(0, 0)), 0.0, 1e-15);
    // n = n_zpf * Y up to the sign convention of the ladder.
    EXPECT_NEAR(std::abs(ops.n(0, 1)), n_zpf, 1e-15);
    EXPECT_NEAR(ops.n(0, 1).real(), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(ops.n(0, 1) + ops.n(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(phi_zpf * n_zpf, 0.5, 1e-15);
}

TEST(FockOperators, CanonicalCommutatorAwayFromEdge) {
    const auto ops = build_fock_operators(20, 1.3, 0.7);
    const ComplexMatrix c = ops.phi * ops.n - ops.n * ops.phi;
    for (int k = 0; k < 19; ++k) {
        EXPECT_NEAR(c(k, k).real(), 0.0, 1e-12);
        EXPECT_NEAR(c(k, k).imag(), 1.0, 1e-12);
    }
    EXPECT_LT(numerics::hermiticity_defect(ops.phi), 1e-15);
    EXPECT_LT(numerics::hermiticity_defect(ops.n), 1e-15);
}

TEST(Model, DefaultSpectrum) {
    const auto& m = default_model();
    EXPECT_NEAR(m.omega01() / kTwoPi, 0.58, 0.01);
    EXPECT_NEAR((m.omegas(2) - m.omegas(1)) / kTwoPi, 3.39, 0.01);
    EXPECT_EQ(m.omegas(0), 0.0);
    for (int k = 1; k < m.n_levels(); ++k) EXPECT_LE(m.omegas(k - 1), m.omegas(k));
    EXPECT_DOUBLE_EQ(m.period * m.omega01(), kTwoPi);
    EXPECT_FALSE(m.convergence_warning.has_value());
}

TEST(Model, SpectrumMatchesPhaseGridOracle) {
    const auto& m = default_model();
    const auto grid = oracle::grid_spectrum(CircuitParams{}, 6);
    for (int k = 1; k < 6; ++k) {
        const double expected = grid[static_cast<std::size_t>(k)] - grid[0];
        EXPECT_NEAR(m.omegas(k) / kTwoPi, expected, 1e-6 * expected) << "level " << k;
    }
}

TEST(Model, FockConvergence) {
    CircuitParams p;
    p.n_fock = 40;
    const auto big = diagonalize_model(p);
    EXPECT_LT(std::abs(default_model().omega01() - big.omega01()), 1e-6);
}

TEST(Model, ChargeMatrixElementRatio) {
    const auto& m = default_model();
    const double ratio = std::abs(matrix_element(m, Operator::charge, 0, 3)) / std::abs(matrix_element(m, Operator::charge, 0, 1));
    EXPECT_GT(ratio, 1.5);
    EXPECT_LT(ratio, 2.5);
}

TEST(Model, OperatorsHermitianAndPhaseConvention) {
    const auto& m = default_model();
    EXPECT_LT(numerics::hermiticity_defect(m.phi_op), 1e-10);
    EXPECT_LT(numerics::hermiticity_defect(m.n_op), 1e-10);
    for (int j = 0; j + 1 < m.n_levels(); ++j) EXPECT_GE(m.phi_op(j, j + 1).real(), 0.0);
    EXPECT_GT(std::abs(matrix_element(m, Operator::phase, 0, 1)), 0.1);
    for (int i = 0; i < m.n_levels(); ++i) {
        for (int j = 0; j < m.n_levels(); ++j) {
            EXPECT_LT(std::abs(matrix_element(m, Operator::phase, i, j) - std::conj(matrix_element(m, Operator::phase, j, i))), 1e-12);
        }
    }
}

TEST(Model, ParitySelectionAtSweetSpot) {
    CircuitParams p;
    p.n_fock = 40;
    const auto big = diagonalize_model(p);
    EXPECT_LT(std::abs(matrix_element(default_model(), Operator::charge, 0, 0)), 1e-8);
    EXPECT_LT(std::abs(matrix_element(big, Operator::charge, 0, 0)), 1e-8);
    EXPECT_LT(std::abs(matrix_element(default_model(), Operator::phase, 0, 2)), 1e-8);
}

TEST(Model, HarmonicLimit) {
    CircuitParams p;
    p.e_j = 0.0;
    p.phi_ext = 0.0;
    p.e_c = 0.8;
    p.e_l = 1.3;
    const auto m = diagonalize_model(p);
    const double spacing = std::sqrt(8.0 * p.e_c * p.e_l);
    const double phi_zpf = std::pow(8.0 * p.e_c / p.e_l, 0.25) / std::sqrt(2.0);
    for (int k = 1; k < m.n_levels(); ++k) {
        EXPECT_NEAR((m.omegas(k) - m.omegas(k - 1)) / kTwoPi, spacing, 1e-8 * spacing);
    }
    for (int i = 0; i < m.n_levels(); ++i) {
        for (int j = 0; j < m.n_levels(); ++j) {
            const double expected = (j == i + 1) ? phi_zpf * std::sqrt(static_cast<double>(j))
                                    : (i == j + 1) ? phi_zpf * std::sqrt(static_cast<double>(i))
                                                   : 0.0;
            EXPECT_NEAR(std::abs(m.phi_op(i, j) - expected), 0.0, 1e-8) << i << "," << j;
        }
    }
}

TEST(Model, MatrixElementOutOfRange) {
    EXPECT_THROW(matrix_element(default_model(), Operator::phase, 0, 6), DomainError);
    EXPECT_THROW(matrix_element(default_model(), Operator::charge, -1, 0), DomainError);
}

TEST(Model, InvalidParams) {
    CircuitParams p;
    p.e_c = 0.0;
    EXPECT_THROW(diagonalize_model(p), DomainError);
    p = CircuitParams{};
    p.n_levels = 31;
    EXPECT_THROW(diagonalize_model(p), DomainError);
}

TEST(Model, TruncationWarning) {
    CircuitParams p;
    p.n_fock = 8;
    EXPECT_TRUE(diagonalize_model(p).convergence_warning.has_value());
}

TEST(Coherence, DefaultRates) {
    const auto r = CoherenceRates::defaults();
    EXPECT_DOUBLE_EQ(r.gamma_1, 1.0 / 1.2e6);
    EXPECT_NEAR(r.gamma_phi, 1.0 / 0.8e6 - 0.5 / 1.2e6, 1e-20);
    EXPECT_THROW(CoherenceRates::from_times(1.0, 3.0), DomainError);
}
