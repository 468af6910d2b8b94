#include "oracles.hpp"
#include "sfqgate/closed_dynamics.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace sfq;

namespace {

constexpr double kPi = std::numbers::pi;

const QubitModel& model() {
    static const QubitModel m = diagonalize_model(CircuitParams{});
    return m;
}

Matrix2 pauli(char which) {
    Matrix2 m;
    switch (which) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -kI, kI, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m.setIdentity();
    }
    return m;
}

Schedule schedule(Coupling c, double theta, int r, std::vector<double> times, int n_train) {
    Schedule s;
    s.coupling = c;
    s.theta_kick = theta;
    s.ramp = Ramp::make(r, std::move(times), model().period);
    s.n_train = n_train;
    return s;
}

std::vector<double> random_times(std::mt19937_64& rng, int n, int r) {
    std::uniform_real_distribution<double> t(0.0, r * model().period);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (double& v : out) v = t(rng);
    return out;
}

// Kick-by-kick product with a Taylor-series kick, independent of propagate().
ComplexMatrix reference_propagator(const Schedule& s) {
    const auto& m = model();
    const ComplexMatrix& op = s.coupling == Coupling::inductive ? m.phi_op : m.n_op;
    const ComplexMatrix kick = oracle::taylor_expm(kI * (s.theta_kick / (2.0 * std::abs(op(0, 1)))) * op);
    const int n = m.n_levels();
    auto idle = [&](double dt) {
        ComplexMatrix f = ComplexMatrix::Zero(n, n);
        for (int j = 0; j < n; ++j) f(j, j) = std::exp(-kI * m.omegas(j) * dt);
        return f;
    };
    ComplexMatrix u = ComplexMatrix::Identity(n, n);
    double now = 0.0;
    for (double t : mirrored_kick_times(s, m.period)) {
        u = kick * idle(t - now) * u;
        now = t;
    }
    return idle(total_duration(s, m.period) - now) * u;
}

Matrix2 random_contraction(std::mt19937_64& rng) {
    const ComplexMatrix u = oracle::random_unitary(4, rng);
    std::uniform_real_distribution<double> shrink(0.5, 1.0);
    return shrink(rng) * u.topLeftCorner<2, 2>();
}

} // namespace

TEST(Kick, IdentityAndUnitarity) {
    for (auto c : {Coupling::inductive, Coupling::capacitive}) {
        EXPECT_LT((kick_unitary(model(), c, 0.0) - ComplexMatrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-14);
        for (double theta : {0.03, 0.15, 1.0, 3.0}) EXPECT_LT(numerics::unitarity_defect(kick_unitary(model(), c, theta)), 1e-10);
    }
}

TEST(Kick, ProjectedBlockApproximatesRotation) {
    for (auto c : {Coupling::inductive, Coupling::capacitive}) {
        const double theta = c == Coupling::inductive ? 0.15 : 0.03;
        const ComplexMatrix k = kick_unitary(model(), c, theta);
        const Matrix2 block = project_computational(k);
        const double leak = leakage_closed(block);
        EXPECT_NEAR(std::abs(block(1, 0)), std::sin(theta / 2.0), std::sqrt(leak) + 1e-3 * theta);
        EXPECT_GT(1.0 - process_fidelity(block, target_unitary(c, theta)), -1e-15);
        // Beyond the lost norm only a second-order phase remains.
        EXPECT_LT(1.0 - process_fidelity(block, target_unitary(c, theta)), leak + 1e-5);
    }
}

TEST(Kick, RejectsNegativeAngle) { EXPECT_THROW(kick_unitary(model(), Coupling::inductive, -0.1), DomainError); }

TEST(FreeEvolution, PeriodIdentities) {
    const auto& m = model();
    EXPECT_LT((free_evolution(m, 0.0) - ComplexMatrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-15);
    const ComplexMatrix f = free_evolution(m, m.period);
    EXPECT_EQ(f(0, 0), cplx(1.0, 0.0));
    EXPECT_LT(std::abs(f(1, 1) - 1.0), 1e-12);
    EXPECT_GT(std::abs(f(2, 2) - 1.0), 1e-3);
    EXPECT_LT(std::abs(free_evolution(m, m.period / 2.0)(1, 1) + 1.0), 1e-12);
    for (int k = 1; k <= 7; ++k) {
        const Matrix2 block = project_computational(free_evolution(m, k * m.period));
        EXPECT_LT((block - Matrix2::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Propagate, EmptyScheduleIsIdentityOnQubit) {
    for (int r = 1; r <= 5; ++r) {
        const Matrix2 uq = project_computational(propagate(model(), schedule(Coupling::inductive, 0.15, r, {}, 0)));
        EXPECT_LT((uq - Matrix2::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Propagate, MatchesReferenceAndIsUnitary) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const int r = 1 + trial % 5;
        const auto c = trial % 2 ? Coupling::capacitive : Coupling::inductive;
        const auto s = schedule(c, c == Coupling::inductive ? 0.15 : 0.03, r, random_times(rng, trial % 7, r), 188 - 7 * trial);
        const ComplexMatrix u = propagate(model(), s);
        EXPECT_LT(numerics::unitarity_defect(u), 1e-9);
        EXPECT_LT((u - reference_propagator(s)).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Propagate, NaiveTrainInfidelityRange) {
    const auto s = schedule(Coupling::inductive, 0.15, 1, {}, 21);
    const double inf = 1.0 - process_fidelity(project_computational(propagate(model(), s)), target_unitary(Coupling::inductive, kPi));
    EXPECT_GT(inf, 1e-3);
    EXPECT_LT(inf, 1e-1);
}

TEST(Project, Examples) {
    EXPECT_EQ(project_computational(ComplexMatrix::Identity(6, 6)), Matrix2::Identity());
    std::mt19937_64 rng(2);
    ComplexMatrix blockdiag = ComplexMatrix::Zero(6, 6);
    const ComplexMatrix b = oracle::random_unitary(2, rng);
    blockdiag.topLeftCorner(2, 2) = b;
    blockdiag.bottomRightCorner(4, 4) = oracle::random_unitary(4, rng);
    EXPECT_LT((project_computational(blockdiag) - b).cwiseAbs().maxCoeff(), 1e-15);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix2 block = project_computational(oracle::random_unitary(6, rng));
        Eigen::JacobiSVD<Matrix2> svd(block);
        EXPECT_LE(svd.singularValues()(0), 1.0 + 1e-12);
    }
}

TEST(Target, Examples) {
    EXPECT_LT((target_unitary(Coupling::inductive, 0.0) - Matrix2::Identity()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((target_unitary(Coupling::inductive, kPi) - kI * pauli('X')).cwiseAbs().maxCoeff(), 1e-15);
    const Matrix2 half = (Matrix2::Identity() + kI * pauli('Y')) / std::sqrt(2.0);
    EXPECT_LT((target_unitary(Coupling::capacitive, kPi / 2.0) - half).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProcessFidelity, Examples) {
    const Matrix2 t = target_unitary(Coupling::capacitive, 1.1);
    EXPECT_NEAR(process_fidelity(t, t), 1.0, 1e-15);
    EXPECT_NEAR(process_fidelity(std::polar(1.0, 0.7) * t, t), 1.0, 1e-15);
    const Matrix2 u = (Matrix2::Identity() - kI * pauli('X')) / std::sqrt(2.0);
    EXPECT_NEAR(process_fidelity(u, pauli('X')), 0.5, 1e-15);
}

TEST(ProcessFidelity, GlobalPhaseInvariance) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> phase(-kPi, kPi);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix2 u = random_contraction(rng);
        const Matrix2 t = oracle::random_unitary(2, rng);
        const double f = process_fidelity(u, t);
        EXPECT_NEAR(process_fidelity(std::polar(1.0, phase(rng)) * u, t), f, 1e-14);
        EXPECT_NEAR(process_fidelity(u, std::polar(1.0, phase(rng)) * t), f, 1e-14);
    }
}

TEST(Leakage, Examples) {
    std::mt19937_64 rng(1);
    EXPECT_NEAR(leakage_closed(oracle::random_unitary(2, rng)), 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(leakage_closed(Matrix2::Zero()), 1.0);
    Matrix2 d = Matrix2::Zero();
    d(0, 0) = 1.0;
    d(1, 1) = 0.9;
    EXPECT_NEAR(leakage_closed(d), 0.095, 1e-15);
}

TEST(Leakage, EqualsTwoDeltaMinusDeltaSquared) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix2 u = random_contraction(rng);
        const auto p = pauli_decompose(u);
        EXPECT_NEAR(leakage_closed(u), 2.0 * p.delta - p.delta * p.delta, 1e-12);
    }
}

TEST(Pauli, Examples) {
    const double theta = 0.9;
    const auto p = pauli_decompose(target_unitary(Coupling::inductive, theta));
    EXPECT_NEAR(p.c_i.real(), std::cos(theta / 2.0), 1e-15);
    EXPECT_NEAR(p.c_i.imag(), 0.0, 1e-15);
    EXPECT_LT(std::abs(p.c_x - kI * std::sin(theta / 2.0)), 1e-15);
    EXPECT_NEAR(p.delta, 0.0, 1e-15);

    const Matrix2 shrunk = 0.8 * Matrix2::Identity();
    const auto q = pauli_decompose(shrunk);
    EXPECT_NEAR(q.delta, 0.2, 1e-15);
    EXPECT_NEAR(q.c_i.real(), 1.0, 1e-15);
    EXPECT_NEAR(2.0 * q.delta - q.delta * q.delta, 0.36, 1e-15);
    EXPECT_NEAR(leakage_closed(shrunk), 0.36, 1e-15);

    EXPECT_THROW(pauli_decompose(Matrix2::Zero()), DomainError);
}

TEST(Pauli, NormalizedAndPhaseFixed) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix2 u = random_contraction(rng);
        const auto p = pauli_decompose(u);
        EXPECT_NEAR(std::norm(p.c_i) + std::norm(p.c_x) + std::norm(p.c_y) + std::norm(p.c_z), 1.0, 1e-12);
        EXPECT_NEAR(p.c_i.imag(), 0.0, 1e-15);
        EXPECT_GE(p.c_i.real(), 0.0);
        EXPECT_NEAR((1.0 - p.delta) * (1.0 - p.delta), 0.5 * (u * u.adjoint()).trace().real(), 1e-12);
        const Matrix2 rebuilt = (1.0 - p.delta) * (p.c_i * pauli('I') + p.c_x * pauli('X') + p.c_y * pauli('Y') + p.c_z * pauli('Z'));
        // Equal up to the removed global phase.
        EXPECT_NEAR(process_fidelity(rebuilt, u / u.norm() * std::sqrt(2.0)), process_fidelity(u, u / u.norm() * std::sqrt(2.0)), 1e-12);
    }
}

TEST(Budget, IdealTargetIsClean) {
    for (auto c : {Coupling::inductive, Coupling::capacitive}) {
        for (double theta : {0.3, kPi / 2.0, kPi, 5.0}) {
            const auto b = error_budget(target_unitary(c, theta), c, theta);
            EXPECT_NEAR(b.infidelity_closed, 0.0, 1e-12);
            EXPECT_NEAR(b.leakage, 0.0, 1e-12);
            EXPECT_NEAR(b.phase_error, 0.0, 1e-12);
            EXPECT_NEAR(b.discretization_error, 0.0, 1e-12);
            EXPECT_NEAR(b.unaccounted, 0.0, 1e-12);
        }
    }
}

TEST(Budget, AnalyticZError) {
    // exp(i th X/2) exp(i eps Z/2) = c c' I + i s c' X + i s s' Y + i c s' Z.
    const double theta = kPi / 3.0, eps = 0.05;
    const Matrix2 u = target_unitary(Coupling::inductive, theta) *
                      (std::cos(eps / 2.0) * Matrix2::Identity() + kI * std::sin(eps / 2.0) * pauli('Z'));
    const auto b = error_budget(u, Coupling::inductive, theta);
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    EXPECT_NEAR(b.phase_error, c * c * std::pow(std::sin(eps / 2.0), 2), 1e-14);
    EXPECT_NEAR(b.discretization_error, s * s * std::pow(1.0 - std::cos(eps / 2.0), 2), 1e-14);
    EXPECT_NEAR(b.leakage, 0.0, 1e-14);
}

TEST(Budget, ScalarContraction) {
    const Matrix2 u = 0.99 * target_unitary(Coupling::capacitive, kPi);
    const auto b = error_budget(u, Coupling::capacitive, kPi);
    EXPECT_NEAR(b.leakage, 1.0 - 0.99 * 0.99, 1e-14);
    EXPECT_NEAR(b.phase_error, 0.0, 1e-14);
    EXPECT_NEAR(b.discretization_error, 0.0, 1e-14);
    EXPECT_NEAR(b.leakage + b.phase_error + b.discretization_error + b.unaccounted, b.infidelity_closed, 1e-15);
    EXPECT_NEAR(b.infidelity_closed, 1.0 - 0.99 * 0.99, 1e-14);
}

TEST(Budget, ClosureAndFloors) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix2 u = random_contraction(rng);
        const double theta = 0.1 + 0.03 * trial;
        const auto c = trial % 2 ? Coupling::capacitive : Coupling::inductive;
        const auto b = error_budget(u, c, theta);
        EXPECT_EQ(b.infidelity_closed - (b.leakage + b.phase_error + b.discretization_error), b.unaccounted);
        EXPECT_GE(b.infidelity_closed, -1e-12);
        EXPECT_GE(b.leakage, -1e-12);
        EXPECT_GE(b.phase_error, 0.0);
        EXPECT_GE(b.discretization_error, 0.0);
    }
}

TEST(TrainScanner, MatchesPropagate) {
    std::mt19937_64 rng(17);
    for (auto c : {Coupling::inductive, Coupling::capacitive}) {
        const double theta = c == Coupling::inductive ? 0.15 : 0.03;
        const TrainScanner scanner(model(), c, theta, kPi);
        for (int trial = 0; trial < 6; ++trial) {
            const int r = 1 + trial % 5;
            const auto times = random_times(rng, trial, r);
            const auto scan = scanner.scan(times, r, 30);
            for (int n : {1, 2, 7, 30}) {
                const auto s = schedule(c, theta, r, times, n);
                const Matrix2 uq = project_computational(propagate(model(), s));
                EXPECT_NEAR(scan[static_cast<std::size_t>(n - 1)], 1.0 - process_fidelity(uq, target_unitary(c, kPi)), 1e-12);
            }
            const Matrix2 empty_train = scanner.projected(times, r, 0);
            const Matrix2 direct = project_computational(propagate(model(), schedule(c, theta, r, times, 0)));
            EXPECT_LT((empty_train - direct).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}
