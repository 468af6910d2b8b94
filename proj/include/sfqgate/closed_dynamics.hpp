// closed_dynamics.hpp: Unitary propagation of SFQ schedules and coherent error metrics.

#pragma once

#include "sfqgate/fluxonium.hpp"
#include "sfqgate/schedule.hpp"

#include <array>
#include <optional>
#include <vector>

namespace sfq {

using Matrix2 = Eigen::Matrix2cd;

struct ErrorBudget {
    double infidelity_closed = 0.0;
    double leakage = 0.0;
    double phase_error = 0.0;
    double discretization_error = 0.0;
    double unaccounted = 0.0;
    std::optional<double> infidelity_open;
    std::optional<double> incoherent;
};

// U_Q = (1 - delta) (c_i I + c_x X + c_y Y + c_z Z), sum |c|^2 = 1.
struct PauliDecomposition {
    cplx c_i, c_x, c_y, c_z;
    double delta = 0.0;
};

ComplexMatrix kick_unitary(const QubitModel& model, Coupling coupling, double theta_kick);

// Diagonal exp(-i H0 t).
ComplexMatrix free_evolution(const QubitModel& model, double t);

// Full n_levels propagator of the schedule, kick by kick.
ComplexMatrix propagate(const QubitModel& model, const Schedule& s);

Matrix2 project_computational(const ComplexMatrix& u);

// exp(i theta X / 2) for inductive coupling, exp(i theta Y / 2) for capacitive.
Matrix2 target_unitary(Coupling coupling, double theta_targ);

double process_fidelity(const Matrix2& u_q, const Matrix2& u_targ);
double leakage_closed(const Matrix2& u_q);

// Global phase fixed so that c_i is real and non-negative.
PauliDecomposition pauli_decompose(const Matrix2& u_q);

// Coherent budget; the Pauli coefficients are phase-aligned with the target before
// the phase and discretization terms are evaluated.
ErrorBudget error_budget(const Matrix2& u_q, Coupling coupling, double theta_targ);

// Evaluates the mirrored schedule for every train length 1..n_max at once.
// Only the two computational columns are propagated, and the train prefix is shared
// between consecutive train lengths.
class TrainScanner {
public:
    TrainScanner(const QubitModel& model, Coupling coupling, double theta_kick, double theta_targ);

    // Infidelity 1 - F_pro for n_train = 1..n_max (entry k holds n_train = k + 1).
    // ramp_times must lie in [0, r_periods * T); they need not be sorted.
    std::vector<double> scan(std::vector<double> ramp_times, int r_periods, int n_max) const;

    // Projected gate for one train length (n_train = 0 allowed).
    Matrix2 projected(std::vector<double> ramp_times, int r_periods, int n_train) const;

    double period() const { return period_; }
    const Matrix2& target() const { return target_; }

    // Upper bound on n_levels for the stack-allocated kernels.
    static constexpr int kMaxLevels = 12;

private:
    // Dense n x 2 (or 2 x n) block with split real/imaginary storage, indexed [level * 2 + column].
    struct Block {
        std::array<double, 2 * kMaxLevels> re{};
        std::array<double, 2 * kMaxLevels> im{};
    };
    // Row-major n x n with split storage.
    struct Square {
        std::vector<double> re, im;
    };

    static Square split(const ComplexMatrix& m);
    void left_multiply(const Square& a, Block& b) const;  // b <- a * b (b is n x 2)
    void right_multiply(Block& b, const Square& a) const; // b <- b * a (b is 2 x n, stored transposed)
    void apply_phases(Block& b, double t) const;
    Block on_ramp(const std::vector<double>& sorted, int r_periods) const;
    Block off_ramp(const std::vector<double>& sorted, int r_periods) const;
    Matrix2 join(const Block& finish, const Block& train) const;

    int levels_ = 0;
    RealVector omegas_;
    Square kick_;
    Square kick_then_idle_; // K * F(T)
    Matrix2 target_;
    double period_ = 0.0;
};

} // namespace sfq
