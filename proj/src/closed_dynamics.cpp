#include "sfqgate/closed_dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sfq {

namespace {

const Matrix2& pauli(int k) {
    static const std::array<Matrix2, 4> paulis = [] {
        std::array<Matrix2, 4> p;
        p[0] << 1, 0, 0, 1;
        p[1] << 0, 1, 1, 0;
        p[2] << 0, -kI, kI, 0;
        p[3] << 1, 0, 0, -1;
        return p;
    }();
    return paulis[static_cast<std::size_t>(k)];
}

std::array<cplx, 4> raw_coefficients(const Matrix2& u) {
    std::array<cplx, 4> a;
    for (int k = 0; k < 4; ++k) a[static_cast<std::size_t>(k)] = 0.5 * (pauli(k).adjoint() * u).trace();
    return a;
}

const ComplexMatrix& drive_operator(const QubitModel& model, Coupling coupling) {
    return coupling == Coupling::inductive ? model.phi_op : model.n_op;
}

} // namespace

ComplexMatrix kick_unitary(const QubitModel& model, Coupling coupling, double theta_kick) {
    if (!(theta_kick >= 0.0)) throw DomainError("kick_unitary: theta_kick must be non-negative");
    const ComplexMatrix& op = drive_operator(model, coupling);
    const double m01 = std::abs(op(0, 1));
    if (!(m01 > 1e-12)) throw DomainError("kick_unitary: vanishing 0-1 matrix element, kick angle undefined");
    return numerics::expm_hermitian(op, kI * (theta_kick / (2.0 * m01)));
}

ComplexMatrix free_evolution(const QubitModel& model, double t) {
    if (!(t >= 0.0)) throw DomainError("free_evolution: t must be non-negative");
    const Eigen::Index n = model.omegas.size();
    ComplexMatrix f = ComplexMatrix::Zero(n, n);
    f(0, 0) = 1.0;
    for (Eigen::Index j = 1; j < n; ++j) f(j, j) = std::polar(1.0, -model.omegas(j) * t);
    return f;
}

ComplexMatrix propagate(const QubitModel& model, const Schedule& s) {
    const double period = model.period;
    const auto times = mirrored_kick_times(s, period);
    const double duration = total_duration(s, period);
    const ComplexMatrix kick = kick_unitary(model, s.coupling, s.theta_kick);

    ComplexMatrix u = ComplexMatrix::Identity(model.n_levels(), model.n_levels());
    double now = 0.0;
    for (double t : times) {
        u = kick * free_evolution(model, t - now) * u;
        now = t;
    }
    return free_evolution(model, duration - now) * u;
}

Matrix2 project_computational(const ComplexMatrix& u) {
    if (u.rows() < 2 || u.cols() < 2) throw DomainError("project_computational: need at least two levels");
    return u.topLeftCorner<2, 2>();
}

Matrix2 target_unitary(Coupling coupling, double theta_targ) {
    const int axis = coupling == Coupling::inductive ? 1 : 2;
    return std::cos(theta_targ / 2.0) * pauli(0) + kI * std::sin(theta_targ / 2.0) * pauli(axis);
}

double process_fidelity(const Matrix2& u_q, const Matrix2& u_targ) {
    return 0.25 * std::norm((u_targ.adjoint() * u_q).trace());
}

double leakage_closed(const Matrix2& u_q) {
    return 1.0 - 0.5 * (u_q * u_q.adjoint()).trace().real();
}

PauliDecomposition pauli_decompose(const Matrix2& u_q) {
    auto a = raw_coefficients(u_q);
    double norm2 = 0.0;
    for (const auto& v : a) norm2 += std::norm(v);
    if (!(norm2 > 0.0)) throw DomainError("pauli_decompose: zero matrix has no decomposition");
    const double scale = std::sqrt(norm2);
    for (auto& v : a) v /= scale;

    std::size_t anchor = 0;
    if (std::abs(a[0]) < 1e-14) {
        for (std::size_t k = 1; k < 4; ++k) {
            if (std::abs(a[k]) > std::abs(a[anchor])) anchor = k;
        }
    }
    const cplx rot = std::polar(1.0, -std::arg(a[anchor]));
    for (auto& v : a) v *= rot;
    a[anchor] = std::abs(a[anchor]);
    return {a[0], a[1], a[2], a[3], 1.0 - scale};
}

ErrorBudget error_budget(const Matrix2& u_q, Coupling coupling, double theta_targ) {
    ErrorBudget b;
    const Matrix2 target = target_unitary(coupling, theta_targ);
    b.infidelity_closed = 1.0 - process_fidelity(u_q, target);
    b.leakage = leakage_closed(u_q);

    const auto decomposition = pauli_decompose(u_q);
    std::array<cplx, 4> c{decomposition.c_i, decomposition.c_x, decomposition.c_y, decomposition.c_z};
    const auto ideal = raw_coefficients(target);
    cplx overlap = 0.0;
    for (std::size_t k = 0; k < 4; ++k) overlap += std::conj(ideal[k]) * c[k];
    if (std::abs(overlap) > 1e-14) {
        const cplx rot = std::polar(1.0, -std::arg(overlap));
        for (auto& v : c) v *= rot;
    }

    const std::size_t axis = coupling == Coupling::inductive ? 1 : 2;
    b.phase_error = std::norm(c[3]);
    b.discretization_error = std::norm(c[axis] - kI * std::sin(theta_targ / 2.0));
    b.unaccounted = b.infidelity_closed - (b.leakage + b.phase_error + b.discretization_error);
    return b;
}

TrainScanner::TrainScanner(const QubitModel& model, Coupling coupling, double theta_kick, double theta_targ)
    : levels_(model.n_levels()), omegas_(model.omegas), target_(target_unitary(coupling, theta_targ)), period_(model.period) {
    if (levels_ > kMaxLevels) {
        throw DomainError("TrainScanner: at most " + std::to_string(kMaxLevels) + " levels are supported");
    }
    const ComplexMatrix kick = kick_unitary(model, coupling, theta_kick);
    kick_ = split(kick);
    kick_then_idle_ = split(kick * free_evolution(model, period_));
}

TrainScanner::Square TrainScanner::split(const ComplexMatrix& m) {
    Square out;
    out.re.resize(static_cast<std::size_t>(m.size()));
    out.im.resize(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const auto k = static_cast<std::size_t>(i * m.cols() + j);
            out.re[k] = m(i, j).real();
            out.im[k] = m(i, j).imag();
        }
    }
    return out;
}

void TrainScanner::left_multiply(const Square& a, Block& b) const {
    Block out;
    const std::size_t n = static_cast<std::size_t>(levels_);
    for (std::size_t i = 0; i < n; ++i) {
        double r0 = 0.0, i0 = 0.0, r1 = 0.0, i1 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double ar = a.re[i * n + k], ai = a.im[i * n + k];
            const double br0 = b.re[2 * k], bi0 = b.im[2 * k];
            const double br1 = b.re[2 * k + 1], bi1 = b.im[2 * k + 1];
            r0 += ar * br0 - ai * bi0;
            i0 += ar * bi0 + ai * br0;
            r1 += ar * br1 - ai * bi1;
            i1 += ar * bi1 + ai * br1;
        }
        out.re[2 * i] = r0;
        out.im[2 * i] = i0;
        out.re[2 * i + 1] = r1;
        out.im[2 * i + 1] = i1;
    }
    b = out;
}

// b holds a 2 x n row block stored as [level * 2 + row].
void TrainScanner::right_multiply(Block& b, const Square& a) const {
    Block out;
    const std::size_t n = static_cast<std::size_t>(levels_);
    for (std::size_t j = 0; j < n; ++j) {
        double r0 = 0.0, i0 = 0.0, r1 = 0.0, i1 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double ar = a.re[k * n + j], ai = a.im[k * n + j];
            const double br0 = b.re[2 * k], bi0 = b.im[2 * k];
            const double br1 = b.re[2 * k + 1], bi1 = b.im[2 * k + 1];
            r0 += br0 * ar - bi0 * ai;
            i0 += br0 * ai + bi0 * ar;
            r1 += br1 * ar - bi1 * ai;
            i1 += br1 * ai + bi1 * ar;
        }
        out.re[2 * j] = r0;
        out.im[2 * j] = i0;
        out.re[2 * j + 1] = r1;
        out.im[2 * j + 1] = i1;
    }
    b = out;
}

// Multiplies level j of the block by exp(-i omega_j t); the same for row and column blocks.
void TrainScanner::apply_phases(Block& b, double t) const {
    for (int j = 1; j < levels_; ++j) {
        const double angle = -omegas_(j) * t;
        const double c = std::cos(angle), s = std::sin(angle);
        for (int col = 0; col < 2; ++col) {
            const auto k = static_cast<std::size_t>(2 * j + col);
            const double re = b.re[k], im = b.im[k];
            b.re[k] = re * c - im * s;
            b.im[k] = re * s + im * c;
        }
    }
}

// Columns 0, 1 of F(RT - t_N) K ... K F(t_1): the gate up to the first train kick.
TrainScanner::Block TrainScanner::on_ramp(const std::vector<double>& sorted, int r_periods) const {
    Block b;
    b.re[0] = 1.0;
    b.re[3] = 1.0;
    double now = 0.0;
    for (double t : sorted) {
        apply_phases(b, t - now);
        left_multiply(kick_, b);
        now = t;
    }
    apply_phases(b, r_periods * period_ - now);
    return b;
}

// Rows 0, 1 of the segment after the last train kick: F(t_1) K F(t_2 - t_1) ... K F(RT - t_N).
TrainScanner::Block TrainScanner::off_ramp(const std::vector<double>& sorted, int r_periods) const {
    Block b;
    b.re[0] = 1.0;
    b.re[3] = 1.0;
    double prev = 0.0;
    for (double t : sorted) {
        apply_phases(b, t - prev);
        right_multiply(b, kick_);
        prev = t;
    }
    apply_phases(b, r_periods * period_ - prev);
    return b;
}

Matrix2 TrainScanner::join(const Block& finish, const Block& train) const {
    Matrix2 u = Matrix2::Zero();
    for (int row = 0; row < 2; ++row) {
        for (int col = 0; col < 2; ++col) {
            double re = 0.0, im = 0.0;
            for (int k = 0; k < levels_; ++k) {
                const auto f = static_cast<std::size_t>(2 * k + row);
                const auto g = static_cast<std::size_t>(2 * k + col);
                re += finish.re[f] * train.re[g] - finish.im[f] * train.im[g];
                im += finish.re[f] * train.im[g] + finish.im[f] * train.re[g];
            }
            u(row, col) = cplx(re, im);
        }
    }
    return u;
}

std::vector<double> TrainScanner::scan(std::vector<double> ramp_times, int r_periods, int n_max) const {
    std::sort(ramp_times.begin(), ramp_times.end());
    const Block finish = off_ramp(ramp_times, r_periods);
    Block train = on_ramp(ramp_times, r_periods);
    const Matrix2 target_adj = target_.adjoint();

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(n_max, 0)));
    for (int n = 1; n <= n_max; ++n) {
        left_multiply(n == 1 ? kick_ : kick_then_idle_, train);
        const Matrix2 u_q = join(finish, train);
        out.push_back(1.0 - 0.25 * std::norm((target_adj * u_q).trace()));
    }
    return out;
}

Matrix2 TrainScanner::projected(std::vector<double> ramp_times, int r_periods, int n_train) const {
    if (n_train < 0) throw DomainError("TrainScanner: n_train must be non-negative");
    std::sort(ramp_times.begin(), ramp_times.end());
    const Block finish = off_ramp(ramp_times, r_periods);
    Block train = on_ramp(ramp_times, r_periods);
    for (int n = 1; n <= n_train; ++n) left_multiply(n == 1 ? kick_ : kick_then_idle_, train);
    return join(finish, train);
}

} // namespace sfq
