#include "sfqgate/open_dynamics.hpp"

#include <cmath>

namespace sfq {

namespace {

Superoperator kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    Superoperator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// C rho C† - 1/2 {C†C, rho}
Superoperator dissipator(const ComplexMatrix& c) {
    const Eigen::Index n = c.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix cdc = c.adjoint() * c;
    return kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id);
}

} // namespace

ComplexMatrix vectorize(const ComplexMatrix& rho) {
    return rho.reshaped(rho.size(), 1);
}

ComplexMatrix unvectorize(const ComplexVector& v, int levels) {
    return v.reshaped(levels, levels);
}

Superoperator unitary_superoperator(const ComplexMatrix& u) {
    return kron(u.conjugate(), u);
}

Superoperator liouvillian(const QubitModel& model, const CoherenceRates& rates) {
    if (!(rates.gamma_1 >= 0.0) || !(rates.gamma_phi >= 0.0)) throw DomainError("liouvillian: rates must be non-negative");
    const int n = model.n_levels();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix h = ComplexMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) h(j, j) = model.omegas(j);

    Superoperator l = -kI * (kron(id, h) - kron(h.transpose(), id));
    ComplexMatrix lowering = ComplexMatrix::Zero(n, n);
    lowering(0, 1) = std::sqrt(rates.gamma_1);
    ComplexMatrix dephasing = ComplexMatrix::Zero(n, n);
    dephasing(1, 1) = std::sqrt(2.0 * rates.gamma_phi);
    l += dissipator(lowering);
    l += dissipator(dephasing);
    return l;
}

Superoperator free_propagator_open(const QubitModel& model, double t, const CoherenceRates& rates) {
    if (!(t >= 0.0)) throw DomainError("free_propagator_open: t must be non-negative");
    return numerics::expm_general(liouvillian(model, rates) * t);
}

OpenPropagatorCache::OpenPropagatorCache(const QubitModel& model, const CoherenceRates& rates)
    : generator_(liouvillian(model, rates)) {}

const Superoperator& OpenPropagatorCache::free(double t) {
    if (!(t >= 0.0)) throw DomainError("OpenPropagatorCache: t must be non-negative");
    auto it = cache_.find(t);
    if (it == cache_.end()) it = cache_.emplace(t, numerics::expm_general(generator_ * t)).first;
    return it->second;
}

Superoperator propagate_open(const QubitModel& model, const Schedule& s, const CoherenceRates& rates) {
    const double period = model.period;
    const auto times = mirrored_kick_times(s, period);
    const double duration = total_duration(s, period);
    const Superoperator kick = unitary_superoperator(kick_unitary(model, s.coupling, s.theta_kick));
    OpenPropagatorCache cache(model, rates);

    // Train kicks are spaced by exactly one period; snapping round-off must not defeat the cache.
    auto segment = [&](double dt) -> const Superoperator& {
        if (std::abs(dt - period) < 1e-12 * period) return cache.free(period);
        return cache.free(dt);
    };

    const int levels = model.n_levels();
    Superoperator total = Superoperator::Identity(levels * levels, levels * levels);
    double now = 0.0;
    for (double t : times) {
        if (t > now) total = (segment(t - now) * total).eval();
        total = (kick * total).eval();
        now = t;
    }
    if (duration > now) total = (segment(duration - now) * total).eval();
    return total;
}

double open_fidelity(const Superoperator& s_e, const Matrix2& u_targ) {
    const Eigen::Index dim = s_e.rows();
    const int levels = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
    if (levels * levels != dim || s_e.cols() != dim || levels < 2) {
        throw DomainError("open_fidelity: superoperator must act on n^2-dimensional vectors");
    }
    const ComplexMatrix s_q = unitary_superoperator(u_targ); // 4 x 4 on the qubit block
    cplx trace = 0.0;
    for (int a = 0; a < 4; ++a) {
        const Eigen::Index row = vec_index(a % 2, a / 2, levels);
        for (int b = 0; b < 4; ++b) {
            const Eigen::Index col = vec_index(b % 2, b / 2, levels);
            trace += std::conj(s_q(a, b)) * s_e(row, col);
        }
    }
    return 0.25 * trace.real();
}

double trace_preservation_defect(const Superoperator& s) {
    const Eigen::Index dim = s.rows();
    const int levels = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
    ComplexVector id_vec = ComplexVector::Zero(dim);
    for (int j = 0; j < levels; ++j) id_vec(vec_index(j, j, levels)) = 1.0;
    return (s.transpose() * id_vec - id_vec).cwiseAbs().maxCoeff();
}

ErrorBudget full_error_budget(const QubitModel& model, const Schedule& s, double theta_targ,
                              const std::optional<CoherenceRates>& rates) {
    const Matrix2 u_q = project_computational(propagate(model, s));
    ErrorBudget budget = error_budget(u_q, s.coupling, theta_targ);
    if (rates) {
        const double f_open = open_fidelity(propagate_open(model, s, *rates), target_unitary(s.coupling, theta_targ));
        budget.infidelity_open = 1.0 - f_open;
        budget.incoherent = (1.0 - budget.infidelity_closed) - f_open;
    }
    return budget;
}

} // namespace sfq
