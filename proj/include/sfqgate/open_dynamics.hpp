// open_dynamics.hpp: Lindblad propagation of SFQ schedules and the open-system fidelity.
//
// Density matrices are vectorized by stacking columns: vec(A rho B) = (B^T kron A) vec(rho).
// Energy loss (|0><1|) and pure dephasing (|1><1|) act on the qubit levels only.

#pragma once

#include "sfqgate/closed_dynamics.hpp"

#include <map>

namespace sfq {

using Superoperator = ComplexMatrix;

// Index of rho(i, j) in the column-stacked vector.
inline Eigen::Index vec_index(int i, int j, int levels) { return i + static_cast<Eigen::Index>(j) * levels; }

ComplexMatrix vectorize(const ComplexMatrix& rho);
ComplexMatrix unvectorize(const ComplexVector& v, int levels);

// U rho U† as a superoperator.
Superoperator unitary_superoperator(const ComplexMatrix& u);

Superoperator liouvillian(const QubitModel& model, const CoherenceRates& rates);

Superoperator free_propagator_open(const QubitModel& model, double t, const CoherenceRates& rates);

// Free propagators keyed by segment duration, so repeated spacings are exponentiated once.
class OpenPropagatorCache {
public:
    OpenPropagatorCache(const QubitModel& model, const CoherenceRates& rates);
    const Superoperator& free(double t);
    std::size_t size() const { return cache_.size(); }

private:
    Superoperator generator_;
    std::map<double, Superoperator> cache_;
};

Superoperator propagate_open(const QubitModel& model, const Schedule& s, const CoherenceRates& rates);

double open_fidelity(const Superoperator& s_e, const Matrix2& u_targ);

// Largest |vec(I)^T S - vec(I)^T| entry.
double trace_preservation_defect(const Superoperator& s);

// Closed budget plus the open-system infidelity and the incoherent part F_pro - F_open.
ErrorBudget full_error_budget(const QubitModel& model, const Schedule& s, double theta_targ,
                              const std::optional<CoherenceRates>& rates);

} // namespace sfq
