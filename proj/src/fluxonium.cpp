#include "sfqgate/fluxonium.hpp"

#include <cmath>
#include <sstream>

namespace sfq {

void CircuitParams::validate() const {
    if (!(e_c > 0.0)) throw DomainError("circuit.e_c must be positive");
    if (!(e_l > 0.0)) throw DomainError("circuit.e_l must be positive");
    if (!std::isfinite(e_j) || !std::isfinite(phi_ext)) throw DomainError("circuit.e_j and circuit.phi_ext must be finite");
    if (n_fock < 2) throw DomainError("circuit.n_fock must be at least 2");
    if (n_levels < 2) throw DomainError("circuit.n_levels must be at least 2");
    if (n_levels > n_fock) throw DomainError("circuit.n_levels must not exceed circuit.n_fock");
}

CoherenceRates CoherenceRates::from_times(double t1_ns, double t2_ns) {
    if (!(t1_ns > 0.0) || !(t2_ns > 0.0)) throw DomainError("coherence times must be positive");
    if (t2_ns > 2.0 * t1_ns) throw DomainError("T2 must not exceed 2*T1");
    return {1.0 / t1_ns, 1.0 / t2_ns - 1.0 / (2.0 * t1_ns)};
}

FockOperators build_fock_operators(int n_fock, double e_c, double e_l) {
    if (n_fock < 2) throw DomainError("build_fock_operators: n_fock must be at least 2");
    if (!(e_c > 0.0) || !(e_l > 0.0)) throw DomainError("build_fock_operators: e_c and e_l must be positive");
    // b|k> = sqrt(k)|k-1>
    ComplexMatrix b = ComplexMatrix::Zero(n_fock, n_fock);
    for (int k = 1; k < n_fock; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
    const ComplexMatrix bd = b.adjoint();

    const double phi_zpf = std::pow(8.0 * e_c / e_l, 0.25) / std::sqrt(2.0);
    const double n_zpf = std::pow(e_l / (8.0 * e_c), 0.25) / std::sqrt(2.0);
    return {phi_zpf * (bd + b), kI * n_zpf * (bd - b)};
}

ComplexMatrix fock_hamiltonian(const CircuitParams& params) {
    params.validate();
    const auto ops = build_fock_operators(params.n_fock, params.e_c, params.e_l);
    const ComplexMatrix id = ComplexMatrix::Identity(params.n_fock, params.n_fock);

    // cos(phi + phi_ext) as a function of the Hermitian operator on its own spectrum.
    const auto shifted = numerics::eigh(ops.phi + params.phi_ext * id);
    ComplexVector cosines(shifted.values.size());
    for (Eigen::Index k = 0; k < cosines.size(); ++k) cosines(k) = std::cos(shifted.values(k));
    const ComplexMatrix cos_phi = shifted.vectors * cosines.asDiagonal() * shifted.vectors.adjoint();

    ComplexMatrix h = 4.0 * params.e_c * ops.n * ops.n - params.e_j * cos_phi + 0.5 * params.e_l * ops.phi * ops.phi;
    return 0.5 * (h + h.adjoint());
}

namespace {

struct Projection {
    RealVector energies;
    ComplexMatrix phi;
    ComplexMatrix n;
};

Projection project(const CircuitParams& params) {
    const auto ops = build_fock_operators(params.n_fock, params.e_c, params.e_l);
    const auto eig = numerics::eigh(fock_hamiltonian(params));
    const int m = params.n_levels;

    ComplexMatrix vecs = eig.vectors.leftCols(m);
    // Fix eigenvector phases so <j|phi|j+1> is real and non-negative.
    for (int j = 1; j < m; ++j) {
        const cplx elem = vecs.col(j - 1).dot(ops.phi * vecs.col(j));
        if (std::abs(elem) > 1e-14) vecs.col(j) *= std::polar(1.0, -std::arg(elem));
    }
    Projection out;
    out.energies = eig.values.head(m);
    out.phi = vecs.adjoint() * ops.phi * vecs;
    out.n = vecs.adjoint() * ops.n * vecs;
    out.phi = 0.5 * (out.phi + out.phi.adjoint()).eval();
    out.n = 0.5 * (out.n + out.n.adjoint()).eval();
    return out;
}

} // namespace

QubitModel diagonalize_model(const CircuitParams& params) {
    params.validate();
    const Projection proj = project(params);

    QubitModel model;
    const double two_pi = 2.0 * std::numbers::pi;
    model.omegas = two_pi * (proj.energies.array() - proj.energies(0)).matrix();
    model.omegas(0) = 0.0;
    model.phi_op = proj.phi;
    model.n_op = proj.n;
    if (!(model.omega01() > 0.0)) throw NumericalError("diagonalize_model: degenerate qubit transition");
    model.period = two_pi / model.omega01();

    CircuitParams bigger = params;
    bigger.n_fock += 10;
    const Projection check = project(bigger);
    const double omega01_big = two_pi * (check.energies(1) - check.energies(0));
    const double shift = std::abs(omega01_big - model.omega01());
    if (shift > 1e-6) {
        std::ostringstream os;
        os << "Fock truncation not converged: omega_01 moves by " << shift << " rad/ns at n_fock = " << bigger.n_fock;
        model.convergence_warning = os.str();
    }
    return model;
}

cplx matrix_element(const QubitModel& model, Operator which, int i, int j) {
    const int n = model.n_levels();
    if (i < 0 || j < 0 || i >= n || j >= n) {
        std::ostringstream os;
        os << "matrix_element: index (" << i << ", " << j << ") outside " << n << " levels";
        throw DomainError(os.str());
    }
    return which == Operator::phase ? model.phi_op(i, j) : model.n_op(i, j);
}

} // namespace sfq
