// fluxonium.hpp: Fluxonium Hamiltonian in the Fock basis and its low-energy projection.
//
// Units: energies in GHz (H/h), times in ns, angular frequencies in rad/ns.

#pragma once

#include "sfqgate/numerics.hpp"

#include <numbers>
#include <optional>
#include <string>

namespace sfq {

struct CircuitParams {
    double e_j = 4.0;
    double e_c = 1.0;
    double e_l = 1.0;
    double phi_ext = std::numbers::pi;
    int n_fock = 30;
    int n_levels = 6;

    void validate() const;
};

struct QubitModel {
    RealVector omegas;   // rad/ns, omegas[0] == 0
    ComplexMatrix phi_op; // phase operator, energy eigenbasis
    ComplexMatrix n_op;   // charge operator, energy eigenbasis
    double period = 0.0;  // ns, 2*pi / omega_01

    int n_levels() const { return static_cast<int>(omegas.size()); }
    double omega01() const { return omegas(1) - omegas(0); }
    // Set when re-diagonalizing with 10 more Fock states moves omega_01 by more than 1e-6 rad/ns.
    std::optional<std::string> convergence_warning;
};

struct CoherenceRates {
    double gamma_1 = 0.0;   // 1/ns
    double gamma_phi = 0.0; // 1/ns

    // T1, T2 in ns. gamma_phi = 1/T2 - 1/(2 T1).
    static CoherenceRates from_times(double t1_ns, double t2_ns);
    static CoherenceRates defaults() { return from_times(1.2e6, 0.8e6); }
};

enum class Operator { phase, charge };

struct FockOperators {
    ComplexMatrix phi;
    ComplexMatrix n;
};

FockOperators build_fock_operators(int n_fock, double e_c, double e_l);

// Hamiltonian H/h (GHz) in the truncated Fock basis.
ComplexMatrix fock_hamiltonian(const CircuitParams& params);

QubitModel diagonalize_model(const CircuitParams& params);

cplx matrix_element(const QubitModel& model, Operator which, int i, int j);

} // namespace sfq
