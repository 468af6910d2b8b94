// numerics.hpp: Hermitian eigensolver, matrix exponentials and a BFGS minimizer.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfq {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Thrown for inputs outside an operation's domain (bad shape, bad index, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Thrown when a computation cannot produce a finite answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace numerics {

inline constexpr double kHermitianTolerance = 1e-10;

struct Eigensystem {
    RealVector values;     // ascending
    ComplexMatrix vectors; // columns are eigenvectors
};

// Largest entrywise |m - m†|.
double hermiticity_defect(const ComplexMatrix& m);

// Throws DomainError naming the worst entry when m is not Hermitian within tol.
void require_hermitian(const ComplexMatrix& m, double tol = kHermitianTolerance);

Eigensystem eigh(const ComplexMatrix& m);

// exp(scale * h) for Hermitian h, through its eigendecomposition.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, cplx scale);
ComplexMatrix expm_hermitian(const Eigensystem& eig, cplx scale);

// exp(m) for an arbitrary square matrix (scaling and squaring with Pade).
ComplexMatrix expm_general(const ComplexMatrix& m);

// Largest entrywise |u†u - I|.
double unitarity_defect(const ComplexMatrix& u);

struct MinimizerOptions {
    double gradient_step = 1e-7;       // central-difference step, units of x
    double gradient_tolerance = 1e-10; // stop when |grad|_inf falls below this
    int max_iterations = 500;
    double initial_step = 0.05;        // largest |dx| component on the first iteration
    int max_backtracks = 40;
    // Stop once an accepted step lowers f by no more than this; finite-difference noise
    // otherwise keeps BFGS creeping along after the gradient has hit its noise floor.
    double stall_tolerance = 1e-15;
};

struct MinimizeResult {
    RealVector x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false; // gradient tolerance reached
    bool stalled = false;   // stopped on a negligible decrease
};

using Objective = std::function<double(const RealVector&)>;

// Central-difference gradient with step h.
RealVector central_gradient(const Objective& f, const RealVector& x, double h, int* evaluations = nullptr);

// BFGS with central-difference gradients and Armijo backtracking.
// The returned f is never larger than f(x0).
MinimizeResult minimize(const Objective& f, const RealVector& x0, const MinimizerOptions& opts = {});

} // namespace numerics
} // namespace sfq
