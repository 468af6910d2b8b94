#include "sfqgate/numerics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace sfq::numerics {

double hermiticity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DomainError("hermiticity_defect: matrix must be square");
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DomainError("matrix must be square and non-empty");
    }
    Eigen::Index worst_r = 0, worst_c = 0;
    const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff(&worst_r, &worst_c);
    if (defect > tol) {
        std::ostringstream os;
        os << "matrix is not Hermitian: |m(" << worst_r << "," << worst_c << ") - conj(m(" << worst_c << ","
           << worst_r << "))| = " << defect << " > " << tol;
        throw DomainError(os.str());
    }
}

Eigensystem eigh(const ComplexMatrix& m) {
    require_hermitian(m);
    // Symmetrize so round-off in the input cannot leak into the spectrum.
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw NumericalError("eigh: eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix expm_hermitian(const Eigensystem& eig, cplx scale) {
    const Eigen::Index n = eig.values.size();
    ComplexVector phases(n);
    for (Eigen::Index k = 0; k < n; ++k) phases(k) = std::exp(scale * eig.values(k));
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix expm_hermitian(const ComplexMatrix& h, cplx scale) {
    return expm_hermitian(eigh(h), scale);
}

ComplexMatrix expm_general(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DomainError("expm_general: matrix must be square");
    ComplexMatrix result = m.exp();
    if (!result.allFinite()) throw NumericalError("expm_general: non-finite result");
    return result;
}

double unitarity_defect(const ComplexMatrix& u) {
    const ComplexMatrix id = ComplexMatrix::Identity(u.cols(), u.cols());
    return (u.adjoint() * u - id).cwiseAbs().maxCoeff();
}

RealVector central_gradient(const Objective& f, const RealVector& x, double h, int* evaluations) {
    RealVector g(x.size());
    RealVector probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        probe(k) = x(k) + h;
        const double up = f(probe);
        probe(k) = x(k) - h;
        const double down = f(probe);
        probe(k) = x(k);
        g(k) = (up - down) / (2.0 * h);
    }
    if (evaluations != nullptr) *evaluations += static_cast<int>(2 * x.size());
    return g;
}

MinimizeResult minimize(const Objective& f, const RealVector& x0, const MinimizerOptions& opts) {
    if (!(opts.gradient_step > 0.0) || !(opts.gradient_tolerance > 0.0) || opts.max_iterations < 1) {
        throw DomainError("minimize: gradient_step and gradient_tolerance must be positive");
    }
    MinimizeResult out;
    out.x = x0;
    out.f = f(x0);
    out.evaluations = 1;
    if (!std::isfinite(out.f)) throw DomainError("minimize: objective is not finite at the starting point");
    if (x0.size() == 0) {
        out.converged = true;
        return out;
    }

    const Eigen::Index n = x0.size();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd inv_hessian = identity;
    bool hessian_is_identity = true;
    constexpr double armijo = 1e-4;

    RealVector g = central_gradient(f, out.x, opts.gradient_step, &out.evaluations);

    auto steepest = [&](const RealVector& grad) -> RealVector {
        const double gmax = grad.cwiseAbs().maxCoeff();
        return -grad * (opts.initial_step / gmax);
    };

    for (out.iterations = 0; out.iterations < opts.max_iterations; ++out.iterations) {
        if (!g.allFinite()) break;
        if (g.cwiseAbs().maxCoeff() < opts.gradient_tolerance) {
            out.converged = true;
            break;
        }

        RealVector p = hessian_is_identity ? steepest(g) : RealVector(-inv_hessian * g);
        double slope = g.dot(p);
        if (!(slope < 0.0)) {
            inv_hessian = identity;
            hessian_is_identity = true;
            p = steepest(g);
            slope = g.dot(p);
        }

        double alpha = 1.0;
        bool accepted = false;
        RealVector x_new;
        double f_new = 0.0;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            x_new = out.x + alpha * p;
            f_new = f(x_new);
            ++out.evaluations;
            if (std::isfinite(f_new) && f_new <= out.f + armijo * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (hessian_is_identity) break;
            // Curvature model went stale; restart from steepest descent.
            inv_hessian = identity;
            hessian_is_identity = true;
            continue;
        }

        const RealVector g_new = central_gradient(f, x_new, opts.gradient_step, &out.evaluations);
        const RealVector s = x_new - out.x;
        const RealVector y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-300 && y.allFinite()) {
            if (hessian_is_identity) {
                inv_hessian = identity * (sy / y.squaredNorm());
                hessian_is_identity = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd left = identity - rho * s * y.transpose();
            inv_hessian = left * inv_hessian * left.transpose() + rho * s * s.transpose();
        }
        const double decrease = out.f - f_new;
        out.x = x_new;
        out.f = f_new;
        g = g_new;
        if (decrease <= opts.stall_tolerance) {
            out.stalled = true;
            ++out.iterations;
            break;
        }
    }
    return out;
}

} // namespace sfq::numerics
