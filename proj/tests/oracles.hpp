// Independent reference computations used only by the tests.

#pragma once

#include "sfqgate/fluxonium.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using sfq::ComplexMatrix;
using sfq::cplx;

// exp(m) by scaling and squaring of a plain Taylor series.
inline ComplexMatrix taylor_expm(const ComplexMatrix& m) {
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    double scaled = norm;
    while (scaled > 0.25) {
        scaled /= 2.0;
        ++squarings;
    }
    const ComplexMatrix a = m / std::pow(2.0, squarings);
    ComplexMatrix term = ComplexMatrix::Identity(m.rows(), m.cols());
    ComplexMatrix sum = term;
    for (int k = 1; k < 40; ++k) {
        term = (term * a / static_cast<double>(k)).eval();
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
    return sum;
}

inline ComplexMatrix random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    }
    return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix random_unitary(int n, std::mt19937_64& rng) {
    return taylor_expm(cplx(0.0, 1.0) * random_hermitian(n, rng));
}

// Lowest `count` eigenvalues (GHz) of 4Ec(-d^2/dphi^2) - Ej cos(phi + phi_ext) + El phi^2 / 2
// on a uniform phase grid, three-point Laplacian, Richardson-extrapolated in the spacing.
inline std::vector<double> grid_spectrum(const sfq::CircuitParams& p, int count, double half_width = 14.0, int points = 4000) {
    auto solve = [&](int n) {
        const double h = 2.0 * half_width / (n + 1);
        Eigen::VectorXd diag(n), off(n - 1);
        for (int k = 0; k < n; ++k) {
            const double phi = -half_width + (k + 1) * h;
            diag(k) = 8.0 * p.e_c / (h * h) - p.e_j * std::cos(phi + p.phi_ext) + 0.5 * p.e_l * phi * phi;
        }
        off.setConstant(-4.0 * p.e_c / (h * h));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
        return Eigen::VectorXd(solver.eigenvalues().head(count));
    };
    const Eigen::VectorXd coarse = solve(points);
    const Eigen::VectorXd fine = solve(2 * points + 1); // spacing exactly halved
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back((4.0 * fine(k) - coarse(k)) / 3.0);
    return out;
}

// Lindblad right-hand side applied to a density matrix directly.
inline ComplexMatrix lindblad_rhs(const ComplexMatrix& h, const std::vector<ComplexMatrix>& collapse, const ComplexMatrix& rho) {
    const cplx i(0.0, 1.0);
    ComplexMatrix out = -i * (h * rho - rho * h);
    for (const auto& c : collapse) {
        const ComplexMatrix cdc = c.adjoint() * c;
        out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
    }
    return out;
}

// Superoperator of rho -> a rho b built column by column from basis matrices.
inline ComplexMatrix sandwich_superoperator(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Eigen::Index n = a.rows();
    ComplexMatrix s(n * n, n * n);
    for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index row = 0; row < n; ++row) {
            ComplexMatrix e = ComplexMatrix::Zero(n, n);
            e(row, col) = 1.0;
            const ComplexMatrix img = a * e * b;
            s.col(row + col * n) = img.reshaped(n * n, 1);
        }
    }
    return s;
}

} // namespace oracle
