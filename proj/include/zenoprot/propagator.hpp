#pragma once

#include <Eigen/Eigenvalues>

#include "zenoprot/operators.hpp"

namespace zenoprot {

/// Spectral decomposition of a Hermitian generator, cached so that
/// exp(-i H tau) at many timings costs two dense products each.
struct HermitianExp {
    Matrix vectors;
    Eigen::VectorXd values;
    std::string basis;

    HermitianExp() = default;
    explicit HermitianExp(const Operator& H, double hermiticity_tol = 1e-9) {
        if (H.hermiticity_defect() > hermiticity_tol)
            throw std::invalid_argument("propagator: generator is not Hermitian");
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H.mat + H.mat.adjoint()));
        vectors = es.eigenvectors();
        values = es.eigenvalues();
        basis = H.basis;
    }

    Matrix exp_mat(double tau) const {
        const Vector phases =
            (Complex(0, -tau) * values.cast<Complex>()).array().exp().matrix();
        return vectors * phases.asDiagonal() * vectors.adjoint();
    }
    Operator exp(double tau) const { return {exp_mat(tau), basis}; }
};

/// exp(-i H tau) for a dense Hermitian H, unitary to ~1e-13.
/// Rejects generators with hermiticity defect above 1e-9.
inline Operator propagator(const Operator& H, double tau) {
    return HermitianExp(H).exp(tau);
}

}  // namespace zenoprot
