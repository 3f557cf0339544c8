#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace zenoprot {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Complex square matrix tagged with the ordered basis it acts on.
/// Products and sums between operators on different bases throw, which turns
/// silent basis mix-ups into immediate errors.
struct Operator {
    Matrix mat;
    std::string basis;

    Operator() = default;
    Operator(Matrix m, std::string b) : mat(std::move(m)), basis(std::move(b)) {
        if (mat.rows() != mat.cols()) throw std::invalid_argument("Operator must be square");
    }

    Eigen::Index dim() const { return mat.rows(); }

    double hermiticity_defect() const {
        return (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    }
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

    double unitarity_defect() const {
        return (mat.adjoint() * mat - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
    }
    bool is_unitary(double tol = 1e-10) const { return unitarity_defect() <= tol; }

    double spectral_norm() const {
        return mat.jacobiSvd().singularValues()(0);
    }

    Operator adjoint() const { return {mat.adjoint(), basis}; }

    void require_same_basis(const Operator& other) const {
        if (basis != other.basis)
            throw std::invalid_argument("basis mismatch: '" + basis + "' vs '" + other.basis + "'");
    }

    friend Operator operator*(const Operator& a, const Operator& b) {
        a.require_same_basis(b);
        return {a.mat * b.mat, a.basis};
    }
    friend Operator operator+(const Operator& a, const Operator& b) {
        a.require_same_basis(b);
        return {a.mat + b.mat, a.basis};
    }
    friend Operator operator-(const Operator& a, const Operator& b) {
        a.require_same_basis(b);
        return {a.mat - b.mat, a.basis};
    }
    friend Operator operator*(Complex c, const Operator& a) { return {c * a.mat, a.basis}; }
    friend Operator operator*(double c, const Operator& a) { return {c * a.mat, a.basis}; }
};

}  // namespace zenoprot
