#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "zenoprot/angular_momentum.hpp"
#include "zenoprot/clebsch_gordan.hpp"
#include "zenoprot/half_int.hpp"
#include "zenoprot/operators.hpp"
#include "zenoprot/units.hpp"

namespace zenoprot {

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Quantum-number label of one basis vector of a level manifold.
struct BasisState {
    int n = 60;
    HalfInt L, S, J, mJ;
};

/// The spin (x) orbital Hilbert space of one nL manifold in the coupled
/// |J, mJ> labeling (J descending, mJ ascending), with the two code states
/// resolved. For the 60f configuration (L=3, S=1/2) the dimension is
/// 2 x 7 = 14 and the code states sit in the J=5/2 multiplet.
struct LevelSpace {
    HalfInt L, S;
    int dimension = 0;
    std::vector<BasisState> basis;
    std::pair<int, int> code_indices{-1, -1};  // |gamma_1>, |gamma_2|
    Matrix coupling;  // unitary, rows coupled / cols uncoupled (m_L slow, m_S fast)

    // ancilla dimensioning report: A = 2L+1 vs the A >= M+1 bound
    int ancilla_dim = 0;
    int n_errors_requested = 0;
    bool bound_satisfied = false;

    std::string tag;  // basis tag carried by every operator on this space

    const BasisState& code_state(int i) const {
        return basis[i == 0 ? code_indices.first : code_indices.second];
    }
    HalfInt code_J() const { return code_state(0).J; }

    Vector code_vector(int i) const {
        Vector v = Vector::Zero(dimension);
        v(i == 0 ? code_indices.first : code_indices.second) = 1.0;
        return v;
    }

    /// 14x2 isometry whose columns are |gamma_1>, |gamma_2>.
    Matrix code_isometry() const {
        Matrix G = Matrix::Zero(dimension, 2);
        G(code_indices.first, 0) = 1.0;
        G(code_indices.second, 1) = 1.0;
        return G;
    }

    /// Projector onto the code subspace C.
    Matrix code_projector() const {
        const Matrix G = code_isometry();
        return G * G.adjoint();
    }
};

/// Builds the coupled-basis level space. Code states default to the
/// |J=5/2, mJ=-3/2> and |J=5/2, mJ=-1/2> pattern: the lowest-J multiplet
/// with enough room, second and third states when available.
/// n_errors sets the ancilla bound check A >= M+1.
inline LevelSpace build_space(HalfInt L, HalfInt S, int n_errors = 6,
                              std::optional<std::pair<CoupledLabel, CoupledLabel>> code = {},
                              int n_shell = 60) {
    LevelSpace space;
    space.L = L;
    space.S = S;
    space.dimension = L.multiplicity() * S.multiplicity();
    space.tag = coupled_basis_tag(L, S);
    space.coupling = couple_basis(L, S).mat;

    for (const auto& lbl : coupled_basis_labels(L, S))
        space.basis.push_back({n_shell, L, S, lbl.J, lbl.mJ});

    space.ancilla_dim = L.multiplicity();
    space.n_errors_requested = n_errors;
    space.bound_satisfied = space.ancilla_dim >= n_errors + 1;

    CoupledLabel g1, g2;
    if (code) {
        g1 = code->first;
        g2 = code->second;
    } else {
        const HalfInt Jlow = HalfInt::from_twice(std::abs(L.twice() - S.twice()));
        const HalfInt J = Jlow.multiplicity() >= 2
                              ? Jlow
                              : HalfInt::from_twice(Jlow.twice() + 2);
        const int off = J.multiplicity() >= 3 ? 1 : 0;  // skip the edge state when possible
        g1 = {J, HalfInt::from_twice(-J.twice() + 2 * off)};
        g2 = {J, HalfInt::from_twice(-J.twice() + 2 * (off + 1))};
    }

    auto find = [&](const CoupledLabel& lbl) {
        for (int i = 0; i < space.dimension; ++i)
            if (space.basis[i].J == lbl.J && space.basis[i].mJ == lbl.mJ) return i;
        throw std::invalid_argument("build_space: code state |J=" + lbl.J.str() +
                                    ", mJ=" + lbl.mJ.str() + "> not in basis");
    };
    space.code_indices = {find(g1), find(g2)};
    if (space.code_indices.first == space.code_indices.second)
        throw std::invalid_argument("build_space: code states must be distinct");
    return space;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Lifts an orbital-space matrix (dim 2L+1, m_L ascending) to the full
/// coupled-basis space, acting as identity on spin.
inline Matrix lift_orbital(const LevelSpace& space, const Matrix& orb) {
    const int dS = space.S.multiplicity();
    const Matrix unc = kron(orb, Matrix::Identity(dS, dS));
    return space.coupling * unc * space.coupling.adjoint();
}

/// Lifts L_k + 2 S_k (uncoupled construction) to the coupled basis.
inline Matrix lift_l_plus_2s(const LevelSpace& space, Axis axis) {
    const auto lops = angular_momentum_ops(space.L);
    const auto sops = angular_momentum_ops(space.S);
    auto pick = [axis](const AngularMomentumOps& ops) -> const Matrix& {
        switch (axis) {
            case Axis::X: return ops.jx.mat;
            case Axis::Y: return ops.jy.mat;
            default: return ops.jz.mat;
        }
    };
    const int dS = space.S.multiplicity();
    const int dL = space.L.multiplicity();
    const Matrix unc = kron(pick(lops), Matrix::Identity(dS, dS)) +
                       2.0 * kron(Matrix::Identity(dL, dL), pick(sops));
    return space.coupling * unc * space.coupling.adjoint();
}

/// Zeeman Hamiltonian (mu_B/hbar) sum_k B_k (L_k + 2 S_k) in rad/ns,
/// expressed in the coupled basis.
inline Operator zeeman_hamiltonian(const LevelSpace& space, const std::array<double, 3>& b_tesla) {
    Matrix H = Matrix::Zero(space.dimension, space.dimension);
    for (int k = 0; k < 3; ++k)
        if (b_tesla[k] != 0.0) H += b_tesla[k] * lift_l_plus_2s(space, static_cast<Axis>(k));
    return {constants::mu_B_over_hbar_rad_per_ns_T * H, space.tag};
}

namespace detail {

/// <L m'|C2q|L m> with a unit reduced matrix element: the CG coefficient
/// CG(L m; 2 q | L m'). Orbital space only (dim 2L+1).
inline Matrix c2q_orbital(HalfInt L, int q) {
    const int dim = L.multiplicity();
    Matrix C = Matrix::Zero(dim, dim);
    const HalfInt two = HalfInt::whole(2);
    const HalfInt mq = HalfInt::whole(q);
    for (int i = 0; i < dim; ++i) {
        const HalfInt m = HalfInt::from_twice(-L.twice() + 2 * i);
        const HalfInt mp = m + mq;
        if (!L.admits_projection(mp)) continue;
        C((mp.twice() + L.twice()) / 2, i) = clebsch_gordan(L, m, two, mq, L, mp);
    }
    return C;
}

/// Symmetric bilinear (r_k r_l + r_l r_k)/2 as an effective operator within
/// the shell: rank-0 part delta_kl/3 * I plus the rank-2 part through C2q
/// with unit reduced element and r^2 -> 1.
inline Matrix quad_bilinear_orbital(HalfInt L, Axis k, Axis l) {
    const int dim = L.multiplicity();
    const Matrix I = Matrix::Identity(dim, dim);
    const Matrix c20 = c2q_orbital(L, 0);
    const Matrix c2p1 = c2q_orbital(L, 1), c2m1 = c2q_orbital(L, -1);
    const Matrix c2p2 = c2q_orbital(L, 2), c2m2 = c2q_orbital(L, -2);
    const double s = std::sqrt(1.0 / 6.0);
    const Complex i01(0, 1);

    if (k > l) std::swap(k, l);
    if (k == Axis::X && l == Axis::X) return I / 3.0 - c20 / 3.0 + s * (c2p2 + c2m2);
    if (k == Axis::Y && l == Axis::Y) return I / 3.0 - c20 / 3.0 - s * (c2p2 + c2m2);
    if (k == Axis::Z && l == Axis::Z) return I / 3.0 + (2.0 / 3.0) * c20;
    if (k == Axis::X && l == Axis::Y) return -i01 * s * (c2p2 - c2m2);
    if (k == Axis::X && l == Axis::Z) return s * (c2m1 - c2p1);
    /* y,z */ return i01 * s * (c2p1 + c2m1);
}

}  // namespace detail

/// Effective r_k^2 - r_l^2 within the shell: rank-2 spherical tensor content
/// only (the rank-0 parts cancel in the difference), unit reduced element,
/// identity on spin. Hermitian and traceless.
inline Operator quadratic_position_op(const LevelSpace& space, Axis k, Axis l) {
    if (k == l) throw std::invalid_argument("quadratic_position_op: axes must differ");
    const Matrix orb = detail::quad_bilinear_orbital(space.L, k, k) -
                       detail::quad_bilinear_orbital(space.L, l, l);
    return {lift_orbital(space, orb), space.tag};
}

enum class PulseType { A, B };

/// One Raman laser pair: complex field envelope (E_x, E_y e^{-i phi_y}, 0)
/// for the unprimed and primed lasers.
struct LaserPair {
    double e_x = 0.0, e_y = 0.0;              // V/m
    double phase_y = 0.0;                     // rad
    double e_x_prime = 0.0, e_y_prime = 0.0;  // V/m
    double phase_y_prime = 0.0;               // rad

    Eigen::Vector3cd envelope() const {
        return {Complex(e_x, 0), e_y * std::exp(Complex(0, -phase_y)), Complex(0, 0)};
    }
    Eigen::Vector3cd envelope_prime() const {
        return {Complex(e_x_prime, 0), e_y_prime * std::exp(Complex(0, -phase_y_prime)),
                Complex(0, 0)};
    }
};

/// Control-field configuration for the coding pulses, with published
/// characteristic values as defaults. raman_scale / raman_scale_prime
/// absorb the unknown radial dipole integrals of the two Raman ladders
/// (60f <-> 5d_{3/2} and 60f <-> 5d_{5/2}); they must differ, otherwise the
/// two contributions cancel exactly for equal primed/unprimed field
/// amplitudes and opposite detunings.
struct FieldConfig {
    std::array<double, 3> b_field{7e-3, 8.2e-3, -6.8e-3};  // tesla

    LaserPair laser_a{8.5e5, 5.2e6, 2.3, 8.5e5, 5.2e6, 2.3};
    LaserPair laser_b{-5.2e6, 8.5e5, 2.3, -5.2e6, 8.5e5, 2.3};

    double omega_r = 0.986324 * constants::eV_rad_per_ns;        // rad/ns
    double omega_r_prime = 0.986676 * constants::eV_rad_per_ns;  // rad/ns
    double delta = -0.000010 * constants::eV_rad_per_ns;         // rad/ns
    double delta_prime = 0.000010 * constants::eV_rad_per_ns;    // rad/ns

    double raman_scale = 1e-4;
    double raman_scale_prime = 5e-5;
};

/// Effective second-order Raman Hamiltonian for one pulse type, in rad/ns:
///   W_R = scale * (e a0/hbar)^2 * sum_ij Re(E_i* E_j) Q_ij / delta  + primed
/// with Q_ij the effective symmetric bilinear above. Hermitian, identity on
/// spin, spherical-tensor rank <= 2.
inline Operator raman_hamiltonian(const LevelSpace& space, const FieldConfig& fields,
                                  PulseType type) {
    if (fields.delta == 0.0 || fields.delta_prime == 0.0)
        throw std::invalid_argument("raman_hamiltonian: zero detuning");

    const LaserPair& lp = (type == PulseType::A) ? fields.laser_a : fields.laser_b;
    const double unit = constants::ea0_over_hbar * 1e-9;  // (rad/ns)/(V/m)

    auto term = [&](const Eigen::Vector3cd& env, double delta, double scale) -> Matrix {
        Matrix orb = Matrix::Zero(space.L.multiplicity(), space.L.multiplicity());
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                const double mij = std::real(std::conj(env(i)) * env(j));
                if (mij == 0.0) continue;
                const double w = (i == j) ? mij : 2.0 * mij;  // symmetric off-diagonal pair
                orb += w * detail::quad_bilinear_orbital(space.L, static_cast<Axis>(i),
                                                         static_cast<Axis>(j));
            }
        return (scale * unit * unit / delta) * orb;
    };

    const Matrix orb = term(lp.envelope(), fields.delta, fields.raman_scale) +
                       term(lp.envelope_prime(), fields.delta_prime, fields.raman_scale_prime);
    return {lift_orbital(space, orb), space.tag};
}

/// Six normalized error generators plus the stochastic coupling parameters of
/// the piecewise-constant processes f_m(t).
struct ErrorModel {
    std::vector<Operator> generators;   // Hermitian, unit spectral norm
    std::vector<double> amplitudes;     // rad/ns
    double correlation_time = 10.0;     // ns
    std::uint64_t seed = 0;
};

/// The M=6 error set: three magnetic L_k + 2S_k and three electric
/// r_k^2 - r_l^2 generators, each rescaled to unit spectral norm.
inline ErrorModel error_generators(const LevelSpace& space) {
    ErrorModel model;
    auto push = [&](Matrix m) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
        const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
        if (norm > 0) m /= norm;
        model.generators.push_back({m, space.tag});
    };
    for (Axis k : {Axis::X, Axis::Y, Axis::Z}) push(lift_l_plus_2s(space, k));
    for (auto [k, l] : {std::pair{Axis::X, Axis::Y}, {Axis::X, Axis::Z}, {Axis::Y, Axis::Z}})
        push(quadratic_position_op(space, k, l).mat);
    model.amplitudes.assign(model.generators.size(), 0.0);
    return model;
}

/// Fine-structure splitting between the code multiplet and the other
/// multiplet(s) of the shell.
struct FineStructure {
    double splitting_cm = 0.0;  // cm^-1; 0 means degenerate (H0 = 0)

    /// tau_f = 1/(c * splitting), ns.
    double tau_f_ns() const {
        if (splitting_cm <= 0.0) return std::numeric_limits<double>::infinity();
        return 1.0 / (constants::c_cm_per_ns * splitting_cm);
    }
};

/// Diagonal H0: zero on the code multiplet, 2*pi*c*splitting (rad/ns) on the
/// other multiplets.
inline Operator fine_structure_h0(const LevelSpace& space, const FineStructure& fs) {
    Matrix H = Matrix::Zero(space.dimension, space.dimension);
    const double omega = constants::wavenumber_rad_per_ns * fs.splitting_cm;
    for (int i = 0; i < space.dimension; ++i)
        if (space.basis[i].J != space.code_J()) H(i, i) = omega;
    return {H, space.tag};
}

/// Copy of E with the rectangular inter-multiplet blocks set to zero
/// (entries whose row and column J labels differ).
inline Operator zero_intermultiplet(const Operator& E, const LevelSpace& space) {
    if (E.dim() != space.dimension)
        throw std::invalid_argument("zero_intermultiplet: dimension mismatch");
    Matrix out = E.mat;
    for (int i = 0; i < space.dimension; ++i)
        for (int j = 0; j < space.dimension; ++j)
            if (space.basis[i].J != space.basis[j].J) out(i, j) = 0.0;
    return {out, E.basis};
}

}  // namespace zenoprot
