#pragma once

#include <cmath>
#include <vector>

#include "zenoprot/clebsch_gordan.hpp"
#include "zenoprot/half_int.hpp"
#include "zenoprot/operators.hpp"

namespace zenoprot {

inline std::string single_j_basis_tag(HalfInt j) { return "m:j=" + j.str(); }
inline std::string uncoupled_basis_tag(HalfInt L, HalfInt S) {
    return "uncoupled:L=" + L.str() + ",S=" + S.str();
}
inline std::string coupled_basis_tag(HalfInt L, HalfInt S) {
    return "coupled:L=" + L.str() + ",S=" + S.str();
}

/// Matrices of jx, jy, jz, j+, j- on the ordered basis m = -j..+j.
/// jz is diagonal with entries m; ladder elements are the closed-form
/// sqrt(j(j+1) - m(m+1)).
struct AngularMomentumOps {
    HalfInt j;
    Operator jx, jy, jz, jplus, jminus;
};

inline AngularMomentumOps angular_momentum_ops(HalfInt j) {
    if (j.twice() < 0) throw std::invalid_argument("angular_momentum_ops: j < 0");
    const int dim = j.multiplicity();
    const std::string tag = single_j_basis_tag(j);
    const double jj = j.value() * (j.value() + 1.0);

    Matrix jz = Matrix::Zero(dim, dim);
    Matrix jplus = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double m = -j.value() + i;
        jz(i, i) = m;
        if (i + 1 < dim) jplus(i + 1, i) = std::sqrt(jj - m * (m + 1.0));
    }
    Matrix jminus = jplus.adjoint();
    Matrix jx = 0.5 * (jplus + jminus);
    Matrix jy = Complex(0, -0.5) * (jplus - jminus);

    return {j, {jx, tag}, {jy, tag}, {jz, tag}, {jplus, tag}, {jminus, tag}};
}

/// One |J, mJ> row of the coupled basis.
struct CoupledLabel {
    HalfInt J, mJ;
};

/// Coupled basis ordering: J descending from L+S to |L-S|, mJ ascending
/// within each multiplet.
inline std::vector<CoupledLabel> coupled_basis_labels(HalfInt L, HalfInt S) {
    std::vector<CoupledLabel> labels;
    const int t_max = L.twice() + S.twice();
    const int t_min = std::abs(L.twice() - S.twice());
    for (int tJ = t_max; tJ >= t_min; tJ -= 2)
        for (int tM = -tJ; tM <= tJ; tM += 2)
            labels.push_back({HalfInt::from_twice(tJ), HalfInt::from_twice(tM)});
    return labels;
}

/// Unitary change of basis from uncoupled |m_L> x |m_S> (m_L slow, m_S fast,
/// each ascending) to coupled |J, mJ>; entries are Clebsch-Gordan
/// coefficients. Row index is the coupled label, column the uncoupled pair.
inline Operator couple_basis(HalfInt L, HalfInt S) {
    const int dim = L.multiplicity() * S.multiplicity();
    const auto labels = coupled_basis_labels(L, S);
    if (static_cast<int>(labels.size()) != dim)
        throw std::logic_error("couple_basis: dimension mismatch");

    Matrix U = Matrix::Zero(dim, dim);
    for (int row = 0; row < dim; ++row) {
        for (int iL = 0; iL < L.multiplicity(); ++iL) {
            const HalfInt mL = HalfInt::from_twice(-L.twice() + 2 * iL);
            for (int iS = 0; iS < S.multiplicity(); ++iS) {
                const HalfInt mS = HalfInt::from_twice(-S.twice() + 2 * iS);
                const int col = iL * S.multiplicity() + iS;
                U(row, col) = clebsch_gordan(L, mL, S, mS, labels[row].J, labels[row].mJ);
            }
        }
    }
    return {U, "map:" + uncoupled_basis_tag(L, S) + "->" + coupled_basis_tag(L, S)};
}

}  // namespace zenoprot
