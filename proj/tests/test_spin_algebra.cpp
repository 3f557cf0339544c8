#include <doctest.h>

#include "oracles.hpp"
#include "zenoprot/angular_momentum.hpp"
#include "zenoprot/clebsch_gordan.hpp"
#include "zenoprot/half_int.hpp"

using namespace zenoprot;

TEST_CASE("HalfInt arithmetic and parity") {
    CHECK(3_half == HalfInt::from_twice(3));
    CHECK((3_half).value() == doctest::Approx(1.5));
    CHECK((3_half).multiplicity() == 4);
    CHECK(HalfInt::whole(2).is_integer());
    CHECK_FALSE((3_half).is_integer());
    CHECK((3_half).admits_projection(-1_half));
    CHECK_FALSE((3_half).admits_projection(HalfInt::whole(1)));  // parity
    CHECK_FALSE((3_half).admits_projection(5_half));             // |m| > j
    CHECK((3_half).str() == "3/2");
    CHECK(HalfInt::whole(2).str() == "2");

    CHECK(triangle_ok(HalfInt::whole(3), 1_half, 5_half));
    CHECK_FALSE(triangle_ok(HalfInt::whole(3), 1_half, HalfInt::whole(2)));  // parity
    CHECK_FALSE(triangle_ok(HalfInt::whole(1), HalfInt::whole(1), HalfInt::whole(3)));
}

TEST_CASE("Clebsch-Gordan closed-form anchors") {
    const HalfInt h = 1_half, one = HalfInt::whole(1), zero = HalfInt::whole(0);
    // stretched states
    CHECK(clebsch_gordan(h, h, h, h, one, one) == doctest::Approx(1.0));
    // singlet: <1/2 1/2; 1/2 -1/2|0 0> = +1/sqrt2, swapped order -1/sqrt2
    CHECK(clebsch_gordan(h, h, h, -h, zero, zero) == doctest::Approx(std::sqrt(0.5)));
    CHECK(clebsch_gordan(h, -h, h, h, zero, zero) == doctest::Approx(-std::sqrt(0.5)));
    // 1x1 -> 2: <1 0; 1 0|2 0>^2 = 2/3 exactly
    const auto c = clebsch_gordan_exact(one, zero, one, zero, HalfInt::whole(2), zero);
    CHECK(c.sign == 1);
    CHECK(c.square == BigRational(2, 3));
}

TEST_CASE("Clebsch-Gordan selection rules and domain errors") {
    const HalfInt one = HalfInt::whole(1), zero = HalfInt::whole(0);
    CHECK(clebsch_gordan_exact(one, one, one, one, one, one).sign == 0);  // M != m1+m2
    CHECK(clebsch_gordan_exact(one, zero, one, zero, HalfInt::whole(3), zero).sign == 0);
    CHECK_THROWS_AS(clebsch_gordan(one, 1_half, one, zero, one, zero), std::invalid_argument);
    CHECK_THROWS_AS(clebsch_gordan(one, HalfInt::whole(2), one, zero, one, zero),
                    std::invalid_argument);
    CHECK_THROWS_AS(clebsch_gordan(HalfInt::from_twice(-2), zero, one, zero, one, zero),
                    std::invalid_argument);
}

TEST_CASE("Clebsch-Gordan agrees with the ladder-construction oracle") {
    for (int tj1 = 0; tj1 <= 6; ++tj1) {
        for (int tj2 = 0; tj2 <= 6; ++tj2) {
            const HalfInt j1 = HalfInt::from_twice(tj1), j2 = HalfInt::from_twice(tj2);
            const auto table = oracles::cg_table_ladder(j1, j2);
            for (const auto& [key, expected] : table) {
                const double got = clebsch_gordan(
                    j1, HalfInt::from_twice(key[2]), j2, HalfInt::from_twice(key[3]),
                    HalfInt::from_twice(key[0]), HalfInt::from_twice(key[1]));
                CHECK(std::abs(got - expected) < 1e-12);
            }
        }
    }
}

TEST_CASE("Clebsch-Gordan orthogonality for j <= 3") {
    for (int tj1 = 0; tj1 <= 6; ++tj1)
        for (int tj2 = 0; tj2 <= 6; ++tj2) {
            const HalfInt j1 = HalfInt::from_twice(tj1), j2 = HalfInt::from_twice(tj2);
            // rows: sum over m1,m2 of CG(J M) CG(J' M') = delta_JJ' delta_MM'
            for (int tJ = std::abs(tj1 - tj2); tJ <= tj1 + tj2; tJ += 2)
                for (int tJp = std::abs(tj1 - tj2); tJp <= tj1 + tj2; tJp += 2)
                    for (int tM = -std::min(tJ, tJp); tM <= std::min(tJ, tJp); tM += 2) {
                        double sum = 0.0;
                        for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
                            const int tm2 = tM - tm1;
                            if (std::abs(tm2) > tj2) continue;
                            sum += clebsch_gordan(j1, HalfInt::from_twice(tm1), j2,
                                                  HalfInt::from_twice(tm2),
                                                  HalfInt::from_twice(tJ), HalfInt::from_twice(tM)) *
                                   clebsch_gordan(j1, HalfInt::from_twice(tm1), j2,
                                                  HalfInt::from_twice(tm2),
                                                  HalfInt::from_twice(tJp), HalfInt::from_twice(tM));
                        }
                        const double expect = (tJ == tJp) ? 1.0 : 0.0;
                        CHECK(std::abs(sum - expect) < 1e-12);
                    }
        }
}

TEST_CASE("angular momentum operators satisfy the algebra") {
    for (int tj = 1; tj <= 7; ++tj) {
        const HalfInt j = HalfInt::from_twice(tj);
        const auto ops = angular_momentum_ops(j);
        const Complex i01(0, 1);
        const double jj = j.value() * (j.value() + 1.0);
        const int dim = j.multiplicity();

        CHECK(((ops.jx.mat * ops.jy.mat - ops.jy.mat * ops.jx.mat) - i01 * ops.jz.mat)
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
        CHECK(((ops.jy.mat * ops.jz.mat - ops.jz.mat * ops.jy.mat) - i01 * ops.jx.mat)
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
        CHECK(((ops.jz.mat * ops.jx.mat - ops.jx.mat * ops.jz.mat) - i01 * ops.jy.mat)
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
        const Matrix casimir =
            ops.jx.mat * ops.jx.mat + ops.jy.mat * ops.jy.mat + ops.jz.mat * ops.jz.mat;
        CHECK((casimir - jj * Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((ops.jplus.mat - (ops.jx.mat + i01 * ops.jy.mat)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(ops.jz.is_hermitian());
        CHECK(ops.jx.is_hermitian());
        CHECK(ops.jy.is_hermitian());
    }
    CHECK_THROWS_AS(angular_momentum_ops(HalfInt::from_twice(-1)), std::invalid_argument);
}

TEST_CASE("couple_basis is unitary and diagonalizes J^2 and Jz") {
    const std::vector<std::pair<HalfInt, HalfInt>> cases = {
        {HalfInt::whole(1), 1_half}, {HalfInt::whole(2), 1_half}, {HalfInt::whole(3), 1_half},
        {HalfInt::whole(4), 1_half}, {HalfInt::whole(2), HalfInt::whole(1)}, {3_half, 1_half},
        {HalfInt::whole(3), 3_half}};
    for (const auto& [L, S] : cases) {
        const Operator W = couple_basis(L, S);
        const int dim = L.multiplicity() * S.multiplicity();
        CHECK(W.unitarity_defect() < 1e-12);

        const auto lops = angular_momentum_ops(L);
        const auto sops = angular_momentum_ops(S);
        const Matrix IL = Matrix::Identity(L.multiplicity(), L.multiplicity());
        const Matrix IS = Matrix::Identity(S.multiplicity(), S.multiplicity());
        const Matrix jx = kron(lops.jx.mat, IS) + kron(IL, sops.jx.mat);
        const Matrix jy = kron(lops.jy.mat, IS) + kron(IL, sops.jy.mat);
        const Matrix jz = kron(lops.jz.mat, IS) + kron(IL, sops.jz.mat);
        const Matrix j2 = W.mat * (jx * jx + jy * jy + jz * jz) * W.mat.adjoint();
        const Matrix jzc = W.mat * jz * W.mat.adjoint();

        const auto labels = coupled_basis_labels(L, S);
        REQUIRE(static_cast<int>(labels.size()) == dim);
        for (int i = 0; i < dim; ++i) {
            const double J = labels[i].J.value();
            CHECK(std::abs(j2(i, i).real() - J * (J + 1.0)) < 1e-12);
            CHECK(std::abs(jzc(i, i).real() - labels[i].mJ.value()) < 1e-12);
        }
        // off-diagonals vanish: both operators are diagonal in the coupled basis
        CHECK((j2 - j2.diagonal().asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((jzc - jzc.diagonal().asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("coupled basis ordering: J descending, mJ ascending") {
    const auto labels = coupled_basis_labels(HalfInt::whole(3), 1_half);
    REQUIRE(labels.size() == 14);
    CHECK(labels[0].J == 7_half);
    CHECK(labels[0].mJ == -7_half);
    CHECK(labels[7].J == 7_half);
    CHECK(labels[7].mJ == 7_half);
    CHECK(labels[8].J == 5_half);
    CHECK(labels[8].mJ == -5_half);
    CHECK(labels[13].mJ == 5_half);
}

TEST_CASE("operators on mismatched bases refuse to combine") {
    const auto a = angular_momentum_ops(HalfInt::whole(1));
    CHECK_NOTHROW(a.jx + a.jx * a.jy);
    CHECK_THROWS_AS(couple_basis(HalfInt::whole(1), 1_half) + a.jx, std::invalid_argument);
    CHECK_THROWS_AS(couple_basis(HalfInt::whole(1), 1_half) * a.jx, std::invalid_argument);
}
