// SPDX-License-Identifier: Apache-2.0
//
// altrelay: link-level simulator and filter designer for alternate MIMO
// amplify-and-forward relay networks with inter-relay interference alignment
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed
// under the License is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR
// CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.
// ------------------------------------------------------------------------------

#include <cmath>
#include <complex>

#include "doctest.h"

#include "altrelay/linalg.hpp"
#include "altrelay/rng.hpp"
#include "test_support.hpp"

using namespace altrelay;
using test_support::rel_err;

TEST_SUITE("linalg") {

TEST_CASE("projector annihilates an identity column")
{
    cmat Z = cmat::Zero(2, 1);
    Z(0, 0) = 1.0;
    cmat P = orth_complement_projector(Z);
    cmat want = cmat::Zero(2, 2);
    want(1, 1) = 1.0;
    CHECK(rel_err(P, want) < 1e-14);
}

TEST_CASE("projector of an orthonormal matrix is I minus Z Z^H")
{
    GaussianStream rng(11, 0);
    cmat A = rng.matrix(4, 2);
    Eigen::HouseholderQR<cmat> qr(A);
    cmat Z = qr.householderQ() * cmat::Identity(4, 2);
    cmat P = orth_complement_projector(Z);
    cmat want = cmat::Identity(4, 4) - Z * Z.adjoint();
    CHECK((P - want).norm() < 1e-12);
}

TEST_CASE("projector contracts: Hermitian, idempotent, annihilating, rank")
{
    GaussianStream rng(3, 1);
    for (int rep = 0; rep < 20; ++rep) {
        cmat Z = rng.matrix(4, 2);
        cmat P = orth_complement_projector(Z);
        CHECK((P * Z).norm() < 1e-12 * (1.0 + Z.norm()));
        CHECK((P * P - P).norm() < 1e-12);
        CHECK((P - cmat(P.adjoint())).norm() < 1e-13);
        // A projector's rank equals its trace.
        CHECK(std::abs(P.trace().real() - 2.0) < 1e-10);
    }
}

TEST_CASE("projector rejects a rank-deficient input")
{
    cmat Z(3, 2);
    Z.col(0).setConstant(1.0);
    Z.col(1) = Z.col(0);
    CHECK_THROWS_AS(orth_complement_projector(Z), SingularInput);
}

TEST_CASE("semi-inverse of a unitary matrix is the matrix itself")
{
    GaussianStream rng(5, 0);
    cmat A = rng.matrix(3, 3);
    Eigen::HouseholderQR<cmat> qr(A);
    cmat Q = qr.householderQ() * cmat::Identity(3, 3);
    CHECK((semi_inverse(Q) - Q).norm() < 1e-12);
}

TEST_CASE("semi-inverse of a scaled identity")
{
    cmat Z = 2.0 * cmat::Identity(4, 4);
    CHECK((semi_inverse(Z) - 0.5 * cmat::Identity(4, 4)).norm() < 1e-13);
}

TEST_CASE("semi-inverse identity contracts on random tall matrices")
{
    GaussianStream rng(7, 2);
    for (int rep = 0; rep < 20; ++rep) {
        cmat Z = rng.matrix(4, 2);
        cmat D = semi_inverse(Z);
        CHECK((Z.adjoint() * D - cmat::Identity(2, 2)).norm() < 1e-12);
        CHECK((D.adjoint() * Z - cmat::Identity(2, 2)).norm() < 1e-12);
    }
}

TEST_CASE("null basis of leading identity columns spans the tail coordinates")
{
    cmat A = cmat::Identity(4, 2);
    cmat U = orthonormal_null_basis(A, 2);
    CHECK((U.adjoint() * A).norm() < 1e-12);
    CHECK((U.adjoint() * U - cmat::Identity(2, 2)).norm() < 1e-12);
    // Columns live entirely in the last two coordinates.
    CHECK(U.topRows(2).norm() < 1e-12);
}

TEST_CASE("null basis contracts on random matrices")
{
    GaussianStream rng(9, 4);
    for (int rep = 0; rep < 20; ++rep) {
        cmat A = rng.matrix(4, 2);
        cmat U = orthonormal_null_basis(A, 2);
        CHECK((U.adjoint() * A).norm() < 1e-12 * (1.0 + A.norm()));
        CHECK((U.adjoint() * U - cmat::Identity(2, 2)).norm() < 1e-12);
    }
}

TEST_CASE("null basis of the zero matrix is unitary")
{
    cmat A = cmat::Zero(4, 2);
    cmat U = orthonormal_null_basis(A, 4);
    CHECK((U.adjoint() * U - cmat::Identity(4, 4)).norm() < 1e-12);
    CHECK((U * U.adjoint() - cmat::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("null basis rejects an oversized request")
{
    GaussianStream rng(13, 0);
    cmat A = rng.matrix(4, 2); // full column rank, null space dimension 2
    CHECK_THROWS_AS(orthonormal_null_basis(A, 3), RankDeficiencyError);
}

TEST_CASE("log-determinant of simple matrices")
{
    CHECK(logdet_hermitian_pd(cmat::Identity(3, 3)) == doctest::Approx(0.0));
    cmat D = 2.0 * cmat::Identity(2, 2);
    CHECK(logdet_hermitian_pd(D) == doctest::Approx(2.0 * std::log(2.0)));
}

TEST_CASE("log-determinant matches the eigenvalue sum")
{
    GaussianStream rng(17, 0);
    for (int rep = 0; rep < 20; ++rep) {
        cmat B = rng.matrix(4, 4);
        cmat A = B * B.adjoint() + cmat::Identity(4, 4);
        double got = logdet_hermitian_pd(A);
        Eigen::SelfAdjointEigenSolver<cmat> eig(A);
        double want = 0.0;
        for (Eigen::Index i = 0; i < 4; ++i)
            want += std::log(eig.eigenvalues()(i));
        CHECK(std::abs(got - want) < 1e-10 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("log-determinant is additive over commuting factors")
{
    cmat A = cmat::Zero(3, 3);
    cmat B = cmat::Zero(3, 3);
    A.diagonal() << 2.0, 3.0, 0.5;
    B.diagonal() << 1.5, 0.25, 4.0;
    double lhs = logdet_hermitian_pd(A * B);
    double rhs = logdet_hermitian_pd(A) + logdet_hermitian_pd(B);
    CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("log-determinant rejects indefinite input")
{
    cmat A = cmat::Zero(2, 2);
    A.diagonal() << 1.0, -1.0;
    CHECK_THROWS_AS(logdet_hermitian_pd(A), NotPositiveDefinite);
}

TEST_CASE("identity-plus-PSD agrees with the Cholesky route on full rank")
{
    GaussianStream rng(101, 0);
    for (int rep = 0; rep < 20; ++rep) {
        cmat B = rng.matrix(4, 4);
        cmat A = B * B.adjoint();
        auto ip = identity_plus_psd(A);
        cmat Einv = cmat::Identity(4, 4) + A;
        CHECK(std::abs(ip.logdet - logdet_hermitian_pd(Einv)) < 1e-10);
        CHECK((ip.inverse - hermitian_pd_inverse(Einv)).norm() < 1e-10);
    }
}

TEST_CASE("identity-plus-PSD handles a rank-deficient term at huge scale")
{
    // A colossal rank-one A leaves I + A with eigenvalues {1, 1 + c}; the
    // rounding noise on the null direction of A is around eps * c, far above
    // 1, so the Cholesky route can fail while the eigenvalue route must not.
    GaussianStream rng(103, 0);
    cmat v = rng.matrix(3, 1);
    const double c = 1e19;
    cmat A = c * (v * v.adjoint());
    auto ip = identity_plus_psd(A);
    const double want = std::log1p(c * v.squaredNorm());
    CHECK(std::abs(ip.logdet - want) < 1e-10 * want);
    // The inverse keeps the null directions of A intact: (I + A)^{-1} v_perp
    // = v_perp for any v_perp orthogonal to v.
    cmat vp = orthonormal_null_basis(v, 2);
    CHECK((ip.inverse * vp - vp).norm() < 1e-8);

    auto z = identity_plus_psd(cmat::Zero(3, 3));
    CHECK(z.logdet == 0.0);
    CHECK((z.inverse - cmat::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("identity-plus-PSD rejects genuinely negative directions")
{
    cmat A = cmat::Zero(2, 2);
    A.diagonal() << 1.0, -0.5;
    CHECK_THROWS_AS(identity_plus_psd(A), NotPositiveDefinite);
}

TEST_CASE("Hermitian inverse solves to identity")
{
    GaussianStream rng(19, 0);
    cmat B = rng.matrix(4, 4);
    cmat A = B * B.adjoint() + cmat::Identity(4, 4);
    cmat Ainv = hermitian_pd_inverse(A);
    CHECK((A * Ainv - cmat::Identity(4, 4)).norm() < 1e-11);
}

TEST_CASE("condition number of a diagonal matrix")
{
    cmat A = cmat::Zero(2, 2);
    A.diagonal() << 10.0, 1.0;
    CHECK(cond_2norm(A) == doctest::Approx(10.0));
    cmat S = cmat::Zero(2, 2);
    S(0, 0) = 1.0;
    CHECK(std::isinf(cond_2norm(S)));
}

TEST_CASE("checked inverse round-trips and guards singular input")
{
    GaussianStream rng(23, 0);
    cmat A = rng.matrix(3, 3);
    cmat Ainv = inverse_checked(A, "A");
    CHECK((A * Ainv - cmat::Identity(3, 3)).norm() < 1e-10);

    cmat S = cmat::Zero(2, 2);
    S(0, 0) = 1.0;
    CHECK_THROWS_AS(inverse_checked(S, "S"), SingularInput);
}

TEST_CASE("principal angle separates identical and orthogonal spans")
{
    GaussianStream rng(29, 0);
    cmat A = rng.matrix(4, 2);
    cmat Q = rng.matrix(2, 2);
    // Same span under an invertible column mix.
    CHECK(max_principal_angle(A, cmat(A * Q)) < 1e-7);

    cmat e1 = cmat::Identity(4, 1);
    cmat e2 = cmat::Zero(4, 1);
    e2(1, 0) = 1.0;
    CHECK(max_principal_angle(e1, e2) ==
          doctest::Approx(std::acos(0.0)).epsilon(1e-10));
}

} // TEST_SUITE
