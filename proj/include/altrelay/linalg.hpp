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

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace altrelay {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

// Error hierarchy. Every numerical failure the library can raise derives from
// NumericalError so callers can catch one type at the trial boundary.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularInput : NumericalError {
    using NumericalError::NumericalError;
};
struct NotPositiveDefinite : NumericalError {
    using NumericalError::NumericalError;
};
struct RankDeficiencyError : NumericalError {
    using NumericalError::NumericalError;
};
struct DegenerateInput : NumericalError {
    using NumericalError::NumericalError;
};
struct InvalidDimension : NumericalError {
    using NumericalError::NumericalError;
};
struct InterferenceNotCancelled : NumericalError {
    using NumericalError::NumericalError;
};
struct ReciprocityViolation : NumericalError {
    using NumericalError::NumericalError;
};

// Condition-number ceiling (2-norm) for every inversion in the library.
// Rayleigh-faded matrices exceed this with negligible probability, so a
// violation almost always indicates a bug or a pathological test input.
inline constexpr double kCondLimit = 1e8;

// 2-norm condition number, sigma_max / sigma_min. Returns +inf for exactly
// singular input.
double cond_2norm(const cmat& A);

// Inverse of a general square matrix, guarded by the condition ceiling.
// `what` names the matrix in the error message.
cmat inverse_checked(const cmat& A, const std::string& what);

// Orthogonal-complement projector of a tall full-column-rank matrix:
//   P = I - Z (Z^H Z)^{-1} Z^H.
// P is Hermitian, idempotent, annihilates the columns of Z, and has rank
// rows(Z) - cols(Z).
cmat orth_complement_projector(const cmat& Z);

// Semi-inverse of a tall full-column-rank matrix:
//   D = Z (Z^H Z)^{-1},  so that  Z^H D = D^H Z = I.
cmat semi_inverse(const cmat& Z);

// Orthonormal basis of (a k-dimensional subspace of) the orthogonal
// complement of the column space of A. Returns U with U^H U = I_k and
// U^H A = 0. Rank of A is decided with tolerance 1e-10 * sigma_max(A).
cmat orthonormal_null_basis(const cmat& A, Eigen::Index k);

// Natural log of the determinant of a Hermitian positive definite matrix,
// computed from a Cholesky factorization. The input is symmetrized first to
// absorb rounding; a non-positive pivot raises NotPositiveDefinite.
double logdet_hermitian_pd(const cmat& A);

// Inverse of a Hermitian positive definite matrix via Cholesky.
cmat hermitian_pd_inverse(const cmat& A);

// Log-determinant and inverse of I + A for Hermitian positive semidefinite A,
// computed from an eigendecomposition of A rather than a Cholesky factor of
// the sum. When A is numerically rank deficient at a very large scale, the
// rounding noise on its null eigenvalues can exceed 1, so factoring I + A
// directly may fail even though the true matrix is positive definite. Working
// with the eigenvalues of A keeps the identity part exact: eigenvalues inside
// a small roundoff band below zero are clamped to zero, while anything more
// negative still raises NotPositiveDefinite.
struct IdentityPlusPsd {
    double logdet = 0.0; // ln det(I + A)
    cmat inverse;        // (I + A)^{-1}
};
IdentityPlusPsd identity_plus_psd(const cmat& A);

// Largest principal angle (radians) between the column spaces of A and B.
// Both must have full column rank.
double max_principal_angle(const cmat& A, const cmat& B);

} // namespace altrelay
