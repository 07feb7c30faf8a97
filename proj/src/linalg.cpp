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

#include "altrelay/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace altrelay {

double cond_2norm(const cmat& A)
{
    Eigen::JacobiSVD<cmat> svd(A);
    const auto& s = svd.singularValues();
    if (s.size() == 0)
        throw InvalidDimension("cond_2norm: empty matrix");
    double smax = s(0);
    double smin = s(s.size() - 1);
    if (smin <= 0.0)
        return std::numeric_limits<double>::infinity();
    return smax / smin;
}

cmat inverse_checked(const cmat& A, const std::string& what)
{
    if (A.rows() != A.cols())
        throw InvalidDimension("inverse_checked: " + what + " is not square");
    if (cond_2norm(A) > kCondLimit)
        throw SingularInput("inverse_checked: " + what + " is ill-conditioned");
    return A.partialPivLu().solve(cmat::Identity(A.rows(), A.cols()));
}

namespace {

// Cholesky factor of Z^H Z with the shared conditioning guard. Used by the
// projector and the semi-inverse, which both invert this Gram matrix.
Eigen::LLT<cmat> gram_factor(const cmat& Z, const char* caller)
{
    if (Z.rows() < Z.cols())
        throw InvalidDimension(std::string(caller) + ": matrix must be tall (rows >= cols)");
    cmat G = Z.adjoint() * Z;
    // G is Hermitian PSD, so its condition number is the ratio of extreme
    // eigenvalues; cheaper and more stable than an SVD of Z itself.
    Eigen::SelfAdjointEigenSolver<cmat> eig(G);
    const auto& ev = eig.eigenvalues();
    if (ev(0) <= 0.0 || ev(ev.size() - 1) / ev(0) > kCondLimit)
        throw SingularInput(std::string(caller) + ": Z^H Z is ill-conditioned");
    Eigen::LLT<cmat> llt(G);
    if (llt.info() != Eigen::Success)
        throw SingularInput(std::string(caller) + ": Cholesky of Z^H Z failed");
    return llt;
}

} // namespace

cmat orth_complement_projector(const cmat& Z)
{
    auto llt = gram_factor(Z, "orth_complement_projector");
    cmat P = cmat::Identity(Z.rows(), Z.rows()) - Z * llt.solve(Z.adjoint());
    // Force exact Hermitian symmetry so downstream eigen-decompositions see a
    // clean projector.
    return 0.5 * (P + cmat(P.adjoint()));
}

cmat semi_inverse(const cmat& Z)
{
    auto llt = gram_factor(Z, "semi_inverse");
    cmat D(Z.rows(), Z.cols());
    D = llt.solve(Z.adjoint()).adjoint();
    return D;
}

cmat orthonormal_null_basis(const cmat& A, Eigen::Index k)
{
    const Eigen::Index m = A.rows();
    if (k < 0 || k > m)
        throw InvalidDimension("orthonormal_null_basis: requested dimension out of range");

    Eigen::JacobiSVD<cmat> svd(A, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    double smax = s.size() > 0 ? s(0) : 0.0;
    double tol = 1e-10 * smax;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol)
            ++rank;

    if (k > m - rank)
        throw RankDeficiencyError("orthonormal_null_basis: null space has dimension "
                                  + std::to_string(m - rank) + ", requested "
                                  + std::to_string(k));
    // Left singular vectors past the numerical rank span the orthogonal
    // complement of the column space of A.
    return svd.matrixU().rightCols(m - rank).leftCols(k);
}

double logdet_hermitian_pd(const cmat& A)
{
    if (A.rows() != A.cols())
        throw InvalidDimension("logdet_hermitian_pd: matrix is not square");
    cmat S = 0.5 * (A + cmat(A.adjoint()));
    Eigen::LLT<cmat> llt(S);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("logdet_hermitian_pd: matrix is not positive definite");
    double acc = 0.0;
    cmat L = llt.matrixL();
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
        double d = L(i, i).real();
        if (d <= 0.0)
            throw NotPositiveDefinite("logdet_hermitian_pd: non-positive pivot");
        acc += std::log(d);
    }
    return 2.0 * acc;
}

cmat hermitian_pd_inverse(const cmat& A)
{
    if (A.rows() != A.cols())
        throw InvalidDimension("hermitian_pd_inverse: matrix is not square");
    cmat S = 0.5 * (A + cmat(A.adjoint()));
    Eigen::LLT<cmat> llt(S);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("hermitian_pd_inverse: matrix is not positive definite");
    cmat inv = llt.solve(cmat::Identity(A.rows(), A.cols()));
    return 0.5 * (inv + cmat(inv.adjoint()));
}

IdentityPlusPsd identity_plus_psd(const cmat& A)
{
    if (A.rows() != A.cols())
        throw InvalidDimension("identity_plus_psd: matrix is not square");
    cmat S = 0.5 * (A + cmat(A.adjoint()));
    Eigen::SelfAdjointEigenSolver<cmat> es(S);
    if (es.info() != Eigen::Success)
        throw NumericalError("identity_plus_psd: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1.0);
    // Eigenvalues of A below the forming noise of the matrix products that
    // built it carry no information, only roundoff; snap them to zero in both
    // directions so a colossal top eigenvalue cannot turn a true null
    // direction into a spurious contribution. Anything clearly negative is a
    // real violation and still throws.
    const double band = 1e-13 * scale;
    IdentityPlusPsd out;
    Eigen::VectorXd inv_diag(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -1e-9 * scale)
            throw NotPositiveDefinite(
                "identity_plus_psd: matrix has a negative eigenvalue");
        const double l = lam(i) <= band ? 0.0 : lam(i);
        out.logdet += std::log1p(l);
        inv_diag(i) = 1.0 / (1.0 + l);
    }
    cmat inv = es.eigenvectors() * inv_diag.asDiagonal() * es.eigenvectors().adjoint();
    out.inverse = 0.5 * (inv + cmat(inv.adjoint()));
    return out;
}

double max_principal_angle(const cmat& A, const cmat& B)
{
    if (A.rows() != B.rows())
        throw InvalidDimension("max_principal_angle: row counts differ");
    // Orthonormalize both spans, then the singular values of Qa^H Qb are the
    // cosines of the principal angles.
    Eigen::HouseholderQR<cmat> qa(A), qb(B);
    cmat Qa = qa.householderQ() * cmat::Identity(A.rows(), A.cols());
    cmat Qb = qb.householderQ() * cmat::Identity(B.rows(), B.cols());
    Eigen::JacobiSVD<cmat> svd(Qa.adjoint() * Qb);
    const auto& s = svd.singularValues();
    double cmin = 1.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        cmin = std::min(cmin, s(i));
    cmin = std::clamp(cmin, -1.0, 1.0);
    return std::acos(cmin);
}

} // namespace altrelay
