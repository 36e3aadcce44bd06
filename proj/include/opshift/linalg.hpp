#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace opshift {

using cd = std::complex<double>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXcd = Mat<cd>;
using VectorXcd = Vec<cd>;

namespace linalg {

/// Default numerical-rank threshold, relative to the largest singular value.
inline constexpr double kRankTol = 1e-10;

/// Spectral norm. Empty matrices have norm zero.
template <typename Derived>
double op_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(m.eval());
  return svd.singularValues()(0);
}

/// Smallest singular value among min(rows, cols).
template <typename Derived>
double sigma_min(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(m.eval());
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

/// Number of singular values above rel_tol * sigma_max.
template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& m, double rel_tol = kRankTol) {
  if (m.size() == 0) return 0;
  using Plain = typename Derived::PlainObject;
  Eigen::BDCSVD<Plain> svd(m.eval());
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  return r;
}

/// Orthonormal basis (columns) of the nullspace of m.
template <typename Derived>
typename Derived::PlainObject nullspace(const Eigen::MatrixBase<Derived>& m,
                                        double rel_tol = kRankTol) {
  using Plain = typename Derived::PlainObject;
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return Plain::Identity(n, n);
  Eigen::JacobiSVD<Plain> svd(m.eval(), Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  }
  return svd.matrixV().rightCols(n - r);
}

/// Orthonormal basis (columns) of the column space of m.
template <typename Derived>
typename Derived::PlainObject range_basis(const Eigen::MatrixBase<Derived>& m,
                                          double rel_tol = kRankTol) {
  using Plain = typename Derived::PlainObject;
  if (m.size() == 0) return Plain(m.rows(), 0);
  Eigen::JacobiSVD<Plain> svd(m.eval(), Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s(0) > 0.0) {
    while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  }
  return svd.matrixU().leftCols(r);
}

/// Rotate each column so that its largest-modulus entry is real and positive.
template <typename Scalar>
void normalize_phases(Mat<Scalar>& q) {
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    Eigen::Index imax = 0;
    q.col(c).cwiseAbs().maxCoeff(&imax);
    const Scalar pivot = q(imax, c);
    const double mag = std::abs(pivot);
    if (mag > 0.0) q.col(c) *= std::abs(pivot) / pivot;
  }
}

/// (m + m*) / 2.
template <typename Derived>
typename Derived::PlainObject hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  return (0.5 * (m + m.adjoint())).eval();
}

/// Principal square root of a Hermitian positive semidefinite matrix via its
/// eigendecomposition. Small negative eigenvalues from rounding are clamped.
template <typename Derived>
typename Derived::PlainObject hermitian_sqrt(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> es(hermitian_part(m));
  auto roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().eval();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

/// Inverse of a Hermitian positive definite matrix through its eigenvectors.
template <typename Derived>
typename Derived::PlainObject hermitian_inverse(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> es(hermitian_part(m));
  auto inv = es.eigenvalues().cwiseInverse().eval();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

/// Unitary polar factor U of X = U P together with the singular values of X.
template <typename Scalar>
struct Polar {
  Mat<Scalar> unitary;
  Eigen::VectorXd singular_values;
};

template <typename Derived>
Polar<typename Derived::Scalar> polar(const Eigen::MatrixBase<Derived>& x) {
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(x.eval(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.matrixU() * svd.matrixV().adjoint(), svd.singularValues()};
}

}  // namespace linalg
}  // namespace opshift
