#pragma once

#include <algorithm>
#include <utility>

#include "ssnmf/rng.hpp"
#include "ssnmf/types.hpp"

namespace ssnmf {

// Orthonormal basis of the directions extracted so far. The projector onto
// their orthogonal complement, I - VV^T, is applied implicitly; the m x m
// matrix is never formed.
class OrthoBasis {
 public:
  explicit OrthoBasis(Index rows) : v_(rows, 0) {
    if (rows < 1) throw DimensionError("OrthoBasis needs at least one row");
  }

  // Wraps an existing orthonormal matrix (e.g. an SVD subspace basis).
  explicit OrthoBasis(Matrix v) : v_(std::move(v)) {
    if (orthonormality_defect(v_) > 1e-10)
      throw InputError("columns are not orthonormal");
  }

  Index rows() const { return v_.rows(); }
  Index cols() const { return v_.cols(); }
  const Matrix& columns() const { return v_; }

  // x - V(V^T x)
  Vector apply(const Vector& x) const {
    if (x.size() != v_.rows())
      throw DimensionError("projector input has wrong length");
    if (v_.cols() == 0) return x;
    return x - v_ * (v_.transpose() * x);
  }

  // Appends the normalized residual of w and returns it. A residual below
  // rel_tol * |w| means w lies in the current span.
  Vector extend(const Vector& w, double rel_tol = 1e-12) {
    require_finite(w, "column");
    Vector y = apply(w);
    const double wn = w.norm();
    if (y.norm() <= rel_tol * wn)
      throw RankDeficiencyError("column lies in the span of the current basis");
    y = apply(y);  // second pass tightens orthogonality
    y /= y.norm();
    v_.conservativeResize(Eigen::NoChange, v_.cols() + 1);
    v_.col(v_.cols() - 1) = y;
    return y;
  }

  // max_ij |(V^T V - I)_ij|; 0 for an empty basis
  static double orthonormality_defect(const Matrix& v) {
    if (v.cols() == 0) return 0.0;
    const Matrix g = v.transpose() * v - Matrix::Identity(v.cols(), v.cols());
    return g.cwiseAbs().maxCoeff();
  }

 private:
  Matrix v_;
};

namespace detail {

// Thin orthonormal factor of b via Householder QR.
inline Matrix orthonormal_factor(const Matrix& b) {
  Eigen::HouseholderQR<Matrix> qr(b);
  return qr.householderQ() * Matrix::Identity(b.rows(), b.cols());
}

}  // namespace detail

// Approximate basis of the top-r left singular subspace by randomized
// subspace iteration: Gaussian start, then alternating multiplication by X
// and X^T with a QR re-orthonormalization after every product.
inline OrthoBasis truncated_svd_basis(const Matrix& x, Index r, int power_iters,
                                      std::uint64_t seed) {
  if (x.rows() < 1 || x.cols() < 1) throw DimensionError("matrix is empty");
  if (r < 1 || r > std::min(x.rows(), x.cols()))
    throw DimensionError("rank must satisfy 1 <= r <= min(m, n)");
  if (power_iters < 1) throw ParameterError("power_iters must be >= 1");
  require_finite(x, "matrix");

  RandomStream stream(seed);
  Matrix omega(x.cols(), r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < x.cols(); ++i) omega(i, j) = stream.normal();

  Matrix y = detail::orthonormal_factor(x * omega);
  for (int it = 0; it < power_iters; ++it) {
    const Matrix z = detail::orthonormal_factor(x.transpose() * y);
    y = detail::orthonormal_factor(x * z);
  }
  return OrthoBasis(std::move(y));
}

}  // namespace ssnmf
