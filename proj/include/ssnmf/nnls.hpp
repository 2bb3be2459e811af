#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ssnmf/types.hpp"

namespace ssnmf {

struct NnlsSettings {
  enum class Init { zeros, given };
  int max_sweeps = 500;
  double rel_tol = 1e-8;  // relative objective decrease per sweep that stops
  Init init = Init::zeros;
};

// Minimizes |X - WH|_F over H >= 0 by cyclic exact coordinate descent,
// column of H at a time. The residual correlations are maintained through
// G = W^T W and an incrementally updated G H, so a sweep costs O(n r^2).
// If objective_history is given it receives |X - WH|_F after every sweep.
inline Matrix nnls_cd(const Matrix& x, const Matrix& w,
                      const NnlsSettings& settings = {},
                      const Matrix* h_init = nullptr,
                      std::vector<double>* objective_history = nullptr) {
  if (x.rows() != w.rows())
    throw DimensionError("X and W must have the same number of rows");
  require_finite(x, "X");
  require_finite(w, "W");
  if (settings.max_sweeps < 1) throw ParameterError("max_sweeps must be >= 1");
  if (!(settings.rel_tol > 0)) throw ParameterError("rel_tol must be positive");

  const Index r = w.cols();
  const Index n = x.cols();
  const Vector wsq = w.colwise().squaredNorm();
  if ((wsq.array() <= 0.0).any())
    throw ParameterError("W has a zero column");

  Matrix h;
  if (settings.init == NnlsSettings::Init::given) {
    if (h_init == nullptr) throw ParameterError("init = given but no H supplied");
    if (h_init->rows() != r || h_init->cols() != n)
      throw DimensionError("initial H has wrong shape");
    require_finite(*h_init, "initial H");
    if ((h_init->array() < 0.0).any())
      throw InputError("initial H has negative entries");
    h = *h_init;
  } else {
    h = Matrix::Zero(r, n);
  }

  const Matrix gram = w.transpose() * w;   // r x r
  const Matrix corr = w.transpose() * x;   // r x n
  Matrix gh = gram * h;                    // maintained as G H

  // The squared objective is advanced by the exact decrease of every
  // coordinate update, 2*delta*grad - |w_k|^2 delta^2 (nonnegative for an
  // exact minimization step). Evaluating |X - WH|^2 through the Gram
  // identity instead would cancel ~|X|^2 and bury the per-sweep decrease
  // in rounding noise, stalling the stopping rule early.
  double obj_sq = settings.init == NnlsSettings::Init::given
                      ? (x - w * h).squaredNorm()
                      : x.squaredNorm();
  double obj = std::sqrt(obj_sq);
  if (objective_history) {
    objective_history->clear();
    objective_history->push_back(obj);
  }

  for (int sweep = 0; sweep < settings.max_sweeps; ++sweep) {
    double drop_sq = 0.0;
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < r; ++k) {
        const double grad = corr(k, j) - gh(k, j);  // W(:,k)^T (X - WH)(:,j)
        const double updated = std::max(0.0, h(k, j) + grad / wsq[k]);
        const double delta = updated - h(k, j);
        if (delta != 0.0) {
          drop_sq += 2.0 * delta * grad - wsq[k] * delta * delta;
          gh.col(j) += gram.col(k) * delta;
          h(k, j) = updated;
        }
      }
    }
    const double next_sq = std::max(obj_sq - drop_sq, 0.0);
    const double next = std::sqrt(next_sq);
    if (objective_history) objective_history->push_back(next);
    const double decrease = obj + next > 0.0 ? drop_sq / (obj + next) : 0.0;
    obj_sq = next_sq;
    obj = next;
    if (decrease <= settings.rel_tol * std::max(obj, 1e-300)) break;
  }
  return h;
}

// Q_F(W) = min_{H >= 0} |X - WH|_F / |X|_F, recomputed from the factors so
// the reported value does not inherit the solver's incremental rounding.
inline double relative_error(const Matrix& x, const Matrix& w,
                             const NnlsSettings& settings = {}) {
  const double xnorm = x.norm();
  if (xnorm <= 0.0) throw ParameterError("X has zero norm");
  const Matrix h = nnls_cd(x, w, settings);
  const double err = (x - w * h).norm() / xnorm;
  return std::clamp(err, 0.0, 1.0);
}

}  // namespace ssnmf
