#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ssnmf/types.hpp"

namespace ssnmf {

struct MatchResult {
  std::vector<Index> permutation;  // permutation[k] = estimate column matched to reference column k
  Vector per_column_angles;        // angle of each matched pair, in [0, 1]
  double total = 0.0;              // sum of per-column angles
  double mean = 0.0;               // total / r
};

// Mean removed spectral angle between two signatures, normalized to [0, 1].
// The angle is evaluated as 2 atan2(|u - v|, |u + v|) on the normalized
// centered vectors, which stays accurate where acos of the clamped cosine
// loses half its digits (nearly collinear inputs).
inline double mrsa_pair(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionError("vectors differ in length");
  require_finite(x, "x");
  require_finite(y, "y");
  const Vector xc = x.array() - x.mean();
  const Vector yc = y.array() - y.mean();
  const double nx = xc.norm();
  const double ny = yc.norm();
  if (nx <= 1e-15 || ny <= 1e-15)
    throw InputError("mrsa is undefined for constant vectors");
  const Vector u = xc / nx;
  const Vector v = yc / ny;
  return 2.0 * std::atan2((u - v).norm(), (u + v).norm()) / std::numbers::pi;
}

// Exact minimum-cost perfect matching (Hungarian algorithm with potentials,
// O(n^3)). Returns, for each row, the assigned column.
inline std::vector<Index> solve_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw DimensionError("cost matrix is not square");
  const Index n = cost.rows();
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = p[j0];
      Index j1 = 0;
      double delta = inf;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> assignment(static_cast<std::size_t>(n));
  for (Index j = 1; j <= n; ++j)
    if (p[j] > 0) assignment[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  return assignment;
}

// MRSA between two endmember matrices with the estimate's columns reordered
// by an exact assignment so the total angle is minimal.
inline MatchResult mrsa(const Matrix& w_ref, const Matrix& w_est) {
  if (w_ref.rows() != w_est.rows() || w_ref.cols() != w_est.cols())
    throw ParameterError("endmember matrices differ in shape");
  const Index r = w_ref.cols();

  Matrix cost(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      cost(i, j) = mrsa_pair(w_ref.col(i), w_est.col(j));

  MatchResult res;
  res.permutation = solve_assignment(cost);
  res.per_column_angles.resize(r);
  for (Index k = 0; k < r; ++k)
    res.per_column_angles[k] = cost(k, res.permutation[static_cast<std::size_t>(k)]);
  res.total = res.per_column_angles.sum();
  res.mean = res.total / static_cast<double>(r);
  return res;
}

// Fraction of columns whose abundance for each endmember exceeds the
// threshold: one value per row of H.
inline Vector purity_fraction(const Matrix& h, double threshold) {
  require_finite(h, "H");
  if ((h.array() < 0.0).any()) throw InputError("H has negative entries");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ParameterError("threshold must lie in (0, 1)");
  Vector out(h.rows());
  for (Index i = 0; i < h.rows(); ++i)
    out[i] = static_cast<double>((h.row(i).array() > threshold).count()) /
             static_cast<double>(h.cols());
  return out;
}

}  // namespace ssnmf
