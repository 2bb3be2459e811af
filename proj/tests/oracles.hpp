#pragma once

// Independent reference implementations used only by the tests. Each one
// recomputes its quantity by the most literal route available (full sorts,
// exhaustive enumeration, dense SVD) and deliberately shares no code with
// the library paths it checks.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <fstream>
#include <numeric>
#include <vector>

#include "ssnmf/linalg.hpp"
#include "ssnmf/rng.hpp"
#include "ssnmf/types.hpp"

namespace oracle {

using ssnmf::Index;
using ssnmf::IndexSet;
using ssnmf::Matrix;
using ssnmf::Vector;

// ---- selection rules via full stable sorts ------------------------------

inline std::vector<Index> sorted_indices_desc(const Vector& u) {
  std::vector<Index> idx(static_cast<std::size_t>(u.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    if (u[a] != u[b]) return u[a] > u[b];
    return a < b;
  });
  return idx;
}

inline std::vector<Index> sorted_indices_asc(const Vector& u) {
  std::vector<Index> idx(static_cast<std::size_t>(u.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    if (u[a] != u[b]) return u[a] < u[b];
    return a < b;
  });
  return idx;
}

inline IndexSet take_sorted(const std::vector<Index>& order, Index p) {
  IndexSet out(order.begin(), order.begin() + p);
  std::sort(out.begin(), out.end());
  return out;
}

inline double median_of_values(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline IndexSet top_p_abs(const Vector& u, Index p) {
  const Vector a = u.cwiseAbs();
  return take_sorted(sorted_indices_desc(a), p);
}

inline std::pair<IndexSet, int> top_p_signed_median(const Vector& u, Index p) {
  const auto desc = sorted_indices_desc(u);
  const auto asc = sorted_indices_asc(u);
  std::vector<double> largest, smallest;
  for (Index t = 0; t < p; ++t) {
    largest.push_back(u[desc[static_cast<std::size_t>(t)]]);
    smallest.push_back(u[asc[static_cast<std::size_t>(t)]]);
  }
  if (median_of_values(largest) >= std::abs(median_of_values(smallest)))
    return {take_sorted(desc, p), +1};
  return {take_sorted(asc, p), -1};
}

inline std::pair<IndexSet, int> top_p_signed_extreme(const Vector& u, Index p) {
  if (u.maxCoeff() >= -u.minCoeff()) return {take_sorted(sorted_indices_desc(u), p), +1};
  return {take_sorted(sorted_indices_asc(u), p), -1};
}

// ---- dense SVD -----------------------------------------------------------

// |X - YY^T X|_F of the optimal rank-r approximation, from a full SVD.
inline double truncated_residual(const Matrix& x, Index r) {
  const Eigen::JacobiSVD<Matrix> svd(x);
  const auto& sv = svd.singularValues();
  double acc = 0.0;
  for (Index i = r; i < sv.size(); ++i) acc += sv[i] * sv[i];
  return std::sqrt(acc);
}

inline double projection_residual(const Matrix& x, const Matrix& y) {
  return (x - y * (y.transpose() * x)).norm();
}

// ---- exhaustive active-set NNLS -----------------------------------------

// Per column: enumerate every support set, solve the unconstrained least
// squares restricted to it, keep the best feasible candidate. The optimal
// support always appears in the enumeration, so the minimum over feasible
// candidates is the exact NNLS optimum.
inline Matrix nnls_exhaustive(const Matrix& x, const Matrix& w) {
  const Index r = w.cols();
  const Index n = x.cols();
  Matrix h = Matrix::Zero(r, n);
  for (Index j = 0; j < n; ++j) {
    double best = x.col(j).squaredNorm();  // empty support
    Vector best_h = Vector::Zero(r);
    for (unsigned mask = 1; mask < (1u << r); ++mask) {
      std::vector<Index> support;
      for (Index k = 0; k < r; ++k)
        if (mask & (1u << k)) support.push_back(k);
      Matrix ws(w.rows(), static_cast<Index>(support.size()));
      for (std::size_t t = 0; t < support.size(); ++t) ws.col(static_cast<Index>(t)) = w.col(support[t]);
      const Vector hs = ws.colPivHouseholderQr().solve(x.col(j));
      if ((hs.array() < 0.0).any()) continue;
      const double obj = (x.col(j) - ws * hs).squaredNorm();
      if (obj < best) {
        best = obj;
        best_h.setZero();
        for (std::size_t t = 0; t < support.size(); ++t) best_h[support[t]] = hs[static_cast<Index>(t)];
      }
    }
    h.col(j) = best_h;
  }
  return h;
}

// ---- exhaustive assignment ----------------------------------------------

inline double assignment_brute_force(const Matrix& cost) {
  const Index n = cost.rows();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ---- reference PGM reader ------------------------------------------------

struct Pgm {
  Index width = 0;
  Index height = 0;
  int maxval = 0;
  std::vector<unsigned char> pixels;  // row-major
};

inline Pgm read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("not a P5 file");
  Pgm img;
  in >> img.width >> img.height >> img.maxval;
  in.get();  // the single whitespace byte after maxval
  img.pixels.resize(static_cast<std::size_t>(img.width * img.height));
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (!in) throw std::runtime_error("truncated PGM " + path);
  return img;
}

// ---- random test data -----------------------------------------------------

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed,
                            bool gaussian = true) {
  ssnmf::RandomStream stream(seed);
  Matrix x(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      x(i, j) = gaussian ? stream.normal() : stream.uniform();
  return x;
}

inline Vector random_vector(Index n, std::uint64_t seed) {
  ssnmf::RandomStream stream(seed);
  Vector u(n);
  for (Index i = 0; i < n; ++i) u[i] = stream.normal();
  return u;
}

}  // namespace oracle
