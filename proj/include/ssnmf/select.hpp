#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "ssnmf/types.hpp"

namespace ssnmf {

struct SignedSelection {
  IndexSet indices;
  int sign;  // +1 when the maximizing side was taken, -1 otherwise
};

namespace detail {

// Indices of the p best entries of u under cmp(value_a, value_b) meaning
// "a ranks before b"; ties broken by smaller index. Result ascending.
template <typename Cmp>
IndexSet top_p_by(const Vector& u, Index p, Cmp cmp) {
  std::vector<Index> order(static_cast<std::size_t>(u.size()));
  std::iota(order.begin(), order.end(), Index{0});
  auto rank = [&](Index a, Index b) {
    if (cmp(u[a], u[b])) return true;
    if (cmp(u[b], u[a])) return false;
    return a < b;
  };
  std::nth_element(order.begin(), order.begin() + (p - 1), order.end(), rank);
  IndexSet out(order.begin(), order.begin() + p);
  std::sort(out.begin(), out.end());
  return out;
}

inline double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double median_at(const Vector& u, const IndexSet& s) {
  std::vector<double> vals;
  vals.reserve(s.size());
  for (Index j : s) vals.push_back(u[j]);
  return median_of(std::move(vals));
}

inline void check_p(const Vector& u, Index p) {
  if (p < 1 || p > u.size())
    throw ParameterError("p must satisfy 1 <= p <= n");
}

}  // namespace detail

// Indices of the p largest |u(j)|.
inline IndexSet top_p_abs(const Vector& u, Index p) {
  detail::check_p(u, p);
  return detail::top_p_by(u, p, [](double a, double b) {
    return std::abs(a) > std::abs(b);
  });
}

// Takes the p largest entries when the median of the p largest is at least
// the absolute median of the p smallest, otherwise the p smallest.
inline SignedSelection top_p_signed_median(const Vector& u, Index p) {
  detail::check_p(u, p);
  IndexSet top = detail::top_p_by(u, p, [](double a, double b) { return a > b; });
  IndexSet bottom = detail::top_p_by(u, p, [](double a, double b) { return a < b; });
  if (detail::median_at(u, top) >= std::abs(detail::median_at(u, bottom)))
    return {std::move(top), +1};
  return {std::move(bottom), -1};
}

// Takes the p largest entries when max(u) >= -min(u), otherwise the p
// smallest.
inline SignedSelection top_p_signed_extreme(const Vector& u, Index p) {
  detail::check_p(u, p);
  if (u.maxCoeff() >= -u.minCoeff()) {
    return {detail::top_p_by(u, p, [](double a, double b) { return a > b; }), +1};
  }
  return {detail::top_p_by(u, p, [](double a, double b) { return a < b; }), -1};
}

// Coordinate-wise mean or median of the columns X(:, S). The median of an
// even-sized set is the mean of the two middle values.
inline Vector aggregate(const Matrix& x, const IndexSet& s, Aggregation method) {
  if (s.empty()) throw ParameterError("aggregation set is empty");
  for (Index j : s)
    if (j < 0 || j >= x.cols())
      throw ParameterError("aggregation index out of range");

  if (method == Aggregation::mean) {
    Vector out = Vector::Zero(x.rows());
    for (Index j : s) out += x.col(j);
    return out / static_cast<double>(s.size());
  }

  Vector out(x.rows());
  std::vector<double> vals(s.size());
  for (Index i = 0; i < x.rows(); ++i) {
    for (std::size_t t = 0; t < s.size(); ++t) vals[t] = x(i, s[t]);
    out[i] = detail::median_of(vals);
  }
  return out;
}

}  // namespace ssnmf
