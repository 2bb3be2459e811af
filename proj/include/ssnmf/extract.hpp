#pragma once

#include <functional>
#include <string>
#include <utility>

#include "ssnmf/linalg.hpp"
#include "ssnmf/rng.hpp"
#include "ssnmf/select.hpp"
#include "ssnmf/types.hpp"

namespace ssnmf {

// Instrumentation hook for the norm-driven algorithms (spa / sspa): fired
// after every step with the basis and the incrementally maintained squared
// residual norms.
struct NormStep {
  Index step;
  Index anchor;  // column that attained the maximal residual norm
  const OrthoBasis& basis;
  const Vector& residual_norms_sq;
};
using NormObserver = std::function<void(const NormStep&)>;

namespace detail {

constexpr std::uint64_t kSvdStream = 1;
constexpr std::uint64_t kDirectionStream = 2;

inline void validate_extraction(const Matrix& x, const AlgoConfig& cfg,
                                bool require_unit_p) {
  if (x.rows() < 1 || x.cols() < 1) throw DimensionError("data matrix is empty");
  require_finite(x, "data matrix");
  if (cfg.r < 1 || cfg.r > std::min(x.rows(), x.cols()))
    throw ParameterError("r must satisfy 1 <= r <= min(m, n)");
  if (cfg.p < 1 || cfg.p > x.cols())
    throw ParameterError("p must satisfy 1 <= p <= n");
  if (require_unit_p && cfg.p != 1)
    throw ParameterError("this algorithm requires p = 1");
  if (cfg.power_iters < 1) throw ParameterError("power_iters must be >= 1");
}

inline Index argmax_tie_lowest(const Vector& u) {
  Index best = 0;
  for (Index j = 1; j < u.size(); ++j)
    if (u[j] > u[best]) best = j;
  return best;
}

inline Index argmax_abs_tie_lowest(const Vector& u) {
  Index best = 0;
  for (Index j = 1; j < u.size(); ++j)
    if (std::abs(u[j]) > std::abs(u[best])) best = j;
  return best;
}

struct StepChoice {
  IndexSet set;
  int sign;
  Vector column;  // what becomes W(:,k) and extends the projector
};

inline ExtractionResult make_result(Index m, const AlgoConfig& cfg,
                                    Algorithm tag, Aggregation agg) {
  ExtractionResult res;
  res.endmembers.resize(m, cfg.r);
  res.selected_sets.resize(static_cast<std::size_t>(cfg.r));
  res.signs.resize(static_cast<std::size_t>(cfg.r), +1);
  res.algorithm = tag;
  res.p = cfg.p;
  res.aggregation = agg;
  return res;
}

inline Vector extend_at_step(OrthoBasis& basis, const Vector& w, Index k) {
  try {
    return basis.extend(w);
  } catch (const RankDeficiencyError& e) {
    throw RankDeficiencyError("step " + std::to_string(k + 1) + ": " + e.what());
  }
}

// Shared greedy loop of the direction-driven family (vca / alls / svca):
// per step, draw a random direction in the SVD subspace, score the columns
// against its projection, and let `choose` turn the scores into a column.
template <typename ChooseFn>
ExtractionResult direction_extraction(const Matrix& x, const AlgoConfig& cfg,
                                      Algorithm tag, Aggregation agg,
                                      ChooseFn&& choose) {
  const OrthoBasis subspace =
      truncated_svd_basis(x, cfg.r, cfg.power_iters, mix_seed(cfg.seed, kSvdStream));
  OrthoBasis basis(x.rows());
  ExtractionResult res = make_result(x.rows(), cfg, tag, agg);

  for (Index k = 0; k < cfg.r; ++k) {
    // one normal draw per step from its own substream, so trials can run in
    // parallel and every step is reproducible in isolation
    RandomStream stream(mix_seed(cfg.seed, kDirectionStream, static_cast<std::uint64_t>(k)));
    Vector g(cfg.r);
    for (Index i = 0; i < cfg.r; ++i) g[i] = stream.normal();

    const Vector direction = subspace.columns() * g;
    const Vector u = x.transpose() * basis.apply(direction);

    StepChoice choice = choose(u);
    extend_at_step(basis, choice.column, k);
    res.endmembers.col(k) = choice.column;
    res.selected_sets[static_cast<std::size_t>(k)] = std::move(choice.set);
    res.signs[static_cast<std::size_t>(k)] = choice.sign;
  }
  return res;
}

// Shared greedy loop of the norm-driven family (spa / sspa): per step, the
// anchor is the column with the largest residual norm, maintained by the
// Pythagorean update q(j) -= (v^T X(:,j))^2.
template <typename ChooseFn>
ExtractionResult norm_extraction(const Matrix& x, const AlgoConfig& cfg,
                                 Algorithm tag, Aggregation agg,
                                 ChooseFn&& choose, const NormObserver& observer) {
  OrthoBasis basis(x.rows());
  ExtractionResult res = make_result(x.rows(), cfg, tag, agg);
  Vector q = x.colwise().squaredNorm();

  for (Index k = 0; k < cfg.r; ++k) {
    const Index anchor = argmax_tie_lowest(q);
    StepChoice choice = choose(anchor, basis);
    const Vector v = extend_at_step(basis, choice.column, k);
    q -= (x.transpose() * v).cwiseAbs2();
    q = q.cwiseMax(0.0);

    res.endmembers.col(k) = choice.column;
    res.selected_sets[static_cast<std::size_t>(k)] = std::move(choice.set);
    res.signs[static_cast<std::size_t>(k)] = choice.sign;
    if (observer) observer(NormStep{k, anchor, basis, q});
  }
  return res;
}

}  // namespace detail

// Vertex component analysis: random directions, single column per step.
inline ExtractionResult vca(const Matrix& x, const AlgoConfig& cfg) {
  detail::validate_extraction(x, cfg, /*require_unit_p=*/true);
  return detail::direction_extraction(
      x, cfg, Algorithm::vca, Aggregation::mean, [&](const Vector& u) {
        const Index j = detail::argmax_abs_tie_lowest(u);
        return detail::StepChoice{{j}, +1, x.col(j)};
      });
}

// ALLS: random directions, p columns by largest |u|, mean aggregation.
inline ExtractionResult alls(const Matrix& x, const AlgoConfig& cfg) {
  detail::validate_extraction(x, cfg, /*require_unit_p=*/false);
  return detail::direction_extraction(
      x, cfg, Algorithm::alls, Aggregation::mean, [&](const Vector& u) {
        IndexSet s = top_p_abs(u, cfg.p);
        Vector w = aggregate(x, s, Aggregation::mean);
        return detail::StepChoice{std::move(s), +1, std::move(w)};
      });
}

// Smoothed VCA: random directions, signed median selection, mean or median
// aggregation.
inline ExtractionResult svca(const Matrix& x, const AlgoConfig& cfg) {
  detail::validate_extraction(x, cfg, /*require_unit_p=*/false);
  return detail::direction_extraction(
      x, cfg, Algorithm::svca, cfg.aggregation, [&](const Vector& u) {
        SignedSelection sel = top_p_signed_median(u, cfg.p);
        Vector w = aggregate(x, sel.indices, cfg.aggregation);
        return detail::StepChoice{std::move(sel.indices), sel.sign, std::move(w)};
      });
}

// Successive projection algorithm: deterministic, anchor column extracted
// directly.
inline ExtractionResult spa(const Matrix& x, const AlgoConfig& cfg,
                            const NormObserver& observer = {}) {
  detail::validate_extraction(x, cfg, /*require_unit_p=*/true);
  return detail::norm_extraction(
      x, cfg, Algorithm::spa, Aggregation::mean,
      [&](Index anchor, const OrthoBasis&) {
        return detail::StepChoice{{anchor}, +1, x.col(anchor)};
      },
      observer);
}

// Smoothed SPA: deterministic anchors, signed extreme selection around the
// anchor's residual direction, mean or median aggregation.
inline ExtractionResult sspa(const Matrix& x, const AlgoConfig& cfg,
                             const NormObserver& observer = {}) {
  detail::validate_extraction(x, cfg, /*require_unit_p=*/false);
  return detail::norm_extraction(
      x, cfg, Algorithm::sspa, cfg.aggregation,
      [&](Index anchor, const OrthoBasis& basis) {
        const Vector u = x.transpose() * basis.apply(x.col(anchor));
        SignedSelection sel = top_p_signed_extreme(u, cfg.p);
        Vector w = aggregate(x, sel.indices, cfg.aggregation);
        return detail::StepChoice{std::move(sel.indices), sel.sign, std::move(w)};
      },
      observer);
}

inline ExtractionResult extract(const Matrix& x, Algorithm algo,
                                const AlgoConfig& cfg) {
  switch (algo) {
    case Algorithm::vca: return vca(x, cfg);
    case Algorithm::spa: return spa(x, cfg);
    case Algorithm::alls: return alls(x, cfg);
    case Algorithm::svca: return svca(x, cfg);
    case Algorithm::sspa: return sspa(x, cfg);
  }
  throw ParameterError("unknown algorithm");
}

}  // namespace ssnmf
