#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "oracles.hpp"
#include "ssnmf/datagen.hpp"
#include "ssnmf/extract.hpp"

using namespace ssnmf;

namespace {

bool same_sets(const ExtractionResult& a, const ExtractionResult& b) {
  return a.selected_sets == b.selected_sets;
}

bool identical(const ExtractionResult& a, const ExtractionResult& b) {
  return a.endmembers == b.endmembers && a.selected_sets == b.selected_sets &&
         a.signs == b.signs && a.p == b.p && a.aggregation == b.aggregation;
}

IndexSet sorted_union(const std::vector<IndexSet>& sets) {
  IndexSet all;
  for (const IndexSet& s : sets) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end());
  return all;
}

SyntheticInstance separable_instance(std::uint64_t seed, Index m = 20, Index n = 120,
                                     Index r = 5, double eps = 0.0) {
  SyntheticSpec spec;
  spec.m = m;
  spec.n = n;
  spec.r = r;
  spec.alpha = 0.3;
  spec.epsilon = eps;
  spec.seed = seed;
  return generate(spec);
}

// two tight clusters just inside the segment between (-1, 0) and (0, 1);
// jitter pulls every point toward the opposite vertex so the clusters stay
// separated along any linear functional
Matrix two_cluster_data(double jitter, std::uint64_t seed, Index per_cluster = 10) {
  Vector w1(2), w2(2);
  w1 << -1, 0;
  w2 << 0, 1;
  RandomStream stream(seed);
  Matrix x(2, 2 * per_cluster);
  for (Index j = 0; j < per_cluster; ++j) {
    const double lam = jitter * stream.uniform();
    x.col(j) = (1.0 - lam) * w1 + lam * w2;
  }
  for (Index j = 0; j < per_cluster; ++j) {
    const double lam = jitter * stream.uniform();
    x.col(per_cluster + j) = (1.0 - lam) * w2 + lam * w1;
  }
  return x;
}

bool set_crosses_clusters(const IndexSet& s, Index per_cluster) {
  const bool low = std::any_of(s.begin(), s.end(), [&](Index j) { return j < per_cluster; });
  const bool high = std::any_of(s.begin(), s.end(), [&](Index j) { return j >= per_cluster; });
  return low && high;
}

}  // namespace

TEST_CASE("vca picks the two dominant columns for every seed") {
  Matrix x(2, 3);
  x << 10, 0, 5,
       0, 10, 5;
  // any linear functional attains its maximal absolute value at column 0 or 1:
  // |u(2)| = |0.5 u(0) + 0.5 u(1)| <= max(|u(0)|, |u(1)|)
  for (int t = 0; t < 200; ++t) {
    const Vector d = oracle::random_vector(2, 900 + static_cast<std::uint64_t>(t));
    const Vector u = x.transpose() * d;
    Index best = 0;
    for (Index j = 1; j < 3; ++j)
      if (std::abs(u[j]) > std::abs(u[best])) best = j;
    REQUIRE(best <= 1);
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    AlgoConfig cfg{.r = 2, .seed = seed};
    const ExtractionResult res = vca(x, cfg);
    REQUIRE(sorted_union(res.selected_sets) == IndexSet{0, 1});
  }
}

TEST_CASE("vca on orthogonal columns selects all of them") {
  const Matrix x = Matrix::Identity(4, 4) * 3.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    AlgoConfig cfg{.r = 4, .seed = seed};
    const ExtractionResult res = vca(x, cfg);
    REQUIRE(sorted_union(res.selected_sets) == IndexSet{0, 1, 2, 3});
  }
}

TEST_CASE("vca is deterministic given the seed") {
  const SyntheticInstance inst = separable_instance(5, 10, 50, 4);
  AlgoConfig cfg{.r = 4, .seed = 99};
  REQUIRE(identical(vca(inst.x, cfg), vca(inst.x, cfg)));
}

TEST_CASE("spa follows the residual norms") {
  Matrix x(2, 3);
  x << 3, 0, 1.5,
       0, 2, 1.0;
  AlgoConfig cfg{.r = 2};
  const ExtractionResult res = spa(x, cfg);
  REQUIRE(res.selected_sets[0] == IndexSet{0});
  REQUIRE(res.selected_sets[1] == IndexSet{1});
}

TEST_CASE("spa recovers the pure columns of noiseless separable data") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SyntheticInstance inst = separable_instance(seed);
    AlgoConfig cfg{.r = 5};
    const ExtractionResult res = spa(inst.x, cfg);
    REQUIRE(sorted_union(res.selected_sets) == IndexSet{0, 1, 2, 3, 4});
  }
}

TEST_CASE("spa incremental norms agree with from-scratch projection") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = oracle::random_matrix(15, 40, 500 + seed);
    AlgoConfig cfg{.r = 8};
    spa(x, cfg, [&](const NormStep& step) {
      for (Index j = 0; j < x.cols(); ++j) {
        const double direct = step.basis.apply(x.col(j)).squaredNorm();
        REQUIRE(step.residual_norms_sq[j] == Catch::Approx(direct).margin(1e-8));
      }
    });
  }
}

TEST_CASE("sspa with p = 1 reproduces spa exactly") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SyntheticInstance inst =
        separable_instance(seed, 12, 60, 4, seed % 3 == 0 ? 0.0 : 0.05);
    AlgoConfig cfg{.r = 4, .p = 1};
    const ExtractionResult a = spa(inst.x, cfg);
    const ExtractionResult b = sspa(inst.x, cfg);
    REQUIRE(same_sets(a, b));
    REQUIRE(a.endmembers == b.endmembers);
  }
}

TEST_CASE("alls and svca with p = 1 follow vca's trajectory") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SyntheticInstance inst =
        separable_instance(seed + 300, 12, 60, 4, seed % 2 == 0 ? 0.0 : 0.1);
    AlgoConfig cfg{.r = 4, .p = 1, .seed = seed * 17 + 1};
    const ExtractionResult v = vca(inst.x, cfg);
    const ExtractionResult a = alls(inst.x, cfg);
    const ExtractionResult s = svca(inst.x, cfg);
    REQUIRE(same_sets(v, a));
    REQUIRE(same_sets(v, s));
  }
}

TEST_CASE("alls and svca are deterministic given seed and p") {
  const SyntheticInstance inst = separable_instance(9, 15, 80, 5, 0.05);
  AlgoConfig cfg{.r = 5, .p = 7, .seed = 4};
  REQUIRE(identical(alls(inst.x, cfg), alls(inst.x, cfg)));
  REQUIRE(identical(svca(inst.x, cfg), svca(inst.x, cfg)));
  AlgoConfig mean_cfg = cfg;
  mean_cfg.aggregation = Aggregation::mean;
  REQUIRE(identical(svca(inst.x, mean_cfg), svca(inst.x, mean_cfg)));
}

TEST_CASE("sspa is byte-identical across runs") {
  const SyntheticInstance inst = separable_instance(11, 15, 80, 5, 0.05);
  AlgoConfig cfg{.r = 5, .p = 9};
  REQUIRE(identical(sspa(inst.x, cfg), sspa(inst.x, cfg)));
}

TEST_CASE("alls mixes opposite clusters for some seeds, svca never does") {
  const Index per_cluster = 10;
  const Matrix x = two_cluster_data(0.1, 2024, per_cluster);

  int alls_mixed = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    AlgoConfig cfg{.r = 2, .p = per_cluster, .seed = seed};
    if (set_crosses_clusters(alls(x, cfg).selected_sets[0], per_cluster)) ++alls_mixed;
    REQUIRE_FALSE(set_crosses_clusters(svca(x, cfg).selected_sets[0], per_cluster));
  }
  REQUIRE(alls_mixed >= 1);

  // with p twice the cluster size the absolute-value selection is forced to
  // span both clusters already at the first step (r = 1: later steps would
  // re-select the same aggregate and stop on rank deficiency)
  int alls_mixed_wide = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    AlgoConfig cfg{.r = 1, .p = 2 * per_cluster, .seed = seed};
    if (set_crosses_clusters(alls(x, cfg).selected_sets[0], per_cluster)) ++alls_mixed_wide;
  }
  REQUIRE(alls_mixed_wide == 100);
}

TEST_CASE("column permutation permutes the selected sets") {
  const SyntheticInstance inst = separable_instance(21, 10, 40, 4, 0.02);
  const Index n = inst.x.cols();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  RandomStream shuffle(55);
  for (Index i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(static_cast<Index>(shuffle.uniform() * (i + 1)))]);

  Matrix xp(inst.x.rows(), n);
  for (Index j = 0; j < n; ++j) xp.col(perm[static_cast<std::size_t>(j)]) = inst.x.col(j);

  AlgoConfig cfg{.r = 4, .p = 5, .seed = 8};
  for (auto algo : {Algorithm::svca, Algorithm::sspa, Algorithm::alls}) {
    const ExtractionResult orig = extract(inst.x, algo, cfg);
    const ExtractionResult moved = extract(xp, algo, cfg);
    // mean aggregation sums the set in index order, so the permuted run may
    // differ by summation rounding
    REQUIRE((orig.endmembers - moved.endmembers).cwiseAbs().maxCoeff() <= 1e-12);
    for (std::size_t k = 0; k < orig.selected_sets.size(); ++k) {
      IndexSet mapped;
      for (Index j : orig.selected_sets[k]) mapped.push_back(perm[static_cast<std::size_t>(j)]);
      std::sort(mapped.begin(), mapped.end());
      REQUIRE(mapped == moved.selected_sets[k]);
    }
  }
}

TEST_CASE("aggregated endmembers stay within the coordinate envelope") {
  const SyntheticInstance inst = separable_instance(31, 12, 70, 4, 0.08);
  AlgoConfig cfg{.r = 4, .p = 6, .seed = 2};
  for (auto agg : {Aggregation::mean, Aggregation::median}) {
    AlgoConfig c = cfg;
    c.aggregation = agg;
    const ExtractionResult res = svca(inst.x, c);
    for (Index k = 0; k < 4; ++k) {
      const IndexSet& s = res.selected_sets[static_cast<std::size_t>(k)];
      REQUIRE((res.endmembers.col(k) - aggregate(inst.x, s, agg)).norm() == 0.0);
      for (Index i = 0; i < inst.x.rows(); ++i) {
        double lo = inst.x(i, s[0]), hi = inst.x(i, s[0]);
        for (Index j : s) {
          lo = std::min(lo, inst.x(i, j));
          hi = std::max(hi, inst.x(i, j));
        }
        REQUIRE(res.endmembers(i, k) >= lo - 1e-12);
        REQUIRE(res.endmembers(i, k) <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("extraction on rank-deficient data raises a rank error") {
  Matrix x(3, 4);
  const Vector a = oracle::random_vector(3, 71);
  for (Index j = 0; j < 4; ++j) x.col(j) = a * static_cast<double>(j + 1);
  AlgoConfig cfg{.r = 2};
  REQUIRE_THROWS_AS(spa(x, cfg), RankDeficiencyError);
}

TEST_CASE("extraction config validation") {
  const Matrix x = oracle::random_matrix(6, 10, 81);
  REQUIRE_THROWS_AS(vca(x, AlgoConfig{.r = 0, .seed = 1}), ParameterError);
  REQUIRE_THROWS_AS(vca(x, AlgoConfig{.r = 7, .seed = 1}), ParameterError);
  REQUIRE_THROWS_AS(vca(x, AlgoConfig{.r = 2, .p = 2, .seed = 1}), ParameterError);
  REQUIRE_THROWS_AS(spa(x, AlgoConfig{.r = 2, .p = 3}), ParameterError);
  REQUIRE_THROWS_AS(svca(x, AlgoConfig{.r = 2, .p = 11, .seed = 1}), ParameterError);
  Matrix bad = x;
  bad(0, 0) = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(sspa(bad, AlgoConfig{.r = 2}), InputError);
}
