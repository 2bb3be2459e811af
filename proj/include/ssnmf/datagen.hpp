#pragma once

#include <Eigen/SVD>
#include <string>

#include "ssnmf/io.hpp"
#include "ssnmf/rng.hpp"
#include "ssnmf/types.hpp"

namespace ssnmf {

struct SyntheticSpec {
  Index m = 224;
  Index n = 1000;
  Index r = 10;
  double alpha = 0.05;    // Dirichlet concentration of the mixed columns
  double epsilon = 0.0;   // noise norm relative to |WH|_F
  std::uint64_t seed = 0;
  std::string w_path;     // empty: random W gated at condition number <= 100
};

struct SyntheticInstance {
  Matrix x;
  Matrix w_true;
  Matrix h_true;
  double noise_norm = 0.0;
};

// One column of a Dirichlet(alpha * e) sample: r independent Gamma(alpha, 1)
// variates normalized by their sum.
inline Vector dirichlet_column(double alpha, Index r, RandomStream& stream) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (r < 1) throw ParameterError("r must be positive");
  Vector g(r);
  for (;;) {
    for (Index i = 0; i < r; ++i) g[i] = stream.gamma(alpha);
    const double total = g.sum();
    // tiny shapes can underflow every variate to ~0; redraw that column
    if (total > 1e-250) return g / total;
  }
}

namespace detail {

inline void validate_spec(const SyntheticSpec& spec) {
  if (spec.m < 1 || spec.n < 1 || spec.r < 1)
    throw ParameterError("dimensions must be positive");
  if (spec.r > spec.m || spec.r > spec.n)
    throw ParameterError("r must satisfy r <= min(m, n)");
  if (!(spec.alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (spec.epsilon < 0.0) throw ParameterError("epsilon must be nonnegative");
}

inline double condition_number(const Matrix& w) {
  const Eigen::JacobiSVD<Matrix> svd(w);
  const auto& sv = svd.singularValues();
  const double smallest = sv[sv.size() - 1];
  if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / smallest;
}

inline Matrix random_vertices(Index m, Index r, RandomStream& stream) {
  Matrix w(m, r);
  for (;;) {
    for (Index j = 0; j < r; ++j)
      for (Index i = 0; i < m; ++i) w(i, j) = stream.uniform();
    if (condition_number(w) <= 100.0) return w;
  }
}

}  // namespace detail

// Synthetic instance with given sub-stream seeds; fixing one seed while
// varying another keeps the corresponding factor fixed (the benchmark
// sweeps noise with frozen W and H this way).
inline SyntheticInstance generate(const SyntheticSpec& spec, std::uint64_t w_seed,
                                  std::uint64_t h_seed, std::uint64_t n_seed) {
  detail::validate_spec(spec);

  SyntheticInstance inst;
  if (spec.w_path.empty()) {
    RandomStream w_stream(w_seed);
    inst.w_true = detail::random_vertices(spec.m, spec.r, w_stream);
  } else {
    Matrix w;
    try {
      w = read_matrix(spec.w_path);
    } catch (const Error& e) {
      throw InputError("cannot load W from '" + spec.w_path + "': " + e.what());
    }
    if (w.rows() != spec.m || w.cols() != spec.r)
      throw InputError("W file is " + std::to_string(w.rows()) + "x" +
                       std::to_string(w.cols()) + ", expected " +
                       std::to_string(spec.m) + "x" + std::to_string(spec.r));
    inst.w_true = std::move(w);
  }

  RandomStream h_stream(h_seed);
  inst.h_true = Matrix::Zero(spec.r, spec.n);
  inst.h_true.leftCols(spec.r) = Matrix::Identity(spec.r, spec.r);  // planted pure columns
  for (Index j = spec.r; j < spec.n; ++j)
    inst.h_true.col(j) = dirichlet_column(spec.alpha, spec.r, h_stream);

  const Matrix clean = inst.w_true * inst.h_true;
  if (spec.epsilon == 0.0) {
    inst.x = clean;
    inst.noise_norm = 0.0;
    return inst;
  }

  RandomStream n_stream(n_seed);
  Matrix noise(spec.m, spec.n);
  for (Index j = 0; j < spec.n; ++j)
    for (Index i = 0; i < spec.m; ++i) noise(i, j) = n_stream.normal();
  const double scale = spec.epsilon * clean.norm() / noise.norm();
  noise *= scale;
  inst.x = clean + noise;
  inst.noise_norm = noise.norm();
  return inst;
}

inline SyntheticInstance generate(const SyntheticSpec& spec) {
  return generate(spec, mix_seed(spec.seed, 1), mix_seed(spec.seed, 2),
                  mix_seed(spec.seed, 3));
}

}  // namespace ssnmf
