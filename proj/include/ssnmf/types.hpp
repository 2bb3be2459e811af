#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ssnmf/error.hpp"

namespace ssnmf {

// Columns of a Matrix are data points (pixels); rows are spectral bands.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Distinct 0-based column indices, kept in ascending order.
using IndexSet = std::vector<Index>;

enum class Algorithm { vca, spa, alls, svca, sspa };
enum class Aggregation { mean, median };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::vca: return "vca";
    case Algorithm::spa: return "spa";
    case Algorithm::alls: return "alls";
    case Algorithm::svca: return "svca";
    case Algorithm::sspa: return "sspa";
  }
  return "?";
}

inline std::string to_string(Aggregation a) {
  return a == Aggregation::mean ? "mean" : "median";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "vca") return Algorithm::vca;
  if (s == "spa") return Algorithm::spa;
  if (s == "alls") return Algorithm::alls;
  if (s == "svca") return Algorithm::svca;
  if (s == "sspa") return Algorithm::sspa;
  throw ParameterError("unknown algorithm '" + s + "'");
}

inline Aggregation parse_aggregation(const std::string& s) {
  if (s == "mean") return Aggregation::mean;
  if (s == "median") return Aggregation::median;
  throw ParameterError("unknown aggregation '" + s + "'");
}

struct AlgoConfig {
  Index r = 0;
  Index p = 1;
  Aggregation aggregation = Aggregation::median;
  std::uint64_t seed = 0;
  int power_iters = 10;
};

struct ExtractionResult {
  Matrix endmembers;                    // m x r, column k estimates vertex k
  std::vector<IndexSet> selected_sets;  // r sets of p column indices each
  std::vector<int> signs;               // direction orientation per step
  Algorithm algorithm{};
  Index p = 1;
  Aggregation aggregation{};
};

inline void require_finite(const Matrix& x, const char* what) {
  if (!x.allFinite()) throw InputError(std::string(what) + " contains non-finite values");
}

inline void require_finite(const Vector& x, const char* what) {
  if (!x.allFinite()) throw InputError(std::string(what) + " contains non-finite values");
}

}  // namespace ssnmf
