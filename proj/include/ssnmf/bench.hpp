#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ssnmf/datagen.hpp"
#include "ssnmf/extract.hpp"
#include "ssnmf/metrics.hpp"
#include "ssnmf/nnls.hpp"

namespace ssnmf {

struct AlgorithmSpec {
  Algorithm algo = Algorithm::sspa;
  Index p = 1;
  Aggregation aggregation = Aggregation::median;
};

enum class Statistic { min, median, max, stddev, best_by_qf };

inline std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::min: return "min";
    case Statistic::median: return "median";
    case Statistic::max: return "max";
    case Statistic::stddev: return "stddev";
    case Statistic::best_by_qf: return "best_by_qf";
  }
  return "?";
}

inline Statistic parse_statistic(const std::string& s) {
  if (s == "min") return Statistic::min;
  if (s == "median") return Statistic::median;
  if (s == "max") return Statistic::max;
  if (s == "stddev") return Statistic::stddev;
  if (s == "best_by_qf") return Statistic::best_by_qf;
  throw ParameterError("unknown statistic '" + s + "'");
}

struct SweepSpec {
  std::vector<AlgorithmSpec> algorithms;
  std::vector<double> alphas{0.05};
  std::vector<double> epsilons{0.05};
  std::vector<Index> ps;  // empty: every algorithm keeps its own p
  int trials = 30;
  std::uint64_t base_seed = 0;
  std::vector<Statistic> statistics{Statistic::min, Statistic::median, Statistic::max};
  Index m = 224;
  Index n = 1000;
  Index r = 10;
  int power_iters = 10;
  int threads = 1;  // 0: hardware concurrency
  NnlsSettings nnls;
};

struct SweepRow {
  std::string algorithm;
  Index p = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::string statistic;
  double mrsa = 0.0;       // nan when the cell failed
  double rel_error = 0.0;  // nan when the cell failed
  double seconds = 0.0;    // summed extraction wall time over the trials
  bool failed = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

namespace detail {

constexpr std::uint64_t kBenchW = 11;
constexpr std::uint64_t kBenchH = 12;
constexpr std::uint64_t kBenchN = 13;
constexpr std::uint64_t kBenchAlgo = 14;

struct Cell {
  AlgorithmSpec algo;
  Index p;
  std::size_t alpha_idx;
  std::size_t eps_idx;
};

// Report label: the aggregating algorithms carry their aggregation so two
// entries differing only in it stay distinguishable in the CSV.
inline std::string cell_label(const AlgorithmSpec& a) {
  if (a.algo == Algorithm::svca || a.algo == Algorithm::sspa)
    return to_string(a.algo) + "-" + to_string(a.aggregation);
  return to_string(a.algo);
}

struct TrialOutcome {
  double mrsa = std::numeric_limits<double>::quiet_NaN();
  double rel_error = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  bool failed = false;
};

inline void validate_sweep(const SweepSpec& spec) {
  if (spec.algorithms.empty()) throw ParameterError("no algorithms configured");
  if (spec.alphas.empty()) throw ParameterError("alpha list is empty");
  if (spec.epsilons.empty()) throw ParameterError("epsilon list is empty");
  if (spec.statistics.empty()) throw ParameterError("statistic list is empty");
  if (spec.trials < 1) throw ParameterError("trials must be >= 1");
}

inline std::vector<Cell> enumerate_cells(const SweepSpec& spec) {
  std::vector<Cell> cells;
  for (const AlgorithmSpec& a : spec.algorithms)
    for (std::size_t ai = 0; ai < spec.alphas.size(); ++ai)
      for (std::size_t ei = 0; ei < spec.epsilons.size(); ++ei) {
        if (spec.ps.empty()) {
          cells.push_back({a, a.p, ai, ei});
        } else {
          for (Index p : spec.ps) cells.push_back({a, p, ai, ei});
        }
      }
  return cells;
}

inline double stat_of(std::vector<double> vals, Statistic s) {
  std::sort(vals.begin(), vals.end());
  const std::size_t n = vals.size();
  switch (s) {
    case Statistic::min: return vals.front();
    case Statistic::max: return vals.back();
    case Statistic::median:
      return n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
    case Statistic::stddev: {
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(n);
      double acc = 0.0;
      for (double v : vals) acc += (v - mean) * (v - mean);
      return n > 1 ? std::sqrt(acc / static_cast<double>(n - 1)) : 0.0;
    }
    case Statistic::best_by_qf: break;  // handled by the caller
  }
  return 0.0;
}

inline TrialOutcome run_trial(const SweepSpec& spec, const Cell& cell, int trial) {
  TrialOutcome out;
  try {
    SyntheticSpec synth;
    synth.m = spec.m;
    synth.n = spec.n;
    synth.r = spec.r;
    synth.alpha = spec.alphas[cell.alpha_idx];
    synth.epsilon = spec.epsilons[cell.eps_idx];

    // W is shared by the whole sweep; H is fixed per alpha (per trial when
    // several alphas compete, so the purity draw does not bias the
    // comparison); only the noise is redrawn every trial.
    const std::uint64_t w_seed = mix_seed(spec.base_seed, kBenchW);
    const std::uint64_t h_seed =
        spec.alphas.size() > 1
            ? mix_seed(spec.base_seed, kBenchH, cell.alpha_idx, static_cast<std::uint64_t>(trial))
            : mix_seed(spec.base_seed, kBenchH, cell.alpha_idx);
    const std::uint64_t n_seed = mix_seed(spec.base_seed, kBenchN, cell.alpha_idx,
                                          cell.eps_idx, static_cast<std::uint64_t>(trial));
    const SyntheticInstance inst = generate(synth, w_seed, h_seed, n_seed);

    AlgoConfig cfg;
    cfg.r = spec.r;
    cfg.p = cell.p;
    cfg.aggregation = cell.algo.aggregation;
    cfg.power_iters = spec.power_iters;
    cfg.seed = mix_seed(spec.base_seed, kBenchAlgo, cell.alpha_idx, cell.eps_idx,
                        static_cast<std::uint64_t>(cell.p), static_cast<std::uint64_t>(cell.algo.algo),
                        static_cast<std::uint64_t>(trial));

    const auto t0 = std::chrono::steady_clock::now();
    const ExtractionResult res = extract(inst.x, cell.algo.algo, cfg);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    out.mrsa = mrsa(inst.w_true, res.endmembers).total;
    out.rel_error = relative_error(inst.x, res.endmembers, spec.nnls);
  } catch (const Error&) {
    out.failed = true;
  }
  return out;
}

}  // namespace detail

// Runs every (algorithm, alpha, epsilon, p) cell for the configured number
// of trials and aggregates the requested statistics. Trials are distributed
// over a thread pool; seeds derive from indices, so the report is identical
// for any schedule. A failing trial marks its whole cell as failed without
// aborting the sweep.
inline SweepReport run_sweep(const SweepSpec& spec) {
  detail::validate_sweep(spec);
  const std::vector<detail::Cell> cells = detail::enumerate_cells(spec);
  const std::size_t trials = static_cast<std::size_t>(spec.trials);

  std::vector<detail::TrialOutcome> outcomes(cells.size() * trials);
  std::atomic<std::size_t> next{0};
  const unsigned n_threads =
      spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                       : std::max(1u, std::thread::hardware_concurrency());

  auto worker = [&]() {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= outcomes.size()) return;
      const std::size_t c = task / trials;
      const int t = static_cast<int>(task % trials);
      outcomes[task] = detail::run_trial(spec, cells[c], t);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  SweepReport report;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const detail::Cell& cell = cells[c];
    std::vector<double> mrsas, rels;
    double seconds = 0.0;
    bool failed = false;
    std::size_t best_trial = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const detail::TrialOutcome& o = outcomes[c * trials + t];
      failed = failed || o.failed;
      seconds += o.seconds;
      if (!o.failed) {
        mrsas.push_back(o.mrsa);
        rels.push_back(o.rel_error);
        if (o.rel_error < outcomes[c * trials + best_trial].rel_error ||
            outcomes[c * trials + best_trial].failed)
          best_trial = t;
      }
    }

    for (Statistic s : spec.statistics) {
      SweepRow row;
      row.algorithm = detail::cell_label(cell.algo);
      row.p = cell.p;
      row.alpha = spec.alphas[cell.alpha_idx];
      row.epsilon = spec.epsilons[cell.eps_idx];
      row.statistic = to_string(s);
      row.seconds = seconds;
      row.failed = failed;
      if (failed) {
        row.mrsa = std::numeric_limits<double>::quiet_NaN();
        row.rel_error = std::numeric_limits<double>::quiet_NaN();
      } else if (s == Statistic::best_by_qf) {
        row.mrsa = outcomes[c * trials + best_trial].mrsa;
        row.rel_error = outcomes[c * trials + best_trial].rel_error;
      } else {
        row.mrsa = detail::stat_of(mrsas, s);
        row.rel_error = detail::stat_of(rels, s);
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

// CSV with a fixed header and one row per (cell x statistic).
inline void export_csv(const SweepReport& report, const std::string& path) {
  if (report.rows.empty()) throw ParameterError("report is empty");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  out << "algorithm,p,alpha,epsilon,statistic,mrsa,rel_error,seconds\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  for (const SweepRow& r : report.rows) {
    out << r.algorithm << ',' << r.p << ',' << fmt(r.alpha) << ',' << fmt(r.epsilon)
        << ',' << r.statistic << ',' << fmt(r.mrsa) << ',' << fmt(r.rel_error)
        << ',' << fmt(r.seconds) << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

// Sweep description from a JSON config (the `bench` CLI subcommand input).
inline SweepSpec sweep_from_json(const nlohmann::json& j) {
  SweepSpec spec;
  if (!j.contains("algorithms") || !j.at("algorithms").is_array() ||
      j.at("algorithms").empty())
    throw ParameterError("config needs a non-empty 'algorithms' array");
  for (const auto& a : j.at("algorithms")) {
    AlgorithmSpec as;
    as.algo = parse_algorithm(a.at("algo").get<std::string>());
    if (a.contains("p")) as.p = a.at("p").get<Index>();
    if (a.contains("agg")) as.aggregation = parse_aggregation(a.at("agg").get<std::string>());
    spec.algorithms.push_back(as);
  }
  if (j.contains("alphas")) spec.alphas = j.at("alphas").get<std::vector<double>>();
  if (j.contains("epsilons")) spec.epsilons = j.at("epsilons").get<std::vector<double>>();
  if (j.contains("ps")) spec.ps = j.at("ps").get<std::vector<Index>>();
  if (j.contains("trials")) spec.trials = j.at("trials").get<int>();
  if (j.contains("base_seed")) spec.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("statistics")) {
    spec.statistics.clear();
    for (const auto& s : j.at("statistics"))
      spec.statistics.push_back(parse_statistic(s.get<std::string>()));
  }
  if (j.contains("m")) spec.m = j.at("m").get<Index>();
  if (j.contains("n")) spec.n = j.at("n").get<Index>();
  if (j.contains("r")) spec.r = j.at("r").get<Index>();
  if (j.contains("power_iters")) spec.power_iters = j.at("power_iters").get<int>();
  if (j.contains("threads")) spec.threads = j.at("threads").get<int>();
  return spec;
}

}  // namespace ssnmf
