// Command-line front end: synthetic data generation, vertex extraction,
// abundance estimation, evaluation, abundance-map rendering, and the sweep
// runner.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ssnmf/ssnmf.hpp"

namespace {

using namespace ssnmf;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct SynthArgs {
  SyntheticSpec spec;
  std::string out_x, out_w, out_h;
};

struct ExtractArgs {
  std::string algo = "sspa";
  AlgoConfig cfg;
  bool seed_given = false;
  int trials = 1;
  std::string in, out, out_sets, sidecar;
  Index width = 0, height = 0;
  Index clip_k = 10;
};

struct AbundanceArgs {
  std::string in, w, out;
  NnlsSettings settings;
};

struct EvalArgs {
  std::string ref, est, in, w;
  NnlsSettings settings;
};

struct MapsArgs {
  std::string in, sidecar, out_dir;
  Index width = 0, height = 0;
};

struct BenchArgs {
  std::string config, out;
};

// Resolves the pixel grid for an input matrix: explicit --width/--height
// win, otherwise a sidecar (given or <in>.json when present). Returns
// nullopt when the input is a plain matrix. The bands check is skipped for
// abundance matrices, whose row count is the number of endmembers.
std::optional<Sidecar> resolve_grid(const std::string& in_path, const std::string& sidecar,
                                    Index width, Index height, const Matrix& x,
                                    bool rows_are_bands) {
  if (width > 0 || height > 0) {
    if (width < 1 || height < 1)
      throw ParameterError("--width and --height must be given together");
    return Sidecar{width, height, x.rows()};
  }
  std::string path = sidecar;
  if (path.empty()) {
    const std::string candidate = in_path + ".json";
    if (std::filesystem::exists(candidate)) path = candidate;
  }
  if (path.empty()) return std::nullopt;
  const Sidecar s = read_sidecar(path);
  if (rows_are_bands && s.bands != x.rows())
    throw InputError("sidecar bands=" + std::to_string(s.bands) + " but matrix has " +
                     std::to_string(x.rows()) + " rows");
  if (s.width * s.height != x.cols())
    throw InputError("sidecar grid does not match the number of pixels");
  return s;
}

Matrix load_matrix(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return read_csv(path);
  return read_matrix(path);
}

int run_synth(const SynthArgs& a) {
  const SyntheticInstance inst = generate(a.spec);
  write_matrix(a.out_x, inst.x);
  if (!a.out_w.empty()) write_matrix(a.out_w, inst.w_true);
  if (!a.out_h.empty()) write_matrix(a.out_h, inst.h_true);
  std::printf("wrote %lldx%lld matrix to %s (noise norm %.6g)\n",
              static_cast<long long>(inst.x.rows()), static_cast<long long>(inst.x.cols()),
              a.out_x.c_str(), inst.noise_norm);
  return kExitOk;
}

int run_extract(const ExtractArgs& a) {
  const Algorithm algo = parse_algorithm(a.algo);
  const bool randomized =
      algo == Algorithm::vca || algo == Algorithm::alls || algo == Algorithm::svca;
  if (randomized && !a.seed_given)
    throw ParameterError("--seed is required for " + a.algo);
  if (!randomized && a.trials > 1)
    throw ParameterError(a.algo + " is deterministic; --trials does not apply");

  Matrix x = load_matrix(a.in);
  const auto grid = resolve_grid(a.in, a.sidecar, a.width, a.height, x, true);
  if (grid && a.clip_k > 0) {
    ClipResult clipped = clip_extremes(make_cube(std::move(x), grid->width, grid->height), a.clip_k);
    std::printf("clipped %zu extreme pixels\n", clipped.removed.size());
    x = std::move(clipped.cube.data);
  }

  ExtractionResult best;
  double best_qf = std::numeric_limits<double>::infinity();
  for (int t = 0; t < std::max(1, a.trials); ++t) {
    AlgoConfig cfg = a.cfg;
    cfg.seed = a.trials > 1 ? mix_seed(a.cfg.seed, static_cast<std::uint64_t>(t)) : a.cfg.seed;
    ExtractionResult res = extract(x, algo, cfg);
    if (a.trials > 1) {
      const double qf = relative_error(x, res.endmembers);
      if (qf < best_qf) {
        best_qf = qf;
        best = std::move(res);
      }
    } else {
      best = std::move(res);
    }
  }
  write_matrix(a.out, best.endmembers);

  nlohmann::json sets;
  sets["algorithm"] = to_string(best.algorithm);
  sets["p"] = best.p;
  sets["aggregation"] = to_string(best.aggregation);
  sets["signs"] = best.signs;
  sets["selected_sets"] = best.selected_sets;  // 0-based column indices
  const std::string sets_path = a.out_sets.empty() ? a.out + ".sets.json" : a.out_sets;
  std::ofstream out(sets_path);
  if (!out) throw IoError("cannot open '" + sets_path + "' for writing");
  out << sets.dump(2) << "\n";

  if (a.trials > 1) std::printf("kept best of %d trials, rel_error %.6g\n", a.trials, best_qf);
  std::printf("wrote %s and %s\n", a.out.c_str(), sets_path.c_str());
  return kExitOk;
}

int run_abundances(const AbundanceArgs& a) {
  const Matrix x = load_matrix(a.in);
  const Matrix w = load_matrix(a.w);
  const Matrix h = nnls_cd(x, w, a.settings);
  write_matrix(a.out, h);
  std::printf("wrote %lldx%lld abundances to %s\n", static_cast<long long>(h.rows()),
              static_cast<long long>(h.cols()), a.out.c_str());
  return kExitOk;
}

int run_eval(const EvalArgs& a) {
  const bool mrsa_mode = !a.ref.empty() || !a.est.empty();
  const bool err_mode = !a.in.empty() || !a.w.empty();
  if (mrsa_mode == err_mode)
    throw ParameterError("use either --ref/--est (MRSA) or --in/--w (relative error)");

  if (mrsa_mode) {
    if (a.ref.empty() || a.est.empty())
      throw ParameterError("--ref and --est must be given together");
    const MatchResult match = mrsa(load_matrix(a.ref), load_matrix(a.est));
    std::printf("mrsa_total %.12g\n", match.total);
    std::printf("mrsa_mean %.12g\n", match.mean);
    return kExitOk;
  }

  if (a.in.empty() || a.w.empty())
    throw ParameterError("--in and --w must be given together");
  const double err = relative_error(load_matrix(a.in), load_matrix(a.w), a.settings);
  std::printf("rel_error %.12g\n", err);
  return kExitOk;
}

int run_maps(const MapsArgs& a) {
  const Matrix h = load_matrix(a.in);
  const auto grid = resolve_grid(a.in, a.sidecar, a.width, a.height, h, false);
  if (!grid)
    throw ParameterError("--width/--height or a sidecar is required for maps");
  write_abundance_maps(h, grid->width, grid->height, a.out_dir);
  std::printf("wrote %lld maps to %s\n", static_cast<long long>(h.rows()), a.out_dir.c_str());
  return kExitOk;
}

int run_bench(const BenchArgs& a) {
  std::ifstream in(a.config);
  if (!in) throw IoError("cannot open '" + a.config + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what(), 0);
  }
  const SweepSpec spec = sweep_from_json(j);
  const SweepReport report = run_sweep(spec);
  export_csv(report, a.out);
  std::printf("wrote %zu report rows to %s\n", report.rows.size(), a.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed separable NMF toolbox"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* c_synth = app.add_subcommand("synth", "Generate a synthetic instance");
  c_synth->add_option("--m", synth.spec.m, "Rows (spectral bands)")->check(CLI::PositiveNumber);
  c_synth->add_option("--n", synth.spec.n, "Columns (data points)")->check(CLI::PositiveNumber);
  c_synth->add_option("--r", synth.spec.r, "Number of vertices")->check(CLI::PositiveNumber);
  c_synth->add_option("--alpha", synth.spec.alpha, "Dirichlet concentration")
      ->check(CLI::PositiveNumber);
  c_synth->add_option("--eps", synth.spec.epsilon, "Relative noise norm")
      ->check(CLI::NonNegativeNumber);
  c_synth->add_option("--seed", synth.spec.seed, "Random seed")->required();
  c_synth->add_option("--w-file", synth.spec.w_path, "Load W from this matrix file");
  c_synth->add_option("--out-x", synth.out_x, "Output path for X")->required();
  c_synth->add_option("--out-w", synth.out_w, "Output path for the true W");
  c_synth->add_option("--out-h", synth.out_h, "Output path for the true H");

  ExtractArgs ex;
  CLI::App* c_extract = app.add_subcommand("extract", "Run one extraction algorithm");
  c_extract->add_option("--algo", ex.algo, "vca, spa, alls, svca or sspa")->required();
  c_extract->add_option("--r", ex.cfg.r, "Number of vertices")
      ->required()->check(CLI::PositiveNumber);
  c_extract->add_option("--p", ex.cfg.p, "Points aggregated per vertex")
      ->check(CLI::PositiveNumber);
  std::string agg = "median";
  c_extract->add_option("--agg", agg, "mean or median");
  c_extract->add_option("--seed", ex.cfg.seed, "Random seed (required for vca/alls/svca)")
      ->each([&](const std::string&) { ex.seed_given = true; });
  c_extract->add_option("--trials", ex.trials, "Run several seeds, keep the best by Q_F")
      ->check(CLI::PositiveNumber);
  c_extract->add_option("--power-iters", ex.cfg.power_iters, "SVD power iterations")
      ->check(CLI::PositiveNumber);
  c_extract->add_option("--in", ex.in, "Input matrix (.ssnmf or .csv)")->required();
  c_extract->add_option("--out", ex.out, "Output path for W")->required();
  c_extract->add_option("--out-sets", ex.out_sets, "Output path for the selected index sets");
  c_extract->add_option("--width", ex.width, "Image width (enables HSI preprocessing)");
  c_extract->add_option("--height", ex.height, "Image height");
  c_extract->add_option("--sidecar", ex.sidecar, "Sidecar JSON with width/height/bands");
  c_extract->add_option("--clip-k", ex.clip_k,
                        "Zero the pixels with the k largest values per band (0 disables)")
      ->check(CLI::NonNegativeNumber);

  AbundanceArgs ab;
  CLI::App* c_ab = app.add_subcommand("abundances", "Solve H >= 0 for given X and W");
  c_ab->add_option("--in", ab.in, "Input matrix X")->required();
  c_ab->add_option("--w", ab.w, "Endmember matrix W")->required();
  c_ab->add_option("--out", ab.out, "Output path for H")->required();
  c_ab->add_option("--max-sweeps", ab.settings.max_sweeps)->check(CLI::PositiveNumber);
  c_ab->add_option("--tol", ab.settings.rel_tol)->check(CLI::PositiveNumber);

  EvalArgs ev;
  CLI::App* c_eval = app.add_subcommand("eval", "MRSA between endmember sets, or Q_F");
  c_eval->add_option("--ref", ev.ref, "Reference W (MRSA mode)");
  c_eval->add_option("--est", ev.est, "Estimated W (MRSA mode)");
  c_eval->add_option("--in", ev.in, "Data matrix X (relative-error mode)");
  c_eval->add_option("--w", ev.w, "Endmember matrix W (relative-error mode)");
  c_eval->add_option("--max-sweeps", ev.settings.max_sweeps)->check(CLI::PositiveNumber);
  c_eval->add_option("--tol", ev.settings.rel_tol)->check(CLI::PositiveNumber);

  MapsArgs mp;
  CLI::App* c_maps = app.add_subcommand("maps", "Render abundance rows as PGM images");
  c_maps->add_option("--in", mp.in, "Abundance matrix H")->required();
  c_maps->add_option("--width", mp.width, "Image width");
  c_maps->add_option("--height", mp.height, "Image height");
  c_maps->add_option("--sidecar", mp.sidecar, "Sidecar JSON with width/height/bands");
  c_maps->add_option("--out-dir", mp.out_dir, "Output directory")->required();

  BenchArgs be;
  CLI::App* c_bench = app.add_subcommand("bench", "Run a sweep described by a JSON config");
  c_bench->add_option("--config", be.config, "Sweep config (JSON)")->required();
  c_bench->add_option("--out", be.out, "Report CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (c_synth->parsed()) return run_synth(synth);
    if (c_extract->parsed()) {
      ex.cfg.aggregation = parse_aggregation(agg);
      return run_extract(ex);
    }
    if (c_ab->parsed()) return run_abundances(ab);
    if (c_eval->parsed()) return run_eval(ev);
    if (c_maps->parsed()) return run_maps(mp);
    if (c_bench->parsed()) return run_bench(be);
  } catch (const RankDeficiencyError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
