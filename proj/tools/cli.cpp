#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "lrexp/analysis.hpp"
#include "lrexp/expectile.hpp"
#include "lrexp/ingest.hpp"
#include "lrexp/io.hpp"
#include "lrexp/parallel.hpp"
#include "lrexp/rng.hpp"

namespace lrexp::cli {

namespace fs = std::filesystem;

namespace {

struct SeedFlags {
  std::uint64_t seed = kDefaultSeed;
  bool entropy = false;

  void add(CLI::App* app) {
    auto* s = app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_flag("--entropy", entropy, "Draw the seed from the system entropy source")->excludes(s);
  }
};

struct OptimizerFlags {
  std::string algorithm = "lbfgs";
  double grad_tol = 1e-6;
  int max_iters = 500;
  int lbfgs_memory = 10;

  void add(CLI::App* app, bool with_algorithm = true) {
    if (with_algorithm)
      app->add_option("--algorithm", algorithm, "bfgs, lbfgs or cg")
          ->check(CLI::IsMember({"bfgs", "lbfgs", "l-bfgs", "cg"}, CLI::ignore_case))
          ->capture_default_str();
    app->add_option("--grad-tol", grad_tol, "Infinity-norm gradient tolerance")->capture_default_str();
    app->add_option("--max-iters", max_iters, "Iteration cap")->capture_default_str();
    app->add_option("--lbfgs-memory", lbfgs_memory, "L-BFGS history length")->capture_default_str();
  }

  OptimizeOptions options() const {
    OptimizeOptions o;
    o.algorithm = parse_algorithm(algorithm);
    o.grad_tol = grad_tol;
    o.max_iters = max_iters;
    o.lbfgs_memory = lbfgs_memory;
    o.validate();
    return o;
  }

  Json json() const {
    return {{"algorithm", algorithm}, {"grad_tol", grad_tol}, {"max_iters", max_iters}, {"lbfgs_memory", lbfgs_memory}};
  }
};

struct SimulationFlags {
  SimulationSpec spec;

  void add(CLI::App* app) {
    app->add_option("--rows", spec.rows, "Rows")->capture_default_str();
    app->add_option("--cols", spec.cols, "Columns")->capture_default_str();
    app->add_option("--true-rank", spec.true_rank, "Rank of U V'")->capture_default_str();
    app->add_option("--sigma", spec.sigma, "Noise standard deviation")->capture_default_str();
    app->add_option("--na", spec.na_portion, "Missing fraction")->capture_default_str();
    app->add_option("--r-sd", spec.r_sd, "Std of R")->capture_default_str();
    app->add_option("--c-sd", spec.c_sd, "Std of C")->capture_default_str();
    app->add_option("--u-sd", spec.u_sd, "Std of U")->capture_default_str();
    app->add_option("--v-sd", spec.v_sd, "Std of V")->capture_default_str();
  }
};

Json spec_json(const SimulationSpec& s) {
  return {{"rows", s.rows},   {"cols", s.cols},   {"true_rank", s.true_rank}, {"sigma", s.sigma},
          {"na_portion", s.na_portion}, {"r_sd", s.r_sd}, {"c_sd", s.c_sd}, {"u_sd", s.u_sd},
          {"v_sd", s.v_sd},   {"seed", std::to_string(s.seed)}};
}

Json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Json mat_json(const Matrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

std::string tau_label(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", tau);
  return buf;
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& n : names) out.push_back(parse_algorithm(n));
  return out;
}

std::vector<Tau> to_taus(const std::vector<double>& values) { return make_taus(values); }

// Accumulates what a run read and wrote, for the manifest.
struct Run {
  std::string subcommand;
  Json config = Json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  fs::path manifest;
};

NormalizedMatrix load_for_fit(const std::string& path, bool header, bool normalize_input, Run& run) {
  run.inputs.push_back(path);
  const MaskedMatrix x = read_matrix_csv(fs::path(path), header);
  if (normalize_input) return normalize(x);
  NormalizedMatrix out;
  out.matrix = x;
  out.info.row_means = observed_row_means(x);
  out.info.col_means = observed_col_means(x);
  return out;
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
  fs::path out = path;
  out.replace_extension();
  return fs::path(out.string() + suffix);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory " + dir.string());
}

std::optional<Index> resolve_pivot(const std::optional<Index>& flag, bool no_orient, Index rank, Index rows) {
  if (no_orient) return std::nullopt;
  if (flag) return flag;
  if (rank == 1 && rows > kDefaultOrientPivot) return kDefaultOrientPivot;
  return std::nullopt;
}

Json fit_report_json(const FitReport& report, const FitConfig& config, const NormalizationInfo& info) {
  Json doc = report_to_json(report);
  doc["tau"] = config.tau.value();
  doc["rank"] = config.rank;
  doc["algorithm"] = std::string(to_string(config.opts.algorithm));
  doc["seed"] = std::to_string(config.seed);
  doc["restarts"] = config.n_restarts;
  doc["loss_times_variance"] = report.final_loss * info.std * info.std;
  doc["rmse"] = rmse_from_loss(report.final_loss, info.std);
  doc["normalization"] = {{"mean", info.mean}, {"std", info.std}};
  return doc;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-rank expectile matrix factorization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LREXP_VERSION);

  std::string manifest_flag;
  app.add_option("--manifest", manifest_flag, "Where to write the run manifest (default: next to the outputs)");
  int threads = default_thread_count();
  app.add_option("--threads", threads, "Worker threads (default: LREXP_THREADS or available parallelism)")
      ->check(CLI::PositiveNumber);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a simulated masked matrix");
  SimulationFlags sim_flags;
  SeedFlags sim_seed;
  std::string sim_out, sim_truth;
  bool sim_header = false;
  sim_flags.add(sim);
  sim_seed.add(sim);
  sim->add_option("--out", sim_out, "Matrix CSV")->required();
  sim->add_option("--truth", sim_truth, "Sidecar JSON with the true components (default: <out>.truth.json)");
  sim->add_flag("--header", sim_header, "Write a header row");

  // fit
  auto* fitc = app.add_subcommand("fit", "Fit the expectile factor model");
  std::string fit_input, fit_output, fit_report, fit_warm;
  bool fit_header = false, fit_raw = false, fit_no_orient = false;
  double fit_tau = 0.5;
  Index fit_rank = 1;
  int fit_restarts = 1;
  std::optional<Index> fit_pivot;
  OptimizerFlags fit_opt;
  SeedFlags fit_seed;
  fitc->add_option("--input", fit_input, "Matrix CSV")->required();
  fitc->add_flag("--header", fit_header, "Input has a header row");
  fitc->add_option("--tau", fit_tau, "Expectile level in (0, 1)")->capture_default_str();
  fitc->add_option("--rank", fit_rank, "Rank k")->capture_default_str();
  fitc->add_option("--restarts", fit_restarts, "Random restarts")->capture_default_str();
  fitc->add_option("--orient-pivot", fit_pivot, "Row whose U sign is made positive (rank 1; default 72 when it exists)");
  fitc->add_flag("--no-orient", fit_no_orient, "Skip rank-1 orientation");
  fitc->add_option("--warm-start", fit_warm, "Start from this model JSON");
  fitc->add_option("--output", fit_output, "Model JSON")->required();
  fitc->add_option("--report", fit_report, "Report JSON (default: <output>.report.json)");
  fitc->add_flag("--no-normalize", fit_raw, "Fit the input as is");
  fit_opt.add(fitc);
  fit_seed.add(fitc);

  // tau-sweep
  auto* sweep = app.add_subcommand("tau-sweep", "Fit tau = 0.5, then warm-start the other taus from it");
  std::string sw_input, sw_dir;
  bool sw_header = false, sw_raw = false, sw_no_orient = false;
  std::vector<double> sw_taus{0.1, 0.5, 0.9};
  Index sw_rank = 1;
  int sw_restarts = 1;
  std::optional<Index> sw_pivot;
  OptimizerFlags sw_opt;
  SeedFlags sw_seed;
  sweep->add_option("--input", sw_input, "Matrix CSV")->required();
  sweep->add_flag("--header", sw_header, "Input has a header row");
  sweep->add_option("--taus", sw_taus, "Comma-separated taus")->delimiter(',')->capture_default_str();
  sweep->add_option("--rank", sw_rank, "Rank k")->capture_default_str();
  sweep->add_option("--restarts", sw_restarts, "Restarts of the tau = 0.5 anchor")->capture_default_str();
  sweep->add_option("--orient-pivot", sw_pivot, "Orientation row (rank 1; default 72 when it exists)");
  sweep->add_flag("--no-orient", sw_no_orient, "Skip rank-1 orientation");
  sweep->add_flag("--no-normalize", sw_raw, "Fit the input as is");
  sweep->add_option("--output-dir", sw_dir, "Directory for models and summary.csv")->required();
  sw_opt.add(sweep);
  sw_seed.add(sweep);

  // bench
  auto* bench = app.add_subcommand("bench", "Simulation studies");
  bench->require_subcommand(1);

  auto* cmp = bench->add_subcommand("compare-algos", "Compare BFGS, L-BFGS and CG over shared initializations");
  SimulationFlags cmp_sim;
  SeedFlags cmp_seed;
  OptimizerFlags cmp_opt;
  int cmp_datasets = 10, cmp_inits = 10;
  double cmp_tau = 0.2;
  Index cmp_rank = 3;
  std::vector<std::string> cmp_algos{"bfgs", "lbfgs", "cg"};
  std::string cmp_dir;
  cmp_sim.add(cmp);
  cmp_seed.add(cmp);
  cmp_opt.add(cmp, false);
  cmp->add_option("--datasets", cmp_datasets, "Simulated datasets")->capture_default_str();
  cmp->add_option("--inits", cmp_inits, "Initializations per dataset")->capture_default_str();
  cmp->add_option("--tau", cmp_tau, "Expectile level")->capture_default_str();
  cmp->add_option("--rank", cmp_rank, "Rank k")->capture_default_str();
  cmp->add_option("--algorithms", cmp_algos, "Algorithms")->delimiter(',')->capture_default_str();
  cmp->add_option("--output-dir", cmp_dir, "Output directory")->required();

  auto* res = bench->add_subcommand("resilience", "Pairwise comparison of randomly initialized fits");
  SimulationFlags res_sim;
  SeedFlags res_seed;
  OptimizerFlags res_opt;
  std::string res_input, res_dir;
  bool res_header = false;
  int res_trials = 10;
  double res_tau = 0.2;
  Index res_rank = 3;
  res_sim.add(res);
  res_seed.add(res);
  res_opt.add(res);
  res->add_option("--input", res_input, "Matrix CSV (default: simulate one)");
  res->add_flag("--header", res_header, "Input has a header row");
  res->add_option("--trials", res_trials, "Number of fits")->capture_default_str();
  res->add_option("--tau", res_tau, "Expectile level")->capture_default_str();
  res->add_option("--rank", res_rank, "Rank k")->capture_default_str();
  res->add_option("--output-dir", res_dir, "Output directory")->required();

  auto* rsw = bench->add_subcommand("rank-sweep", "Loss, iterations and time across ranks");
  SimulationFlags rsw_sim;
  SeedFlags rsw_seed;
  OptimizerFlags rsw_opt;
  std::vector<Index> rsw_ranks{1, 2, 3, 4};
  std::vector<double> rsw_taus{0.1};
  std::vector<std::string> rsw_algos{"lbfgs", "cg"};
  int rsw_trials = 10;
  std::string rsw_dir;
  rsw_sim.add(rsw);
  rsw_seed.add(rsw);
  rsw_opt.add(rsw, false);
  rsw->add_option("--ranks", rsw_ranks, "Ranks")->delimiter(',')->capture_default_str();
  rsw->add_option("--tau,--taus", rsw_taus, "Expectile levels")->delimiter(',')->capture_default_str();
  rsw->add_option("--algorithms", rsw_algos, "Algorithms")->delimiter(',')->capture_default_str();
  rsw->add_option("--trials", rsw_trials, "Simulated datasets")->capture_default_str();
  rsw->add_option("--output-dir", rsw_dir, "Output directory")->required();

  // expectiles
  auto* exc = app.add_subcommand("expectiles", "Per-row marginal expectiles");
  std::string ex_input, ex_output;
  bool ex_header = false;
  std::vector<double> ex_taus{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  exc->add_option("--input", ex_input, "Matrix CSV")->required();
  exc->add_flag("--header", ex_header, "Input has a header row");
  exc->add_option("--taus", ex_taus, "Expectile levels")->delimiter(',')->capture_default_str();
  exc->add_option("--output", ex_output, "CSV of row_index,tau,expectile")->required();

  // icc
  auto* iccc = app.add_subcommand("icc", "Intraclass correlation");
  std::string icc_input, icc_model, icc_labels, icc_output;
  iccc->add_option("--input", icc_input, "CSV with group_id,value");
  iccc->add_option("--model", icc_model, "Model JSON (ICC of C and each V column by person)");
  iccc->add_option("--labels", icc_labels, "Column labels CSV written by ingest");
  iccc->add_option("--output", icc_output, "JSON result")->required();

  // ingest
  auto* ing = app.add_subcommand("ingest", "Bin heart-rate records into a segments x person-days matrix");
  std::string ing_input, ing_output, ing_labels, ing_binned;
  double ing_max_missing = 0.7;
  bool ing_kaggle = false;
  IngestOptions ing_opts;
  ing->add_option("--input", ing_input, "Records CSV")->required();
  ing->add_option("--output", ing_output, "Filtered matrix CSV")->required();
  ing->add_option("--labels", ing_labels, "Labels CSV for the kept columns")->required();
  ing->add_option("--binned", ing_binned, "Also write the unfiltered matrix here");
  ing->add_option("--max-missing", ing_max_missing, "Drop columns missing more than this fraction")
      ->capture_default_str();
  ing->add_flag("--kaggle", ing_kaggle, "Fitbit export layout (Id, Time, Value; M/D/YYYY h:mm:ss AM)");
  ing->add_option("--person-column", ing_opts.person_column, "Person id column")->capture_default_str();
  ing->add_option("--timestamp-column", ing_opts.timestamp_column, "Timestamp column")->capture_default_str();
  ing->add_option("--bpm-column", ing_opts.bpm_column, "Heart rate column")->capture_default_str();

  // band-curves
  auto* band = app.add_subcommand("band-curves", "Lower, center and upper curves of a rank-1 model");
  std::string band_model, band_output;
  band->add_option("--model", band_model, "Model JSON")->required();
  band->add_option("--output", band_output, "Tidy CSV (segment, series, value)")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Loss of a saved model on a matrix");
  std::string ev_input, ev_model, ev_output;
  bool ev_header = false;
  eval->add_option("--input", ev_input, "Matrix CSV on the original scale")->required();
  eval->add_flag("--header", ev_header, "Input has a header row");
  eval->add_option("--model", ev_model, "Model JSON")->required();
  eval->add_option("--output", ev_output, "JSON result")->required();

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string replay_path;
  replay->add_option("manifest", replay_path, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  // The command actually executed: --entropy is replaced by the seed it drew.
  std::vector<std::string> resolved = args;
  auto resolve_seed = [&](SeedFlags& flags) {
    if (!flags.entropy) return;
    std::random_device rd;
    flags.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    resolved.erase(std::remove(resolved.begin(), resolved.end(), "--entropy"), resolved.end());
    resolved.push_back("--seed");
    resolved.push_back(std::to_string(flags.seed));
  };

  const auto start = std::chrono::steady_clock::now();
  Run run;
  try {
    if (*sim) {
      resolve_seed(sim_seed);
      run.subcommand = "simulate";
      SimulationSpec spec = sim_flags.spec;
      spec.seed = sim_seed.seed;
      run.seed = spec.seed;
      const SimulatedData data = generate(spec);
      const fs::path truth = sim_truth.empty() ? sibling(sim_out, ".truth.json") : fs::path(sim_truth);
      write_matrix_csv(fs::path(sim_out), data.x, sim_header);
      Json t;
      t["spec"] = spec_json(spec);
      t["observed_fraction"] =
          static_cast<double>(data.x.observed_count()) / static_cast<double>(data.x.rows() * data.x.cols());
      t["sigma_new"] = normalized_noise_std(data);
      t["r"] = vec_json(data.true_r);
      t["c"] = vec_json(data.true_c);
      t["u"] = mat_json(data.true_u);
      t["v"] = mat_json(data.true_v);
      write_json(truth, t);
      run.config = spec_json(spec);
      run.outputs = {sim_out, truth.string()};
      run.manifest = sibling(sim_out, ".manifest.json");
    } else if (*fitc) {
      resolve_seed(fit_seed);
      run.subcommand = "fit";
      const NormalizedMatrix data = load_for_fit(fit_input, fit_header, !fit_raw, run);
      FitConfig config;
      config.tau = Tau(fit_tau);
      config.rank = fit_rank;
      config.opts = fit_opt.options();
      config.n_restarts = fit_restarts;
      config.seed = fit_seed.seed;
      config.threads = threads;
      config.orient_pivot = resolve_pivot(fit_pivot, fit_no_orient, fit_rank, data.matrix.rows());
      if (!fit_warm.empty()) {
        run.inputs.push_back(fit_warm);
        config.warm_start = load_model(fs::path(fit_warm)).model;
      }
      run.seed = config.seed;
      const FitReport report = fit(data.matrix, data.info.row_means, data.info.col_means, config);
      for (const auto& w : report.warnings) err << "warning: " << w << '\n';
      const fs::path report_path = fit_report.empty() ? sibling(fit_output, ".report.json") : fs::path(fit_report);
      save_model(fs::path(fit_output), SavedModel{report.model, config.tau, data.info});
      write_json(report_path, fit_report_json(report, config, data.info));
      out << "final_loss " << format_real(report.final_loss) << " (" << to_string(report.status) << ")\n";
      run.config = {{"tau", fit_tau},
                    {"rank", fit_rank},
                    {"restarts", fit_restarts},
                    {"normalize", !fit_raw},
                    {"orient_pivot", config.orient_pivot ? Json(*config.orient_pivot) : Json(nullptr)},
                    {"optimizer", fit_opt.json()}};
      run.outputs = {fit_output, report_path.string()};
      run.manifest = sibling(fit_output, ".manifest.json");
    } else if (*sweep) {
      resolve_seed(sw_seed);
      run.subcommand = "tau-sweep";
      const NormalizedMatrix data = load_for_fit(sw_input, sw_header, !sw_raw, run);
      FitConfig config;
      config.rank = sw_rank;
      config.opts = sw_opt.options();
      config.n_restarts = sw_restarts;
      config.seed = sw_seed.seed;
      config.threads = threads;
      config.orient_pivot = resolve_pivot(sw_pivot, sw_no_orient, sw_rank, data.matrix.rows());
      run.seed = config.seed;
      const std::vector<Tau> taus = to_taus(sw_taus);
      const auto reports = tau_sweep(data.matrix, data.info.row_means, data.info.col_means, config, taus);
      const fs::path dir(sw_dir);
      ensure_dir(dir);
      Table summary({{"tau", ColumnType::Real},
                     {"final_loss", ColumnType::Real},
                     {"loss_times_variance", ColumnType::Real},
                     {"rmse", ColumnType::Real},
                     {"iterations", ColumnType::Integer},
                     {"function_evals", ColumnType::Integer},
                     {"elapsed_seconds", ColumnType::Real},
                     {"status", ColumnType::Text},
                     {"model", ColumnType::Text}});
      for (std::size_t i = 0; i < taus.size(); ++i) {
        const FitReport& r = reports[i];
        for (const auto& w : r.warnings) err << "warning (tau " << tau_label(taus[i].value()) << "): " << w << '\n';
        const std::string name = "model_tau" + tau_label(taus[i].value()) + ".json";
        save_model(dir / name, SavedModel{r.model, taus[i], data.info});
        run.outputs.push_back((dir / name).string());
        const double var = data.info.std * data.info.std;
        summary.add_row({taus[i].value(), r.final_loss, r.final_loss * var, rmse_from_loss(r.final_loss, data.info.std),
                         std::int64_t{r.iterations}, std::int64_t{r.function_evals}, r.elapsed_seconds,
                         std::string(to_string(r.status)), name});
      }
      write_table(dir / "summary.csv", summary);
      run.outputs.push_back((dir / "summary.csv").string());
      run.config = {{"taus", sw_taus},
                    {"rank", sw_rank},
                    {"restarts", sw_restarts},
                    {"normalize", !sw_raw},
                    {"orient_pivot", config.orient_pivot ? Json(*config.orient_pivot) : Json(nullptr)},
                    {"optimizer", sw_opt.json()}};
      run.manifest = dir / "manifest.json";
    } else if (*cmp) {
      resolve_seed(cmp_seed);
      run.subcommand = "bench compare-algos";
      SimulationSpec spec = cmp_sim.spec;
      spec.seed = cmp_seed.seed;
      run.seed = spec.seed;
      StudyOptions study;
      study.opts = cmp_opt.options();
      study.algorithms = parse_algorithms(cmp_algos);
      study.threads = threads;
      const AlgorithmComparison result =
          compare_algorithms(spec, cmp_datasets, cmp_inits, Tau(cmp_tau), cmp_rank, study);
      const fs::path dir(cmp_dir);
      ensure_dir(dir);
      write_table(dir / "datasets.csv", comparison_datasets_table(result));
      write_table(dir / "summary.csv", comparison_summary_table(result));
      Json s;
      s["max_loss_spread"] = result.max_loss_spread;
      for (const auto& t : result.summary)
        s["algorithms"].push_back({{"algorithm", std::string(to_string(t.algorithm))},
                                   {"min_loss_wins", t.min_loss_wins},
                                   {"min_time_wins", t.min_time_wins},
                                   {"mean_loss_gap", t.mean_loss_gap},
                                   {"mean_seconds", t.mean_seconds}});
      write_json(dir / "summary.json", s);
      write_table_csv(out, comparison_summary_table(result));
      run.config = {{"simulation", spec_json(spec)}, {"datasets", cmp_datasets}, {"inits", cmp_inits},
                    {"tau", cmp_tau}, {"rank", cmp_rank}, {"algorithms", cmp_algos}, {"optimizer", cmp_opt.json()}};
      run.outputs = {(dir / "datasets.csv").string(), (dir / "summary.csv").string(),
                     (dir / "summary.json").string()};
      run.manifest = dir / "manifest.json";
    } else if (*res) {
      resolve_seed(res_seed);
      run.subcommand = "bench resilience";
      NormalizedMatrix data;
      SimulationSpec spec = res_sim.spec;
      spec.seed = res_seed.seed;
      if (!res_input.empty()) {
        data = load_for_fit(res_input, res_header, true, run);
      } else {
        data = normalize(generate(spec).x);
      }
      FitConfig config;
      config.tau = Tau(res_tau);
      config.rank = res_rank;
      config.opts = res_opt.options();
      config.seed = res_seed.seed;
      config.threads = threads;
      run.seed = config.seed;
      const PairStudyResult result =
          init_resilience(data.matrix, data.info.row_means, data.info.col_means, config, res_trials);
      const fs::path dir(res_dir);
      ensure_dir(dir);
      write_table(dir / "pairs.csv", pair_table(result));
      const auto diffs = result.pair_loss_diffs();
      const auto mads = result.pair_mads();
      Json s;
      s["pairs"] = diffs.size();
      s["max_loss_diff"] = *std::max_element(diffs.begin(), diffs.end());
      s["max_mad"] = *std::max_element(mads.begin(), mads.end());
      s["losses"] = result.losses;
      write_json(dir / "summary.json", s);
      out << "max_loss_diff " << format_real(s["max_loss_diff"].get<double>()) << "\nmax_mad "
          << format_real(s["max_mad"].get<double>()) << '\n';
      run.config = {{"trials", res_trials}, {"tau", res_tau}, {"rank", res_rank}, {"optimizer", res_opt.json()}};
      if (res_input.empty()) run.config["simulation"] = spec_json(spec);
      run.outputs = {(dir / "pairs.csv").string(), (dir / "summary.json").string()};
      run.manifest = dir / "manifest.json";
    } else if (*rsw) {
      resolve_seed(rsw_seed);
      run.subcommand = "bench rank-sweep";
      SimulationSpec spec = rsw_sim.spec;
      spec.seed = rsw_seed.seed;
      run.seed = spec.seed;
      StudyOptions study;
      study.opts = rsw_opt.options();
      study.algorithms = parse_algorithms(rsw_algos);
      study.threads = threads;
      const RankSweepResult result = rank_sweep(spec, to_taus(rsw_taus), rsw_ranks, rsw_trials, study);
      const fs::path dir(rsw_dir);
      ensure_dir(dir);
      write_table(dir / "rank_sweep.csv", rank_sweep_table(result));
      write_table(dir / "trials.csv", rank_sweep_trials_table(result));
      Json s = Json::array();
      for (const auto& row : result.rows)
        s.push_back({{"tau", row.tau},
                     {"rank", row.rank},
                     {"algorithm", std::string(to_string(row.algorithm))},
                     {"mean_loss", row.mean_loss},
                     {"mean_iterations", row.mean_iterations},
                     {"mean_seconds", row.mean_seconds}});
      write_json(dir / "summary.json", Json{{"rows", s}});
      write_table_csv(out, rank_sweep_table(result));
      run.config = {{"simulation", spec_json(spec)}, {"ranks", rsw_ranks},       {"taus", rsw_taus},
                    {"algorithms", rsw_algos},        {"trials", rsw_trials},     {"optimizer", rsw_opt.json()}};
      run.outputs = {(dir / "rank_sweep.csv").string(), (dir / "trials.csv").string(),
                     (dir / "summary.json").string()};
      run.manifest = dir / "manifest.json";
    } else if (*exc) {
      run.subcommand = "expectiles";
      run.inputs.push_back(ex_input);
      const MaskedMatrix x = read_matrix_csv(fs::path(ex_input), ex_header);
      const std::vector<Tau> taus = to_taus(ex_taus);
      const Matrix curves = marginal_expectile_curves(x, taus);
      Table table({{"row_index", ColumnType::Integer}, {"tau", ColumnType::Real}, {"expectile", ColumnType::Real}});
      for (std::size_t t = 0; t < taus.size(); ++t)
        for (Index i = 0; i < curves.rows(); ++i)
          table.add_row({std::int64_t{i}, taus[t].value(), curves(i, static_cast<Index>(t))});
      write_table(fs::path(ex_output), table);
      run.config = {{"taus", ex_taus}};
      run.outputs = {ex_output};
      run.manifest = sibling(ex_output, ".manifest.json");
    } else if (*iccc) {
      run.subcommand = "icc";
      Json result;
      if (!icc_input.empty()) {
        if (!icc_model.empty()) fail(ErrorCode::InvalidArgument, "give either --input or --model, not both");
        run.inputs.push_back(icc_input);
        const Table t = read_table(fs::path(icc_input), {{"group_id", ColumnType::Text}, {"value", ColumnType::Real}});
        std::vector<std::string> groups;
        GroupedSeries series;
        for (std::size_t i = 0; i < t.size(); ++i) {
          groups.push_back(t.text(i, "group_id"));
          series.values.push_back(t.real(i, "value"));
        }
        series.group_ids = group_ids_from_labels(groups);
        result["icc"] = icc(series);
        out << "icc " << format_real(result["icc"].get<double>()) << '\n';
      } else {
        if (icc_model.empty() || icc_labels.empty())
          fail(ErrorCode::InvalidArgument, "icc needs --input, or --model with --labels");
        run.inputs = {icc_model, icc_labels};
        const SavedModel saved = load_model(fs::path(icc_model));
        const auto labels = labels_from_table(read_table(fs::path(icc_labels), kLabelColumns));
        if (static_cast<Index>(labels.size()) != saved.model.cols())
          fail(ErrorCode::DimensionMismatch, "labels do not match the model's columns");
        std::vector<std::string> persons;
        for (const auto& l : labels) persons.push_back(l.person_id);
        GroupedSeries series;
        series.group_ids = group_ids_from_labels(persons);
        series.values.assign(saved.model.c.data(), saved.model.c.data() + saved.model.c.size());
        result["icc_c"] = icc(series);
        result["icc_v"] = Json::array();
        for (Index l = 0; l < saved.model.rank(); ++l) {
          const Vector col = saved.model.v.col(l);
          series.values.assign(col.data(), col.data() + col.size());
          result["icc_v"].push_back(icc(series));
        }
        out << result.dump() << '\n';
      }
      write_json(fs::path(icc_output), result);
      run.outputs = {icc_output};
      run.manifest = sibling(icc_output, ".manifest.json");
    } else if (*ing) {
      run.subcommand = "ingest";
      run.inputs.push_back(ing_input);
      IngestOptions opts = ing_kaggle ? kaggle_ingest_options() : ing_opts;
      if (ing_kaggle) {
        if (ing->count("--person-column")) opts.person_column = ing_opts.person_column;
        if (ing->count("--timestamp-column")) opts.timestamp_column = ing_opts.timestamp_column;
        if (ing->count("--bpm-column")) opts.bpm_column = ing_opts.bpm_column;
      }
      std::ifstream in(ing_input, std::ios::binary);
      if (!in) fail(ErrorCode::Io, "cannot open " + ing_input);
      const auto records = read_records(in, opts);
      const PersonDayMatrix pdm = bin_records(records);
      const ColumnSelection sel = drop_sparse_columns(pdm.matrix, ing_max_missing);
      std::vector<PersonDay> kept;
      for (Index j : sel.kept) kept.push_back(pdm.labels[static_cast<std::size_t>(j)]);
      write_matrix_csv(fs::path(ing_output), sel.matrix);
      write_table(fs::path(ing_labels), labels_table(kept));
      run.outputs = {ing_output, ing_labels};
      if (!ing_binned.empty()) {
        write_matrix_csv(fs::path(ing_binned), pdm.matrix);
        run.outputs.push_back(ing_binned);
      }
      out << "records " << records.size() << "\nperson_days " << pdm.labels.size() << "\nkept " << kept.size()
          << '\n';
      run.config = {{"max_missing", ing_max_missing},
                    {"person_column", opts.person_column},
                    {"timestamp_column", opts.timestamp_column},
                    {"bpm_column", opts.bpm_column},
                    {"timestamp_format", opts.format == TimestampFormat::Iso ? "iso" : "us-12h"},
                    {"records", records.size()},
                    {"person_days", pdm.labels.size()},
                    {"kept", kept.size()}};
      run.manifest = sibling(ing_output, ".manifest.json");
    } else if (*band) {
      run.subcommand = "band-curves";
      run.inputs.push_back(band_model);
      const SavedModel saved = load_model(fs::path(band_model));
      const BandCurves curves = band_curves(saved.model, saved.info);
      write_table(fs::path(band_output), band_curves_table(curves));
      run.config = {{"v_std", curves.v_std}};
      run.outputs = {band_output};
      run.manifest = sibling(band_output, ".manifest.json");
    } else if (*eval) {
      run.subcommand = "evaluate";
      run.inputs = {ev_input, ev_model};
      const SavedModel saved = load_model(fs::path(ev_model));
      const MaskedMatrix x = read_matrix_csv(fs::path(ev_input), ev_header);
      const MaskedMatrix xn = x.with_values((x.values().array() - saved.info.mean) / saved.info.std);
      saved.model.check_shape(xn);
      const double loss = loss_value(saved.model, xn, saved.tau);
      write_json(fs::path(ev_output), Json{{"loss", loss}, {"tau", saved.tau.value()}});
      out << "loss " << format_real(loss) << '\n';
      run.outputs = {ev_output};
      run.manifest = sibling(ev_output, ".manifest.json");
    } else if (*replay) {
      const Json manifest = read_json(fs::path(replay_path));
      std::vector<std::string> recorded = manifest.at("args").get<std::vector<std::string>>();
      if (!recorded.empty() && recorded.front() == "replay")
        fail(ErrorCode::InvalidArgument, "a replay manifest cannot be replayed");
      return lrexp::cli::run(recorded, out, err);
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json manifest;
  manifest["tool"] = "lrexp";
  manifest["version"] = LREXP_VERSION;
  manifest["subcommand"] = run.subcommand;
  manifest["args"] = resolved;
  manifest["seed"] = run.seed ? Json(std::to_string(*run.seed)) : Json(nullptr);
  manifest["config"] = run.config;
  manifest["inputs"] = run.inputs;
  manifest["outputs"] = run.outputs;
  manifest["wall_seconds"] = wall;
  try {
    write_json(manifest_flag.empty() ? run.manifest : fs::path(manifest_flag), manifest);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace lrexp::cli
