// srrr: sparse reduced-rank regression via alternating minimization.
//
// Subcommands: simulate, fit, benchmark, montecarlo. Every run writes its
// resolved parameters to manifest.json next to the outputs. All data outputs
// are byte-reproducible for fixed flags and seeds; wall-time fields are
// zeroed unless timing is requested, because measured time is the one thing
// a re-run cannot reproduce.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "srrr/baseline.hpp"
#include "srrr/errors.hpp"
#include "srrr/evalsim.hpp"
#include "srrr/io.hpp"
#include "srrr/model.hpp"
#include "srrr/solver.hpp"
#include "srrr/version.hpp"

namespace fs = std::filesystem;
using srrr::io::json;

namespace {

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ManifestWriter {
  std::string command;
  json parameters = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string started_at = iso_timestamp();

  void write(const fs::path& dir) const {
    json j;
    j["command"] = command;
    j["version"] = srrr::kVersion;
    j["parameters"] = parameters;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["started_at"] = started_at;
    j["finished_at"] = iso_timestamp();
    srrr::io::write_json(dir / "manifest.json", j);
  }
};

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// shared fit/penalty flag bundle

struct PenaltyFlags {
  std::string penalty = "none";
  double theta = 0.05;
  double lambda = 1.0;
};

struct FitFlags {
  std::string x_path, y_path, data_path;
  int rank = 1;
  PenaltyFlags pen;
  std::vector<double> xi;
  double tol = 1e-8;
  int max_iter = 1000;
  double psi_safeguard = 1.0 + 1e-10;
  std::string method = "altmin-mm";
  int inner_iters = 50;
  double step_c = 0.0;
  double inner_tol = 0.0;
  bool center = false;
  std::uint64_t seed = 0;
  bool timing = false;
  bool verbose = false;
  std::string out = "out";
};

void add_dataset_flags(CLI::App* cmd, FitFlags& f) {
  auto* x = cmd->add_option("--x", f.x_path, "predictor matrix CSV (Q x N)");
  auto* y = cmd->add_option("--y", f.y_path, "response matrix CSV (P x N)");
  auto* d = cmd->add_option("--data", f.data_path, "dataset JSON with \"X\" and \"Y\"");
  x->needs(y);
  y->needs(x);
  d->excludes(x);
}

void add_model_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--rank", f.rank, "factor rank r")->required();
  cmd->add_option("--penalty", f.pen.penalty, "row-sparsity penalty")
      ->check(CLI::IsMember({"none", "l1", "geman"}));
  cmd->add_option("--theta", f.pen.theta, "Geman parameter theta > 0");
  cmd->add_option("--lambda", f.pen.lambda, "global penalty scale >= 0");
  cmd->add_option("--xi", f.xi, "per-predictor row weights (default all ones)")->delimiter(',');
  cmd->add_option("--tol", f.tol, "relative objective-decrease stopping tolerance");
  cmd->add_option("--max-iter", f.max_iter, "outer iteration cap");
  cmd->add_option("--psi-safeguard", f.psi_safeguard, "multiplier on lambda_max(X X')");
  cmd->add_flag("--center", f.center, "subtract the mean of every variable first");
  cmd->add_option("--seed", f.seed, "seed for deterministic perturbations");
}

void add_subgrad_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--inner-iters", f.inner_iters, "subgradient steps per outer iteration");
  cmd->add_option("--step-c", f.step_c, "subgradient step scale (<= 0: 1/lambda_max(X X'))");
  cmd->add_option("--inner-tol", f.inner_tol, "early stop for the inner subgradient loop");
}

srrr::Dataset load_dataset(const FitFlags& f, ManifestWriter& manifest) {
  std::optional<srrr::Dataset> d;
  if (!f.data_path.empty()) {
    manifest.inputs.push_back(f.data_path);
    d = srrr::io::read_dataset_json(f.data_path);
  } else if (!f.x_path.empty()) {
    manifest.inputs.push_back(f.x_path);
    manifest.inputs.push_back(f.y_path);
    d = srrr::Dataset(srrr::io::read_matrix_csv(f.x_path), srrr::io::read_matrix_csv(f.y_path));
  } else {
    throw CLI::ValidationError("fit", "need either --x/--y or --data");
  }
  return f.center ? srrr::centered(*d) : std::move(*d);
}

srrr::SrrrConfig make_config(const FitFlags& f) {
  srrr::SrrrConfig cfg;
  cfg.rank = f.rank;
  cfg.penalty.kind = srrr::penalty_kind_from_name(f.pen.penalty);
  cfg.penalty.theta = f.pen.theta;
  cfg.penalty.lambda = f.pen.lambda;
  if (!f.xi.empty()) cfg.xi = Eigen::Map<const srrr::Vec>(f.xi.data(), static_cast<srrr::Index>(f.xi.size()));
  cfg.tol = f.tol;
  cfg.max_iter = f.max_iter;
  cfg.psi_safeguard = f.psi_safeguard;
  return cfg;
}

json penalty_params_json(const FitFlags& f) {
  json j;
  j["penalty"] = f.pen.penalty;
  if (f.pen.penalty == "geman") j["theta"] = f.pen.theta;
  j["lambda"] = f.pen.lambda;
  return j;
}

void log_trace(const srrr::FitResult& r) {
  for (const srrr::TraceEntry& e : r.trace)
    std::cerr << "iter " << e.iter << "  F=" << srrr::io::format_double(e.objective) << "\n";
  std::cerr << r.method << ": " << srrr::fit_status_name(r.status) << " after " << r.iters()
            << " iterations, F=" << srrr::io::format_double(r.final_objective()) << "\n";
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateFlags {
  srrr::GenSpec spec;
  std::string out = "out";
};

int run_simulate(const SimulateFlags& f) {
  ManifestWriter manifest;
  manifest.command = "simulate";
  manifest.parameters = {{"P", f.spec.P},
                         {"Q", f.spec.Q},
                         {"r", f.spec.r},
                         {"N", f.spec.N},
                         {"sparse_rows", f.spec.sparse_rows},
                         {"noise_sigma", f.spec.noise_sigma},
                         {"seed", f.spec.seed}};

  const srrr::GroundTruth gt = srrr::generate(f.spec);
  const fs::path dir = ensure_out_dir(f.out);

  srrr::io::write_matrix_csv(dir / "X.csv", gt.data.X);
  srrr::io::write_matrix_csv(dir / "Y.csv", gt.data.Y);

  json truth;
  truth["spec"] = manifest.parameters;
  truth["A_true"] = srrr::io::matrix_to_json(gt.A_true);
  truth["B_true"] = srrr::io::matrix_to_json(gt.B_true);
  srrr::io::write_json(dir / "truth.json", truth);

  manifest.outputs = {"X.csv", "Y.csv", "truth.json"};
  manifest.write(dir);
  return 0;
}

// ---------------------------------------------------------------------------
// fit

int run_fit(const FitFlags& f) {
  ManifestWriter manifest;
  manifest.command = "fit";

  const srrr::Dataset d = load_dataset(f, manifest);
  const srrr::SrrrConfig cfg = make_config(f);

  manifest.parameters = penalty_params_json(f);
  manifest.parameters["rank"] = f.rank;
  manifest.parameters["tol"] = f.tol;
  manifest.parameters["max_iter"] = f.max_iter;
  manifest.parameters["method"] = f.method;
  manifest.parameters["center"] = f.center;
  manifest.parameters["seed"] = f.seed;
  manifest.parameters["timing"] = f.timing;

  srrr::FitResult result;
  if (f.method == "altmin-mm") {
    result = srrr::fit(d, cfg, std::nullopt, f.seed);
  } else {
    srrr::SubGradConfig sg;
    sg.inner_iters = f.inner_iters;
    sg.step_c = f.step_c;
    sg.inner_tol = f.inner_tol;
    manifest.parameters["inner_iters"] = f.inner_iters;
    manifest.parameters["step_c"] = f.step_c;
    manifest.parameters["inner_tol"] = f.inner_tol;
    result = srrr::fit_subgrad(d, cfg, sg, std::nullopt, f.seed);
  }
  if (f.verbose) log_trace(result);

  const fs::path dir = ensure_out_dir(f.out);
  srrr::io::write_fit_result_json(dir / "result.json", result, f.timing);
  srrr::io::write_trace_csv(dir / "trace.csv", result.trace, f.timing);
  manifest.outputs = {"result.json", "trace.csv"};
  manifest.write(dir);
  return 0;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkFlags {
  FitFlags fit;
  std::vector<std::string> methods{"altmin-mm", "altmin-subgrad"};
  double time_budget = 0.0;
  bool no_timing = false;
};

int run_benchmark(const BenchmarkFlags& bf) {
  if (!(bf.time_budget > 0.0))
    throw CLI::ValidationError("benchmark", "--time-budget must be positive");

  ManifestWriter manifest;
  manifest.command = "benchmark";

  const srrr::Dataset d = load_dataset(bf.fit, manifest);
  const srrr::SrrrConfig cfg = make_config(bf.fit);

  manifest.parameters = penalty_params_json(bf.fit);
  manifest.parameters["rank"] = bf.fit.rank;
  manifest.parameters["methods"] = bf.methods;
  manifest.parameters["time_budget"] = bf.time_budget;
  manifest.parameters["seed"] = bf.fit.seed;

  // one shared starting point so the traces are comparable
  const auto init = srrr::default_init(d, cfg.rank);
  const bool timing = !bf.no_timing;

  srrr::SubGradConfig sg;
  sg.inner_iters = bf.fit.inner_iters;
  sg.step_c = bf.fit.step_c;
  sg.inner_tol = bf.fit.inner_tol;

  const fs::path dir = ensure_out_dir(bf.fit.out);
  std::ofstream combined(dir / "combined.csv");
  if (!combined) throw std::runtime_error("cannot open for writing: combined.csv");
  combined << "method,iter,objective,seconds\n";

  for (const std::string& method : bf.methods) {
    srrr::FitResult result;
    if (method == "altmin-mm") {
      result = srrr::fit(d, cfg, init, bf.fit.seed, bf.time_budget);
    } else if (method == "altmin-subgrad") {
      result = srrr::fit_subgrad(d, cfg, sg, init, bf.fit.seed, bf.time_budget);
    } else {
      throw CLI::ValidationError("benchmark", "unknown method: " + method);
    }
    if (bf.fit.verbose) log_trace(result);

    srrr::io::write_fit_result_json(dir / ("result_" + method + ".json"), result, timing);
    srrr::io::write_trace_csv(dir / ("trace_" + method + ".csv"), result.trace, timing);
    for (const srrr::TraceEntry& e : result.trace)
      combined << method << "," << e.iter << "," << srrr::io::format_double(e.objective) << ","
               << srrr::io::format_double(timing ? e.seconds : 0.0) << "\n";

    manifest.outputs.push_back("result_" + method + ".json");
    manifest.outputs.push_back("trace_" + method + ".csv");
  }
  combined.close();
  manifest.outputs.push_back("combined.csv");
  manifest.write(dir);
  return 0;
}

// ---------------------------------------------------------------------------
// montecarlo

struct MonteCarloFlags {
  srrr::GenSpec spec;
  std::vector<std::string> arm_specs;
  std::string experiment_path;
  int trials = 0;
  std::uint64_t seed = 0;
  int threads = 0; // 0: SRRR_THREADS env or hardware concurrency
  bool timing = false;
  std::string out = "out";
};

srrr::Arm parse_arm_spec(const std::string& spec_str, const srrr::GenSpec& gen) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(spec_str);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("montecarlo", "--arm entries are key=value lists, got: " + item);
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }

  srrr::Arm arm;
  arm.cfg.rank = gen.r;
  if (kv.count("penalty"))
    arm.cfg.penalty.kind = srrr::penalty_kind_from_name(kv["penalty"]);
  if (kv.count("theta")) arm.cfg.penalty.theta = std::stod(kv["theta"]);
  if (kv.count("lambda")) arm.cfg.penalty.lambda = std::stod(kv["lambda"]);
  if (kv.count("rank")) arm.cfg.rank = std::stol(kv["rank"]);
  if (kv.count("tol")) arm.cfg.tol = std::stod(kv["tol"]);
  if (kv.count("max_iter")) arm.cfg.max_iter = std::stoi(kv["max_iter"]);
  arm.name = kv.count("name") ? kv["name"] : std::string(srrr::penalty_name(arm.cfg.penalty.kind));
  return arm;
}

srrr::Arm arm_from_json(const json& j, const srrr::GenSpec& gen) {
  srrr::Arm arm;
  arm.cfg.rank = j.value("rank", gen.r);
  arm.cfg.penalty.kind = srrr::penalty_kind_from_name(j.value("penalty", std::string("none")));
  arm.cfg.penalty.theta = j.value("theta", 0.05);
  arm.cfg.penalty.lambda = j.value("lambda", 1.0);
  arm.cfg.tol = j.value("tol", 1e-8);
  arm.cfg.max_iter = j.value("max_iter", 1000);
  arm.name = j.value("name", std::string(srrr::penalty_name(arm.cfg.penalty.kind)));
  return arm;
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("SRRR_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

int run_montecarlo(MonteCarloFlags f, const CLI::App* cmd) {
  ManifestWriter manifest;
  manifest.command = "montecarlo";

  std::vector<srrr::Arm> arms;
  if (!f.experiment_path.empty()) {
    manifest.inputs.push_back(f.experiment_path);
    const json exp = srrr::io::read_json(f.experiment_path);
    if (exp.contains("spec")) {
      const json& s = exp["spec"];
      f.spec.P = s.value("P", f.spec.P);
      f.spec.Q = s.value("Q", f.spec.Q);
      f.spec.r = s.value("r", f.spec.r);
      f.spec.N = s.value("N", f.spec.N);
      f.spec.sparse_rows = s.value("sparse_rows", f.spec.sparse_rows);
      f.spec.noise_sigma = s.value("noise_sigma", f.spec.noise_sigma);
    }
    if (!cmd->count("--trials")) f.trials = exp.value("trials", f.trials);
    if (!cmd->count("--seed")) f.seed = exp.value("seed", f.seed);
    if (!exp.contains("arms") || !exp["arms"].is_array() || exp["arms"].empty())
      throw CLI::ValidationError("montecarlo", "experiment file has no arms");
    for (const json& a : exp["arms"]) arms.push_back(arm_from_json(a, f.spec));
  }
  for (const std::string& s : f.arm_specs) arms.push_back(parse_arm_spec(s, f.spec));
  if (arms.empty())
    throw CLI::ValidationError("montecarlo", "need at least one --arm or an --experiment file");
  if (f.trials < 1) throw CLI::ValidationError("montecarlo", "--trials must be >= 1");

  const int threads = resolve_threads(f.threads);

  manifest.parameters = {{"P", f.spec.P},
                         {"Q", f.spec.Q},
                         {"r", f.spec.r},
                         {"N", f.spec.N},
                         {"sparse_rows", f.spec.sparse_rows},
                         {"noise_sigma", f.spec.noise_sigma},
                         {"trials", f.trials},
                         {"seed", f.seed},
                         {"threads", threads}};
  json arm_list = json::array();
  for (const srrr::Arm& a : arms) {
    json aj;
    aj["name"] = a.name;
    aj["penalty"] = srrr::penalty_name(a.cfg.penalty.kind);
    if (a.cfg.penalty.kind == srrr::PenaltyKind::Geman) aj["theta"] = a.cfg.penalty.theta;
    aj["lambda"] = a.cfg.penalty.lambda;
    aj["rank"] = a.cfg.rank;
    arm_list.push_back(std::move(aj));
  }
  manifest.parameters["arms"] = arm_list;

  const srrr::McTable table = srrr::monte_carlo(f.spec, arms, f.trials, f.seed, threads);

  const fs::path dir = ensure_out_dir(f.out);
  srrr::io::write_trials_csv(dir / "trials.csv", table, f.timing);

  json meta;
  meta["design"] = "paired"; // every arm sees the identical per-trial dataset
  meta["trials"] = f.trials;
  meta["seed"] = f.seed;
  srrr::io::write_json(dir / "summary.json",
                       srrr::io::summary_to_json(table, f.timing, meta));

  manifest.outputs = {"trials.csv", "summary.json"};
  manifest.write(dir);
  return 0;
}

const char* error_name(const std::exception& e) {
  if (dynamic_cast<const srrr::UnsupportedPenalty*>(&e)) return "unsupported-penalty";
  if (dynamic_cast<const srrr::RankDeficientError*>(&e)) return "rank-deficient";
  if (dynamic_cast<const srrr::DegenerateIterate*>(&e)) return "degenerate-iterate";
  if (dynamic_cast<const srrr::NumericalFailure*>(&e)) return "numerical-failure";
  if (dynamic_cast<const srrr::InvalidState*>(&e)) return "invalid-state";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid-argument";
  return "runtime-error";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse reduced-rank regression (alternating minimization)"};
  app.set_version_flag("--version", srrr::kVersion);
  app.require_subcommand(1);

  SimulateFlags sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "generate a synthetic dataset with ground truth");
  c_sim->add_option("--P", sim.spec.P, "response dimension");
  c_sim->add_option("--Q", sim.spec.Q, "predictor dimension");
  c_sim->add_option("--r", sim.spec.r, "true rank");
  c_sim->add_option("--N", sim.spec.N, "sample count");
  c_sim->add_option("--sparse-rows", sim.spec.sparse_rows, "nonzero rows of the true B");
  c_sim->add_option("--noise-sigma", sim.spec.noise_sigma, "innovation standard deviation");
  c_sim->add_option("--seed", sim.spec.seed, "generator seed");
  c_sim->add_option("--out", sim.out, "output directory");

  FitFlags fit;
  CLI::App* c_fit = app.add_subcommand("fit", "fit the model to a dataset");
  add_dataset_flags(c_fit, fit);
  add_model_flags(c_fit, fit);
  c_fit->add_option("--method", fit.method, "solver")
      ->check(CLI::IsMember({"altmin-mm", "altmin-subgrad"}));
  add_subgrad_flags(c_fit, fit);
  c_fit->add_flag("--timing", fit.timing, "record wall-clock seconds (breaks byte-reproducibility)");
  c_fit->add_flag("--verbose", fit.verbose, "log one line per iteration to stderr");
  c_fit->add_option("--out", fit.out, "output directory");

  BenchmarkFlags bench;
  CLI::App* c_bench = app.add_subcommand("benchmark", "run several methods on one dataset and initializer");
  add_dataset_flags(c_bench, bench.fit);
  add_model_flags(c_bench, bench.fit);
  add_subgrad_flags(c_bench, bench.fit);
  c_bench->add_option("--methods", bench.methods, "methods to compare")->delimiter(',');
  c_bench->add_option("--time-budget", bench.time_budget, "wall-time budget per method, seconds")
      ->required();
  c_bench->add_flag("--no-timing", bench.no_timing, "zero the seconds columns for byte-reproducible output");
  c_bench->add_flag("--verbose", bench.fit.verbose, "log one line per iteration to stderr");
  c_bench->add_option("--out", bench.fit.out, "output directory");

  MonteCarloFlags mc;
  CLI::App* c_mc = app.add_subcommand("montecarlo", "paired Monte-Carlo comparison of solver arms");
  c_mc->add_option("--P", mc.spec.P, "response dimension");
  c_mc->add_option("--Q", mc.spec.Q, "predictor dimension");
  c_mc->add_option("--r", mc.spec.r, "true rank");
  c_mc->add_option("--N", mc.spec.N, "sample count");
  c_mc->add_option("--sparse-rows", mc.spec.sparse_rows, "nonzero rows of the true B");
  c_mc->add_option("--noise-sigma", mc.spec.noise_sigma, "innovation standard deviation");
  c_mc->add_option("--arm", mc.arm_specs,
                   "inline arm, e.g. name=geman,penalty=geman,theta=0.05,lambda=0.1 (repeatable)");
  c_mc->add_option("--experiment", mc.experiment_path, "experiment JSON file");
  c_mc->add_option("--trials", mc.trials, "Monte-Carlo trial count M");
  c_mc->add_option("--seed", mc.seed, "base seed (trial m uses seed + m)");
  c_mc->add_option("--threads", mc.threads, "trial parallelism (default: SRRR_THREADS or all cores)");
  c_mc->add_flag("--timing", mc.timing, "record wall-clock seconds (breaks byte-reproducibility)");
  c_mc->add_option("--out", mc.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_fit->parsed()) return run_fit(fit);
    if (c_bench->parsed()) return run_benchmark(bench);
    if (c_mc->parsed()) return run_montecarlo(mc, c_mc);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const srrr::UnsupportedPenalty& e) {
    std::cerr << "unsupported-penalty: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid-argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_name(e) << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
