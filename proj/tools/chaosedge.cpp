// chaosedge: phase diagrams of x -> tanh(Wx) and the training experiments
// that track a network's hidden layer across the order/chaos boundary.
//
// Exit codes: 0 success, 1 compute error, 2 I/O or configuration error,
// 3 data-integrity error.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaosedge/data/checksums.hpp"
#include "chaosedge/data/dataset.hpp"
#include "chaosedge/dynamics/heatmap.hpp"
#include "chaosedge/experiments/experiments.hpp"
#include "chaosedge/io/format.hpp"
#include "chaosedge/model/network.hpp"
#include "chaosedge/numerics/kernels.hpp"
#include "chaosedge/numerics/quadrature.hpp"
#include "chaosedge/train/trainer.hpp"

#ifndef CHAOSEDGE_DEFAULT_MANIFEST
#define CHAOSEDGE_DEFAULT_MANIFEST ""
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chaosedge;

namespace {

enum ExitCode { kOk = 0, kCompute = 1, kConfig = 2, kIntegrity = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- config

// Every option is registered once: CLI11 parses flags, a JSON config file
// fills whatever the command line left unset, and the effective values are
// serialized back as config.json.
struct Setting {
  CLI::Option* option = nullptr;
  std::function<void(const json&)> load;
  std::function<json()> dump;
};

class Settings {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& target, const std::string& help) {
    auto* opt = app->add_option("--" + name, target, help)->capture_default_str();
    const std::string key = key_of(name);
    entries_[key] = {opt, [&target, key](const json& j) {
                       try {
                         target = j.get<T>();
                       } catch (const json::exception& e) {
                         throw ConfigError("config key '" + key + "': " + e.what());
                       }
                     },
                     [&target] { return json(target); }};
    return opt;
  }

  CLI::Option* add_flag(CLI::App* app, const std::string& name, bool& target, const std::string& help) {
    auto* opt = app->add_flag("--" + name, target, help);
    const std::string key = key_of(name);
    entries_[key] = {opt, [&target, key](const json& j) {
                       if (!j.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
                       target = j.get<bool>();
                     },
                     [&target] { return json(target); }};
    return opt;
  }

  /// Applies `config` to every option not given on the command line.
  /// Unknown keys are rejected before anything is assigned.
  void apply(const json& config) const {
    if (!config.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, _] : config.items()) {
      if (!entries_.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    for (const auto& [key, value] : config.items()) {
      const auto& e = entries_.at(key);
      if (e.option->count() == 0) e.load(value);
    }
  }

  json effective() const {
    json j = json::object();
    for (const auto& [key, e] : entries_) j[key] = e.dump();
    return j;
  }

 private:
  static std::string key_of(std::string name) {
    for (char& c : name) {
      if (c == '-') c = '_';
    }
    return name;
  }
  std::map<std::string, Setting> entries_;
};

// Options shared by all commands. Execution-only knobs (workers, output
// location, config path) are kept out of config.json so that artifacts do
// not depend on them.
struct Common {
  std::string config_path;
  std::string out = "out";
  std::string name = "default";
  std::uint64_t seed = 0;
  int workers = 0;
  bool print_config = false;
};

struct DataOptions {
  std::string data_dir;
  std::size_t subset = 0;       // 0: full training set
  std::size_t test_subset = 0;  // 0: full test set
};

struct TrainFlags {
  std::size_t epochs = 100;
  double eta = 0.01;
  double alpha = 0.0;
  std::size_t batch = 32;
  double lambda = 0.0;
  double init_j0 = 0.0;
  double init_j = 0.5;
  double out_std = -1.0;  // < 0: 1/sqrt(N)
  double stop_at_j2 = 0.0;
  std::size_t patience = 20;
  std::size_t step_stats = 0;
};

void add_common(CLI::App* app, Common& c, Settings& s) {
  app->add_option("--config", c.config_path, "JSON file with option values (flags win)");
  app->add_option("--out", c.out, "Output root; artifacts go to <out>/<command>/<name>/")->capture_default_str();
  app->add_option("--name", c.name, "Run directory name")->capture_default_str();
  app->add_option("--workers", c.workers, "Concurrent workers (<= 0: all available)")->capture_default_str();
  app->add_flag("--print-config", c.print_config, "Print the effective configuration and exit");
  s.add(app, "seed", c.seed, "Master seed");
}

void add_data(CLI::App* app, DataOptions& d, Settings& s) {
  s.add(app, "data-dir", d.data_dir, "Fashion-MNIST directory (fallback: $CHAOSEDGE_DATA_DIR)");
  s.add(app, "subset", d.subset, "Stratified training subset size (0 = all)");
  s.add(app, "test-subset", d.test_subset, "Stratified test subset size (0 = all)");
}

void add_train(CLI::App* app, TrainFlags& t, Settings& s) {
  s.add(app, "epochs", t.epochs, "Training epochs");
  s.add(app, "eta", t.eta, "Learning rate");
  s.add(app, "alpha", t.alpha, "Momentum in [0, 1)");
  s.add(app, "batch", t.batch, "Mini-batch size");
  s.add(app, "lambda", t.lambda, "Weight decay strength");
  s.add(app, "init-j0", t.init_j0, "Initial J0 of the hidden layer");
  s.add(app, "init-j", t.init_j, "Initial J of the hidden layer");
  s.add(app, "out-std", t.out_std, "Output-layer init std (< 0: 1/sqrt(N))");
  s.add(app, "stop-at-j2", t.stop_at_j2, "Stop once J^2 reaches this and test loss stalls (0 = off)");
  s.add(app, "patience", t.patience, "Epochs without a new test-loss minimum before stopping");
  s.add(app, "step-stats", t.step_stats, "Record hidden-layer stats every k steps (0 = off)");
}

train::HyperParams hyper_from(const TrainFlags& t, std::uint64_t seed) {
  train::HyperParams h;
  h.eta = t.eta;
  h.alpha = t.alpha;
  h.batch = t.batch;
  h.lambda = t.lambda;
  h.epochs = t.epochs;
  h.seed = seed;
  try {
    h.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return h;
}

// ------------------------------------------------------------ run context

class RunLog {
 public:
  explicit RunLog(const fs::path& path) : out_(path, std::ios::app), start_(clock::now()) {
    if (!out_) throw io::IoError("cannot open log " + path.string());
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", std::localtime(&now));
    line(std::string("started ") + stamp);
  }
  ~RunLog() { line("finished, wall time " + io::fmt(elapsed()) + " s"); }

  void line(const std::string& msg) {
    out_ << "[" << io::fmt(elapsed()) << "s] " << msg << '\n';
    out_.flush();
    std::cerr << msg << '\n';
  }

 private:
  using clock = std::chrono::steady_clock;
  double elapsed() const { return std::chrono::duration<double>(clock::now() - start_).count(); }
  std::ofstream out_;
  clock::time_point start_;
};

struct Context {
  fs::path dir;
  std::unique_ptr<RunLog> log;
};

// Loads the config file, handles --print-config and prepares the output
// directory. Returns nullopt when the command should stop (print-config).
std::optional<Context> prepare(const std::string& command, const Common& common, const Settings& settings) {
  if (!common.config_path.empty()) {
    json config;
    try {
      config = json::parse(io::read_text_file(common.config_path));
    } catch (const json::parse_error& e) {
      throw ConfigError(common.config_path + ": " + e.what());
    }
    settings.apply(config);
  }
  const json effective = settings.effective();
  if (common.print_config) {
    std::cout << effective.dump(2) << '\n';
    return std::nullopt;
  }
  Context ctx;
  ctx.dir = fs::path(common.out) / command / common.name;
  io::ensure_directory(ctx.dir);
  io::write_text_file(ctx.dir / "config.json", effective.dump(2) + "\n");
  ctx.log = std::make_unique<RunLog>(ctx.dir / "run.log");
  return ctx;
}

fs::path resolve_data_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CHAOSEDGE_DATA_DIR"); env && *env) return env;
  throw ConfigError("no data directory: pass --data-dir or set CHAOSEDGE_DATA_DIR");
}

struct LoadedData {
  data::Dataset train;
  data::Dataset test;
};

LoadedData load_data(const DataOptions& d, std::uint64_t seed, RunLog& log) {
  const auto dir = resolve_data_dir(d.data_dir);
  auto split = data::load_fashion_mnist(dir);
  LoadedData out{std::move(split.train), std::move(split.test)};
  if (d.subset > 0 && d.subset < out.train.n_samples()) {
    RngStream rng(seed, 2);
    out.train = data::subset(out.train, d.subset, rng);
  }
  if (d.test_subset > 0 && d.test_subset < out.test.n_samples()) {
    RngStream rng(seed, 3);
    out.test = data::subset(out.test, d.test_subset, rng);
  }
  log.line("data: " + std::to_string(out.train.n_samples()) + " train / " +
           std::to_string(out.test.n_samples()) + " test samples from " + dir.string());
  return out;
}

train::TrainOptions train_options(const TrainFlags& t, int workers, RunLog* log, const std::string& tag) {
  train::TrainOptions o;
  o.init.j0 = t.init_j0;
  o.init.j = t.init_j;
  if (t.out_std >= 0.0) o.init.out_std = t.out_std;
  if (t.stop_at_j2 > 0.0) o.stop_at_j2 = t.stop_at_j2;
  o.patience = t.patience;
  o.step_stats_every = t.step_stats;
  o.eval_workers = workers;
  if (log) {
    o.on_epoch = [log, tag](const train::EpochRecord& r) {
      log->line(tag + "epoch " + std::to_string(r.epoch) + " J0=" + io::fmt(r.j0) + " J^2=" +
                io::fmt(r.j_squared) + " train=" + io::fmt(r.train_loss) + " test=" + io::fmt(r.test_loss) +
                " acc=" + io::fmt(r.test_accuracy));
    };
  }
  return o;
}

void write_json(const fs::path& path, const json& j) { io::write_text_file(path, j.dump(2) + "\n"); }

std::string value_dir(double v) {
  std::string s = io::fmt(v);
  for (char& c : s) {
    if (c == '+') c = 'p';
  }
  return s;
}

// -------------------------------------------------------------- commands

struct PhaseMapArgs {
  std::size_t grid = 50;
  double j0_min = -2.5, j0_max = 2.5, j_min = 0.1, j_max = 2.5;
  std::size_t tau = dynamics::kDefaultTau;
  double noise_std = dynamics::kDefaultNoiseStd;
  std::size_t n_units = 784;
  bool single_point = false;
  double j0 = 0.0, j = 1.0;
  bool no_boundary = false;
};

int cmd_phase_map(const Common& common, const Settings& settings, const PhaseMapArgs& a) {
  const auto rule = gaussian_quadrature();
  if (a.single_point) {
    const dynamics::PhasePoint p{a.j0, a.j};
    const auto sol = dynamics::meanfield_solve(p, rule);
    if (!sol.converged) throw std::runtime_error("mean-field closure did not converge at this point");
    const double crit = dynamics::boundary_criterion(p, sol, rule);
    const json out = {{"j0", a.j0}, {"j", a.j}, {"mu", sol.mu}, {"q0", sol.q0},
                      {"branch", dynamics::to_string(sol.branch)}, {"criterion", crit},
                      {"phase", crit > 1.0 ? "chaotic" : "ordered"}};
    std::cout << "criterion " << io::fmt(crit) << '\n' << out.dump() << '\n';
    return kOk;
  }
  auto ctx = prepare("phase-map", common, settings);
  if (!ctx) return kOk;
  if (a.grid < 2) throw ConfigError("--grid must be >= 2");
  dynamics::PhaseGrid grid{{a.j0_min, a.j0_max, a.grid}, {a.j_min, a.j_max, a.grid}};
  dynamics::HeatmapOptions opt;
  opt.n = a.n_units;
  opt.tau = a.tau;
  opt.noise_std = a.noise_std;
  opt.seed = common.seed;
  opt.workers = common.workers;
  ctx->log->line("phase map: " + std::to_string(grid.cell_count()) + " cells, n=" + std::to_string(a.n_units));
  const auto cells = dynamics::phase_heatmap(grid, opt, rule);
  {
    std::ofstream out(ctx->dir / "heatmap.csv");
    dynamics::write_heatmap_csv(out, cells);
  }
  json report = {{"cells", cells.size()}, {"n_units", a.n_units}, {"tau", a.tau}, {"noise_std", a.noise_std}};
  const auto agreement = dynamics::classification_agreement(cells);
  report["agreement"] = {{"considered", agreement.considered},
                         {"agreeing", agreement.agreeing},
                         {"fraction", agreement.fraction()}};
  if (!a.no_boundary) {
    std::vector<double> j0s;
    for (std::size_t i = 0; i < grid.j0.resolution; ++i) j0s.push_back(grid.j0.at(i));
    const auto boundary = dynamics::boundary_curve(j0s, rule);
    std::ofstream out(ctx->dir / "boundary.csv");
    dynamics::write_boundary_csv(out, boundary);
  }
  write_json(ctx->dir / "report.json", report);
  std::ostringstream md;
  md << "# Phase map\n\n| cells | n | tau | agreement (|criterion - 1| > 0.1) |\n|---|---|---|---|\n| "
     << cells.size() << " | " << a.n_units << " | " << a.tau << " | " << agreement.agreeing << "/"
     << agreement.considered << " = " << io::fmt(agreement.fraction()) << " |\n";
  io::write_text_file(ctx->dir / "summary.md", md.str());
  ctx->log->line("agreement " + io::fmt(agreement.fraction()));
  return kOk;
}

struct TrainArgs {
  DataOptions data;
  TrainFlags train;
  bool checkpoint = true;
};

std::string run_summary_md(const train::TrainingRun& run) {
  std::ostringstream md;
  const auto& best = run.records.at(train::argmin_test_loss(run.records));
  md << "# Training run\n\n| eta | alpha | B | lambda | scale factor | noise scale | epochs | optimal epoch | J at optimum | test loss | accuracy |\n"
     << "|---|---|---|---|---|---|---|---|---|---|---|\n| " << io::fmt(run.hyper.eta) << " | "
     << io::fmt(run.hyper.alpha) << " | " << run.hyper.batch << " | " << io::fmt(run.hyper.lambda) << " | "
     << io::fmt(run.scale_factor) << " | " << io::fmt(run.noise_scale) << " | " << run.records.back().epoch
     << " | " << run.optimal_epoch << " | " << io::fmt(best.j) << " | " << io::fmt(best.test_loss) << " | "
     << io::fmt(best.test_accuracy) << " |\n";
  try {
    const auto fit = experiments::fit_ordered_phase(run);
    md << "\nOrdered-phase fit J^2 = A epoch + C: A = " << io::fmt(fit.slope) << ", C = "
       << io::fmt(fit.intercept) << ", r^2 = " << io::fmt(fit.r_squared) << " (" << fit.n_points
       << " points)\n";
  } catch (const InsufficientDataError&) {
    md << "\nToo few ordered-phase records for a linear fit.\n";
  }
  return md.str();
}

int cmd_train(const Common& common, const Settings& settings, const TrainArgs& a) {
  auto ctx = prepare("train", common, settings);
  if (!ctx) return kOk;
  const auto hyper = hyper_from(a.train, common.seed);
  auto d = load_data(a.data, common.seed, *ctx->log);
  auto opts = train_options(a.train, common.workers, ctx->log.get(), "");
  opts.keep_best_params = a.checkpoint;
  const auto run = train::train(d.train, d.test, hyper, opts);
  train::write_run(ctx->dir, run);
  io::write_text_file(ctx->dir / "summary.md", run_summary_md(run));
  if (a.checkpoint) {
    model::save_checkpoint(ctx->dir / "final.ckpt", run.final_params, {common.seed, run.records.back().epoch});
    if (run.best_params) {
      model::save_checkpoint(ctx->dir / "best.ckpt", *run.best_params, {common.seed, run.optimal_epoch});
    }
  }
  std::cout << "optimal_epoch " << run.optimal_epoch << '\n';
  return kOk;
}

struct SweepArgs {
  DataOptions data;
  TrainFlags train;
  std::string vary = "eta";
  std::vector<double> values;
  bool no_equalize = false;
  std::size_t min_epochs = 10;
};

int cmd_sweep(const Common& common, const Settings& settings, const SweepArgs& a) {
  auto ctx = prepare("sweep", common, settings);
  if (!ctx) return kOk;
  experiments::Varied varied;
  try {
    varied = experiments::parse_varied(a.vary);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (a.values.size() < 2) throw ConfigError("--values needs at least two entries");
  for (const auto& w : experiments::out_of_range_warnings(varied, a.values)) ctx->log->line("warning: " + w);
  const auto base = hyper_from(a.train, common.seed);
  auto d = load_data(a.data, common.seed, *ctx->log);
  experiments::SweepOptions so;
  so.run.train = train_options(a.train, 1, nullptr, "");
  so.run.workers = common.workers;
  so.equalize_rescaled_time = !a.no_equalize;
  so.min_epochs = a.min_epochs;
  ctx->log->line(std::string("sweep over ") + experiments::to_string(varied));
  const auto out = experiments::scaling_sweep(base, varied, a.values, d.train, d.test, so);
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    train::write_run(ctx->dir / (std::string(experiments::to_string(varied)) + "_" + value_dir(out.result.values[i])),
                     out.runs[i]);
  }
  write_json(ctx->dir / "report.json", experiments::to_json(out.result));
  io::write_text_file(ctx->dir / "summary.md", experiments::scaling_summary_md(out.result));
  ctx->log->line("A-fit r^2 " + io::fmt(out.result.fit.r_squared) + ", D spread " + io::fmt(out.result.d_rel_spread));
  return kOk;
}

struct CollapseArgs {
  DataOptions data;
  TrainFlags train;
  std::vector<double> multipliers{1.0, 2.0};
  bool rescale = false;
};

int cmd_collapse(const Common& common, const Settings& settings, const CollapseArgs& a) {
  auto ctx = prepare("collapse", common, settings);
  if (!ctx) return kOk;
  if (a.multipliers.size() < 2) throw ConfigError("--multipliers needs at least two entries");
  const auto base = hyper_from(a.train, common.seed);
  std::vector<train::HyperParams> configs;
  std::vector<std::string> ids;
  for (double m : a.multipliers) {
    if (!(m > 0.0)) throw ConfigError("multipliers must be positive");
    auto h = base;
    h.eta = base.eta * m;
    if (a.rescale) {
      // Scale factor grows by m; the epoch budget shrinks to keep rescaled time.
      h.epochs = experiments::equal_time_epochs(h, train::scale_factor(base), base.epochs, 1);
    } else {
      // eta and B multiplied together keep the scale factor fixed.
      const double b = std::round(static_cast<double>(base.batch) * m);
      if (b < 1.0) throw ConfigError("multiplied batch size below 1");
      h.batch = static_cast<std::size_t>(b);
    }
    try {
      h.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    configs.push_back(h);
    ids.push_back("x" + value_dir(m));
  }
  auto d = load_data(a.data, common.seed, *ctx->log);
  experiments::RunPlanOptions ro;
  ro.train = train_options(a.train, 1, nullptr, "");
  ro.workers = common.workers;
  const auto runs = experiments::run_all(configs, d.train, d.test, ro);
  for (std::size_t i = 0; i < runs.size(); ++i) train::write_run(ctx->dir / ids[i], runs[i]);
  const auto rep = experiments::collapse_check(runs, ids, a.rescale);
  write_json(ctx->dir / "report.json", experiments::to_json(rep));
  io::write_text_file(ctx->dir / "summary.md", experiments::collapse_summary_md(rep));
  ctx->log->line("max ordered |dJ^2| " + io::fmt(rep.max_j2_deviation_ordered));
  return kOk;
}

struct WeightDecayArgs {
  DataOptions data;
  TrainFlags train;
  std::vector<double> lambdas{0.0, 9e-5, 5e-4};
  std::size_t n_seeds = 3;
};

int cmd_weight_decay(const Common& common, const Settings& settings, const WeightDecayArgs& a) {
  auto ctx = prepare("weight-decay", common, settings);
  if (!ctx) return kOk;
  if (a.lambdas.empty() || a.n_seeds == 0) throw ConfigError("need at least one lambda and one seed");
  for (double l : a.lambdas) {
    if (!(l >= 0.0)) throw ConfigError("lambdas must be >= 0");
  }
  const auto hyper = hyper_from(a.train, common.seed);
  auto d = load_data(a.data, common.seed, *ctx->log);
  experiments::RunPlanOptions ro;
  ro.train = train_options(a.train, 1, nullptr, "");
  ro.workers = common.workers;
  const auto out = experiments::weight_decay_sweep(a.lambdas, hyper, a.n_seeds, d.train, d.test, ro);
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    const auto& h = out.runs[i].hyper;
    train::write_run(ctx->dir / ("lambda_" + value_dir(h.lambda) + "_seed" + std::to_string(h.seed)), out.runs[i]);
  }
  const auto emp = experiments::empirical_lambda(out.points);
  json points = json::array();
  for (const auto& p : out.points) points.push_back(experiments::to_json(p));
  json report = {{"points", points}, {"n_seeds", a.n_seeds}};
  report["lambda_empirical"] = emp ? json(*emp) : json(nullptr);
  write_json(ctx->dir / "report.json", report);
  io::write_text_file(ctx->dir / "summary.md", experiments::weight_decay_summary_md(out.points, emp));
  return kOk;
}

struct EstimateArgs {
  std::string run_dir;
  double a = 0.0;
  double eta = 0.01, alpha = 0.0;
  std::size_t batch = 32;
  std::size_t s = 60000;
  double j_star_sq = 1.0;
};

int cmd_estimate_lambda(const Common& common, const Settings& settings, const EstimateArgs& a) {
  auto ctx = prepare("estimate-lambda", common, settings);
  if (!ctx) return kOk;
  train::HyperParams h;
  double slope = a.a;
  std::size_t s = a.s;
  json source;
  if (!a.run_dir.empty()) {
    const auto run = train::read_run(a.run_dir);
    const auto fit = experiments::fit_ordered_phase(run);
    h = run.hyper;
    slope = fit.slope;
    s = run.n_train;
    source = {{"run", a.run_dir}, {"fit", experiments::to_json(fit)}};
  } else {
    if (!(a.a > 0.0)) throw ConfigError("give --run <train dir> or a positive --a");
    h.eta = a.eta;
    h.alpha = a.alpha;
    h.batch = a.batch;
    source = {{"a", a.a}};
  }
  experiments::LambdaEstimate est;
  try {
    est = experiments::estimate_lambda(slope, h, s, a.j_star_sq);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  json report = experiments::to_json(est);
  report["source"] = source;
  write_json(ctx->dir / "report.json", report);
  io::write_text_file(ctx->dir / "summary.md", experiments::lambda_summary_md(est));
  std::cout << "D " << io::fmt(est.d) << "\nlambda_star " << io::fmt(est.lambda_star) << "\ndelta_j2_plus "
            << io::fmt(est.delta_j2_plus) << '\n';
  return kOk;
}

struct GlobalArgs {
  DataOptions data;
  std::string checkpoint;
  std::size_t max_images = 10000;
  std::size_t tau = dynamics::kDefaultTau;
  double noise_std = dynamics::kDefaultNoiseStd;
};

int cmd_global_check(const Common& common, const Settings& settings, const GlobalArgs& a) {
  auto ctx = prepare("global-check", common, settings);
  if (!ctx) return kOk;
  if (a.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  const auto [params, lineage] = model::load_checkpoint(a.checkpoint);
  auto d = load_data(a.data, common.seed, *ctx->log);
  experiments::GlobalPropertyOptions go;
  go.noise_std = a.noise_std;
  go.tau = a.tau;
  go.max_images = a.max_images;
  go.seed = common.seed;
  go.workers = common.workers;
  const auto rep = experiments::global_property_check(params.w_hidden, d.test, go);
  json report = experiments::to_json(rep);
  const auto st = weight_stats(params.w_hidden);
  report["checkpoint"] = {{"seed", lineage.seed}, {"epoch", lineage.epoch}, {"j0", st.j0}, {"j", st.j}};
  write_json(ctx->dir / "report.json", report);
  io::write_text_file(ctx->dir / "summary.md", experiments::global_summary_md(rep));
  return kOk;
}

struct ChecksumArgs {
  std::string data_dir;
  std::string manifest = CHAOSEDGE_DEFAULT_MANIFEST;
};

int cmd_verify_checksums(const ChecksumArgs& a) {
  if (a.manifest.empty()) throw ConfigError("--manifest is required");
  const auto dir = resolve_data_dir(a.data_dir);
  const auto entries = data::parse_checksum_manifest(io::read_text_file(a.manifest));
  if (entries.empty()) throw ConfigError(a.manifest + ": no checksum entries");
  const auto rep = data::verify_checksums(dir, entries);
  for (const auto& f : rep.ok) std::cout << "OK        " << f << '\n';
  for (const auto& f : rep.missing) std::cout << "MISSING   " << f << '\n';
  for (const auto& f : rep.mismatched) std::cout << "MISMATCH  " << f << '\n';
  if (!rep.mismatched.empty()) {
    std::string names;
    for (const auto& f : rep.mismatched) names += (names.empty() ? "" : ", ") + (dir / f).string();
    throw IntegrityError("checksum mismatch: " + names);
  }
  if (!rep.missing.empty()) throw io::IoError("missing file(s) in " + dir.string() + ": " + rep.missing.front());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Order/chaos phase analysis of tanh networks and their training dynamics"};
  app.require_subcommand(1);

  Common common;

  Settings phase_settings;
  PhaseMapArgs phase;
  auto* phase_cmd = app.add_subcommand("phase-map", "Numerical and analytic order/chaos phase diagram");
  add_common(phase_cmd, common, phase_settings);
  phase_settings.add(phase_cmd, "grid", phase.grid, "Cells per axis");
  phase_settings.add(phase_cmd, "j0-min", phase.j0_min, "Lower J0");
  phase_settings.add(phase_cmd, "j0-max", phase.j0_max, "Upper J0");
  phase_settings.add(phase_cmd, "j-min", phase.j_min, "Lower J");
  phase_settings.add(phase_cmd, "j-max", phase.j_max, "Upper J");
  phase_settings.add(phase_cmd, "tau", phase.tau, "Map iterations per trajectory pair");
  phase_settings.add(phase_cmd, "noise-std", phase.noise_std, "Perturbation std");
  phase_settings.add(phase_cmd, "n-units", phase.n_units, "Map dimension");
  phase_settings.add_flag(phase_cmd, "no-boundary", phase.no_boundary, "Skip the analytic boundary curve");
  phase_cmd->add_flag("--single-point", phase.single_point, "Print the boundary criterion at (--j0, --j)");
  phase_cmd->add_option("--j0", phase.j0, "J0 for --single-point")->capture_default_str();
  phase_cmd->add_option("--j", phase.j, "J for --single-point")->capture_default_str();

  Settings train_settings;
  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train the network and log hidden-layer phase coordinates");
  add_common(train_cmd, common, train_settings);
  add_data(train_cmd, tr.data, train_settings);
  add_train(train_cmd, tr.train, train_settings);
  train_cmd->add_flag("!--no-checkpoint", tr.checkpoint, "Skip writing parameter checkpoints");

  Settings sweep_settings;
  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Scaling sweep of the ordered-phase slope A");
  add_common(sweep_cmd, common, sweep_settings);
  add_data(sweep_cmd, sw.data, sweep_settings);
  add_train(sweep_cmd, sw.train, sweep_settings);
  sweep_settings.add(sweep_cmd, "vary", sw.vary, "eta, momentum or batch");
  sweep_settings.add(sweep_cmd, "values", sw.values, "Values of the varied hyperparameter")->delimiter(',');
  sweep_settings.add_flag(sweep_cmd, "no-equalize", sw.no_equalize, "Same epoch count for every run");
  sweep_settings.add(sweep_cmd, "min-epochs", sw.min_epochs, "Lower bound on equalized epoch budgets");

  Settings collapse_settings;
  CollapseArgs co;
  auto* collapse_cmd = app.add_subcommand("collapse", "Compare J^2 curves across scale factors");
  add_common(collapse_cmd, common, collapse_settings);
  add_data(collapse_cmd, co.data, collapse_settings);
  add_train(collapse_cmd, co.train, collapse_settings);
  collapse_settings.add(collapse_cmd, "multipliers", co.multipliers, "Coefficients d")->delimiter(',');
  collapse_settings.add_flag(collapse_cmd, "rescale", co.rescale,
                             "Multiply eta only and align on epoch x scale factor (default: eta and B)");

  Settings wd_settings;
  WeightDecayArgs wd;
  auto* wd_cmd = app.add_subcommand("weight-decay", "Saturation of J^2 under weight decay");
  add_common(wd_cmd, common, wd_settings);
  add_data(wd_cmd, wd.data, wd_settings);
  add_train(wd_cmd, wd.train, wd_settings);
  wd_settings.add(wd_cmd, "lambdas", wd.lambdas, "Weight decay strengths")->delimiter(',');
  wd_settings.add(wd_cmd, "n-seeds", wd.n_seeds, "Repetitions per lambda");

  Settings est_settings;
  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate-lambda", "Weight decay that balances J^2 growth at J*^2");
  add_common(est_cmd, common, est_settings);
  est_settings.add(est_cmd, "run", est.run_dir, "Directory of a train run (uses its ordered-phase fit)");
  est_settings.add(est_cmd, "a", est.a, "Slope A, when no run is given");
  est_settings.add(est_cmd, "eta", est.eta, "Learning rate of the slope's run");
  est_settings.add(est_cmd, "alpha", est.alpha, "Momentum of the slope's run");
  est_settings.add(est_cmd, "batch", est.batch, "Batch size of the slope's run");
  est_settings.add(est_cmd, "samples", est.s, "Training-set size S");
  est_settings.add(est_cmd, "j-star-sq", est.j_star_sq, "Target J*^2");

  Settings global_settings;
  GlobalArgs gl;
  auto* global_cmd = app.add_subcommand("global-check", "Perturbation test from every test image");
  add_common(global_cmd, common, global_settings);
  add_data(global_cmd, gl.data, global_settings);
  global_settings.add(global_cmd, "checkpoint", gl.checkpoint, "Checkpoint file from `train`");
  global_settings.add(global_cmd, "max-images", gl.max_images, "Images to test");
  global_settings.add(global_cmd, "tau", gl.tau, "Map iterations");
  global_settings.add(global_cmd, "noise-std", gl.noise_std, "Perturbation std");

  ChecksumArgs ck;
  auto* ck_cmd = app.add_subcommand("verify-checksums", "Check dataset files against a SHA-256 manifest");
  ck_cmd->add_option("--data-dir", ck.data_dir, "Fashion-MNIST directory (fallback: $CHAOSEDGE_DATA_DIR)");
  ck_cmd->add_option("--manifest", ck.manifest, "sha256sum-style manifest")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*phase_cmd) return cmd_phase_map(common, phase_settings, phase);
    if (*train_cmd) return cmd_train(common, train_settings, tr);
    if (*sweep_cmd) return cmd_sweep(common, sweep_settings, sw);
    if (*collapse_cmd) return cmd_collapse(common, collapse_settings, co);
    if (*wd_cmd) return cmd_weight_decay(common, wd_settings, wd);
    if (*est_cmd) return cmd_estimate_lambda(common, est_settings, est);
    if (*global_cmd) return cmd_global_check(common, global_settings, gl);
    if (*ck_cmd) return cmd_verify_checksums(ck);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IntegrityError& e) {
    std::cerr << "data integrity error: " << e.what() << '\n';
    return kIntegrity;
  } catch (const data::IdxParseError& e) {
    std::cerr << "data integrity error: " << e.what() << '\n';
    return kIntegrity;
  } catch (const io::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCompute;
  }
  return kCompute;
}
