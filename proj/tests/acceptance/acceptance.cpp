// Acceptance runner: one PASS/FAIL line per criterion, at the stated
// tolerances. Long criteria train on Fashion-MNIST; see README for budgets.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chaosedge/data/dataset.hpp"
#include "chaosedge/dynamics/heatmap.hpp"
#include "chaosedge/dynamics/meanfield.hpp"
#include "chaosedge/experiments/experiments.hpp"
#include "chaosedge/io/format.hpp"
#include "chaosedge/model/network.hpp"
#include "chaosedge/numerics/quadrature.hpp"
#include "chaosedge/train/trainer.hpp"
#include "../oracles.hpp"
#include "../test_support.hpp"

using namespace chaosedge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Settings {
  fs::path data_dir;
  fs::path work_dir = "acceptance-out";
  std::string cli;
  int workers = 1;
  std::uint64_t seed = 0;
  // Desk-scale knobs (defaults are the budgets documented in the README).
  std::size_t subset = 6000;
  std::size_t sweep_test_subset = 1000;
  std::size_t sweep_reference_epochs = 150;
  std::size_t collapse_epochs = 200;
  std::size_t max_epochs_full = 400;
  std::size_t max_epochs_subset = 3000;
  double decay_eta = 0.02;
  double decay_alpha = 0.9;
  std::size_t decay_epochs = 60;
};

class Context {
 public:
  explicit Context(Settings s) : s_(std::move(s)) { fs::create_directories(s_.work_dir); }

  const Settings& settings() const { return s_; }
  bool have_data() const {
    std::error_code ec;
    return !s_.data_dir.empty() && fs::is_directory(s_.data_dir, ec);
  }

  const data::TrainTestSplit& full() {
    if (!full_) full_ = data::load_fashion_mnist(s_.data_dir);
    return *full_;
  }
  const data::Dataset& train_subset() {
    if (!train_subset_) {
      RngStream rng(s_.seed, 2);
      train_subset_ = data::subset(full().train, s_.subset, rng);
    }
    return *train_subset_;
  }
  const data::Dataset& test_subset() {
    if (!test_subset_) {
      RngStream rng(s_.seed, 3);
      test_subset_ = data::subset(full().test, s_.sweep_test_subset, rng);
    }
    return *test_subset_;
  }

  // Trains once per (tag, hyper, options) key within this process and keeps
  // the run files under the work directory for inspection.
  const train::TrainingRun& run(const std::string& tag, const data::Dataset& tr, const data::Dataset& te,
                                const train::HyperParams& h, const train::TrainOptions& o) {
    std::ostringstream key;
    key << tag << '|' << io::fmt_exact(h.eta) << '|' << io::fmt_exact(h.alpha) << '|' << h.batch << '|'
        << io::fmt_exact(h.lambda) << '|' << h.epochs << '|' << h.seed << '|'
        << (o.stop_at_j2 ? io::fmt_exact(*o.stop_at_j2) : "-") << '|' << o.patience;
    auto it = runs_.find(key.str());
    if (it != runs_.end()) return it->second;
    const auto t0 = Clock::now();
    auto opts = o;
    opts.eval_workers = s_.workers;
    auto run = train::train(tr, te, h, opts);
    std::ostringstream name;
    name << tag << "_eta" << io::fmt(h.eta) << "_a" << io::fmt(h.alpha) << "_b" << h.batch << "_l"
         << io::fmt(h.lambda) << "_e" << h.epochs;
    train::write_run(s_.work_dir / "runs" / name.str(), run);
    std::cerr << "  trained " << name.str() << ": " << run.records.size() - 1 << " epochs in "
              << fmt(seconds_since(t0), 3) << " s\n";
    return runs_.emplace(key.str(), std::move(run)).first->second;
  }

  std::optional<train::TrainingRun> full_default;       // criterion 4, reused by 7 and 8
  std::optional<train::TrainingRun> decay_zero;         // criterion 7, reused by 9

 private:
  Settings s_;
  std::optional<data::TrainTestSplit> full_;
  std::optional<data::Dataset> train_subset_, test_subset_;
  std::map<std::string, train::TrainingRun> runs_;
};

Outcome no_data(const Context& ctx) {
  return {false, "Fashion-MNIST not found at '" + ctx.settings().data_dir.string() + "'"};
}

// ------------------------------------------------------------ criterion 1

Outcome boundary_anchor(Context&) {
  const auto t0 = Clock::now();
  const auto rule = gaussian_quadrature();
  const auto b = dynamics::boundary_curve({0.0}, rule);
  const double secs = seconds_since(t0);
  const double err = std::abs(b.at(0).j_boundary - 1.0);
  Outcome o;
  o.pass = b[0].found && err < 1e-6 && secs < 1.0;
  o.detail = "J_boundary(J0=0) = " + io::fmt_exact(b[0].j_boundary) + ", |J-1| = " + fmt(err, 3) +
             " (< 1e-6), " + fmt(secs, 3) + " s (< 1 s)";
  return o;
}

// ------------------------------------------------------------ criterion 2

Outcome phase_diagram(Context& ctx) {
  const auto t0 = Clock::now();
  dynamics::PhaseGrid grid{{-2.5, 2.5, 40}, {0.1, 2.5, 40}};
  dynamics::HeatmapOptions opts;
  opts.n = 256;
  opts.tau = 50;
  opts.seed = ctx.settings().seed;
  opts.workers = ctx.settings().workers;
  const auto rule = gaussian_quadrature();
  const auto cells = dynamics::phase_heatmap(grid, opts, rule);
  const auto agree = dynamics::classification_agreement(cells, 0.1);
  const double secs = seconds_since(t0);
  {
    std::ofstream out(ctx.settings().work_dir / "criterion2_heatmap.csv");
    dynamics::write_heatmap_csv(out, cells);
  }
  Outcome o;
  o.pass = agree.fraction() >= 0.90 && secs < 300.0;
  o.detail = "agreement " + std::to_string(agree.agreeing) + "/" + std::to_string(agree.considered) + " = " +
             fmt(agree.fraction()) + " (>= 0.90) on cells with |criterion-1| > 0.1, " + fmt(secs, 3) +
             " s (< 300 s)";
  return o;
}

// ------------------------------------------------------------ criterion 3

Outcome gradient_check(Context& ctx) {
  const auto t0 = Clock::now();
  Matrix x;
  std::vector<std::uint8_t> y;
  std::string source;
  if (ctx.have_data()) {
    RngStream pick(ctx.settings().seed, 11);
    std::vector<std::size_t> idx(16);
    for (auto& i : idx) i = static_cast<std::size_t>(pick.below(ctx.full().train.n_samples()));
    data::gather(ctx.full().train, idx, x, y);
    source = "16 Fashion-MNIST training images";
  } else {
    RngStream r(ctx.settings().seed, 12);
    x = Matrix(16, 784);
    for (double& v : x.values()) v = r.uniform();
    for (int i = 0; i < 16; ++i) y.push_back(static_cast<std::uint8_t>(i % 10));
    source = "16 synthetic images (dataset absent)";
  }
  RngStream init(ctx.settings().seed, 0);
  const auto params = model::init_network(784, 10, {0.0, 0.5, std::nullopt}, init);
  const auto lg = model::loss_and_grads(params, x, y);
  const auto chk = test::finite_difference_check(params, x, y, lg.grads, 1e-5, 50, ctx.settings().seed + 3);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = chk.checked == 50 && chk.max_rel_error < 1e-5 && secs < 30.0;
  o.detail = "max relative error " + fmt(chk.max_rel_error, 3) + " over " + std::to_string(chk.checked) +
             " coordinates (< 1e-5, eps 1e-5, " + source + "), " + fmt(secs, 3) + " s (< 30 s)";
  return o;
}

// ------------------------------------------------------------ criterion 4

train::TrainOptions until_j2_one(std::size_t patience) {
  train::TrainOptions o;
  o.init = {0.0, 0.5, std::nullopt};
  o.stop_at_j2 = 1.0;
  o.patience = patience;
  return o;
}

const train::TrainingRun& full_default_run(Context& ctx) {
  if (!ctx.full_default) {
    train::HyperParams h;
    h.epochs = ctx.settings().max_epochs_full;
    h.seed = ctx.settings().seed;
    // Patience keeps training past J^2 = 1 until the test loss has clearly
    // bottomed out, so the optimal epoch is not cut off.
    ctx.full_default = ctx.run("full_default", ctx.full().train, ctx.full().test, h, until_j2_one(20));
  }
  return *ctx.full_default;
}

Outcome ordered_linearity(Context& ctx) {
  if (!ctx.have_data()) return no_data(ctx);
  const auto& full = full_default_run(ctx);
  train::HyperParams h;
  h.epochs = ctx.settings().max_epochs_subset;
  h.seed = ctx.settings().seed;
  const auto& sub = ctx.run("subset_default", ctx.train_subset(), ctx.test_subset(), h, until_j2_one(0));

  const double full_max = full.records.back().j_squared, sub_max = sub.records.back().j_squared;
  Outcome o;
  std::ostringstream d;
  try {
    const auto ff = experiments::fit_ordered_phase(full);
    const auto fs_ = experiments::fit_ordered_phase(sub);
    const bool reached = full_max >= 1.0 && sub_max >= 1.0;
    o.pass = reached && ff.r_squared >= 0.99 && fs_.r_squared >= 0.98;
    d << "full: r^2 " << fmt(ff.r_squared, 5) << " (>= 0.99), A " << fmt(ff.slope) << "/epoch over "
      << ff.n_points << " epochs; S=" << ctx.settings().subset << ": r^2 " << fmt(fs_.r_squared, 5)
      << " (>= 0.98), A " << fmt(fs_.slope) << "/epoch over " << fs_.n_points << " epochs";
    if (!reached) d << "; J^2 did not reach 1 (full " << fmt(full_max) << ", subset " << fmt(sub_max) << ")";
  } catch (const std::exception& e) {
    d << "fit failed: " << e.what();
  }
  o.detail = d.str();
  return o;
}

// ------------------------------------------------------------ criterion 5

Outcome scaling_law(Context& ctx) {
  if (!ctx.have_data()) return no_data(ctx);
  const auto t0 = Clock::now();
  const auto& st = ctx.settings();
  train::HyperParams base;
  base.seed = st.seed;
  const double ref_sf = train::scale_factor(base);
  train::TrainOptions topt;
  topt.init = {0.0, 0.5, std::nullopt};

  struct Sweep {
    experiments::Varied varied;
    std::vector<double> values;
  };
  const std::vector<Sweep> sweeps{{experiments::Varied::eta, {0.0025, 0.005, 0.01, 0.02, 0.04}},
                                  {experiments::Varied::momentum, {0.0, 0.5, 0.8, 0.9}},
                                  {experiments::Varied::batch, {8, 32, 128}}};
  std::vector<double> all_d;
  std::ostringstream d;
  bool ok = true;
  json report = json::array();
  for (const auto& sw : sweeps) {
    std::vector<train::TrainingRun> runs;
    for (double v : sw.values) {
      auto h = experiments::with_value(base, sw.varied, v);
      h.epochs = experiments::equal_time_epochs(h, ref_sf, st.sweep_reference_epochs, 10);
      runs.push_back(ctx.run("sweep", ctx.train_subset(), ctx.test_subset(), h, topt));
    }
    try {
      const auto r = experiments::summarize_scaling(sw.varied, sw.values, runs);
      report.push_back(experiments::to_json(r));
      all_d.insert(all_d.end(), r.d_estimates.begin(), r.d_estimates.end());
      ok = ok && r.fit.r_squared >= 0.95;
      d << experiments::to_string(sw.varied) << " r^2 " << fmt(r.fit.r_squared, 4) << "; ";
    } catch (const std::exception& e) {
      ok = false;
      d << experiments::to_string(sw.varied) << " failed (" << e.what() << "); ";
    }
  }
  io::write_text_file(st.work_dir / "criterion5_scaling.json", report.dump(2) + "\n");
  const double spread = all_d.empty() ? INFINITY : experiments::relative_spread(all_d);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = ok && spread <= 0.40 && secs < 3600.0;
  d << "each >= 0.95; D spread " << fmt(spread, 3) << " (<= 0.40) over " << all_d.size() << " runs, D mean "
    << fmt(all_d.empty() ? 0.0 : mean(all_d)) << "; " << fmt(secs, 4) << " s (< 3600 s)";
  o.detail = d.str();
  return o;
}

// ------------------------------------------------------------ criterion 6

Outcome scale_factor_collapse(Context& ctx) {
  if (!ctx.have_data()) return no_data(ctx);
  const auto t0 = Clock::now();
  const auto& st = ctx.settings();
  train::TrainOptions topt;
  topt.init = {0.0, 0.5, std::nullopt};
  train::HyperParams h1;
  h1.seed = st.seed;
  h1.epochs = st.collapse_epochs;
  auto h2 = h1;  // d = 2: eta and B both doubled
  h2.eta *= 2.0;
  h2.batch *= 2;
  auto h4 = h1;  // 4x scale factor, a quarter of the epochs
  h4.eta *= 4.0;
  h4.epochs = experiments::equal_time_epochs(h4, train::scale_factor(h1), h1.epochs, 10);
  const auto& r1 = ctx.run("collapse", ctx.train_subset(), ctx.test_subset(), h1, topt);
  const auto& r2 = ctx.run("collapse", ctx.train_subset(), ctx.test_subset(), h2, topt);
  const auto& r4 = ctx.run("collapse", ctx.train_subset(), ctx.test_subset(), h4, topt);
  const auto same = experiments::collapse_check({r1, r2}, {"d1", "d2"}, false);
  const auto resc = experiments::collapse_check({r1, r4}, {"sf1x", "sf4x"}, true);
  json rep{{"d1_vs_d2", experiments::to_json(same)}, {"sf1_vs_sf4", experiments::to_json(resc)}};
  io::write_text_file(st.work_dir / "criterion6_collapse.json", rep.dump(2) + "\n");
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = same.compared_points > 0 && resc.compared_points > 0 && same.max_j2_deviation_ordered <= 0.05 &&
           resc.max_j2_deviation_ordered <= 0.08;
  o.detail = "d in {1,2}: max |dJ^2| " + fmt(same.max_j2_deviation_ordered, 3) + " (<= 0.05) over " +
             std::to_string(same.compared_points) + " points; 1x vs 4x rescaled: " +
             fmt(resc.max_j2_deviation_ordered, 3) + " (<= 0.08) over " + std::to_string(resc.compared_points) +
             " points; J^2 range reached " + fmt(r1.records.back().j_squared) + "; " + fmt(secs, 4) + " s";
  return o;
}

// ------------------------------------------------------------ criterion 7

train::HyperParams decay_hyper(const Settings& st, double lambda) {
  train::HyperParams h;
  h.eta = st.decay_eta;
  h.alpha = st.decay_alpha;
  h.batch = 32;
  h.lambda = lambda;
  h.epochs = st.decay_epochs;
  h.seed = st.seed;
  return h;
}

const train::TrainingRun& decay_run(Context& ctx, double lambda) {
  train::TrainOptions o;
  o.init = {0.0, 0.5, std::nullopt};
  return ctx.run("decay", ctx.full().train, ctx.full().test, decay_hyper(ctx.settings(), lambda), o);
}

Outcome lambda_pipeline(Context& ctx) {
  if (!ctx.have_data()) return no_data(ctx);
  const auto& st = ctx.settings();
  const auto& base = full_default_run(ctx);
  experiments::LambdaEstimate est;
  try {
    est = experiments::estimate_lambda(experiments::fit_ordered_phase(base).slope, base.hyper, base.n_train, 1.0);
  } catch (const std::exception& e) {
    return {false, std::string("estimate failed: ") + e.what()};
  }
  const double ls = est.lambda_star;
  const auto& r0 = decay_run(ctx, 0.0);
  ctx.decay_zero = r0;
  const auto& rs = decay_run(ctx, ls);
  const auto& r10 = decay_run(ctx, 10.0 * ls);
  std::vector<experiments::WeightDecayPoint> pts{experiments::summarize_weight_decay(0.0, {r0}),
                                                 experiments::summarize_weight_decay(ls, {rs}),
                                                 experiments::summarize_weight_decay(10.0 * ls, {r10})};
  // Narrow the J^2 = 1 bracket with one extra run on the side where the
  // crossing lies; interpolating across a whole decade is too coarse.
  const double extra = pts[1].saturation_j2 < 1.0 ? 0.4 * ls : std::sqrt(10.0) * ls;
  pts.push_back(experiments::summarize_weight_decay(extra, {decay_run(ctx, extra)}));
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  const auto emp = experiments::empirical_lambda(pts);
  const double sat0 = pts.front().saturation_j2;
  double sat_star = 0, sat10 = 0;
  for (const auto& p : pts) {
    if (p.lambda == ls) sat_star = p.saturation_j2;
    if (p.lambda == 10.0 * ls) sat10 = p.saturation_j2;
  }
  const double ratio = emp ? std::max(*emp / ls, ls / *emp) : INFINITY;
  const bool magnitude = std::abs(std::log10(ls / 5e-5)) <= 1.0 &&
                         (!emp || std::abs(std::log10(*emp / 9e-5)) <= 1.0);
  json rep{{"estimate", experiments::to_json(est)}, {"points", json::array()}};
  for (const auto& p : pts) rep["points"].push_back(experiments::to_json(p));
  rep["lambda_empirical"] = emp ? json(*emp) : json(nullptr);
  rep["saturation_runs"] = {{"eta", st.decay_eta}, {"alpha", st.decay_alpha}, {"batch", 32},
                            {"epochs", st.decay_epochs}};
  io::write_text_file(st.work_dir / "criterion7_lambda.json", rep.dump(2) + "\n");

  Outcome o;
  o.pass = sat_star >= 0.7 && sat_star <= 1.3 && sat0 > 1.0 && sat10 < 0.9 && ratio <= 2.5 && magnitude;
  std::ostringstream d;
  d << "A " << fmt(est.a) << "/epoch, D " << fmt(est.d) << ", lambda* " << fmt(est.lambda_star, 3)
    << " (5e-5 reported, within 10x: " << (std::abs(std::log10(ls / 5e-5)) <= 1.0 ? "yes" : "no")
    << "); saturation J^2: lambda=0 " << fmt(sat0) << " (> 1), lambda* " << fmt(sat_star)
    << " (in [0.7, 1.3]), 10 lambda* " << fmt(sat10) << " (< 0.9); empirical lambda "
    << (emp ? fmt(*emp, 3) : std::string("not bracketed")) << ", ratio to lambda* " << fmt(ratio, 3)
    << " (<= 2.5)";
  o.detail = d.str();
  return o;
}

// ------------------------------------------------------------ criterion 8

Outcome optimal_epoch(Context& ctx) {
  if (!ctx.have_data()) return no_data(ctx);
  const auto& run = full_default_run(ctx);
  const auto& best = run.records[train::argmin_test_loss(run.records)];
  Outcome o;
  o.pass = best.j >= 0.85 && best.j <= 1.3;
  o.detail = "minimum test loss " + fmt(best.test_loss) + " at epoch " + std::to_string(best.epoch) + " where J = " +
             fmt(best.j) + " (in [0.85, 1.3]); J^2 reached 1 at epoch " + [&] {
               for (const auto& r : run.records)
                 if (r.j_squared >= 1.0) return std::to_string(r.epoch);
               return std::string("never");
             }();
  return o;
}

// ------------------------------------------------------------ criterion 9

Outcome global_property(Context& ctx) {
  if (!ctx.have_data()) return no_data(ctx);
  if (!ctx.decay_zero) ctx.decay_zero = decay_run(ctx, 0.0);
  const auto& w = ctx.decay_zero->final_params.w_hidden;
  const auto st = weight_stats(w);
  const auto t0 = Clock::now();
  experiments::GlobalPropertyOptions opts;
  opts.max_images = 1000;
  opts.seed = ctx.settings().seed;
  opts.workers = ctx.settings().workers;
  const auto rep = experiments::global_property_check(w, ctx.full().test, opts);
  const double secs = seconds_since(t0);
  io::write_text_file(ctx.settings().work_dir / "criterion9_global.json",
                      experiments::to_json(rep).dump(2) + "\n");
  const double cv = rep.majority == dynamics::Phase::chaotic ? rep.chaotic_cv : rep.coefficient_of_variation;
  Outcome o;
  o.pass = rep.n_images >= 1000 && rep.unanimity >= 0.99 && cv < 0.5 && secs < 120.0;
  o.detail = "checkpoint J0 " + fmt(st.j0) + ", J " + fmt(st.j) + "; " + std::to_string(rep.n_images) +
             " images, " + std::to_string(rep.n_chaotic) + " chaotic / " + std::to_string(rep.n_ordered) +
             " ordered, unanimity " + fmt(rep.unanimity) + " (>= 0.99), " + dynamics::to_string(rep.majority) +
             " distance CV " + fmt(cv, 3) + " (< 0.5), " + fmt(secs, 3) + " s (< 120 s)";
  return o;
}

// ----------------------------------------------------------- criterion 10

Outcome determinism(Context& ctx) {
  const auto& st = ctx.settings();
  if (st.cli.empty()) return {false, "no --cli executable given"};
  if (!ctx.have_data()) return no_data(ctx);
  const auto t0 = Clock::now();
  const fs::path root = st.work_dir / "criterion10";
  fs::remove_all(root);
  const std::string data = "--data-dir '" + st.data_dir.string() + "' --subset 600 --test-subset 300 ";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"phase-map", "phase-map --grid 8 --n-units 64"},
      {"train", "train " + data + "--epochs 3"},
      {"sweep", "sweep " + data + "--vary batch --values 16 32 --epochs 6 --no-equalize"},
      {"collapse", "collapse " + data + "--epochs 6 --multipliers 1 2"},
      {"weight-decay", "weight-decay " + data + "--lambdas 0 0.001 --n-seeds 2 --epochs 3"},
      {"estimate-lambda", "estimate-lambda --a 0.004"},
      {"global-check", "global-check --data-dir '" + st.data_dir.string() + "' --max-images 300 --checkpoint '" +
                           (root / "w1" / "train" / "default" / "final.ckpt").string() + "'"},
      {"verify-checksums", "verify-checksums --data-dir '" + st.data_dir.string() + "'"}};
  std::vector<std::string> problems;
  std::size_t artifacts = 0;
  for (const auto& [name, args] : commands) {
    for (const char* variant : {"w1", "w2", "w2b"}) {
      const std::string workers = std::string(variant) == "w1" ? "1" : "2";
      const auto r = test::run_command("'" + st.cli + "' " + args + " --seed 7 --workers " + workers + " --out '" +
                                       (root / variant).string() + "'");
      if (r.exit_code != 0 && name != "verify-checksums") {
        problems.push_back(name + " (" + variant + ") exit " + std::to_string(r.exit_code));
      }
    }
  }
  for (const char* other : {"w2", "w2b"}) {
    for (const auto& diff : test::tree_differences(root / "w1", root / other)) problems.push_back(diff);
  }
  artifacts = test::count_files(root / "w1", ".csv") + test::count_files(root / "w1", ".json");
  Outcome o;
  o.pass = problems.empty() && artifacts > 0;
  o.detail = std::to_string(commands.size()) + " commands x {workers 1, workers 2, workers 2 again}: " +
             std::to_string(artifacts) + " CSV/JSON artifacts per tree, " +
             (problems.empty() ? std::string("all byte-identical") : "differences: " + problems.front()) + "; " +
             fmt(seconds_since(t0), 3) + " s";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  Settings s;
  std::string data_dir, work_dir = s.work_dir.string();
  std::vector<int> criteria;
  bool strict = false;
  std::vector<int> known_failures;
  app.add_option("--criteria", criteria, "Criteria to run (default: all)")->delimiter(',');
  app.add_option("--data-dir", data_dir, "Fashion-MNIST directory (fallback: $CHAOSEDGE_DATA_DIR)");
  app.add_option("--work-dir", work_dir, "Where run files and reports are written");
  app.add_option("--cli", s.cli, "Path to the chaosedge executable (criterion 10)");
  app.add_option("--workers", s.workers, "Threads for heatmap cells and evaluation");
  app.add_option("--seed", s.seed, "Master seed");
  app.add_option("--decay-epochs", s.decay_epochs, "Epochs of the weight-decay runs");
  app.add_option("--sweep-reference-epochs", s.sweep_reference_epochs, "Epochs of the eta=0.01 sweep run");
  app.add_flag("--strict", strict, "Exit non-zero on any FAIL");
  app.add_option("--known-failures", known_failures,
                 "Criteria whose FAIL is documented; any other FAIL, or an error, exits non-zero")
      ->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  if (data_dir.empty()) {
    const char* env = std::getenv("CHAOSEDGE_DATA_DIR");
    data_dir = env && *env ? env : CHAOSEDGE_TEST_DATA_DIR;
  }
  s.data_dir = data_dir;
  s.work_dir = work_dir;
  if (criteria.empty()) criteria = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  using Fn = Outcome (*)(Context&);
  const std::map<int, std::pair<const char*, Fn>> table{
      {1, {"analytic boundary anchor", boundary_anchor}},
      {2, {"phase-diagram cross-validation", phase_diagram}},
      {3, {"gradient correctness", gradient_check}},
      {4, {"ordered-phase linearity", ordered_linearity}},
      {5, {"scaling law", scaling_law}},
      {6, {"scale-factor collapse", scale_factor_collapse}},
      {7, {"lambda* pipeline", lambda_pipeline}},
      {8, {"optimal epoch near the edge", optimal_epoch}},
      {9, {"global property", global_property}},
      {10, {"determinism", determinism}}};

  Context ctx(s);
  const std::set<int> allowed(known_failures.begin(), known_failures.end());
  int passed = 0, unexpected = 0;
  json summary = json::object();
  for (int id : criteria) {
    const auto it = table.find(id);
    if (it == table.end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = it->second.second(ctx);
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
      ++unexpected;
    }
    const double secs = seconds_since(t0);
    std::cout << (out.pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << it->second.first << "): " << out.detail
              << "  [" << fmt(secs, 3) << " s]" << (!out.pass && allowed.count(id) ? "  (known failure)" : "")
              << std::endl;
    summary[std::to_string(id)] = {{"name", it->second.first}, {"pass", out.pass}, {"detail", out.detail},
                                   {"seconds", secs}};
    if (out.pass) {
      ++passed;
    } else if (strict || !allowed.count(id)) {
      ++unexpected;
    }
  }
  std::cout << passed << "/" << criteria.size() << " criteria passed" << std::endl;
  std::ostringstream name;
  name << "summary";
  for (int id : criteria) name << '_' << id;
  io::write_text_file(fs::path(s.work_dir) / (name.str() + ".json"), summary.dump(2) + "\n");
  return unexpected == 0 ? 0 : 1;
}
