#include "chaosedge/experiments/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chaosedge/io/format.hpp"
#include "chaosedge/numerics/kernels.hpp"

namespace chaosedge::experiments {

using nlohmann::json;

namespace {

// Records up to (not including) the first one with J^2 >= 1.
std::size_t ordered_prefix(const train::TrainingRun& run) {
  std::size_t n = 0;
  while (n < run.records.size() && run.records[n].j_squared < 1.0) ++n;
  return n;
}

struct Curve {
  std::vector<double> t;
  std::vector<double> j2;
};

Curve ordered_curve(const train::TrainingRun& run, bool rescale) {
  Curve c;
  const std::size_t n = ordered_prefix(run);
  const double unit = rescale ? run.scale_factor : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    c.t.push_back(static_cast<double>(run.records[i].epoch) * unit);
    c.j2.push_back(run.records[i].j_squared);
  }
  return c;
}

// Linear interpolation of `c` at t; t must lie inside [t.front(), t.back()].
double interpolate(const Curve& c, double t) {
  const auto it = std::lower_bound(c.t.begin(), c.t.end(), t);
  const auto i = static_cast<std::size_t>(it - c.t.begin());
  if (i < c.t.size() && c.t[i] == t) return c.j2[i];
  const double f = (t - c.t[i - 1]) / (c.t[i] - c.t[i - 1]);
  return c.j2[i - 1] + f * (c.j2[i] - c.j2[i - 1]);
}

double population_std(const std::vector<double>& v) { return v.size() < 2 ? 0.0 : stddev(v); }

}  // namespace

LinearFit fit_ordered_phase(const train::TrainingRun& run) {
  const std::size_t n = ordered_prefix(run);
  if (n < kMinOrderedPoints) {
    throw InsufficientDataError("ordered-phase fit needs at least " +
                                std::to_string(kMinOrderedPoints) + " records with J^2 < 1, got " +
                                std::to_string(n));
  }
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = static_cast<double>(run.records[i].epoch);
    ys[i] = run.records[i].j_squared;
  }
  return ols_fit(xs, ys);
}

const char* to_string(Varied v) noexcept {
  switch (v) {
    case Varied::eta: return "eta";
    case Varied::momentum: return "momentum";
    case Varied::batch: return "batch";
  }
  return "?";
}

Varied parse_varied(const std::string& name) {
  if (name == "eta") return Varied::eta;
  if (name == "momentum" || name == "alpha") return Varied::momentum;
  if (name == "batch") return Varied::batch;
  throw std::invalid_argument("unknown sweep variable '" + name + "' (expected eta, momentum or batch)");
}

double transformed_value(Varied varied, double value) {
  switch (varied) {
    case Varied::eta: return value;
    case Varied::momentum: return 1.0 / (1.0 - value);
    case Varied::batch: return 1.0 / value;
  }
  return value;
}

train::HyperParams with_value(const train::HyperParams& base, Varied varied, double value) {
  auto h = base;
  switch (varied) {
    case Varied::eta: h.eta = value; break;
    case Varied::momentum: h.alpha = value; break;
    case Varied::batch:
      if (!(value >= 1.0) || value != std::floor(value)) {
        throw std::invalid_argument("batch sizes must be positive integers");
      }
      h.batch = static_cast<std::size_t>(value);
      break;
  }
  h.validate();
  return h;
}

double relative_spread(const std::vector<double>& values) {
  if (values.empty()) throw InsufficientDataError("relative_spread of an empty set");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double m = mean(values);
  if (m == 0.0) throw std::domain_error("relative_spread: zero mean");
  return (*hi - *lo) / std::abs(m);
}

std::vector<train::TrainingRun> run_all(const std::vector<train::HyperParams>& configs,
                                        const data::Dataset& train_set,
                                        const data::Dataset& test_set,
                                        const RunPlanOptions& options) {
  std::vector<train::TrainingRun> runs(configs.size());
  std::vector<std::string> errors(configs.size());
  const int workers = kernels::resolve_workers(options.workers);
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (configs.size() > 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(configs.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      runs[k] = train::train(train_set, test_set, configs[k], options.train);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!errors[k].empty()) throw std::runtime_error("run " + std::to_string(k) + ": " + errors[k]);
  }
  return runs;
}

std::size_t equal_time_epochs(const train::HyperParams& hyper, double reference_sf,
                              std::size_t reference_epochs, std::size_t min_epochs) {
  const double sf = train::scale_factor(hyper);
  if (!(sf > 0.0)) throw std::invalid_argument("equal_time_epochs: scale factor must be positive");
  const double e = std::ceil(static_cast<double>(reference_epochs) * reference_sf / sf - 1e-9);
  return std::max(min_epochs, static_cast<std::size_t>(e));
}

ScalingResult summarize_scaling(Varied varied, const std::vector<double>& values,
                                const std::vector<train::TrainingRun>& runs) {
  if (values.size() != runs.size()) throw std::invalid_argument("summarize_scaling: values/runs differ in length");
  ScalingResult r;
  r.varied = varied;
  r.values = values;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    LinearFit f;
    try {
      f = fit_ordered_phase(runs[i]);
    } catch (const std::exception& e) {
      throw InsufficientDataError(std::string(to_string(varied)) + "=" + io::fmt(values[i]) + ": " +
                                  e.what());
    }
    const auto& h = runs[i].hyper;
    r.run_fits.push_back(f);
    r.slopes_a.push_back(f.slope);
    r.transformed.push_back(transformed_value(varied, values[i]));
    r.d_estimates.push_back(f.slope * (1.0 - h.alpha) * static_cast<double>(h.batch) / h.eta);
  }
  r.fit = ols_fit(r.transformed, r.slopes_a);
  r.d_mean = mean(r.d_estimates);
  r.d_rel_spread = relative_spread(r.d_estimates);
  return r;
}

SweepOutcome scaling_sweep(const train::HyperParams& base, Varied varied,
                           const std::vector<double>& values, const data::Dataset& train_set,
                           const data::Dataset& test_set, const SweepOptions& options) {
  if (values.size() < 2) throw InsufficientDataError("a sweep needs at least two values");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<train::HyperParams> configs;
  for (double v : sorted) {
    auto h = with_value(base, varied, v);
    if (options.equalize_rescaled_time) {
      h.epochs = equal_time_epochs(h, train::scale_factor(base), base.epochs, options.min_epochs);
    }
    configs.push_back(h);
  }
  SweepOutcome out;
  out.runs = run_all(configs, train_set, test_set, options.run);
  out.result = summarize_scaling(varied, sorted, out.runs);
  return out;
}

std::vector<std::string> out_of_range_warnings(Varied varied, const std::vector<double>& values) {
  double lo = 0, hi = 0;
  switch (varied) {
    case Varied::eta: lo = 5e-4; hi = 0.1; break;
    case Varied::momentum: lo = 0.0; hi = 0.95; break;
    case Varied::batch: lo = 4; hi = 512; break;
  }
  std::vector<std::string> w;
  for (double v : values) {
    if (v < lo || v > hi) {
      w.push_back(std::string(to_string(varied)) + "=" + io::fmt(v) + " outside [" + io::fmt(lo) +
                  ", " + io::fmt(hi) + "]");
    }
  }
  return w;
}

CollapseReport collapse_check(const std::vector<train::TrainingRun>& runs,
                              const std::vector<std::string>& run_ids, bool rescale_epochs) {
  if (runs.size() < 2) throw InsufficientDataError("collapse_check needs at least two runs");
  CollapseReport rep;
  rep.run_ids = run_ids;
  if (rep.run_ids.size() != runs.size()) {
    rep.run_ids.clear();
    for (std::size_t i = 0; i < runs.size(); ++i) rep.run_ids.push_back("run" + std::to_string(i));
  }
  rep.rescaled_epochs = rescale_epochs;

  std::vector<Curve> curves;
  for (const auto& r : runs) curves.push_back(ordered_curve(r, rescale_epochs));
  for (std::size_t a = 0; a < curves.size(); ++a) {
    for (std::size_t b = 0; b < curves.size(); ++b) {
      if (a == b || curves[b].t.empty()) continue;
      for (std::size_t i = 0; i < curves[a].t.size(); ++i) {
        const double t = curves[a].t[i];
        if (t < curves[b].t.front() || t > curves[b].t.back()) continue;
        rep.max_j2_deviation_ordered =
            std::max(rep.max_j2_deviation_ordered, std::abs(curves[a].j2[i] - interpolate(curves[b], t)));
        ++rep.compared_points;
      }
    }
  }

  std::vector<double> best;
  for (const auto& r : runs) best.push_back(r.records.at(train::argmin_test_loss(r.records)).test_loss);
  const auto [lo, hi] = std::minmax_element(best.begin(), best.end());
  rep.max_testloss_deviation = *hi - *lo;
  return rep;
}

LambdaEstimate estimate_lambda(double fit_a, const train::HyperParams& hyper, std::size_t s,
                               double j_star_sq) {
  if (!(fit_a > 0.0)) throw std::invalid_argument("estimate_lambda: slope A must be positive");
  if (s == 0) throw std::invalid_argument("estimate_lambda: sample count must be >= 1");
  if (!(j_star_sq > 0.0)) throw std::invalid_argument("estimate_lambda: J*^2 must be positive");
  if (!(hyper.eta > 0.0)) throw std::invalid_argument("estimate_lambda: eta must be positive");
  hyper.validate();
  LambdaEstimate e;
  const double b = static_cast<double>(hyper.batch);
  const double sd = static_cast<double>(s);
  e.a = fit_a;
  e.s = s;
  e.j_star_sq = j_star_sq;
  e.d = fit_a * (1.0 - hyper.alpha) * b / hyper.eta;
  e.lambda_star = e.d / (4.0 * sd * j_star_sq);
  e.delta_j2_plus = fit_a * b / sd;
  e.delta_j2_minus_at_saturation = 4.0 * hyper.eta * e.lambda_star * j_star_sq / (1.0 - hyper.alpha);
  if (std::abs(e.delta_j2_plus - e.delta_j2_minus_at_saturation) > 1e-12 * std::abs(e.delta_j2_plus)) {
    throw std::logic_error("estimate_lambda: growth and decay increments disagree");
  }
  return e;
}

double saturation_j2(const train::TrainingRun& run, double fraction) {
  if (run.records.empty()) throw InsufficientDataError("saturation_j2: run has no records");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("saturation_j2: fraction outside (0, 1]");
  const std::size_t trained = run.records.size() - 1;
  if (trained == 0) return run.records.front().j_squared;
  const auto window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(trained) - 1e-9)));
  double s = 0.0;
  for (std::size_t i = run.records.size() - window; i < run.records.size(); ++i) s += run.records[i].j_squared;
  return s / static_cast<double>(window);
}

WeightDecayPoint summarize_weight_decay(double lambda, const std::vector<train::TrainingRun>& runs) {
  if (runs.empty()) throw InsufficientDataError("summarize_weight_decay: no runs");
  WeightDecayPoint p;
  p.lambda = lambda;
  for (const auto& r : runs) {
    p.saturation_per_seed.push_back(saturation_j2(r));
    double best = 0.0;
    for (const auto& rec : r.records) best = std::max(best, rec.test_accuracy);
    p.best_accuracy_per_seed.push_back(best);
  }
  p.saturation_j2 = mean(p.saturation_per_seed);
  p.saturation_std = population_std(p.saturation_per_seed);
  p.best_test_accuracy = mean(p.best_accuracy_per_seed);
  p.best_accuracy_std = population_std(p.best_accuracy_per_seed);
  p.terminal_phase = p.saturation_j2 > 1.0 ? dynamics::Phase::chaotic : dynamics::Phase::ordered;
  return p;
}

WeightDecayOutcome weight_decay_sweep(const std::vector<double>& lambdas,
                                      const train::HyperParams& hyper, std::size_t n_seeds,
                                      const data::Dataset& train_set,
                                      const data::Dataset& test_set,
                                      const RunPlanOptions& options) {
  if (lambdas.empty() || n_seeds == 0) throw InsufficientDataError("weight_decay_sweep: nothing to run");
  std::vector<double> sorted = lambdas;
  std::sort(sorted.begin(), sorted.end());
  std::vector<train::HyperParams> configs;
  for (double l : sorted) {
    for (std::size_t s = 0; s < n_seeds; ++s) {
      auto h = hyper;
      h.lambda = l;
      h.seed = hyper.seed + s;
      h.validate();
      configs.push_back(h);
    }
  }
  WeightDecayOutcome out;
  out.runs = run_all(configs, train_set, test_set, options);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    std::vector<train::TrainingRun> group(out.runs.begin() + static_cast<std::ptrdiff_t>(i * n_seeds),
                                          out.runs.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_seeds));
    out.points.push_back(summarize_weight_decay(sorted[i], group));
  }
  return out;
}

std::optional<double> empirical_lambda(const std::vector<WeightDecayPoint>& points, double j_star_sq) {
  std::vector<WeightDecayPoint> pos;
  for (const auto& p : points) {
    if (p.lambda > 0.0) pos.push_back(p);
  }
  std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
    const double y0 = pos[i].saturation_j2 - j_star_sq;
    const double y1 = pos[i + 1].saturation_j2 - j_star_sq;
    if (y0 == 0.0) return pos[i].lambda;
    if ((y0 > 0.0) != (y1 > 0.0) || y1 == 0.0) {
      const double l0 = std::log(pos[i].lambda), l1 = std::log(pos[i + 1].lambda);
      return std::exp(l0 + (l1 - l0) * y0 / (y0 - y1));
    }
  }
  return std::nullopt;
}

GlobalPropertyReport global_property_check(const Matrix& w_hidden, const data::Dataset& images,
                                           const GlobalPropertyOptions& options) {
  if (options.tau < 1) throw std::invalid_argument("global_property_check: tau must be >= 1");
  if (!w_hidden.is_square() || w_hidden.rows() != images.dim()) {
    throw ShapeError("global_property_check: W " + shape_string(w_hidden) + " vs image dim " +
                     std::to_string(images.dim()));
  }
  const std::size_t n = std::min(options.max_images, images.n_samples());
  if (n == 0) throw InsufficientDataError("global_property_check: no images");
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<dynamics::DistanceResult> results(n);
  const RngStream root(options.seed, 0x676c6f62);

#pragma omp parallel for schedule(dynamic) num_threads(kernels::resolve_workers(options.workers))
  for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(blocks); ++bi) {
    const auto b = static_cast<std::size_t>(bi);
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(n, begin + kBlock);
    std::vector<std::size_t> idx(end - begin);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
    Matrix x0s;
    std::vector<std::uint8_t> labels;
    data::gather(images, idx, x0s, labels);
    auto rng = root.derive(b);
    const auto part = dynamics::asymptotic_distance_batch(w_hidden, x0s, options.noise_std, options.tau, rng);
    std::copy(part.begin(), part.end(), results.begin() + static_cast<std::ptrdiff_t>(begin));
  }

  GlobalPropertyReport rep;
  rep.n_images = n;
  std::vector<double> finals(n), ratios(n), chaotic;
  for (std::size_t i = 0; i < n; ++i) {
    finals[i] = results[i].final_distance;
    ratios[i] = results[i].ratio;
    if (dynamics::classify_ratio(results[i].ratio) == dynamics::Phase::ordered) {
      ++rep.n_ordered;
    } else {
      ++rep.n_chaotic;
      chaotic.push_back(finals[i]);
    }
  }
  rep.mean = mean(finals);
  rep.std = population_std(finals);
  rep.coefficient_of_variation = rep.mean > 0.0 ? rep.std / rep.mean : 0.0;
  if (!chaotic.empty()) {
    rep.chaotic_mean = mean(chaotic);
    rep.chaotic_std = population_std(chaotic);
    rep.chaotic_cv = rep.chaotic_mean > 0.0 ? rep.chaotic_std / rep.chaotic_mean : 0.0;
  }
  rep.mean_ratio = mean(ratios);
  rep.majority = rep.n_chaotic > rep.n_ordered ? dynamics::Phase::chaotic : dynamics::Phase::ordered;
  rep.unanimity = static_cast<double>(std::max(rep.n_ordered, rep.n_chaotic)) / static_cast<double>(n);

  const std::size_t bins = std::max<std::size_t>(1, options.bins);
  const auto [lo, hi] = std::minmax_element(finals.begin(), finals.end());
  const double width = *hi > *lo ? (*hi - *lo) / static_cast<double>(bins) : 1.0;
  rep.histogram.counts.assign(bins, 0);
  for (std::size_t k = 0; k <= bins; ++k) rep.histogram.edges.push_back(*lo + width * static_cast<double>(k));
  for (double f : finals) {
    auto k = static_cast<std::size_t>((f - *lo) / width);
    ++rep.histogram.counts[std::min(k, bins - 1)];
  }
  return rep;
}

// ------------------------------------------------------------- reporting

json to_json(const LinearFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared},
          {"n_points", fit.n_points}};
}

json to_json(const ScalingResult& r) {
  json fits = json::array();
  for (const auto& f : r.run_fits) fits.push_back(to_json(f));
  return {{"varied", to_string(r.varied)},
          {"values", r.values},
          {"slopes_a", r.slopes_a},
          {"transformed", r.transformed},
          {"run_fits", fits},
          {"fit", to_json(r.fit)},
          {"d_estimates", r.d_estimates},
          {"d_mean", r.d_mean},
          {"d_rel_spread", r.d_rel_spread}};
}

json to_json(const CollapseReport& r) {
  return {{"runs", r.run_ids},
          {"rescaled_epochs", r.rescaled_epochs},
          {"max_j2_deviation_ordered", r.max_j2_deviation_ordered},
          {"max_testloss_deviation", r.max_testloss_deviation},
          {"compared_points", r.compared_points}};
}

json to_json(const LambdaEstimate& r) {
  return {{"a", r.a},
          {"d", r.d},
          {"s", r.s},
          {"j_star_sq", r.j_star_sq},
          {"lambda_star", r.lambda_star},
          {"delta_j2_plus", r.delta_j2_plus},
          {"delta_j2_minus_at_saturation", r.delta_j2_minus_at_saturation}};
}

json to_json(const WeightDecayPoint& p) {
  return {{"lambda", p.lambda},
          {"saturation_j2", p.saturation_j2},
          {"saturation_std", p.saturation_std},
          {"saturation_per_seed", p.saturation_per_seed},
          {"best_test_accuracy", p.best_test_accuracy},
          {"best_accuracy_std", p.best_accuracy_std},
          {"best_accuracy_per_seed", p.best_accuracy_per_seed},
          {"terminal_phase", dynamics::to_string(p.terminal_phase)}};
}

json to_json(const GlobalPropertyReport& r) {
  return {{"n_images", r.n_images},
          {"mean", r.mean},
          {"std", r.std},
          {"coefficient_of_variation", r.coefficient_of_variation},
          {"chaotic", {{"mean", r.chaotic_mean}, {"std", r.chaotic_std}, {"cv", r.chaotic_cv}}},
          {"mean_ratio", r.mean_ratio},
          {"n_ordered", r.n_ordered},
          {"n_chaotic", r.n_chaotic},
          {"majority", dynamics::to_string(r.majority)},
          {"unanimity", r.unanimity},
          {"histogram", {{"edges", r.histogram.edges}, {"counts", r.histogram.counts}}}};
}

std::string scaling_summary_md(const ScalingResult& r) {
  std::ostringstream o;
  o << "# Scaling sweep over " << to_string(r.varied) << "\n\n"
    << "| " << to_string(r.varied) << " | transformed | A | r^2 (J^2 fit) | D |\n"
    << "|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    o << "| " << io::fmt(r.values[i]) << " | " << io::fmt(r.transformed[i]) << " | "
      << io::fmt(r.slopes_a[i]) << " | " << io::fmt(r.run_fits[i].r_squared) << " | "
      << io::fmt(r.d_estimates[i]) << " |\n";
  }
  o << "\nA vs transformed: slope " << io::fmt(r.fit.slope) << ", intercept " << io::fmt(r.fit.intercept)
    << ", r^2 " << io::fmt(r.fit.r_squared) << "\n\n"
    << "D mean " << io::fmt(r.d_mean) << ", relative spread " << io::fmt(r.d_rel_spread) << "\n";
  return o.str();
}

std::string collapse_summary_md(const CollapseReport& r) {
  std::ostringstream o;
  o << "# Scale-factor collapse\n\n"
    << "| runs | alignment | max ordered-phase \\|dJ^2\\| | max \\|d test loss\\| | points |\n"
    << "|---|---|---|---|---|\n| ";
  for (std::size_t i = 0; i < r.run_ids.size(); ++i) o << (i ? ", " : "") << r.run_ids[i];
  o << " | " << (r.rescaled_epochs ? "epoch x scale factor" : "epoch") << " | "
    << io::fmt(r.max_j2_deviation_ordered) << " | " << io::fmt(r.max_testloss_deviation) << " | "
    << r.compared_points << " |\n";
  return o.str();
}

std::string lambda_summary_md(const LambdaEstimate& r) {
  std::ostringstream o;
  o << "# Weight-decay estimate\n\n| A | D | S | J*^2 | lambda* | dJ2+ | dJ2- |\n|---|---|---|---|---|---|---|\n"
    << "| " << io::fmt(r.a) << " | " << io::fmt(r.d) << " | " << r.s << " | " << io::fmt(r.j_star_sq)
    << " | " << io::fmt(r.lambda_star) << " | " << io::fmt(r.delta_j2_plus) << " | "
    << io::fmt(r.delta_j2_minus_at_saturation) << " |\n";
  return o.str();
}

std::string weight_decay_summary_md(const std::vector<WeightDecayPoint>& points,
                                    const std::optional<double>& lambda_empirical) {
  std::ostringstream o;
  o << "# Weight-decay sweep\n\n| lambda | saturation J^2 | std | best accuracy | std | terminal phase |\n"
    << "|---|---|---|---|---|---|\n";
  for (const auto& p : points) {
    o << "| " << io::fmt(p.lambda) << " | " << io::fmt(p.saturation_j2) << " | " << io::fmt(p.saturation_std)
      << " | " << io::fmt(p.best_test_accuracy) << " | " << io::fmt(p.best_accuracy_std) << " | "
      << dynamics::to_string(p.terminal_phase) << " |\n";
  }
  o << "\nEmpirical lambda (saturation crosses J^2 = 1): "
    << (lambda_empirical ? io::fmt(*lambda_empirical) : std::string("not bracketed")) << "\n";
  return o.str();
}

std::string global_summary_md(const GlobalPropertyReport& r) {
  std::ostringstream o;
  o << "# Global property check\n\n| images | ordered | chaotic | unanimity | mean final distance | std | CV |\n"
    << "|---|---|---|---|---|---|---|\n| " << r.n_images << " | " << r.n_ordered << " | " << r.n_chaotic
    << " | " << io::fmt(r.unanimity) << " | " << io::fmt(r.mean) << " | " << io::fmt(r.std) << " | "
    << io::fmt(r.coefficient_of_variation) << " |\n";
  if (r.n_chaotic > 0) {
    o << "\nChaotic images only: mean " << io::fmt(r.chaotic_mean) << ", std " << io::fmt(r.chaotic_std)
      << ", CV " << io::fmt(r.chaotic_cv) << "\n";
  }
  return o.str();
}

}  // namespace chaosedge::experiments
