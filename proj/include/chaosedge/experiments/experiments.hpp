#pragma once

// Empirical program on top of the trainer: ordered-phase fits, scaling sweeps,
// scale-factor collapse, weight-decay sweeps, the lambda* estimator and the
// global-property check of a trained hidden layer.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaosedge/data/dataset.hpp"
#include "chaosedge/dynamics/map.hpp"
#include "chaosedge/numerics/stats.hpp"
#include "chaosedge/train/trainer.hpp"

namespace chaosedge::experiments {

/// OLS of j_squared against epoch over records with j_squared < 1.
/// Needs at least five such records (InsufficientDataError otherwise).
LinearFit fit_ordered_phase(const train::TrainingRun& run);
inline constexpr std::size_t kMinOrderedPoints = 5;

// ---------------------------------------------------------------- sweeps

enum class Varied { eta, momentum, batch };
const char* to_string(Varied v) noexcept;
Varied parse_varied(const std::string& name);

/// eta -> eta, momentum -> 1/(1-alpha), batch -> 1/B.
double transformed_value(Varied varied, double value);
train::HyperParams with_value(const train::HyperParams& base, Varied varied, double value);

/// (max - min) / mean.
double relative_spread(const std::vector<double>& values);

struct RunPlanOptions {
  train::TrainOptions train;
  /// Concurrent training runs.
  int workers = 1;
};

/// Trains every configuration; output order matches input order regardless
/// of completion order.
std::vector<train::TrainingRun> run_all(const std::vector<train::HyperParams>& configs,
                                        const data::Dataset& train_set,
                                        const data::Dataset& test_set,
                                        const RunPlanOptions& options);

/// Epoch budget giving the same rescaled time (epoch x scale factor) as
/// `reference_epochs` at `reference_sf`, never below `min_epochs`.
std::size_t equal_time_epochs(const train::HyperParams& hyper, double reference_sf,
                              std::size_t reference_epochs, std::size_t min_epochs);

struct ScalingResult {
  Varied varied = Varied::eta;
  std::vector<double> values;
  std::vector<double> slopes_a;
  std::vector<double> transformed;
  std::vector<LinearFit> run_fits;
  LinearFit fit;
  std::vector<double> d_estimates;
  double d_mean = 0.0;
  double d_rel_spread = 0.0;
};

/// Builds the result from completed runs (one per value, same order).
ScalingResult summarize_scaling(Varied varied, const std::vector<double>& values,
                                const std::vector<train::TrainingRun>& runs);

struct SweepOptions {
  RunPlanOptions run;
  /// When set, each run gets equal_time_epochs(base_epochs at base's scale
  /// factor); otherwise every run uses base.epochs.
  bool equalize_rescaled_time = true;
  std::size_t min_epochs = 10;
};

struct SweepOutcome {
  ScalingResult result;
  std::vector<train::TrainingRun> runs;
};

SweepOutcome scaling_sweep(const train::HyperParams& base, Varied varied,
                           const std::vector<double>& values, const data::Dataset& train_set,
                           const data::Dataset& test_set, const SweepOptions& options);

/// Values outside the ranges explored for each knob (eta in [5e-4, 0.1],
/// alpha in [0, 0.95], B in [4, 512]); callers print these as warnings.
std::vector<std::string> out_of_range_warnings(Varied varied, const std::vector<double>& values);

// -------------------------------------------------------------- collapse

struct CollapseReport {
  std::vector<std::string> run_ids;
  bool rescaled_epochs = false;
  double max_j2_deviation_ordered = 0.0;
  double max_testloss_deviation = 0.0;
  /// Number of aligned points that entered the J^2 comparison.
  std::size_t compared_points = 0;
};

/// Aligns runs on raw epochs or on epoch x scale factor and compares every
/// pair over their common ordered segment (linear interpolation on the
/// partner's grid). Test-loss deviation is max - min of each run's minimum.
CollapseReport collapse_check(const std::vector<train::TrainingRun>& runs,
                              const std::vector<std::string>& run_ids, bool rescale_epochs);

// ---------------------------------------------------------- weight decay

struct LambdaEstimate {
  double a = 0.0;
  double d = 0.0;
  std::size_t s = 0;
  double j_star_sq = 1.0;
  double lambda_star = 0.0;
  double delta_j2_plus = 0.0;
  double delta_j2_minus_at_saturation = 0.0;
};

/// D = A (1-alpha) B / eta, lambda* = D / (4 S J*^2), with the per-mini-batch
/// growth A B / S and decay 4 eta lambda* J*^2 / (1-alpha) (equal by
/// construction; checked to 1e-12).
LambdaEstimate estimate_lambda(double fit_a, const train::HyperParams& hyper, std::size_t s,
                               double j_star_sq = 1.0);

/// Mean j_squared over the final `fraction` of epochs (at least one record,
/// epoch 0 excluded unless it is the only record).
double saturation_j2(const train::TrainingRun& run, double fraction = 0.2);

struct WeightDecayPoint {
  double lambda = 0.0;
  std::vector<double> saturation_per_seed;
  std::vector<double> best_accuracy_per_seed;
  double saturation_j2 = 0.0;  // mean over seeds
  double saturation_std = 0.0;
  double best_test_accuracy = 0.0;
  double best_accuracy_std = 0.0;
  dynamics::Phase terminal_phase = dynamics::Phase::ordered;
};

/// Builds a point from the runs of one lambda (any number of seeds).
WeightDecayPoint summarize_weight_decay(double lambda, const std::vector<train::TrainingRun>& runs);

struct WeightDecayOutcome {
  std::vector<WeightDecayPoint> points;  // sorted by lambda
  std::vector<train::TrainingRun> runs;  // lambda-major, then seed
};

/// Seeds are hyper.seed, hyper.seed + 1, ...
WeightDecayOutcome weight_decay_sweep(const std::vector<double>& lambdas,
                                      const train::HyperParams& hyper, std::size_t n_seeds,
                                      const data::Dataset& train_set,
                                      const data::Dataset& test_set,
                                      const RunPlanOptions& options);

/// Lambda at which saturation crosses J^2 = 1, interpolated linearly in
/// log(lambda) between the bracketing positive-lambda points. Empty when the
/// sweep does not bracket the crossing.
std::optional<double> empirical_lambda(const std::vector<WeightDecayPoint>& points,
                                       double j_star_sq = 1.0);

// ------------------------------------------------------- global property

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
};

struct GlobalPropertyReport {
  std::size_t n_images = 0;
  double mean = 0.0;  // of final distances
  double std = 0.0;
  double coefficient_of_variation = 0.0;
  /// Same statistics restricted to images classified chaotic (0 if none).
  double chaotic_mean = 0.0;
  double chaotic_std = 0.0;
  double chaotic_cv = 0.0;
  double mean_ratio = 0.0;
  std::size_t n_ordered = 0;
  std::size_t n_chaotic = 0;
  dynamics::Phase majority = dynamics::Phase::ordered;
  double unanimity = 0.0;  // fraction agreeing with the majority
  Histogram histogram;
};

struct GlobalPropertyOptions {
  double noise_std = dynamics::kDefaultNoiseStd;
  std::size_t tau = dynamics::kDefaultTau;
  std::size_t max_images = 10000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::size_t bins = 20;
};

/// Runs the perturbation test from every test image (up to max_images) with
/// the hidden-layer matrix. Images are processed in fixed blocks, each with
/// its own derived RNG stream, so the result is independent of `workers`.
GlobalPropertyReport global_property_check(const Matrix& w_hidden, const data::Dataset& images,
                                           const GlobalPropertyOptions& options);

// ------------------------------------------------------------- reporting

nlohmann::json to_json(const LinearFit& fit);
nlohmann::json to_json(const ScalingResult& r);
nlohmann::json to_json(const CollapseReport& r);
nlohmann::json to_json(const LambdaEstimate& r);
nlohmann::json to_json(const WeightDecayPoint& p);
nlohmann::json to_json(const GlobalPropertyReport& r);

std::string scaling_summary_md(const ScalingResult& r);
std::string collapse_summary_md(const CollapseReport& r);
std::string lambda_summary_md(const LambdaEstimate& r);
std::string weight_decay_summary_md(const std::vector<WeightDecayPoint>& points,
                                    const std::optional<double>& lambda_empirical);
std::string global_summary_md(const GlobalPropertyReport& r);

}  // namespace chaosedge::experiments
