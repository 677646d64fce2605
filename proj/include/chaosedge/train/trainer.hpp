#pragma once

// SGD with momentum and L2 weight decay, the epoch loop, and per-epoch
// phase-coordinate logging of the hidden-layer weights.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaosedge/data/dataset.hpp"
#include "chaosedge/model/network.hpp"

namespace chaosedge::train {

struct HyperParams {
  double eta = 0.01;
  double alpha = 0.0;
  std::size_t batch = 32;
  double lambda = 0.0;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Velocity {
  Matrix v_hidden;
  Matrix v_out;
};

Velocity zero_velocity(const model::NetworkParams& params);

/// v <- alpha v - eta (g + 2 lambda w);  w <- w + v, for both layers.
void sgd_momentum_step(model::NetworkParams& params, Velocity& velocity,
                       const model::Gradients& grads, const HyperParams& hyper);

/// eta / ((1 - alpha) B)
double scale_factor(const HyperParams& hyper);
/// eta S / ((1 - alpha) B)
double noise_scale(const HyperParams& hyper, std::size_t n_samples);

struct EpochRecord {
  std::size_t epoch = 0;
  double j0 = 0.0;
  double j = 0.0;
  double j_squared = 0.0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
};

/// Hidden-layer statistics sampled after individual steps (debug only).
struct StepRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double j0 = 0.0;
  double j_squared = 0.0;
};

struct TrainOptions {
  model::InitSpec init;
  /// Stop early once J^2 >= stop_at_j2 and `patience` further epochs passed
  /// without a new test-loss minimum. Unset: always run hyper.epochs.
  std::optional<double> stop_at_j2;
  std::size_t patience = 20;
  /// Keep a copy of the parameters at the minimum-test-loss epoch.
  bool keep_best_params = false;
  /// Record hidden-layer stats every `step_stats_every` steps (0 = off).
  std::size_t step_stats_every = 0;
  std::size_t eval_batch = 1000;
  int eval_workers = 1;
  /// Called after each record is appended (progress reporting).
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainingRun {
  HyperParams hyper;
  model::InitSpec init;
  std::size_t n_train = 0;
  std::vector<EpochRecord> records;
  std::vector<StepRecord> step_records;
  double scale_factor = 0.0;
  double noise_scale = 0.0;
  std::size_t optimal_epoch = 0;
  bool stopped_early = false;
  model::NetworkParams final_params;
  std::optional<model::NetworkParams> best_params;
};

/// Non-finite loss during training; names where it happened.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t epoch, std::size_t step);
  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t epoch_;
  std::size_t step_;
};

/// Deterministic in (data, hyper, options). Initialization draws from
/// RngStream(seed, 0), per-epoch shuffles from RngStream(seed, 1).
TrainingRun train(const data::Dataset& train_set, const data::Dataset& test_set,
                  const HyperParams& hyper, const TrainOptions& options = {});

/// Index of the smallest test loss (earliest on ties).
std::size_t argmin_test_loss(const std::vector<EpochRecord>& records);

inline constexpr const char* kRunCsvHeader =
    "epoch,j0,j,j_squared,train_loss,test_loss,test_accuracy";

std::string run_csv(const TrainingRun& run);
/// Hyperparameters, init, scale factor, noise scale, optimal epoch. Contains
/// nothing time-dependent so identical runs produce identical bytes.
std::string run_json(const TrainingRun& run);
void write_run(const std::filesystem::path& dir, const TrainingRun& run);

/// Reads back records and metadata written by write_run (no parameters).
TrainingRun read_run(const std::filesystem::path& dir);

}  // namespace chaosedge::train
