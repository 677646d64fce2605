#pragma once

// Single-hidden-layer classifier: h = tanh(x W^T) with W square and no bias,
// followed by a bias-free softmax layer p = softmax(h W_out^T).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "chaosedge/data/dataset.hpp"
#include "chaosedge/numerics/matrix.hpp"
#include "chaosedge/numerics/rng.hpp"

namespace chaosedge::model {

struct NetworkParams {
  Matrix w_hidden;  // N x N
  Matrix w_out;     // C x N

  std::size_t n_units() const noexcept { return w_hidden.rows(); }
  std::size_t n_classes() const noexcept { return w_out.rows(); }
  void validate() const;
};

struct Gradients {
  Matrix g_hidden;
  Matrix g_out;
};

struct ForwardCache {
  Matrix x;  // B x N input
  Matrix h;  // B x N hidden activations
  Matrix p;  // B x C class probabilities
};

struct InitSpec {
  double j0 = 0.0;
  double j = 0.5;
  /// Output-layer std; defaults to 1/sqrt(N).
  std::optional<double> out_std;
};

/// Hidden entries ~ N(J0/N, J^2/N), output entries ~ N(0, out_std^2), drawn
/// in that order from `rng`.
NetworkParams init_network(std::size_t n_units, std::size_t n_classes, const InitSpec& spec,
                           RngStream& rng);

/// Row-wise softmax, in place; the row maximum is subtracted first.
void softmax_rows(Matrix& logits);

ForwardCache forward(const NetworkParams& params, const Matrix& x);
void forward_into(const NetworkParams& params, const Matrix& x, ForwardCache& cache);

struct LossAndGrads {
  double loss = 0.0;
  Gradients grads;
  ForwardCache cache;
};

/// Mean cross-entropy over the batch and its gradients.
LossAndGrads loss_and_grads(const NetworkParams& params, const Matrix& x,
                            std::span<const std::uint8_t> labels);

/// Allocation-free variant for the training loop; returns the loss.
/// `scratch` holds d_logits and d_h between calls.
struct BackpropScratch {
  Matrix d_logits;
  Matrix d_h;
};
double loss_and_grads_into(const NetworkParams& params, const Matrix& x,
                           std::span<const std::uint8_t> labels, ForwardCache& cache,
                           Gradients& grads, BackpropScratch& scratch);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Mean cross-entropy and top-1 accuracy (ties go to the lowest class index).
/// Batches of `batch` samples are scored independently and reduced in order.
Evaluation evaluate(const NetworkParams& params, const data::Dataset& ds,
                    std::size_t batch = 1000, int workers = 1);

/// Where a set of parameters came from.
struct SeedLineage {
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
};

/// Binary checkpoint: "CECK" magic, version, lineage, then both matrices as
/// (rows, cols, little-endian doubles). Round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params,
                     const SeedLineage& lineage);
std::pair<NetworkParams, SeedLineage> load_checkpoint(const std::filesystem::path& path);

}  // namespace chaosedge::model
