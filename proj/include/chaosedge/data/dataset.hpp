#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaosedge/numerics/matrix.hpp"
#include "chaosedge/numerics/rng.hpp"

namespace chaosedge::data {

inline constexpr std::size_t kNumClasses = 10;
inline constexpr std::size_t kImageDim = 784;

/// S x N images in [0, 1] with one class id per row.
struct Dataset {
  Matrix images;
  std::vector<std::uint8_t> labels;

  std::size_t n_samples() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return images.cols(); }
  /// Throws std::invalid_argument if any invariant is broken.
  void validate() const;
};

/// Parse failure in an IDX file. `field` names what was wrong
/// ("image magic", "label count", "pixel data", ...).
class IdxParseError : public std::runtime_error {
 public:
  IdxParseError(std::string file, std::string field, const std::string& detail);
  const std::string& file() const noexcept { return file_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string file_;
  std::string field_;
};

/// Reads a big-endian IDX image/label pair, gzip-compressed or raw (detected
/// from the 0x1f 0x8b magic). Pixels are divided by 255 and flattened row-major.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// Raw file bytes, transparently gunzipped.
std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path);

struct FashionMnistFiles {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};

/// Canonical filenames inside `dir` (".gz" variant preferred when present).
FashionMnistFiles locate_fashion_mnist(const std::filesystem::path& dir);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};
TrainTestSplit load_fashion_mnist(const std::filesystem::path& dir);

/// Drop-remainder mini-batch schedule for one epoch.
struct BatchPlan {
  std::size_t batch_size = 0;
  std::vector<std::size_t> order;  // permutation of sample indices
  std::size_t n_batches = 0;       // floor(S / B)

  std::span<const std::size_t> batch(std::size_t k) const {
    return std::span<const std::size_t>(order).subspan(k * batch_size, batch_size);
  }
};

/// Fresh uniform permutation drawn from `rng`. Throws for B outside [1, S].
BatchPlan plan_batches(std::size_t n_samples, std::size_t batch_size, RngStream& rng);

/// Copies the rows named by `indices` into `images` / `labels`.
void gather(const Dataset& ds, std::span<const std::size_t> indices, Matrix& images,
            std::vector<std::uint8_t>& labels);

/// k samples without replacement, stratified by class (largest-remainder
/// quotas), kept in their original order.
Dataset subset(const Dataset& ds, std::size_t k, RngStream& rng);

/// First `k` samples (no shuffling).
Dataset head(const Dataset& ds, std::size_t k);

/// Binary cache: "CEDS" magic, version, S, N, raw little-endian doubles, labels.
void save_cache(const Dataset& ds, const std::filesystem::path& path);
Dataset load_cache(const std::filesystem::path& path);

}  // namespace chaosedge::data
