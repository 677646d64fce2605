#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace chaosedge {

/// Seeded random stream.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++
/// standard. It is seeded through std::seed_seq with the four 32-bit words
/// {seed_lo, seed_hi, stream_lo, stream_hi}. Uniform doubles take the top 53
/// bits of one engine draw; normals use the Marsaglia polar method with the
/// spare value cached; bounded integers use rejection sampling. None of the
/// std:: distributions are used, since their outputs differ between standard
/// libraries.
///
/// A stream is single-owner. Parallel work derives child streams with
/// `derive`, keyed by a task index.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double normal();
  double normal(double mean, double std) { return mean + std * normal(); }
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  void fill_normal(std::span<double> out, double mean, double std);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// Independent stream for sub-task `index` (same seed, mixed stream id).
  RngStream derive(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to mix stream ids.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace chaosedge
