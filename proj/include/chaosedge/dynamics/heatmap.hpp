#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "chaosedge/dynamics/map.hpp"
#include "chaosedge/dynamics/meanfield.hpp"

namespace chaosedge::dynamics {

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t resolution = 2;

  double at(std::size_t i) const noexcept {
    return resolution < 2 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                          static_cast<double>(resolution - 1);
  }
};

struct PhaseGrid {
  AxisRange j0{-2.5, 2.5, 50};
  AxisRange j{0.1, 2.5, 50};

  std::size_t cell_count() const noexcept { return j0.resolution * j.resolution; }
};

struct HeatmapOptions {
  std::size_t n = 784;
  std::size_t tau = kDefaultTau;
  double noise_std = kDefaultNoiseStd;
  double ordered_threshold = kOrderedRatioThreshold;
  std::uint64_t seed = 0;
  int workers = 0;  // <= 0: all available threads
  MeanFieldOptions meanfield{};
};

struct PhaseCell {
  PhasePoint point;
  double initial_distance = 0.0;
  double final_distance = 0.0;
  double distance_ratio = 0.0;
  double criterion = 0.0;  // NaN when the closure failed to converge
  Phase classification = Phase::ordered;
};

/// Numerical phase diagram. Cells are ordered J-major (row = J value,
/// column = J0 value); cell k draws its coupling matrix and x0 from the
/// stream derived from (seed, k), so output is independent of `workers`.
std::vector<PhaseCell> phase_heatmap(const PhaseGrid& grid, const HeatmapOptions& options,
                                     const QuadratureRule& rule);

/// Single-threaded reference with the same per-cell streams.
std::vector<PhaseCell> phase_heatmap_serial(const PhaseGrid& grid, const HeatmapOptions& options,
                                            const QuadratureRule& rule);

/// Evaluates one grid cell (shared by both drivers).
PhaseCell evaluate_cell(PhasePoint point, std::uint64_t cell_index, const HeatmapOptions& options,
                        const QuadratureRule& rule);

struct ClassificationAgreement {
  std::size_t considered = 0;  // cells with |criterion - 1| > band
  std::size_t agreeing = 0;
  double fraction() const noexcept {
    return considered ? static_cast<double>(agreeing) / static_cast<double>(considered) : 0.0;
  }
};

/// Compares distance-based labels with criterion-based labels away from the
/// boundary band.
ClassificationAgreement classification_agreement(const std::vector<PhaseCell>& cells,
                                                 double band = 0.1);

void write_heatmap_csv(std::ostream& out, const std::vector<PhaseCell>& cells);
void write_boundary_csv(std::ostream& out, const std::vector<BoundaryPoint>& points);

}  // namespace chaosedge::dynamics
