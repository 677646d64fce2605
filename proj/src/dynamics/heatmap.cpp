#include "chaosedge/dynamics/heatmap.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "chaosedge/io/format.hpp"
#include "chaosedge/numerics/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chaosedge::dynamics {

namespace {

void validate(const PhaseGrid& grid, const HeatmapOptions& options) {
  if (grid.j0.resolution < 2 || grid.j.resolution < 2) {
    throw std::invalid_argument("phase_heatmap: resolution must be >= 2 per axis");
  }
  if (grid.j.lo < 0.0) throw std::invalid_argument("phase_heatmap: J range must be >= 0");
  if (options.n == 0) throw std::invalid_argument("phase_heatmap: n must be positive");
}

PhasePoint point_of(const PhaseGrid& grid, std::size_t k) {
  const std::size_t row = k / grid.j0.resolution;
  const std::size_t col = k % grid.j0.resolution;
  return {grid.j0.at(col), grid.j.at(row)};
}

}  // namespace

PhaseCell evaluate_cell(PhasePoint point, std::uint64_t cell_index, const HeatmapOptions& options,
                        const QuadratureRule& rule) {
  RngStream rng = RngStream(options.seed, 0x6d6170ULL).derive(cell_index);
  const Matrix w = sample_coupling(options.n, point.j0, point.j, rng);
  std::vector<double> x0(options.n);
  rng.fill_normal(x0, 0.0, 1.0);
  const auto d = asymptotic_distance(w, x0, options.noise_std, options.tau, rng);

  PhaseCell cell;
  cell.point = point;
  cell.initial_distance = d.initial_distance;
  cell.final_distance = d.final_distance;
  cell.distance_ratio = d.ratio;
  cell.classification = classify_ratio(d.ratio, options.ordered_threshold);
  const auto sol = meanfield_solve(point, rule, options.meanfield);
  cell.criterion = sol.converged ? boundary_criterion(point, sol, rule)
                                 : std::numeric_limits<double>::quiet_NaN();
  return cell;
}

std::vector<PhaseCell> phase_heatmap_serial(const PhaseGrid& grid, const HeatmapOptions& options,
                                            const QuadratureRule& rule) {
  validate(grid, options);
  std::vector<PhaseCell> cells(grid.cell_count());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    cells[k] = evaluate_cell(point_of(grid, k), k, options, rule);
  }
  return cells;
}

std::vector<PhaseCell> phase_heatmap(const PhaseGrid& grid, const HeatmapOptions& options,
                                     const QuadratureRule& rule) {
  validate(grid, options);
  std::vector<PhaseCell> cells(grid.cell_count());
  const auto count = static_cast<std::ptrdiff_t>(cells.size());
  const int workers = kernels::resolve_workers(options.workers);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    cells[idx] = evaluate_cell(point_of(grid, idx), idx, options, rule);
  }
  return cells;
}

ClassificationAgreement classification_agreement(const std::vector<PhaseCell>& cells,
                                                 double band) {
  ClassificationAgreement a;
  for (const auto& c : cells) {
    if (!std::isfinite(c.criterion) || std::abs(c.criterion - 1.0) <= band) continue;
    ++a.considered;
    const Phase predicted = c.criterion > 1.0 ? Phase::chaotic : Phase::ordered;
    if (predicted == c.classification) ++a.agreeing;
  }
  return a;
}

void write_heatmap_csv(std::ostream& out, const std::vector<PhaseCell>& cells) {
  out << "j0,j,initial_distance,final_distance,ratio,criterion,classification\n";
  for (const auto& c : cells) {
    out << io::fmt(c.point.j0) << ',' << io::fmt(c.point.j) << ',' << io::fmt(c.initial_distance)
        << ',' << io::fmt(c.final_distance) << ',' << io::fmt(c.distance_ratio) << ','
        << io::fmt(c.criterion) << ',' << to_string(c.classification) << '\n';
  }
}

void write_boundary_csv(std::ostream& out, const std::vector<BoundaryPoint>& points) {
  out << "j0,j_boundary,found\n";
  for (const auto& p : points) {
    out << io::fmt(p.j0) << ',' << (p.found ? io::fmt(p.j_boundary) : std::string("nan")) << ','
        << (p.found ? "true" : "false") << '\n';
  }
}

}  // namespace chaosedge::dynamics
