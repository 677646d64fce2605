#include "chaosedge/numerics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chaosedge {

WeightStats weight_stats(const Matrix& w, std::size_t n) {
  if (n == 0 || w.rows() != n || w.cols() != n) {
    throw ShapeError("weight_stats: expected " + std::to_string(n) + "x" + std::to_string(n) +
                     " matrix, got " + shape_string(w));
  }
  const auto v = w.values();
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double var = ss / static_cast<double>(v.size());
  WeightStats s;
  s.j0 = static_cast<double>(n) * m;
  s.j_squared = static_cast<double>(n) * var;
  s.j = std::sqrt(s.j_squared);
  return s;
}

LinearFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("ols_fit: xs and ys differ in length (" +
                                std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) +
                                ")");
  }
  const std::size_t n = xs.size();
  if (n < 2) throw InsufficientDataError("ols_fit: need at least 2 points");
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  double x_scale = 0.0;
  for (double x : xs) x_scale = std::max(x_scale, std::abs(x));
  if (sxx <= 1e-28 * std::max(1.0, x_scale * x_scale) * static_cast<double>(n)) {
    throw SingularFitError("ols_fit: all x values are equal");
  }
  LinearFit fit;
  fit.n_points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double y_scale = 0.0;
  for (double y : ys) y_scale = std::max(y_scale, std::abs(y));
  if (syy <= 1e-28 * std::max(1.0, y_scale * y_scale) * static_cast<double>(n)) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ys[i] - fit(xs[i]);
      ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double mean_value, double std,
                       RngStream& rng) {
  if (!(std >= 0.0)) throw std::invalid_argument("gaussian_matrix: std must be >= 0");
  Matrix m(rows, cols, mean_value);
  if (std > 0.0) rng.fill_normal(m.values(), mean_value, std);
  return m;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace chaosedge
