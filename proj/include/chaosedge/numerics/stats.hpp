#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

#include "chaosedge/numerics/matrix.hpp"
#include "chaosedge/numerics/rng.hpp"

namespace chaosedge {

/// Phase-diagram coordinates of an n x n weight matrix:
/// j0 = n * mean, j_squared = n * population variance, j = sqrt(j_squared).
struct WeightStats {
  double j0 = 0.0;
  double j = 0.0;
  double j_squared = 0.0;
};

WeightStats weight_stats(const Matrix& w, std::size_t n);
inline WeightStats weight_stats(const Matrix& w) { return weight_stats(w, w.rows()); }

class InsufficientDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularFitError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;

  double operator()(double x) const noexcept { return intercept + slope * x; }
};

/// Ordinary least squares y = intercept + slope * x.
/// r_squared is defined as 1 when ys has zero spread.
LinearFit ols_fit(std::span<const double> xs, std::span<const double> ys);

/// rows x cols matrix of i.i.d. N(mean, std^2) draws, filled row-major.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double mean, double std,
                       RngStream& rng);

double mean(std::span<const double> v);
/// Population standard deviation.
double stddev(std::span<const double> v);

}  // namespace chaosedge
