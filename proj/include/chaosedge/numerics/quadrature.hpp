#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace chaosedge {

/// Gauss-Hermite rule normalized for the standard normal measure
/// Dz = exp(-z^2/2) dz / sqrt(2 pi). Nodes ascending and symmetric about 0,
/// weights summing to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t order = 0;

  /// Sum of w_i f(z_i).
  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < order; ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

inline constexpr std::size_t kDefaultQuadratureOrder = 100;

/// Exact for polynomials up to degree 2*order-1. Throws std::invalid_argument
/// for order < 2.
QuadratureRule gaussian_quadrature(std::size_t order = kDefaultQuadratureOrder);

}  // namespace chaosedge
