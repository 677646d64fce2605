#include "chaosedge/numerics/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace chaosedge {

namespace {

struct HermiteEval {
  double p_n;        // orthonormal He_n(x)
  double p_nm1;      // orthonormal He_{n-1}(x)
  double sum_sq;     // sum_{k<n} p_k(x)^2
};

// Orthonormal probabilists' Hermite polynomials under Dz:
// p_{k+1} = (x p_k - sqrt(k) p_{k-1}) / sqrt(k+1).
HermiteEval eval_orthonormal(std::size_t n, double x) {
  double prev = 0.0;
  double cur = 1.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum_sq += cur * cur;
    const double next =
        (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return {cur, prev, sum_sq};
}

}  // namespace

QuadratureRule gaussian_quadrature(std::size_t order) {
  if (order < 2) {
    throw std::invalid_argument("gaussian_quadrature: order must be >= 2, got " +
                                std::to_string(order));
  }
  // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix with zero
  // diagonal and off-diagonal sqrt(k).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(order));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(order - 1));
  for (std::size_t k = 1; k < order; ++k) sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gaussian_quadrature: tridiagonal eigensolver failed");
  }

  std::vector<double> nodes(order);
  std::vector<double> weights(order);
  const double sqrt_n = std::sqrt(static_cast<double>(order));
  for (std::size_t i = 0; i < order; ++i) {
    double x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    // Newton polish; p_n' = sqrt(n) p_{n-1}.
    for (int it = 0; it < 8; ++it) {
      const auto e = eval_orthonormal(order, x);
      const double step = e.p_n / (sqrt_n * e.p_nm1);
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    nodes[i] = x;
    weights[i] = 1.0 / eval_orthonormal(order, x).sum_sq;  // Christoffel number
  }

  std::sort(nodes.begin(), nodes.end());
  // Restore exact mirror symmetry lost to rounding.
  for (std::size_t i = 0; i < order / 2; ++i) {
    const std::size_t j = order - 1 - i;
    const double x = 0.5 * (nodes[j] - nodes[i]);
    nodes[i] = -x;
    nodes[j] = x;
    weights[i] = weights[j] = 1.0 / eval_orthonormal(order, x).sum_sq;
  }
  if (order % 2 == 1) {
    nodes[order / 2] = 0.0;
    weights[order / 2] = 1.0 / eval_orthonormal(order, 0.0).sum_sq;
  }
  // Sum small weights first, then renormalize.
  std::vector<double> sorted = weights;
  std::sort(sorted.begin(), sorted.end());
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  for (double& w : weights) w /= total;

  return QuadratureRule{std::move(nodes), std::move(weights), order};
}

}  // namespace chaosedge
