#pragma once

// The hidden-layer operator x -> tanh(W x) viewed as a discrete dynamical
// system: trajectories, perturbation growth, attractor statistics and the
// Jacobian-norm order parameter.

#include <cstddef>
#include <span>
#include <vector>

#include "chaosedge/numerics/matrix.hpp"
#include "chaosedge/numerics/rng.hpp"

namespace chaosedge::dynamics {

/// Ratio final/initial below which a trajectory pair counts as ordered.
inline constexpr double kOrderedRatioThreshold = 0.01;
inline constexpr std::size_t kDefaultTau = 50;
inline constexpr double kDefaultNoiseStd = 1e-4;

enum class Phase { ordered, chaotic };

const char* to_string(Phase p) noexcept;
inline Phase classify_ratio(double ratio, double threshold = kOrderedRatioThreshold) {
  return ratio < threshold ? Phase::ordered : Phase::chaotic;
}

/// State after `steps` applications of x -> tanh(W x).
std::vector<double> iterate_map(const Matrix& w, std::span<const double> x0, std::size_t steps);

struct DistanceResult {
  double initial_distance = 0.0;
  double final_distance = 0.0;
  double ratio = 0.0;
};

/// Perturbs x0 by i.i.d. N(0, noise_std^2) noise and reports the L2 distance
/// between the two trajectories before and after `tau` steps.
DistanceResult asymptotic_distance(const Matrix& w, std::span<const double> x0, double noise_std,
                                   std::size_t tau, RngStream& rng);

/// Same measurement for every row of `x0s`, advancing all trajectories with
/// one matrix product per step. Noise for row s is drawn after row s-1's.
std::vector<DistanceResult> asymptotic_distance_batch(const Matrix& w, const Matrix& x0s,
                                                      double noise_std, std::size_t tau,
                                                      RngStream& rng);

/// Time statistics of each unit after a burn-in, following the ansatz
/// x_i = mu_i + sigma_i z_i.
struct EmpiricalAttractor {
  std::vector<double> mu_per_unit;
  std::vector<double> sigma_per_unit;
  double mu = 0.0;             // mean of mu_i
  double q0 = 0.0;             // mean of mu_i^2
  double second_moment = 0.0;  // mean of time-averaged x_i^2 (= q0 + mean sigma_i^2)
};

EmpiricalAttractor empirical_attractor(const Matrix& w, std::span<const double> x0,
                                       std::size_t burn_in, std::size_t samples);

/// (1/sqrt N) ||J*||_F at the attractor mean:
/// sqrt( (1/N) sum_i sech^4(sum_j W_ij mu_j) * sum_j W_ij^2 ).
double jacobian_norm(const Matrix& w, std::span<const double> mu_per_unit);

/// n x n matrix with entries J0/n + (J/sqrt n) z_ij.
Matrix sample_coupling(std::size_t n, double j0, double j, RngStream& rng);

}  // namespace chaosedge::dynamics
