#pragma once

// Mean-field closure and the analytic order/chaos boundary
//   J^2 * Int Dz sech^4(J0 mu + J sqrt(q0) z) = 1,
// with (mu, q0) the self-consistent solution of
//   mu = Int Dz tanh(J0 mu + J sqrt(q0) z),  q0 = Int Dz tanh^2(J0 mu + J sqrt(q0) z).

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "chaosedge/numerics/quadrature.hpp"

namespace chaosedge::dynamics {

struct PhasePoint {
  double j0 = 0.0;
  double j = 0.0;
};

enum class Branch { paramagnetic, ferromagnetic };
const char* to_string(Branch b) noexcept;

struct MeanFieldSolution {
  double mu = 0.0;
  double q0 = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  Branch branch = Branch::paramagnetic;
  double residual = 0.0;  // max of the two self-consistency residuals
};

struct MeanFieldOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10'000;
  double damping = 0.5;
  std::size_t newton_iter = 60;
};

/// Damped fixed-point iteration from the seeds mu = 0 and mu = 0.9 (both with
/// q0 = 1), followed by a Newton polish when the damped phase stalls.
///
/// For J0 < 0 the map is conjugate to the J0 > 0 map through x_t -> (-1)^t x_t,
/// so the closure is solved at |J0| and mu is reported as the staggered
/// amplitude; the boundary integrand only sees |J0 mu|. Inside the region
/// |J0| <= 1, J <= 1 the trivial point (0, 0) is the attracting solution and is
/// returned exactly. The ferromagnetic solution wins when both seeds converge.
MeanFieldSolution meanfield_solve(PhasePoint point, const QuadratureRule& rule,
                                  const MeanFieldOptions& options = {});

/// Self-consistency residuals (mu - F_mu, q0 - F_q) at a candidate solution.
std::pair<double, double> meanfield_residuals(PhasePoint point, double mu, double q0,
                                              const QuadratureRule& rule);

/// Left-hand side of the boundary equation; > 1 chaotic, < 1 ordered.
/// Throws std::invalid_argument for an unconverged solution.
double boundary_criterion(PhasePoint point, const MeanFieldSolution& sol,
                          const QuadratureRule& rule);

/// Convenience: solve then evaluate.
double boundary_criterion(PhasePoint point, const QuadratureRule& rule,
                          const MeanFieldOptions& options = {});

struct BoundaryPoint {
  double j0 = 0.0;
  double j_boundary = 0.0;
  bool found = false;
};

struct BoundaryOptions {
  double j_low = 0.05;
  double j_high = 5.0;
  double j_resolution = 1e-7;
  MeanFieldOptions meanfield{};
};

/// Bisection in J for criterion = 1 at each J0, re-solving the closure at
/// every probe. Points without a sign change in the bracket are reported with
/// found = false.
std::vector<BoundaryPoint> boundary_curve(const std::vector<double>& j0_values,
                                          const QuadratureRule& rule,
                                          const BoundaryOptions& options = {});

}  // namespace chaosedge::dynamics
