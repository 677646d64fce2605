#include "chaosedge/dynamics/map.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "chaosedge/numerics/kernels.hpp"
#include "chaosedge/numerics/stats.hpp"

namespace chaosedge::dynamics {

namespace {

void require_square_against(const Matrix& w, std::size_t len, const char* what) {
  if (!w.is_square() || w.rows() != len) {
    throw ShapeError(std::string(what) + ": matrix " + shape_string(w) +
                     " does not act on a vector of length " + std::to_string(len));
  }
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double sech2(double x) {
  const double c = std::cosh(x);
  return std::isinf(c) ? 0.0 : 1.0 / (c * c);
}

}  // namespace

const char* to_string(Phase p) noexcept { return p == Phase::ordered ? "ordered" : "chaotic"; }

std::vector<double> iterate_map(const Matrix& w, std::span<const double> x0, std::size_t steps) {
  require_square_against(w, x0.size(), "iterate_map");
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> next(x.size());
  for (std::size_t t = 0; t < steps; ++t) {
    kernels::matvec(w, x, next);
    kernels::tanh_inplace(next);
    x.swap(next);
  }
  return x;
}

DistanceResult asymptotic_distance(const Matrix& w, std::span<const double> x0, double noise_std,
                                   std::size_t tau, RngStream& rng) {
  if (x0.empty()) throw std::invalid_argument("asymptotic_distance: empty initial state");
  require_square_against(w, x0.size(), "asymptotic_distance");
  if (!(noise_std > 0.0)) throw std::invalid_argument("asymptotic_distance: noise_std must be > 0");
  if (tau < 1) throw std::invalid_argument("asymptotic_distance: tau must be >= 1");

  std::vector<double> perturbed(x0.begin(), x0.end());
  for (double& v : perturbed) v += noise_std * rng.normal();

  DistanceResult r;
  r.initial_distance = distance(x0, perturbed);
  const auto a = iterate_map(w, x0, tau);
  const auto b = iterate_map(w, perturbed, tau);
  r.final_distance = distance(a, b);
  r.ratio = r.initial_distance > 0.0 ? r.final_distance / r.initial_distance : 0.0;
  return r;
}

std::vector<DistanceResult> asymptotic_distance_batch(const Matrix& w, const Matrix& x0s,
                                                      double noise_std, std::size_t tau,
                                                      RngStream& rng) {
  if (x0s.rows() == 0 || x0s.cols() == 0) {
    throw std::invalid_argument("asymptotic_distance_batch: empty batch");
  }
  require_square_against(w, x0s.cols(), "asymptotic_distance_batch");
  if (!(noise_std > 0.0)) throw std::invalid_argument("asymptotic_distance_batch: noise_std must be > 0");
  if (tau < 1) throw std::invalid_argument("asymptotic_distance_batch: tau must be >= 1");

  const std::size_t count = x0s.rows();
  const std::size_t n = x0s.cols();
  // Rows [0, count) are the clean trajectories, [count, 2 count) the perturbed ones.
  Matrix state(2 * count, n);
  std::vector<DistanceResult> out(count);
  for (std::size_t s = 0; s < count; ++s) {
    auto clean = state.row(s);
    auto noisy = state.row(count + s);
    const auto src = x0s.row(s);
    for (std::size_t i = 0; i < n; ++i) {
      clean[i] = src[i];
      noisy[i] = src[i] + noise_std * rng.normal();
    }
    out[s].initial_distance = distance(clean, noisy);
  }
  Matrix next;
  for (std::size_t t = 0; t < tau; ++t) {
    kernels::matmul_abt(state, w, next);
    kernels::tanh_inplace(next.values());
    std::swap(state, next);
  }
  for (std::size_t s = 0; s < count; ++s) {
    out[s].final_distance = distance(state.row(s), state.row(count + s));
    out[s].ratio =
        out[s].initial_distance > 0.0 ? out[s].final_distance / out[s].initial_distance : 0.0;
  }
  return out;
}

EmpiricalAttractor empirical_attractor(const Matrix& w, std::span<const double> x0,
                                       std::size_t burn_in, std::size_t samples) {
  require_square_against(w, x0.size(), "empirical_attractor");
  if (burn_in < 1 || samples < 1) {
    throw std::invalid_argument("empirical_attractor: burn_in and samples must be >= 1");
  }
  const std::size_t n = x0.size();
  auto x = iterate_map(w, x0, burn_in);
  std::vector<double> next(n), sum(n, 0.0), sum_sq(n, 0.0);
  for (std::size_t t = 0; t < samples; ++t) {
    kernels::matvec(w, x, next);
    kernels::tanh_inplace(next);
    x.swap(next);
    for (std::size_t i = 0; i < n; ++i) {
      sum[i] += x[i];
      sum_sq[i] += x[i] * x[i];
    }
  }
  EmpiricalAttractor a;
  a.mu_per_unit.resize(n);
  a.sigma_per_unit.resize(n);
  const double inv = 1.0 / static_cast<double>(samples);
  double mu = 0.0, q0 = 0.0, second = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = sum[i] * inv;
    const double m2 = sum_sq[i] * inv;
    a.mu_per_unit[i] = m;
    a.sigma_per_unit[i] = std::sqrt(std::max(0.0, m2 - m * m));
    mu += m;
    q0 += m * m;
    second += m2;
  }
  a.mu = mu / static_cast<double>(n);
  a.q0 = q0 / static_cast<double>(n);
  a.second_moment = second / static_cast<double>(n);
  return a;
}

double jacobian_norm(const Matrix& w, std::span<const double> mu_per_unit) {
  require_square_against(w, mu_per_unit.size(), "jacobian_norm");
  const std::size_t n = w.rows();
  std::vector<double> field(n);
  kernels::matvec(w, mu_per_unit, field);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_sq = 0.0;
    for (double v : w.row(i)) row_sq += v * v;
    const double s2 = sech2(field[i]);
    total += s2 * s2 * row_sq;
  }
  return std::sqrt(total / static_cast<double>(n));
}

Matrix sample_coupling(std::size_t n, double j0, double j, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_coupling: n must be positive");
  if (!(j >= 0.0)) throw std::invalid_argument("sample_coupling: J must be >= 0");
  const double nn = static_cast<double>(n);
  return gaussian_matrix(n, n, j0 / nn, j / std::sqrt(nn), rng);
}

}  // namespace chaosedge::dynamics
