#pragma once

// Reference implementations written independently of the library, in long
// double, for checking the network and the optimizer.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "chaosedge/model/network.hpp"
#include "chaosedge/numerics/rng.hpp"

namespace chaosedge::test {

using chaosedge::Matrix;
using chaosedge::model::NetworkParams;

// Pre-activations z = x W^T kept so one-coordinate perturbations only redo
// the affected unit.
struct RefNet {
  const NetworkParams& p;
  const Matrix& x;
  std::span<const std::uint8_t> y;
  std::vector<long double> z;  // B x N

  RefNet(const NetworkParams& params, const Matrix& xs, std::span<const std::uint8_t> labels)
      : p(params), x(xs), y(labels), z(xs.rows() * params.n_units()) {
    const std::size_t n = p.n_units();
    for (std::size_t b = 0; b < x.rows(); ++b)
      for (std::size_t i = 0; i < n; ++i) z[b * n + i] = dot_row(b, i, 0.0L, 0);
  }

  long double dot_row(std::size_t b, std::size_t i, long double delta, std::size_t at) const {
    long double s = 0.0L;
    for (std::size_t k = 0; k < x.cols(); ++k) {
      long double w = p.w_hidden(i, k);
      if (k == at) w += delta;
      s += w * x(b, k);
    }
    return s;
  }

  // Mean cross-entropy with w_hidden(hi, hj) += dh and w_out(oc, oj) += dout.
  long double loss(std::size_t hi = 0, std::size_t hj = 0, long double dh = 0.0L,
                   std::size_t oc = 0, std::size_t oj = 0, long double dout = 0.0L) const {
    const std::size_t n = p.n_units(), c = p.n_classes();
    long double total = 0.0L;
    std::vector<long double> h(n), logits(c);
    for (std::size_t b = 0; b < x.rows(); ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        const long double zi = (dh != 0.0L && i == hi) ? dot_row(b, i, dh, hj) : z[b * n + i];
        h[i] = std::tanh(zi);
      }
      long double m = -INFINITY;
      for (std::size_t k = 0; k < c; ++k) {
        long double s = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
          long double w = p.w_out(k, i);
          if (k == oc && i == oj) w += dout;
          s += w * h[i];
        }
        logits[k] = s;
        if (s > m) m = s;
      }
      long double norm = 0.0L;
      for (std::size_t k = 0; k < c; ++k) norm += std::exp(logits[k] - m);
      total += -(logits[y[b]] - m - std::log(norm));
    }
    return total / static_cast<long double>(x.rows());
  }
};

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

// Central differences at `eps` on `n_coords` randomly chosen coordinates,
// split evenly between the two layers. Relative error is
// |analytic - numeric| / (|analytic| + floor).
inline GradCheck finite_difference_check(const NetworkParams& params, const Matrix& x,
                                         std::span<const std::uint8_t> y,
                                         const chaosedge::model::Gradients& g, double eps,
                                         std::size_t n_coords, std::uint64_t seed,
                                         double floor = 1e-8) {
  RefNet ref(params, x, y);
  chaosedge::RngStream rng(seed, 0);
  GradCheck out;
  const long double e = eps;
  for (std::size_t k = 0; k < n_coords; ++k) {
    long double numeric;
    double analytic;
    if (k % 2 == 0) {
      const auto i = static_cast<std::size_t>(rng.below(params.n_units()));
      const auto j = static_cast<std::size_t>(rng.below(params.n_units()));
      numeric = (ref.loss(i, j, e) - ref.loss(i, j, -e)) / (2.0L * e);
      analytic = g.g_hidden(i, j);
    } else {
      const auto c = static_cast<std::size_t>(rng.below(params.n_classes()));
      const auto j = static_cast<std::size_t>(rng.below(params.n_units()));
      numeric = (ref.loss(0, 0, 0.0L, c, j, e) - ref.loss(0, 0, 0.0L, c, j, -e)) / (2.0L * e);
      analytic = g.g_out(c, j);
    }
    const double num = static_cast<double>(numeric);
    const double denom = std::abs(analytic) + floor;
    out.max_rel_error = std::max(out.max_rel_error, std::abs(analytic - num) / denom);
    ++out.checked;
  }
  return out;
}

}  // namespace chaosedge::test
