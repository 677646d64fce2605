#include "chaosedge/dynamics/meanfield.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace chaosedge::dynamics {

namespace {

constexpr double kFerroThreshold = 1e-6;

struct Moments {
  double tanh1 = 0.0;        // <tanh h>
  double tanh2 = 0.0;        // <tanh^2 h>
  double sech2 = 0.0;        // <sech^2 h>
  double tanh_sech2 = 0.0;   // <tanh h sech^2 h>
  double sech4 = 0.0;        // <sech^4 h>
  double tanh2_sech2 = 0.0;  // <tanh^2 h sech^2 h>
};

// Gaussian averages over h = a + b z.
Moments moments(double a, double b, const QuadratureRule& rule) {
  Moments m;
  for (std::size_t k = 0; k < rule.order; ++k) {
    const double h = a + b * rule.nodes[k];
    const double w = rule.weights[k];
    const double t = std::tanh(h);
    const double s2 = 1.0 - t * t;
    m.tanh1 += w * t;
    m.tanh2 += w * t * t;
    m.sech2 += w * s2;
    m.tanh_sech2 += w * t * s2;
    m.sech4 += w * s2 * s2;
    m.tanh2_sech2 += w * t * t * s2;
  }
  return m;
}

struct State {
  double mu;
  double q;
};

double residual_of(const State& s, const Moments& m) {
  return std::max(std::abs(s.mu - m.tanh1), std::abs(s.q - m.tanh2));
}

// Solves the closure for J0 >= 0 from one seed.
MeanFieldSolution solve_from(double j0, double j, State s, const QuadratureRule& rule,
                             const MeanFieldOptions& opt) {
  MeanFieldSolution sol;
  auto eval = [&](const State& st) { return moments(j0 * st.mu, j * std::sqrt(st.q), rule); };

  Moments m = eval(s);
  double res = residual_of(s, m);
  std::size_t it = 0;
  while (res >= opt.tol && it < opt.max_iter) {
    s.mu = (1.0 - opt.damping) * s.mu + opt.damping * m.tanh1;
    s.q = (1.0 - opt.damping) * s.q + opt.damping * m.tanh2;
    m = eval(s);
    res = residual_of(s, m);
    ++it;
  }

  // Newton on G(mu, q) = F(mu, q) - (mu, q). q-derivatives use Gaussian
  // integration by parts: d/dq <g(a + J sqrt(q) z)> = (J^2 / 2) <g''>.
  auto newton_step = [&](const State& st, const Moments& mm, State& next) {
    const double g_mu = mm.tanh1 - st.mu;
    const double g_q = mm.tanh2 - st.q;
    const double a11 = j0 * mm.sech2 - 1.0;
    const double a12 = -j * j * mm.tanh_sech2;
    const double a21 = 2.0 * j0 * mm.tanh_sech2;
    const double a22 = j * j * (mm.sech4 - 2.0 * mm.tanh2_sech2) - 1.0;
    const double det = a11 * a22 - a12 * a21;
    if (det == 0.0 || !std::isfinite(det)) return false;
    next.mu = std::clamp(st.mu + (-g_mu * a22 + g_q * a12) / det, -1.0, 1.0);
    next.q = std::clamp(st.q + (-g_q * a11 + g_mu * a21) / det, 0.0, 1.0);
    return true;
  };
  for (std::size_t k = 0; res >= opt.tol && k < opt.newton_iter; ++k, ++it) {
    if (!newton_step(s, m, s)) break;
    m = eval(s);
    res = residual_of(s, m);
  }
  // Near the critical line the fixed point is nearly marginal, so a small
  // residual can still hide a large error in q0. A few extra Newton steps,
  // kept only while they help, take it to rounding level.
  for (std::size_t k = 0; res < opt.tol && k < 4; ++k) {
    State next;
    if (!newton_step(s, m, next)) break;
    const Moments mn = eval(next);
    const double rn = residual_of(next, mn);
    if (!(rn < res)) break;
    s = next;
    m = mn;
    res = rn;
  }

  sol.mu = s.mu;
  sol.q0 = s.q;
  sol.iterations = it;
  sol.residual = res;
  sol.converged = res < opt.tol;
  sol.branch = std::abs(s.mu) > kFerroThreshold ? Branch::ferromagnetic : Branch::paramagnetic;
  return sol;
}

// Paramagnetic branch (mu = 0, J > 1): q solves J^2 <z^2 g(J sqrt(q) z)> = 1
// with g(x) = tanh^2(x) / x^2, the closure divided through by q. This form
// stays well conditioned as J -> 1+, where q - <tanh^2> cancels badly.
double refine_paramagnetic_q(double j, const QuadratureRule& rule) {
  auto excess = [&](double q) {
    const double b = j * std::sqrt(q);
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.order; ++k) {
      const double z = rule.nodes[k];
      const double x = b * z;
      const double r = x == 0.0 ? 1.0 : std::tanh(x) / x;
      acc += rule.weights[k] * z * z * r * r;
    }
    return j * j * acc - 1.0;
  };
  double lo = 0.0, hi = 1.0;
  if (excess(hi) >= 0.0) return hi;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(Branch b) noexcept {
  return b == Branch::ferromagnetic ? "ferromagnetic" : "paramagnetic";
}

std::pair<double, double> meanfield_residuals(PhasePoint point, double mu, double q0,
                                              const QuadratureRule& rule) {
  const auto m = moments(point.j0 * mu, point.j * std::sqrt(std::max(0.0, q0)), rule);
  return {mu - m.tanh1, q0 - m.tanh2};
}

MeanFieldSolution meanfield_solve(PhasePoint point, const QuadratureRule& rule,
                                  const MeanFieldOptions& options) {
  const double j0 = std::abs(point.j0);
  const double j = point.j;

  if (j0 <= 1.0 && j <= 1.0) {
    MeanFieldSolution trivial;
    trivial.converged = true;
    return trivial;
  }

  const std::array<State, 2> seeds{State{0.0, 1.0}, State{0.9, 1.0}};
  std::array<MeanFieldSolution, 2> sols;
  for (std::size_t i = 0; i < seeds.size(); ++i) sols[i] = solve_from(j0, j, seeds[i], rule, options);

  const MeanFieldSolution* best = nullptr;
  for (const auto& s : sols) {
    if (!s.converged) continue;
    if (!best) {
      best = &s;
      continue;
    }
    const bool s_ferro = s.branch == Branch::ferromagnetic;
    const bool b_ferro = best->branch == Branch::ferromagnetic;
    if ((s_ferro && !b_ferro) || (s_ferro == b_ferro && std::abs(s.mu) > std::abs(best->mu))) {
      best = &s;
    }
  }
  if (best) {
    MeanFieldSolution out = *best;
    if (out.branch == Branch::paramagnetic && j > 1.0) {
      out.mu = 0.0;
      out.q0 = refine_paramagnetic_q(j, rule);
      const auto [r_mu, r_q] = meanfield_residuals({j0, j}, out.mu, out.q0, rule);
      out.residual = std::max(std::abs(r_mu), std::abs(r_q));
    }
    return out;
  }
  return sols[0].residual <= sols[1].residual ? sols[0] : sols[1];
}

double boundary_criterion(PhasePoint point, const MeanFieldSolution& sol,
                          const QuadratureRule& rule) {
  if (!sol.converged) {
    throw std::invalid_argument("boundary_criterion: mean-field solution did not converge");
  }
  const double a = point.j0 * sol.mu;
  const double b = point.j * std::sqrt(sol.q0);
  const double integral = rule.integrate([&](double z) {
    const double t = std::tanh(a + b * z);
    const double s2 = 1.0 - t * t;
    return s2 * s2;
  });
  return point.j * point.j * integral;
}

double boundary_criterion(PhasePoint point, const QuadratureRule& rule,
                          const MeanFieldOptions& options) {
  return boundary_criterion(point, meanfield_solve(point, rule, options), rule);
}

std::vector<BoundaryPoint> boundary_curve(const std::vector<double>& j0_values,
                                          const QuadratureRule& rule,
                                          const BoundaryOptions& options) {
  std::vector<BoundaryPoint> out;
  out.reserve(j0_values.size());
  for (double j0 : j0_values) {
    BoundaryPoint bp{j0, 0.0, false};
    if (!std::isfinite(j0)) {
      out.push_back(bp);
      continue;
    }
    auto excess = [&](double j, bool& ok) {
      const auto sol = meanfield_solve({j0, j}, rule, options.meanfield);
      ok = sol.converged;
      return ok ? boundary_criterion({j0, j}, sol, rule) - 1.0 : 0.0;
    };
    bool ok_lo = false, ok_hi = false;
    double lo = options.j_low, hi = options.j_high;
    const double f_lo = excess(lo, ok_lo);
    const double f_hi = excess(hi, ok_hi);
    if (ok_lo && ok_hi && (f_lo < 0.0) != (f_hi < 0.0)) {
      const bool rising = f_lo < 0.0;
      bool ok = true;
      while (hi - lo > options.j_resolution) {
        const double mid = 0.5 * (lo + hi);
        const double f = excess(mid, ok);
        if (!ok) break;
        if ((f < 0.0) == rising) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      if (ok) {
        bp.j_boundary = 0.5 * (lo + hi);
        bp.found = true;
      }
    }
    out.push_back(bp);
  }
  return out;
}

}  // namespace chaosedge::dynamics
