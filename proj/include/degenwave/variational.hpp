#ifndef DEGENWAVE_VARIATIONAL_HPP
#define DEGENWAVE_VARIATIONAL_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "degenwave/model.hpp"
#include "degenwave/ode.hpp"
#include "degenwave/shooting.hpp"

namespace degenwave {

/// Admissible weight g on [0, a/b]: g(a/b) = 0, g' < 0 on the interior.
struct WeightFunction {
  Grid1D grid;
  std::vector<double> g;
  std::vector<double> g1;

  double g_at(double s) const { return interp_linear(grid, g, s); }
  double g1_at(double s) const { return interp_linear(grid, g1, s); }
};

/// Solution of the singular ODE rho'(s) = 2 I rho^{1/2} - 2 f(s) at unit
/// scale (a = b = 1), f(s) = m s^m (1 - s); rho > 0 on (0,1), rho(0) =
/// rho(1) = 0 at the critical I.
struct RhoSolution {
  Grid1D grid;              ///< s in [0, 1]
  std::vector<double> rho;
  double I = 0.0;           ///< trial speed used
  double A = 0.0;           ///< edge coefficient of rho~ = A s~^2 at s = 1

  double rho_at(double s) const { return interp_linear(grid, rho, s); }
};

inline double rho_edge_coefficient(double I, double m) {
  const double r = 0.5 * (std::sqrt(I * I + 4.0 * m) - I);
  return r * r;
}

namespace detail {

inline double f_unit(double s, double m) {
  return m * std::pow(s, m) * (1.0 - s);
}

/// Linear interpolation into an ODE result (monotone t).
inline double ode_sample(const std::vector<double>& t,
                         const std::vector<ode::State<1>>& y, double x) {
  if (x <= t.front()) return y.front()[0];
  if (x >= t.back()) return y.back()[0];
  std::size_t lo = 0, hi = t.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (t[mid] <= x ? lo : hi) = mid;
  }
  const double w = (x - t[lo]) / (t[lo + 1] - t[lo]);
  return y[lo][0] + w * (y[lo + 1][0] - y[lo][0]);
}

}  // namespace detail

/// Integrates the reflected singular ODE
///   rho~'(s~) = 2 m s~ (1-s~)^m - 2 I rho~^{1/2}
/// from the asymptotic start rho~ = A s~^2 and returns rho(s) = rho~(1-s) on
/// a uniform grid. Throws when rho collapses onto the slaved branch well
/// before s = 0 (I too large for a full positive solution).
inline RhoSolution solve_rho(double I, double m, std::size_t n_out = 4001,
                             double s_start = 1e-6) {
  if (!(I > 0.0)) throw InvalidParams("solve_rho: I must be > 0");
  if (!(m > 1.0)) throw InvalidParams("solve_rho: m must be > 1");
  const double A = rho_edge_coefficient(I, m);

  auto rhs = [I, m](double st, const ode::State<1>& y, ode::State<1>& dy) {
    const double r = std::max(y[0], 0.0);
    dy[0] = 2.0 * m * st * std::pow(1.0 - st, m) - 2.0 * I * std::sqrt(r);
  };

  ode::Options opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-10;
  opt.h_init = s_start;
  opt.h_max = 2e-3;
  const auto r = ode::integrate<1>(rhs, {A * s_start * s_start}, s_start,
                                   1.0, opt);

  RhoSolution sol;
  sol.I = I;
  sol.A = A;
  sol.grid = Grid1D::uniform(0.0, 1.0, n_out);
  sol.rho.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double st = 1.0 - sol.grid[i];  // reflect back to s
    sol.rho[i] = std::max(detail::ode_sample(r.t, r.y, st), 0.0);
  }
  sol.rho.front() = 0.0;   // rho(0)
  sol.rho.back() = 0.0;    // rho(1)

  // supercritical detection: the admissible branch obeys rho >= I^2 s^2 / 2
  // near s = 0; the slaved branch decays like s^{2m} and falls below it.
  const double s_probe = 0.01;
  if (sol.rho_at(s_probe) < 0.5 * I * I * s_probe * s_probe)
    throw SolverError("solve_rho: rho hits zero in the interior (I too large)");
  return sol;
}

/// The wave-speed functional
///   J(g) = 2 int_0^{a/b} sqrt(-m s^{m-1} g g' (a s - b s^2)) ds
/// evaluated on the normalized weight g / int g. Open graded quadrature
/// handles the endpoint singularities of the integrand's derivative.
inline double functional_J(const WeightFunction& w, const ModelParams& p,
                           std::size_t n_quad = 4001) {
  p.require_degenerate();
  const double cap = p.capacity();
  for (std::size_t i = 1; i + 1 < w.grid.size(); ++i)
    if (w.g1[i] >= 1e-12)
      throw InvalidParams("functional_J: inadmissible weight (g' >= 0)");

  // normalization int g on the weight's own grid
  double Z = 0.0;
  for (std::size_t i = 0; i + 1 < w.grid.size(); ++i)
    Z += 0.5 * (w.g[i] + w.g[i + 1]) * (w.grid[i + 1] - w.grid[i]);
  if (!(Z > 0.0)) throw InvalidParams("functional_J: weight has zero mass");

  // graded substitution s = cap * u^2 (3 - 2u): zero Jacobian at both ends
  if (n_quad % 2 == 0) ++n_quad;
  const double du = 1.0 / static_cast<double>(n_quad - 1);
  auto integrand = [&](double u) {
    const double s = cap * u * u * (3.0 - 2.0 * u);
    const double jac = cap * 6.0 * u * (1.0 - u);
    const double val = -p.m * std::pow(s, p.m - 1.0) * w.g_at(s) *
                       w.g1_at(s) * (p.a * s - p.b * s * s);
    return 2.0 * std::sqrt(std::max(val, 0.0)) * jac;
  };
  double J = 0.0;  // composite Simpson in u
  for (std::size_t i = 0; i + 2 < n_quad; i += 2) {
    const double u0 = du * static_cast<double>(i);
    J += du / 3.0 *
         (integrand(u0) + 4.0 * integrand(u0 + du) + integrand(u0 + 2 * du));
  }
  return J / Z;
}

/// Result of the extremal-weight fixed point.
struct ExtremalResult {
  WeightFunction g_tilde;   ///< normalized extremal weight on [0, a/b]
  double sigma = 0.0;       ///< g~(0) at the user's (a, b) scale
  double c_star_0 = 0.0;    ///< critical speed at the user's (a, b)
  double c_unit = 0.0;      ///< critical speed at unit scale
  double A = 0.0;           ///< rho edge coefficient at the fixed point
  RhoSolution rho;          ///< unit-scale rho at the fixed point
  int iterations = 0;
  double shooter_rel_diff = std::numeric_limits<double>::quiet_NaN();
};

struct ExtremalConfig {
  double damping = 0.5;
  int max_iter = 100;
  double tol = 1e-6;
  double I_start = 0.3;
  std::size_t n_grid = 20001;     ///< s-grid for g recovery and quadrature
  bool cross_check_shooter = false;
  double shooter_tol = 1e-5;
};

namespace detail {

/// g, J and sigma at unit scale for a trial speed I.
struct UnitWeight {
  std::vector<double> s, g, theta;
  double J = 0.0, Z = 0.0, sigma = 0.0;
};

inline UnitWeight unit_weight_for(double I, double m, const RhoSolution& rho,
                                  std::size_t n) {
  UnitWeight w;
  w.s.resize(n);
  w.g.resize(n);
  w.theta.resize(n);
  const double s_lo = 1e-7, s_hi = 1.0 - 1e-7;
  const double ds = (s_hi - s_lo) / static_cast<double>(n - 1);
  std::vector<double> integrand_J(n), fvals(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = s_lo + ds * static_cast<double>(i);
    const double f = f_unit(s, m);
    const double r = std::max(rho.rho_at(s), 1e-300);
    const double th = f / r;
    if (i > 0) acc += 0.5 * (th + w.theta[i - 1]) * ds;
    w.s[i] = s;
    w.theta[i] = th;
    w.g[i] = std::exp(-acc);
    fvals[i] = f;
    integrand_J[i] = 2.0 * w.g[i] * f / std::sqrt(r);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w.Z += 0.5 * (w.g[i] + w.g[i + 1]) * ds;
    w.J += 0.5 * (integrand_J[i] + integrand_J[i + 1]) * ds;
  }
  w.J /= w.Z;
  w.sigma = w.g.front() / w.Z;
  return w;
}

}  // namespace detail

/// Finds the extremal weight g~, the constant sigma = g~(0), and the
/// chemotaxis-free critical speed c*(m,0) by the damped fixed point
/// I <- (1-theta) I + theta J(g_I) on the rho-ODE recovery of g_I.
inline ExtremalResult extremal_weight(const ModelParams& p,
                                      const ExtremalConfig& cfg = {}) {
  p.require_degenerate();
  const double m = p.m;
  double I = cfg.I_start;
  double last_good = 0.0;
  std::optional<double> first_bad;
  ExtremalResult res;

  RhoSolution rho;
  detail::UnitWeight uw;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    bool supercritical = false;
    try {
      rho = solve_rho(I, m);
      uw = detail::unit_weight_for(I, m, rho, cfg.n_grid);
      if (!std::isfinite(uw.J) || uw.J > 3.0 * std::max(I, 1.0))
        supercritical = true;
    } catch (const SolverError&) {
      supercritical = true;
    }
    if (supercritical) {
      first_bad = first_bad ? std::min(*first_bad, I) : I;
      I = 0.5 * (last_good + I);
      continue;
    }
    last_good = I;
    double I_next = (1.0 - cfg.damping) * I + cfg.damping * uw.J;
    if (first_bad) I_next = std::min(I_next, 0.5 * (last_good + *first_bad));
    if (std::abs(I_next - I) < cfg.tol) {
      I = I_next;
      break;
    }
    I = I_next;
  }
  if (it >= cfg.max_iter)
    throw NonConvergent("extremal_weight: fixed point did not converge");

  res.c_unit = I;
  res.A = rho_edge_coefficient(I, m);
  res.rho = rho;
  res.iterations = it + 1;

  // map to the user's (a, b): speeds by the scaling law, weights by
  // s -> (a/b) s with mass renormalization.
  ModelParams p0 = p;
  p0.chi = 0.0;
  res.c_star_0 = speed_scaling(p0, I);
  const double cap = p.capacity();
  res.sigma = uw.sigma / cap;
  {
    const std::size_t n = uw.s.size();
    std::vector<double> pts(n), g(n), g1(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i] = cap * uw.s[i];
      g[i] = uw.g[i] / (uw.Z * cap);
      g1[i] = -uw.theta[i] * g[i] / cap;
    }
    res.g_tilde.grid = Grid1D(std::move(pts));
    res.g_tilde.g = std::move(g);
    res.g_tilde.g1 = std::move(g1);
  }

  if (cfg.cross_check_shooter) {
    // chi = 0 shot: the signal is irrelevant (lambda = c, mu = a); build a
    // trivial saturated signal so the shooting API applies unchanged.
    Profile sat;
    sat.edge = 0.0;
    sat.grid = Grid1D::uniform(-5.0, 120.0, 126);
    sat.values.resize(sat.grid.size());
    for (std::size_t i = 0; i < sat.grid.size(); ++i)
      sat.values[i] = sat.grid[i] <= 0.0 ? 0.0
                                         : cap * std::min(1.0, sat.grid[i] / 1.0);
    SignalTriple sig = bessel_apply(sat, p.tau * res.c_star_0, p0);
    const double c0 = res.c_star_0;
    const auto sr = critical_speed(sig, p0, 0.5 * c0, 1.6 * c0,
                                   cfg.shooter_tol, 200.0);
    res.shooter_rel_diff = std::abs(sr.speed - c0) / c0;
  }
  return res;
}

/// Lemma-3.9 interval for the chemotaxis wave speed.
struct SpeedBounds {
  double lower = 0.0;          ///< max(2 c0 / 3, coarse lower bound)
  double upper = 0.0;          ///< c0 (exclusive for chi > 0)
  double lower_coarse = 0.0;   ///< c0 - chi sigma a^2 / (2 b^2)
  double lower_refined = 0.0;  ///< using sup|eta'| from the actual signal
  bool hypothesis_ok = false;  ///< chi sigma a^2/(2b^2) <= c0 / 3
};

inline SpeedBounds chemo_speed_bounds(const ExtremalResult& ext,
                                      const SignalTriple& sig,
                                      const ModelParams& p) {
  p.validate();
  const double c0 = ext.c_star_0;
  const double cap = p.capacity();
  const double term = p.chi * ext.sigma * p.a * cap / (2.0 * p.b);
  SpeedBounds b;
  b.hypothesis_ok = term <= c0 / 3.0 + 1e-15;
  if (!b.hypothesis_ok)
    throw SolverError("chemo_speed_bounds: hypothesis chi*sigma*a^2/(2b^2) <= c0/3 violated");
  double sup_eta1 = 0.0;
  for (double v : sig.eta1) sup_eta1 = std::max(sup_eta1, std::abs(v));
  b.lower_coarse = c0 - term;
  b.lower_refined = c0 - p.chi * ext.sigma * cap * sup_eta1;
  b.lower = std::max(2.0 * c0 / 3.0, b.lower_coarse);
  b.upper = c0;
  return b;
}

}  // namespace degenwave

#endif
