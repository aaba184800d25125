#ifndef DEGENWAVE_SHOOTING_HPP
#define DEGENWAVE_SHOOTING_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "degenwave/bessel.hpp"
#include "degenwave/model.hpp"
#include "degenwave/ode.hpp"

namespace degenwave {

/// Frozen-signal coefficients of the profile equation at trial speed c:
/// lambda(t) = c + chi eta'(t), lambda'(t) = chi eta''(t),
/// mu(t) = a - chi eta''(t).
struct CoefficientFields {
  Grid1D grid;
  std::vector<double> lambda;
  std::vector<double> lambda1;
  std::vector<double> mu;
  double c = 0.0;

  double lambda_at(double t) const { return interp_linear(grid, lambda, t); }
  double lambda1_at(double t) const { return interp_linear(grid, lambda1, t); }
  double mu_at(double t) const { return interp_linear(grid, mu, t); }
};

inline CoefficientFields build_coefficients(const SignalTriple& sig, double c,
                                            const ModelParams& p) {
  CoefficientFields cf;
  cf.grid = sig.grid;
  cf.c = c;
  const std::size_t n = sig.grid.size();
  cf.lambda.resize(n);
  cf.lambda1.resize(n);
  cf.mu.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cf.lambda[i] = c + p.chi * sig.eta1[i];
    cf.lambda1[i] = p.chi * sig.eta2[i];
    cf.mu[i] = p.a - p.chi * sig.eta2[i];
  }
  return cf;
}

/// One sample along a shot: phi, psi = (phi^m)', and zeta = phi^m.
struct PhaseState {
  double t = 0.0;
  double phi = 0.0;
  double psi = 0.0;
};

/// zeta = phi^m, the variable in which the edge problem is regular.
inline double zeta_of(const PhaseState& s, double m) {
  return std::pow(s.phi, m);
}

enum class ShootKind { ReachedCapacity, TurnedBack, StillGrowing };

inline const char* to_string(ShootKind k) {
  switch (k) {
    case ShootKind::ReachedCapacity: return "ReachedCapacity";
    case ShootKind::TurnedBack: return "TurnedBack";
    default: return "StillGrowing";
  }
}

struct ShootOutcome {
  ShootKind kind = ShootKind::StillGrowing;
  double t_end = 0.0;
  double phi_end = 0.0;
  std::vector<PhaseState> trace;
  bool counts_as_capacity = false;  ///< bisection predicate actually used
  bool truncation_warning = false;  ///< StillGrowing below the 0.99 a/b mark
};

/// Critical speed with its bisection bracket and provenance.
struct SpeedResult {
  double speed = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double tol = 0.0;
  std::string provenance;  ///< "shooting", "variational", "fixed-point", "empirical"
};

struct ShootConfig {
  double t0_scale = 1e-6;       ///< series start t0 = t0_scale * (a/b)^(m-1)
  double capacity_tol = 1e-8;   ///< ReachedCapacity when phi >= a/b - this
  double still_growing_frac = 0.99;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double h_max = 0.05;  ///< also bounds the trace spacing for reconstruction
};

/// Two-term series coefficients of the maximal semi-finite solution at the
/// singular support edge: phi(t) = K1 t^{1/(m-1)} + K2 t^{m/(m-1)} + o(.).
inline std::pair<double, double> local_expansion(double lambda0,
                                                 double lambda1_0, double mu0,
                                                 double m) {
  if (!(m > 1.0)) throw InvalidParams("local_expansion: m must be > 1");
  if (!(lambda0 > 0.0))
    throw InvalidParams("local_expansion: lambda(0) must be > 0");
  const double K1 = std::pow((m - 1.0) / m * lambda0, 1.0 / (m - 1.0));
  const double K2 =
      -(mu0 - lambda1_0 / (m - 1.0)) / (2.0 * m * lambda0) * K1;
  return {K1, K2};
}

/// Integrates the profile system
///   dphi/dt = psi / (m phi^{m-1}),
///   dpsi/dt = lambda(t) psi / (m phi^{m-1}) + b phi^2 - mu(t) phi
/// from the series start, stopping at capacity, a turning point (psi <= 0),
/// or t_max.
inline ShootOutcome integrate_profile(double c, const SignalTriple& sig,
                                      const ModelParams& p, double t_max,
                                      const ShootConfig& cfg = {}) {
  p.require_degenerate();
  const double cap = p.capacity();
  if (!(c > p.chi * p.a / (2.0 * p.b)))
    throw InvalidParams("integrate_profile: speed too small, lambda may vanish");

  const CoefficientFields cf = build_coefficients(sig, c, p);
  const double m = p.m;
  const double lam0 = cf.lambda_at(0.0);
  auto [K1, K2] = local_expansion(lam0, cf.lambda1_at(0.0), cf.mu_at(0.0), m);

  const double em = 1.0 / (m - 1.0);
  double t0 = cfg.t0_scale * std::pow(cap, m - 1.0);
  double phi0 = K1 * std::pow(t0, em) + K2 * std::pow(t0, m * em);
  while (phi0 <= 0.0 && t0 > 1e-300) {  // K2 < 0 can spoil a too-large start
    t0 *= 0.5;
    phi0 = K1 * std::pow(t0, em) + K2 * std::pow(t0, m * em);
  }
  const double dphi0 =
      K1 * em * std::pow(t0, em - 1.0) + K2 * m * em * std::pow(t0, em);
  const double psi0 = m * std::pow(phi0, m - 1.0) * dphi0;

  auto rhs = [&](double t, const ode::State<2>& y, ode::State<2>& dy) {
    const double phi = y[0], psi = y[1];
    const double denom = m * std::pow(std::max(phi, 1e-300), m - 1.0);
    dy[0] = psi / denom;
    dy[1] = cf.lambda_at(t) * psi / denom + p.b * phi * phi - cf.mu_at(t) * phi;
  };

  std::vector<ode::Event<2>> events(2);
  events[0].g = [](double, const ode::State<2>& y) { return y[1]; };
  events[0].direction = -1;  // TurnedBack: psi hits 0
  const double cap_line = cap - cfg.capacity_tol;
  events[1].g = [cap_line](double, const ode::State<2>& y) {
    return y[0] - cap_line;
  };
  events[1].direction = +1;  // ReachedCapacity

  ode::Options opt;
  opt.abs_tol = cfg.abs_tol;
  opt.rel_tol = cfg.rel_tol;
  opt.h_init = t0;
  opt.h_max = cfg.h_max;

  const auto r = ode::integrate<2>(rhs, {phi0, psi0}, t0, t_max, opt, events);

  ShootOutcome out;
  out.trace.reserve(r.t.size());
  for (std::size_t i = 0; i < r.t.size(); ++i)
    out.trace.push_back({r.t[i], r.y[i][0], r.y[i][1]});
  out.t_end = r.t.back();
  out.phi_end = r.y.back()[0];
  if (r.event_index == 1) {
    out.kind = ShootKind::ReachedCapacity;
    out.counts_as_capacity = true;
  } else if (r.event_index == 0) {
    out.kind = ShootKind::TurnedBack;
  } else {
    out.kind = ShootKind::StillGrowing;
    const bool nearly_there = out.phi_end >= cfg.still_growing_frac * cap &&
                              r.y.back()[1] > 0.0;
    out.counts_as_capacity = nearly_there;
    out.truncation_warning = !nearly_there;
  }
  return out;
}

/// Locates c*(m, chi, phi_hat) by bisection on the shooting outcome.
/// Requires a valid bracket: c_lo turns back, c_hi reaches capacity.
inline SpeedResult critical_speed(const SignalTriple& sig,
                                  const ModelParams& p, double c_lo,
                                  double c_hi, double tol, double t_max,
                                  const ShootConfig& cfg = {}) {
  if (!(c_lo < c_hi) || !(tol > 0.0))
    throw InvalidParams("critical_speed: bad bracket or tolerance");
  const auto lo_out = integrate_profile(c_lo, sig, p, t_max, cfg);
  const auto hi_out = integrate_profile(c_hi, sig, p, t_max, cfg);
  if (lo_out.counts_as_capacity || !hi_out.counts_as_capacity)
    throw BracketInvalid(std::string("critical_speed: bracket invalid (lo=") +
                         to_string(lo_out.kind) + ", hi=" +
                         to_string(hi_out.kind) + ")");
  double lo = c_lo, hi = c_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const auto out = integrate_profile(mid, sig, p, t_max, cfg);
    (out.counts_as_capacity ? hi : lo) = mid;
  }
  SpeedResult res;
  res.speed = 0.5 * (lo + hi);
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.tol = tol;
  res.provenance = "shooting";
  return res;
}

/// Re-parameterizes an increasing-branch trace by phi (generalized phase
/// plane): returns the sampled curve psi~(phi).
inline std::pair<std::vector<double>, std::vector<double>> psi_of_phi(
    const std::vector<PhaseState>& trace) {
  if (trace.size() < 2) throw InvalidParams("psi_of_phi: trace too short");
  std::vector<double> phi, psi;
  phi.reserve(trace.size());
  psi.reserve(trace.size());
  double prev = -1.0;
  for (const auto& s : trace) {
    if (s.phi <= prev)
      throw SolverError("psi_of_phi: non-monotone trace");
    phi.push_back(s.phi);
    psi.push_back(s.psi);
    prev = s.phi;
  }
  return {std::move(phi), std::move(psi)};
}

/// Rebuilds a Profile on a uniform grid from a capacity-reaching (or
/// converged) trace: zero-extended left of the edge, clamped to a/b beyond
/// the last sample, edge normalized to 0.
inline Profile reconstruct_profile(const std::vector<PhaseState>& trace,
                                   const ModelParams& p, double h = 1e-3,
                                   double left_pad = 5.0,
                                   double right_pad = 0.0) {
  if (trace.size() < 3) throw InvalidParams("reconstruct_profile: trace too short");
  const double cap = p.capacity();
  const double t_end = trace.back().t + right_pad;
  const auto n = static_cast<std::size_t>(std::ceil((t_end + left_pad) / h)) + 1;
  Profile prof;
  prof.edge = 0.0;
  prof.grid = Grid1D::uniform(-left_pad, -left_pad + h * static_cast<double>(n - 1),
                              n);
  prof.values.resize(n);
  std::size_t j = 0;
  double run_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = prof.grid[i];
    double v;
    if (t <= 0.0) {
      v = 0.0;
    } else if (t >= trace.back().t) {
      v = cap;
    } else {
      while (j + 1 < trace.size() && trace[j + 1].t < t) ++j;
      const auto& s0 = trace[j];
      const auto& s1 = trace[j + 1];
      if (s0.phi > 0.0 && s1.phi < 0.05 * cap && s0.t > 0.0) {
        // near the edge phi is a steep power of t; interpolate the power law
        const double w = (std::log(t) - std::log(s0.t)) /
                         (std::log(s1.t) - std::log(s0.t));
        v = std::exp((1.0 - w) * std::log(s0.phi) + w * std::log(s1.phi));
      } else {
        const double w = (t - s0.t) / (s1.t - s0.t);
        v = s0.phi + w * (s1.phi - s0.phi);
      }
    }
    run_max = std::max(run_max, std::min(std::max(v, 0.0), cap));
    prof.values[i] = (t <= 0.0) ? 0.0 : run_max;
  }
  return prof;
}

}  // namespace degenwave

#endif
