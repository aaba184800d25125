#ifndef DEGENWAVE_FIXED_POINT_HPP
#define DEGENWAVE_FIXED_POINT_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "degenwave/bessel.hpp"
#include "degenwave/model.hpp"
#include "degenwave/shooting.hpp"
#include "degenwave/variational.hpp"

namespace degenwave {

struct FixedPointConfig {
  int max_iter = 60;
  double profile_tol = 1e-6;    ///< stopping tolerance in the weighted norm
  double speed_tol = 1e-5;
  double damping = 0.5;         ///< theta in phi <- (1-theta) phi + theta T(phi)
  double h = 1e-3;              ///< working grid spacing
  double left = -5.0;           ///< working grid left end (edge at 0)
  double tail = 40.0;           ///< window past the 0.999 a/b saturation point
  double bisect_tol = 1e-8;     ///< inner critical-speed bisection width;
                                ///< must sit well below profile_tol or the
                                ///< speed jitter stalls the Picard iteration
  std::size_t norm_radius = 30; ///< N in the truncated weighted norm
  double envelope_c1 = 0.0;     ///< optional lower-envelope constant (0 = off)
  double envelope_c2 = 0.0;     ///< optional upper-envelope constant (0 = off)
  ShootConfig shoot;
  double c0 = std::numeric_limits<double>::quiet_NaN();     ///< chi=0 speed
  double sigma = std::numeric_limits<double>::quiet_NaN();  ///< g~(0)
  bool compute_sigma = true;    ///< run the variational module if sigma unset
};

/// Converged (or best-effort) semi-finite wave of the full system.
struct WaveResult {
  double speed = 0.0;                   ///< c*(m, chi)
  double c_star_0 = 0.0;                ///< chemotaxis-free reference speed
  Profile profile;
  SignalTriple signal;
  int iterations = 0;
  bool converged = false;
  bool iterates_in_profile_set = true;  ///< every Picard iterate passed
                                        ///< Profile::validate
  std::vector<double> residual_profile; ///< ||T(phi_k) - phi_k||_* per iteration
  std::vector<double> residual_speed;   ///< |c_k - c_{k-1}| per iteration
  ChiAdmissibility admissibility;
  bool has_bounds = false;
  SpeedBounds bounds;
  double sigma = std::numeric_limits<double>::quiet_NaN();
};

/// Discrete analogue of the weighted norm
///   ||phi||_* = sum_n 2^{-n} sup_{[-n,n]} |phi|,
/// truncated at window radius N. Far-field differences are geometrically
/// suppressed, which is what makes the Picard stopping test usable.
inline double convergence_norm(const Grid1D& grid,
                               const std::vector<double>& delta,
                               std::size_t radius) {
  if (delta.size() != grid.size())
    throw InvalidParams("convergence_norm: size mismatch");
  std::vector<double> bucket(radius + 1, 0.0);
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double ax = std::abs(grid[i]);
    auto b = static_cast<std::size_t>(std::ceil(ax));
    if (b == 0) b = 1;
    if (b > radius) continue;
    bucket[b] = std::max(bucket[b], std::abs(delta[i]));
  }
  double norm = 0.0, running = 0.0, w = 1.0;
  for (std::size_t n = 1; n <= radius; ++n) {
    running = std::max(running, bucket[n]);
    w *= 0.5;
    norm += w * running;
  }
  return norm;
}

namespace detail {

/// Projects values on `grid` into the profile set: clip to [0, a/b],
/// monotone max-scan, zero left of the edge at 0.
inline void clamp_to_profile_set(const Grid1D& grid, std::vector<double>& v,
                                 double cap) {
  double run = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (grid[i] <= 0.0) {
      v[i] = 0.0;
      continue;
    }
    run = std::max(run, std::min(std::max(v[i], 0.0), cap));
    v[i] = run;
  }
}

/// Optional near-edge envelope clamp phi_lower <= phi <= phi_upper with
/// phi_+- = K1 t^{1/(m-1)} -+ C t^{m/(m-1)}.
inline void clamp_to_envelopes(const Grid1D& grid, std::vector<double>& v,
                               double K1, double C1, double C2, double m,
                               double cap) {
  if (C1 <= 0.0 && C2 <= 0.0) return;
  const double em = 1.0 / (m - 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = grid[i];
    if (t <= 0.0) continue;
    const double lead = K1 * std::pow(t, em);
    const double tail = std::pow(t, m * em);
    if (C1 > 0.0) v[i] = std::max(v[i], std::min(lead - C1 * tail, cap));
    if (C2 > 0.0) v[i] = std::min(v[i], lead + C2 * tail);
  }
}

inline std::vector<double> trace_on_grid(const Grid1D& grid,
                                         const std::vector<PhaseState>& trace,
                                         double cap) {
  std::vector<double> v(grid.size(), 0.0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    if (t <= 0.0) {
      v[i] = 0.0;
    } else if (t >= trace.back().t) {
      v[i] = cap;
    } else {
      while (j + 1 < trace.size() && trace[j + 1].t < t) ++j;
      const auto& s0 = trace[j];
      const auto& s1 = trace[j + 1];
      v[i] = s0.phi + (t - s0.t) / (s1.t - s0.t) * (s1.phi - s0.phi);
    }
  }
  clamp_to_profile_set(grid, v, cap);
  return v;
}

/// chi = 0 critical speed by shooting; the signal content is irrelevant at
/// chi = 0, a saturated dummy profile feeds the API.
inline SpeedResult chi0_speed(const ModelParams& p, double bisect_tol,
                              const ShootConfig& shoot, double t_max,
                              std::vector<PhaseState>* trace_out = nullptr) {
  ModelParams p0 = p;
  p0.chi = 0.0;
  const double cap = p0.capacity();
  Profile sat;
  sat.edge = 0.0;
  sat.grid = Grid1D::uniform(-2.0, t_max, 64);
  sat.values.resize(sat.grid.size());
  for (std::size_t i = 0; i < sat.grid.size(); ++i)
    sat.values[i] =
        sat.grid[i] <= 0.0 ? 0.0 : cap * std::min(1.0, sat.grid[i]);
  const SignalTriple sig = bessel_apply(sat, 0.0, p0);

  const double scale = std::sqrt(p0.a * std::pow(cap, p0.m - 1.0));
  double lo = 0.35 * scale, hi = 2.2 * scale;
  for (int tries = 0; tries < 6; ++tries) {
    try {
      const auto r = critical_speed(sig, p0, lo, hi, bisect_tol, t_max, shoot);
      if (trace_out) {
        const auto shot = integrate_profile(r.bracket_hi, sig, p0, t_max, shoot);
        *trace_out = shot.trace;
      }
      return r;
    } catch (const BracketInvalid&) {
      lo *= 0.6;
      hi *= 1.5;
    }
  }
  throw BracketInvalid("chi0_speed: could not bracket the chi=0 speed");
}

}  // namespace detail

/// One application of the operator T: freeze phi_hat, compute the signal,
/// locate the critical speed of the frozen-coefficient profile equation, and
/// reconstruct the resulting wave on `grid`. For tau > 0 the signal depends
/// on the trial speed through tau*c and is re-solved per shot.
struct ApplyTResult {
  std::vector<double> values;  ///< T(phi_hat) sampled on the working grid
  double speed = 0.0;
  SignalTriple signal;         ///< signal at the returned speed
};

inline ApplyTResult apply_T(const Profile& phi_hat, const ModelParams& p,
                            const Grid1D& grid, double c_lo, double c_hi,
                            const FixedPointConfig& cfg) {
  p.require_degenerate();
  const double cap = p.capacity();
  const double t_max = grid.back();

  SignalTriple sig0;
  const bool moving_signal = p.tau > 0.0;
  if (!moving_signal) sig0 = bessel_apply(phi_hat, 0.0, p);

  auto shoot_at = [&](double c) {
    const SignalTriple& sig =
        moving_signal ? (sig0 = bessel_apply(phi_hat, p.tau * c, p), sig0)
                      : sig0;
    return integrate_profile(c, sig, p, t_max, cfg.shoot);
  };

  const double c_floor = p.chi * p.a / (2.0 * p.b) + 1e-9;
  double lo = std::max(c_lo, c_floor), hi = c_hi;
  auto lo_out = shoot_at(lo);
  auto hi_out = shoot_at(hi);
  for (int tries = 0; tries < 5 && lo_out.counts_as_capacity; ++tries) {
    lo = std::max(c_floor, lo * 0.7);
    lo_out = shoot_at(lo);
  }
  for (int tries = 0; tries < 5 && !hi_out.counts_as_capacity; ++tries) {
    hi *= 1.3;
    hi_out = shoot_at(hi);
  }
  if (lo_out.counts_as_capacity || !hi_out.counts_as_capacity)
    throw BracketInvalid(std::string("apply_T: bracket invalid (lo=") +
                         to_string(lo_out.kind) + ", hi=" +
                         to_string(hi_out.kind) + ")");
  while (hi - lo > cfg.bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    const auto out = shoot_at(mid);
    if (out.counts_as_capacity) {
      hi = mid;
      hi_out = out;
    } else {
      lo = mid;
    }
  }

  ApplyTResult res;
  res.speed = 0.5 * (lo + hi);
  res.values = detail::trace_on_grid(grid, hi_out.trace, cap);
  if (cfg.envelope_c1 > 0.0 || cfg.envelope_c2 > 0.0) {
    const SignalTriple& sig = moving_signal
        ? (sig0 = bessel_apply(phi_hat, p.tau * res.speed, p), sig0)
        : sig0;
    const double lam0 = res.speed + p.chi * sig.eta1_at(0.0);
    const double K1 = std::pow((p.m - 1.0) / p.m * lam0, 1.0 / (p.m - 1.0));
    detail::clamp_to_envelopes(grid, res.values, K1, cfg.envelope_c1,
                               cfg.envelope_c2, p.m, cap);
    detail::clamp_to_profile_set(grid, res.values, cap);
  }
  res.signal = moving_signal ? bessel_apply(phi_hat, p.tau * res.speed, p)
                             : std::move(sig0);
  return res;
}

/// Damped Picard iteration on T until both the weighted profile change and
/// the speed change fall below tolerance. Non-convergence is reported via
/// `converged = false` with the best iterate attached, not as an exception.
inline WaveResult solve_wave(const ModelParams& p, FixedPointConfig cfg = {}) {
  p.require_degenerate();
  const double cap = p.capacity();
  WaveResult res;

  // sigma (for admissibility and the Lemma-3.9 bounds report)
  if (cfg.compute_sigma && !std::isfinite(cfg.sigma)) {
    cfg.sigma = extremal_weight(p).sigma;
  }
  res.sigma = cfg.sigma;

  // chi = 0 reference speed and initial iterate (the Aronson wave)
  std::vector<PhaseState> trace0;
  const double probe_t_max = 80.0 * std::max(1.0, std::sqrt(cap));
  const auto c0_res =
      detail::chi0_speed(p, cfg.bisect_tol, cfg.shoot, probe_t_max, &trace0);
  const double c0 = std::isfinite(cfg.c0) ? cfg.c0 : c0_res.speed;
  res.c_star_0 = c0;

  if (std::isfinite(cfg.sigma) && p.chi > 0.0)
    res.admissibility = chi_admissible(p, c0, cfg.sigma);

  // working grid: [left, right], right = saturation point of the initial
  // iterate plus the configured tail
  double t999 = trace0.back().t;
  for (const auto& s : trace0)
    if (s.phi >= 0.999 * cap) {
      t999 = s.t;
      break;
    }
  const double right = t999 + cfg.tail;
  const auto n = static_cast<std::size_t>(
                     std::ceil((right - cfg.left) / cfg.h)) + 1;
  const Grid1D grid = Grid1D::uniform(
      cfg.left, cfg.left + cfg.h * static_cast<double>(n - 1), n);

  Profile phi;
  phi.edge = 0.0;
  phi.grid = grid;
  phi.values = detail::trace_on_grid(grid, trace0, cap);

  double c_prev = c0;
  bool have_speed = false;
  for (int k = 0; k < cfg.max_iter; ++k) {
    const double lo0 = std::max(2.0 * c0 / 3.0 - 0.1 * c0,
                                p.chi * p.a / (2.0 * p.b) + 1e-9);
    const double hi0 = c_prev + 0.5 * c0;
    const auto t_res = apply_T(phi, p, grid, lo0, hi0, cfg);

    std::vector<double> delta(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      delta[i] = t_res.values[i] - phi.values[i];
    const double dn = convergence_norm(grid, delta, cfg.norm_radius);
    const double dc = have_speed ? std::abs(t_res.speed - c_prev)
                                 : std::numeric_limits<double>::infinity();
    res.residual_profile.push_back(dn);
    res.residual_speed.push_back(dc);
    res.iterations = k + 1;

    for (std::size_t i = 0; i < grid.size(); ++i)
      phi.values[i] = (1.0 - cfg.damping) * phi.values[i] +
                      cfg.damping * t_res.values[i];
    detail::clamp_to_profile_set(grid, phi.values, cap);
    try {
      phi.validate(p, 1e-9);
    } catch (const InvalidParams&) {
      res.iterates_in_profile_set = false;
    }

    c_prev = t_res.speed;
    have_speed = true;
    if (dn < cfg.profile_tol && dc < cfg.speed_tol) {
      res.converged = true;
      res.signal = t_res.signal;
      break;
    }
    if (k + 1 == cfg.max_iter) res.signal = t_res.signal;
  }

  res.speed = c_prev;
  if (p.chi == 0.0) res.c_star_0 = res.speed;  // T is phi-independent at chi=0
  res.profile = phi;
  if (p.chi > 0.0 && std::isfinite(cfg.sigma)) {
    ExtremalResult ext_like;  // bounds only need sigma and c0
    ext_like.sigma = cfg.sigma;
    ext_like.c_star_0 = c0;
    try {
      res.bounds = chemo_speed_bounds(ext_like, res.signal, p);
      res.has_bounds = true;
    } catch (const SolverError&) {
      res.has_bounds = false;
    }
  }
  return res;
}

}  // namespace degenwave

#endif
