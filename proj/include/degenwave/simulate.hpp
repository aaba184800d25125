#ifndef DEGENWAVE_SIMULATE_HPP
#define DEGENWAVE_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "degenwave/model.hpp"

namespace degenwave {

/// State of the 1-D finite-difference run on a uniform grid.
struct SimState {
  Grid1D grid;
  std::vector<double> u;
  std::vector<double> v;
  double time = 0.0;

  void validate() const {
    grid.validate();
    if (u.size() != grid.size() || v.size() != grid.size())
      throw InvalidParams("SimState: size mismatch");
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!std::isfinite(u[i]) || !std::isfinite(v[i]))
        throw SolverError("SimState: non-finite state");
      if (u[i] < 0.0) throw SolverError("SimState: negative u");
    }
  }
};

/// Front positions x_f(t) = leftmost grid point with u > delta.
struct FrontSeries {
  std::vector<double> times;
  std::vector<double> positions;
  double delta = 0.0;
};

namespace detail {

/// Neumann (zero-flux) elliptic solve of -v_xx + v = u, prefactored Thomas
/// sweep reusable across steps on a fixed grid.
struct EllipticSignal {
  std::vector<double> lower, den, cp;  ///< Thomas factorization, fixed grid

  explicit EllipticSignal(const Grid1D& g) {
    const std::size_t n = g.size();
    const double h = g[1] - g[0];
    const double h2 = h * h;
    // rows: (1 + 2/h2) v_i - (1/h2)(v_{i-1} + v_{i+1}); mirrored ghosts fold
    // the end off-diagonals into a single -2/h2 term.
    const double diag = 1.0 + 2.0 / h2;
    const double off = -1.0 / h2;
    lower.resize(n);
    den.resize(n);
    cp.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      lower[i] = (i + 1 == n) ? 2.0 * off : off;
    den[0] = diag;
    cp[0] = 2.0 * off / den[0];
    for (std::size_t i = 1; i < n; ++i) {
      den[i] = diag - lower[i] * cp[i - 1];
      cp[i] = off / den[i];
    }
  }

  void solve(const std::vector<double>& u, std::vector<double>& v) const {
    const std::size_t n = u.size();
    static thread_local std::vector<double> dp;
    dp.resize(n);
    dp[0] = u[0] / den[0];
    for (std::size_t i = 1; i < n; ++i)
      dp[i] = (u[i] - lower[i] * dp[i - 1]) / den[i];
    v.resize(n);
    v[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) v[i] = dp[i] - cp[i] * v[i + 1];
  }
};

}  // namespace detail

/// Stability-bounded explicit time step; recompute every step.
inline double stable_dt(const SimState& s, const ModelParams& p) {
  const double h = s.grid[1] - s.grid[0];
  double u_max = 0.0, vx_max = 0.0;
  for (double ui : s.u) u_max = std::max(u_max, ui);
  for (std::size_t i = 0; i + 1 < s.v.size(); ++i)
    vx_max = std::max(vx_max, std::abs(s.v[i + 1] - s.v[i]) / h);
  const double diffusivity =
      p.m * std::pow(std::max(u_max, 1e-12), p.m - 1.0);
  double dt = 0.4 * h * h / (diffusivity + p.chi * vx_max * h + 1e-12);
  dt = std::min(dt, 0.4 / p.a);
  if (p.tau > 0.0) dt = std::min(dt, 0.4 * p.tau * h * h);
  return dt;
}

/// One explicit step of the full system: central differencing of (u^m)_xx,
/// face-upwinded advection on the sign of v_x, explicit logistic reaction;
/// the signal is an elliptic solve (tau = 0) or an explicit relaxation step
/// (tau > 0). Zero-flux boundaries throughout.
inline void step(SimState& s, const ModelParams& p, double dt,
                 const detail::EllipticSignal& signal) {
  const std::size_t n = s.grid.size();
  const double h = s.grid[1] - s.grid[0];
  const double h2 = h * h;
  if (!(dt > 0.0) || dt > stable_dt(s, p) * 1.0000001)
    throw SolverError("step: cfl-violated");

  static thread_local std::vector<double> w, flux, un;
  w.resize(n);
  flux.resize(n + 1);
  un.resize(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(s.u[i], p.m);

  // advective face flux F_{i+1/2} = chi * u_upwind * v_x; zero at the walls
  flux[0] = flux[n] = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double vx = (s.v[i + 1] - s.v[i]) / h;
    const double up = vx > 0.0 ? s.u[i] : s.u[i + 1];
    flux[i + 1] = p.chi * up * vx;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double wl = (i == 0) ? w[1] : w[i - 1];       // mirrored ghosts
    const double wr = (i + 1 == n) ? w[n - 2] : w[i + 1];
    const double diff = (wl - 2.0 * w[i] + wr) / h2;
    const double adv = (flux[i + 1] - flux[i]) / h;
    un[i] = s.u[i] + dt * (diff - adv + reaction(s.u[i], p));
    if (un[i] < 0.0) {
      if (un[i] < -1e-10) throw SolverError("step: positivity lost");
      un[i] = 0.0;
    }
    if (!std::isfinite(un[i])) throw SolverError("step: non-finite state");
  }
  s.u.swap(un);

  if (p.tau > 0.0) {
    static thread_local std::vector<double> vn;
    vn.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double vl = (i == 0) ? s.v[1] : s.v[i - 1];
      const double vr = (i + 1 == n) ? s.v[n - 2] : s.v[i + 1];
      vn[i] = s.v[i] + dt / p.tau *
                           ((vl - 2.0 * s.v[i] + vr) / h2 - s.v[i] + s.u[i]);
      if (!std::isfinite(vn[i])) throw SolverError("step: non-finite signal");
    }
    s.v.swap(vn);
  } else {
    signal.solve(s.u, s.v);
  }
  s.time += dt;
}

/// Convenience overload building the elliptic factorization on the fly.
inline void step(SimState& s, const ModelParams& p, double dt) {
  const detail::EllipticSignal sig(s.grid);
  step(s, p, dt, sig);
}

/// Default initial data: u = (a/b) H(x) smoothed over two cells, v from the
/// stationary signal equation.
inline SimState make_step_initial(const ModelParams& p, double x_lo,
                                  double x_hi, double h,
                                  double front_at = 0.0) {
  p.validate();
  const auto n = static_cast<std::size_t>(std::round((x_hi - x_lo) / h)) + 1;
  SimState s;
  s.grid = Grid1D::uniform(x_lo, x_lo + h * static_cast<double>(n - 1), n);
  s.u.resize(n);
  const double cap = p.capacity();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = s.grid[i] - front_at;
    double r = (x / (2.0 * h) + 0.5);  // linear ramp over two cells
    r = std::clamp(r, 0.0, 1.0);
    s.u[i] = cap * r;
  }
  const detail::EllipticSignal sig(s.grid);
  sig.solve(s.u, s.v);
  return s;
}

struct RunOptions {
  double dt = 0.0;              ///< 0 = auto from the stability bound
  double delta = -1.0;          ///< front threshold, -1 = 1e-3 * a/b
  double sample_every = 0.25;   ///< front-series sampling interval
  double boundary_margin = 2.0; ///< front-hit-boundary distance
  std::vector<double> snapshot_times;
};

struct RunResult {
  SimState state;
  FrontSeries front;
  std::vector<SimState> snapshots;
  double dt_used = 0.0;         ///< last dt (auto mode recomputes per step)
  std::size_t steps = 0;
};

inline RunResult run(const ModelParams& p, SimState init, double T_final,
                     const RunOptions& opt = {}) {
  p.validate();
  init.validate();
  if (!(T_final > init.time)) throw InvalidParams("run: T_final too small");
  RunResult res;
  res.state = std::move(init);
  res.front.delta = opt.delta > 0.0 ? opt.delta : 1e-3 * p.capacity();
  const detail::EllipticSignal sig(res.state.grid);
  if (p.tau == 0.0) sig.solve(res.state.u, res.state.v);

  auto front_pos = [&]() {
    for (std::size_t i = 0; i < res.state.u.size(); ++i)
      if (res.state.u[i] > res.front.delta) return res.state.grid[i];
    return res.state.grid.back();
  };
  auto record = [&]() {
    const double xf = front_pos();
    if (xf < res.state.grid.front() + opt.boundary_margin)
      throw SolverError("run: front-hit-boundary");
    res.front.times.push_back(res.state.time);
    res.front.positions.push_back(xf);
  };
  record();

  double next_sample = res.state.time + opt.sample_every;
  std::size_t next_snap = 0;
  auto snaps = opt.snapshot_times;
  std::sort(snaps.begin(), snaps.end());

  while (res.state.time < T_final) {
    double dt = opt.dt > 0.0 ? std::min(opt.dt, stable_dt(res.state, p))
                             : stable_dt(res.state, p);
    dt = std::min(dt, T_final - res.state.time);
    if (next_snap < snaps.size() && snaps[next_snap] > res.state.time)
      dt = std::min(dt, snaps[next_snap] - res.state.time);
    step(res.state, p, dt, sig);
    res.dt_used = dt;
    ++res.steps;
    if (res.state.time >= next_sample - 1e-12) {
      record();
      next_sample += opt.sample_every;
    }
    while (next_snap < snaps.size() &&
           res.state.time >= snaps[next_snap] - 1e-12) {
      res.snapshots.push_back(res.state);
      ++next_snap;
    }
  }
  if (res.front.times.back() < res.state.time) record();
  return res;
}

struct EmpiricalSpeed {
  double speed = 0.0;      ///< positive invasion speed (-slope of x_f vs t)
  double stderr_ = 0.0;    ///< standard error of the regression slope
  std::size_t samples = 0;
};

/// Least-squares slope of x_f vs t after discarding the leading burn-in
/// fraction; sign-flipped so leftward invasion reports a positive speed.
inline EmpiricalSpeed empirical_speed(const FrontSeries& series,
                                      double burn_in = 0.3) {
  if (!(burn_in >= 0.0 && burn_in < 1.0))
    throw InvalidParams("empirical_speed: burn_in must be in [0, 1)");
  const std::size_t total = series.times.size();
  const auto start = static_cast<std::size_t>(
      std::ceil(burn_in * static_cast<double>(total)));
  if (total < start + 10)
    throw InvalidParams("empirical_speed: insufficient-samples");

  double st = 0.0, sx = 0.0, stt = 0.0, stx = 0.0;
  const auto n = static_cast<double>(total - start);
  for (std::size_t i = start; i < total; ++i) {
    st += series.times[i];
    sx += series.positions[i];
    stt += series.times[i] * series.times[i];
    stx += series.times[i] * series.positions[i];
  }
  const double denom = n * stt - st * st;
  if (!(denom > 0.0)) throw SolverError("empirical_speed: degenerate times");
  const double slope = (n * stx - st * sx) / denom;
  double rss = 0.0;
  const double icept = (sx - slope * st) / n;
  for (std::size_t i = start; i < total; ++i) {
    const double r = series.positions[i] - (icept + slope * series.times[i]);
    rss += r * r;
  }
  EmpiricalSpeed e;
  e.speed = -slope;
  e.samples = total - start;
  if (n > 2.0) e.stderr_ = std::sqrt(rss / (n - 2.0) / (stt - st * st / n));
  return e;
}

}  // namespace degenwave

#endif
