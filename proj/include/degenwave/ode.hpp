#ifndef DEGENWAVE_ODE_HPP
#define DEGENWAVE_ODE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "degenwave/errors.hpp"

namespace degenwave::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double h_init = 1e-6;
  double h_max = 1.0;
  std::size_t max_steps = 5'000'000;
};

/// Scalar event g(t, y); fires on a sign change of g along an accepted step.
/// direction: -1 fires only on decreasing crossings, +1 on increasing, 0 both.
template <std::size_t N>
struct Event {
  std::function<double(double, const State<N>&)> g;
  int direction = 0;
};

template <std::size_t N>
struct Result {
  std::vector<double> t;          ///< accepted step endpoints (t[0] = t0)
  std::vector<State<N>> y;
  int event_index = -1;           ///< which event stopped the run, -1 if none
  bool reached_end = false;
  std::size_t steps = 0;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                        c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                        e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t N>
bool finite(const State<N>& y) {
  for (double v : y)
    if (!std::isfinite(v)) return false;
  return true;
}

// Cubic Hermite interpolant on one accepted step.
template <std::size_t N>
State<N> hermite(double th, double h, const State<N>& y0, const State<N>& f0,
                 const State<N>& y1, const State<N>& f1) {
  const double th2 = th * th, th3 = th2 * th;
  const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th,
               h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
  State<N> y;
  for (std::size_t i = 0; i < N; ++i)
    y[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
  return y;
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration from t0 to t1 (t1 > t0) with
/// event detection. Accepted step endpoints are recorded in the result; when
/// an event fires, the crossing is localized on the dense interpolant by
/// bisection and the last recorded point lies on the event.
template <std::size_t N, class RHS>
Result<N> integrate(RHS&& rhs, State<N> y0, double t0, double t1,
                    const Options& opt,
                    const std::vector<Event<N>>& events = {}) {
  using namespace detail;
  Result<N> res;
  if (!(t1 > t0)) throw InvalidParams("ode::integrate: need t1 > t0");

  State<N> y = y0, k1;
  rhs(t0, y, k1);
  if (!finite(k1)) throw SolverError("ode::integrate: non-finite RHS at t0");
  double t = t0;
  double h = std::min({opt.h_init, opt.h_max, t1 - t0});

  std::vector<double> ev_prev(events.size());
  for (std::size_t j = 0; j < events.size(); ++j) ev_prev[j] = events[j].g(t, y);

  res.t.push_back(t);
  res.y.push_back(y);

  State<N> k2, k3, k4, k5, k6, k7, ytmp, y5;
  while (t < t1) {
    if (res.steps++ > opt.max_steps)
      throw SolverError("ode::integrate: max step count exceeded");
    if (t + h > t1) h = t1 - t;

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                            a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
    rhs(t + h, y5, k7);

    bool ok = finite(k2) && finite(k3) && finite(k4) && finite(k5) &&
              finite(k6) && finite(k7) && finite(y5);
    double err = 0.0;
    if (ok) {
      for (std::size_t i = 0; i < N; ++i) {
        const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                               e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = opt.abs_tol +
                          opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(ei) / sc);
      }
    } else {
      err = 10.0;
    }

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (!(h > 0.0) || t + h == t)
        throw SolverError("ode::integrate: step size underflow");
      continue;
    }

    // Step accepted; check events on [t, t+h].
    const double t_new = t + h;
    int fired = -1;
    double th_fire = 1.0;
    State<N> y_fire = y5;
    for (std::size_t j = 0; j < events.size(); ++j) {
      const double e0 = ev_prev[j];
      const double e1v = events[j].g(t_new, y5);
      const bool crossing =
          (e0 > 0.0 && e1v <= 0.0 && events[j].direction <= 0) ||
          (e0 < 0.0 && e1v >= 0.0 && events[j].direction >= 0);
      if (!crossing) {
        ev_prev[j] = e1v;
        continue;
      }
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        State<N> ym = hermite(mid, h, y, k1, y5, k7);
        const double em = events[j].g(t + mid * h, ym);
        if ((e0 > 0.0) == (em > 0.0))
          lo = mid;
        else
          hi = mid;
      }
      if (hi < th_fire || fired < 0) {
        th_fire = hi;
        y_fire = hermite(hi, h, y, k1, y5, k7);
        fired = static_cast<int>(j);
      }
    }

    if (fired >= 0) {
      res.t.push_back(t + th_fire * h);
      res.y.push_back(y_fire);
      res.event_index = fired;
      return res;
    }

    t = t_new;
    y = y5;
    k1 = k7;  // FSAL
    res.t.push_back(t);
    res.y.push_back(y);

    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    h = std::min(h, opt.h_max);
  }
  res.reached_end = true;
  return res;
}

}  // namespace degenwave::ode

#endif
