#ifndef DEGENWAVE_TESTS_HELPERS_HPP
#define DEGENWAVE_TESTS_HELPERS_HPP

#include <algorithm>
#include <random>
#include <vector>

#include "degenwave/model.hpp"

namespace testutil {

/// Exact m = 2, a = b = 1, chi = 0 wave (edge at 0, speed 1).
inline double aronson(double xi) {
  return xi <= 0.0 ? 0.0 : 1.0 - std::exp(-xi / 2.0);
}

/// Random monotone semi-finite profile with kinks on grid nodes: a
/// piecewise-linear ramp from 0 at the edge to a/b by t = ramp_len, sampled
/// exactly onto a uniform grid.
inline degenwave::Profile random_profile(std::mt19937& rng,
                                         const degenwave::ModelParams& p,
                                         double h = 0.005,
                                         double ramp_len = 8.0,
                                         double tail = 30.0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double cap = p.capacity();
  const auto n =
      static_cast<std::size_t>(std::round((ramp_len + tail + 2.0) / h)) + 1;
  degenwave::Profile prof;
  prof.edge = 0.0;
  prof.grid = degenwave::Grid1D::uniform(
      -2.0, -2.0 + h * static_cast<double>(n - 1), n);
  prof.values.resize(n);

  const int segs = 2 + static_cast<int>(U(rng) * 5.0);
  std::vector<double> ts{0.0}, vs{0.0};
  for (int k = 1; k < segs; ++k) {
    // snap interior kinks onto grid nodes so the piecewise-linear
    // representation of the sampled profile is exact
    ts.push_back(h * std::round(ramp_len * U(rng) / h));
    vs.push_back(cap * U(rng));
  }
  ts.push_back(ramp_len);
  vs.push_back(cap);
  std::sort(ts.begin(), ts.end());
  std::sort(vs.begin(), vs.end());

  for (std::size_t i = 0; i < n; ++i) {
    const double t = prof.grid[i];
    double v = 0.0;
    if (t >= ramp_len) {
      v = cap;
    } else if (t > 0.0) {
      std::size_t j = 0;
      while (j + 1 < ts.size() && ts[j + 1] < t) ++j;
      const double w =
          ts[j + 1] > ts[j] ? (t - ts[j]) / (ts[j + 1] - ts[j]) : 1.0;
      v = vs[j] + w * (vs[j + 1] - vs[j]);
    }
    prof.values[i] = v;
  }
  return prof;
}

}  // namespace testutil

#endif
