#ifndef DEGENWAVE_CLASSIFY_HPP
#define DEGENWAVE_CLASSIFY_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "degenwave/model.hpp"

namespace degenwave {

enum class WaveClass { Sharp, C1 };

inline const char* to_string(WaveClass c) {
  return c == WaveClass::Sharp ? "sharp" : "C1";
}

/// Theorem-2.4 dichotomy: sharp type for m >= 2, C1 type for 1 < m < 2.
inline WaveClass classify(const ModelParams& p) {
  p.require_degenerate();
  return p.m >= 2.0 ? WaveClass::Sharp : WaveClass::C1;
}

/// Log-log least-squares fit phi(t) ~ amplitude * t^p near the support edge.
struct EdgeFit {
  double exponent = 0.0;   ///< fitted p, expected 1/(m-1)
  double amplitude = 0.0;  ///< fitted prefactor, expected K1
  double t_lo = 0.0;
  double t_hi = 0.0;
  double residual = 0.0;   ///< RMS residual of the log-log fit
  std::size_t samples = 0;
};

/// Fits log phi = log A + p log t over t in [t_lo, t_hi] past the edge.
/// Pass t_lo = t_hi = 0 for the default window [5h, 50h].
inline EdgeFit edge_exponent(const Profile& prof, const ModelParams& p,
                             double t_lo = 0.0, double t_hi = 0.0) {
  prof.validate(p);
  const double cap = p.capacity();
  if (t_lo <= 0.0 || t_hi <= t_lo) {
    double h = prof.grid.back() - prof.grid.front();
    for (std::size_t i = 0; i + 1 < prof.grid.size(); ++i)
      h = std::min(h, prof.grid[i + 1] - prof.grid[i]);
    t_lo = 5.0 * h;
    t_hi = 50.0 * h;
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < prof.grid.size(); ++i) {
    const double t = prof.grid[i] - prof.edge;
    if (t < t_lo || t > t_hi) continue;
    const double v = prof.values[i];
    if (v <= 0.0 || v >= 0.1 * cap) continue;
    lx.push_back(std::log(t));
    ly.push_back(std::log(v));
  }
  if (lx.size() < 4)
    throw InvalidParams("edge_exponent: window empty or profile not semi-finite");

  const auto n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0))
    throw SolverError("edge_exponent: degenerate fit window");
  EdgeFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.amplitude = std::exp((sy - fit.exponent * sx) / n);
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.samples = lx.size();
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (std::log(fit.amplitude) + fit.exponent * lx[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  if (!(fit.exponent > 0.0))
    throw SolverError("edge_exponent: non-positive fitted exponent");
  return fit;
}

/// Diagnostic report: does the edge-derivative refinement behavior and the
/// fitted exponent agree with the theorem's classification?
struct ConsistencyReport {
  WaveClass theoretical = WaveClass::Sharp;
  EdgeFit fit;
  double expected_exponent = 0.0;
  double exponent_rel_err = 0.0;
  std::vector<double> probe_t;        ///< shrinking probe offsets
  std::vector<double> edge_derivative; ///< phi(t)/t at each probe
  std::string derivative_regime;      ///< "diverging", "finite", "vanishing"
  bool agrees = false;
};

/// Estimates the one-sided edge derivative via difference quotients
/// phi(t)/t at geometrically shrinking t. Under refinement the quotient
/// diverges for m > 2, tends to K1 for m = 2, and tends to 0 for m < 2.
inline ConsistencyReport consistency_check(const Profile& prof,
                                           const ModelParams& p) {
  ConsistencyReport rep;
  rep.theoretical = classify(p);
  rep.fit = edge_exponent(prof, p);
  rep.expected_exponent = 1.0 / (p.m - 1.0);
  rep.exponent_rel_err =
      std::abs(rep.fit.exponent - rep.expected_exponent) / rep.expected_exponent;

  // smallest usable offset: a few grid cells past the edge
  double h = prof.grid.back() - prof.grid.front();
  for (std::size_t i = 0; i + 1 < prof.grid.size(); ++i)
    h = std::min(h, prof.grid[i + 1] - prof.grid[i]);
  double t = 128.0 * h;
  while (t >= 2.0 * h) {
    const double v = prof(prof.edge + t);
    if (v > 0.0) {
      rep.probe_t.push_back(t);
      rep.edge_derivative.push_back(v / t);
    }
    t *= 0.5;
  }
  if (rep.probe_t.size() < 3)
    throw InvalidParams("consistency_check: too few usable probes");

  // monotone trend of the quotient across the refinement ladder
  const double first = rep.edge_derivative.front();
  const double last = rep.edge_derivative.back();
  const double ratio = last / first;
  if (ratio > 1.5)
    rep.derivative_regime = "diverging";
  else if (ratio < 1.0 / 1.5)
    rep.derivative_regime = "vanishing";
  else
    rep.derivative_regime = "finite";

  bool regime_ok;
  if (p.m > 2.0)
    regime_ok = rep.derivative_regime == "diverging";
  else if (p.m < 2.0)
    regime_ok = rep.derivative_regime == "vanishing";
  else
    regime_ok = rep.derivative_regime == "finite";
  rep.agrees = regime_ok && rep.exponent_rel_err <= 0.05;
  return rep;
}

}  // namespace degenwave

#endif
