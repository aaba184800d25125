#ifndef DEGENWAVE_MODEL_HPP
#define DEGENWAVE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "degenwave/errors.hpp"

namespace degenwave {

/// Parameters of the chemotaxis system
///   u_t = (u^m)_xx - chi (u v_x)_x + u(a - b u),
///   tau v_t = v_xx - v + u.
/// All quantities are nondimensional. m = 1 is accepted here but the
/// degenerate-front solvers require m > 1; only the PDE simulator runs m = 1.
struct ModelParams {
  double m = 2.0;    ///< degeneracy exponent, >= 1
  double chi = 0.0;  ///< chemotactic coefficient, >= 0
  double a = 1.0;    ///< growth rate, > 0
  double b = 1.0;    ///< saturation coefficient, > 0
  double tau = 0.0;  ///< signal relaxation, >= 0

  double capacity() const { return a / b; }

  void validate() const {
    if (!(std::isfinite(m) && std::isfinite(chi) && std::isfinite(a) &&
          std::isfinite(b) && std::isfinite(tau)))
      throw InvalidParams("ModelParams: non-finite parameter");
    if (m < 1.0) throw InvalidParams("ModelParams: m must be >= 1");
    if (a <= 0.0) throw InvalidParams("ModelParams: a must be > 0");
    if (b <= 0.0) throw InvalidParams("ModelParams: b must be > 0");
    if (chi < 0.0) throw InvalidParams("ModelParams: chi must be >= 0");
    if (tau < 0.0) throw InvalidParams("ModelParams: tau must be >= 0");
  }

  void require_degenerate() const {
    validate();
    if (m <= 1.0)
      throw InvalidParams("degenerate solver requires m > 1");
  }
};

/// Logistic reaction u(a - b u).
inline double reaction(double u, const ModelParams& p) {
  if (!std::isfinite(u)) throw InvalidParams("reaction: non-finite u");
  return u * (p.a - p.b * u);
}

/// Strictly increasing 1-D grid; spacing may be non-uniform.
struct Grid1D {
  std::vector<double> points;

  Grid1D() = default;
  explicit Grid1D(std::vector<double> pts) : points(std::move(pts)) {
    validate();
  }

  static Grid1D uniform(double lo, double hi, std::size_t n) {
    if (n < 3 || !(hi > lo)) throw InvalidParams("Grid1D::uniform: bad range");
    std::vector<double> pts(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) pts[i] = lo + h * static_cast<double>(i);
    pts.back() = hi;
    return Grid1D(std::move(pts));
  }

  std::size_t size() const { return points.size(); }
  double front() const { return points.front(); }
  double back() const { return points.back(); }
  double operator[](std::size_t i) const { return points[i]; }

  void validate() const {
    if (points.size() < 3) throw InvalidParams("Grid1D: need >= 3 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!std::isfinite(points[i])) throw InvalidParams("Grid1D: non-finite");
      if (i > 0 && !(points[i] > points[i - 1]))
        throw InvalidParams("Grid1D: not strictly increasing");
    }
  }

  /// Index of the last point <= x, clamped to [0, size()-2].
  std::size_t locate(double x) const {
    auto it = std::upper_bound(points.begin(), points.end(), x);
    if (it == points.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - points.begin()) - 1;
    return std::min(i, points.size() - 2);
  }
};

/// Linear interpolation with constant extension beyond the ends.
inline double interp_linear(const Grid1D& g, const std::vector<double>& y,
                            double x) {
  if (x <= g.front()) return y.front();
  if (x >= g.back()) return y.back();
  const std::size_t i = g.locate(x);
  const double t = (x - g[i]) / (g[i + 1] - g[i]);
  return y[i] + t * (y[i + 1] - y[i]);
}

/// Monotone semi-finite wave profile phi on a grid, support edge at `edge`
/// (normalized runs have edge = 0): phi = 0 for xi <= edge, 0 < phi <= a/b
/// and non-decreasing for xi > edge.
struct Profile {
  Grid1D grid;
  std::vector<double> values;
  double edge = 0.0;

  double operator()(double xi) const { return interp_linear(grid, values, xi); }

  void validate(const ModelParams& p, double slack = 1e-12) const {
    grid.validate();
    if (values.size() != grid.size())
      throw InvalidParams("Profile: size mismatch");
    const double cap = p.capacity();
    double prev = -slack;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = values[i];
      if (!std::isfinite(v)) throw InvalidParams("Profile: non-finite value");
      if (v < -slack || v > cap + slack)
        throw InvalidParams("Profile: value outside [0, a/b]");
      if (grid[i] <= edge && std::abs(v) > slack)
        throw InvalidParams("Profile: nonzero left of edge");
      if (v < prev - slack)
        throw InvalidParams("Profile: not non-decreasing");
      prev = v;
    }
  }
};

/// Report from the Theorem-2.3 admissibility check on chi.
struct ChiAdmissibility {
  bool admissible = false;
  double bound_variational = 0.0;  ///< 2 b^2 c0 / (3 a^2 sigma)
  double bound_growth = 0.0;       ///< 2 b c0 / (3 a)
  double bound_relaxation = 0.0;   ///< b / (tau c0 + 2)
  double min_bound = 0.0;
  double margin = 0.0;             ///< min_bound - chi
};

/// True iff 0 < chi <= min of the three Theorem-2.3 bounds.
/// c0 is the chemotaxis-free critical speed, sigma the extremal-weight
/// constant; both come from the variational module.
inline ChiAdmissibility chi_admissible(const ModelParams& p, double c0,
                                       double sigma) {
  p.validate();
  if (!(c0 > 0.0) || !(sigma > 0.0))
    throw InvalidParams("chi_admissible: c0 and sigma must be > 0");
  ChiAdmissibility r;
  r.bound_variational = 2.0 * p.b * p.b * c0 / (3.0 * p.a * p.a * sigma);
  r.bound_growth = 2.0 * p.b * c0 / (3.0 * p.a);
  r.bound_relaxation = p.b / (p.tau * c0 + 2.0);
  r.min_bound = std::min({r.bound_variational, r.bound_growth,
                          r.bound_relaxation});
  r.margin = r.min_bound - p.chi;
  r.admissible = p.chi > 0.0 && p.chi <= r.min_bound;
  return r;
}

/// Maps the chi = 0 critical speed at a = b = 1 to general (a, b):
/// c = sqrt(a (a/b)^(m-1)) * c_unit. Used as a cross-check oracle only.
inline double speed_scaling(const ModelParams& p, double c_unit) {
  p.validate();
  if (p.chi > 0.0)
    throw InvalidParams("speed_scaling: only defined for chi = 0");
  return std::sqrt(p.a * std::pow(p.capacity(), p.m - 1.0)) * c_unit;
}

}  // namespace degenwave

#endif
