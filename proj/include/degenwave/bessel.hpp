#ifndef DEGENWAVE_BESSEL_HPP
#define DEGENWAVE_BESSEL_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "degenwave/model.hpp"

namespace degenwave {

/// Chemical signal eta = B[phi] with its first two derivatives, sampled on
/// the solver window. eta2 is recovered algebraically from the equation
/// -eta'' + tau_c eta' + eta = phi.
struct SignalTriple {
  Grid1D grid;
  std::vector<double> eta;
  std::vector<double> eta1;
  std::vector<double> eta2;
  double tau_c = 0.0;
  double window_left = 0.0;  ///< left truncation coordinate actually used

  double eta_at(double t) const { return interp_linear(grid, eta, t); }
  double eta1_at(double t) const { return interp_linear(grid, eta1, t); }
  double eta2_at(double t) const { return interp_linear(grid, eta2, t); }
};

namespace detail {

/// Solves a tridiagonal system in place (Thomas algorithm).
inline void solve_tridiag(std::vector<double>& lo, std::vector<double>& di,
                          std::vector<double>& up, std::vector<double>& rhs) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

/// Three-point first-derivative on a possibly non-uniform grid.
inline std::vector<double> derivative(const Grid1D& g,
                                      const std::vector<double>& y) {
  const std::size_t n = g.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = g[i] - g[i - 1], h2 = g[i + 1] - g[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] +
           (h2 - h1) / (h1 * h2) * y[i] +
           h1 / (h2 * (h1 + h2)) * y[i + 1];
  }
  {  // one-sided second-order ends
    const double h1 = g[1] - g[0], h2 = g[2] - g[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * y[0] +
           (h1 + h2) / (h1 * h2) * y[1] - h1 / (h2 * (h1 + h2)) * y[2];
    const double k1 = g[n - 1] - g[n - 2], k2 = g[n - 2] - g[n - 3];
    d[n - 1] = (2 * k1 + k2) / (k1 * (k1 + k2)) * y[n - 1] -
               (k1 + k2) / (k1 * k2) * y[n - 2] +
               k1 / (k2 * (k1 + k2)) * y[n - 3];
  }
  return d;
}

/// Positive characteristic root of r^2 - tau_c r - 1 = 0.
inline double char_root_pos(double tau_c) {
  return 0.5 * (tau_c + std::sqrt(tau_c * tau_c + 4.0));
}

}  // namespace detail

/// Solver window and sampling of phi used by bessel_apply: the profile's own
/// grid, extended to the left of the support edge (phi = 0 there) down to
/// edge - max(20, 10 / r_plus), where r_plus is the positive characteristic
/// decay rate.
inline Grid1D bessel_window(const Profile& phi, double tau_c) {
  const double left = phi.edge -
      std::max(20.0, 10.0 / detail::char_root_pos(tau_c));
  std::vector<double> pts;
  if (phi.grid.front() > left) {
    const double h0 = phi.grid[1] - phi.grid[0];
    const auto n_ext = static_cast<std::size_t>(
        std::ceil((phi.grid.front() - left) / h0));
    pts.reserve(n_ext + phi.grid.size());
    for (std::size_t k = 0; k < n_ext; ++k)
      pts.push_back(phi.grid.front() -
                    static_cast<double>(n_ext - k) * h0);
  }
  pts.insert(pts.end(), phi.grid.points.begin(), phi.grid.points.end());
  return Grid1D(std::move(pts));
}

/// Bounded solution of -eta'' + tau_c eta' + eta = phi on the truncated
/// window, with phi extended as 0 left of its edge. Boundary values: 0 at the
/// left end, a/b at the right end. Workhorse route (tridiagonal BVP).
inline SignalTriple bessel_apply(const Profile& phi, double tau_c,
                                 const ModelParams& p) {
  if (tau_c < 0.0) throw InvalidParams("bessel_apply: tau_c must be >= 0");
  if (phi.grid.size() < 3) throw InvalidParams("bessel_apply: grid too short");
  for (double v : phi.values)
    if (!std::isfinite(v)) throw InvalidParams("bessel_apply: non-finite phi");

  SignalTriple sig;
  sig.tau_c = tau_c;
  sig.grid = bessel_window(phi, tau_c);
  sig.window_left = sig.grid.front();
  const std::size_t n = sig.grid.size();

  std::vector<double> phi_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sig.grid[i];
    phi_w[i] = (x <= phi.edge) ? 0.0 : phi(x);
  }

  std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0), rhs = phi_w;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = sig.grid[i] - sig.grid[i - 1];
    const double h2 = sig.grid[i + 1] - sig.grid[i];
    const double s = h1 + h2;
    lo[i] = -2.0 / (h1 * s) + tau_c * (-h2 / (h1 * s));
    di[i] = 2.0 / (h1 * h2) + tau_c * (h2 - h1) / (h1 * h2) + 1.0;
    up[i] = -2.0 / (h2 * s) + tau_c * (h1 / (h2 * s));
  }
  di[0] = 1.0;
  rhs[0] = 0.0;
  di[n - 1] = 1.0;
  rhs[n - 1] = p.capacity();
  detail::solve_tridiag(lo, di, up, rhs);

  sig.eta = std::move(rhs);
  sig.eta1 = detail::derivative(sig.grid, sig.eta);
  sig.eta2.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    sig.eta2[i] = tau_c * sig.eta1[i] + sig.eta[i] - phi_w[i];
  return sig;
}

// ---------------------------------------------------------------------------
// Independent oracle: the heat-semigroup double integral
//   eta(xi) = int_0^inf int_R e^{-s}/sqrt(4 pi s) e^{-(xi-z)^2/(4s)}
//             phi(z - tau_c s) dz ds.
// The inner integral is the Gaussian (variance 2s) smoothing of phi, done in
// closed form for piecewise-linear phi; the outer integral uses composite
// Gauss-Legendre in q = sqrt(s).
// ---------------------------------------------------------------------------

/// Piecewise-linear function with optional jumps, constant beyond the ends.
struct PiecewiseLinear {
  double y_left = 0.0;
  std::vector<double> xs;       ///< breakpoint positions
  std::vector<double> jumps;    ///< value jump at each breakpoint
  std::vector<double> dslopes;  ///< slope change at each breakpoint

  static PiecewiseLinear from_profile(const Profile& phi) {
    PiecewiseLinear f;
    f.y_left = 0.0;
    // breakpoints: support edge, then every grid node right of it
    std::vector<double> xs{phi.edge}, ys{0.0};
    for (std::size_t i = 0; i < phi.grid.size(); ++i) {
      if (phi.grid[i] > phi.edge) {
        xs.push_back(phi.grid[i]);
        ys.push_back(phi.values[i]);
      }
    }
    double prev_slope = 0.0, max_slope = 0.0;
    for (std::size_t j = 0; j + 1 < xs.size(); ++j)
      max_slope = std::max(max_slope, std::abs((ys[j + 1] - ys[j]) /
                                               (xs[j + 1] - xs[j])));
    const double eps = 1e-12 * max_slope;  // drop collinear grid nodes
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
      const double slope = (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]);
      if (std::abs(slope - prev_slope) > eps) {
        f.xs.push_back(xs[j]);
        f.jumps.push_back(0.0);
        f.dslopes.push_back(slope - prev_slope);
        prev_slope = slope;
      }
    }
    f.xs.push_back(xs.back());
    f.jumps.push_back(0.0);
    f.dslopes.push_back(-prev_slope);  // constant extension on the right
    return f;
  }

  double value(double x) const {
    double v = y_left;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double u = x - xs[j];
      if (u > 0.0)
        v += jumps[j] + dslopes[j] * u;
      else if (u == 0.0)
        v += 0.5 * jumps[j];
    }
    return v;
  }
};

namespace detail {

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
inline double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

/// Gaussian smoothing (std dev sigma) of a PiecewiseLinear at x; d selects
/// the 0th or 1st derivative.
inline double smoothed(const PiecewiseLinear& f, double x, double sigma,
                       int d) {
  double v = (d == 0) ? f.y_left : 0.0;
  for (std::size_t j = 0; j < f.xs.size(); ++j) {
    const double u = x - f.xs[j];
    if (sigma < 1e-14) {
      if (d == 0)
        v += f.jumps[j] * (u > 0 ? 1.0 : (u == 0 ? 0.5 : 0.0)) +
             f.dslopes[j] * std::max(u, 0.0);
      else
        v += f.dslopes[j] * (u > 0 ? 1.0 : 0.0);
      continue;
    }
    const double z = u / sigma;
    if (d == 0)
      v += f.jumps[j] * norm_cdf(z) +
           f.dslopes[j] * (u * norm_cdf(z) + sigma * norm_pdf(z));
    else
      v += f.jumps[j] * norm_pdf(z) / sigma + f.dslopes[j] * norm_cdf(z);
  }
  return v;
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr double gl_x[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
inline constexpr double gl_w[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

/// Outer quadrature in q = sqrt(s): eta^(d)(xi) with the e^{-s} weight.
inline double bessel_outer(const PiecewiseLinear& f, double xi, double tau_c,
                           int d, int panels, double q_max) {
  double total = 0.0;
  for (int pnl = 0; pnl < panels; ++pnl) {
    // quadratic grading toward q = 0, where the smoothing width collapses
    // and the integrand develops a kink-induced boundary layer
    const double ua = static_cast<double>(pnl) / panels;
    const double ub = static_cast<double>(pnl + 1) / panels;
    const double qa = q_max * ua * ua, qb = q_max * ub * ub;
    for (int k = 0; k < 16; ++k) {
      const double q = 0.5 * (qb - qa) * gl_x[k] + 0.5 * (qa + qb);
      const double w = 0.5 * (qb - qa) * gl_w[k];
      const double s = q * q;
      const double sigma = std::sqrt(2.0 * s);
      total += w * 2.0 * q * std::exp(-s) *
               smoothed(f, xi - tau_c * s, sigma, d);
    }
  }
  return total;
}

}  // namespace detail

struct QuadratureOptions {
  int panels = 10;
  double q_max = 6.5;       ///< truncate at s = q_max^2 (e^{-s} < 4e-19)
  double check_tol = 1e-7;  ///< self-consistency threshold (× a/b)
};

/// Evaluates eta = B[phi] (and eta') by the double-integral representation on
/// `eval`; eta'' comes from the algebraic identity. Cross-validation oracle
/// for bessel_apply; throws if panel refinement fails to agree.
inline SignalTriple bessel_quadrature(const PiecewiseLinear& f,
                                      const Grid1D& eval, double tau_c,
                                      const ModelParams& p,
                                      const QuadratureOptions& opt = {}) {
  if (tau_c < 0.0) throw InvalidParams("bessel_quadrature: tau_c < 0");
  SignalTriple sig;
  sig.tau_c = tau_c;
  sig.grid = eval;
  sig.window_left = eval.front();
  const std::size_t n = eval.size();
  sig.eta.resize(n);
  sig.eta1.resize(n);
  sig.eta2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sig.eta[i] = detail::bessel_outer(f, eval[i], tau_c, 0, opt.panels,
                                      opt.q_max);
    sig.eta1[i] = detail::bessel_outer(f, eval[i], tau_c, 1, opt.panels,
                                       opt.q_max);
    sig.eta2[i] = tau_c * sig.eta1[i] + sig.eta[i] - f.value(eval[i]);
  }
  // convergence check at a few window points against a refined rule
  const std::size_t stride = std::max<std::size_t>(1, n / 5);
  for (std::size_t i = 0; i < n; i += stride) {
    const double refined = detail::bessel_outer(f, eval[i], tau_c, 0,
                                                opt.panels + 6, opt.q_max);
    if (std::abs(refined - sig.eta[i]) > opt.check_tol * p.capacity())
      throw SolverError("bessel_quadrature: quadrature non-convergent");
  }
  return sig;
}

inline SignalTriple bessel_quadrature(const Profile& phi, double tau_c,
                                      const ModelParams& p,
                                      const QuadratureOptions& opt = {}) {
  return bessel_quadrature(PiecewiseLinear::from_profile(phi),
                           bessel_window(phi, tau_c), tau_c, p, opt);
}

}  // namespace degenwave

#endif
