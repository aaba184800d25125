#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "degenwave/variational.hpp"

using namespace degenwave;

TEST_CASE("rho edge coefficient", "[variational]") {
  // I = 1, m = 2: r = 1, A = 1 (the exact rho = s^2 (1-s)^2 branch)
  REQUIRE(rho_edge_coefficient(1.0, 2.0) == Catch::Approx(1.0));
}

TEST_CASE("rho ODE at the m = 2 critical speed", "[variational]") {
  const auto sol = solve_rho(1.0, 2.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    const double s = sol.grid[i];
    worst = std::max(worst,
                     std::abs(sol.rho[i] - s * s * (1.0 - s) * (1.0 - s)));
  }
  REQUIRE(worst < 1e-5);

  SECTION("supercritical I collapses in the interior") {
    REQUIRE_THROWS_AS(solve_rho(1.5, 2.0), SolverError);
  }
  REQUIRE_THROWS_AS(solve_rho(-1.0, 2.0), InvalidParams);
}

TEST_CASE("functional J on the exact m = 2 extremal weight", "[variational]") {
  ModelParams p;
  p.m = 2.0;
  // g = 3 (1-s)^2: the known maximizer, J(g) = 1
  const std::size_t n = 4001;
  WeightFunction w;
  w.grid = Grid1D::uniform(0.0, 1.0, n);
  w.g.resize(n);
  w.g1.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = w.grid[i];
    w.g[i] = 3.0 * (1.0 - s) * (1.0 - s);
    w.g1[i] = -6.0 * (1.0 - s);
  }
  REQUIRE(functional_J(w, p) == Catch::Approx(1.0).margin(2e-4));

  SECTION("suboptimal weights score below the maximum") {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = w.grid[i];
      w.g[i] = 1.0 - s;
      w.g1[i] = -1.0;
    }
    const double J = functional_J(w, p);
    REQUIRE(J < 1.0);
    REQUIRE(J > 0.5);
  }
  SECTION("inadmissible weight rejected") {
    for (std::size_t i = 0; i < n; ++i) w.g1[i] = 1.0;
    REQUIRE_THROWS_AS(functional_J(w, p), InvalidParams);
  }
}

TEST_CASE("extremal weight fixed point at m = 2", "[variational]") {
  ModelParams p;
  p.m = 2.0;
  const auto ext = extremal_weight(p);
  REQUIRE(ext.c_star_0 == Catch::Approx(1.0).margin(1e-3));
  REQUIRE(ext.sigma == Catch::Approx(3.0).epsilon(0.02));
  double worst = 0.0;
  for (double s = 0.0; s <= 1.0; s += 0.01) {
    const double exact = 3.0 * (1.0 - s) * (1.0 - s);
    worst = std::max(worst, std::abs(ext.g_tilde.g_at(s) - exact));
  }
  REQUIRE(worst < 0.06);
}

TEST_CASE("scaling to general (a, b)", "[variational]") {
  ModelParams p;
  p.m = 2.0;
  p.a = 4.0;
  const auto ext = extremal_weight(p);
  REQUIRE(ext.c_star_0 == Catch::Approx(4.0).margin(4e-3));
  // sigma scales like b/a; the normalized weight lives on [0, a/b]
  REQUIRE(ext.sigma == Catch::Approx(0.75).epsilon(0.02));
  REQUIRE(ext.g_tilde.grid.back() == Catch::Approx(4.0).margin(1e-4));
}

TEST_CASE("m = 1.5 cross-check against the shooter", "[variational]") {
  ModelParams p;
  p.m = 1.5;
  ExtremalConfig cfg;
  cfg.cross_check_shooter = true;
  const auto ext = extremal_weight(p, cfg);
  REQUIRE(ext.shooter_rel_diff < 1e-3);
}

TEST_CASE("Lemma 3.9 speed bounds", "[variational]") {
  ModelParams p;
  p.m = 2.0;
  p.chi = 0.05;
  const auto ext = extremal_weight(p);

  Profile sat;
  sat.edge = 0.0;
  sat.grid = Grid1D::uniform(-2.0, 60.0, 63);
  sat.values.resize(sat.grid.size());
  for (std::size_t i = 0; i < sat.grid.size(); ++i)
    sat.values[i] = sat.grid[i] <= 0.0 ? 0.0 : std::min(1.0, sat.grid[i]);
  const auto sig = bessel_apply(sat, 0.0, p);

  const auto b = chemo_speed_bounds(ext, sig, p);
  REQUIRE(b.hypothesis_ok);
  REQUIRE(b.lower == Catch::Approx(1.0 - 0.075).margin(2e-3));
  REQUIRE(b.upper == Catch::Approx(1.0).margin(1e-3));
  REQUIRE(b.lower_refined >= b.lower_coarse - 1e-12);

  SECTION("hypothesis violation throws") {
    ModelParams q = p;
    q.chi = 10.0;
    REQUIRE_THROWS_AS(chemo_speed_bounds(ext, sig, q), SolverError);
  }
}
