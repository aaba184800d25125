#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "degenwave/ode.hpp"

using namespace degenwave;

TEST_CASE("exponential decay accuracy", "[ode]") {
  auto rhs = [](double, const ode::State<1>& y, ode::State<1>& dy) {
    dy[0] = -y[0];
  };
  ode::Options opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-10;
  const auto r = ode::integrate<1>(rhs, {1.0}, 0.0, 5.0, opt);
  REQUIRE(r.reached_end);
  REQUIRE(r.y.back()[0] == Catch::Approx(std::exp(-5.0)).epsilon(1e-8));
}

TEST_CASE("event localization on the dense interpolant", "[ode]") {
  // harmonic oscillator: y = cos t crosses 0 at pi/2
  auto rhs = [](double, const ode::State<2>& y, ode::State<2>& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  std::vector<ode::Event<2>> ev(1);
  ev[0].g = [](double, const ode::State<2>& y) { return y[0]; };
  ev[0].direction = -1;
  ode::Options opt;
  opt.h_max = 0.3;
  const auto r = ode::integrate<2>(rhs, {1.0, 0.0}, 0.0, 10.0, opt, ev);
  REQUIRE(r.event_index == 0);
  REQUIRE(r.t.back() == Catch::Approx(M_PI / 2.0).epsilon(1e-6));

  SECTION("direction filter skips the opposite crossing") {
    ev[0].direction = +1;
    const auto r2 = ode::integrate<2>(rhs, {1.0, 0.0}, 0.0, 10.0, opt, ev);
    REQUIRE(r2.event_index == 0);
    REQUIRE(r2.t.back() == Catch::Approx(3.0 * M_PI / 2.0).epsilon(1e-6));
  }
}

TEST_CASE("integration argument errors", "[ode]") {
  auto rhs = [](double, const ode::State<1>& y, ode::State<1>& dy) {
    dy[0] = y[0];
  };
  ode::Options opt;
  REQUIRE_THROWS_AS(ode::integrate<1>(rhs, {1.0}, 1.0, 0.0, opt),
                    InvalidParams);
  opt.max_steps = 5;
  REQUIRE_THROWS_AS(ode::integrate<1>(rhs, {1.0}, 0.0, 100.0, opt),
                    SolverError);
}

TEST_CASE("stiff-ish growth keeps tolerance", "[ode]") {
  auto rhs = [](double t, const ode::State<1>&, ode::State<1>& dy) {
    dy[0] = std::cos(10.0 * t) * 10.0;
  };
  ode::Options opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-10;
  const auto r = ode::integrate<1>(rhs, {0.0}, 0.0, 2.0, opt);
  REQUIRE(r.y.back()[0] == Catch::Approx(std::sin(20.0)).margin(1e-7));
}
