#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "degenwave/shooting.hpp"
#include "helpers.hpp"

using namespace degenwave;

namespace {

/// Saturated dummy signal: at chi = 0 the signal content is irrelevant.
SignalTriple trivial_signal(const ModelParams& p) {
  Profile sat;
  sat.edge = 0.0;
  sat.grid = Grid1D::uniform(-2.0, 120.0, 123);
  sat.values.resize(sat.grid.size());
  for (std::size_t i = 0; i < sat.grid.size(); ++i)
    sat.values[i] =
        sat.grid[i] <= 0.0 ? 0.0 : p.capacity() * std::min(1.0, sat.grid[i]);
  return bessel_apply(sat, 0.0, p);
}

}  // namespace

TEST_CASE("local expansion coefficients at m = 2", "[shooting]") {
  // lambda = 1, mu = 1: phi = t/2 - t^2/8 + o(t^2), the Aronson wave
  auto [K1, K2] = local_expansion(1.0, 0.0, 1.0, 2.0);
  REQUIRE(K1 == Catch::Approx(0.5));
  REQUIRE(K2 == Catch::Approx(-0.125));
  REQUIRE_THROWS_AS(local_expansion(-1.0, 0.0, 1.0, 2.0), InvalidParams);
  REQUIRE_THROWS_AS(local_expansion(1.0, 0.0, 1.0, 1.0), InvalidParams);
}

TEST_CASE("shot outcomes bracket the critical speed", "[shooting]") {
  ModelParams p;
  p.m = 2.0;
  const auto sig = trivial_signal(p);
  const auto fast = integrate_profile(1.2, sig, p, 100.0);
  REQUIRE(fast.kind == ShootKind::ReachedCapacity);
  REQUIRE(fast.counts_as_capacity);
  const auto slow = integrate_profile(0.8, sig, p, 100.0);
  REQUIRE(slow.kind == ShootKind::TurnedBack);
  REQUIRE_FALSE(slow.counts_as_capacity);
  REQUIRE(slow.phi_end < p.capacity());
}

TEST_CASE("exact m = 2 critical speed and phase-plane curve", "[shooting]") {
  ModelParams p;
  p.m = 2.0;
  const auto sig = trivial_signal(p);
  const auto r = critical_speed(sig, p, 0.5, 1.6, 1e-10, 200.0);
  REQUIRE(r.speed == Catch::Approx(1.0).margin(1e-3));
  REQUIRE(r.provenance == "shooting");

  // psi~(phi) = phi (1 - phi) along the exact wave. Exclude a neighborhood
  // of saturation: a supercritical shot leaves the separatrix there no
  // matter how tight the bracket is.
  const auto shot = integrate_profile(r.bracket_hi, sig, p, 200.0);
  const auto [phi, psi] = psi_of_phi(shot.trace);
  double worst = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (phi[i] <= 0.99)
      worst = std::max(worst, std::abs(psi[i] - phi[i] * (1.0 - phi[i])));
  REQUIRE(worst < 1e-5);
  REQUIRE(std::abs(psi.back()) < 1e-3);  // the crossing itself is tame
}

TEST_CASE("bracket and precondition errors", "[shooting]") {
  ModelParams p;
  p.m = 2.0;
  const auto sig = trivial_signal(p);
  REQUIRE_THROWS_AS(critical_speed(sig, p, 1.2, 1.6, 1e-6, 100.0),
                    BracketInvalid);
  REQUIRE_THROWS_AS(critical_speed(sig, p, 0.5, 0.8, 1e-6, 100.0),
                    BracketInvalid);
  p.chi = 1.0;
  REQUIRE_THROWS_AS(integrate_profile(0.3, sig, p, 100.0), InvalidParams);
}

TEST_CASE("reconstructed profile matches the exact wave", "[shooting]") {
  ModelParams p;
  p.m = 2.0;
  const auto sig = trivial_signal(p);
  const auto r = critical_speed(sig, p, 0.5, 1.6, 1e-10, 200.0);
  const auto shot = integrate_profile(r.bracket_hi, sig, p, 200.0);
  const auto prof = reconstruct_profile(shot.trace, p, 1e-3);
  REQUIRE_NOTHROW(prof.validate(p, 1e-9));
  double sup = 0.0;
  for (std::size_t i = 0; i < prof.grid.size(); ++i)
    sup = std::max(sup,
                   std::abs(prof.values[i] - testutil::aronson(prof.grid[i])));
  REQUIRE(sup < 5e-4);
}

TEST_CASE("still-growing truncation is flagged", "[shooting]") {
  ModelParams p;
  p.m = 2.0;
  const auto sig = trivial_signal(p);
  const auto shot = integrate_profile(1.000001, sig, p, 3.0);
  REQUIRE(shot.kind == ShootKind::StillGrowing);
  REQUIRE(shot.truncation_warning);
  REQUIRE_FALSE(shot.counts_as_capacity);
}
