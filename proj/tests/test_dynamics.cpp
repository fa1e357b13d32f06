#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "triform/dynamics.hpp"
#include "triform/equilibria.hpp"
#include "triform/random.hpp"

using namespace triform;

namespace {

const FormationSpec kUnit(1.0, 1.0, 1.0);

LinkState unit_equilateral_links() {
  const Vec2 z1(0.0, 0.0), z2(1.0, 0.0), z3(0.5, std::sqrt(3.0) / 2.0);
  return links_from_positions(PositionState(z1, z2, z3));
}

LinkState random_links(Rng& rng, double sigma = 1.0) {
  Vec6 z;
  for (int k = 0; k < 6; ++k) z(k) = sigma * rng.normal();
  return links_from_positions(PositionState(z));
}

}  // namespace

TEST_CASE("position field examples") {
  // A realized target triangle is stationary.
  const PositionState target(Vec2(0, 0), Vec2(1, 0),
                             Vec2(0.5, std::sqrt(3.0) / 2.0));
  CHECK(position_vector_field(target, kUnit).norm() <= 1e-14);

  // Collocated robots see zero links, hence zero velocity.
  const PositionState together(Vec2(4, 4), Vec2(4, 4), Vec2(4, 4));
  CHECK(position_vector_field(together, kUnit).norm() == 0.0);

  const PositionState z(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
  const Vec6 f = position_vector_field(z, kUnit);
  CHECK(f.segment<2>(0).norm() == 0.0);          // psi1 = 0
  CHECK(f.segment<2>(2) == Vec2(-1.0, 1.0));     // e2 psi2, psi2 = 1
  CHECK(f.segment<2>(4).norm() == 0.0);          // psi3 = 0
}

TEST_CASE("link field examples and telescoping") {
  CHECK(link_vector_field(unit_equilateral_links(), kUnit).norm() <= 1e-14);

  const LinkState e(Vec2(1, 0), Vec2(-1, 1), Vec2(0, -1));
  const Vec6 f = link_vector_field(e, kUnit);
  CHECK(f.segment<2>(0) == Vec2(-1.0, 1.0));
  CHECK(f.segment<2>(2) == Vec2(1.0, -1.0));
  CHECK(f.segment<2>(4).norm() == 0.0);

  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const LinkState s = random_links(rng);
    const Vec6 v = link_vector_field(s, kUnit);
    const Vec2 sum = v.segment<2>(0) + v.segment<2>(2) + v.segment<2>(4);
    CHECK(sum.norm() <= 1e-14 * (1.0 + v.norm()));
  }
}

TEST_CASE("states with equal products are exact equilibria") {
  // Products e_i psi_i that agree bitwise map to the exact zero field.
  const LinkState pair(Vec2(0, 0), Vec2(1, 0), Vec2(-1, 0));
  CHECK(link_vector_field(pair, kUnit).norm() == 0.0);
  CHECK(equilibrium_residual(pair, kUnit) == 0.0);
  CHECK(link_vector_field(unit_equilateral_links(), kUnit).norm() <= 1e-15);
}

TEST_CASE("potential values") {
  CHECK(potential(unit_equilateral_links(), kUnit) <= 1e-30);
  CHECK(potential(LinkState(), kUnit) == doctest::Approx(0.75).epsilon(1e-15));

  // Scaling the distances by alpha scales V at the origin by alpha^4.
  const FormationSpec scaled(2.0, 2.0, 2.0);
  CHECK(potential(LinkState(), scaled) ==
        doctest::Approx(16.0 * potential(LinkState(), kUnit)).epsilon(1e-14));
}

TEST_CASE("potential rate routes agree") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const LinkState e = random_links(rng);
    const double chain = potential_rate_chain(e, kUnit);
    const double sums = potential_rate_sum_squares(e, kUnit);
    const double rigid = potential_rate(e, kUnit);
    const double denom =
        std::max({std::abs(chain), std::abs(sums), std::abs(rigid), 1e-300});
    CHECK((std::max({chain, sums, rigid}) - std::min({chain, sums, rigid})) /
              denom <=
          1e-10);
    CHECK(chain <= 0.0);
  }
}

TEST_CASE("potential rate vanishes at equilibria") {
  CHECK(potential_rate(unit_equilateral_links(), kUnit) <= 1e-28);
  const LinkState pair(Vec2(0, 0), Vec2(1, 0), Vec2(-1, 0));
  CHECK(potential_rate_chain(pair, kUnit) == 0.0);
  CHECK(potential_rate_sum_squares(pair, kUnit) == 0.0);
}

TEST_CASE("potential rate against a finite difference along the flow") {
  // Independent check of the rate constant: advance the state by a tiny
  // Euler step and difference the potential.
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const LinkState e = random_links(rng);
    const double h = 1e-7;
    const Vec6 f = link_vector_field(e, kUnit);
    const double vp = potential(LinkState(Vec6(e.e + h * f)), kUnit);
    const double vm = potential(LinkState(Vec6(e.e - h * f)), kUnit);
    const double fd = (vp - vm) / (2.0 * h);
    const double rate = potential_rate(e, kUnit);
    CHECK(rate == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("integrate from the target stays put") {
  const LinkState e0 = unit_equilateral_links();
  IntegratorConfig cfg;
  cfg.target_potential_tol = 0.0;  // disable the stop to observe the flow
  cfg.equilibrium_field_tol = 0.0;
  cfg.max_time = 100.0;
  const TrajectoryRecord rec = integrate(e0, kUnit, cfg);
  double max_dev = 0.0;
  for (const Vec6& e : rec.states) {
    max_dev = std::max(max_dev, (e - e0.e).norm());
  }
  CHECK(max_dev <= 1e-9);
  CHECK(rec.stalled);  // no stop condition was enabled
}

TEST_CASE("integrate classifies random starts as target convergence") {
  Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    Vec6 z;
    for (int k = 0; k < 6; ++k) z(k) = rng.normal();
    const LinkState e0 = links_from_positions(PositionState(z));
    if (is_collinear(e0)) continue;
    const TrajectoryRecord rec = integrate(e0, kUnit);
    CHECK(rec.classification == Classification::TargetFormation);
    CHECK(rec.final_potential() < 1e-12);
    CHECK(rec.max_cycle_residual <= 1e-9);
    CHECK(rec.max_potential_rise_excess <= 0.0);

    const TailFit fit = fit_log_potential_tail(rec);
    CHECK(fit.n >= 4);
    CHECK(fit.slope < 0.0);
    CHECK(fit.r2 > 0.99);
  }
}

TEST_CASE("collinear runs preserve the measure") {
  // An axis-aligned collinear start keeps every y-component at exactly
  // zero, so the oriented area is exactly preserved.
  const LinkState e0(Vec2(0.7, 0), Vec2(0.3, 0), Vec2(-1.0, 0));
  const TrajectoryRecord rec = integrate(e0, kUnit);
  CHECK(rec.classification == Classification::CollinearEquilibrium);
  for (double a : rec.collinearity_values) {
    CHECK(std::abs(a) <= 1e-7);
  }
  CHECK(rec.final_potential() > 1e-6);
}

TEST_CASE("position and link integration agree") {
  const PositionState z0(Vec2(0.1, -0.2), Vec2(1.3, 0.4), Vec2(-0.5, 0.9));
  IntegratorConfig cfg;
  cfg.sample_interval = 0.25;
  const TrajectoryRecord zrun = integrate_positions(z0, kUnit, cfg);
  const TrajectoryRecord erun =
      integrate(links_from_positions(z0), kUnit, cfg);

  CHECK(zrun.classification == Classification::TargetFormation);
  CHECK(erun.classification == Classification::TargetFormation);

  const size_t n = std::min(zrun.times.size(), erun.times.size());
  double sup = 0.0;
  for (size_t i = 0; i < n; ++i) {
    REQUIRE(zrun.times[i] == doctest::Approx(erun.times[i]).epsilon(1e-12));
    sup = std::max(sup, (zrun.states[i] - erun.states[i]).norm());
  }
  CHECK(sup <= 10.0 * cfg.rtol * 10.0);

  // Final positions are at rest and realize the distances.
  const Vec6 zf = zrun.positions.back();
  CHECK(position_vector_field(PositionState(zf), kUnit).norm() < 1e-10);
  const LinkState ef(zrun.states.back());
  CHECK(std::abs(ef.e1().norm() - 1.0) <= 1e-6);
  CHECK(std::abs(ef.e2().norm() - 1.0) <= 1e-6);
  CHECK(std::abs(ef.e3().norm() - 1.0) <= 1e-6);
}

TEST_CASE("collinear position runs stay collinear") {
  const PositionState z0(Vec2(0, 0), Vec2(1, 0), Vec2(2.5, 0));
  const TrajectoryRecord rec = integrate_positions(z0, kUnit);
  CHECK(rec.classification == Classification::CollinearEquilibrium);
  const PositionState zf(rec.positions.back());
  // Final positions still on one line.
  const Vec2 a = zf.z2() - zf.z1();
  const Vec2 b = zf.z3() - zf.z1();
  CHECK(std::abs(a.x() * b.y() - a.y() * b.x()) <= 1e-9);
}

TEST_CASE("target start of a position run is stationary") {
  const PositionState z0(Vec2(0, 0), Vec2(1, 0),
                         Vec2(0.5, std::sqrt(3.0) / 2.0));
  const TrajectoryRecord rec = integrate_positions(z0, kUnit);
  CHECK(rec.classification == Classification::TargetFormation);
  CHECK((rec.positions.back() - z0.z).norm() <= 1e-9);
}

TEST_CASE("integrator config validation") {
  IntegratorConfig cfg;
  cfg.rtol = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = IntegratorConfig{};
  cfg.max_time = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = IntegratorConfig{};
  cfg.min_step = 2.0 * cfg.max_step;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("integrate rejects states off the link space") {
  LinkState bad(Vec2(1, 0), Vec2(1, 0), Vec2(1, 0));
  CHECK_THROWS_AS(integrate(bad, kUnit), PreconditionError);
}

TEST_CASE("stall reporting") {
  // A short time budget leaves a slow trajectory unresolved but intact.
  Rng rng(9);
  Vec6 z;
  for (int k = 0; k < 6; ++k) z(k) = rng.normal();
  IntegratorConfig cfg;
  cfg.max_time = 1e-3;
  const TrajectoryRecord rec =
      integrate(links_from_positions(PositionState(z)), kUnit, cfg);
  CHECK(rec.classification == Classification::Unresolved);
  CHECK(rec.stalled);
}
