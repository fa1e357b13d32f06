#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "triform/experiments.hpp"
#include "triform/io.hpp"

using namespace triform;

namespace {

const FormationSpec kUnit(1.0, 1.0, 1.0);

EquilibriumRecord equilateral_ratio_one_record() {
  const EquilibriumCatalog catalog = collinear_equilibria(kUnit);
  for (const EquilibriumRecord& r : catalog.records) {
    if (r.kind == EquilibriumKind::CollinearDistinct &&
        std::abs(r.x - 1.0) < 1e-9) {
      return r;
    }
  }
  REQUIRE(false);
  return catalog.records.front();
}

}  // namespace

TEST_CASE("outward probes at the collocated set") {
  const EquilibriumCatalog catalog = collinear_equilibria(kUnit);
  REQUIRE(catalog.records.front().kind == EquilibriumKind::Origin);
  const std::vector<double> ladder = default_epsilon_ladder();
  const std::vector<ProbeResult> probes =
      outward_probe(catalog.records.front(), kUnit, ladder);
  REQUIRE(probes.size() == 4);
  for (const ProbeResult& p : probes) {
    CHECK(p.all_positive);
    CHECK(p.verdict);
    CHECK(p.first_outward_index == 0);
    CHECK(p.reference_slope > 0.0);
    CHECK(std::abs(p.estimated_linear_slope / p.reference_slope - 1.0) <=
          0.05);
  }
}

TEST_CASE("outward probe at the equilateral collinear equilibrium") {
  const EquilibriumRecord record = equilateral_ratio_one_record();
  const std::vector<double> ladder = default_epsilon_ladder();
  const std::vector<ProbeResult> probes = outward_probe(record, kUnit, ladder);
  REQUIRE(probes.size() == 1);
  const ProbeResult& p = probes.front();
  CHECK(p.all_positive);
  // Raw closed-form Gamma 2 against squared raw-normal norm 2 gives a unit
  // quadratic form, hence slope 1/2.
  CHECK(p.reference_slope == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p.inner_products.back() / p.epsilons.back() ==
        doctest::Approx(0.5).epsilon(1e-4));
  CHECK(std::abs(p.estimated_linear_slope / p.reference_slope - 1.0) <= 0.05);
}

TEST_CASE("probes reject target records") {
  const std::vector<EquilibriumRecord> targets = target_equilibria(kUnit);
  const std::vector<double> ladder = default_epsilon_ladder();
  CHECK_THROWS_AS(outward_probe(targets[0], kUnit, ladder), PreconditionError);
}

TEST_CASE("tangent displacements give quadratic inner products") {
  const EquilibriumRecord record = equilateral_ratio_one_record();
  const Vec6 n = line_orthogonal_normal(record.e);
  const Vec2 u = record.e.e1().normalized();
  Vec6 tangent;
  tangent << u, Vec2::Zero(), -u;
  tangent.normalize();

  const auto inner = [&](double eps) {
    const LinkState probe(Vec6(record.e.e + eps * tangent));
    return link_vector_field(probe, kUnit).dot(n);
  };
  const double big = std::abs(inner(1e-3));
  const double small = std::abs(inner(1e-5));
  // Quadratic decay: four orders of magnitude across two decades.
  CHECK(small <= 2.0 * big * 1e-4 + 1e-20);

  // The normal direction itself keeps its linear term.
  const auto inner_n = [&](double eps) {
    const LinkState probe(Vec6(record.e.e + eps * n));
    return link_vector_field(probe, kUnit).dot(n);
  };
  CHECK(std::abs(inner_n(1e-5)) / 1e-5 > 0.1);
}

TEST_CASE("potential-rate identity suite") {
  const VdotReport report = vdot_identity_suite(kUnit, 1000, 7);
  CHECK(report.max_rel_spread < 1e-10);
  CHECK(report.n_samples == 1000);

  // Scale robustness.
  const VdotReport scaled =
      vdot_identity_suite(FormationSpec(10.0, 10.0, 10.0), 1000, 7);
  CHECK(scaled.max_rel_spread < 1e-10);
}

TEST_CASE("collinear start construction is exact") {
  Rng rng(61);
  for (int i = 0; i < 200; ++i) {
    const LinkState e = sample_collinear_links(rng, 1.0);
    CHECK(oriented_area2(e) == 0.0);
    CHECK(e.cycle_residual() <= 1e-15);
  }
  for (int i = 0; i < 50; ++i) {
    CHECK(!is_collinear(sample_noncollinear_links(rng, 1.0)));
  }
}

TEST_CASE("region of attraction study") {
  const MonteCarloReport report =
      region_of_attraction_study(kUnit, 40, 15, 42);
  CHECK(report.trials.size() == 55);
  CHECK(report.count_target == 40);
  CHECK(report.count_collinear_eq == 15);
  CHECK(report.count_unresolved == 0);
  CHECK(report.dichotomy_held);
  CHECK(report.max_collinear_area <= 1e-7);
  CHECK(report.max_cycle_residual <= 1e-9);
  CHECK(report.max_potential_rise_excess <= 0.0);
  CHECK(report.rate_min > 0.0);
  for (const TrialResult& t : report.trials) {
    if (t.classification == Classification::TargetFormation) {
      CHECK(t.final_link_error <= 1e-6);
      CHECK(t.r2 > 0.99);
    }
  }
}

TEST_CASE("study reports are deterministic") {
  const MonteCarloReport a = region_of_attraction_study(kUnit, 10, 5, 9001);
  const MonteCarloReport b = region_of_attraction_study(kUnit, 10, 5, 9001);
  CHECK(montecarlo_json(a).dump() == montecarlo_json(b).dump());
}

TEST_CASE("study argument validation") {
  CHECK_THROWS_AS(region_of_attraction_study(kUnit, 0, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(region_of_attraction_study(kUnit, -1, 5, 1),
                  std::invalid_argument);
}

TEST_CASE("near-collinear escape study") {
  const std::vector<double> offsets = {1e-4, 1e-8, 0.0};
  const EscapeReport report = near_collinear_escape_study(kUnit, offsets, 3);
  CHECK(report.all_escaped);
  CHECK(report.all_initially_nondecreasing);
  CHECK(report.min_orbit_distance > 0.0);
  int zero_offset_trials = 0;
  for (const EscapeTrial& t : report.trials) {
    if (t.offset == 0.0) {
      ++zero_offset_trials;
      CHECK(t.stayed_on_manifold);
      CHECK(t.classification == Classification::CollinearEquilibrium);
    } else {
      CHECK(t.classification == Classification::TargetFormation);
      CHECK(t.initially_nondecreasing);
      CHECK(t.min_orbit_distance >= 0.4 * t.offset);
    }
  }
  CHECK(zero_offset_trials >= 4);  // one per collinear branch
}

TEST_CASE("verification suite passes") {
  VerifySuiteOptions opts;
  opts.quick = true;
  opts.seed = 11;
  const VerificationReport report = run_verification_suite(kUnit, opts);
  CHECK(report.all_pass);
  CHECK(report.checks.size() >= 18);
  for (const CheckResult& c : report.checks) {
    INFO(c.name, ": ", c.detail);
    CHECK(c.pass);
  }
}
