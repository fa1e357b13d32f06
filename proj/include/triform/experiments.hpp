#pragma once

// Verification harness: outward-pointing probes at the unstable equilibria,
// Monte-Carlo region-of-attraction studies, escape studies from
// near-collinear starts, the potential-rate identity suite, and the bundled
// property-check suite behind the `verify` command.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "triform/equilibria.hpp"
#include "triform/random.hpp"

namespace triform {

/// Inner products <f(p + eps n), n> down a decreasing epsilon ladder.
struct ProbeResult {
  Vec6 base = Vec6::Zero();
  Vec6 normal = Vec6::Zero();
  std::vector<double> epsilons;
  std::vector<double> inner_products;
  bool verdict = false;       // a trailing run of the ladder is all positive
  bool all_positive = false;  // every rung is positive
  int first_outward_index = -1;
  double estimated_linear_slope = 0.0;  // from the two smallest rungs
  double reference_slope = 0.0;         // (1/2) n^T (A + A^T) n from the Jacobian
};

std::vector<double> default_epsilon_ladder();

/// Probe a single unit direction at an equilibrium state.
ProbeResult probe_direction(const LinkState& base, const Vec6& unit_direction,
                            const FormationSpec& spec,
                            std::span<const double> epsilons);

/// Probe every catalogued normal direction of the record's manifold: the
/// four collocated basis normals at the origin, the unit line normal at
/// collinear equilibria. Throws PreconditionError for target records.
std::vector<ProbeResult> outward_probe(const EquilibriumRecord& record,
                                       const FormationSpec& spec,
                                       std::span<const double> epsilons);

/// Gaussian position start (rejection-sampled away from collinearity).
LinkState sample_noncollinear_links(Rng& rng, double sigma);

/// Start constructed on a random line through the origin of the link space;
/// the collinearity measure vanishes to round-off.
LinkState sample_collinear_links(Rng& rng, double sigma);

struct TrialResult {
  int index = 0;
  uint64_t seed = 0;
  bool collinear_start = false;
  Classification classification = Classification::Unresolved;
  double final_time = 0.0;
  double final_potential = 0.0;
  double rate = 0.0;  // -slope of the log-potential tail fit
  double r2 = 0.0;
  double initial_area2 = 0.0;
  double max_abs_area2 = 0.0;     // sup over the run of |e1'Je2|
  double final_link_error = 0.0;  // max_k ||e_k| - d_k|
  double max_cycle_residual = 0.0;
  double max_potential_rise_excess = 0.0;
};

struct MonteCarloReport {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
  uint64_t seed = 0;
  int n_noncollinear = 0;
  int n_collinear = 0;
  std::string distribution;
  std::vector<TrialResult> trials;

  int count_target = 0;
  int count_collinear_eq = 0;
  int count_unresolved = 0;
  bool dichotomy_held = true;  // classification matched the start type in
                               // every resolved trial
  double rate_min = 0.0, rate_mean = 0.0, rate_max = 0.0;
  double max_collinear_area = 0.0;  // over collinear-start trials
  double max_cycle_residual = 0.0;
  double max_potential_rise_excess = 0.0;
};

/// Random-start study: n_noncollinear Gaussian position starts (sigma =
/// perimeter/3) plus n_collinear starts constructed on random lines. Trial
/// seeds derive from (seed, index), so results do not depend on execution
/// order.
MonteCarloReport region_of_attraction_study(const FormationSpec& spec,
                                            int n_noncollinear,
                                            int n_collinear, uint64_t seed,
                                            const IntegratorConfig& cfg = {});

struct EscapeTrial {
  int record_index = 0;
  double record_x = 0.0;
  double offset = 0.0;
  Classification classification = Classification::Unresolved;
  bool initially_nondecreasing = false;
  double min_orbit_distance = 0.0;  // over the run, to the collinear equilibria
  double final_potential = 0.0;
  bool stayed_on_manifold = false;  // zero-offset control trials
};

struct EscapeReport {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
  uint64_t seed = 0;
  std::vector<double> offsets;
  std::vector<EscapeTrial> trials;
  bool all_escaped = true;
  bool all_initially_nondecreasing = true;
  double min_orbit_distance = 0.0;
};

/// Perturb each collinear equilibrium along its unit line normal by every
/// offset and integrate. Positive offsets must escape to the target
/// formation with an initially non-decreasing collinearity measure; zero
/// offsets stay put.
EscapeReport near_collinear_escape_study(const FormationSpec& spec,
                                         std::span<const double> offsets,
                                         uint64_t seed,
                                         const IntegratorConfig& cfg = {});

struct VdotReport {
  int n_samples = 0;
  uint64_t seed = 0;
  double max_rel_spread = 0.0;
  Vec6 worst_state = Vec6::Zero();
};

/// At n random link states, compares the three routes to the potential rate
/// (chain rule, pairwise squared differences, rigidity quadratic form).
/// Throws VerificationError if the relative spread exceeds 1e-10.
VdotReport vdot_identity_suite(const FormationSpec& spec, int n_samples,
                               uint64_t seed);

/// Finite-difference Jacobians (central differences) for cross-checks.
Mat6 fd_jacobian_links(const LinkState& e, const FormationSpec& spec,
                       double step = 1e-5);
Mat36 fd_jacobian_defining(const LinkState& e, double step = 1e-5);

struct VerifySuiteOptions {
  uint64_t seed = 11;
  int samples = 1000;      // potential-rate and Jacobian check states
  int gamma_specs = 1000;  // collocated positive-definiteness sweep
  int sweep_specs = 200;   // collinear-catalog sweeps
  int probe_specs = 20;
  bool quick = false;

  VerifySuiteOptions normalized() const;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // distance to the failure boundary; sign matters
  std::string detail;
};

struct VerificationReport {
  VerifySuiteOptions options;
  std::vector<CheckResult> checks;
  bool all_pass = false;
};

/// The bundled property suite: identity checks, Jacobian cross-checks,
/// structure checks, Gamma sweeps, probe sweeps and the escape study.
VerificationReport run_verification_suite(const FormationSpec& spec,
                                          const VerifySuiteOptions& options);

}  // namespace triform
