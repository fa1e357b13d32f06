#pragma once

// Closed-loop vector fields of the gradient formation law, the potential and
// its rate along trajectories, and adaptive flow integration with invariant
// monitoring.

#include <cstdint>
#include <vector>

#include "triform/link_algebra.hpp"

namespace triform {

/// Robot velocities: block i is e_i * psi_i (steepest descent of each
/// robot's own potential).
Vec6 position_vector_field(const PositionState& z, const FormationSpec& spec);

/// Link dynamics: (e2 psi2 - e1 psi1, e3 psi3 - e2 psi2, e1 psi1 - e3 psi3).
/// Built from the three shared products so states with bitwise-equal
/// products map to the exact zero vector.
Vec6 link_vector_field(const LinkState& e, const FormationSpec& spec);

/// V(e) = (1/4) psi^T psi; zero exactly on the target formation set.
double potential(const LinkState& e, const FormationSpec& spec);

/// Time derivative of V along the link flow, as the quadratic form
/// -(1/2) psi^T R(e) R(e)^T psi in the rigidity matrix.
double potential_rate(const LinkState& e, const FormationSpec& spec);

/// Same quantity via the chain rule grad V . edot.
double potential_rate_chain(const LinkState& e, const FormationSpec& spec);

/// Same quantity as -(1/2) sum of the squared pairwise differences of the
/// products e_i psi_i.
double potential_rate_sum_squares(const LinkState& e,
                                  const FormationSpec& spec);

/// ||e1 psi1 - e2 psi2|| + ||e2 psi2 - e3 psi3||: zero exactly on the
/// equilibrium set of the link dynamics.
double equilibrium_residual(const LinkState& e, const FormationSpec& spec);

enum class Classification { TargetFormation, CollinearEquilibrium, Unresolved };

const char* to_string(Classification c);

/// Adaptive embedded Runge-Kutta 5(4) settings and stop conditions.
/// Tolerances set to zero disable the corresponding stop condition.
struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double max_step = 1.0;
  double min_step = 1e-13;
  double max_time = 1000.0;

  double target_potential_tol = 1e-14;  // V below this => TargetFormation
  double equilibrium_field_tol = 1e-12; // field norm below this and
  double collinear_potential_floor = 1e-6;  // V above this => CollinearEquilibrium
  double rest_velocity_tol = 0.0;  // position runs: keep going until
                                   // ||zdot|| drops below this
  double sample_interval = 0.0;    // >0: record on a fixed time grid

  void validate() const;
};

/// Time series of one integration, with the monitored invariants.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vec6> states;            // links
  std::vector<Vec6> positions;         // filled by position runs
  std::vector<double> potential_values;
  std::vector<double> collinearity_values;  // e1'Je2 per sample

  Classification classification = Classification::Unresolved;
  bool stalled = false;  // ran into max_time with no stop condition met
  long accepted_steps = 0;
  long rejected_steps = 0;
  double max_cycle_residual = 0.0;
  // max over steps of V_{k+1} - V_k - 1e-10 (1 + V_k); <= 0 when the
  // monotonicity contract holds
  double max_potential_rise_excess = 0.0;

  double final_time() const { return times.empty() ? 0.0 : times.back(); }
  double final_potential() const {
    return potential_values.empty() ? 0.0 : potential_values.back();
  }
  const Vec6& final_state() const { return states.back(); }
};

/// Flow of the link dynamics from e0. Each accepted step is projected back
/// onto the link space (the field is tangent, so this only removes drift).
TrajectoryRecord integrate(const LinkState& e0, const FormationSpec& spec,
                           const IntegratorConfig& cfg = {});

/// Flow of the position dynamics from z0; the record carries both positions
/// and the induced links H z. Stop conditions are evaluated on the links.
TrajectoryRecord integrate_positions(const PositionState& z0,
                                     const FormationSpec& spec,
                                     const IntegratorConfig& cfg = {});

/// Least-squares line fit of log V(t) over the trailing half of the run.
/// slope < 0 with r2 near 1 indicates exponential decay.
struct TailFit {
  double slope = 0.0;
  double r2 = 0.0;
  int n = 0;  // samples used; 0 means the fit was not possible
};

TailFit fit_log_potential_tail(const TrajectoryRecord& record);

}  // namespace triform
