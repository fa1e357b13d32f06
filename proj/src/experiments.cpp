#include "triform/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace triform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec6 unit(const Vec6& v) { return v / v.norm(); }

}  // namespace

std::vector<double> default_epsilon_ladder() {
  return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

namespace {

ProbeResult probe_pair(const LinkState& base, const Vec6& displacement,
                       const Vec6& inner, const FormationSpec& spec,
                       std::span<const double> epsilons) {
  ProbeResult result;
  result.base = base.e;
  result.normal = inner;
  result.epsilons.assign(epsilons.begin(), epsilons.end());
  for (double eps : epsilons) {
    const LinkState probe(Vec6(base.e + eps * displacement));
    result.inner_products.push_back(
        link_vector_field(probe, spec).dot(inner));
  }
  const int n = static_cast<int>(result.inner_products.size());
  result.all_positive = std::all_of(result.inner_products.begin(),
                                    result.inner_products.end(),
                                    [](double v) { return v > 0.0; });
  result.first_outward_index = -1;
  for (int k = n - 1; k >= 0 && result.inner_products[k] > 0.0; --k) {
    result.first_outward_index = k;
  }
  result.verdict = result.first_outward_index >= 0;
  if (n >= 2) {
    const double de = result.epsilons[n - 2] - result.epsilons[n - 1];
    result.estimated_linear_slope =
        (result.inner_products[n - 2] - result.inner_products[n - 1]) / de;
  }
  const Mat6 A = jacobian_links(base, spec);
  result.reference_slope = inner.dot(A * displacement);
  return result;
}

}  // namespace

ProbeResult probe_direction(const LinkState& base, const Vec6& unit_direction,
                            const FormationSpec& spec,
                            std::span<const double> epsilons) {
  return probe_pair(base, unit_direction, unit_direction, spec, epsilons);
}

std::vector<ProbeResult> outward_probe(const EquilibriumRecord& record,
                                       const FormationSpec& spec,
                                       std::span<const double> epsilons) {
  std::vector<ProbeResult> results;
  switch (record.kind) {
    case EquilibriumKind::Origin: {
      const Mat64& basis = normal_basis_collocated();
      for (int k = 0; k < 4; ++k) {
        results.push_back(
            probe_direction(record.e, basis.col(k), spec, epsilons));
      }
      break;
    }
    case EquilibriumKind::CollinearCollocatedPair:
    case EquilibriumKind::CollinearDistinct: {
      results.push_back(probe_direction(
          record.e, normal_basis_line_set(record.e), spec, epsilons));
      break;
    }
    case EquilibriumKind::Target:
      throw PreconditionError(
          "outward_probe: target records are attractors, not probe points");
  }
  return results;
}

LinkState sample_noncollinear_links(Rng& rng, double sigma) {
  for (;;) {
    Vec6 z;
    for (int i = 0; i < 6; ++i) z(i) = sigma * rng.normal();
    const LinkState e = links_from_positions(PositionState(z));
    if (!is_collinear(e)) return e;
  }
}

LinkState sample_collinear_links(Rng& rng, double sigma) {
  // The line's slope is a signed power of two (or an axis), so the relation
  // y = slope * x between stored components is exact in binary floating
  // point and the flow preserves it bitwise; the collinearity measure is
  // exactly zero at t = 0 and stays there. A generic slope would leave a
  // ~1e-17 transversal seed that the unstable manifold amplifies into an
  // escape.
  const int pick = std::min(15, static_cast<int>(rng.uniform(0.0, 16.0)));
  const double c1 = sigma * rng.normal();
  const double c2 = sigma * rng.normal();
  const double c3 = -(c1 + c2);
  Vec2 dir;
  if (pick == 0) {
    dir = Vec2(1.0, 0.0);
  } else if (pick == 1) {
    dir = Vec2(0.0, 1.0);
  } else {
    const int k = (pick - 2) % 7 - 3;  // exponent in -3..3
    const double slope =
        ((pick - 2) / 7 == 0 ? 1.0 : -1.0) * std::ldexp(1.0, k);
    const double dx = 1.0 / std::sqrt(1.0 + slope * slope);
    dir = Vec2(dx, slope * dx);
  }
  return LinkState(c1 * dir, c2 * dir, c3 * dir).projected();
}

namespace {

TrialResult run_trial(int index, uint64_t trial_seed, const LinkState& e0,
                      bool collinear_start, const FormationSpec& spec,
                      const IntegratorConfig& cfg) {
  TrialResult trial;
  trial.index = index;
  trial.seed = trial_seed;
  trial.collinear_start = collinear_start;
  trial.initial_area2 = oriented_area2(e0);

  const TrajectoryRecord record = integrate(e0, spec, cfg);
  trial.classification = record.classification;
  trial.final_time = record.final_time();
  trial.final_potential = record.final_potential();
  trial.max_cycle_residual = record.max_cycle_residual;
  trial.max_potential_rise_excess = record.max_potential_rise_excess;
  for (double a : record.collinearity_values) {
    trial.max_abs_area2 = std::max(trial.max_abs_area2, std::abs(a));
  }
  const LinkState ef(record.final_state());
  const Vec3 d = spec.lengths();
  trial.final_link_error =
      std::max({std::abs(ef.e1().norm() - d(0)), std::abs(ef.e2().norm() - d(1)),
                std::abs(ef.e3().norm() - d(2))});
  const TailFit fit = fit_log_potential_tail(record);
  trial.rate = -fit.slope;
  trial.r2 = fit.r2;
  return trial;
}

}  // namespace

MonteCarloReport region_of_attraction_study(const FormationSpec& spec,
                                            int n_noncollinear,
                                            int n_collinear, uint64_t seed,
                                            const IntegratorConfig& cfg) {
  if (n_noncollinear < 0 || n_collinear < 0 ||
      n_noncollinear + n_collinear == 0) {
    throw std::invalid_argument(
        "region_of_attraction_study: trial counts must be non-negative and "
        "not both zero");
  }
  MonteCarloReport report;
  report.d1 = spec.d1;
  report.d2 = spec.d2;
  report.d3 = spec.d3;
  report.seed = seed;
  report.n_noncollinear = n_noncollinear;
  report.n_collinear = n_collinear;
  const double sigma = spec.perimeter() / 3.0;
  report.distribution =
      "positions i.i.d. normal, sigma = perimeter/3 = " + std::to_string(sigma);

  for (int i = 0; i < n_noncollinear; ++i) {
    const uint64_t ts = derive_seed(seed, static_cast<uint64_t>(i));
    Rng rng(ts);
    report.trials.push_back(
        run_trial(i, ts, sample_noncollinear_links(rng, sigma), false, spec, cfg));
  }
  for (int i = 0; i < n_collinear; ++i) {
    const uint64_t ts = derive_seed(seed, (1ull << 32) + static_cast<uint64_t>(i));
    Rng rng(ts);
    report.trials.push_back(run_trial(n_noncollinear + i, ts,
                                      sample_collinear_links(rng, sigma), true,
                                      spec, cfg));
  }

  double rate_sum = 0.0;
  int rate_count = 0;
  report.rate_min = kInf;
  report.rate_max = -kInf;
  for (const TrialResult& t : report.trials) {
    report.max_cycle_residual =
        std::max(report.max_cycle_residual, t.max_cycle_residual);
    report.max_potential_rise_excess =
        std::max(report.max_potential_rise_excess, t.max_potential_rise_excess);
    switch (t.classification) {
      case Classification::TargetFormation:
        ++report.count_target;
        break;
      case Classification::CollinearEquilibrium:
        ++report.count_collinear_eq;
        break;
      case Classification::Unresolved:
        ++report.count_unresolved;
        break;
    }
    if (t.classification != Classification::Unresolved) {
      const bool expected_collinear =
          t.classification == Classification::CollinearEquilibrium;
      if (expected_collinear != t.collinear_start) report.dichotomy_held = false;
    }
    if (t.collinear_start) {
      report.max_collinear_area =
          std::max(report.max_collinear_area, t.max_abs_area2);
    }
    if (t.classification == Classification::TargetFormation) {
      report.rate_min = std::min(report.rate_min, t.rate);
      report.rate_max = std::max(report.rate_max, t.rate);
      rate_sum += t.rate;
      ++rate_count;
    }
  }
  if (rate_count == 0) {
    report.rate_min = report.rate_max = 0.0;
  } else {
    report.rate_mean = rate_sum / rate_count;
  }
  return report;
}

EscapeReport near_collinear_escape_study(const FormationSpec& spec,
                                         std::span<const double> offsets,
                                         uint64_t seed,
                                         const IntegratorConfig& cfg) {
  EscapeReport report;
  report.d1 = spec.d1;
  report.d2 = spec.d2;
  report.d3 = spec.d3;
  report.seed = seed;
  report.offsets.assign(offsets.begin(), offsets.end());
  report.min_orbit_distance = kInf;

  const EquilibriumCatalog catalog = collinear_equilibria(spec);
  std::vector<EquilibriumRecord> collinear_records;
  for (const EquilibriumRecord& r : catalog.records) {
    if (r.kind != EquilibriumKind::Target) collinear_records.push_back(r);
  }

  for (size_t ri = 0; ri < catalog.records.size(); ++ri) {
    const EquilibriumRecord& record = catalog.records[ri];
    if (record.kind != EquilibriumKind::CollinearCollocatedPair &&
        record.kind != EquilibriumKind::CollinearDistinct) {
      continue;
    }
    const Vec6 normal = normal_basis_line_set(record.e);
    for (double eps : offsets) {
      EscapeTrial trial;
      trial.record_index = static_cast<int>(ri);
      trial.record_x = record.x;
      trial.offset = eps;

      const LinkState e0(Vec6(record.e.e + eps * normal));
      const TrajectoryRecord traj = integrate(e0, spec, cfg);
      trial.classification = traj.classification;
      trial.final_potential = traj.final_potential();

      double min_dist = kInf;
      for (const Vec6& state : traj.states) {
        min_dist = std::min(
            min_dist, min_distance_to_records(LinkState(state), collinear_records));
      }
      trial.min_orbit_distance = min_dist;

      if (eps == 0.0) {
        trial.stayed_on_manifold =
            rotation_orbit_distance(LinkState(traj.final_state()), record.e) <=
            1e-8 * (1.0 + record.e.norm());
        trial.initially_nondecreasing = true;
      } else {
        // Local repulsion: |area| must not shrink over the first accepted
        // steps, while the trajectory is still near the manifold (the
        // window stops once the measure has grown a hundredfold).
        const auto& area = traj.collinearity_values;
        const double a0 = std::abs(area.front());
        bool nondecreasing = true;
        const size_t window = std::min<size_t>(50, area.size() - 1);
        for (size_t i = 0; i < window; ++i) {
          if (std::abs(area[i]) >= 100.0 * std::max(a0, 1e-300)) break;
          if (std::abs(area[i + 1]) <
              std::abs(area[i]) * (1.0 - 1e-12) - 1e-300) {
            nondecreasing = false;
            break;
          }
        }
        trial.initially_nondecreasing = nondecreasing;
        if (trial.classification != Classification::TargetFormation) {
          report.all_escaped = false;
        }
        if (!nondecreasing) report.all_initially_nondecreasing = false;
        report.min_orbit_distance =
            std::min(report.min_orbit_distance, trial.min_orbit_distance);
      }
      report.trials.push_back(trial);
    }
  }
  if (report.min_orbit_distance == kInf) report.min_orbit_distance = 0.0;
  return report;
}

VdotReport vdot_identity_suite(const FormationSpec& spec, int n_samples,
                               uint64_t seed) {
  VdotReport report;
  report.n_samples = n_samples;
  report.seed = seed;
  Rng rng(seed);
  const double sigma = spec.perimeter() / 3.0;
  for (int i = 0; i < n_samples; ++i) {
    Vec6 z;
    for (int k = 0; k < 6; ++k) z(k) = sigma * rng.normal();
    const LinkState e = links_from_positions(PositionState(z));
    const double chain = potential_rate_chain(e, spec);
    const double sums = potential_rate_sum_squares(e, spec);
    const double rigid = potential_rate(e, spec);
    const double lo = std::min({chain, sums, rigid});
    const double hi = std::max({chain, sums, rigid});
    const double denom = std::max({std::abs(chain), std::abs(sums),
                                   std::abs(rigid), 1e-300});
    const double spread = (hi - lo) / denom;
    if (spread > report.max_rel_spread) {
      report.max_rel_spread = spread;
      report.worst_state = e.e;
    }
  }
  if (report.max_rel_spread > 1e-10) {
    throw VerificationError(
        "potential-rate identity violated: relative spread " +
        std::to_string(report.max_rel_spread));
  }
  return report;
}

Mat6 fd_jacobian_links(const LinkState& e, const FormationSpec& spec,
                       double step) {
  Mat6 jac;
  for (int j = 0; j < 6; ++j) {
    Vec6 plus = e.e, minus = e.e;
    plus(j) += step;
    minus(j) -= step;
    jac.col(j) = (link_vector_field(LinkState(plus), spec) -
                  link_vector_field(LinkState(minus), spec)) /
                 (2.0 * step);
  }
  return jac;
}

Mat36 fd_jacobian_defining(const LinkState& e, double step) {
  Mat36 jac;
  for (int j = 0; j < 6; ++j) {
    Vec6 plus = e.e, minus = e.e;
    plus(j) += step;
    minus(j) -= step;
    jac.col(j) = (defining_function_line_set(LinkState(plus)) -
                  defining_function_line_set(LinkState(minus))) /
                 (2.0 * step);
  }
  return jac;
}

VerifySuiteOptions VerifySuiteOptions::normalized() const {
  VerifySuiteOptions o = *this;
  if (o.quick) {
    o.samples = std::min(o.samples, 200);
    o.gamma_specs = std::min(o.gamma_specs, 150);
    o.sweep_specs = std::min(o.sweep_specs, 40);
    o.probe_specs = std::min(o.probe_specs, 5);
  }
  return o;
}

namespace {

std::vector<FormationSpec> sweep_specs_list(int count, uint64_t seed) {
  std::vector<FormationSpec> specs;
  specs.emplace_back(1.0, 1.0, 1.0);
  specs.emplace_back(3.0, 4.0, 5.0);
  specs.emplace_back(1.0, 2.0, 2.0);
  Rng rng(seed);
  while (static_cast<int>(specs.size()) < count) {
    specs.push_back(sample_spec(rng));
  }
  return specs;
}

}  // namespace

VerificationReport run_verification_suite(const FormationSpec& spec,
                                          const VerifySuiteOptions& options) {
  VerificationReport report;
  report.options = options.normalized();
  const VerifySuiteOptions& opts = report.options;
  auto add = [&](const std::string& name, bool pass, double margin,
                 const std::string& detail) {
    report.checks.push_back({name, pass, margin, detail});
  };

  // Potential-rate identity, at unit scale and at 10x states.
  for (double scale : {1.0, 10.0}) {
    const std::string name = scale == 1.0 ? "potential-rate-identity"
                                          : "potential-rate-identity-scaled";
    try {
      const FormationSpec scaled(spec.d1 * scale, spec.d2 * scale,
                                 spec.d3 * scale);
      const VdotReport v =
          vdot_identity_suite(scaled, opts.samples, derive_seed(opts.seed, 1));
      add(name, true, 1e-10 - v.max_rel_spread,
          "max relative spread " + std::to_string(v.max_rel_spread) + " over " +
              std::to_string(v.n_samples) + " states");
    } catch (const VerificationError& err) {
      add(name, false, -1.0, err.what());
    }
  }

  // Analytic Jacobians against central differences.
  {
    Rng rng(derive_seed(opts.seed, 2));
    const int n = std::max(20, opts.samples / 10);
    double worst_links = 0.0, worst_defining = 0.0;
    for (int i = 0; i < n; ++i) {
      Vec6 z;
      for (int k = 0; k < 6; ++k) z(k) = rng.normal();
      const LinkState e = links_from_positions(PositionState(z));
      const Mat6 a = jacobian_links(e, spec);
      worst_links = std::max(
          worst_links, (a - fd_jacobian_links(e, spec)).norm() / a.norm());
      const Mat36 fj = jacobian_defining_function(e);
      worst_defining = std::max(
          worst_defining, (fj - fd_jacobian_defining(e)).norm() / fj.norm());
    }
    add("jacobian-links-fd", worst_links <= 1e-6, 1e-6 - worst_links,
        "max relative deviation " + std::to_string(worst_links) + " over " +
            std::to_string(n) + " states");
    add("defining-jacobian-fd", worst_defining <= 1e-6, 1e-6 - worst_defining,
        "max relative deviation " + std::to_string(worst_defining));
  }

  // Incidence matrix: rank 4 with kernel spanned by replicated planar
  // vectors.
  {
    Eigen::JacobiSVD<Mat6> svd(incidence_matrix(), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Vec6 kx, ky;
    kx << 1, 0, 1, 0, 1, 0;
    ky << 0, 1, 0, 1, 0, 1;
    const double kernel_residual =
        std::max((incidence_matrix() * kx).norm(), (incidence_matrix() * ky).norm());
    const bool pass = sv(3) > 1e-12 && sv(4) < 1e-12 && kernel_residual < 1e-12;
    add("incidence-kernel", pass, sv(3) - sv(4),
        "singular values " + std::to_string(sv(3)) + " / " +
            std::to_string(sv(4)) + ", kernel residual " +
            std::to_string(kernel_residual));
  }

  // Rigidity matrix rank splits between collinear and generic states.
  {
    Rng rng(derive_seed(opts.seed, 3));
    const int n = std::max(100, opts.samples);
    double min_generic = kInf, max_collinear = 0.0;
    for (int i = 0; i < n; ++i) {
      const LinkState generic = sample_noncollinear_links(rng, 1.0);
      Eigen::JacobiSVD<Mat36> svd_g(rigidity_matrix(generic));
      min_generic = std::min(
          min_generic, svd_g.singularValues()(2) / svd_g.singularValues()(0));
      const LinkState collinear = sample_collinear_links(rng, 1.0);
      Eigen::JacobiSVD<Mat36> svd_c(rigidity_matrix(collinear));
      const double s0 = svd_c.singularValues()(0);
      if (s0 > 0.0) {
        max_collinear = std::max(max_collinear, svd_c.singularValues()(2) / s0);
      }
    }
    const bool pass = min_generic > 1e-9 && max_collinear < 1e-9;
    add("rigidity-rank-split", pass, min_generic - max_collinear,
        "generic sigma3/sigma1 >= " + std::to_string(min_generic) +
            ", collinear <= " + std::to_string(max_collinear));
  }

  // Collocated Gamma: unit-equilateral eigenvalues and the
  // positive-definiteness sweep.
  {
    const Mat4 g = gamma_collocated_closed(FormationSpec(1, 1, 1));
    Eigen::SelfAdjointEigenSolver<Mat4> es(g);
    const Eigen::Vector4d expected(3.0, 3.0, 9.0, 9.0);
    const double dev = (es.eigenvalues() - expected).cwiseAbs().maxCoeff();
    add("collocated-gamma-eigenvalues", dev <= 1e-9, 1e-9 - dev,
        "max eigenvalue deviation " + std::to_string(dev));

    Rng rng(derive_seed(opts.seed, 4));
    double min_normalized_eig = kInf;
    for (int i = 0; i < opts.gamma_specs; ++i) {
      const FormationSpec s = sample_spec(rng);
      const Mat4 gs = gamma_collocated_closed(s);
      Eigen::SelfAdjointEigenSolver<Mat4> ess(gs);
      min_normalized_eig =
          std::min(min_normalized_eig, ess.eigenvalues()(0) / gs.trace());
    }
    add("collocated-gamma-positive-definite", min_normalized_eig > 0.0,
        min_normalized_eig,
        "min eigenvalue/trace over " + std::to_string(opts.gamma_specs) +
            " specs: " + std::to_string(min_normalized_eig));

    // The general evaluator on the raw basis columns must reproduce the
    // closed form entrywise.
    Rng rng2(derive_seed(opts.seed, 5));
    double worst = 0.0;
    for (int i = 0; i < std::min(50, opts.gamma_specs); ++i) {
      const FormationSpec s = sample_spec(rng2);
      const Eigen::MatrixXd general = gamma_quadratic_form(
          LinkState(), collocated_normal_columns(), s);
      const Mat4 closed = gamma_collocated_closed(s);
      worst = std::max(worst,
                       (general - closed).cwiseAbs().maxCoeff() / closed.norm());
    }
    add("collocated-gamma-closed-vs-general", worst <= 1e-10, 1e-10 - worst,
        "max relative entry deviation " + std::to_string(worst));
  }

  // Collinear equilibrium sweeps.
  {
    const std::vector<FormationSpec> specs =
        sweep_specs_list(opts.sweep_specs, derive_seed(opts.seed, 6));
    double min_gamma = kInf, min_margin = kInf, max_bracket = 0.0,
           max_route_dev = 0.0, max_general_dev = 0.0;
    int checked = 0;
    bool solver_clean = true;
    std::string psi_failure;
    for (const FormationSpec& s : specs) {
      const EquilibriumCatalog catalog = collinear_equilibria(s);
      if (!catalog.warnings.empty()) solver_clean = false;
      try {
        const PsiSumReport psr = verify_psi_sum_negative(catalog.records);
        min_margin = std::min(min_margin, psr.min_margin);
      } catch (const VerificationError& err) {
        psi_failure = err.what();
      }
      for (const EquilibriumRecord& r : catalog.records) {
        if (r.kind != EquilibriumKind::CollinearCollocatedPair &&
            r.kind != EquilibriumKind::CollinearDistinct) {
          continue;
        }
        ++checked;
        min_gamma = std::min(min_gamma, r.gamma);
        const auto [first, second] = gamma_line_brackets(r.e, s);
        max_bracket =
            std::max(max_bracket, std::abs(first) / (1.0 + std::abs(second)));
        const double product = gamma_line_product_form(r.e, s);
        max_route_dev = std::max(
            max_route_dev, std::abs(product - r.gamma) / std::abs(r.gamma));
        const Eigen::MatrixXd general =
            gamma_quadratic_form(r.e, line_normal_direction(r.e), s);
        max_general_dev = std::max(
            max_general_dev, std::abs(general(0, 0) - r.gamma) / std::abs(r.gamma));
      }
    }
    add("line-gamma-positive", min_gamma > 0.0, min_gamma,
        "min Gamma over " + std::to_string(checked) + " collinear equilibria: " +
            std::to_string(min_gamma));
    add("psi-sum-negative", psi_failure.empty() && min_margin > 0.0, min_margin,
        psi_failure.empty()
            ? "min -(psi1+psi2+psi3) = " + std::to_string(min_margin)
            : psi_failure);
    add("gamma-bracket-vanishing", max_bracket <= 1e-10, 1e-10 - max_bracket,
        "max normalized first bracket " + std::to_string(max_bracket));
    add("line-gamma-closed-vs-product", max_route_dev <= 1e-10,
        1e-10 - max_route_dev,
        "max relative route deviation " + std::to_string(max_route_dev));
    add("line-gamma-closed-vs-general", max_general_dev <= 1e-9,
        1e-9 - max_general_dev,
        "max relative deviation " + std::to_string(max_general_dev));
    add("equilibrium-solver-clean", solver_clean, solver_clean ? 1.0 : -1.0,
        solver_clean ? "no solver warnings" : "solver reported warnings");
  }

  // Outward probes with slope matching, plus the tangency control.
  {
    const std::vector<FormationSpec> specs =
        sweep_specs_list(opts.probe_specs, derive_seed(opts.seed, 7));
    const std::vector<double> ladder = default_epsilon_ladder();
    double min_ip = kInf, max_slope_err = 0.0, tangency_margin = kInf;
    for (const FormationSpec& s : specs) {
      const EquilibriumCatalog catalog = collinear_equilibria(s);
      for (const EquilibriumRecord& r : catalog.records) {
        for (const ProbeResult& p : outward_probe(r, s, ladder)) {
          min_ip = std::min(
              min_ip, *std::min_element(p.inner_products.begin(),
                                        p.inner_products.end()));
          max_slope_err = std::max(
              max_slope_err, std::abs(p.estimated_linear_slope /
                                          p.reference_slope -
                                      1.0));
        }
        if (r.kind == EquilibriumKind::CollinearCollocatedPair ||
            r.kind == EquilibriumKind::CollinearDistinct) {
          // Displacing along a tangent direction must give an inner product
          // with the orthogonal normal that is quadratic in epsilon.
          const Vec6 n_orth = line_orthogonal_normal(r.e);
          const Vec2 u = r.e.e1().norm() > 1e-9 ? Vec2(r.e.e1().normalized())
                                                : Vec2(r.e.e2().normalized());
          const Vec6 t_scale =
              unit((Vec6() << u, Vec2::Zero(), -u).finished());
          Vec6 rot;
          rot << rotation90() * r.e.e1(), rotation90() * r.e.e2(),
              rotation90() * r.e.e3();
          const std::vector<double> eps_pair = {1e-3, 1e-5};
          for (const Vec6& tangent : {t_scale, unit(rot)}) {
            const ProbeResult p =
                probe_pair(r.e, tangent, n_orth, s, eps_pair);
            const double c_big = std::abs(p.inner_products[0]) / (1e-3 * 1e-3);
            const double c_small =
                std::abs(p.inner_products[1]) / (1e-5 * 1e-5);
            const double bound = 2.0 * c_big + 1e-8 * (1.0 + r.e.norm());
            tangency_margin = std::min(tangency_margin, bound - c_small);
          }
        }
      }
    }
    add("probe-outward-positive", min_ip > 0.0, min_ip,
        "min inner product " + std::to_string(min_ip));
    add("probe-slope-match", max_slope_err <= 0.05, 0.05 - max_slope_err,
        "max relative slope error " + std::to_string(max_slope_err));
    add("probe-tangency-quadratic", tangency_margin > 0.0, tangency_margin,
        "quadratic-growth margin " + std::to_string(tangency_margin));
  }

  // Escape study on the configured formation.
  {
    const std::vector<double> offsets = {1e-4, 1e-6};
    const EscapeReport er = near_collinear_escape_study(
        spec, offsets, derive_seed(opts.seed, 8));
    const bool pass = er.all_escaped && er.all_initially_nondecreasing &&
                      er.min_orbit_distance > 0.0;
    add("escape-to-target", pass, er.min_orbit_distance,
        std::to_string(er.trials.size()) +
            " trials, min orbit distance " +
            std::to_string(er.min_orbit_distance));
  }

  // Target construction: psi vanishes and the oriented area matches Heron's
  // formula.
  {
    Rng rng(derive_seed(opts.seed, 9));
    double worst_psi = 0.0, worst_area = 0.0;
    for (int i = 0; i < std::min(50, opts.sweep_specs); ++i) {
      const FormationSpec s = sample_spec(rng);
      for (const EquilibriumRecord& r : target_equilibria(s)) {
        const double scale = s.perimeter() * s.perimeter();
        worst_psi = std::max(worst_psi,
                             r.psi_values.cwiseAbs().maxCoeff() / scale);
        const double p = 0.5 * s.perimeter();
        const double heron = std::sqrt(
            std::max(p * (p - s.d1) * (p - s.d2) * (p - s.d3), 0.0));
        worst_area = std::max(
            worst_area,
            std::abs(std::abs(oriented_area2(r.e)) - 2.0 * heron) / (2.0 * heron));
      }
    }
    const bool pass = worst_psi <= 1e-12 && worst_area <= 1e-10;
    add("target-construction", pass, 1e-12 - worst_psi,
        "max normalized psi " + std::to_string(worst_psi) +
            ", max area deviation " + std::to_string(worst_area));
  }

  report.all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                [](const CheckResult& c) { return c.pass; });
  return report;
}

}  // namespace triform
