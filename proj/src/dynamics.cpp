#include "triform/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace triform {

namespace {

struct Products {
  Vec2 a, b, c;  // e1 psi1, e2 psi2, e3 psi3
};

Products link_products(const LinkState& e, const FormationSpec& spec) {
  const PsiVector p = psi(e, spec);
  return {e.e1() * p(0), e.e2() * p(1), e.e3() * p(2)};
}

}  // namespace

Vec6 position_vector_field(const PositionState& z, const FormationSpec& spec) {
  const Products pr = link_products(links_from_positions(z), spec);
  Vec6 f;
  f << pr.a, pr.b, pr.c;
  return f;
}

Vec6 link_vector_field(const LinkState& e, const FormationSpec& spec) {
  const Products pr = link_products(e, spec);
  Vec6 f;
  f << pr.b - pr.a, pr.c - pr.b, pr.a - pr.c;
  return f;
}

double potential(const LinkState& e, const FormationSpec& spec) {
  return 0.25 * psi(e, spec).squaredNorm();
}

double potential_rate(const LinkState& e, const FormationSpec& spec) {
  const PsiVector p = psi(e, spec);
  return -0.5 * (rigidity_matrix(e).transpose() * p).squaredNorm();
}

double potential_rate_chain(const LinkState& e, const FormationSpec& spec) {
  const Products pr = link_products(e, spec);
  Vec6 grad;  // dV/de has blocks psi_i e_i
  grad << pr.a, pr.b, pr.c;
  return grad.dot(link_vector_field(e, spec));
}

double potential_rate_sum_squares(const LinkState& e,
                                  const FormationSpec& spec) {
  const Products pr = link_products(e, spec);
  return -0.5 * ((pr.a - pr.b).squaredNorm() + (pr.b - pr.c).squaredNorm() +
                 (pr.c - pr.a).squaredNorm());
}

double equilibrium_residual(const LinkState& e, const FormationSpec& spec) {
  const Products pr = link_products(e, spec);
  return (pr.a - pr.b).norm() + (pr.b - pr.c).norm();
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::TargetFormation:
      return "TargetFormation";
    case Classification::CollinearEquilibrium:
      return "CollinearEquilibrium";
    case Classification::Unresolved:
      return "Unresolved";
  }
  return "Unresolved";
}

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
  }
  if (!(initial_step > 0.0) || !(max_step > 0.0) || !(min_step > 0.0) ||
      min_step > max_step) {
    throw std::invalid_argument("IntegratorConfig: invalid step bounds");
  }
  if (!(max_time > 0.0)) {
    throw std::invalid_argument("IntegratorConfig: max_time must be positive");
  }
  if (target_potential_tol < 0.0 || equilibrium_field_tol < 0.0 ||
      collinear_potential_floor < 0.0 || rest_velocity_tol < 0.0 ||
      sample_interval < 0.0) {
    throw std::invalid_argument("IntegratorConfig: negative threshold");
  }
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
// 5th-order minus 4th-order weights, for the error estimate.
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

struct StepResult {
  Vec6 y;
  double error_norm;  // scaled; accept when <= 1
};

template <typename Field>
StepResult dopri5_step(const Field& f, const Vec6& y0, const Vec6& k1,
                       double dt, double rtol, double atol) {
  const Vec6 k2 = f(y0 + dt * (kA21 * k1));
  const Vec6 k3 = f(y0 + dt * (kA31 * k1 + kA32 * k2));
  const Vec6 k4 = f(y0 + dt * (kA41 * k1 + kA42 * k2 + kA43 * k3));
  const Vec6 k5 = f(y0 + dt * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
  const Vec6 k6 = f(y0 + dt * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 +
                               kA65 * k5));
  const Vec6 y1 =
      y0 + dt * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
  const Vec6 k7 = f(y1);
  const Vec6 err = dt * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 +
                         kE7 * k7);
  double norm = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double scale =
        atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    norm = std::max(norm, std::abs(err(i)) / scale);
  }
  return {y1, norm};
}

enum class Mode { Links, Positions };

TrajectoryRecord run_flow(const Vec6& y0, const FormationSpec& spec,
                          const IntegratorConfig& cfg, Mode mode) {
  cfg.validate();

  const auto to_links = [&](const Vec6& y) -> LinkState {
    if (mode == Mode::Links) return LinkState(y);
    return links_from_positions(PositionState(y));
  };
  const auto field = [&](const Vec6& y) -> Vec6 {
    if (mode == Mode::Links) return link_vector_field(LinkState(y), spec);
    return position_vector_field(PositionState(y), spec);
  };

  TrajectoryRecord rec;
  Vec6 y = y0;
  if (mode == Mode::Links) y = LinkState(y).projected().e;
  double t = 0.0;

  const auto record_sample = [&](double time, const Vec6& state) {
    const LinkState e = to_links(state);
    rec.times.push_back(time);
    rec.states.push_back(e.e);
    if (mode == Mode::Positions) rec.positions.push_back(state);
    const double v = potential(e, spec);
    if (!rec.potential_values.empty()) {
      const double prev = rec.potential_values.back();
      rec.max_potential_rise_excess = std::max(
          rec.max_potential_rise_excess, v - prev - 1e-10 * (1.0 + prev));
    }
    rec.potential_values.push_back(v);
    rec.collinearity_values.push_back(oriented_area2(e));
    rec.max_cycle_residual = std::max(rec.max_cycle_residual, e.cycle_residual());
  };

  // Returns the classification if a stop condition is met at state y.
  const auto stop_check = [&](const Vec6& state) -> std::pair<bool, Classification> {
    const LinkState e = to_links(state);
    const double v = potential(e, spec);
    if (cfg.target_potential_tol > 0.0 && v < cfg.target_potential_tol) {
      if (mode == Mode::Positions && cfg.rest_velocity_tol > 0.0 &&
          position_vector_field(PositionState(state), spec).norm() >=
              cfg.rest_velocity_tol) {
        return {false, Classification::Unresolved};
      }
      return {true, Classification::TargetFormation};
    }
    if (cfg.equilibrium_field_tol > 0.0 &&
        link_vector_field(e, spec).norm() < cfg.equilibrium_field_tol &&
        v > cfg.collinear_potential_floor) {
      return {true, Classification::CollinearEquilibrium};
    }
    return {false, Classification::Unresolved};
  };

  record_sample(t, y);
  if (auto [stop, cls] = stop_check(y); stop) {
    rec.classification = cls;
    return rec;
  }

  double dt = std::min(cfg.initial_step, cfg.max_step);
  double next_sample =
      cfg.sample_interval > 0.0 ? cfg.sample_interval
                                : std::numeric_limits<double>::infinity();
  constexpr long kMaxIterations = 50'000'000;

  for (long iter = 0; iter < kMaxIterations && t < cfg.max_time; ++iter) {
    double step = std::min(dt, cfg.max_time - t);
    bool sample_boundary = false;
    if (t + step >= next_sample - 1e-15 * std::max(1.0, next_sample)) {
      step = next_sample - t;
      sample_boundary = true;
    }

    const Vec6 k1 = field(y);
    const StepResult r = dopri5_step(field, y, k1, step, cfg.rtol, cfg.atol);

    if (r.error_norm <= 1.0) {
      t += step;
      y = r.y;
      if (mode == Mode::Links) y = LinkState(y).projected().e;
      ++rec.accepted_steps;

      if (cfg.sample_interval <= 0.0) {
        record_sample(t, y);
      } else if (sample_boundary) {
        record_sample(t, y);
        next_sample += cfg.sample_interval;
      }

      if (auto [stop, cls] = stop_check(y); stop) {
        if (cfg.sample_interval > 0.0 && (rec.times.empty() || rec.times.back() != t)) {
          record_sample(t, y);
        }
        rec.classification = cls;
        return rec;
      }
    } else {
      ++rec.rejected_steps;
    }

    const double factor = 0.9 * std::pow(std::max(r.error_norm, 1e-10), -0.2);
    dt = step * std::clamp(factor, 0.2, 5.0);
    dt = std::clamp(dt, cfg.min_step, cfg.max_step);
    if (r.error_norm > 1.0 && step <= cfg.min_step * 1.0001) {
      // Cannot resolve the field at the minimum step; give up.
      break;
    }
  }

  if (cfg.sample_interval > 0.0 && (rec.times.empty() || rec.times.back() != t)) {
    record_sample(t, y);
  }
  rec.classification = Classification::Unresolved;
  rec.stalled = true;
  return rec;
}

}  // namespace

TrajectoryRecord integrate(const LinkState& e0, const FormationSpec& spec,
                           const IntegratorConfig& cfg) {
  if (!e0.in_link_space(kCycleTol * (1.0 + e0.norm()))) {
    throw PreconditionError("integrate: e0 is not in the link space (||e1+e2+e3|| = " +
                            std::to_string(e0.cycle_residual()) + ")");
  }
  return run_flow(e0.e, spec, cfg, Mode::Links);
}

TrajectoryRecord integrate_positions(const PositionState& z0,
                                     const FormationSpec& spec,
                                     const IntegratorConfig& cfg) {
  IntegratorConfig c = cfg;
  if (c.rest_velocity_tol == 0.0) c.rest_velocity_tol = 1e-10;
  return run_flow(z0.z, spec, c, Mode::Positions);
}

TailFit fit_log_potential_tail(const TrajectoryRecord& record) {
  TailFit fit;
  if (record.times.size() < 4) return fit;
  const double t_half = record.times.back() / 2.0;
  std::vector<double> ts, ys;
  for (size_t i = 0; i < record.times.size(); ++i) {
    if (record.times[i] >= t_half) {
      const double v = std::max(record.potential_values[i], 1e-300);
      ts.push_back(record.times[i]);
      ys.push_back(std::log(v));
    }
  }
  const int n = static_cast<int>(ts.size());
  if (n < 4) return fit;
  double tm = 0.0, ym = 0.0;
  for (int i = 0; i < n; ++i) {
    tm += ts[i];
    ym += ys[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    stt += (ts[i] - tm) * (ts[i] - tm);
    sty += (ts[i] - tm) * (ys[i] - ym);
    syy += (ys[i] - ym) * (ys[i] - ym);
  }
  if (stt <= 0.0 || syy <= 0.0) return fit;
  fit.slope = sty / stt;
  fit.r2 = (sty * sty) / (stt * syy);
  fit.n = n;
  return fit;
}

}  // namespace triform
