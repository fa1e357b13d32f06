#include "triform/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace triform {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

// Doubles become JSON null when not finite (nlohmann's own behaviour for
// NaN); route everything through one helper so catalogs with undefined
// ratios stay parseable.
Json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json json_vec(const Vec6& v) {
  Json a = Json::array();
  for (int i = 0; i < 6; ++i) a.push_back(v(i));
  return a;
}

Json json_vec(const Vec3& v) {
  Json a = Json::array();
  for (int i = 0; i < 3; ++i) a.push_back(v(i));
  return a;
}

Json json_spectrum(const Eigen::Vector4cd& ev) {
  Json a = Json::array();
  for (int i = 0; i < 4; ++i) {
    a.push_back(Json{{"re", ev(i).real()}, {"im", ev(i).imag()}});
  }
  return a;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

Json file_header(const char* kind, const Json& config_echo) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  if (!config_echo.empty()) j["config"] = config_echo;
  return j;
}

Json spec_json(const FormationSpec& spec) {
  return Json{{"d1", spec.d1}, {"d2", spec.d2}, {"d3", spec.d3}};
}

}  // namespace

std::string trajectory_csv(const TrajectoryRecord& record) {
  std::string out = "t,e1x,e1y,e2x,e2y,e3x,e3y,V,area2\n";
  for (size_t i = 0; i < record.times.size(); ++i) {
    out += format_double(record.times[i]);
    for (int k = 0; k < 6; ++k) {
      out += ',';
      out += format_double(record.states[i](k));
    }
    out += ',';
    out += format_double(record.potential_values[i]);
    out += ',';
    out += format_double(record.collinearity_values[i]);
    out += '\n';
  }
  return out;
}

Json trajectory_json(const TrajectoryRecord& record, const FormationSpec& spec,
                     const Json& config_echo) {
  Json j = file_header("trajectory", config_echo);
  j["spec"] = spec_json(spec);
  j["classification"] = to_string(record.classification);
  j["stalled"] = record.stalled;
  j["accepted_steps"] = record.accepted_steps;
  j["rejected_steps"] = record.rejected_steps;
  j["max_cycle_residual"] = record.max_cycle_residual;
  j["max_potential_rise_excess"] = record.max_potential_rise_excess;
  j["samples"] = Json::object();
  j["samples"]["t"] = record.times;
  Json states = Json::array();
  for (const Vec6& e : record.states) states.push_back(json_vec(e));
  j["samples"]["e"] = states;
  if (!record.positions.empty()) {
    Json zs = Json::array();
    for (const Vec6& z : record.positions) zs.push_back(json_vec(z));
    j["samples"]["z"] = zs;
  }
  j["samples"]["V"] = record.potential_values;
  j["samples"]["area2"] = record.collinearity_values;
  return j;
}

std::string catalog_csv(const std::vector<EquilibriumRecord>& records) {
  std::string out =
      "kind,x,s,psi1,psi2,psi3,gamma,psi_sum,"
      "jac1_re,jac1_im,jac2_re,jac2_im,jac3_re,jac3_im,jac4_re,jac4_im\n";
  for (const EquilibriumRecord& r : records) {
    out += to_string(r.kind);
    out += ',';
    out += format_double(r.x);
    out += ',';
    out += format_double(r.s);
    for (int i = 0; i < 3; ++i) {
      out += ',';
      out += format_double(r.psi_values(i));
    }
    out += ',';
    out += format_double(r.gamma);
    out += ',';
    out += format_double(r.psi_sum);
    for (int i = 0; i < 4; ++i) {
      out += ',';
      out += format_double(r.link_jacobian_eigenvalues(i).real());
      out += ',';
      out += format_double(r.link_jacobian_eigenvalues(i).imag());
    }
    out += '\n';
  }
  return out;
}

namespace {

Json record_json(const EquilibriumRecord& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["x"] = json_number(r.x);
  j["s"] = json_number(r.s);
  j["e"] = json_vec(r.e.e);
  j["psi"] = json_vec(r.psi_values);
  j["psi_sum"] = r.psi_sum;
  j["gamma"] = json_number(r.gamma);
  if (r.gamma_matrix) {
    Json m = Json::array();
    for (int i = 0; i < 4; ++i) {
      Json row = Json::array();
      for (int k = 0; k < 4; ++k) row.push_back((*r.gamma_matrix)(i, k));
      m.push_back(row);
    }
    j["gamma_matrix"] = m;
  }
  j["jacobian_spectrum"] = json_spectrum(r.link_jacobian_eigenvalues);
  return j;
}

}  // namespace

Json catalog_json(const FormationSpec& spec, const EquilibriumCatalog& catalog,
                  const std::vector<EquilibriumRecord>& targets,
                  const Json& config_echo) {
  Json j = file_header("equilibrium_catalog", config_echo);
  j["spec"] = spec_json(spec);
  j["continuum_family"] = catalog.continuum_family;
  j["warnings"] = catalog.warnings;
  Json records = Json::array();
  for (const EquilibriumRecord& r : targets) records.push_back(record_json(r));
  for (const EquilibriumRecord& r : catalog.records) {
    records.push_back(record_json(r));
  }
  j["records"] = records;
  return j;
}

std::string montecarlo_csv(const MonteCarloReport& report) {
  std::string out = "trial,seed,classification,final_V,rate\n";
  for (const TrialResult& t : report.trials) {
    out += std::to_string(t.index);
    out += ',';
    out += std::to_string(t.seed);
    out += ',';
    out += to_string(t.classification);
    out += ',';
    out += format_double(t.final_potential);
    out += ',';
    out += format_double(t.rate);
    out += '\n';
  }
  return out;
}

Json montecarlo_json(const MonteCarloReport& report, const Json& config_echo) {
  Json j = file_header("montecarlo_report", config_echo);
  j["spec"] = Json{{"d1", report.d1}, {"d2", report.d2}, {"d3", report.d3}};
  j["seed"] = report.seed;
  j["n_noncollinear"] = report.n_noncollinear;
  j["n_collinear"] = report.n_collinear;
  j["distribution"] = report.distribution;
  j["summary"] = Json{
      {"count_target", report.count_target},
      {"count_collinear_equilibrium", report.count_collinear_eq},
      {"count_unresolved", report.count_unresolved},
      {"dichotomy_held", report.dichotomy_held},
      {"rate_min", json_number(report.rate_min)},
      {"rate_mean", json_number(report.rate_mean)},
      {"rate_max", json_number(report.rate_max)},
      {"max_collinear_area", report.max_collinear_area},
      {"max_cycle_residual", report.max_cycle_residual},
      {"max_potential_rise_excess", report.max_potential_rise_excess},
  };
  Json trials = Json::array();
  for (const TrialResult& t : report.trials) {
    trials.push_back(Json{
        {"trial", t.index},
        {"seed", t.seed},
        {"collinear_start", t.collinear_start},
        {"classification", to_string(t.classification)},
        {"final_time", t.final_time},
        {"final_V", t.final_potential},
        {"rate", json_number(t.rate)},
        {"r2", json_number(t.r2)},
        {"initial_area2", t.initial_area2},
        {"max_abs_area2", t.max_abs_area2},
        {"final_link_error", t.final_link_error},
        {"max_cycle_residual", t.max_cycle_residual},
        {"max_potential_rise_excess", t.max_potential_rise_excess},
    });
  }
  j["trials"] = trials;
  return j;
}

std::string verification_csv(const VerificationReport& report) {
  std::string out = "check,pass,margin,detail\n";
  for (const CheckResult& c : report.checks) {
    out += c.name;
    out += ',';
    out += c.pass ? "true" : "false";
    out += ',';
    out += format_double(c.margin);
    out += ',';
    out += csv_quote(c.detail);
    out += '\n';
  }
  return out;
}

Json verification_json(const VerificationReport& report,
                       const Json& config_echo) {
  Json j = file_header("verification_report", config_echo);
  j["seed"] = report.options.seed;
  j["samples"] = report.options.samples;
  j["gamma_specs"] = report.options.gamma_specs;
  j["sweep_specs"] = report.options.sweep_specs;
  j["probe_specs"] = report.options.probe_specs;
  j["quick"] = report.options.quick;
  j["all_pass"] = report.all_pass;
  Json checks = Json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"pass", c.pass},
                          {"margin", json_number(c.margin)},
                          {"detail", c.detail}});
  }
  j["checks"] = checks;
  return j;
}

Json gamma_report_json(const GammaReport& report) {
  Json j;
  j["manifold"] = to_string(report.point.tag);
  j["e"] = json_vec(report.point.e.e);
  Json basis = Json::array();
  for (int c = 0; c < report.point.normal_basis.cols(); ++c) {
    basis.push_back(json_vec(Vec6(report.point.normal_basis.col(c))));
  }
  j["normal_basis"] = basis;
  Json m = Json::array();
  for (int i = 0; i < report.gamma.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < report.gamma.cols(); ++k) row.push_back(report.gamma(i, k));
    m.push_back(row);
  }
  j["gamma"] = m;
  Json eigs = Json::array();
  for (int i = 0; i < report.eigenvalues.size(); ++i) {
    eigs.push_back(report.eigenvalues(i));
  }
  j["eigenvalues"] = eigs;
  j["min_eigenvalue"] = report.min_eigenvalue;
  j["positive_definite"] = report.positive_definite;
  return j;
}

Json probe_json(const ProbeResult& probe) {
  Json j;
  j["base"] = json_vec(probe.base);
  j["normal"] = json_vec(probe.normal);
  j["epsilons"] = probe.epsilons;
  j["inner_products"] = probe.inner_products;
  j["verdict"] = probe.verdict;
  j["all_positive"] = probe.all_positive;
  j["first_outward_index"] = probe.first_outward_index;
  j["estimated_linear_slope"] = probe.estimated_linear_slope;
  j["reference_slope"] = probe.reference_slope;
  return j;
}

Json escape_json(const EscapeReport& report) {
  Json j;
  j["spec"] = Json{{"d1", report.d1}, {"d2", report.d2}, {"d3", report.d3}};
  j["seed"] = report.seed;
  j["offsets"] = report.offsets;
  j["all_escaped"] = report.all_escaped;
  j["all_initially_nondecreasing"] = report.all_initially_nondecreasing;
  j["min_orbit_distance"] = report.min_orbit_distance;
  Json trials = Json::array();
  for (const EscapeTrial& t : report.trials) {
    trials.push_back(Json{
        {"record_index", t.record_index},
        {"record_x", json_number(t.record_x)},
        {"offset", t.offset},
        {"classification", to_string(t.classification)},
        {"initially_nondecreasing", t.initially_nondecreasing},
        {"min_orbit_distance", t.min_orbit_distance},
        {"final_V", t.final_potential},
        {"stayed_on_manifold", t.stayed_on_manifold},
    });
  }
  j["trials"] = trials;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  out << content;
  if (!out.good()) {
    throw std::runtime_error("failed writing output file: " + path);
  }
}

}  // namespace triform
