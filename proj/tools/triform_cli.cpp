// Command-line front end: simulation of the gradient formation law,
// equilibrium catalogs, the bundled verification suite, and Monte-Carlo
// region-of-attraction studies. Machine-readable CSV/JSON output with a
// one-line summary on stdout.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "triform/dynamics.hpp"
#include "triform/equilibria.hpp"
#include "triform/experiments.hpp"
#include "triform/io.hpp"

namespace {

using namespace triform;

struct CommonOptions {
  std::vector<double> d = {1.0, 1.0, 1.0};
  std::string format = "json";
  std::string out;
  uint64_t seed = 1;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->fallthrough();
  cmd->add_option("--d", opts.d,
                  "distance constraints d1,d2,d3 of the target triangle")
      ->delimiter(',');
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", opts.out, "output file path");
  cmd->add_option("--seed", opts.seed, "seed for randomized inputs")
      ->capture_default_str();
}

FormationSpec make_spec(const CommonOptions& opts) {
  if (opts.d.size() != 3) {
    throw std::invalid_argument("--d expects exactly three values");
  }
  return FormationSpec(opts.d[0], opts.d[1], opts.d[2]);
}

std::string output_path(const CommonOptions& opts, const std::string& stem) {
  if (!opts.out.empty()) return opts.out;
  return stem + "." + opts.format;
}

Json common_echo(const CommonOptions& opts, const std::string& command) {
  Json j;
  j["command"] = command;
  j["d"] = opts.d;
  j["seed"] = opts.seed;
  j["format"] = opts.format;
  return j;
}

struct SimulateOptions {
  CommonOptions common;
  std::vector<double> z0;
  std::vector<double> e0;
  bool collinear_start = false;
  bool project_e0 = false;
  double rtol = 1e-9;
  double atol = 1e-12;
  double tmax = 1000.0;
};

int run_simulate(const SimulateOptions& opts) {
  const FormationSpec spec = make_spec(opts.common);
  IntegratorConfig cfg;
  cfg.rtol = opts.rtol;
  cfg.atol = opts.atol;
  cfg.max_time = opts.tmax;
  cfg.validate();

  Json echo = common_echo(opts.common, "simulate");
  echo["rtol"] = opts.rtol;
  echo["atol"] = opts.atol;
  echo["max_time"] = opts.tmax;

  TrajectoryRecord record;
  if (!opts.z0.empty()) {
    if (opts.z0.size() != 6) {
      throw std::invalid_argument("--z0 expects six values x1,y1,...,y3");
    }
    Vec6 z;
    for (int i = 0; i < 6; ++i) z(i) = opts.z0[i];
    echo["initial"] = "z0";
    record = integrate_positions(PositionState(z), spec, cfg);
  } else if (!opts.e0.empty()) {
    if (opts.e0.size() != 6) {
      throw std::invalid_argument("--e0 expects six values e1x,e1y,...,e3y");
    }
    Vec6 ev;
    for (int i = 0; i < 6; ++i) ev(i) = opts.e0[i];
    LinkState e0(ev);
    if (opts.project_e0) e0 = e0.projected();
    if (!e0.in_link_space(kCycleTol * (1.0 + e0.norm()))) {
      throw std::invalid_argument(
          "--e0 does not satisfy the cycle constraint e1+e2+e3 = 0 "
          "(pass --project-e0 to project it)");
    }
    echo["initial"] = "e0";
    record = integrate(e0, spec, cfg);
  } else {
    Rng rng(opts.common.seed);
    const double sigma = spec.perimeter() / 3.0;
    const LinkState e0 = opts.collinear_start
                             ? sample_collinear_links(rng, sigma)
                             : sample_noncollinear_links(rng, sigma);
    echo["initial"] = opts.collinear_start ? "collinear-random" : "random";
    record = integrate(e0, spec, cfg);
  }

  const std::string path = output_path(opts.common, "trajectory");
  if (opts.common.format == "csv") {
    write_text_file(path, trajectory_csv(record));
  } else {
    write_text_file(path, trajectory_json(record, spec, echo).dump(2) + "\n");
  }
  std::cout << "simulate: classification=" << to_string(record.classification)
            << " t_final=" << format_double(record.final_time())
            << " V_final=" << format_double(record.final_potential())
            << " steps=" << record.accepted_steps << " out=" << path << "\n";
  return record.classification == Classification::Unresolved ? 2 : 0;
}

struct EquilibriaOptions {
  CommonOptions common;
};

int run_equilibria(const EquilibriaOptions& opts) {
  const FormationSpec spec = make_spec(opts.common);
  const EquilibriumCatalog catalog = collinear_equilibria(spec);
  const std::vector<EquilibriumRecord> targets = target_equilibria(spec);

  bool gammas_positive = true;
  bool psi_sums_negative = true;
  double min_gamma = std::numeric_limits<double>::infinity();
  for (const EquilibriumRecord& r : catalog.records) {
    min_gamma = std::min(min_gamma, r.gamma);
    if (!(r.gamma > 0.0)) gammas_positive = false;
    if (!(r.psi_sum < 0.0)) psi_sums_negative = false;
  }

  const std::string path = output_path(opts.common, "catalog");
  if (opts.common.format == "csv") {
    std::vector<EquilibriumRecord> all = targets;
    all.insert(all.end(), catalog.records.begin(), catalog.records.end());
    write_text_file(path, catalog_csv(all));
  } else {
    write_text_file(
        path,
        catalog_json(spec, catalog, targets, common_echo(opts.common, "equilibria"))
                .dump(2) +
            "\n");
  }

  const bool ok = gammas_positive && psi_sums_negative && catalog.warnings.empty();
  std::cout << "equilibria: records=" << targets.size() + catalog.records.size()
            << " collinear=" << catalog.records.size()
            << " continuum=" << (catalog.continuum_family ? "true" : "false")
            << " min_gamma=" << format_double(min_gamma)
            << " verified=" << (ok ? "true" : "false") << " out=" << path
            << "\n";
  return ok ? 0 : 3;
}

struct VerifyOptions {
  CommonOptions common;
  int samples = 1000;
  bool quick = false;
};

int run_verify(const VerifyOptions& opts) {
  const FormationSpec spec = make_spec(opts.common);
  VerifySuiteOptions suite;
  suite.seed = opts.common.seed;
  suite.samples = opts.samples;
  suite.quick = opts.quick;

  const VerificationReport report = run_verification_suite(spec, suite);

  const std::string path = output_path(opts.common, "verification");
  Json echo = common_echo(opts.common, "verify");
  echo["samples"] = opts.samples;
  echo["quick"] = opts.quick;
  if (opts.common.format == "csv") {
    write_text_file(path, verification_csv(report));
  } else {
    write_text_file(path, verification_json(report, echo).dump(2) + "\n");
  }

  int passed = 0;
  for (const CheckResult& c : report.checks) passed += c.pass ? 1 : 0;
  std::cout << "verify: checks=" << report.checks.size() << " passed=" << passed
            << " all_pass=" << (report.all_pass ? "true" : "false")
            << " out=" << path << "\n";
  return report.all_pass ? 0 : 3;
}

struct MonteCarloOptions {
  CommonOptions common;
  int trials = 500;
  bool collinear = false;
};

int run_montecarlo(const MonteCarloOptions& opts) {
  const FormationSpec spec = make_spec(opts.common);
  if (opts.trials <= 0) {
    throw std::invalid_argument("--trials must be positive");
  }
  const int n_noncollinear = opts.collinear ? 0 : opts.trials;
  const int n_collinear = opts.collinear ? opts.trials : 0;
  const MonteCarloReport report = region_of_attraction_study(
      spec, n_noncollinear, n_collinear, opts.common.seed);

  const std::string path = output_path(opts.common, "montecarlo");
  Json echo = common_echo(opts.common, "montecarlo");
  echo["trials"] = opts.trials;
  echo["collinear"] = opts.collinear;
  if (opts.common.format == "csv") {
    write_text_file(path, montecarlo_csv(report));
  } else {
    write_text_file(path, montecarlo_json(report, echo).dump(2) + "\n");
  }

  std::cout << "montecarlo: trials=" << report.trials.size()
            << " target=" << report.count_target
            << " collinear_eq=" << report.count_collinear_eq
            << " unresolved=" << report.count_unresolved
            << " dichotomy=" << (report.dichotomy_held ? "true" : "false")
            << " out=" << path << "\n";
  if (report.count_unresolved > 0) return 2;
  return report.dichotomy_held ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "triform: gradient-law formation control of three planar robots on a "
      "cyclic sensing graph - simulation, equilibrium catalogs and stability "
      "verification"};
  app.require_subcommand(1);
  app.fallthrough();
  // Keys are flat "name = value" lines prefixed by the subcommand, e.g.
  // "montecarlo.trials = 500".
  app.set_config("--config", "", "flat key = value configuration file");

  SimulateOptions sim;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "integrate one trajectory and classify its limit");
  add_common_options(sim_cmd, sim.common);
  sim_cmd->add_option("--z0", sim.z0, "initial positions x1,y1,x2,y2,x3,y3")
      ->delimiter(',');
  sim_cmd->add_option("--e0", sim.e0, "initial links e1x,e1y,...,e3y")
      ->delimiter(',');
  sim_cmd->add_flag("--collinear-start", sim.collinear_start,
                    "start from a random exactly-collinear state");
  sim_cmd->add_flag("--project-e0", sim.project_e0,
                    "project --e0 onto the link space before integrating");
  sim_cmd->add_option("--rtol", sim.rtol, "relative tolerance")
      ->capture_default_str();
  sim_cmd->add_option("--atol", sim.atol, "absolute tolerance")
      ->capture_default_str();
  sim_cmd->add_option("--tmax", sim.tmax, "maximum simulated time")
      ->capture_default_str();

  EquilibriaOptions eq;
  CLI::App* eq_cmd = app.add_subcommand(
      "equilibria", "catalog the equilibria with their Gamma values");
  add_common_options(eq_cmd, eq.common);

  VerifyOptions ver;
  CLI::App* ver_cmd =
      app.add_subcommand("verify", "run the bundled property-check suite");
  add_common_options(ver_cmd, ver.common);
  ver_cmd->add_option("--samples", ver.samples, "sample count for the checks")
      ->capture_default_str();
  ver_cmd->add_flag("--quick", ver.quick, "reduced counts for a fast pass");

  MonteCarloOptions mc;
  CLI::App* mc_cmd = app.add_subcommand(
      "montecarlo", "random-start region-of-attraction study");
  add_common_options(mc_cmd, mc.common);
  mc_cmd->add_option("--trials", mc.trials, "number of trials")
      ->capture_default_str();
  mc_cmd->add_flag("--collinear", mc.collinear,
                   "use exactly-collinear starts instead of random ones");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(sim_cmd)) return run_simulate(sim);
    if (app.got_subcommand(eq_cmd)) return run_equilibria(eq);
    if (app.got_subcommand(ver_cmd)) return run_verify(ver);
    if (app.got_subcommand(mc_cmd)) return run_montecarlo(mc);
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
