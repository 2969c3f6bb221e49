#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "tve/diagnostics.hpp"
#include "tve/mms.hpp"

namespace tve {

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<int> k, l;
  std::optional<double> k_trunc, tol;
  std::optional<std::string> variant;
  std::optional<std::uint64_t> seed;
};

void add_overrides(CLI::App* app, Overrides& o) {
  app->add_option("--k", o.k, "Displacement / plastic level k");
  app->add_option("--l", o.l, "Temperature / complement level l");
  app->add_option("--k-trunc", o.k_trunc, "Heat source truncation level");
  app->add_option("--variant", o.variant, "symmetric | broken | nonlinear");
  app->add_option("--tol", o.tol, "Absolute and relative integrator tolerance");
  app->add_option("--seed", o.seed, "Seed of the random initial plastic strain");
}

Scenario load_with(const std::string& path, const Overrides& o) {
  Scenario s = load_scenario(path);
  if (o.k) s.k = *o.k;
  if (o.l) s.l = *o.l;
  if (o.k_trunc) s.integrator.k_trunc = *o.k_trunc;
  if (o.tol) s.integrator.abs_tol = s.integrator.rel_tol = *o.tol;
  if (o.variant) s.variant = parse_variant(*o.variant);
  if (o.seed) s.data.plastic0.seed = *o.seed;
  s.validate();
  return s;
}

fs::path output_dir(const std::string& flag, const Scenario* s) {
  fs::path dir = !flag.empty() ? fs::path(flag) : (s ? fs::path(s->output.directory) : fs::path("out"));
  fs::create_directories(dir);
  return dir;
}

std::string dump_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "fields_%.6f.bin", t);
  return buf;
}

double max_alpha_gamma(const GalerkinModel& model, const Trajectory& traj) {
  double worst = 0.0;
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const Evaluation ev = model.evaluate(traj.times[j], traj.states[j]);
    const Vector gamma = traj.states[j].segment(model.l_theta(), model.k());
    if (model.k() > 0) worst = std::max(worst, (ev.a - gamma).cwiseAbs().maxCoeff());
  }
  return worst;
}

int cmd_check_constitutive(double p, std::uint64_t samples, std::uint64_t seed, double radius, std::ostream& out) {
  const ConstitutiveLaw law = ConstitutiveLaw::norton_hoff(p);
  const AssumptionReport r = check_assumption(law, samples, radius, seed);
  out << "law = " << law.name() << "\n" << r.to_text();
  return r.violations == 0 ? 0 : 1;
}

int cmd_basis(const Scenario& s, const std::string& out_flag, std::ostream& out) {
  const FEAssembly as = assemble(BoxMesh(Vec3(s.mesh.extents.data()), s.mesh.cells), make_elasticity(s.material));
  const BasisSet bases = build_bases(as, s.k, s.l);
  const BasisValidation v = validate_bases(as, bases);
  const fs::path dir = output_dir(out_flag, &s);
  save_basis_cache(dir / "basis.bin", as, bases);
  std::ostringstream os;
  os << "k = " << bases.displacement.size() << "\nl_theta = " << bases.temperature.size()
     << "\nl_zeta = " << bases.complement.size() << "\n" << v.to_text() << "valid = " << (v.passes() ? 1 : 0) << "\n";
  write_file_atomic(dir / "basis_report.txt", os.str());
  out << os.str();
  return v.passes() ? 0 : 1;
}

int cmd_run(const Scenario& s, const std::string& out_flag, std::ostream& out) {
  const Simulation sim(s);
  const GalerkinModel& model = sim.model();
  const Trajectory traj = sim.run();
  const fs::path dir = output_dir(out_flag, &s);

  const EnergyReport energy = energy_report(model, traj, s.data);
  write_file_atomic(dir / "energy.csv", energy.to_csv().to_string());
  const BoundMonitor bounds = bound_monitor(model, traj);
  write_file_atomic(dir / "bounds.csv", bounds.to_csv().to_string());
  write_file_atomic(dir / "trajectory.csv", trajectory_csv(model, traj).to_string());

  const int n = static_cast<int>(traj.times.size());
  const int dumps = std::min(s.output.field_dumps, n);
  for (int i = 0; i < dumps; ++i) {
    const int j = dumps == 1 ? n - 1 : static_cast<int>(std::lround(double(i) * (n - 1) / (dumps - 1)));
    write_field_dump(dir / dump_name(traj.times[j]), model, model.reconstruct(traj.times[j], traj.states[j]));
  }

  std::ostringstream os;
  os << "scenario = " << s.name << "\n"
     << "variant = " << variant_name(s.variant) << "\n";
  if (s.variant == Variant::Nonlinear) os << "theory = none\n";
  if (s.variant == Variant::Broken) os << "broken_gamma = " << format_double(sim.coupling().broken_gamma) << "\n";
  os << "k = " << model.k() << "\nl_theta = " << model.l_theta() << "\nl_zeta = " << model.l_zeta() << "\n"
     << "completed = " << (traj.completed ? 1 : 0) << "\n";
  if (!traj.completed) os << "message = " << traj.message << "\nlast_time = " << format_double(traj.last_time) << "\n";
  os << "steps = " << traj.steps << "\nrejected = " << traj.rejected << "\n"
     << "max_abs_residual = " << format_double(energy.max_abs_residual) << "\n"
     << "energy_scale = " << format_double(energy.scale()) << "\n"
     << "min_dissipation = " << format_double(energy.min_dissipation) << "\n"
     << "min_energy = " << format_double(energy.min_energy) << "\n"
     << "max_alpha_minus_gamma = " << format_double(max_alpha_gamma(model, traj)) << "\n"
     << "bounds_finite = " << (bounds.finite() ? 1 : 0) << "\n";
  if (traj.completed) {
    const WeakResiduals wr = weak_residuals(model, traj, s.data);
    os << "weak_momentum = " << format_double(wr.max_momentum) << "\n"
       << "weak_heat = " << format_double(wr.max_heat) << "\n"
       << "plastic_recovery = " << format_double(wr.plastic_recovery) << "\n";
  }
  write_file_atomic(dir / "report.txt", os.str());
  out << os.str();
  return traj.completed ? 0 : 1;
}

int cmd_compare(const Scenario& s, const std::string& out_flag, std::ostream& out) {
  const VariantComparison c = compare_variants(s);
  const fs::path dir = output_dir(out_flag, &s);
  write_file_atomic(dir / "comparison.txt", c.to_text());
  out << c.to_text();
  return 0;
}

int cmd_sweep(const Scenario& s, const std::string& out_flag, std::ostream& out) {
  const SweepResult r = sweep(s, default_sweep_rungs());
  const fs::path dir = output_dir(out_flag, &s);
  const std::string csv = r.to_csv().to_string();
  write_file_atomic(dir / "sweep.csv", csv);
  out << csv;
  for (const auto& row : r.rows)
    if (!row.completed) return 1;
  return 0;
}

int cmd_mms(const std::string& which, const std::string& out_flag, std::ostream& out) {
  const fs::path dir = output_dir(out_flag, nullptr);
  IntegratorConfig tight;
  tight.abs_tol = tight.rel_tol = 1e-11;
  std::vector<MmsTable> tables;
  if (which == "all" || which == "constant") tables.push_back(mms_constant());
  if (which == "all" || which == "heat") tables.push_back(mms_heat({4, 8, 16}, 0.5, tight));
  if (which == "all" || which == "coupled") tables.push_back(mms_coupled());
  bool ok = true;
  for (const auto& t : tables) {
    const std::string csv = t.to_csv().to_string();
    write_file_atomic(dir / ("mms_" + t.name + ".csv"), csv);
    out << "# " << t.name << "\n" << csv;
    if (t.name == "heat") out << "min_order = " << format_double(t.min_theta_order()) << "\n";
    if (t.name == "coupled") out << "monotone = " << (t.monotone() ? 1 : 0) << "\n";
    for (const auto& r : t.rungs) ok = ok && r.completed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermo-visco-elastic two-level Galerkin simulator", "tve"};
  app.require_subcommand(1);

  double p = 3.0, radius = 10.0;
  std::uint64_t samples = 100000, seed = 1;
  auto* cc = app.add_subcommand("check-constitutive", "Sample the admissibility conditions of the Norton-Hoff law");
  cc->add_option("--p", p, "Growth exponent");
  cc->add_option("--samples", samples, "Number of random samples");
  cc->add_option("--seed", seed, "Random seed");
  cc->add_option("--radius", radius, "Sampling radius for theta and |T^d|");

  std::string scenario_path, out_dir, which = "all";
  Overrides ov;
  auto scenario_cmd = [&](const char* name, const char* help) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
    c->add_option("--out", out_dir, "Output directory");
    add_overrides(c, ov);
    return c;
  };
  auto* basis = scenario_cmd("basis", "Build and validate the Galerkin bases, write a basis cache");
  auto* run = scenario_cmd("run", "Integrate a scenario and write CSV, field dumps and a report");
  auto* cmp = scenario_cmd("compare-variants", "Energy residual of the symmetric and broken couplings");
  auto* sw = scenario_cmd("sweep", "Two-level (k, l) refinement study");
  auto* mms = app.add_subcommand("mms", "Manufactured-solution verification");
  mms->add_option("--out", out_dir, "Output directory");
  mms->add_option("--case", which, "constant | heat | coupled | all")
      ->check(CLI::IsMember({"constant", "heat", "coupled", "all"}));

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (cc->parsed()) return cmd_check_constitutive(p, samples, seed, radius, out);
    if (mms->parsed()) return cmd_mms(which, out_dir, out);
    const Scenario s = load_with(scenario_path, ov);
    if (basis->parsed()) return cmd_basis(s, out_dir, out);
    if (run->parsed()) return cmd_run(s, out_dir, out);
    if (cmp->parsed()) return cmd_compare(s, out_dir, out);
    if (sw->parsed()) return cmd_sweep(s, out_dir, out);
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace tve
