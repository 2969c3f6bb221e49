#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "tve/diagnostics.hpp"
#include "tve/mms.hpp"

using namespace tve;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

fs::path scenario_path(const char* name) { return fs::path(TVE_SOURCE_DIR) / "scenarios" / name; }
Scenario homogeneous() { return load_scenario(scenario_path("homogeneous.json")); }

double max_alpha_minus_gamma(const GalerkinModel& m, const Trajectory& tr) {
  double worst = 0.0;
  for (std::size_t j = 0; j < tr.times.size(); ++j) {
    const Evaluation ev = m.evaluate(tr.times[j], tr.states[j]);
    worst = std::max(worst, (ev.a - tr.states[j].segment(m.l_theta(), m.k())).cwiseAbs().maxCoeff());
  }
  return worst;
}

double relative_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / *lo;
}

Outcome admissibility() {
  Outcome o{true, ""};
  for (double p : {2.0, 3.0, 4.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const AssumptionReport r = check_assumption(ConstitutiveLaw::norton_hoff(p), 100000, 10.0, 1);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = r.violations == 0 && r.coercivity_constant >= 1.0 && r.growth_constant <= 2.0 && secs < 10.0;
    o.pass = o.pass && ok;
    o.detail += "p=" + num(p) + ": violations=" + std::to_string(r.violations) + " beta=" + num(r.coercivity_constant) +
                " C=" + num(r.growth_constant) + " t=" + num(secs) + "s; ";
  }
  return o;
}

Outcome basis_correctness() {
  const FEAssembly as = assemble(BoxMesh(Vec3(1.0, 0.9, 0.8), {4, 4, 4}), ElasticityTensor::isotropic(1.0, 1.0));
  const BasisSet b = build_bases(as, 8, 8);
  const BasisValidation v = validate_bases(as, b);
  const bool sizes = b.displacement.size() == 8 && b.temperature.size() == 8 && b.complement.size() == 8;
  return {sizes && v.passes(1e-9, 1e-8),
          "gram D/theta/zeta/cross=" + num(v.displacement_gram) + "/" + num(v.temperature_gram) + "/" +
              num(v.complement_gram) + "/" + num(v.cross_gram) + " residual u/theta=" + num(v.displacement_residual) +
              "/" + num(v.temperature_residual)};
}

Outcome divergence_identity() {
  const Simulation sim(homogeneous());
  const BasisValidation v = validate_bases(sim.assembly(), sim.bases());
  const Trajectory tr = sim.run();
  const double ag = max_alpha_minus_gamma(sim.model(), tr);
  return {tr.completed && v.max_divergence_integral <= 1e-12 && ag <= 1e-12,
          "max|int div w_n|=" + num(v.max_divergence_integral) + " max|alpha-gamma|=" + num(ag)};
}

struct ConservationRun {
  double residual = 0.0;
  double scale = 1.0;
  double min_dissipation = 0.0;
  double max_increase = 0.0;
  bool completed = false;
  double seconds = 0.0;
};

const ConservationRun& conservation_run() {
  static const ConservationRun run = [] {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = homogeneous();
    const Simulation sim(s);
    const Trajectory tr = sim.run();
    const EnergyReport r = energy_report(sim.model(), tr, s.data);
    ConservationRun c;
    c.residual = r.max_abs_residual;
    c.scale = r.scale();
    c.min_dissipation = r.min_dissipation;
    c.max_increase = r.max_energy_increase(1e-12);
    c.completed = tr.completed;
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
  }();
  return run;
}

Outcome energy_conservation() {
  const ConservationRun& c = conservation_run();
  return {c.completed && c.residual <= 1e-7 * c.scale && c.seconds < 120.0,
          "max|R|=" + num(c.residual) + " bound=" + num(1e-7 * c.scale) + " t=" + num(c.seconds) + "s"};
}

Outcome broken_symmetry() {
  const VariantComparison v = compare_variants(homogeneous());
  const double reference = conservation_run().residual;
  return {v.broken_residual >= 100.0 * reference && v.div_rate_l1 >= 1e-3,
          "broken max|R|=" + num(v.broken_residual) + " symmetric=" + num(reference) +
              " int|div u_t|=" + num(v.div_rate_l1) + " gamma=" + num(v.broken_gamma)};
}

Outcome dissipation() {
  const ConservationRun& c = conservation_run();
  return {c.min_dissipation >= 0.0 && c.max_increase <= 0.0,
          "min dissipation=" + num(c.min_dissipation) + " max E increase=" + num(c.max_increase)};
}

Outcome plastic_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario s = homogeneous();
  s.mesh.cells = {2, 2, 2};
  s.k = 3;
  s.l = 381;
  s.data.plastic0.amplitude = 0.3;
  const Simulation sim(s);
  const bool full = sim.model().l_zeta() == complement_capacity(sim.assembly(), 3);
  const Trajectory tr = sim.run();
  const PlasticRecovery r = recover_plastic_strain(sim.model(), tr);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {full && tr.completed && r.max_raw <= 1e-7 && secs < 60.0,
          "l_zeta=" + std::to_string(sim.model().l_zeta()) + " max deviation=" + num(r.max_raw) + " t=" + num(secs) + "s"};
}

Outcome refinement_order() {
  const Scenario s = load_scenario(scenario_path("inhomogeneous.json"));
  const SweepResult r = sweep(s, default_sweep_rungs());
  auto e = [&](int i) { return r.rows[i].final_energy; };
  bool completed = true;
  for (const auto& row : r.rows) completed = completed && row.completed;
  // l-phase: rows 0..2 at k = 8; k-phase: rows 3..5 at l = 2k
  const double l1 = std::abs(e(1) - e(0)), l2 = std::abs(e(2) - e(1));
  const double k1 = std::abs(e(4) - e(3)), k2 = std::abs(e(5) - e(4));
  return {completed && l2 <= 2.0 * l1 && k2 <= 2.0 * k1,
          "l-phase |dE|=" + num(l1) + "," + num(l2) + " k-phase |dE|=" + num(k1) + "," + num(k2)};
}

Outcome mms() {
  IntegratorConfig tight;
  tight.abs_tol = tight.rel_tol = 1e-11;
  const MmsTable heat = mms_heat({4, 8, 16}, 0.5, tight);
  const MmsTable coupled = mms_coupled();
  return {heat.min_theta_order() >= 1.8 && coupled.monotone(),
          "heat order=" + num(heat.min_theta_order()) + " coupled err_theta=" + num(coupled.rungs[0].error_theta) +
              "," + num(coupled.rungs[1].error_theta) + "," + num(coupled.rungs[2].error_theta) +
              " monotone=" + (coupled.monotone() ? "yes" : "no")};
}

Outcome truncation_semantics() {
  Scenario s = homogeneous();
  s.material.kappa.amplitude = 0.0;
  s.integrator.method = IntegratorConfig::Method::RK4;
  s.integrator.dt = 1e-3;
  s.integrator.k_trunc = 1e9;
  const Simulation full(s);
  const Trajectory a = full.run();
  double sup = 0.0;
  for (std::size_t j = 0; j < a.times.size(); ++j)
    sup = std::max(sup, full.model().evaluate(a.times[j], a.states[j]).heat_source.cwiseAbs().maxCoeff());
  s.integrator.k_trunc = 0.5 * sup;
  const Simulation cut(s);
  const Trajectory b = cut.run();
  const int lt = full.model().l_theta(), rest = full.model().size() - lt;
  double d_mech = 0.0, d_beta = 0.0;
  bool active = false;
  for (std::size_t j = 0; j < a.times.size(); ++j) {
    d_mech = std::max(d_mech, (a.states[j].tail(rest) - b.states[j].tail(rest)).cwiseAbs().maxCoeff());
    d_beta = std::max(d_beta, (a.states[j].head(lt) - b.states[j].head(lt)).cwiseAbs().maxCoeff());
    active = active || cut.model().evaluate(b.times[j], b.states[j]).truncation_active;
  }
  return {a.completed && b.completed && active && d_mech <= 1e-12 && d_beta > 1e-12,
          "source sup=" + num(sup) + " k_trunc=" + num(0.5 * sup) + " max|d gamma,delta|=" + num(d_mech) +
              " max|d beta|=" + num(d_beta)};
}

Outcome bound_monitors() {
  std::vector<double> mech;
  for (int k : {4, 8, 16}) {
    Scenario s = homogeneous();
    s.k = k;
    s.l = 2 * k;
    const Simulation sim(s);
    const BoundMonitor b = bound_monitor(sim.model(), sim.run());
    mech.push_back(b.sup_energy + b.stress_lp_p);
  }
  std::vector<double> theta;
  for (double kt : {1.0, 10.0, 1e3, 1e6}) {
    Scenario s = homogeneous();
    s.integrator.k_trunc = kt;
    const Simulation sim(s);
    theta.push_back(bound_monitor(sim.model(), sim.run()).theta_w1q);
  }
  const double sm = relative_spread(mech), st = relative_spread(theta);
  return {sm < 0.5 && st < 1.0, "sup E + |T^d|^p spread=" + num(sm) + " theta W^{1,1.2} spread=" + num(st)};
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "tve_acceptance_determinism";
  fs::remove_all(base);
  std::ostringstream sink;
  int codes = 0;
  for (const char* d : {"a", "b"})
    codes += run_cli({"run", "--scenario", scenario_path("homogeneous.json").string(), "--out", (base / d).string()}, sink, sink);
  bool same = codes == 0;
  int files = 0;
  for (const char* f : {"energy.csv", "bounds.csv", "trajectory.csv"}) {
    same = same && read_file(base / "a" / f) == read_file(base / "b" / f);
    ++files;
  }
  return {same, std::to_string(files) + " CSV files compared, exit codes " + (codes == 0 ? "0" : "nonzero")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"constitutive admissibility", admissibility},
      {"basis correctness", basis_correctness},
      {"divergence identity", divergence_identity},
      {"energy conservation", energy_conservation},
      {"broken-symmetry non-conservation", broken_symmetry},
      {"dissipation and relaxation", dissipation},
      {"plastic-strain recovery", plastic_recovery},
      {"two-level refinement order", refinement_order},
      {"manufactured solutions", mms},
      {"truncation semantics", truncation_semantics},
      {"bound monitors", bound_monitors},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
