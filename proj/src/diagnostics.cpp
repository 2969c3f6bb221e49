#include "tve/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tve {

namespace {

struct Sample {
  ReconstructedFields fields;
  Evaluation eval;
};

std::vector<Sample> sample_all(const GalerkinModel& model, const Trajectory& traj) {
  std::vector<Sample> out;
  out.reserve(traj.times.size());
  for (std::size_t j = 0; j < traj.times.size(); ++j)
    out.push_back({model.reconstruct(traj.times[j], traj.states[j]), model.evaluate(traj.times[j], traj.states[j])});
  return out;
}

/// Composite Simpson on a uniform grid with an even interval count, trapezoid otherwise.
double time_integral(const std::vector<double>& t, const std::vector<double>& f) {
  const std::size_t n = t.size();
  if (n < 2) return 0.0;
  bool uniform = true;
  const double h = t[1] - t[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(t[i] - t[i - 1] - h) > 1e-9 * (1.0 + std::abs(h))) uniform = false;
  if (uniform && (n - 1) % 2 == 0) {
    double s = f.front() + f.back();
    for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < n; ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

double heat_coefficient(const CouplingParams& c, double s) {
  switch (c.variant) {
    case Variant::Symmetric:
      return c.alpha();
    case Variant::Broken:
      return c.broken_gamma;
    case Variant::Nonlinear:
      return s;
  }
  return 0.0;
}

double boundary_flux_total(const FEAssembly& as, const ProblemData& data, double t) {
  if (data.heat_flux.empty()) return 0.0;
  const Vector ones = Vector::Ones(as.scalar_dim());
  return boundary_integral(as, [&](const Vec3& x, Side s) { return data.flux(x, s, t); }, ones);
}

Vector vector_at_qp(const FEAssembly& as, const Vector& u_full, int c) {
  Vector comp(as.scalar_dim());
  for (int n = 0; n < as.scalar_dim(); ++n) comp[n] = u_full[3 * n + c];
  return as.scalar_at_qp(comp);
}

double legendre(int n, double x) {
  switch (n) {
    case 0:
      return 1.0;
    case 1:
      return x;
    case 2:
      return 0.5 * (3 * x * x - 1);
    default:
      return 0.5 * (5 * x * x * x - 3 * x);
  }
}

const std::array<std::array<int, 3>, 20> kDegrees{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0},
                                                   {1, 0, 1}, {0, 1, 1}, {2, 0, 0}, {0, 2, 0}, {0, 0, 2},
                                                   {1, 1, 1}, {2, 1, 0}, {1, 2, 0}, {0, 1, 2}, {3, 0, 0},
                                                   {0, 3, 0}, {0, 0, 3}, {2, 2, 0}, {2, 0, 1}, {3, 1, 0}}};

double legendre_product(const std::array<int, 3>& deg, const Vec3& x, const Vec3& ext) {
  double v = 1.0;
  for (int i = 0; i < 3; ++i) v *= legendre(deg[i], 2.0 * x[i] / ext[i] - 1.0);
  return v;
}

double momentum_value(const GalerkinModel& model, const Sample& s, const QPTensorField& probe_strain,
                      const Vector& probe_full, const std::vector<std::pair<Vector, TimeFactor>>& loads) {
  const FEAssembly& as = model.assembly();
  const Vector& w = as.qp_weights();
  double v = 0.0;
  for (int q = 0; q < as.qp_count(); ++q)
    v += w[q] * s.fields.cauchy.data().segment<6>(6 * q).dot(probe_strain.data().segment<6>(6 * q));
  for (const auto& [load, tf] : loads) v -= tf.value(s.fields.t) * load.dot(probe_full);
  return v;
}

struct HeatProbe {
  Vector nodal;
  Vector qp;
  Vector mass;       // M P
  Vector stiffness;  // K P
};

double heat_value(const GalerkinModel& model, const Sample& s, const ProblemData& data, const HeatProbe& p) {
  const FEAssembly& as = model.assembly();
  const Vector& w = as.qp_weights();
  const double t = s.fields.t;
  const Vector theta_rate =
      model.lifting().temperature_rate(t) + model.bases().temperature.vectors * s.eval.beta_dot;
  double v = theta_rate.dot(p.mass) + s.fields.theta.dot(p.stiffness);
  if (!data.heat_flux.empty())
    v -= boundary_integral(as, [&](const Vec3& x, Side sd) { return data.flux(x, sd, t); }, p.nodal);
  const Vector div_rate = as.divergence_full(s.fields.u_rate);
  for (int q = 0; q < as.qp_count(); ++q) {
    const double c = heat_coefficient(model.coupling(), s.fields.thermal[q]);
    v += w[q] * (c * div_rate[q] - s.eval.heat_source[q]) * p.qp[q];
  }
  return v;
}

HeatProbe make_heat_probe(const FEAssembly& as, const Vector& nodal) {
  HeatProbe p;
  p.nodal = nodal;
  p.qp = as.scalar_at_qp(nodal);
  p.mass = as.mass_theta() * nodal;
  p.stiffness = as.stiffness_theta() * nodal;
  return p;
}

std::vector<std::pair<Vector, TimeFactor>> body_loads(const FEAssembly& as, const ProblemData& data) {
  std::vector<std::pair<Vector, TimeFactor>> loads;
  for (const auto& bf : data.body_force) {
    if (bf.is_zero()) continue;
    const VectorTerm term = bf;
    loads.emplace_back(as.load_full([term](const Vec3& x) { return term.spatial(x); }), bf.time);
  }
  return loads;
}

double momentum_from_samples(const GalerkinModel& model, const Trajectory& traj, const std::vector<Sample>& samples,
                             const ProblemData& data, const Vector& probe_reduced) {
  const FEAssembly& as = model.assembly();
  const QPTensorField eps = strain_of(as, probe_reduced);
  const Vector full = as.expand_reduced(probe_reduced);
  const auto loads = body_loads(as, data);
  const double t_end = traj.times.back();
  std::vector<double> f(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j)
    f[j] = time_bump(traj.times[j], t_end) * momentum_value(model, samples[j], eps, full, loads);
  return std::abs(time_integral(traj.times, f));
}

double heat_from_samples(const GalerkinModel& model, const Trajectory& traj, const std::vector<Sample>& samples,
                         const ProblemData& data, const Vector& probe_nodal) {
  const FEAssembly& as = model.assembly();
  const HeatProbe p = make_heat_probe(as, probe_nodal);
  const double t_end = traj.times.back();
  std::vector<double> f(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j)
    f[j] = time_bump(traj.times[j], t_end) * heat_value(model, samples[j], data, p);
  double r = time_integral(traj.times, f);
  const Vector theta0 = evaluate_qp(as, data.theta0);
  const Vector& w = as.qp_weights();
  double init = 0.0;
  for (int q = 0; q < as.qp_count(); ++q) init += w[q] * (samples.front().fields.theta_qp[q] - theta0[q]) * p.qp[q];
  r += time_bump(traj.times.front(), t_end) * init;
  return std::abs(r);
}

}  // namespace

double EnergyReport::scale() const {
  if (samples.empty()) return 1.0;
  return samples.front().energy + std::abs(samples.front().heat) + 1.0;
}

double EnergyReport::max_energy_increase(double power_tol) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < samples.size(); ++j) {
    if (std::abs(samples[j].power) > power_tol || std::abs(samples[j - 1].power) > power_tol) continue;
    worst = std::max(worst, samples[j].energy - samples[j - 1].energy);
  }
  return worst;
}

CsvTable EnergyReport::to_csv() const {
  CsvTable t;
  t.header = {"t", "E", "H", "dissipation", "power", "residual"};
  for (const auto& s : samples) t.rows.push_back({s.t, s.energy, s.heat, s.dissipation, s.power, s.residual});
  return t;
}

EnergyReport energy_report(const GalerkinModel& model, const Trajectory& traj, const ProblemData& data) {
  const FEAssembly& as = model.assembly();
  const Vector& w = as.qp_weights();
  EnergyReport rep;
  double work = 0.0;
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const double t = traj.times[j];
    const ReconstructedFields r = model.reconstruct(t, traj.states[j]);
    const Evaluation ev = model.evaluate(t, traj.states[j]);
    EnergySample s;
    s.t = t;
    const QPTensorField elastic(as.strain_full(r.u).data() - r.eps_p.data());
    s.energy = 0.5 * as.inner_D(elastic, elastic);
    s.heat = w.dot(r.theta_qp);
    s.dissipation = w.dot(ev.heat_source);
    const QPTensorField rate = as.strain_full(r.u_rate);
    double mech = 0.0;
    for (int q = 0; q < as.qp_count(); ++q)
      mech += w[q] * r.cauchy.data().segment<6>(6 * q).dot(rate.data().segment<6>(6 * q));
    s.power = mech + boundary_flux_total(as, data, t);
    if (j > 0) work += 0.5 * (t - rep.samples.back().t) * (s.power + rep.samples.back().power);
    if (j > 0)
      s.residual = s.energy + s.heat - rep.samples.front().energy - rep.samples.front().heat - work;
    rep.samples.push_back(s);
  }
  rep.min_dissipation = std::numeric_limits<double>::infinity();
  rep.min_energy = std::numeric_limits<double>::infinity();
  for (const auto& s : rep.samples) {
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(s.residual));
    rep.min_dissipation = std::min(rep.min_dissipation, s.dissipation);
    rep.min_energy = std::min(rep.min_energy, s.energy);
  }
  return rep;
}

bool BoundMonitor::finite() const {
  for (double v : {sup_energy, stress_lp_p, flow_lp_conj, dissipation_l1, theta_w1q, sup_theta_integral, u_rate_l2,
                   u_rate_w1, eps_p_rate})
    if (!std::isfinite(v)) return false;
  return true;
}

CsvTable BoundMonitor::to_csv() const {
  CsvTable t;
  t.header = {"sup_E",       "Td_Lp_p",        "G_Lpconj",  "TdG_L1",   "theta_L1.2W11.2",
              "sup_int_theta", "u_t_L2",       "eps_u_t_Lpconj", "eps_p_t_Lpconj"};
  t.rows.push_back({sup_energy, stress_lp_p, flow_lp_conj, dissipation_l1, theta_w1q, sup_theta_integral, u_rate_l2,
                    u_rate_w1, eps_p_rate});
  return t;
}

BoundMonitor bound_monitor(const GalerkinModel& model, const Trajectory& traj) {
  const FEAssembly& as = model.assembly();
  const Vector& w = as.qp_weights();
  const int nq = as.qp_count();
  const double p = model.law().p();
  const double pc = p / (p - 1.0);
  constexpr double q = 1.2;
  std::vector<double> td_p, g_pc, tdg, theta_q, ut2, eut, ept;
  BoundMonitor b;
  b.sup_energy = 0.0;
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const double t = traj.times[j];
    const ReconstructedFields r = model.reconstruct(t, traj.states[j]);
    const Evaluation ev = model.evaluate(t, traj.states[j]);
    const QPTensorField elastic(as.strain_full(r.u).data() - r.eps_p.data());
    b.sup_energy = std::max(b.sup_energy, 0.5 * as.inner_D(elastic, elastic));
    b.sup_theta_integral = std::max(b.sup_theta_integral, std::abs(w.dot(r.theta_qp)));
    const auto grad = as.gradient_at_qp(r.theta);
    const QPTensorField rate = as.strain_full(r.u_rate);
    Vector packed = Vector::Zero(model.size());
    packed.segment(model.l_theta(), model.k()) = ev.gamma_dot;
    packed.segment(model.l_theta() + model.k(), model.l_zeta()) = ev.delta_dot;
    const Vector eps_rate = model.plastic_strain(packed);
    std::array<Vector, 3> uq;
    for (int c = 0; c < 3; ++c) uq[c] = vector_at_qp(as, r.u_rate, c);
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0, a7 = 0;
    for (int k = 0; k < nq; ++k) {
      a1 += w[k] * std::pow(ev.td.segment<6>(6 * k).norm(), p);
      a2 += w[k] * std::pow(ev.g.segment<6>(6 * k).norm(), pc);
      a3 += w[k] * std::abs(ev.heat_source[k]);
      a4 += w[k] * (std::pow(std::abs(r.theta_qp[k]), q) + std::pow(grad[k].norm(), q));
      a5 += w[k] * (uq[0][k] * uq[0][k] + uq[1][k] * uq[1][k] + uq[2][k] * uq[2][k]);
      a6 += w[k] * std::pow(rate.data().segment<6>(6 * k).norm(), pc);
      a7 += w[k] * std::pow(eps_rate.segment<6>(6 * k).norm(), pc);
    }
    td_p.push_back(a1);
    g_pc.push_back(a2);
    tdg.push_back(a3);
    theta_q.push_back(a4);
    ut2.push_back(a5);
    eut.push_back(a6);
    ept.push_back(a7);
  }
  auto trap = [&traj](const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) s += 0.5 * (traj.times[i] - traj.times[i - 1]) * (f[i] + f[i - 1]);
    return s;
  };
  b.stress_lp_p = trap(td_p);
  b.flow_lp_conj = std::pow(trap(g_pc), 1.0 / pc);
  b.dissipation_l1 = trap(tdg);
  b.theta_w1q = std::pow(trap(theta_q), 1.0 / q);
  b.u_rate_l2 = std::sqrt(trap(ut2));
  b.u_rate_w1 = std::pow(trap(eut), 1.0 / pc);
  b.eps_p_rate = std::pow(trap(ept), 1.0 / pc);
  return b;
}

double time_bump(double t, double t_end) {
  const double s = t / t_end;
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

std::vector<Vector> momentum_probes(const FEAssembly& as, int count) {
  const BoxMesh& mesh = as.mesh();
  const Vec3& ext = mesh.extents();
  std::vector<Vector> out;
  for (int i = 0; i < count; ++i) {
    const auto& deg = kDegrees[(i / 3) % kDegrees.size()];
    const int dir = i % 3;
    Vector full = Vector::Zero(as.full_vector_dim());
    for (int n = 0; n < mesh.node_count(); ++n) {
      const Vec3 x = mesh.node_coords(n);
      double bubble = 1.0;
      for (int c = 0; c < 3; ++c) bubble *= 4.0 * x[c] * (ext[c] - x[c]) / (ext[c] * ext[c]);
      full[3 * n + dir] = bubble * legendre_product(deg, x, ext);
    }
    out.push_back(as.restrict_to_interior(full));
  }
  return out;
}

std::vector<Vector> heat_probes(const FEAssembly& as, int count) {
  const BoxMesh& mesh = as.mesh();
  std::vector<Vector> out;
  for (int i = 0; i < count; ++i) {
    const auto& deg = kDegrees[i % kDegrees.size()];
    Vector v(as.scalar_dim());
    for (int n = 0; n < as.scalar_dim(); ++n) v[n] = legendre_product(deg, mesh.node_coords(n), mesh.extents());
    out.push_back(v);
  }
  return out;
}

double momentum_residual(const GalerkinModel& model, const Trajectory& traj, const ProblemData& data,
                         const Vector& probe_reduced) {
  return momentum_from_samples(model, traj, sample_all(model, traj), data, probe_reduced);
}

double heat_residual(const GalerkinModel& model, const Trajectory& traj, const ProblemData& data,
                     const Vector& probe_nodal) {
  return heat_from_samples(model, traj, sample_all(model, traj), data, probe_nodal);
}

WeakResiduals weak_residuals(const GalerkinModel& model, const Trajectory& traj, const ProblemData& data,
                             int probe_count) {
  const auto samples = sample_all(model, traj);
  WeakResiduals out;
  const int nm = probe_count / 2;
  for (const auto& p : momentum_probes(model.assembly(), nm)) {
    out.momentum.push_back(momentum_from_samples(model, traj, samples, data, p));
    out.max_momentum = std::max(out.max_momentum, out.momentum.back());
  }
  for (const auto& p : heat_probes(model.assembly(), probe_count - nm)) {
    out.heat.push_back(heat_from_samples(model, traj, samples, data, p));
    out.max_heat = std::max(out.max_heat, out.heat.back());
  }
  if (traj.times.size() >= 3) {
    const double h = traj.times[1] - traj.times[0];
    bool uniform = true;
    for (std::size_t i = 1; i < traj.times.size(); ++i)
      if (std::abs(traj.times[i] - traj.times[i - 1] - h) > 1e-9 * (1.0 + h)) uniform = false;
    if (uniform) out.plastic_recovery = recover_plastic_strain(model, traj).max_raw;
  }
  return out;
}

std::string VariantComparison::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "symmetric_max_residual = " << symmetric_residual << "\n"
     << "broken_max_residual = " << broken_residual << "\n"
     << "ratio = " << ratio << "\n"
     << "broken_gamma = " << broken_gamma << "\n"
     << "broken_int_abs_div_u_t = " << div_rate_l1 << "\n"
     << "broken_mismatch_integral = " << mismatch_integral << "\n";
  return os.str();
}

VariantComparison compare_variants(const Scenario& scenario) {
  if (!scenario.data.homogeneous()) throw ValidationError("compare-variants needs homogeneous data (f = 0, g = 0, g_theta = 0)");
  VariantComparison out;
  Scenario sym = scenario;
  sym.variant = Variant::Symmetric;
  const Simulation s1(sym);
  const Trajectory t1 = s1.run();
  if (!t1.completed) throw Error("symmetric run failed: " + t1.message);
  out.symmetric_residual = energy_report(s1.model(), t1, sym.data).max_abs_residual;

  Scenario br = scenario;
  br.variant = Variant::Broken;
  if (!br.broken_gamma) {
    double smax = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < t1.times.size(); ++j) {
      const Evaluation ev = s1.model().evaluate(t1.times[j], t1.states[j]);
      smax = std::max(smax, ev.theta.maxCoeff());
    }
    const auto& m = br.material;
    br.broken_gamma = m.expansion * (smax - m.theta_R) + 0.5 * m.expansion * m.theta_ref;
  }
  out.broken_gamma = *br.broken_gamma;
  const Simulation s2(br);
  const Trajectory t2 = s2.run();
  if (!t2.completed) throw Error("broken run failed: " + t2.message);
  out.broken_residual = energy_report(s2.model(), t2, br.data).max_abs_residual;
  out.ratio = out.symmetric_residual > 0.0 ? out.broken_residual / out.symmetric_residual
                                           : std::numeric_limits<double>::infinity();

  const FEAssembly& as = s2.assembly();
  const Vector& w = as.qp_weights();
  std::vector<double> abs_div, mismatch;
  for (std::size_t j = 0; j < t2.times.size(); ++j) {
    const ReconstructedFields r = s2.model().reconstruct(t2.times[j], t2.states[j]);
    const Vector d = as.divergence_full(r.u_rate);
    double a = 0.0, m = 0.0;
    for (int q = 0; q < as.qp_count(); ++q) {
      a += w[q] * std::abs(d[q]);
      m += w[q] * (r.thermal[q] - out.broken_gamma) * d[q];
    }
    abs_div.push_back(a);
    mismatch.push_back(m);
  }
  out.div_rate_l1 = time_integral(t2.times, abs_div);
  out.mismatch_integral = time_integral(t2.times, mismatch);
  return out;
}

CsvTable SweepResult::to_csv() const {
  CsvTable t;
  t.header = {"k", "l", "E_T", "abs_diff", "completed"};
  for (const auto& r : rows)
    t.rows.push_back({double(r.k), double(r.l), r.final_energy, r.difference, r.completed ? 1.0 : 0.0});
  return t;
}

SweepResult sweep(const Scenario& scenario, const std::vector<std::pair<int, int>>& rungs) {
  SweepResult out;
  for (const auto& [k, l] : rungs) {
    Scenario s = scenario;
    s.k = k;
    s.l = l;
    const Simulation sim(s);
    const Trajectory traj = sim.run();
    SweepRow row;
    row.k = k;
    row.l = l;
    row.completed = traj.completed;
    const ReconstructedFields r = sim.model().reconstruct(traj.last_time, traj.last_state);
    const QPTensorField elastic(sim.assembly().strain_full(r.u).data() - r.eps_p.data());
    row.final_energy = 0.5 * sim.assembly().inner_D(elastic, elastic);
    row.difference = out.rows.empty() ? 0.0 : std::abs(row.final_energy - out.rows.back().final_energy);
    out.rows.push_back(row);
  }
  return out;
}

std::vector<std::pair<int, int>> default_sweep_rungs() { return {{8, 4}, {8, 8}, {8, 16}, {4, 8}, {8, 16}, {16, 32}}; }

std::string encode_field_dump(const GalerkinModel& model, const ReconstructedFields& f) {
  const FEAssembly& as = model.assembly();
  BinaryWriter w;
  w.bytes("TVEF", 4);
  w.u32(1);
  w.u64(as.mesh().hash());
  w.u32(static_cast<std::uint32_t>(model.k()));
  w.u32(static_cast<std::uint32_t>(model.l_theta()));
  w.u32(static_cast<std::uint32_t>(model.l_zeta()));
  w.u32(static_cast<std::uint32_t>(model.coupling().variant));
  w.f64(f.t);
  w.u32(static_cast<std::uint32_t>(as.qp_count()));
  w.u32(19);
  for (int q = 0; q < as.qp_count(); ++q) {
    for (int c = 0; c < 6; ++c) w.f64(f.eps_p.data()[6 * q + c]);
    for (int c = 0; c < 6; ++c) w.f64(f.stress.data()[6 * q + c]);
    for (int c = 0; c < 6; ++c) w.f64(f.cauchy.data()[6 * q + c]);
    w.f64(f.theta_qp[q]);
  }
  return w.str();
}

void write_field_dump(const std::filesystem::path& path, const GalerkinModel& model, const ReconstructedFields& f) {
  write_file_atomic(path, encode_field_dump(model, f));
}

FieldDump decode_field_dump(const std::string& bytes) {
  BinaryReader r(bytes);
  if (r.bytes(4) != "TVEF") throw ValidationError("not a field dump");
  if (r.u32() != 1) throw ValidationError("unsupported field dump version");
  FieldDump d;
  d.mesh_hash = r.u64();
  d.k = static_cast<int>(r.u32());
  d.l_theta = static_cast<int>(r.u32());
  d.l_zeta = static_cast<int>(r.u32());
  d.variant = static_cast<int>(r.u32());
  d.t = r.f64();
  d.qp_count = static_cast<int>(r.u32());
  const std::uint32_t per = r.u32();
  d.values.resize(static_cast<std::size_t>(d.qp_count) * per);
  for (auto& v : d.values) v = r.f64();
  if (!r.at_end()) throw ValidationError("trailing bytes in field dump");
  return d;
}

CsvTable trajectory_csv(const GalerkinModel& model, const Trajectory& traj) {
  CsvTable t;
  t.header.push_back("t");
  for (int m = 0; m < model.l_theta(); ++m) t.header.push_back("beta" + std::to_string(m + 1));
  for (int n = 0; n < model.k(); ++n) t.header.push_back("gamma" + std::to_string(n + 1));
  for (int m = 0; m < model.l_zeta(); ++m) t.header.push_back("delta" + std::to_string(m + 1));
  t.header.push_back("max_alpha_minus_gamma");
  t.header.push_back("truncation_active");
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const Evaluation ev = model.evaluate(traj.times[j], traj.states[j]);
    std::vector<double> row{traj.times[j]};
    for (Eigen::Index i = 0; i < traj.states[j].size(); ++i) row.push_back(traj.states[j][i]);
    const Vector gap = ev.a - traj.states[j].segment(model.l_theta(), model.k());
    row.push_back(gap.size() ? gap.cwiseAbs().maxCoeff() : 0.0);
    row.push_back(ev.truncation_active ? 1.0 : 0.0);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace tve
