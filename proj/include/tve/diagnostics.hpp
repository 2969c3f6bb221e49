#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tve/io.hpp"
#include "tve/scenario.hpp"

namespace tve {

struct EnergySample {
  double t = 0.0;
  double energy = 0.0;       // E = 1/2 int D(eps(u) - eps^p):(eps(u) - eps^p)
  double heat = 0.0;         // H = int theta
  double dissipation = 0.0;  // int T^d : G
  double power = 0.0;        // int (T - s I):eps(u_t) + int_{dOmega} g_theta
  double residual = 0.0;     // [E + H](t) - [E + H](0) - int_0^t power
};

struct EnergyReport {
  std::vector<EnergySample> samples;
  double max_abs_residual = 0.0;
  double min_dissipation = 0.0;
  double min_energy = 0.0;
  /// E(0) + |H(0)| + 1.
  double scale() const;
  /// Largest increase of E between consecutive samples with zero power on both ends.
  double max_energy_increase(double power_tol = 0.0) const;
  CsvTable to_csv() const;
};

EnergyReport energy_report(const GalerkinModel& model, const Trajectory& traj, const ProblemData& data);

/// Running norms echoing the a-priori estimates; time integrals use the trapezoid rule on the samples.
struct BoundMonitor {
  double sup_energy = 0.0;
  double stress_lp_p = 0.0;        // int int |T^d|^p
  double flow_lp_conj = 0.0;       // (int int |G|^{p'})^{1/p'}
  double dissipation_l1 = 0.0;     // int int |T^d : G|
  double theta_w1q = 0.0;          // (int int |theta|^q + |grad theta|^q)^{1/q}, q = 1.2
  double sup_theta_integral = 0.0; // sup_t |int theta|
  double u_rate_l2 = 0.0;          // (int int |u_t|^2)^{1/2}
  double u_rate_w1 = 0.0;          // (int int |eps(u_t)|^{p'})^{1/p'}
  double eps_p_rate = 0.0;         // (int int |eps^p_t|^{p'})^{1/p'}

  bool finite() const;
  CsvTable to_csv() const;
};

BoundMonitor bound_monitor(const GalerkinModel& model, const Trajectory& traj);

/// Smooth-in-time test function e exp(-1/(1 - (t/T)^2)); equals 1 at t = 0 and vanishes at T.
double time_bump(double t, double t_end);

struct WeakResiduals {
  std::vector<double> momentum;
  std::vector<double> heat;
  double max_momentum = 0.0;
  double max_heat = 0.0;
  double plastic_recovery = 0.0;
};

/// Momentum identity against phi(x) psi(t); phi is a reduced (interior) nodal vector field.
double momentum_residual(const GalerkinModel& model, const Trajectory& traj, const ProblemData& data,
                         const Vector& probe_reduced);
/// Heat identity against phi(x) psi(t); phi is a nodal scalar field.
double heat_residual(const GalerkinModel& model, const Trajectory& traj, const ProblemData& data,
                     const Vector& probe_nodal);

/// Probe families: bubble x Legendre x direction (momentum), Legendre products up to degree 3 (heat).
std::vector<Vector> momentum_probes(const FEAssembly& as, int count);
std::vector<Vector> heat_probes(const FEAssembly& as, int count);

WeakResiduals weak_residuals(const GalerkinModel& model, const Trajectory& traj, const ProblemData& data,
                             int probe_count = 20);

struct VariantComparison {
  double symmetric_residual = 0.0;
  double broken_residual = 0.0;
  double ratio = 0.0;
  double broken_gamma = 0.0;
  double div_rate_l1 = 0.0;       // int int |div u_t| in the broken run
  double mismatch_integral = 0.0; // int int (s - gamma) div u_t in the broken run
  std::string to_text() const;
};

/// Runs the symmetric and broken variants on identical data; requires homogeneous data.
VariantComparison compare_variants(const Scenario& scenario);

struct SweepRow {
  int k = 0;
  int l = 0;
  double final_energy = 0.0;
  double difference = 0.0;  // |E_T - E_T(previous rung)|, 0 for the first rung
  bool completed = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  CsvTable to_csv() const;
};

SweepResult sweep(const Scenario& scenario, const std::vector<std::pair<int, int>>& rungs);
/// l in {4, 8, 16} at k = 8, then k in {4, 8, 16} at l = 2k.
std::vector<std::pair<int, int>> default_sweep_rungs();

/**
 * Field dump, little-endian:
 *   "TVEF" | u32 version=1 | u64 mesh hash | u32 k | u32 l_theta | u32 l_zeta | u32 variant (0 sym, 1 broken, 2 nonlinear)
 *   | f64 t | u32 qp_count | u32 values_per_qp = 19
 *   | per quadrature point: eps^p[6] T[6] sigma[6] theta[1], tensors in Mandel order 11 22 33 23 13 12
 */
std::string encode_field_dump(const GalerkinModel& model, const ReconstructedFields& f);
void write_field_dump(const std::filesystem::path& path, const GalerkinModel& model, const ReconstructedFields& f);

struct FieldDump {
  std::uint64_t mesh_hash = 0;
  int k = 0, l_theta = 0, l_zeta = 0, variant = 0;
  double t = 0.0;
  int qp_count = 0;
  std::vector<double> values;
};
FieldDump decode_field_dump(const std::string& bytes);

CsvTable trajectory_csv(const GalerkinModel& model, const Trajectory& traj);

}  // namespace tve
