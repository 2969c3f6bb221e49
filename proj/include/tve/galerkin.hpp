#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tve/constitutive.hpp"
#include "tve/lifting.hpp"
#include "tve/spectral_basis.hpp"

namespace tve {

enum class Variant { Symmetric, Broken, Nonlinear };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& s);

/**
 * Thermal coupling. expansion is the raw coefficient; the linearized constant
 * is alpha = expansion * theta_ref.
 *
 *   Symmetric: sigma = T - alpha I,                     heat coupling alpha div u_t
 *   Broken:    sigma = T - expansion (theta - theta_R) I, heat coupling gamma div u_t
 *   Nonlinear: sigma = T - expansion (theta - theta_R) I, heat coupling expansion (theta - theta_R) div u_t
 */
struct CouplingParams {
  Variant variant = Variant::Symmetric;
  double expansion = 1.0;
  double theta_ref = 1.0;
  double theta_R = 0.0;
  double broken_gamma = 0.0;

  double alpha() const { return expansion * theta_ref; }
  bool operator==(const CouplingParams&) const = default;
};

struct IntegratorConfig {
  enum class Method { Adaptive, RK4 };
  Method method = Method::Adaptive;
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double dt = 1e-3;  // fixed step for RK4, initial step for the adaptive method
  double min_step = 1e-12;
  double max_step = 0.05;
  double k_trunc = 1e6;

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

/// Auxiliary volume sources of manufactured-solution runs; empty in physical scenarios.
struct Sources {
  std::function<Vec6(const Vec3& x, double t)> plastic;
  std::function<double(const Vec3& x, double t)> heat;
};

/// xi = (beta[l_theta], gamma[k], delta[l_zeta]).
struct GalerkinState {
  double t = 0.0;
  Vector xi;
};

/// Every intermediate quantity of one right-hand-side evaluation.
struct Evaluation {
  Vector theta;         // theta~ + theta at qp
  Vector thermal;       // pointwise thermal stress scalar s at qp
  Vector a;             // displacement coefficients alpha^n
  Vector a_dot;
  Vector beta_dot, gamma_dot, delta_dot;
  Vector td;            // full deviatoric stress T~^d + T^d, 6 nq
  Vector g;             // G(theta, T^d), 6 nq
  Vector g_total;       // G plus auxiliary plastic source
  Vector heat_source;   // T^d : G at qp, untruncated
  bool truncation_active = false;
};

struct ReconstructedFields {
  double t = 0.0;
  Vector u;        // full nodal displacement u~ + u
  Vector u_rate;   // full nodal
  Vector theta;    // nodal theta~ + theta
  Vector theta_qp;
  QPTensorField eps_p;
  QPTensorField stress;      // T = T~ + D(eps(u) - eps^p)
  QPTensorField deviatoric;  // T^d
  QPTensorField cauchy;      // sigma = T - s I
  Vector thermal;            // s at qp
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  bool completed = true;
  std::string message;
  double last_time = 0.0;
  Vector last_state;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// The coefficient system for fixed bases, data and constitutive law.
class GalerkinModel {
public:
  GalerkinModel(const FEAssembly& as, const BasisSet& bases, ConstitutiveLaw law, CouplingParams coupling,
                const Lifting& lifting, double k_trunc, Sources sources = {});

  const FEAssembly& assembly() const { return *as_; }
  const BasisSet& bases() const { return *bases_; }
  const ConstitutiveLaw& law() const { return law_; }
  const CouplingParams& coupling() const { return coupling_; }
  const Lifting& lifting() const { return *lifting_; }
  double k_trunc() const { return trunc_.level(); }

  int l_theta() const { return lt_; }
  int k() const { return k_; }
  int l_zeta() const { return lz_; }
  int size() const { return lt_ + k_ + lz_; }

  Evaluation evaluate(double t, const Vector& xi) const;
  Vector rhs(double t, const Vector& xi) const;

  /// beta from the truncated temperature, gamma/delta from D-projections of eps^p_0.
  Vector initial_state(const Vector& theta0_qp, const QPTensorField& eps_p0) const;
  ReconstructedFields reconstruct(double t, const Vector& xi) const;

  /// eps^p from coefficients, 6 nq.
  Vector plastic_strain(const Vector& xi) const;
  /// D-orthogonal projection onto span{eps(w_n)} + span{zeta_m}.
  Vector project(const Vector& field) const;

private:
  const FEAssembly* as_;
  const BasisSet* bases_;
  ConstitutiveLaw law_;
  CouplingParams coupling_;
  const Lifting* lifting_;
  Truncation trunc_;
  Sources sources_;
  int lt_, k_, lz_;
  Matrix dew_, dew_dev_;  // D eps(w_n), 6 nq x k
  Matrix dz_, dz_dev_;    // D zeta_m, 6 nq x l_zeta
  Matrix div_;            // nq x k
  Matrix vals_;           // nq x l_theta
  Matrix coupling_b_;     // k x l_theta
  Vector weights_;
};

Trajectory integrate(const GalerkinModel& model, const Vector& xi0, const std::vector<double>& times,
                     const IntegratorConfig& config);

/// Uniform sample grid 0, t_end/n, ..., t_end.
std::vector<double> uniform_times(double t_end, int intervals);

struct PlasticRecovery {
  std::vector<double> times;            // samples at which the comparison was made
  std::vector<double> raw_deviation;    // max_q |eps^p_0 + int G - eps^p(coefficients)|
  std::vector<double> projected_deviation;
  double max_raw = 0.0;
  double max_projected = 0.0;
  double max_trace_drift = 0.0;  // max_q |tr(eps^p(t) - eps^p(0))| from coefficients
};

/**
 * Recomputes eps^p(t) = P eps^p_0 + int_0^t G by composite Simpson on the
 * (uniform) sample grid and compares with the coefficient reconstruction at
 * every even sample.
 */
PlasticRecovery recover_plastic_strain(const GalerkinModel& model, const Trajectory& traj);

}  // namespace tve
