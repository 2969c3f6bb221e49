#pragma once

#include <functional>
#include <vector>

#include "tve/assembly.hpp"
#include "tve/data.hpp"

namespace tve {

using VectorFn = std::function<Vec3(const Vec3&)>;

/// Solves -div D eps(u) = f with u = g on the boundary. Returns the full nodal field.
Vector lift_displacement(const FEAssembly& as, const VectorFn& g, const VectorFn& f, double* residual = nullptr);

/**
 * Lifted fields (u~, T~, theta~) for the data of one problem.
 *
 * Each displacement or body-force term is lifted once in space and scaled by
 * its own time factor, so u~ and u~_t are exact in time. theta~ solves
 * theta~_t - lap theta~ + alpha div u~_t = 0 with flux g_theta by implicit Euler
 * on a uniform grid and is linearly interpolated in between; theta~_t is the
 * step difference quotient.
 */
class Lifting {
public:
  Lifting(const FEAssembly& as, const ProblemData& data, double alpha, double t_end, double dt);

  const FEAssembly& assembly() const { return *as_; }
  bool has_displacement() const { return !terms_.empty(); }

  Vector displacement(double t) const;       // full nodal
  Vector displacement_rate(double t) const;  // full nodal
  QPTensorField strain(double t) const;
  QPTensorField strain_rate(double t) const;
  /// T~ = D eps(u~).
  QPTensorField stress(double t) const;
  /// Deviatoric part of T~, Mandel, 6 nq.
  Vector deviatoric_stress(double t) const;
  /// div u~_t at quadrature points.
  Vector divergence_rate(double t) const;

  Vector temperature(double t) const;  // nodal
  Vector temperature_rate(double t) const;
  Vector temperature_qp(double t) const;
  Vector temperature_rate_qp(double t) const;

  double step() const { return dt_; }
  int steps() const { return static_cast<int>(theta_.size()) - 1; }
  double t_end() const { return t_end_; }
  double momentum_residual() const { return momentum_residual_; }
  double heat_residual() const { return heat_residual_; }

private:
  struct Term {
    TimeFactor time;
    Vector u_full;
    Vector strain;      // 6 nq
    Vector dev_stress;  // 6 nq
    Vector div;         // nq
  };
  int interval(double t, double& frac) const;

  const FEAssembly* as_;
  double alpha_;
  double t_end_;
  double dt_;
  std::vector<Term> terms_;
  std::vector<Vector> theta_;     // nodal, per grid point
  std::vector<Vector> theta_qp_;  // qp, per grid point
  double momentum_residual_ = 0.0;
  double heat_residual_ = 0.0;
};

}  // namespace tve
