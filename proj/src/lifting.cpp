#include "tve/lifting.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

namespace tve {

Vector lift_displacement(const FEAssembly& as, const VectorFn& g, const VectorFn& f, double* residual) {
  const BoxMesh& mesh = as.mesh();
  Vector ub = Vector::Zero(as.full_vector_dim());
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (!mesh.is_boundary_node(n)) continue;
    const Vec3 v = g(mesh.node_coords(n));
    for (int c = 0; c < 3; ++c) ub[3 * n + c] = v[c];
  }
  const Vector rhs = as.restrict_to_interior(as.load_full(f) - as.stiffness_u_full() * ub);
  Vector out = ub;
  if (as.reduced_dim() > 0) {
    Eigen::SimplicialLDLT<SparseMatrix> solver(as.stiffness_u());
    if (solver.info() != Eigen::Success) throw Error("elasticity lifting: factorization failed");
    const Vector ui = solver.solve(rhs);
    if (residual) {
      const double r = (as.stiffness_u() * ui - rhs).norm();
      *residual = rhs.norm() > 0.0 ? r / rhs.norm() : r;
    }
    out += as.expand_reduced(ui);
  } else if (residual) {
    *residual = 0.0;
  }
  return out;
}

Lifting::Lifting(const FEAssembly& as, const ProblemData& data, double alpha, double t_end, double dt)
    : as_(&as), alpha_(alpha), t_end_(t_end) {
  if (!(dt > 0.0)) throw ValidationError("lifting step must be positive");
  if (!(t_end > 0.0)) throw ValidationError("lifting horizon must be positive");
  const VectorFn zero = [](const Vec3&) { return Vec3::Zero().eval(); };

  auto add_term = [&](const VectorTerm& vt, bool boundary) {
    if (vt.is_zero()) return;
    const VectorFn field = [vt](const Vec3& x) { return vt.spatial(x); };
    double res = 0.0;
    Term t;
    t.time = vt.time;
    t.u_full = boundary ? lift_displacement(as, field, zero, &res) : lift_displacement(as, zero, field, &res);
    momentum_residual_ = std::max(momentum_residual_, res);
    t.strain = as.strain_full(t.u_full).data();
    t.dev_stress = as.apply_D(QPTensorField(t.strain)).data();
    for (int q = 0; q < as.qp_count(); ++q)
      t.dev_stress.segment<6>(6 * q) = deviatoric_mandel(t.dev_stress.segment<6>(6 * q));
    t.div = as.divergence_full(t.u_full);
    terms_.push_back(std::move(t));
  };
  for (const auto& vt : data.displacement_bc) add_term(vt, true);
  for (const auto& vt : data.body_force) add_term(vt, false);

  const int n = std::max(1, static_cast<int>(std::ceil(t_end / dt - 1e-9)));
  dt_ = t_end / n;

  std::vector<Vector> div_loads;
  for (const auto& t : terms_) div_loads.push_back(as.scalar_load(t.div));
  std::vector<std::pair<Vector, TimeFactor>> flux_loads;
  for (const auto& ft : data.heat_flux) {
    if (ft.is_zero()) continue;
    const FluxTerm copy = ft;
    flux_loads.emplace_back(
        boundary_load(as, [copy](const Vec3&, Side s) { return copy.per_side[static_cast<int>(s)]; }), ft.time);
  }

  theta_.reserve(n + 1);
  theta_.push_back(interpolate_nodal(as, data.theta_lift0));
  const SparseMatrix& m = as.mass_theta();
  const SparseMatrix a = m + dt_ * as.stiffness_theta();
  Eigen::SimplicialLDLT<SparseMatrix> solver(a);
  if (solver.info() != Eigen::Success) throw Error("heat lifting: factorization failed");
  for (int j = 0; j < n; ++j) {
    const double t1 = (j + 1) * dt_;
    Vector rhs = m * theta_.back();
    for (const auto& [load, tf] : flux_loads) rhs += dt_ * tf.value(t1) * load;
    for (std::size_t i = 0; i < terms_.size(); ++i) rhs -= dt_ * alpha_ * terms_[i].time.rate(t1) * div_loads[i];
    Vector next = solver.solve(rhs);
    const double r = (a * next - rhs).norm();
    heat_residual_ = std::max(heat_residual_, rhs.norm() > 0.0 ? r / rhs.norm() : r);
    theta_.push_back(std::move(next));
  }
  theta_qp_.reserve(theta_.size());
  for (const auto& th : theta_) theta_qp_.push_back(as.scalar_at_qp(th));
}

int Lifting::interval(double t, double& frac) const {
  const int n = steps();
  const double s = std::clamp(t, 0.0, t_end_) / dt_;
  int j = static_cast<int>(std::floor(s));
  if (j >= n) j = n - 1;
  if (j < 0) j = 0;
  frac = s - j;
  return j;
}

Vector Lifting::displacement(double t) const {
  Vector u = Vector::Zero(as_->full_vector_dim());
  for (const auto& term : terms_) u += term.time.value(t) * term.u_full;
  return u;
}

Vector Lifting::displacement_rate(double t) const {
  Vector u = Vector::Zero(as_->full_vector_dim());
  for (const auto& term : terms_) u += term.time.rate(t) * term.u_full;
  return u;
}

QPTensorField Lifting::strain(double t) const {
  QPTensorField e(as_->qp_count());
  for (const auto& term : terms_) e.data() += term.time.value(t) * term.strain;
  return e;
}

QPTensorField Lifting::strain_rate(double t) const {
  QPTensorField e(as_->qp_count());
  for (const auto& term : terms_) e.data() += term.time.rate(t) * term.strain;
  return e;
}

QPTensorField Lifting::stress(double t) const { return as_->apply_D(strain(t)); }

Vector Lifting::deviatoric_stress(double t) const {
  Vector s = Vector::Zero(6 * as_->qp_count());
  for (const auto& term : terms_) s += term.time.value(t) * term.dev_stress;
  return s;
}

Vector Lifting::divergence_rate(double t) const {
  Vector d = Vector::Zero(as_->qp_count());
  for (const auto& term : terms_) d += term.time.rate(t) * term.div;
  return d;
}

Vector Lifting::temperature(double t) const {
  double f;
  const int j = interval(t, f);
  return (1.0 - f) * theta_[j] + f * theta_[j + 1];
}

Vector Lifting::temperature_rate(double t) const {
  double f;
  const int j = interval(t, f);
  return (theta_[j + 1] - theta_[j]) / dt_;
}

Vector Lifting::temperature_qp(double t) const {
  double f;
  const int j = interval(t, f);
  return (1.0 - f) * theta_qp_[j] + f * theta_qp_[j + 1];
}

Vector Lifting::temperature_rate_qp(double t) const {
  double f;
  const int j = interval(t, f);
  return (theta_qp_[j + 1] - theta_qp_[j]) / dt_;
}

}  // namespace tve
