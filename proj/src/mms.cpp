#include "tve/mms.hpp"

#include <cmath>
#include <limits>

namespace tve {

namespace {

double l2_error_qp(const FEAssembly& as, const Vector& a, const Vector& b, int stride) {
  const Vector& w = as.qp_weights();
  double s = 0.0;
  for (int q = 0; q < as.qp_count(); ++q) s += w[q] * (a.segment(stride * q, stride) - b.segment(stride * q, stride)).squaredNorm();
  return std::sqrt(s);
}

}  // namespace

double MmsTable::min_theta_order() const {
  double order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rungs.size(); ++i)
    order = std::min(order, std::log(rungs[i - 1].error_theta / rungs[i].error_theta) / std::log(rungs[i - 1].h / rungs[i].h));
  return order;
}

bool MmsTable::monotone() const {
  for (std::size_t i = 1; i < rungs.size(); ++i) {
    const auto& a = rungs[i - 1];
    const auto& b = rungs[i];
    if (!(b.error_theta < a.error_theta) || !(b.error_eps_p < a.error_eps_p)) return false;
    if (a.error_u > 0.0 && !(b.error_u < a.error_u)) return false;
  }
  return true;
}

CsvTable MmsTable::to_csv() const {
  CsvTable t;
  t.header = {"n1", "n2", "n3", "k", "l_theta", "l_zeta", "h", "err_theta", "err_u", "err_eps_p", "completed"};
  for (const auto& r : rungs)
    t.rows.push_back({double(r.cells[0]), double(r.cells[1]), double(r.cells[2]), double(r.k), double(r.l_theta),
                      double(r.l_zeta), r.h, r.error_theta, r.error_u, r.error_eps_p, r.completed ? 1.0 : 0.0});
  return t;
}

MmsTable mms_constant(const IntegratorConfig& cfg) {
  MmsTable table;
  table.name = "constant";
  const FEAssembly as = assemble(BoxMesh(Vec3(1.0, 0.8, 0.6), {3, 3, 3}), ElasticityTensor::isotropic(1.0, 1.0));
  const BasisSet bases = build_bases(as, 6, 6);
  const Lifting lifting(as, ProblemData{}, 0.1, 1.0, 0.01);
  CouplingParams cp;
  cp.expansion = 1.0;
  cp.theta_ref = 0.1;
  const GalerkinModel model(as, bases, ConstitutiveLaw::norton_hoff(3.0), cp, lifting, cfg.k_trunc);
  const double c = 0.7;
  const Vector xi0 = model.initial_state(Vector::Constant(as.qp_count(), c), QPTensorField(as.qp_count()));
  const Trajectory traj = integrate(model, xi0, uniform_times(1.0, 4), cfg);
  const ReconstructedFields r = model.reconstruct(traj.last_time, traj.last_state);
  MmsRung rung;
  rung.cells = {3, 3, 3};
  rung.k = model.k();
  rung.l_theta = model.l_theta();
  rung.l_zeta = model.l_zeta();
  rung.h = 1.0 / 3.0;
  rung.completed = traj.completed;
  rung.error_theta = l2_error_qp(as, r.theta_qp, Vector::Constant(as.qp_count(), c), 1);
  rung.error_u = std::sqrt(r.u.squaredNorm());
  rung.error_eps_p = l2_error_qp(as, r.eps_p.data(), Vector::Zero(6 * as.qp_count()), 6);
  table.rungs.push_back(rung);
  return table;
}

MmsTable mms_heat(const std::vector<int>& ns, double t_end, const IntegratorConfig& cfg) {
  MmsTable table;
  table.name = "heat";
  for (int n : ns) {
    const Vec3 ext(1.0, 0.25, 0.25);
    const FEAssembly as = assemble(BoxMesh(ext, {n, 2, 2}), ElasticityTensor::isotropic(1.0, 1.0));
    const BasisSet bases = build_bases(as, 0, as.scalar_dim(), {}, 0);
    const Lifting lifting(as, ProblemData{}, 0.1, t_end, t_end);
    CouplingParams cp;
    cp.theta_ref = 0.1;
    Sources src;
    src.heat = [](const Vec3& x, double t) { return (M_PI * M_PI - 1.0) * std::cos(M_PI * x[0]) * std::exp(-t); };
    const GalerkinModel model(as, bases, ConstitutiveLaw::zero(2.0), cp, lifting, cfg.k_trunc, src);
    Vector theta0(as.qp_count());
    for (int q = 0; q < as.qp_count(); ++q) theta0[q] = std::cos(M_PI * as.qp_points()[q][0]);
    const Vector xi0 = model.initial_state(theta0, QPTensorField(as.qp_count()));
    const Trajectory traj = integrate(model, xi0, uniform_times(t_end, 4), cfg);
    const ReconstructedFields r = model.reconstruct(traj.last_time, traj.last_state);
    Vector exact(as.qp_count());
    for (int q = 0; q < as.qp_count(); ++q) exact[q] = std::cos(M_PI * as.qp_points()[q][0]) * std::exp(-traj.last_time);
    MmsRung rung;
    rung.cells = {n, 2, 2};
    rung.k = 0;
    rung.l_theta = model.l_theta();
    rung.h = 1.0 / n;
    rung.completed = traj.completed;
    rung.error_theta = l2_error_qp(as, r.theta_qp, exact, 1);
    table.rungs.push_back(rung);
  }
  return table;
}

MmsTable mms_coupled(const std::vector<std::pair<int, int>>& ladder, double t_end, const IntegratorConfig& cfg) {
  MmsTable table;
  table.name = "coupled";
  const Vec3 ext(1.0, 0.8, 0.6);
  const ElasticityTensor d = ElasticityTensor::isotropic(1.0, 1.0);
  const ConstitutiveLaw law = ConstitutiveLaw::norton_hoff(2.0);
  CouplingParams cp;
  cp.expansion = 1.0;
  cp.theta_ref = 0.1;
  const double alpha = cp.alpha();

  const double theta_c = 0.2, amp = 0.1;
  auto a_of = [](double t) { return 0.05 * (1.0 + t); };
  const double a_rate = 0.05;
  Mat3 z0m;
  z0m << 0.1, 0.0, 0.0, 0.0, -0.1, 0.05, 0.0, 0.05, 0.0;
  const Vec6 z0 = SymTensor::from_matrix(z0m).mandel();
  auto z_of = [](double t) { return 1.0 + 0.5 * t; };
  const double z_rate = 0.5;

  auto bubble_grad = [ext](const Vec3& x) {
    Vec3 s, c;
    for (int i = 0; i < 3; ++i) {
      s[i] = std::sin(M_PI * x[i] / ext[i]);
      c[i] = M_PI / ext[i] * std::cos(M_PI * x[i] / ext[i]);
    }
    return Vec3(c[0] * s[1] * s[2], s[0] * c[1] * s[2], s[0] * s[1] * c[2]);
  };
  auto bubble = [ext](const Vec3& x) {
    return std::sin(M_PI * x[0] / ext[0]) * std::sin(M_PI * x[1] / ext[1]) * std::sin(M_PI * x[2] / ext[2]);
  };
  // eps(phi e1) for scalar phi with gradient g.
  auto strain_e1 = [](const Vec3& g) {
    Mat3 m = Mat3::Zero();
    m.row(0) += 0.5 * g.transpose();
    m.col(0) += 0.5 * g;
    return SymTensor::from_matrix(m).mandel();
  };
  auto theta_star = [=](const Vec3& x, double t) { return theta_c + amp * std::cos(M_PI * x[0] / ext[0]) * std::exp(-t); };
  auto td_star = [=](double t) { return Vec6(-deviatoric_mandel(d.mandel() * (z_of(t) * z0))); };

  Sources src;
  src.plastic = [=](const Vec3& x, double t) {
    const Vec6 rate = a_rate * strain_e1(bubble_grad(x)) + z_rate * z0;
    return Vec6(rate - law.evaluate(theta_star(x, t), td_star(t)));
  };
  src.heat = [=](const Vec3& x, double t) {
    const double cs = amp * std::cos(M_PI * x[0] / ext[0]) * std::exp(-t);
    const double k2 = (M_PI / ext[0]) * (M_PI / ext[0]);
    const double div_rate = a_rate * bubble_grad(x)[0];
    const Vec6 td = td_star(t);
    return -cs + k2 * cs + alpha * div_rate - td.dot(law.evaluate(theta_star(x, t), td));
  };

  for (const auto& [n, l] : ladder) {
    const FEAssembly as = assemble(BoxMesh(ext, {n, n, n}), d);
    const BasisSet bases = build_bases(as, as.reduced_dim(), l);
    const Lifting lifting(as, ProblemData{}, alpha, t_end, t_end);
    const GalerkinModel model(as, bases, law, cp, lifting, cfg.k_trunc, src);
    const int nq = as.qp_count();
    Vector theta0(nq);
    QPTensorField eps0(nq);
    for (int q = 0; q < nq; ++q) {
      const Vec3& x = as.qp_points()[q];
      theta0[q] = theta_star(x, 0.0);
      eps0.data().segment<6>(6 * q) = a_of(0.0) * strain_e1(bubble_grad(x)) + z_of(0.0) * z0;
    }
    const Vector xi0 = model.initial_state(theta0, eps0);
    const Trajectory traj = integrate(model, xi0, uniform_times(t_end, 4), cfg);
    const double tf = traj.last_time;
    const ReconstructedFields r = model.reconstruct(tf, traj.last_state);

    Vector theta_exact(nq), eps_exact(6 * nq);
    for (int q = 0; q < nq; ++q) {
      const Vec3& x = as.qp_points()[q];
      theta_exact[q] = theta_star(x, tf);
      eps_exact.segment<6>(6 * q) = a_of(tf) * strain_e1(bubble_grad(x)) + z_of(tf) * z0;
    }
    Vector u_exact = Vector::Zero(as.full_vector_dim());
    for (int node = 0; node < as.mesh().node_count(); ++node) u_exact[3 * node] = a_of(tf) * bubble(as.mesh().node_coords(node));
    const Vector e = as.restrict_to_interior(r.u - u_exact);

    MmsRung rung;
    rung.cells = {n, n, n};
    rung.k = model.k();
    rung.l_theta = model.l_theta();
    rung.l_zeta = model.l_zeta();
    rung.h = ext[0] / n;
    rung.completed = traj.completed;
    rung.error_theta = l2_error_qp(as, r.theta_qp, theta_exact, 1);
    rung.error_u = std::sqrt(e.dot(as.mass_u() * e));
    rung.error_eps_p = l2_error_qp(as, r.eps_p.data(), eps_exact, 6);
    table.rungs.push_back(rung);
  }
  return table;
}

}  // namespace tve
