#include "tve/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace tve {

namespace odeint = boost::numeric::odeint;

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Symmetric:
      return "symmetric";
    case Variant::Broken:
      return "broken";
    case Variant::Nonlinear:
      return "nonlinear";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "symmetric") return Variant::Symmetric;
  if (s == "broken") return Variant::Broken;
  if (s == "nonlinear") return Variant::Nonlinear;
  throw ValidationError("unknown variant '" + s + "' (expected symmetric, broken or nonlinear)");
}

void IntegratorConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ValidationError("integrator tolerances must be positive");
  if (!(dt > 0.0)) throw ValidationError("integrator step must be positive");
  if (!(min_step > 0.0) || !(max_step >= min_step)) throw ValidationError("integrator step bounds are invalid");
  if (!(k_trunc > 0.0)) throw ValidationError("truncation level must be positive");
}

namespace {

Matrix deviatoric_columns(const Matrix& m) {
  Matrix out = m;
  const int nq = static_cast<int>(m.rows() / 6);
  for (int j = 0; j < m.cols(); ++j)
    for (int q = 0; q < nq; ++q) out.col(j).segment<6>(6 * q) = deviatoric_mandel(m.col(j).segment<6>(6 * q));
  return out;
}

Matrix apply_D_columns(const FEAssembly& as, const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  const Mat6& d = as.elasticity().mandel();
  const int nq = static_cast<int>(m.rows() / 6);
  for (int j = 0; j < m.cols(); ++j)
    for (int q = 0; q < nq; ++q) out.col(j).segment<6>(6 * q) = d * m.col(j).segment<6>(6 * q);
  return out;
}

Vector weight_tensor(const Vector& w, const Vector& f) {
  Vector out(f.size());
  for (Eigen::Index q = 0; q < w.size(); ++q) out.segment<6>(6 * q) = w[q] * f.segment<6>(6 * q);
  return out;
}

void check_finite(const Vector& v, const char* what, double t) {
  if (!v.allFinite()) {
    std::ostringstream os;
    os << "non-finite " << what << " at t = " << t;
    throw Error(os.str());
  }
}

}  // namespace

GalerkinModel::GalerkinModel(const FEAssembly& as, const BasisSet& bases, ConstitutiveLaw law,
                             CouplingParams coupling, const Lifting& lifting, double k_trunc, Sources sources)
    : as_(&as),
      bases_(&bases),
      law_(std::move(law)),
      coupling_(coupling),
      lifting_(&lifting),
      trunc_(k_trunc),
      sources_(std::move(sources)),
      lt_(bases.temperature.size()),
      k_(bases.displacement.size()),
      lz_(bases.complement.size()) {
  if (&lifting.assembly() != &as) throw ValidationError("lifting was built on a different assembly");
  dew_ = apply_D_columns(as, bases.displacement.strains);
  dew_dev_ = deviatoric_columns(dew_);
  dz_ = apply_D_columns(as, bases.complement.fields);
  dz_dev_ = deviatoric_columns(dz_);
  div_ = bases.displacement.divergence;
  vals_ = bases.temperature.values;
  coupling_b_ = bases.coupling;
  weights_ = as.qp_weights();
}

Evaluation GalerkinModel::evaluate(double t, const Vector& xi) const {
  if (xi.size() != size()) throw ValidationError("state has wrong dimension");
  const int nq = as_->qp_count();
  const Vector beta = xi.segment(0, lt_);
  const Vector gamma = xi.segment(lt_, k_);
  const Vector delta = xi.segment(lt_ + k_, lz_);
  const bool pointwise = coupling_.variant != Variant::Symmetric;
  const double alpha = coupling_.alpha();

  Evaluation ev;
  const Vector theta_lift = lifting_->temperature_qp(t);
  ev.theta = theta_lift + vals_ * beta;
  if (pointwise)
    ev.thermal = (coupling_.expansion * (ev.theta.array() - coupling_.theta_R)).matrix();
  else
    ev.thermal = Vector::Constant(nq, alpha);

  ev.a = gamma;
  if (pointwise) ev.a += div_.transpose() * weights_.cwiseProduct(ev.thermal);

  ev.td = dew_dev_ * (ev.a - gamma) - dz_dev_ * delta;
  if (lifting_->has_displacement()) ev.td += lifting_->deviatoric_stress(t);

  ev.g.resize(6 * nq);
  ev.heat_source.resize(nq);
  Vector src_trunc(nq);
  for (int q = 0; q < nq; ++q) {
    const Vec6 td = ev.td.segment<6>(6 * q);
    const Vec6 g = law_.evaluate(ev.theta[q], td);
    ev.g.segment<6>(6 * q) = g;
    const double h = td.dot(g);
    ev.heat_source[q] = h;
    const double ht = trunc_(h);
    if (ht != h) ev.truncation_active = true;
    src_trunc[q] = ht;
  }
  ev.g_total = ev.g;
  if (sources_.plastic || sources_.heat) {
    const auto& pts = as_->qp_points();
    for (int q = 0; q < nq; ++q) {
      if (sources_.plastic) ev.g_total.segment<6>(6 * q) += sources_.plastic(pts[q], t);
      if (sources_.heat) src_trunc[q] += sources_.heat(pts[q], t);
    }
  }
  check_finite(ev.g_total, "flow rule value", t);

  const Vector gw = weight_tensor(weights_, ev.g_total);
  ev.gamma_dot = dew_.transpose() * gw;
  ev.delta_dot = dz_.transpose() * gw;

  // Heat equation: beta' + mu beta + C a' + E = S.
  Vector rhs = vals_.transpose() * weights_.cwiseProduct(src_trunc);
  rhs -= bases_->temperature.eigenvalues.cwiseProduct(beta);
  Vector heat_coeff(nq);  // pointwise coupling c(x) in front of div u_t
  switch (coupling_.variant) {
    case Variant::Symmetric:
      heat_coeff.setConstant(alpha);
      break;
    case Variant::Broken:
      heat_coeff.setConstant(coupling_.broken_gamma);
      break;
    case Variant::Nonlinear:
      heat_coeff = ev.thermal;
      break;
  }
  if (lifting_->has_displacement() && coupling_.variant != Variant::Symmetric) {
    const Vector mismatch = (heat_coeff.array() - alpha).matrix();
    rhs -= vals_.transpose() * weights_.cwiseProduct(mismatch.cwiseProduct(lifting_->divergence_rate(t)));
  }
  Matrix c;  // l_theta x k
  if (coupling_.variant == Variant::Nonlinear)
    c = vals_.transpose() * weights_.cwiseProduct(heat_coeff).asDiagonal() * div_;
  else
    c = heat_coeff[0] * coupling_b_.transpose();

  if (!pointwise) {
    ev.a_dot = ev.gamma_dot;
    ev.beta_dot = rhs - c * ev.a_dot;
  } else {
    const Vector theta_lift_rate = lifting_->temperature_rate_qp(t);
    const Vector drift = ev.gamma_dot + coupling_.expansion * (div_.transpose() * weights_.cwiseProduct(theta_lift_rate));
    const Matrix sys = Matrix::Identity(lt_, lt_) + coupling_.expansion * c * coupling_b_;
    Eigen::PartialPivLU<Matrix> lu(sys);
    ev.beta_dot = lu.solve(rhs - c * drift);
    ev.a_dot = drift + coupling_.expansion * coupling_b_ * ev.beta_dot;
  }
  check_finite(ev.beta_dot, "temperature rate", t);
  return ev;
}

Vector GalerkinModel::rhs(double t, const Vector& xi) const {
  const Evaluation ev = evaluate(t, xi);
  Vector d(size());
  d << ev.beta_dot, ev.gamma_dot, ev.delta_dot;
  return d;
}

Vector GalerkinModel::initial_state(const Vector& theta0_qp, const QPTensorField& eps_p0) const {
  if (theta0_qp.size() != as_->qp_count() || eps_p0.size() != as_->qp_count())
    throw ValidationError("initial fields have wrong length");
  Vector clipped(theta0_qp.size());
  for (Eigen::Index q = 0; q < clipped.size(); ++q) clipped[q] = trunc_(theta0_qp[q]);
  const Vector ew = weight_tensor(weights_, eps_p0.data());
  Vector xi(size());
  xi << vals_.transpose() * weights_.cwiseProduct(clipped), dew_.transpose() * ew, dz_.transpose() * ew;
  return xi;
}

Vector GalerkinModel::plastic_strain(const Vector& xi) const {
  return bases_->displacement.strains * xi.segment(lt_, k_) + bases_->complement.fields * xi.segment(lt_ + k_, lz_);
}

Vector GalerkinModel::project(const Vector& field) const {
  const Vector fw = weight_tensor(weights_, field);
  return bases_->displacement.strains * (dew_.transpose() * fw) + bases_->complement.fields * (dz_.transpose() * fw);
}

ReconstructedFields GalerkinModel::reconstruct(double t, const Vector& xi) const {
  const Evaluation ev = evaluate(t, xi);
  const int nq = as_->qp_count();
  ReconstructedFields r;
  r.t = t;
  const Vector gamma = xi.segment(lt_, k_);
  const Vector delta = xi.segment(lt_ + k_, lz_);
  const auto& db = bases_->displacement;
  r.u = lifting_->displacement(t) + as_->expand_reduced(db.vectors * ev.a);
  r.u_rate = lifting_->displacement_rate(t) + as_->expand_reduced(db.vectors * ev.a_dot);
  r.theta = lifting_->temperature(t) + bases_->temperature.vectors * xi.segment(0, lt_);
  r.theta_qp = ev.theta;
  r.thermal = ev.thermal;
  r.eps_p = QPTensorField(plastic_strain(xi));
  Vector stress = dew_ * (ev.a - gamma) - dz_ * delta;
  if (lifting_->has_displacement()) stress += lifting_->stress(t).data();
  r.stress = QPTensorField(stress);
  r.deviatoric = QPTensorField(Vector(6 * nq));
  r.cauchy = QPTensorField(Vector(6 * nq));
  for (int q = 0; q < nq; ++q) {
    const Vec6 s = stress.segment<6>(6 * q);
    r.deviatoric.data().segment<6>(6 * q) = deviatoric_mandel(s);
    Vec6 sig = s;
    sig.head<3>().array() -= ev.thermal[q];
    r.cauchy.data().segment<6>(6 * q) = sig;
  }
  return r;
}

std::vector<double> uniform_times(double t_end, int intervals) {
  if (intervals < 1) throw ValidationError("need at least one sample interval");
  std::vector<double> t(intervals + 1);
  for (int i = 0; i <= intervals; ++i) t[i] = t_end * i / intervals;
  t.back() = t_end;
  return t;
}

Trajectory integrate(const GalerkinModel& model, const Vector& xi0, const std::vector<double>& times,
                     const IntegratorConfig& config) {
  config.validate();
  if (times.size() < 2) throw ValidationError("need at least two sample times");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ValidationError("sample times must be strictly increasing");

  using State = std::vector<double>;
  const int n = model.size();
  auto system = [&model, n](const State& x, State& dxdt, double t) {
    const Vector d = model.rhs(t, Eigen::Map<const Vector>(x.data(), n));
    dxdt.assign(d.data(), d.data() + n);
  };

  Trajectory traj;
  State x(xi0.data(), xi0.data() + n);
  double t = times.front();
  traj.times.push_back(t);
  traj.states.push_back(xi0);
  traj.last_time = t;
  traj.last_state = xi0;

  try {
    if (config.method == IntegratorConfig::Method::RK4) {
      odeint::runge_kutta4<State> stepper;
      for (std::size_t i = 1; i < times.size(); ++i) {
        const double span = times[i] - t;
        const int m = std::max(1, static_cast<int>(std::ceil(span / config.dt - 1e-9)));
        const double h = span / m;
        for (int s = 0; s < m; ++s) {
          stepper.do_step(system, x, t, h);
          t = (s + 1 == m) ? times[i] : t + h;
          ++traj.steps;
        }
        traj.times.push_back(t);
        traj.states.emplace_back(Eigen::Map<const Vector>(x.data(), n));
        traj.last_time = t;
        traj.last_state = traj.states.back();
      }
    } else {
      auto stepper = odeint::make_controlled(config.abs_tol, config.rel_tol, odeint::runge_kutta_dopri5<State>());
      double dt = std::min(config.dt, config.max_step);
      for (std::size_t i = 1; i < times.size(); ++i) {
        const double target = times[i];
        while (t < target) {
          const double remaining = target - t;
          double h = std::min({dt, config.max_step, remaining});
          const bool last = h >= remaining;
          const double t_before = t;
          const double prev_dt = dt;
          if (stepper.try_step(system, x, t, h) == odeint::success) {
            ++traj.steps;
            if (last) t = target;
            dt = std::max(last ? std::max(prev_dt, h) : h, config.min_step);
            traj.last_time = t;
            traj.last_state = Eigen::Map<const Vector>(x.data(), n);
          } else {
            ++traj.rejected;
            t = t_before;
            if (h < config.min_step) {
              std::ostringstream os;
              os << "step size underflow at t = " << t << " (h = " << h << ")";
              throw Error(os.str());
            }
            dt = h;
          }
        }
        traj.times.push_back(target);
        traj.states.emplace_back(Eigen::Map<const Vector>(x.data(), n));
      }
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    traj.completed = false;
    traj.message = e.what();
  }
  return traj;
}

PlasticRecovery recover_plastic_strain(const GalerkinModel& model, const Trajectory& traj) {
  PlasticRecovery out;
  const std::size_t ns = traj.times.size();
  if (ns < 3) throw ValidationError("plastic-strain recovery needs at least three samples");
  const double h = traj.times[1] - traj.times[0];
  for (std::size_t i = 1; i < ns; ++i)
    if (std::abs(traj.times[i] - traj.times[i - 1] - h) > 1e-9 * (1.0 + std::abs(h)))
      throw ValidationError("plastic-strain recovery needs a uniform sample grid");

  const int nq = model.assembly().qp_count();
  std::vector<Vector> g(ns);
  for (std::size_t i = 0; i < ns; ++i) g[i] = model.evaluate(traj.times[i], traj.states[i]).g_total;

  const Vector eps0 = model.plastic_strain(traj.states.front());
  Vector simpson = Vector::Zero(6 * nq);
  auto per_qp_max = [nq](const Vector& v, bool trace) {
    double m = 0.0;
    for (int q = 0; q < nq; ++q) {
      const Vec6 s = v.segment<6>(6 * q);
      m = std::max(m, trace ? std::abs(s[0] + s[1] + s[2]) : s.norm());
    }
    return m;
  };
  for (std::size_t j = 0; j < ns; ++j) {
    const Vector coef = model.plastic_strain(traj.states[j]);
    out.max_trace_drift = std::max(out.max_trace_drift, per_qp_max(coef - eps0, true));
    if (j == 0 || j % 2 != 0) continue;
    simpson += h / 3.0 * (g[j - 2] + 4.0 * g[j - 1] + g[j]);
    const Vector recovered = eps0 + simpson;
    const double raw = per_qp_max(recovered - coef, false);
    const double proj = per_qp_max(model.project(recovered) - coef, false);
    out.times.push_back(traj.times[j]);
    out.raw_deviation.push_back(raw);
    out.projected_deviation.push_back(proj);
    out.max_raw = std::max(out.max_raw, raw);
    out.max_projected = std::max(out.max_projected, proj);
  }
  return out;
}

}  // namespace tve
