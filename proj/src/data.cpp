#include "tve/data.hpp"

#include <cmath>
#include <random>

namespace tve {

double TimeFactor::value(double t) const { return a + b * t + c * std::sin(omega * t + phi); }
double TimeFactor::rate(double t) const { return b + c * omega * std::cos(omega * t + phi); }

Vec3 VectorTerm::spatial(const Vec3& x) const {
  Vec3 v(constant[0], constant[1], constant[2]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[i] += linear[3 * i + j] * x[j];
  return v;
}

bool VectorTerm::is_zero() const {
  for (double c : constant)
    if (c != 0.0) return false;
  for (double c : linear)
    if (c != 0.0) return false;
  return true;
}

bool FluxTerm::is_zero() const {
  for (double c : per_side)
    if (c != 0.0) return false;
  return true;
}

double ScalarField::operator()(const Vec3& x, const Vec3& extents) const {
  switch (kind) {
    case Kind::Constant:
      return offset;
    case Kind::Cosine: {
      double v = amplitude;
      for (int i = 0; i < 3; ++i) v *= std::cos(modes[i] * M_PI * x[i] / extents[i]);
      return offset + v;
    }
    case Kind::Gaussian: {
      double r2 = 0.0;
      for (int i = 0; i < 3; ++i) r2 += (x[i] - center[i]) * (x[i] - center[i]);
      return offset + amplitude * std::exp(-r2 / (width * width));
    }
  }
  return 0.0;
}

QPTensorField PlasticField::evaluate(const FEAssembly& as) const {
  const int nq = as.qp_count();
  QPTensorField out(nq);
  if (kind == Kind::Zero) return out;
  if (kind == Kind::Uniform) {
    Mat3 m;
    m << tensor[0], tensor[5], tensor[4], tensor[5], tensor[1], tensor[3], tensor[4], tensor[3], tensor[2];
    const SymTensor t = deviatoric(SymTensor::from_matrix(m));
    for (int q = 0; q < nq; ++q) out.set(q, t);
    return out;
  }
  if (modes < 1) throw ValidationError("random_smooth plastic field needs modes >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  struct Term {
    std::array<int, 3> ijk;
    Vec6 coeff;
  };
  std::vector<Term> terms;
  for (int k = 0; k < modes; ++k)
    for (int j = 0; j < modes; ++j)
      for (int i = 0; i < modes; ++i) {
        Vec6 c;
        for (int e = 0; e < 6; ++e) c[e] = uni(rng);
        c = deviatoric_mandel(c);
        c /= (1.0 + i + j + k) * std::sqrt(static_cast<double>(modes * modes * modes));
        terms.push_back({{i, j, k}, c});
      }
  const Vec3& ext = as.mesh().extents();
  for (int q = 0; q < nq; ++q) {
    const Vec3& x = as.qp_points()[q];
    Vec6 v = Vec6::Zero();
    for (const auto& t : terms)
      v += t.coeff * std::cos(t.ijk[0] * M_PI * x[0] / ext[0]) * std::cos(t.ijk[1] * M_PI * x[1] / ext[1]) *
           std::cos(t.ijk[2] * M_PI * x[2] / ext[2]);
    out.data().segment<6>(6 * q) = amplitude * v;
  }
  return out;
}

bool ProblemData::homogeneous() const {
  for (const auto& t : displacement_bc)
    if (!t.is_zero()) return false;
  for (const auto& t : body_force)
    if (!t.is_zero()) return false;
  for (const auto& t : heat_flux)
    if (!t.is_zero()) return false;
  return true;
}

double ProblemData::flux(const Vec3&, Side side, double t) const {
  double g = 0.0;
  for (const auto& f : heat_flux) g += f.per_side[static_cast<int>(side)] * f.time.value(t);
  return g;
}

Vector interpolate_nodal(const FEAssembly& as, const ScalarField& f) {
  Vector v(as.scalar_dim());
  for (int n = 0; n < as.scalar_dim(); ++n) v[n] = f(as.mesh().node_coords(n), as.mesh().extents());
  return v;
}

Vector evaluate_qp(const FEAssembly& as, const ScalarField& f) {
  Vector v(as.qp_count());
  for (int q = 0; q < as.qp_count(); ++q) v[q] = f(as.qp_points()[q], as.mesh().extents());
  return v;
}

}  // namespace tve
