#include <algorithm>
#include "tve/tensor.hpp"

#include <cmath>
#include <sstream>

namespace tve {

namespace {

const double kSqrt2 = std::sqrt(2.0);

double mandel_weight(int idx) { return idx < 3 ? 1.0 : kSqrt2; }

int flat(int i, int j, int k, int l) { return ((i * 3 + j) * 3 + k) * 3 + l; }

}  // namespace

SymTensor SymTensor::from_matrix(const Mat3& a) {
  Vec6 m;
  for (int c = 0; c < 6; ++c) {
    const auto [i, j] = kMandelPairs[c];
    m[c] = mandel_weight(c) * 0.5 * (a(i, j) + a(j, i));
  }
  return from_mandel(m);
}

SymTensor SymTensor::diag(double a, double b, double c) {
  Vec6 m = Vec6::Zero();
  m[0] = a;
  m[1] = b;
  m[2] = c;
  return from_mandel(m);
}

double SymTensor::operator()(int i, int j) const {
  if (i == j) return m_[i];
  const int a = std::min(i, j);
  const int b = std::max(i, j);
  // (1,2)->3, (0,2)->4, (0,1)->5
  const int c = (a == 1) ? 3 : (b == 2 ? 4 : 5);
  return m_[c] / kSqrt2;
}

Mat3 SymTensor::matrix() const {
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = (*this)(i, j);
  return a;
}

SymTensor deviatoric(const SymTensor& a) { return SymTensor::from_mandel(deviatoric_mandel(a.mandel())); }

ElasticityTensor::ElasticityTensor(const Mat6& m) : m_(0.5 * (m + m.transpose())) {
  Eigen::SelfAdjointEigenSolver<Mat6> es(m_, Eigen::EigenvaluesOnly);
  c_min_ = es.eigenvalues()[0];
  c_max_ = es.eigenvalues()[5];
}

ElasticityTensor ElasticityTensor::isotropic(double lame_lambda, double lame_mu) {
  Mat6 m = Mat6::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = lame_lambda;
    m(i, i) += 2.0 * lame_mu;
  }
  for (int i = 3; i < 6; ++i) m(i, i) = 2.0 * lame_mu;
  return ElasticityTensor(m);
}

ElasticityTensor ElasticityTensor::from_components(const std::array<double, 81>& d) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double v = d[flat(i, j, k, l)];
          if (v != d[flat(j, i, k, l)] || v != d[flat(i, j, l, k)] || v != d[flat(k, l, i, j)]) {
            std::ostringstream os;
            os << "elasticity tensor violates index symmetry at (" << i + 1 << ',' << j + 1 << ',' << k + 1 << ','
               << l + 1 << ')';
            throw ValidationError(os.str());
          }
        }
  Mat6 m;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const auto [i, j] = kMandelPairs[a];
      const auto [k, l] = kMandelPairs[b];
      m(a, b) = mandel_weight(a) * mandel_weight(b) * d[flat(i, j, k, l)];
    }
  return ElasticityTensor(m);
}

ElasticityTensor ElasticityTensor::from_mandel(const Mat6& m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 0.0) throw ValidationError("Mandel matrix of D must be symmetric");
  return ElasticityTensor(m);
}

double ElasticityTensor::component(int i, int j, int k, int l) const {
  auto index = [](int p, int q) {
    if (p == q) return p;
    const int a = std::min(p, q);
    const int b = std::max(p, q);
    return (a == 1) ? 3 : (b == 2 ? 4 : 5);
  };
  const int a = index(i, j);
  const int b = index(k, l);
  return m_(a, b) / (mandel_weight(a) * mandel_weight(b));
}

SymTensor apply_D(const ElasticityTensor& d, const SymTensor& a) {
  return SymTensor::from_mandel(d.mandel() * a.mandel());
}

VoigtMatrix sqrt_D(const ElasticityTensor& d) {
  Eigen::SelfAdjointEigenSolver<Mat6> es(d.mandel());
  if (es.info() != Eigen::Success) throw Error("eigendecomposition of D failed");
  if (es.eigenvalues()[0] <= 0.0) {
    std::ostringstream os;
    os << "D is not positive definite (smallest eigenvalue " << es.eigenvalues()[0] << ")";
    throw ValidationError(os.str());
  }
  const Vec6 root = es.eigenvalues().cwiseSqrt();
  Mat6 s = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  return VoigtMatrix(0.5 * (s + s.transpose()));
}

double inner_D(const ElasticityTensor& d, const SymTensor& a, const SymTensor& b) {
  return (d.mandel() * a.mandel()).dot(b.mandel());
}

}  // namespace tve
