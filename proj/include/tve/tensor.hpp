#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tve {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input or configuration rejected before any computation took place.
class ValidationError : public Error {
public:
  using Error::Error;
};

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Mandel index pairs: 11, 22, 33, 23, 13, 12.
inline constexpr std::array<std::array<int, 2>, 6> kMandelPairs{{{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

/**
 * Symmetric 3x3 tensor stored in Mandel coordinates
 * (a11, a22, a33, sqrt2 a23, sqrt2 a13, sqrt2 a12), so that the
 * Euclidean product of two coordinate vectors is the Frobenius product A:B.
 */
class SymTensor {
public:
  SymTensor() : m_(Vec6::Zero()) {}

  static SymTensor from_mandel(const Vec6& m) {
    SymTensor t;
    t.m_ = m;
    return t;
  }
  /// Symmetric part of an arbitrary matrix.
  static SymTensor from_matrix(const Mat3& a);
  static SymTensor diag(double a, double b, double c);
  static SymTensor identity() { return diag(1.0, 1.0, 1.0); }

  double operator()(int i, int j) const;
  const Vec6& mandel() const { return m_; }
  Mat3 matrix() const;

  double trace() const { return m_[0] + m_[1] + m_[2]; }
  double norm() const { return m_.norm(); }
  double contract(const SymTensor& other) const { return m_.dot(other.m_); }

  SymTensor& operator+=(const SymTensor& o) {
    m_ += o.m_;
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    m_ -= o.m_;
    return *this;
  }
  SymTensor& operator*=(double s) {
    m_ *= s;
    return *this;
  }
  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(double s, SymTensor a) { return a *= s; }
  friend SymTensor operator-(SymTensor a) { return a *= -1.0; }

private:
  Vec6 m_;
};

/// A : B.
inline double contract(const SymTensor& a, const SymTensor& b) { return a.contract(b); }

/// A - (tr A / 3) I.
SymTensor deviatoric(const SymTensor& a);

/// Deviatoric projection applied directly to a Mandel coordinate vector.
inline Vec6 deviatoric_mandel(const Vec6& m) {
  Vec6 r = m;
  const double mean = (m[0] + m[1] + m[2]) / 3.0;
  r[0] -= mean;
  r[1] -= mean;
  r[2] -= mean;
  return r;
}

/// 6x6 matrix of a four-index operator on S^3, in Mandel coordinates.
class VoigtMatrix {
public:
  VoigtMatrix() : m_(Mat6::Zero()) {}
  explicit VoigtMatrix(const Mat6& m) : m_(m) {}

  const Mat6& matrix() const { return m_; }
  SymTensor apply(const SymTensor& a) const { return SymTensor::from_mandel(m_ * a.mandel()); }

private:
  Mat6 m_;
};

/**
 * Constant elasticity operator D with d_ijkl = d_jikl = d_ijlk = d_klij.
 *
 * Positive definiteness is not enforced at construction; coercivity() reports
 * the smallest eigenvalue c_D of the Mandel matrix and callers that need an
 * inner product (sqrt_D, assembly) reject c_D <= 0.
 */
class ElasticityTensor {
public:
  /// Isotropic law 2 mu eps + lambda tr(eps) I.
  static ElasticityTensor isotropic(double lame_lambda, double lame_mu);
  /// Full anisotropic input d[((i*3+j)*3+k)*3+l]; index symmetries are checked exactly.
  static ElasticityTensor from_components(const std::array<double, 81>& d);
  static ElasticityTensor from_mandel(const Mat6& m);

  const Mat6& mandel() const { return m_; }
  /// d_ijkl, zero-based indices.
  double component(int i, int j, int k, int l) const;

  double coercivity() const { return c_min_; }
  double bound() const { return c_max_; }
  bool is_positive_definite() const { return c_min_ > 0.0; }

private:
  explicit ElasticityTensor(const Mat6& m);

  Mat6 m_;
  double c_min_ = 0.0;
  double c_max_ = 0.0;
};

/// sum_kl d_ijkl A_kl.
SymTensor apply_D(const ElasticityTensor& d, const SymTensor& a);

/// Symmetric positive definite square root of D in Mandel form. Throws if D is not positive definite.
VoigtMatrix sqrt_D(const ElasticityTensor& d);

/// (D A) : B.
double inner_D(const ElasticityTensor& d, const SymTensor& a, const SymTensor& b);

}  // namespace tve
