#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tve/assembly.hpp"

namespace tve {

/// tau(t) = a + b t + c sin(omega t + phi), with its exact derivative.
struct TimeFactor {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double omega = 0.0;
  double phi = 0.0;

  double value(double t) const;
  double rate(double t) const;
  bool operator==(const TimeFactor&) const = default;
};

/// Vector datum (c + A x) tau(t). A is row-major.
struct VectorTerm {
  std::array<double, 3> constant{};
  std::array<double, 9> linear{};
  TimeFactor time{};

  Vec3 spatial(const Vec3& x) const;
  bool is_zero() const;
  bool operator==(const VectorTerm&) const = default;
};

/// Neumann flux g_theta = per_side[side] tau(t).
struct FluxTerm {
  std::array<double, 6> per_side{};
  TimeFactor time{};

  bool is_zero() const;
  bool operator==(const FluxTerm&) const = default;
};

/// Closed-form scalar field on the box.
struct ScalarField {
  enum class Kind { Constant, Cosine, Gaussian };
  Kind kind = Kind::Constant;
  double offset = 0.0;
  double amplitude = 0.0;
  std::array<int, 3> modes{};          // Cosine: cos(i pi x/L1) cos(j pi y/L2) cos(k pi z/L3)
  std::array<double, 3> center{};      // Gaussian
  double width = 1.0;                  // Gaussian

  double operator()(const Vec3& x, const Vec3& extents) const;
  bool operator==(const ScalarField&) const = default;
};

/// Initial plastic strain; always projected to its traceless part.
struct PlasticField {
  enum class Kind { Zero, Uniform, RandomSmooth };
  Kind kind = Kind::Zero;
  std::array<double, 6> tensor{};  // Uniform: components 11, 22, 33, 23, 13, 12
  double amplitude = 0.0;          // RandomSmooth: max pointwise norm scale
  int modes = 2;                   // RandomSmooth: cosine modes 0..modes-1 per axis
  std::uint64_t seed = 1;

  QPTensorField evaluate(const FEAssembly& as) const;
  bool operator==(const PlasticField&) const = default;
};

/// Boundary, forcing and initial data of one problem.
struct ProblemData {
  std::vector<VectorTerm> displacement_bc;
  std::vector<VectorTerm> body_force;
  std::vector<FluxTerm> heat_flux;
  ScalarField theta0{};
  ScalarField theta_lift0{};
  PlasticField plastic0{};

  /// f = 0, g = 0, g_theta = 0.
  bool homogeneous() const;
  double flux(const Vec3& x, Side side, double t) const;
  bool operator==(const ProblemData&) const = default;
};

/// Nodal interpolation of a scalar field.
Vector interpolate_nodal(const FEAssembly& as, const ScalarField& f);
/// Values of a scalar field at quadrature points.
Vector evaluate_qp(const FEAssembly& as, const ScalarField& f);

}  // namespace tve
