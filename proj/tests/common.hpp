#pragma once

#include <random>

#include "tve/tensor.hpp"

namespace tvetest {

inline tve::SymTensor random_sym(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  tve::Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = u(rng);
  return tve::SymTensor::from_matrix(0.5 * (a + a.transpose()));
}

inline tve::SymTensor random_dev(std::mt19937_64& rng, double scale = 1.0) {
  return tve::deviatoric(random_sym(rng, scale));
}

// Plain double contraction of two 3x3 matrices.
inline double frob(const tve::Mat3& a, const tve::Mat3& b) { return (a.array() * b.array()).sum(); }

}  // namespace tvetest
