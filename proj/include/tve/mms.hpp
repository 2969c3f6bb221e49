#pragma once

#include <array>
#include <string>
#include <vector>

#include "tve/galerkin.hpp"
#include "tve/io.hpp"

namespace tve {

struct MmsRung {
  std::array<int, 3> cells{};
  int k = 0;
  int l_theta = 0;
  int l_zeta = 0;
  double h = 0.0;
  double error_theta = 0.0;  // L2 at final time
  double error_u = 0.0;      // discrete L2 against the nodal interpolant
  double error_eps_p = 0.0;  // L2 at final time
  bool completed = true;
};

struct MmsTable {
  std::string name;
  std::vector<MmsRung> rungs;

  /// Smallest observed order of error_theta in h between consecutive rungs.
  double min_theta_order() const;
  /// Every error column strictly decreases from rung to rung.
  bool monotone() const;
  CsvTable to_csv() const;
};

/// u* = 0, theta* = const, eps^p* = 0, no sources.
MmsTable mms_constant(const IntegratorConfig& cfg = {});

/**
 * Heat only: theta* = cos(pi x1) e^{-t} on [0,1] x [0,1/4]^2 with G = 0 and
 * source (pi^2 - 1) cos(pi x1) e^{-t}; meshes n x 2 x 2 with the full
 * temperature space.
 */
MmsTable mms_heat(const std::vector<int>& n = {4, 8, 16}, double t_end = 0.5, const IntegratorConfig& cfg = {});

/**
 * Fully coupled: u* = a(t) prod sin(pi x_i/L_i) e1, eps^p* = eps(u*) + Z(t) with Z
 * traceless and uniform (so T* = -D Z and f = 0), theta* = c + A cos(pi x1/L1) e^{-t};
 * auxiliary sources in the flow rule and the heat equation absorb the mismatch.
 * Rungs are (cells per axis, l); k is always the full displacement space.
 */
MmsTable mms_coupled(const std::vector<std::pair<int, int>>& rungs = {{2, 16}, {4, 64}, {6, 160}},
                     double t_end = 0.2, const IntegratorConfig& cfg = {});

}  // namespace tve
