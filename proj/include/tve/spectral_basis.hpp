#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "tve/assembly.hpp"

namespace tve {

/// Dirichlet elasticity eigenpairs K_u w = lambda M_u w, normalized so (eps(w_i), eps(w_j))_D = delta_ij.
struct DisplacementBasis {
  Vector eigenvalues;  // ascending, > 0
  Matrix vectors;      // reduced_dim x k
  Matrix strains;      // 6 nq x k, Mandel eps(w_n) at quadrature points
  Matrix divergence;   // nq x k, div w_n at quadrature points
  double max_residual = 0.0;  // max_n |K w - lambda M w| / |K w|

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Neumann Laplacian eigenpairs K_theta v = mu M_theta v, L2-orthonormal; first pair (const, 0).
struct TemperatureBasis {
  Vector eigenvalues;
  Matrix vectors;  // scalar_dim x l
  Matrix values;   // nq x l, v_m at quadrature points
  double max_residual = 0.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// D-orthonormal tensor fields D-orthogonal to every eps(w_n) of the displacement basis.
struct ComplementBasis {
  Matrix fields;  // 6 nq x l
  int candidates_scanned = 0;
  int candidates_dropped = 0;

  int size() const { return static_cast<int>(fields.cols()); }
};

struct EigenOptions {
  /// Dense generalized solver up to this dimension, shift-invert subspace iteration above.
  int dense_limit = 3000;
  double tolerance = 1e-10;
  int max_iterations = 1000;
};

DisplacementBasis solve_displacement_eigs(const FEAssembly& as, int k, const EigenOptions& opt = {});
TemperatureBasis solve_temperature_eigs(const FEAssembly& as, int l, const EigenOptions& opt = {});

/**
 * Candidate generator for the complement space: index -> tensor field.
 * The default sequence lists smooth fields first (products of cosines, ordered
 * by frequency, times each Mandel unit direction) followed by the quadrature
 * point indicator tensors in lexicographic order, so the full sequence spans
 * the whole quadrature tensor space.
 */
struct CandidateSet {
  int count = 0;
  std::function<QPTensorField(int)> field;
};

CandidateSet default_complement_candidates(const FEAssembly& as);
CandidateSet candidates_from(std::vector<QPTensorField> fields);

/// Projects out span{eps(w_n)} in (.,.)_D and orthonormalizes (modified Gram-Schmidt, two passes, drop tol 1e-8).
ComplementBasis build_complement(const FEAssembly& as, const DisplacementBasis& dbasis, int l,
                                 const std::optional<CandidateSet>& candidates = std::nullopt);

/// Dimension available for the complement: 6 nq - k.
int complement_capacity(const FEAssembly& as, int k);

/// B[n, m] = int div(w_n) v_m dx.
Matrix divergence_coupling(const FEAssembly& as, const DisplacementBasis& dbasis, const TemperatureBasis& tbasis);

/// Three Galerkin bases computed on one assembly.
struct BasisSet {
  DisplacementBasis displacement;
  TemperatureBasis temperature;
  ComplementBasis complement;
  Matrix coupling;  // divergence_coupling
};

/// Temperature basis size is min(l, scalar_dim); complement size is l unless l_zeta >= 0 is given.
BasisSet build_bases(const FEAssembly& as, int k, int l, const EigenOptions& opt = {}, int l_zeta = -1);

/// Deviations of the Gram matrices from identity/zero, eigen-residuals and the divergence identity.
struct BasisValidation {
  double displacement_gram = 0.0;  // max |(eps(w_i), eps(w_j))_D - delta_ij|
  double temperature_gram = 0.0;   // max |(v_i, v_j) - delta_ij|
  double complement_gram = 0.0;    // max |(zeta_i, zeta_j)_D - delta_ij|
  double cross_gram = 0.0;         // max |(eps(w_i), zeta_j)_D|
  double displacement_residual = 0.0;
  double temperature_residual = 0.0;
  double max_divergence_integral = 0.0;  // max_n |int div w_n|

  bool passes(double gram_tol = 1e-9, double residual_tol = 1e-8) const;
  std::string to_text() const;
};

BasisValidation validate_bases(const FEAssembly& as, const BasisSet& bases);

/// Fingerprint of the mesh and elasticity tensor a basis was computed for.
std::uint64_t basis_fingerprint(const FEAssembly& as);

/**
 * Basis cache file, all integers and floats little-endian:
 *   "TVEB" | u32 version=1 | u64 fingerprint | u32 k | u32 l_theta | u32 l_zeta
 *   | u32 reduced_dim | u32 scalar_dim | u32 qp_count
 *   | f64 lambda[k] | f64 w[reduced_dim*k] (column-major)
 *   | f64 mu[l_theta] | f64 v[scalar_dim*l_theta] | f64 zeta[6*qp_count*l_zeta]
 */
void save_basis_cache(const std::filesystem::path& path, const FEAssembly& as, const BasisSet& bases);
BasisSet load_basis_cache(const std::filesystem::path& path, const FEAssembly& as);

}  // namespace tve
