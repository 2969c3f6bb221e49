#include "tve/spectral_basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "tve/io.hpp"

namespace tve {

namespace {

struct EigenPairs {
  Vector values;
  Matrix vectors;  // M-orthonormal
};

void fix_signs(Matrix& v) {
  for (int j = 0; j < v.cols(); ++j) {
    for (int i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > 1e-12) {
        if (v(i, j) < 0.0) v.col(j) *= -1.0;
        break;
      }
    }
  }
}

EigenPairs dense_pairs(const SparseMatrix& k, const SparseMatrix& m, int count) {
  const Matrix kd = Matrix(k);
  const Matrix md = Matrix(m);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(kd, md);
  if (es.info() != Eigen::Success) throw Error("dense generalized eigensolver did not converge");
  return {es.eigenvalues().head(count), es.eigenvectors().leftCols(count)};
}

// Shift-invert subspace iteration with Rayleigh-Ritz on the block.
EigenPairs iterative_pairs(const SparseMatrix& k, const SparseMatrix& m, int count, double shift,
                           const EigenOptions& opt) {
  const int n = static_cast<int>(k.rows());
  const int block = std::min(n, std::max(2 * count, count + 8));
  SparseMatrix a = k - shift * m;
  Eigen::SimplicialLDLT<SparseMatrix> solver(a);
  if (solver.info() != Eigen::Success) throw Error("shift-invert factorization failed");

  double knorm = 0.0;
  for (int c = 0; c < k.outerSize(); ++c) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(k, c); it; ++it) col += std::abs(it.value());
    knorm = std::max(knorm, col);
  }

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Matrix x(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = nd(rng);

  for (int it = 0; it < opt.max_iterations; ++it) {
    Matrix y = solver.solve(m * x);
    const Matrix kr = y.transpose() * (k * y);
    const Matrix mr = y.transpose() * (m * y);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(0.5 * (kr + kr.transpose()), 0.5 * (mr + mr.transpose()));
    if (es.info() != Eigen::Success) throw Error("Rayleigh-Ritz step failed");
    x = y * es.eigenvectors();
    const Vector lam = es.eigenvalues();
    double worst = 0.0;
    for (int j = 0; j < count; ++j) {
      const Vector kx = k * x.col(j);
      const Vector r = kx - lam[j] * (m * x.col(j));
      const double scale = std::max(kx.norm() + std::abs(lam[j]) * (m * x.col(j)).norm(), knorm * x.col(j).norm());
      worst = std::max(worst, r.norm() / scale);
    }
    if (worst < opt.tolerance) return {lam.head(count), x.leftCols(count)};
  }
  throw Error("shift-invert subspace iteration did not converge");
}

EigenPairs smallest_pairs(const SparseMatrix& k, const SparseMatrix& m, int count, double shift,
                          const EigenOptions& opt) {
  if (k.rows() <= opt.dense_limit) return dense_pairs(k, m, count);
  return iterative_pairs(k, m, count, shift, opt);
}

double residual_ratio(const SparseMatrix& k, const SparseMatrix& m, const Vector& v, double lam) {
  const Vector kv = k * v;
  const double denom = kv.norm();
  const double r = (kv - lam * (m * v)).norm();
  return denom > 0.0 ? r / denom : r;
}

Matrix strains_of(const FEAssembly& as, const Matrix& vectors) {
  Matrix s(6 * as.qp_count(), vectors.cols());
  for (int j = 0; j < vectors.cols(); ++j) s.col(j) = strain_of(as, vectors.col(j)).data();
  return s;
}

Matrix divergence_of(const FEAssembly& as, const Matrix& vectors) {
  Matrix d(as.qp_count(), vectors.cols());
  for (int j = 0; j < vectors.cols(); ++j) d.col(j) = as.divergence_full(as.expand_reduced(vectors.col(j)));
  return d;
}

Matrix qp_values_of(const FEAssembly& as, const Matrix& vectors) {
  Matrix v(as.qp_count(), vectors.cols());
  for (int j = 0; j < vectors.cols(); ++j) v.col(j) = as.scalar_at_qp(vectors.col(j));
  return v;
}

/// Maps a tensor field to coordinates in which (.,.)_D is the Euclidean product.
class Whitener {
public:
  explicit Whitener(const FEAssembly& as) : as_(as) {
    root_ = sqrt_D(as.elasticity()).matrix();
    root_inv_ = root_.inverse();
  }
  Vector forward(const Vector& a) const {
    Vector y(a.size());
    const Vector& w = as_.qp_weights();
    for (int q = 0; q < as_.qp_count(); ++q) y.segment<6>(6 * q) = std::sqrt(w[q]) * (root_ * a.segment<6>(6 * q));
    return y;
  }
  Vector backward(const Vector& y) const {
    Vector a(y.size());
    const Vector& w = as_.qp_weights();
    for (int q = 0; q < as_.qp_count(); ++q)
      a.segment<6>(6 * q) = (root_inv_ * y.segment<6>(6 * q)) / std::sqrt(w[q]);
    return a;
  }

private:
  const FEAssembly& as_;
  Mat6 root_;
  Mat6 root_inv_;
};

void check_size(int requested, int available, const char* what) {
  if (requested < 0 || requested > available) {
    std::ostringstream os;
    os << what << ": requested " << requested << " but only " << available << " available";
    throw ValidationError(os.str());
  }
}

}  // namespace

DisplacementBasis solve_displacement_eigs(const FEAssembly& as, int k, const EigenOptions& opt) {
  check_size(k, as.reduced_dim(), "displacement basis");
  DisplacementBasis b;
  if (k == 0) {
    b.eigenvalues = Vector(0);
    b.vectors = Matrix(as.reduced_dim(), 0);
    b.strains = Matrix(6 * as.qp_count(), 0);
    b.divergence = Matrix(as.qp_count(), 0);
    return b;
  }
  EigenPairs ep = smallest_pairs(as.stiffness_u(), as.mass_u(), k, 0.0, opt);
  // M-normalized -> energy-normalized: w^T K w = lambda.
  for (int j = 0; j < k; ++j) {
    if (!(ep.values[j] > 0.0)) throw Error("non-positive Dirichlet elasticity eigenvalue");
    ep.vectors.col(j) /= std::sqrt(ep.values[j]);
  }
  fix_signs(ep.vectors);
  b.eigenvalues = ep.values;
  b.vectors = ep.vectors;
  for (int j = 0; j < k; ++j)
    b.max_residual =
        std::max(b.max_residual, residual_ratio(as.stiffness_u(), as.mass_u(), b.vectors.col(j), b.eigenvalues[j]));
  b.strains = strains_of(as, b.vectors);
  b.divergence = divergence_of(as, b.vectors);
  return b;
}

TemperatureBasis solve_temperature_eigs(const FEAssembly& as, int l, const EigenOptions& opt) {
  check_size(l, as.scalar_dim(), "temperature basis");
  TemperatureBasis b;
  if (l == 0) {
    b.eigenvalues = Vector(0);
    b.vectors = Matrix(as.scalar_dim(), 0);
    b.values = Matrix(as.qp_count(), 0);
    return b;
  }
  EigenPairs ep = smallest_pairs(as.stiffness_theta(), as.mass_theta(), l, -1.0, opt);
  // The constant is an exact discrete Neumann eigenvector (rows of K_theta sum to zero).
  ep.vectors.col(0).setConstant(1.0 / std::sqrt(as.mesh().volume()));
  ep.values[0] = 0.0;
  // Re-orthogonalize the rest against it in M.
  const SparseMatrix& m = as.mass_theta();
  const Vector mv0 = m * ep.vectors.col(0);
  for (int j = 1; j < l; ++j) {
    ep.vectors.col(j) -= mv0.dot(ep.vectors.col(j)) * ep.vectors.col(0);
    ep.vectors.col(j) /= std::sqrt(ep.vectors.col(j).dot(m * ep.vectors.col(j)));
  }
  fix_signs(ep.vectors);
  b.eigenvalues = ep.values;
  b.vectors = ep.vectors;
  for (int j = 0; j < l; ++j) {
    const Vector kv = as.stiffness_theta() * b.vectors.col(j);
    const double r = (kv - b.eigenvalues[j] * (m * b.vectors.col(j))).norm();
    const double scale = std::max(kv.norm(), 1.0 / std::sqrt(as.mesh().volume()) * 1e-300);
    b.max_residual = std::max(b.max_residual, j == 0 ? r : r / scale);
  }
  b.values = qp_values_of(as, b.vectors);
  return b;
}

CandidateSet default_complement_candidates(const FEAssembly& as) {
  const auto& n = as.mesh().cells();
  const Vec3& ext = as.mesh().extents();
  struct Mode {
    int i, j, k;
    double freq;
  };
  std::vector<Mode> modes;
  for (int k = 0; k <= n[2]; ++k)
    for (int j = 0; j <= n[1]; ++j)
      for (int i = 0; i <= n[0]; ++i) {
        const double f = std::pow(i / ext[0], 2) + std::pow(j / ext[1], 2) + std::pow(k / ext[2], 2);
        modes.push_back({i, j, k, f});
      }
  std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.freq < b.freq; });

  const int smooth = 6 * static_cast<int>(modes.size());
  const int nq = as.qp_count();
  CandidateSet set;
  set.count = smooth + 6 * nq;
  // Orthonormal deviatoric directions first, the spherical one last.
  std::array<Vec6, 6> dirs;
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0), r6 = std::sqrt(6.0);
  dirs[0] << 1 / r2, -1 / r2, 0, 0, 0, 0;
  dirs[1] << 1 / r6, 1 / r6, -2 / r6, 0, 0, 0;
  dirs[2] << 0, 0, 0, 1, 0, 0;
  dirs[3] << 0, 0, 0, 0, 1, 0;
  dirs[4] << 0, 0, 0, 0, 0, 1;
  dirs[5] << 1 / r3, 1 / r3, 1 / r3, 0, 0, 0;
  const std::vector<Vec3>* pts = &as.qp_points();
  set.field = [modes = std::move(modes), dirs, smooth, nq, pts, ext](int idx) {
    QPTensorField f(nq);
    if (idx < smooth) {
      const Mode& md = modes[idx / 6];
      const Vec6& dir = dirs[idx % 6];
      for (int q = 0; q < nq; ++q) {
        const Vec3& x = (*pts)[q];
        f.data().segment<6>(6 * q) = std::cos(md.i * M_PI * x[0] / ext[0]) * std::cos(md.j * M_PI * x[1] / ext[1]) *
                                     std::cos(md.k * M_PI * x[2] / ext[2]) * dir;
      }
    } else {
      f.data()[idx - smooth] = 1.0;
    }
    return f;
  };
  return set;
}

CandidateSet candidates_from(std::vector<QPTensorField> fields) {
  CandidateSet set;
  set.count = static_cast<int>(fields.size());
  set.field = [fields = std::move(fields)](int idx) { return fields[idx]; };
  return set;
}

int complement_capacity(const FEAssembly& as, int k) { return 6 * as.qp_count() - k; }

ComplementBasis build_complement(const FEAssembly& as, const DisplacementBasis& dbasis, int l,
                                 const std::optional<CandidateSet>& candidates) {
  const int k = dbasis.size();
  check_size(l, complement_capacity(as, k), "complement basis");
  const CandidateSet cand = candidates ? *candidates : default_complement_candidates(as);
  const Whitener wh(as);
  const int dim = 6 * as.qp_count();

  Matrix q(dim, k + l);
  for (int n = 0; n < k; ++n) q.col(n) = wh.forward(dbasis.strains.col(n));
  int accepted = 0;
  ComplementBasis out;
  constexpr double kDropTol = 1e-8;

  for (int idx = 0; idx < cand.count && accepted < l; ++idx) {
    const QPTensorField f = cand.field(idx);
    if (f.data().size() != dim) throw ValidationError("complement candidate has wrong length");
    Vector y = wh.forward(f.data());
    const double n0 = y.norm();
    ++out.candidates_scanned;
    if (n0 == 0.0) {
      ++out.candidates_dropped;
      continue;
    }
    const int basis_cols = k + accepted;
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < basis_cols; ++j) y -= q.col(j).dot(y) * q.col(j);
    const double nr = y.norm();
    if (nr < kDropTol * n0) {
      ++out.candidates_dropped;
      continue;
    }
    q.col(basis_cols) = y / nr;
    ++accepted;
  }
  if (accepted < l) {
    std::ostringstream os;
    os << "complement basis: only " << accepted << " independent candidates survived, " << l << " requested";
    throw Error(os.str());
  }
  out.fields.resize(dim, l);
  for (int m = 0; m < l; ++m) out.fields.col(m) = wh.backward(q.col(k + m));
  fix_signs(out.fields);
  return out;
}

Matrix divergence_coupling(const FEAssembly& as, const DisplacementBasis& dbasis, const TemperatureBasis& tbasis) {
  return dbasis.divergence.transpose() * as.qp_weights().asDiagonal() * tbasis.values;
}

BasisSet build_bases(const FEAssembly& as, int k, int l, const EigenOptions& opt, int l_zeta) {
  BasisSet b;
  b.displacement = solve_displacement_eigs(as, k, opt);
  b.temperature = solve_temperature_eigs(as, std::min(l, as.scalar_dim()), opt);
  b.complement = build_complement(as, b.displacement, l_zeta >= 0 ? l_zeta : l);
  b.coupling = divergence_coupling(as, b.displacement, b.temperature);
  return b;
}

namespace {

// Columns of w_q D a_q for each quadrature point block.
Matrix weighted_D(const FEAssembly& as, const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  const Mat6& d = as.elasticity().mandel();
  const Vector& w = as.qp_weights();
  for (int q = 0; q < as.qp_count(); ++q) out.middleRows<6>(6 * q) = w[q] * d * a.middleRows<6>(6 * q);
  return out;
}

double identity_deviation(const Matrix& g) {
  if (g.size() == 0) return 0.0;
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

bool BasisValidation::passes(double gram_tol, double residual_tol) const {
  return displacement_gram <= gram_tol && temperature_gram <= gram_tol && complement_gram <= gram_tol &&
         cross_gram <= gram_tol && displacement_residual <= residual_tol && temperature_residual <= residual_tol;
}

std::string BasisValidation::to_text() const {
  std::ostringstream os;
  os << "displacement_gram = " << format_double(displacement_gram) << "\n"
     << "temperature_gram = " << format_double(temperature_gram) << "\n"
     << "complement_gram = " << format_double(complement_gram) << "\n"
     << "cross_gram = " << format_double(cross_gram) << "\n"
     << "displacement_residual = " << format_double(displacement_residual) << "\n"
     << "temperature_residual = " << format_double(temperature_residual) << "\n"
     << "max_divergence_integral = " << format_double(max_divergence_integral) << "\n";
  return os.str();
}

BasisValidation validate_bases(const FEAssembly& as, const BasisSet& bases) {
  BasisValidation v;
  const auto& e = bases.displacement.strains;
  const auto& z = bases.complement.fields;
  const Matrix de = weighted_D(as, e);
  v.displacement_gram = identity_deviation(e.transpose() * de);
  v.complement_gram = identity_deviation(z.transpose() * weighted_D(as, z));
  if (e.cols() > 0 && z.cols() > 0) v.cross_gram = (de.transpose() * z).cwiseAbs().maxCoeff();
  const auto& vals = bases.temperature.values;
  v.temperature_gram = identity_deviation(vals.transpose() * as.qp_weights().asDiagonal() * vals);
  v.displacement_residual = bases.displacement.max_residual;
  v.temperature_residual = bases.temperature.max_residual;
  if (e.cols() > 0)
    v.max_divergence_integral = (as.qp_weights().transpose() * bases.displacement.divergence).cwiseAbs().maxCoeff();
  return v;
}

std::uint64_t basis_fingerprint(const FEAssembly& as) {
  Fnv1a h;
  h.add(static_cast<std::int64_t>(as.mesh().hash()));
  const Mat6& d = as.elasticity().mandel();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) h.add(d(i, j));
  return h.value();
}

void save_basis_cache(const std::filesystem::path& path, const FEAssembly& as, const BasisSet& bases) {
  BinaryWriter w;
  w.bytes("TVEB", 4);
  w.u32(1);
  w.u64(basis_fingerprint(as));
  w.u32(static_cast<std::uint32_t>(bases.displacement.size()));
  w.u32(static_cast<std::uint32_t>(bases.temperature.size()));
  w.u32(static_cast<std::uint32_t>(bases.complement.size()));
  w.u32(static_cast<std::uint32_t>(as.reduced_dim()));
  w.u32(static_cast<std::uint32_t>(as.scalar_dim()));
  w.u32(static_cast<std::uint32_t>(as.qp_count()));
  auto put = [&w](const auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
  };
  put(bases.displacement.eigenvalues);
  put(bases.displacement.vectors);
  put(bases.temperature.eigenvalues);
  put(bases.temperature.vectors);
  put(bases.complement.fields);
  write_file_atomic(path, w.str());
}

BasisSet load_basis_cache(const std::filesystem::path& path, const FEAssembly& as) {
  BinaryReader r(read_file(path));
  if (r.bytes(4) != "TVEB") throw ValidationError("not a basis cache file");
  if (r.u32() != 1) throw ValidationError("unsupported basis cache version");
  if (r.u64() != basis_fingerprint(as)) throw ValidationError("basis cache was built for a different mesh or D");
  const int k = static_cast<int>(r.u32());
  const int lt = static_cast<int>(r.u32());
  const int lz = static_cast<int>(r.u32());
  if (static_cast<int>(r.u32()) != as.reduced_dim() || static_cast<int>(r.u32()) != as.scalar_dim() ||
      static_cast<int>(r.u32()) != as.qp_count())
    throw ValidationError("basis cache dimensions do not match the assembly");
  auto get = [&r](Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
    return m;
  };
  BasisSet b;
  b.displacement.eigenvalues = get(k, 1).col(0);
  b.displacement.vectors = get(as.reduced_dim(), k);
  b.temperature.eigenvalues = get(lt, 1).col(0);
  b.temperature.vectors = get(as.scalar_dim(), lt);
  b.complement.fields = get(6 * as.qp_count(), lz);
  if (!r.at_end()) throw ValidationError("trailing bytes in basis cache");
  b.displacement.strains = strains_of(as, b.displacement.vectors);
  b.displacement.divergence = divergence_of(as, b.displacement.vectors);
  b.temperature.values = qp_values_of(as, b.temperature.vectors);
  for (int j = 0; j < k; ++j)
    b.displacement.max_residual =
        std::max(b.displacement.max_residual,
                 residual_ratio(as.stiffness_u(), as.mass_u(), b.displacement.vectors.col(j),
                                b.displacement.eigenvalues[j]));
  b.coupling = divergence_coupling(as, b.displacement, b.temperature);
  return b;
}

}  // namespace tve
