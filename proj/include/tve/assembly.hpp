#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Sparse>

#include "tve/tensor.hpp"

namespace tve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Boundary side of the box: x-, x+, y-, y+, z-, z+.
enum class Side : int { XMin = 0, XMax = 1, YMin = 2, YMax = 3, ZMin = 4, ZMax = 5 };

const char* side_name(Side s);

/// Axis-aligned box [0,L1]x[0,L2]x[0,L3] split into uniform hexahedral cells.
class BoxMesh {
public:
  BoxMesh(Vec3 extents, std::array<int, 3> cells);

  const Vec3& extents() const { return extents_; }
  const std::array<int, 3>& cells() const { return cells_; }
  Vec3 spacing() const;
  double volume() const { return extents_.prod(); }
  double surface_area() const;

  int node_count() const;
  int cell_count() const { return cells_[0] * cells_[1] * cells_[2]; }
  int node_index(int i, int j, int k) const { return i + (cells_[0] + 1) * (j + (cells_[1] + 1) * k); }
  std::array<int, 3> node_ijk(int node) const;
  Vec3 node_coords(int node) const;
  bool is_boundary_node(int node) const;
  /// Nodes of cell c ordered so that local node a sits at reference corner reference_corner(a).
  std::array<int, 8> cell_nodes(int c) const;
  Vec3 cell_origin(int c) const;

  /// Stable 64-bit fingerprint of extents and cell counts.
  std::uint64_t hash() const;

private:
  Vec3 extents_;
  std::array<int, 3> cells_;
};

/// Reference corner (+-1, +-1, +-1) of local node a (bit 0 -> x, bit 1 -> y, bit 2 -> z).
Vec3 reference_corner(int a);

/// One boundary face quadrature point.
struct FaceQuadraturePoint {
  Side side;
  Vec3 x;
  double weight;
  std::array<int, 4> nodes;
  std::array<double, 4> shape;
};

/**
 * Tensor field carried at quadrature points, in Mandel coordinates
 * (entry 6*q + c). Quadrature weights live in the owning FEAssembly.
 */
class QPTensorField {
public:
  QPTensorField() = default;
  explicit QPTensorField(int qp_count) : data_(Vector::Zero(6 * qp_count)) {}
  explicit QPTensorField(Vector data);

  int size() const { return static_cast<int>(data_.size() / 6); }
  SymTensor at(int q) const { return SymTensor::from_mandel(data_.segment<6>(6 * q)); }
  void set(int q, const SymTensor& t) { data_.segment<6>(6 * q) = t.mandel(); }
  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

private:
  Vector data_;
};

/**
 * Q1 finite-element matrices on a BoxMesh with 2x2x2 Gauss quadrature.
 *
 * Temperature lives on all nodes (Neumann). Displacement is reduced to the
 * interior nodes (Dirichlet by elimination); dof 3*interior_index + c.
 */
class FEAssembly {
public:
  FEAssembly(BoxMesh mesh, ElasticityTensor d);

  const BoxMesh& mesh() const { return mesh_; }
  const ElasticityTensor& elasticity() const { return d_; }

  int qp_count() const { return 8 * mesh_.cell_count(); }
  int scalar_dim() const { return mesh_.node_count(); }
  int reduced_dim() const { return 3 * static_cast<int>(interior_nodes_.size()); }
  int full_vector_dim() const { return 3 * mesh_.node_count(); }

  const Vector& qp_weights() const { return weights_; }
  const std::vector<Vec3>& qp_points() const { return points_; }
  const std::vector<FaceQuadraturePoint>& face_points() const { return face_points_; }

  const SparseMatrix& mass_theta() const { return m_theta_; }
  const SparseMatrix& stiffness_theta() const { return k_theta_; }
  const SparseMatrix& mass_u() const { return m_u_; }
  const SparseMatrix& stiffness_u() const { return k_u_; }
  /// Vector stiffness on all nodes (used for Dirichlet lifting).
  const SparseMatrix& stiffness_u_full() const { return k_u_full_; }

  /// Interior node of each reduced node slot, and the inverse map (-1 on boundary).
  const std::vector<int>& interior_nodes() const { return interior_nodes_; }
  const std::vector<int>& reduced_slot() const { return reduced_slot_; }

  Vector expand_reduced(const Vector& reduced) const;
  Vector restrict_to_interior(const Vector& full) const;

  /// Nodal scalar -> quadrature values.
  Vector scalar_at_qp(const Vector& nodal) const;
  /// Quadrature scalar f -> nodal load b_i = sum_q w_q f_q phi_i(x_q).
  Vector scalar_load(const Vector& qp_values) const;
  /// Nodal scalar -> gradient at quadrature points (3 per point).
  std::vector<Vec3> gradient_at_qp(const Vector& nodal) const;
  /// Full nodal vector field (3 per node) -> symmetric gradient at quadrature points.
  QPTensorField strain_full(const Vector& u_full) const;
  /// Full nodal vector field -> divergence at quadrature points.
  Vector divergence_full(const Vector& u_full) const;
  /// Vector load f -> consistent nodal load on all nodes.
  Vector load_full(const std::function<Vec3(const Vec3&)>& f) const;

  /// Apply D pointwise to a tensor field.
  QPTensorField apply_D(const QPTensorField& a) const;
  /// sum_q w_q (D a_q) : b_q
  double inner_D(const QPTensorField& a, const QPTensorField& b) const;

  /// Element-local tables (identical for every cell of a uniform mesh).
  const std::array<std::array<double, 8>, 8>& shape_table() const { return shape_; }
  const std::array<std::array<Vec3, 8>, 8>& grad_table() const { return grad_; }

private:
  void build_tables();
  void assemble_matrices();
  void build_face_points();

  BoxMesh mesh_;
  ElasticityTensor d_;
  Vector weights_;
  std::vector<Vec3> points_;
  std::vector<FaceQuadraturePoint> face_points_;
  std::array<std::array<double, 8>, 8> shape_{};  // [local qp][local node]
  std::array<std::array<Vec3, 8>, 8> grad_{};     // physical gradients
  std::vector<int> interior_nodes_;
  std::vector<int> reduced_slot_;
  SparseMatrix m_theta_, k_theta_, m_u_, k_u_, k_u_full_;
};

/// Assembles all FE matrices; rejects non-positive-definite D and singular mass matrices.
FEAssembly assemble(const BoxMesh& mesh, const ElasticityTensor& d);

/// Symmetric gradient at quadrature points of a reduced (Dirichlet) displacement vector.
QPTensorField strain_of(const FEAssembly& as, const Vector& u_reduced);

/// Gauss value of the integral of a scalar quadrature field.
double integrate_qp(const FEAssembly& as, const Vector& values);
/// Gauss value of the integral of a pointwise scalar function of a tensor field.
double integrate_qp(const FEAssembly& as, const QPTensorField& field, const std::function<double(const SymTensor&)>& f);

/// Boundary data g(x, side) integrated against a nodal scalar field over all boundary faces.
using FaceData = std::function<double(const Vec3& x, Side side)>;
double boundary_integral(const FEAssembly& as, const FaceData& g, const Vector& v_nodal);
/// Nodal load vector b_i = int_{dOmega} g phi_i dS.
Vector boundary_load(const FEAssembly& as, const FaceData& g);

}  // namespace tve
