#include "tve/assembly.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "tve/io.hpp"

namespace tve {

namespace {

const double kGauss = 1.0 / std::sqrt(3.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

/// Rows of the Mandel strain-displacement operator for local node gradient g and component c.
Vec6 strain_row(const Vec3& g, int c) {
  Vec6 r = Vec6::Zero();
  switch (c) {
    case 0:
      r << g.x(), 0, 0, 0, g.z() * kInvSqrt2, g.y() * kInvSqrt2;
      break;
    case 1:
      r << 0, g.y(), 0, g.z() * kInvSqrt2, 0, g.x() * kInvSqrt2;
      break;
    default:
      r << 0, 0, g.z(), g.y() * kInvSqrt2, g.x() * kInvSqrt2, 0;
      break;
  }
  return r;
}

}  // namespace

const char* side_name(Side s) {
  static const char* names[] = {"x-", "x+", "y-", "y+", "z-", "z+"};
  return names[static_cast<int>(s)];
}

Vec3 reference_corner(int a) {
  return {(a & 1) ? 1.0 : -1.0, (a & 2) ? 1.0 : -1.0, (a & 4) ? 1.0 : -1.0};
}

BoxMesh::BoxMesh(Vec3 extents, std::array<int, 3> cells) : extents_(extents), cells_(cells) {
  for (int i = 0; i < 3; ++i) {
    if (cells_[i] < 2) throw ValidationError("mesh needs at least 2 cells per axis");
    if (!(extents_[i] > 0.0)) throw ValidationError("mesh extents must be positive");
  }
}

Vec3 BoxMesh::spacing() const {
  return {extents_[0] / cells_[0], extents_[1] / cells_[1], extents_[2] / cells_[2]};
}

double BoxMesh::surface_area() const {
  const Vec3& l = extents_;
  return 2.0 * (l[0] * l[1] + l[1] * l[2] + l[0] * l[2]);
}

int BoxMesh::node_count() const { return (cells_[0] + 1) * (cells_[1] + 1) * (cells_[2] + 1); }

std::array<int, 3> BoxMesh::node_ijk(int node) const {
  const int nx = cells_[0] + 1;
  const int ny = cells_[1] + 1;
  return {node % nx, (node / nx) % ny, node / (nx * ny)};
}

Vec3 BoxMesh::node_coords(int node) const {
  const auto ijk = node_ijk(node);
  const Vec3 h = spacing();
  return {ijk[0] * h[0], ijk[1] * h[1], ijk[2] * h[2]};
}

bool BoxMesh::is_boundary_node(int node) const {
  const auto ijk = node_ijk(node);
  for (int d = 0; d < 3; ++d)
    if (ijk[d] == 0 || ijk[d] == cells_[d]) return true;
  return false;
}

std::array<int, 8> BoxMesh::cell_nodes(int c) const {
  const int i = c % cells_[0];
  const int j = (c / cells_[0]) % cells_[1];
  const int k = c / (cells_[0] * cells_[1]);
  std::array<int, 8> nodes{};
  for (int a = 0; a < 8; ++a) nodes[a] = node_index(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
  return nodes;
}

Vec3 BoxMesh::cell_origin(int c) const {
  const Vec3 h = spacing();
  const int i = c % cells_[0];
  const int j = (c / cells_[0]) % cells_[1];
  const int k = c / (cells_[0] * cells_[1]);
  return {i * h[0], j * h[1], k * h[2]};
}

std::uint64_t BoxMesh::hash() const {
  Fnv1a h;
  for (int i = 0; i < 3; ++i) h.add(extents_[i]);
  for (int i = 0; i < 3; ++i) h.add(static_cast<std::int64_t>(cells_[i]));
  return h.value();
}

QPTensorField::QPTensorField(Vector data) : data_(std::move(data)) {
  if (data_.size() % 6 != 0) throw ValidationError("tensor field length must be a multiple of 6");
}

FEAssembly::FEAssembly(BoxMesh mesh, ElasticityTensor d) : mesh_(std::move(mesh)), d_(std::move(d)) {
  if (!d_.is_positive_definite()) throw ValidationError("elasticity tensor is not positive definite");
  reduced_slot_.assign(mesh_.node_count(), -1);
  for (int n = 0; n < mesh_.node_count(); ++n) {
    if (!mesh_.is_boundary_node(n)) {
      reduced_slot_[n] = static_cast<int>(interior_nodes_.size());
      interior_nodes_.push_back(n);
    }
  }
  build_tables();
  assemble_matrices();
  build_face_points();
}

void FEAssembly::build_tables() {
  const Vec3 h = mesh_.spacing();
  for (int lq = 0; lq < 8; ++lq) {
    const Vec3 xi = kGauss * reference_corner(lq);
    for (int a = 0; a < 8; ++a) {
      const Vec3 c = reference_corner(a);
      const double fx = 1.0 + c.x() * xi.x();
      const double fy = 1.0 + c.y() * xi.y();
      const double fz = 1.0 + c.z() * xi.z();
      shape_[lq][a] = 0.125 * fx * fy * fz;
      // d/dx = (2/h) d/dxi
      grad_[lq][a] = Vec3(0.125 * c.x() * fy * fz * 2.0 / h.x(), 0.125 * fx * c.y() * fz * 2.0 / h.y(),
                          0.125 * fx * fy * c.z() * 2.0 / h.z());
    }
  }
  const int nq = qp_count();
  const double w = mesh_.volume() / mesh_.cell_count() / 8.0;
  weights_ = Vector::Constant(nq, w);
  points_.resize(nq);
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const Vec3 o = mesh_.cell_origin(c);
    for (int lq = 0; lq < 8; ++lq) {
      const Vec3 xi = kGauss * reference_corner(lq);
      points_[8 * c + lq] = o + 0.5 * (xi + Vec3::Ones()).cwiseProduct(h);
    }
  }
}

void FEAssembly::assemble_matrices() {
  const double w = weights_[0];
  const Mat6& dm = d_.mandel();

  Eigen::Matrix<double, 8, 8> me_t = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 8, 8> ke_t = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 24, 24> ke_u = Eigen::Matrix<double, 24, 24>::Zero();
  for (int lq = 0; lq < 8; ++lq) {
    Eigen::Matrix<double, 6, 24> b;
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 3; ++c) b.col(3 * a + c) = strain_row(grad_[lq][a], c);
    ke_u += w * b.transpose() * dm * b;
    for (int a = 0; a < 8; ++a)
      for (int bb = 0; bb < 8; ++bb) {
        me_t(a, bb) += w * shape_[lq][a] * shape_[lq][bb];
        ke_t(a, bb) += w * grad_[lq][a].dot(grad_[lq][bb]);
      }
  }

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> tm, tk, tmu, tku, tkf;
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const auto nodes = mesh_.cell_nodes(c);
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        tm.emplace_back(nodes[a], nodes[b], me_t(a, b));
        tk.emplace_back(nodes[a], nodes[b], ke_t(a, b));
        for (int ca = 0; ca < 3; ++ca)
          for (int cb = 0; cb < 3; ++cb)
            tkf.emplace_back(3 * nodes[a] + ca, 3 * nodes[b] + cb, ke_u(3 * a + ca, 3 * b + cb));
        const int ra = reduced_slot_[nodes[a]];
        const int rb = reduced_slot_[nodes[b]];
        if (ra < 0 || rb < 0) continue;
        for (int ca = 0; ca < 3; ++ca) {
          tmu.emplace_back(3 * ra + ca, 3 * rb + ca, me_t(a, b));
          for (int cb = 0; cb < 3; ++cb) tku.emplace_back(3 * ra + ca, 3 * rb + cb, ke_u(3 * a + ca, 3 * b + cb));
        }
      }
  }
  const int ns = scalar_dim();
  const int nr = reduced_dim();
  m_theta_.resize(ns, ns);
  k_theta_.resize(ns, ns);
  m_u_.resize(nr, nr);
  k_u_.resize(nr, nr);
  k_u_full_.resize(full_vector_dim(), full_vector_dim());
  m_theta_.setFromTriplets(tm.begin(), tm.end());
  k_theta_.setFromTriplets(tk.begin(), tk.end());
  m_u_.setFromTriplets(tmu.begin(), tmu.end());
  k_u_.setFromTriplets(tku.begin(), tku.end());
  k_u_full_.setFromTriplets(tkf.begin(), tkf.end());
}

void FEAssembly::build_face_points() {
  const Vec3 h = mesh_.spacing();
  const auto& n = mesh_.cells();
  for (int s = 0; s < 6; ++s) {
    const int axis = s / 2;
    const bool upper = s % 2 == 1;
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    const double area_w = h[u] * h[v] / 4.0;
    for (int cv = 0; cv < n[v]; ++cv)
      for (int cu = 0; cu < n[u]; ++cu) {
        std::array<int, 3> cidx{};
        cidx[axis] = upper ? n[axis] - 1 : 0;
        cidx[u] = cu;
        cidx[v] = cv;
        const int cell = cidx[0] + n[0] * (cidx[1] + n[1] * cidx[2]);
        const auto nodes = mesh_.cell_nodes(cell);
        const Vec3 o = mesh_.cell_origin(cell);
        for (int gv = 0; gv < 2; ++gv)
          for (int gu = 0; gu < 2; ++gu) {
            Vec3 xi;
            xi[axis] = upper ? 1.0 : -1.0;
            xi[u] = gu ? kGauss : -kGauss;
            xi[v] = gv ? kGauss : -kGauss;
            FaceQuadraturePoint fp;
            fp.side = static_cast<Side>(s);
            fp.x = o + 0.5 * (xi + Vec3::Ones()).cwiseProduct(h);
            fp.weight = area_w;
            int slot = 0;
            for (int a = 0; a < 8; ++a) {
              const Vec3 c = reference_corner(a);
              if (c[axis] != xi[axis]) continue;
              fp.nodes[slot] = nodes[a];
              fp.shape[slot] = 0.25 * (1.0 + c[u] * xi[u]) * (1.0 + c[v] * xi[v]);
              ++slot;
            }
            face_points_.push_back(fp);
          }
      }
  }
}

Vector FEAssembly::expand_reduced(const Vector& reduced) const {
  if (reduced.size() != reduced_dim()) throw ValidationError("reduced displacement vector has wrong length");
  Vector full = Vector::Zero(full_vector_dim());
  for (std::size_t r = 0; r < interior_nodes_.size(); ++r)
    full.segment<3>(3 * interior_nodes_[r]) = reduced.segment<3>(3 * r);
  return full;
}

Vector FEAssembly::restrict_to_interior(const Vector& full) const {
  if (full.size() != full_vector_dim()) throw ValidationError("nodal vector field has wrong length");
  Vector reduced(reduced_dim());
  for (std::size_t r = 0; r < interior_nodes_.size(); ++r)
    reduced.segment<3>(3 * r) = full.segment<3>(3 * interior_nodes_[r]);
  return reduced;
}

Vector FEAssembly::scalar_at_qp(const Vector& nodal) const {
  if (nodal.size() != scalar_dim()) throw ValidationError("nodal scalar field has wrong length");
  Vector out(qp_count());
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const auto nodes = mesh_.cell_nodes(c);
    for (int lq = 0; lq < 8; ++lq) {
      double s = 0.0;
      for (int a = 0; a < 8; ++a) s += shape_[lq][a] * nodal[nodes[a]];
      out[8 * c + lq] = s;
    }
  }
  return out;
}

Vector FEAssembly::scalar_load(const Vector& qp_values) const {
  if (qp_values.size() != qp_count()) throw ValidationError("quadrature field has wrong length");
  Vector out = Vector::Zero(scalar_dim());
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const auto nodes = mesh_.cell_nodes(c);
    for (int lq = 0; lq < 8; ++lq) {
      const double f = weights_[8 * c + lq] * qp_values[8 * c + lq];
      for (int a = 0; a < 8; ++a) out[nodes[a]] += shape_[lq][a] * f;
    }
  }
  return out;
}

std::vector<Vec3> FEAssembly::gradient_at_qp(const Vector& nodal) const {
  if (nodal.size() != scalar_dim()) throw ValidationError("nodal scalar field has wrong length");
  std::vector<Vec3> out(qp_count());
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const auto nodes = mesh_.cell_nodes(c);
    for (int lq = 0; lq < 8; ++lq) {
      Vec3 g = Vec3::Zero();
      for (int a = 0; a < 8; ++a) g += nodal[nodes[a]] * grad_[lq][a];
      out[8 * c + lq] = g;
    }
  }
  return out;
}

QPTensorField FEAssembly::strain_full(const Vector& u_full) const {
  if (u_full.size() != full_vector_dim()) throw ValidationError("nodal vector field has wrong length");
  QPTensorField out(qp_count());
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const auto nodes = mesh_.cell_nodes(c);
    for (int lq = 0; lq < 8; ++lq) {
      Vec6 e = Vec6::Zero();
      for (int a = 0; a < 8; ++a)
        for (int k = 0; k < 3; ++k) e += u_full[3 * nodes[a] + k] * strain_row(grad_[lq][a], k);
      out.data().segment<6>(6 * (8 * c + lq)) = e;
    }
  }
  return out;
}

Vector FEAssembly::divergence_full(const Vector& u_full) const {
  if (u_full.size() != full_vector_dim()) throw ValidationError("nodal vector field has wrong length");
  Vector out(qp_count());
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const auto nodes = mesh_.cell_nodes(c);
    for (int lq = 0; lq < 8; ++lq) {
      double s = 0.0;
      for (int a = 0; a < 8; ++a)
        for (int k = 0; k < 3; ++k) s += u_full[3 * nodes[a] + k] * grad_[lq][a][k];
      out[8 * c + lq] = s;
    }
  }
  return out;
}

Vector FEAssembly::load_full(const std::function<Vec3(const Vec3&)>& f) const {
  Vector b = Vector::Zero(full_vector_dim());
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const auto nodes = mesh_.cell_nodes(c);
    for (int lq = 0; lq < 8; ++lq) {
      const int q = 8 * c + lq;
      const Vec3 fv = f(points_[q]);
      for (int a = 0; a < 8; ++a) b.segment<3>(3 * nodes[a]) += weights_[q] * shape_[lq][a] * fv;
    }
  }
  return b;
}

QPTensorField FEAssembly::apply_D(const QPTensorField& a) const {
  QPTensorField out(a.size());
  const Mat6& dm = d_.mandel();
  for (int q = 0; q < a.size(); ++q) out.data().segment<6>(6 * q) = dm * a.data().segment<6>(6 * q);
  return out;
}

double FEAssembly::inner_D(const QPTensorField& a, const QPTensorField& b) const {
  if (a.size() != qp_count() || b.size() != qp_count()) throw ValidationError("tensor field has wrong length");
  const Mat6& dm = d_.mandel();
  double s = 0.0;
  for (int q = 0; q < a.size(); ++q)
    s += weights_[q] * (dm * a.data().segment<6>(6 * q)).dot(b.data().segment<6>(6 * q));
  return s;
}

FEAssembly assemble(const BoxMesh& mesh, const ElasticityTensor& d) {
  FEAssembly as(mesh, d);
  Eigen::SimplicialLLT<SparseMatrix> mt(as.mass_theta());
  Eigen::SimplicialLLT<SparseMatrix> mu(as.mass_u());
  if (mt.info() != Eigen::Success || mu.info() != Eigen::Success) throw Error("singular mass matrix");
  return as;
}

QPTensorField strain_of(const FEAssembly& as, const Vector& u_reduced) {
  return as.strain_full(as.expand_reduced(u_reduced));
}

double integrate_qp(const FEAssembly& as, const Vector& values) {
  if (values.size() != as.qp_count()) throw ValidationError("quadrature field has wrong length");
  return as.qp_weights().dot(values);
}

double integrate_qp(const FEAssembly& as, const QPTensorField& field,
                    const std::function<double(const SymTensor&)>& f) {
  if (field.size() != as.qp_count()) throw ValidationError("quadrature field has wrong length");
  double s = 0.0;
  for (int q = 0; q < field.size(); ++q) s += as.qp_weights()[q] * f(field.at(q));
  return s;
}

double boundary_integral(const FEAssembly& as, const FaceData& g, const Vector& v_nodal) {
  if (v_nodal.size() != as.scalar_dim()) throw ValidationError("nodal scalar field has wrong length");
  double s = 0.0;
  for (const auto& fp : as.face_points()) {
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v += fp.shape[a] * v_nodal[fp.nodes[a]];
    s += fp.weight * g(fp.x, fp.side) * v;
  }
  return s;
}

Vector boundary_load(const FEAssembly& as, const FaceData& g) {
  Vector b = Vector::Zero(as.scalar_dim());
  for (const auto& fp : as.face_points()) {
    const double gv = fp.weight * g(fp.x, fp.side);
    for (int a = 0; a < 4; ++a) b[fp.nodes[a]] += gv * fp.shape[a];
  }
  return b;
}

}  // namespace tve
