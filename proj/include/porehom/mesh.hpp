#pragma once

#include "porehom/geometry.hpp"
#include "porehom/linear_solver.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace porehom {

/// Staggered (MAC) discretization of a masked voxel grid.
///
/// Scalars live on pore cells. Velocity components live on the open faces
/// (faces separating two pore cells); every other face carries an implicit
/// zero normal velocity. Shear strain lives on cell edges ("corners" in 2D).
/// Unknown numbering groups faces by axis.
///
/// `cells_per_unit` is m = 1/eps: micro coordinates are y = frac(m x).
class StaggeredMesh {
 public:
  struct Face {
    int axis;
    std::size_t cell;  // the face is the high-side face of this cell
  };
  struct Edge {
    int pair;                 // index into shear_pairs()
    std::array<double, 3> x;  // position in (0,1)^dim
    double weight;            // 1 inside, 1/2 on an outer wall
  };
  /// Adjacent momentum control volumes for the skew convection form.
  struct Interface {
    long i, j;     // face dofs, j is i shifted by +e_dir
    long t0, t1;   // transport faces averaged onto the interface (-1 = zero)
  };
  /// Pair of an a-face and a neighbouring b-face (a != b) offset by half a cell in both axes.
  struct FaceNeighbour {
    long f, g;
  };

  StaggeredMesh(VoxelGrid grid, int cells_per_unit = 1);

  const VoxelGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  double h() const { return grid_.h(); }
  double cell_volume() const { return grid_.cell_volume(); }
  int cells_per_unit() const { return m_; }
  int num_shear() const { return sym_count_ - dim(); }

  std::size_t num_pore() const { return pore_cells_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  /// Volume of the pore region.
  double pore_volume() const { return static_cast<double>(num_pore()) * cell_volume(); }

  long cell_dof(std::size_t cell) const { return cell_dof_[cell]; }
  std::size_t dof_cell(std::size_t dof) const { return pore_cells_[dof]; }
  long face_dof(int axis, std::size_t cell) const { return face_dof_[axis][cell]; }
  const Face& face(std::size_t dof) const { return faces_[dof]; }
  std::size_t face_begin(int axis) const { return face_offset_[axis]; }
  std::size_t face_end(int axis) const { return face_offset_[axis + 1]; }
  std::array<double, 3> face_center(std::size_t dof) const;
  std::array<double, 3> cell_center(std::size_t dof) const { return grid_.center(pore_cells_[dof]); }
  std::array<double, 3> micro_coord(const std::array<double, 3>& x) const;

  /// Cell divergence of face fields: (div u)_c = sum_a (u_a(c) - u_a(c - e_a)) / h.
  const SparseMatrix& div() const { return div_; }
  /// Face gradient; equals -div^T (summation by parts).
  const SparseMatrix& grad() const { return grad_; }
  /// Neumann Laplacian div * grad on pore cells (negative semidefinite).
  const SparseMatrix& laplacian() const { return lap_; }

  const std::vector<Edge>& edges() const { return edges_; }
  /// Strain in extended layout: [D_aa per (axis, pore cell) | D_ab per edge |
  /// D_ab averaged to pore cells per (pair, cell)].
  const SparseMatrix& strain() const { return strain_; }
  std::size_t strain_diag_rows() const { return static_cast<std::size_t>(dim()) * num_pore(); }
  std::size_t strain_avg_offset() const { return strain_diag_rows() + num_edges(); }
  /// Averaging of edge shears onto pore cells, rows (pair, cell).
  const SparseMatrix& shear_to_cells() const { return shear_avg_; }

  const std::vector<Interface>& interfaces() const { return interfaces_; }
  const std::vector<FaceNeighbour>& face_neighbours() const { return face_nbrs_; }

  /// Face velocity -> cell-centered average (rows (axis, cell)).
  const SparseMatrix& face_to_cells() const { return face_avg_; }

  /// Vertex-free lookups used by the unfolding and sampling helpers.
  double integrate_cells(const Vector& v) const { return v.sum() * cell_volume(); }
  double dot_cells(const Vector& a, const Vector& b) const { return a.dot(b) * cell_volume(); }
  double dot_faces(const Vector& a, const Vector& b) const { return a.dot(b) * cell_volume(); }

 private:
  void build_faces();
  void build_div();
  void build_edges();
  void build_interfaces();
  void build_face_neighbours();

  long face_at_node(int axis, int node, const CellCoord& c) const;

  VoxelGrid grid_;
  int m_ = 1;
  int sym_count_ = 3;
  std::vector<std::size_t> pore_cells_;
  std::vector<long> cell_dof_;
  std::array<std::vector<long>, 3> face_dof_;
  std::vector<Face> faces_;
  std::array<std::size_t, 4> face_offset_{};
  SparseMatrix div_, grad_, lap_, strain_, shear_avg_, face_avg_;
  std::vector<Edge> edges_;
  std::vector<Interface> interfaces_;
  std::vector<FaceNeighbour> face_nbrs_;
};

}  // namespace porehom
