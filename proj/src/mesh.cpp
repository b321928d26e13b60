#include "porehom/mesh.hpp"

#include "porehom/viscosity.hpp"

#include <cmath>

namespace porehom {

namespace {
using Triplet = Eigen::Triplet<double>;
}

StaggeredMesh::StaggeredMesh(VoxelGrid grid, int cells_per_unit)
    : grid_(std::move(grid)), m_(cells_per_unit), sym_count_(sym_size(grid_.dim())) {
  if (m_ < 1) throw GeometryError("cells_per_unit must be >= 1");
  build_faces();
  build_div();
  build_edges();
  build_interfaces();
  build_face_neighbours();
}

std::array<double, 3> StaggeredMesh::face_center(std::size_t dof) const {
  auto x = grid_.center(faces_[dof].cell);
  x[faces_[dof].axis] += 0.5 * h();
  return x;
}

std::array<double, 3> StaggeredMesh::micro_coord(const std::array<double, 3>& x) const {
  std::array<double, 3> y{0.0, 0.0, 0.0};
  for (int a = 0; a < dim(); ++a) {
    const double s = x[a] * m_;
    y[a] = s - std::floor(s);
  }
  return y;
}

void StaggeredMesh::build_faces() {
  const std::size_t nc = grid_.num_cells();
  cell_dof_.assign(nc, -1);
  for (std::size_t c = 0; c < nc; ++c) {
    if (grid_.is_pore(c)) {
      cell_dof_[c] = static_cast<long>(pore_cells_.size());
      pore_cells_.push_back(c);
    }
  }
  for (int a = 0; a < dim(); ++a) {
    face_offset_[a] = faces_.size();
    face_dof_[a].assign(nc, -1);
    for (std::size_t c = 0; c < nc; ++c) {
      if (high_face_label(grid_, c, a) == FaceLabel::interior_pore) {
        face_dof_[a][c] = static_cast<long>(faces_.size());
        faces_.push_back({a, c});
      }
    }
  }
  for (int a = dim(); a < 4; ++a) face_offset_[a] = faces_.size();
}

void StaggeredMesh::build_div() {
  const double inv_h = 1.0 / h();
  std::vector<Triplet> t;
  std::vector<Triplet> avg;
  const auto np = static_cast<long>(num_pore());
  for (std::size_t p = 0; p < num_pore(); ++p) {
    const std::size_t c = pore_cells_[p];
    for (int a = 0; a < dim(); ++a) {
      const long hi = face_dof_[a][c];
      if (hi >= 0) {
        t.emplace_back(p, hi, inv_h);
        avg.emplace_back(a * np + static_cast<long>(p), hi, 0.5);
      }
      std::size_t lo_cell;
      if (grid_.neighbor(c, a, -1, lo_cell)) {
        const long lo = face_dof_[a][lo_cell];
        if (lo >= 0) {
          t.emplace_back(p, lo, -inv_h);
          avg.emplace_back(a * np + static_cast<long>(p), lo, 0.5);
        }
      }
    }
  }
  div_.resize(static_cast<long>(num_pore()), static_cast<long>(num_faces()));
  div_.setFromTriplets(t.begin(), t.end());
  grad_ = -SparseMatrix(div_.transpose());
  lap_ = div_ * grad_;
  face_avg_.resize(dim() * np, static_cast<long>(num_faces()));
  face_avg_.setFromTriplets(avg.begin(), avg.end());
}

long StaggeredMesh::face_at_node(int axis, int node, const CellCoord& c) const {
  const int n = grid_.n();
  for (int b = 0; b < dim(); ++b) {
    if (b == axis) continue;
    if (c[b] < 0 || c[b] >= n) return -1;
  }
  int low = node - 1;
  if (low < 0 || low >= n) {
    if (!grid_.periodic()) return -1;
    low = (low + n) % n;
  }
  CellCoord cc = c;
  cc[axis] = low;
  return face_dof_[axis][grid_.index(cc)];
}

void StaggeredMesh::build_edges() {
  const int n = grid_.n();
  const bool periodic = grid_.periodic();
  const int nodes = periodic ? n : n + 1;
  const double inv_h = 1.0 / h();
  const auto pairs = shear_pairs();
  std::vector<Triplet> t;
  const long diag_rows = static_cast<long>(strain_diag_rows());

  // Diagonal strains.
  for (std::size_t p = 0; p < num_pore(); ++p) {
    const std::size_t c = pore_cells_[p];
    for (int a = 0; a < dim(); ++a) {
      const long row = a * static_cast<long>(num_pore()) + static_cast<long>(p);
      if (face_dof_[a][c] >= 0) t.emplace_back(row, face_dof_[a][c], inv_h);
      std::size_t lo_cell;
      if (grid_.neighbor(c, a, -1, lo_cell) && face_dof_[a][lo_cell] >= 0)
        t.emplace_back(row, face_dof_[a][lo_cell], -inv_h);
    }
  }

  // Edge lookup per pair, indexed by (node_a, node_b, cell_c).
  std::vector<std::vector<long>> lookup(num_shear());
  std::vector<Triplet> shear_rows;
  for (int s = 0; s < num_shear(); ++s) {
    const int a = pairs[s][0];
    const int b = pairs[s][1];
    const int c3 = dim() == 3 ? 3 - a - b : -1;
    const int nc3 = dim() == 3 ? n : 1;
    lookup[s].assign(static_cast<std::size_t>(nodes) * nodes * nc3, -1);
    for (int kc = 0; kc < nc3; ++kc) {
      for (int kb = 0; kb < nodes; ++kb) {
        for (int ka = 0; ka < nodes; ++ka) {
          // The four cells around the edge.
          bool blocked = false;
          for (int da = 0; da < 2 && !blocked; ++da) {
            for (int db = 0; db < 2 && !blocked; ++db) {
              int ia = ka - 1 + da;
              int ib = kb - 1 + db;
              if (periodic) {
                ia = (ia + n) % n;
                ib = (ib + n) % n;
              } else if (ia < 0 || ia >= n || ib < 0 || ib >= n) {
                continue;
              }
              CellCoord cc{0, 0, 0};
              cc[a] = ia;
              cc[b] = ib;
              if (c3 >= 0) cc[c3] = kc;
              if (!grid_.is_pore(grid_.index(cc))) blocked = true;
            }
          }
          if (blocked) continue;  // touches an obstacle: zero shear stress
          const bool wall_a = !periodic && (ka == 0 || ka == n);
          const bool wall_b = !periodic && (kb == 0 || kb == n);
          if (wall_a && wall_b) continue;

          std::vector<std::pair<long, double>> stencil;
          CellCoord base{0, 0, 0};
          if (c3 >= 0) base[c3] = kc;
          auto ua = [&](int cell_b) {
            CellCoord cc = base;
            cc[b] = periodic ? (cell_b + n) % n : cell_b;
            return face_at_node(a, ka, cc);
          };
          auto ub = [&](int cell_a) {
            CellCoord cc = base;
            cc[a] = periodic ? (cell_a + n) % n : cell_a;
            return face_at_node(b, kb, cc);
          };
          double weight = 1.0;
          if (wall_b) {
            // Ghost value -u_a across a no-slip wall.
            weight = 0.5;
            const long f = kb == 0 ? ua(0) : ua(n - 1);
            if (f >= 0) stencil.emplace_back(f, kb == 0 ? inv_h : -inv_h);
          } else if (wall_a) {
            weight = 0.5;
            const long f = ka == 0 ? ub(0) : ub(n - 1);
            if (f >= 0) stencil.emplace_back(f, ka == 0 ? inv_h : -inv_h);
          } else {
            const long a_hi = ua(kb), a_lo = ua(kb - 1);
            const long b_hi = ub(ka), b_lo = ub(ka - 1);
            if (a_hi >= 0) stencil.emplace_back(a_hi, 0.5 * inv_h);
            if (a_lo >= 0) stencil.emplace_back(a_lo, -0.5 * inv_h);
            if (b_hi >= 0) stencil.emplace_back(b_hi, 0.5 * inv_h);
            if (b_lo >= 0) stencil.emplace_back(b_lo, -0.5 * inv_h);
          }
          const long row = static_cast<long>(edges_.size());
          std::array<double, 3> x{0.0, 0.0, 0.0};
          x[a] = ka * h();
          x[b] = kb * h();
          if (c3 >= 0) x[c3] = (kc + 0.5) * h();
          edges_.push_back({s, x, weight});
          lookup[s][(static_cast<std::size_t>(kc) * nodes + kb) * nodes + ka] = row;
          for (const auto& [f, v] : stencil) shear_rows.emplace_back(row, f, v);
        }
      }
    }
  }

  // Averaging of edge shears onto cells (1/4 per surrounding edge in the pair plane).
  std::vector<Triplet> avg;
  for (std::size_t p = 0; p < num_pore(); ++p) {
    const auto cc = grid_.coord(pore_cells_[p]);
    for (int s = 0; s < num_shear(); ++s) {
      const int a = pairs[s][0];
      const int b = pairs[s][1];
      const int kc = dim() == 3 ? cc[3 - a - b] : 0;
      for (int da = 0; da < 2; ++da) {
        for (int db = 0; db < 2; ++db) {
          int ka = cc[a] + da;
          int kb = cc[b] + db;
          if (periodic) {
            ka %= n;
            kb %= n;
          }
          const long e = lookup[s][(static_cast<std::size_t>(kc) * nodes + kb) * nodes + ka];
          if (e >= 0) avg.emplace_back(s * static_cast<long>(num_pore()) + static_cast<long>(p), e, 0.25);
        }
      }
    }
  }
  shear_avg_.resize(num_shear() * static_cast<long>(num_pore()), static_cast<long>(num_edges()));
  shear_avg_.setFromTriplets(avg.begin(), avg.end());

  SparseMatrix edge_strain(static_cast<long>(num_edges()), static_cast<long>(num_faces()));
  edge_strain.setFromTriplets(shear_rows.begin(), shear_rows.end());
  SparseMatrix avg_strain = shear_avg_ * edge_strain;

  for (int k = 0; k < edge_strain.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(edge_strain, k); it; ++it)
      t.emplace_back(diag_rows + it.row(), it.col(), it.value());
  const long avg_off = static_cast<long>(strain_avg_offset());
  for (int k = 0; k < avg_strain.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(avg_strain, k); it; ++it)
      t.emplace_back(avg_off + it.row(), it.col(), it.value());
  strain_.resize(avg_off + num_shear() * static_cast<long>(num_pore()), static_cast<long>(num_faces()));
  strain_.setFromTriplets(t.begin(), t.end());
}

void StaggeredMesh::build_interfaces() {
  for (std::size_t i = 0; i < num_faces(); ++i) {
    const auto [a, c] = faces_[i];
    std::size_t c_next;  // c + e_a, pore since the face is open
    grid_.neighbor(c, a, 1, c_next);
    for (int b = 0; b < dim(); ++b) {
      std::size_t cb;
      if (!grid_.neighbor(c, b, 1, cb)) continue;
      const long j = face_dof_[a][cb];
      if (j < 0) continue;
      Interface in{static_cast<long>(i), j, -1, -1};
      if (b == a) {
        in.t0 = static_cast<long>(i);
        in.t1 = j;
      } else {
        in.t0 = face_dof_[b][c];
        in.t1 = face_dof_[b][c_next];
      }
      interfaces_.push_back(in);
    }
  }
}

void StaggeredMesh::build_face_neighbours() {
  for (std::size_t f = 0; f < num_faces(); ++f) {
    const auto [a, c] = faces_[f];
    std::size_t c_next;
    grid_.neighbor(c, a, 1, c_next);
    for (int b = 0; b < dim(); ++b) {
      if (b == a) continue;
      for (std::size_t base : {c, c_next}) {
        const long up = face_dof_[b][base];
        if (up >= 0) face_nbrs_.push_back({static_cast<long>(f), up});
        std::size_t lo;
        if (grid_.neighbor(base, b, -1, lo) && face_dof_[b][lo] >= 0)
          face_nbrs_.push_back({static_cast<long>(f), face_dof_[b][lo]});
      }
    }
  }
}

}  // namespace porehom
