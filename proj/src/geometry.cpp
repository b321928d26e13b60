#include "porehom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>

namespace porehom {

VoxelGrid::VoxelGrid(int dim, int n, bool periodic, std::vector<std::uint8_t> pore)
    : dim_(dim), n_(n), periodic_(periodic), pore_(std::move(pore)) {
  if (dim < 1 || dim > 3) throw GeometryError("dimension must be 1, 2 or 3");
  if (n < 1) throw GeometryError("grid needs at least one cell per side");
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    strides_[a] = total;
    total *= static_cast<std::size_t>(n);
  }
  if (pore_.size() != total) throw GeometryError("mask size does not match grid");
  num_pore_ = static_cast<std::size_t>(std::count_if(pore_.begin(), pore_.end(),
                                                     [](std::uint8_t v) { return v != 0; }));
}

double VoxelGrid::cell_volume() const { return std::pow(h(), dim_); }

CellCoord VoxelGrid::coord(std::size_t cell) const {
  CellCoord c{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    c[a] = static_cast<int>(cell % static_cast<std::size_t>(n_));
    cell /= static_cast<std::size_t>(n_);
  }
  return c;
}

std::size_t VoxelGrid::index(const CellCoord& c) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) idx += static_cast<std::size_t>(c[a]) * strides_[a];
  return idx;
}

std::array<double, 3> VoxelGrid::center(std::size_t cell) const {
  const auto c = coord(cell);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = (c[a] + 0.5) * h();
  return x;
}

bool VoxelGrid::neighbor(std::size_t cell, int axis, int step, std::size_t& out) const {
  const int ca = static_cast<int>((cell / strides_[axis]) % static_cast<std::size_t>(n_));
  int next = ca + step;
  if (next < 0 || next >= n_) {
    if (!periodic_) return false;
    next = (next + n_) % n_;
  }
  out = cell + (static_cast<std::ptrdiff_t>(next) - ca) * static_cast<std::ptrdiff_t>(strides_[axis]);
  return true;
}

bool pore_connected(const VoxelGrid& grid) {
  if (grid.num_pore() == 0) return false;
  std::vector<std::uint8_t> seen(grid.num_cells(), 0);
  std::size_t start = 0;
  while (!grid.is_pore(start)) ++start;
  std::queue<std::size_t> todo;
  todo.push(start);
  seen[start] = 1;
  std::size_t visited = 0;
  while (!todo.empty()) {
    const std::size_t c = todo.front();
    todo.pop();
    ++visited;
    for (int a = 0; a < grid.dim(); ++a) {
      for (int s : {-1, 1}) {
        std::size_t nb;
        if (grid.neighbor(c, a, s, nb) && grid.is_pore(nb) && !seen[nb]) {
          seen[nb] = 1;
          todo.push(nb);
        }
      }
    }
  }
  return visited == grid.num_pore();
}

namespace {

UnitCell finish_cell(UnitCell cell) {
  if (!pore_connected(cell.grid)) throw GeometryError("pore region of the unit cell is not connected");
  cell.porosity = static_cast<double>(cell.grid.num_pore()) / static_cast<double>(cell.grid.num_cells());
  return cell;
}

}  // namespace

UnitCell build_unit_cell(int dim, InclusionShape shape, double radius, int n_y) {
  if (dim != 2 && dim != 3) throw GeometryError("dim must be 2 or 3");
  if (n_y < 8 || n_y % 2 != 0) throw GeometryError("n_y must be an even integer >= 8");
  if (!(radius >= 0.0)) throw GeometryError("inclusion radius must be non-negative");
  if (radius + 1.0 / n_y >= 0.5)
    throw GeometryError("inclusion closure is not contained in the cell (need r + 1/n_y < 0.5)");

  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n_y);
  VoxelGrid probe(dim, n_y, true, std::vector<std::uint8_t>(total, 1));
  std::vector<std::uint8_t> pore(total, 1);
  for (std::size_t c = 0; c < total; ++c) {
    const auto x = probe.center(c);
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += (x[a] - 0.5) * (x[a] - 0.5);
    if (r2 < radius * radius) pore[c] = 0;
  }
  UnitCell cell;
  cell.dim = dim;
  cell.shape = shape;
  cell.radius = radius;
  cell.n_y = n_y;
  cell.grid = VoxelGrid(dim, n_y, true, std::move(pore));
  return finish_cell(std::move(cell));
}

UnitCell unit_cell_from_mask(int dim, int n_y, std::vector<std::uint8_t> pore) {
  UnitCell cell;
  cell.dim = dim;
  cell.n_y = n_y;
  cell.radius = 0.0;
  cell.grid = VoxelGrid(dim, n_y, true, std::move(pore));
  return finish_cell(std::move(cell));
}

PerforatedDomain tile_domain(const UnitCell& cell, int m, std::size_t max_cells) {
  if (m < 1) throw GeometryError("tiling factor m must be >= 1");
  const int dim = cell.dim;
  const int N = m * cell.n_y;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    total *= static_cast<std::size_t>(N);
    if (total > max_cells) throw GeometryError("tiled grid exceeds the configured maximum cell count");
  }
  std::vector<std::uint8_t> pore(total);
  VoxelGrid shape(dim, N, false, std::vector<std::uint8_t>(total, 1));
  for (std::size_t c = 0; c < total; ++c) {
    auto g = shape.coord(c);
    for (int a = 0; a < dim; ++a) g[a] %= cell.n_y;
    pore[c] = cell.grid.mask()[cell.grid.index(g)];
  }
  PerforatedDomain d;
  d.cell = cell;
  d.m = m;
  d.eps = 1.0 / m;
  d.grid = VoxelGrid(dim, N, false, std::move(pore));
  return d;
}

FaceLabel high_face_label(const VoxelGrid& grid, std::size_t cell, int axis) {
  std::size_t nb;
  const bool inside = grid.neighbor(cell, axis, 1, nb);
  const bool here = grid.is_pore(cell);
  if (!inside) return here ? FaceLabel::outer_wall : FaceLabel::solid;
  const bool there = grid.is_pore(nb);
  if (here && there) return FaceLabel::interior_pore;
  if (here != there) return FaceLabel::obstacle_interface;
  return FaceLabel::solid;
}

FaceCounts count_faces(const VoxelGrid& grid) {
  FaceCounts counts;
  auto bump = [&counts](FaceLabel l) {
    switch (l) {
      case FaceLabel::interior_pore: ++counts.interior_pore; break;
      case FaceLabel::outer_wall: ++counts.outer_wall; break;
      case FaceLabel::obstacle_interface: ++counts.obstacle_interface; break;
      case FaceLabel::solid: ++counts.solid; break;
    }
  };
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    for (int a = 0; a < grid.dim(); ++a) {
      bump(high_face_label(grid, c, a));
      std::size_t nb;
      if (!grid.periodic() && !grid.neighbor(c, a, -1, nb))
        bump(grid.is_pore(c) ? FaceLabel::outer_wall : FaceLabel::solid);
    }
  }
  return counts;
}

double porosity(const VoxelGrid& grid) {
  return static_cast<double>(grid.num_pore()) / static_cast<double>(grid.num_cells());
}

double porosity(const PerforatedDomain& domain) { return porosity(domain.grid); }

void write_mask_pgm(const VoxelGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const int n = grid.n();
  const int rows = grid.dim() >= 2 ? n : 1;
  out << "P5\n" << n << ' ' << rows << "\n255\n";
  const std::size_t slice = grid.dim() == 3 ? grid.stride(2) * static_cast<std::size_t>(n / 2) : 0;
  // Top row of the image is the highest x_2.
  for (int j = rows - 1; j >= 0; --j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t c = slice + static_cast<std::size_t>(i) +
                            (grid.dim() >= 2 ? grid.stride(1) * static_cast<std::size_t>(j) : 0);
      out.put(static_cast<char>(grid.is_pore(c) ? 255 : 0));
    }
  }
}

void write_mask_csv(const VoxelGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "index,i,j,k,pore\n";
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const auto x = grid.coord(c);
    out << c << ',' << x[0] << ',' << x[1] << ',' << x[2] << ',' << int(grid.is_pore(c)) << '\n';
  }
}

}  // namespace porehom
