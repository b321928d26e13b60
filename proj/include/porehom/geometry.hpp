#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace porehom {

/// Raised when a geometry request violates its preconditions.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using CellCoord = std::array<int, 3>;

/// Uniform voxel grid on the unit box (0,1)^dim with a pore mask.
///
/// Cells are stored axis-0 fastest. A periodic grid wraps in every axis (the
/// reference cell); a walled grid has the outer box boundary as a no-slip wall
/// (the macroscopic domain).
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(int dim, int n, bool periodic, std::vector<std::uint8_t> pore);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double h() const { return 1.0 / n_; }
  bool periodic() const { return periodic_; }
  std::size_t num_cells() const { return pore_.size(); }
  std::size_t num_pore() const { return num_pore_; }
  double cell_volume() const;

  bool is_pore(std::size_t cell) const { return pore_[cell] != 0; }
  const std::vector<std::uint8_t>& mask() const { return pore_; }

  std::size_t stride(int axis) const { return strides_[axis]; }
  CellCoord coord(std::size_t cell) const;
  std::size_t index(const CellCoord& c) const;
  /// Cell center in (0,1)^dim; unused trailing components are 0.
  std::array<double, 3> center(std::size_t cell) const;

  /// Neighbor of `cell` shifted by +-1 along `axis`. Returns false when the
  /// neighbor lies outside a walled grid.
  bool neighbor(std::size_t cell, int axis, int step, std::size_t& out) const;

 private:
  int dim_ = 2;
  int n_ = 0;
  bool periodic_ = true;
  std::vector<std::uint8_t> pore_;
  std::array<std::size_t, 3> strides_{1, 0, 0};
  std::size_t num_pore_ = 0;
};

enum class InclusionShape { disk };

/// Reference cell Y = Y_p u Y_s with a centered disk (sphere in 3D) inclusion.
struct UnitCell {
  int dim = 2;
  InclusionShape shape = InclusionShape::disk;
  double radius = 0.0;
  int n_y = 0;
  VoxelGrid grid;  // periodic
  double porosity = 1.0;
};

UnitCell build_unit_cell(int dim, InclusionShape shape, double radius, int n_y);

/// Builds a cell from an explicit periodic mask (used for synthetic tests).
UnitCell unit_cell_from_mask(int dim, int n_y, std::vector<std::uint8_t> pore);

enum class FaceLabel : std::uint8_t { interior_pore, outer_wall, obstacle_interface, solid };

struct FaceCounts {
  std::size_t interior_pore = 0;
  std::size_t outer_wall = 0;
  std::size_t obstacle_interface = 0;
  std::size_t solid = 0;
};

/// Omega = (0,1)^dim tiled by m^dim copies of the cell, eps = 1/m.
struct PerforatedDomain {
  UnitCell cell;
  int m = 1;
  double eps = 1.0;
  VoxelGrid grid;  // walled, N = m * n_y

  double h() const { return grid.h(); }
  int n() const { return grid.n(); }
};

constexpr std::size_t kDefaultMaxCells = std::size_t{1} << 24;

PerforatedDomain tile_domain(const UnitCell& cell, int m, std::size_t max_cells = kDefaultMaxCells);

/// Label of the face on the high side of `cell` along `axis`.
FaceLabel high_face_label(const VoxelGrid& grid, std::size_t cell, int axis);

/// Counts every face of the grid by label; low-side boundary faces of a walled
/// grid are included.
FaceCounts count_faces(const VoxelGrid& grid);

double porosity(const VoxelGrid& grid);
double porosity(const PerforatedDomain& domain);

/// True when the pore cells form one component under face adjacency.
bool pore_connected(const VoxelGrid& grid);

/// Writes the pore mask as a binary PGM (2D, or the mid slice in 3D).
void write_mask_pgm(const VoxelGrid& grid, const std::string& path);
void write_mask_csv(const VoxelGrid& grid, const std::string& path);

}  // namespace porehom
