#pragma once

#include "porehom/fields.hpp"
#include "porehom/geometry.hpp"
#include "porehom/mesh.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace testing_support {

inline porehom::MeshPtr open_box(int n) {
  const auto cell = porehom::build_unit_cell(2, porehom::InclusionShape::disk, 0.0, 8);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 1);
  return std::make_shared<porehom::StaggeredMesh>(porehom::VoxelGrid(2, n, false, mask), 1);
}

inline porehom::MeshPtr perforated(double r, int n_y, int m) {
  const auto cell = porehom::build_unit_cell(2, porehom::InclusionShape::disk, r, n_y);
  return std::make_shared<porehom::StaggeredMesh>(porehom::tile_domain(cell, m).grid, m);
}

inline porehom::Vector random_vector(long n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  porehom::Vector v(n);
  for (long i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

inline double observed_order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

}  // namespace testing_support
