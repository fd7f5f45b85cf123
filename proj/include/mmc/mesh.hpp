#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace mmc {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform periodic triangulation of (0, L)^2.
///
/// Nodes sit at (i h, j h) for 0 <= i, j < n with h = L / n and are numbered
/// j * n + i. Every grid square with lower-left corner (i, j) is cut along its
/// (i, j)-(i+1, j+1) diagonal into two counter-clockwise triangles. Periodic
/// wrap-around is resolved at the index level, so the node set carries no
/// duplicated boundary copies.
///
/// Element geometry is cached in structure-of-arrays form so the data-parallel
/// kernels in mmc::simd can stream over it.
class PeriodicMesh {
 public:
  /// Throws ConfigError unless n >= 2 and L > 0.
  static std::shared_ptr<const PeriodicMesh> build_uniform(double L, int n);

  double length() const noexcept { return L_; }
  int nodes_per_side() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double domain_area() const noexcept { return L_ * L_; }

  std::size_t num_nodes() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  std::size_t num_elements() const noexcept { return 2 * num_nodes(); }

  /// Node index of grid position (i, j), wrapped periodically.
  std::int32_t node_index(long i, long j) const noexcept;
  Vec2 node_position(std::size_t node) const noexcept;

  std::array<std::int32_t, 3> element_nodes(std::size_t e) const noexcept {
    return {vertex_[0][e], vertex_[1][e], vertex_[2][e]};
  }
  /// Unwrapped vertex coordinates of element e (may extend past L).
  std::array<Vec2, 3> element_vertices(std::size_t e) const noexcept;

  double element_area(std::size_t e) const noexcept { return area_[e]; }
  double element_diameter(std::size_t e) const noexcept { return diameter_[e]; }
  /// Gradient of the P1 basis function attached to local vertex k of e.
  Vec2 basis_gradient(std::size_t e, int k) const noexcept {
    return {grad_x_[k][e], grad_y_[k][e]};
  }
  double patch_area(std::size_t node) const noexcept { return patch_area_[node]; }
  /// Vertex-quadrature weights area(D_j) / 3.
  std::span<const double> lumped_weights() const noexcept { return lumped_weight_; }

  /// max_e h_e^2 / area_e
  double shape_regularity() const noexcept;

  // Structure-of-arrays views for the kernels.
  std::span<const std::int32_t> vertex_column(int k) const noexcept { return vertex_[k]; }
  std::span<const double> grad_x_column(int k) const noexcept { return grad_x_[k]; }
  std::span<const double> grad_y_column(int k) const noexcept { return grad_y_[k]; }
  std::span<const double> areas() const noexcept { return area_; }
  std::span<const double> patch_areas() const noexcept { return patch_area_; }

 private:
  PeriodicMesh(double L, int n);

  double L_;
  int n_;
  double h_;
  std::array<std::vector<std::int32_t>, 3> vertex_;
  std::array<std::vector<double>, 3> grad_x_;
  std::array<std::vector<double>, 3> grad_y_;
  std::vector<double> area_;
  std::vector<double> diameter_;
  std::vector<double> patch_area_;
  std::vector<double> lumped_weight_;
};

using MeshPtr = std::shared_ptr<const PeriodicMesh>;

/// Constant gradient of the P1 interpolant of `values` on element e.
Vec2 p1_gradient(const PeriodicMesh& mesh, std::span<const double> values, std::size_t e);

}  // namespace mmc
