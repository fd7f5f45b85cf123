#include "mmc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmc/errors.hpp"

namespace mmc {

namespace {

// Offsets of the three vertices of each triangle type relative to the
// lower-left corner of its grid square. Both are counter-clockwise.
constexpr std::array<std::array<std::array<int, 2>, 3>, 2> kTriangleOffsets{{
    {{{0, 0}, {1, 0}, {1, 1}}},
    {{{0, 0}, {1, 1}, {0, 1}}},
}};

}  // namespace

std::shared_ptr<const PeriodicMesh> PeriodicMesh::build_uniform(double L, int n) {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw ConfigError("mesh: domain length must be positive, got " + std::to_string(L));
  }
  if (n < 2) {
    throw ConfigError("mesh: need at least 2 nodes per side, got " + std::to_string(n));
  }
  return std::shared_ptr<const PeriodicMesh>(new PeriodicMesh(L, n));
}

PeriodicMesh::PeriodicMesh(double L, int n) : L_(L), n_(n), h_(L / n) {
  const std::size_t ne = num_elements();
  for (int k = 0; k < 3; ++k) {
    vertex_[k].resize(ne);
    grad_x_[k].resize(ne);
    grad_y_[k].resize(ne);
  }
  area_.resize(ne);
  diameter_.resize(ne);
  patch_area_.assign(num_nodes(), 0.0);

  std::size_t e = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      for (const auto& tri : kTriangleOffsets) {
        std::array<Vec2, 3> p;
        for (int k = 0; k < 3; ++k) {
          vertex_[k][e] = node_index(i + tri[k][0], j + tri[k][1]);
          p[k] = {(i + tri[k][0]) * h_, (j + tri[k][1]) * h_};
        }
        const double twice_area =
            (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
        area_[e] = 0.5 * twice_area;
        // grad chi_k = (y_{k+1} - y_{k+2}, x_{k+2} - x_{k+1}) / (2 area)
        for (int k = 0; k < 3; ++k) {
          const Vec2& a = p[(k + 1) % 3];
          const Vec2& b = p[(k + 2) % 3];
          grad_x_[k][e] = (a.y - b.y) / twice_area;
          grad_y_[k][e] = (b.x - a.x) / twice_area;
        }
        double diam = 0.0;
        for (int k = 0; k < 3; ++k) {
          const Vec2& a = p[k];
          const Vec2& b = p[(k + 1) % 3];
          diam = std::max(diam, std::hypot(a.x - b.x, a.y - b.y));
        }
        diameter_[e] = diam;
        for (int k = 0; k < 3; ++k) patch_area_[vertex_[k][e]] += area_[e];
        ++e;
      }
    }
  }
  lumped_weight_.resize(num_nodes());
  for (std::size_t j = 0; j < num_nodes(); ++j) lumped_weight_[j] = patch_area_[j] / 3.0;
}

std::int32_t PeriodicMesh::node_index(long i, long j) const noexcept {
  const long n = n_;
  const long wi = ((i % n) + n) % n;
  const long wj = ((j % n) + n) % n;
  return static_cast<std::int32_t>(wj * n + wi);
}

Vec2 PeriodicMesh::node_position(std::size_t node) const noexcept {
  const auto i = static_cast<long>(node % n_);
  const auto j = static_cast<long>(node / n_);
  return {i * h_, j * h_};
}

std::array<Vec2, 3> PeriodicMesh::element_vertices(std::size_t e) const noexcept {
  const std::size_t square = e / 2;
  const auto i = static_cast<long>(square % n_);
  const auto j = static_cast<long>(square / n_);
  const auto& tri = kTriangleOffsets[e % 2];
  std::array<Vec2, 3> p;
  for (int k = 0; k < 3; ++k) p[k] = {(i + tri[k][0]) * h_, (j + tri[k][1]) * h_};
  return p;
}

double PeriodicMesh::shape_regularity() const noexcept {
  double c = 0.0;
  for (std::size_t e = 0; e < num_elements(); ++e) {
    c = std::max(c, diameter_[e] * diameter_[e] / area_[e]);
  }
  return c;
}

Vec2 p1_gradient(const PeriodicMesh& mesh, std::span<const double> values, std::size_t e) {
  Vec2 g;
  const auto nodes = mesh.element_nodes(e);
  for (int k = 0; k < 3; ++k) {
    const Vec2 b = mesh.basis_gradient(e, k);
    g.x += values[nodes[k]] * b.x;
    g.y += values[nodes[k]] * b.y;
  }
  return g;
}

}  // namespace mmc
