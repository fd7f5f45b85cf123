#pragma once

#include <span>
#include <vector>

#include "mmc/mesh.hpp"

namespace mmc {

/// One real value per mesh node: the coefficient vector of a P1 function.
class NodalField {
 public:
  NodalField() = default;
  explicit NodalField(MeshPtr mesh, double value = 0.0);
  /// Throws ConfigError on a length mismatch and DomainViolation on non-finite values.
  NodalField(MeshPtr mesh, std::vector<double> values);

  template <class F>
  static NodalField interpolate(MeshPtr mesh, F&& f) {
    std::vector<double> v(mesh->num_nodes());
    for (std::size_t j = 0; j < v.size(); ++j) {
      const Vec2 p = mesh->node_position(j);
      v[j] = f(p.x, p.y);
    }
    return NodalField(std::move(mesh), std::move(v));
  }

  const PeriodicMesh& mesh() const noexcept { return *mesh_; }
  const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  double& operator[](std::size_t j) noexcept { return values_[j]; }

  double min() const noexcept;
  double max() const noexcept;

  NodalField& operator+=(const NodalField& o);
  NodalField& operator-=(const NodalField& o);
  NodalField& operator*=(double s) noexcept;
  /// this += s * o
  NodalField& add_scaled(double s, const NodalField& o);

  friend NodalField operator+(NodalField a, const NodalField& b) { return a += b; }
  friend NodalField operator-(NodalField a, const NodalField& b) { return a -= b; }
  friend NodalField operator*(double s, NodalField a) { return a *= s; }

 private:
  MeshPtr mesh_;
  std::vector<double> values_;
};

/// Throws MeshMismatch unless both fields live on the same mesh object.
void require_same_mesh(const NodalField& a, const NodalField& b);

/// A nodal field with (v, 1)_Q = 0, within 1e-11 * ||v||_Q * |Omega|^(1/2).
class MeanZeroField {
 public:
  MeanZeroField() = default;

  /// Throws NonZeroMean if the lumped mean exceeds the tolerance.
  static MeanZeroField checked(NodalField f);
  /// Subtracts the lumped mean.
  static MeanZeroField project(NodalField f);

  const NodalField& field() const noexcept { return field_; }
  const PeriodicMesh& mesh() const noexcept { return field_.mesh(); }
  std::span<const double> values() const noexcept { return field_.values(); }
  double operator[](std::size_t j) const noexcept { return field_[j]; }

  NodalField release() && { return std::move(field_); }

 private:
  explicit MeanZeroField(NodalField f) : field_(std::move(f)) {}
  NodalField field_;
};

}  // namespace mmc
