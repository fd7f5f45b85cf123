#include "mmc/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmc/errors.hpp"
#include "mmc/femcore.hpp"

namespace mmc {

NodalField::NodalField(MeshPtr mesh, double value)
    : mesh_(std::move(mesh)), values_(mesh_->num_nodes(), value) {
  if (!std::isfinite(value)) throw DomainViolation("nodal field: non-finite value");
}

NodalField::NodalField(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (values_.size() != mesh_->num_nodes()) {
    std::ostringstream os;
    os << "nodal field: expected " << mesh_->num_nodes() << " values, got " << values_.size();
    throw ConfigError(os.str());
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j])) {
      throw DomainViolation("nodal field: non-finite value at node " + std::to_string(j));
    }
  }
}

double NodalField::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
double NodalField::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

NodalField& NodalField::operator+=(const NodalField& o) { return add_scaled(1.0, o); }

NodalField& NodalField::operator-=(const NodalField& o) { return add_scaled(-1.0, o); }

NodalField& NodalField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

NodalField& NodalField::add_scaled(double s, const NodalField& o) {
  require_same_mesh(*this, o);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += s * o.values_[j];
  return *this;
}

void require_same_mesh(const NodalField& a, const NodalField& b) {
  if (a.mesh_ptr() != b.mesh_ptr()) throw MeshMismatch("fields live on different meshes");
}

MeanZeroField MeanZeroField::checked(NodalField f) {
  const double mean = lumped_mass(f);
  const double tol = 1e-11 * lumped_norm(f) * std::sqrt(f.mesh().domain_area());
  if (std::abs(mean) > tol) {
    std::ostringstream os;
    os << "field is not mean-zero: (v,1)_Q = " << mean << " exceeds " << tol;
    throw NonZeroMean(os.str());
  }
  return MeanZeroField(std::move(f));
}

MeanZeroField MeanZeroField::project(NodalField f) {
  // lumped_mass is compensated; a plain sum leaves a constant error that grows
  // with the node count and that Newton steps cannot remove.
  const double shift = lumped_mass(f) / f.mesh().domain_area();
  for (double& v : f.values()) v -= shift;
  return MeanZeroField(std::move(f));
}

}  // namespace mmc
