#include "mmc/energy.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mmc/errors.hpp"
#include "mmc/simd/kernels.hpp"

namespace mmc {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "parameters: " << name << " must be positive, got " << v;
    throw ConfigError(os.str());
  }
}

double xlogx(double x) { return x < DBL_MIN ? 0.0 : x * std::log(x); }

void require_interior(double phi1, double phi2) {
  const double phi3 = 1.0 - phi1 - phi2;
  if (!(phi1 > 0.0) || !(phi2 > 0.0) || !(phi3 > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "composition (" << phi1 << ", " << phi2 << ") is outside the Gibbs triangle";
    throw DomainViolation(os.str());
  }
}

void require_component(int component) {
  if (component != 1 && component != 2) {
    throw ConfigError("component index must be 1 or 2, got " + std::to_string(component));
  }
}

// Gradients and averages of phi1, phi2 and phi3 = 1 - phi1 - phi2 on every
// element.
struct ElementData {
  std::array<std::vector<double>, 3> gx, gy, avg;

  ElementData(const NodalField& phi1, const NodalField& phi2) {
    require_same_mesh(phi1, phi2);
    const PeriodicMesh& mesh = phi1.mesh();
    const std::size_t ne = mesh.num_elements();
    for (int l = 0; l < 3; ++l) {
      gx[l].resize(ne);
      gy[l].resize(ne);
      avg[l].resize(ne);
    }
    const auto geom = simd::ElementGeometry::of(mesh);
    const auto& k = simd::active();
    k.element_gradients(geom, phi1.values().data(), gx[0].data(), gy[0].data(), avg[0].data());
    k.element_gradients(geom, phi2.values().data(), gx[1].data(), gy[1].data(), avg[1].data());
    for (std::size_t e = 0; e < ne; ++e) {
      gx[2][e] = -(gx[0][e] + gx[1][e]);
      gy[2][e] = -(gy[0][e] + gy[1][e]);
      avg[2][e] = 1.0 - avg[0][e] - avg[1][e];
    }
    for (int l = 0; l < 3; ++l) {
      for (std::size_t e = 0; e < ne; ++e) {
        if (!(avg[l][e] > 0.0)) {
          std::ostringstream os;
          os << "element " << e << ": average of phi" << (l + 1) << " is " << avg[l][e];
          throw DegenerateElement(os.str());
        }
      }
    }
  }
};

}  // namespace

Parameters::Parameters(const PhysicalConstants& c) : c_(c) {
  require_positive(c.D1, "D1");
  require_positive(c.D2, "D2");
  require_positive(c.gamma, "gamma");
  require_positive(c.N, "N");
  for (double a : {c.a1, c.a2, c.a3}) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ConfigError("parameters: segment lengths must be non-negative");
    }
  }
  for (double chi : {c.chi12, c.chi13, c.chi23}) {
    if (!std::isfinite(chi)) throw ConfigError("parameters: non-finite interaction parameter");
  }
  const double margin = concavity_margin();
  if (!(margin > 0.0)) {
    std::ostringstream os;
    os << "parameters: enthalpy is not concave, 4 chi13 chi23 - (chi12 - chi13 - chi23)^2 = "
       << margin;
    throw ConfigError(os.str());
  }
  const double root = std::sqrt(c.gamma / std::numbers::pi) + c.N / 2.0;
  alpha_ = std::numbers::pi * root * root;
  beta_ = alpha_ / std::sqrt(std::numbers::pi * c.N);
}

Parameters Parameters::defaults() { return Parameters(PhysicalConstants{}); }

Parameters Parameters::convergence_setup() {
  PhysicalConstants c;
  c.a1 = c.a2 = c.a3 = 0.3;
  return Parameters(c);
}

double Parameters::concavity_margin() const noexcept {
  const double s = c_.chi12 - c_.chi13 - c_.chi23;
  return 4.0 * c_.chi13 * c_.chi23 - s * s;
}

NodalField State::phi3() const {
  NodalField out(phi1.mesh_ptr(), 1.0);
  out -= phi1;
  out -= phi2;
  return out;
}

bool State::is_interior() const noexcept {
  for (std::size_t j = 0; j < phi1.size(); ++j) {
    const double a = phi1[j];
    const double b = phi2[j];
    if (!(a > 0.0) || !(b > 0.0) || !(1.0 - a - b > 0.0)) return false;
  }
  return true;
}

double entropy_density(double phi1, double phi2, const Parameters& p) {
  require_interior(phi1, phi2);
  const double g = p.constants().gamma;
  const double n = p.constants().N;
  return (phi1 / g) * std::log(p.alpha() * phi1 / g) + (phi2 / n) * std::log(p.beta() * phi2 / n) +
         xlogx(1.0 - phi1 - phi2);
}

double enthalpy_density(double phi1, double phi2, const Parameters& p) {
  const auto& c = p.constants();
  const double phi3 = 1.0 - phi1 - phi2;
  return c.chi12 * phi1 * phi2 + c.chi13 * phi1 * phi3 + c.chi23 * phi2 * phi3;
}

double dS_dphi(int component, double phi1, double phi2, const Parameters& p) {
  require_component(component);
  require_interior(phi1, phi2);
  const double tail = -1.0 - std::log(1.0 - phi1 - phi2);
  if (component == 1) {
    const double g = p.constants().gamma;
    return std::log(p.alpha() * phi1 / g) / g + 1.0 / g + tail;
  }
  const double n = p.constants().N;
  return std::log(p.beta() * phi2 / n) / n + 1.0 / n + tail;
}

double dH_dphi(int component, double phi1, double phi2, const Parameters& p) {
  require_component(component);
  const auto& c = p.constants();
  const double cross = c.chi12 - c.chi13 - c.chi23;
  if (component == 1) return -2.0 * c.chi13 * phi1 + cross * phi2 + c.chi13;
  return -2.0 * c.chi23 * phi2 + cross * phi1 + c.chi23;
}

std::array<double, 3> entropy_hessian(double phi1, double phi2, const Parameters& p) {
  require_interior(phi1, phi2);
  const double inv3 = 1.0 / (1.0 - phi1 - phi2);
  return {1.0 / (p.constants().gamma * phi1) + inv3, inv3, 1.0 / (p.constants().N * phi2) + inv3};
}

double gradient_energy(const NodalField& phi1, const NodalField& phi2, const Parameters& p) {
  const ElementData d(phi1, phi2);
  const auto area = phi1.mesh().areas();
  const auto& k = simd::active();
  double total = 0.0;
  for (int l = 0; l < 3; ++l) {
    const double a = p.a(l + 1);
    total += (a * a / 36.0) * k.gradient_energy_sum(area.data(), d.gx[l].data(), d.gy[l].data(),
                                                    d.avg[l].data(), area.size());
  }
  return total;
}

std::array<NodalField, 2> assemble_dK_residuals(const NodalField& phi1, const NodalField& phi2,
                                                const Parameters& p) {
  const ElementData d(phi1, phi2);
  const PeriodicMesh& mesh = phi1.mesh();
  std::array<NodalField, 2> r{NodalField(phi1.mesh_ptr()), NodalField(phi1.mesh_ptr())};
  std::array<double, 3> coeff;
  for (int l = 0; l < 3; ++l) coeff[l] = p.a(l + 1) * p.a(l + 1) / 36.0;

  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const double area = mesh.element_area(e);
    // Per species: the constant "mass-like" density -c |g|^2 / A^2 and the
    // "stiffness-like" flux 2 c g / A of its first variation.
    std::array<double, 3> mass_like, flux_x, flux_y;
    for (int l = 0; l < 3; ++l) {
      const double A = d.avg[l][e];
      const double gx = d.gx[l][e];
      const double gy = d.gy[l][e];
      mass_like[l] = -coeff[l] * (gx * gx + gy * gy) / (A * A);
      flux_x[l] = 2.0 * coeff[l] * gx / A;
      flux_y[l] = 2.0 * coeff[l] * gy / A;
    }
    const auto nodes = mesh.element_nodes(e);
    for (int k = 0; k < 3; ++k) {
      const Vec2 b = mesh.basis_gradient(e, k);
      const double third = area * (mass_like[2] / 3.0 + flux_x[2] * b.x + flux_y[2] * b.y);
      for (int i = 0; i < 2; ++i) {
        r[i][nodes[k]] +=
            area * (mass_like[i] / 3.0 + flux_x[i] * b.x + flux_y[i] * b.y) - third;
      }
    }
  }
  return r;
}

NodalField assemble_dK_residual(int component, const NodalField& phi1, const NodalField& phi2,
                                const Parameters& p) {
  require_component(component);
  auto both = assemble_dK_residuals(phi1, phi2, p);
  return std::move(both[component - 1]);
}

EnergyBreakdown discrete_energy(const State& state, const Parameters& p) {
  require_same_mesh(state.phi1, state.phi2);
  const auto w = state.mesh().lumped_weights();
  EnergyBreakdown out;
  for (std::size_t j = 0; j < w.size(); ++j) {
    out.entropy += w[j] * entropy_density(state.phi1[j], state.phi2[j], p);
    out.enthalpy += w[j] * enthalpy_density(state.phi1[j], state.phi2[j], p);
  }
  out.gradient = gradient_energy(state.phi1, state.phi2, p);
  out.total = out.entropy + out.enthalpy + out.gradient;
  out.convex_total = out.entropy + out.gradient;
  out.concave_total = -out.enthalpy;
  return out;
}

ConvexHessian::ConvexHessian(MeshPtr mesh) : mesh_(std::move(mesh)) {
  const std::size_t ne = mesh_->num_elements();
  const auto dim = static_cast<Eigen::Index>(2 * mesh_->num_nodes());
  std::vector<Eigen::Triplet<double>> pattern;
  pattern.reserve(36 * ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto nodes = mesh_->element_nodes(e);
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        pattern.emplace_back(2 * nodes[a / 2] + a % 2, 2 * nodes[b / 2] + b % 2, 0.0);
      }
    }
  }
  matrix_.resize(dim, dim);
  matrix_.setFromTriplets(pattern.begin(), pattern.end());
  matrix_.makeCompressed();

  auto slot = [&](Eigen::Index row, Eigen::Index col) {
    const int* outer = matrix_.outerIndexPtr();
    const int* inner = matrix_.innerIndexPtr();
    const int* first = inner + outer[col];
    const int* last = inner + outer[col + 1];
    const int* it = std::lower_bound(first, last, static_cast<int>(row));
    return static_cast<int>(it - inner);
  };
  element_slots_.resize(36 * ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto nodes = mesh_->element_nodes(e);
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        element_slots_[36 * e + 6 * a + b] =
            slot(2 * nodes[a / 2] + a % 2, 2 * nodes[b / 2] + b % 2);
      }
    }
  }
  node_slots_.resize(4 * mesh_->num_nodes());
  for (std::size_t j = 0; j < mesh_->num_nodes(); ++j) {
    const auto r = static_cast<Eigen::Index>(2 * j);
    node_slots_[4 * j + 0] = slot(r, r);
    node_slots_[4 * j + 1] = slot(r, r + 1);
    node_slots_[4 * j + 2] = slot(r + 1, r);
    node_slots_[4 * j + 3] = slot(r + 1, r + 1);
  }
}

const SparseMatrix& ConvexHessian::assemble(const NodalField& phi1, const NodalField& phi2,
                                            const Parameters& p) {
  if (phi1.mesh_ptr() != mesh_) throw MeshMismatch("ConvexHessian: field on a different mesh");
  const ElementData d(phi1, phi2);
  double* values = matrix_.valuePtr();
  std::fill(values, values + matrix_.nonZeros(), 0.0);

  const auto w = mesh_->lumped_weights();
  for (std::size_t j = 0; j < mesh_->num_nodes(); ++j) {
    const auto h = entropy_hessian(phi1[j], phi2[j], p);
    values[node_slots_[4 * j + 0]] += w[j] * h[0];
    values[node_slots_[4 * j + 1]] += w[j] * h[1];
    values[node_slots_[4 * j + 2]] += w[j] * h[1];
    values[node_slots_[4 * j + 3]] += w[j] * h[2];
  }

  std::array<double, 3> coeff;
  for (int l = 0; l < 3; ++l) coeff[l] = p.a(l + 1) * p.a(l + 1) / 36.0;
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
    const double area = mesh_->element_area(e);
    std::array<Vec2, 3> grad;
    for (int k = 0; k < 3; ++k) grad[k] = mesh_->basis_gradient(e, k);
    // 3x3 Hessian of area * c |g|^2 / A for each species.
    double species[3][3][3];
    for (int l = 0; l < 3; ++l) {
      const double A = d.avg[l][e];
      const double gx = d.gx[l][e];
      const double gy = d.gy[l][e];
      const double scale = 2.0 * coeff[l] * area;
      const double g2 = (gx * gx + gy * gy) / (9.0 * A * A * A);
      double proj[3];
      for (int k = 0; k < 3; ++k) proj[k] = (gx * grad[k].x + gy * grad[k].y) / (3.0 * A * A);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const double gg = (grad[a].x * grad[b].x + grad[a].y * grad[b].y) / A;
          species[l][a][b] = scale * (gg - proj[a] - proj[b] + g2);
        }
      }
    }
    const int* slots = &element_slots_[36 * e];
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        const int ka = a / 2, ca = a % 2, kb = b / 2, cb = b % 2;
        double v = species[2][ka][kb];
        if (ca == cb) v += species[ca][ka][kb];
        values[slots[6 * a + b]] += v;
      }
    }
  }
  return matrix_;
}

}  // namespace mmc
