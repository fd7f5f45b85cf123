#pragma once

#include <array>
#include <span>
#include <vector>

#include "mmc/femcore.hpp"
#include "mmc/field.hpp"

namespace mmc {

/// Raw physical constants of the Flory-Huggins-deGennes free energy.
struct PhysicalConstants {
  double D1 = 1.0;  // mobilities
  double D2 = 1.0;
  double chi12 = 4.0;  // interaction parameters
  double chi13 = 10.0;
  double chi23 = 1.6;
  double gamma = 0.16;  // relative microsphere volume
  double N = 5.12;      // polymerization degree
  double a1 = 1.0;      // statistical segment lengths
  double a2 = 1.0;
  double a3 = 1.0;
};

/// Validated constants plus the derived alpha and beta.
class Parameters {
 public:
  /// Throws ConfigError if a constant is out of range or the enthalpy is not
  /// concave (4 chi13 chi23 - (chi12 - chi13 - chi23)^2 <= 0).
  explicit Parameters(const PhysicalConstants& c);

  /// PhysicalConstants{} validated: the parameters of the pattern-formation runs.
  static Parameters defaults();
  /// defaults() with every segment length set to 0.3 (the convergence setup).
  static Parameters convergence_setup();

  const PhysicalConstants& constants() const noexcept { return c_; }
  double D(int component) const noexcept { return component == 1 ? c_.D1 : c_.D2; }
  double a(int species) const noexcept {
    return species == 1 ? c_.a1 : (species == 2 ? c_.a2 : c_.a3);
  }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double concavity_margin() const noexcept;

 private:
  PhysicalConstants c_;
  double alpha_;
  double beta_;
};

/// Concentrations (phi1, phi2) at one time level; phi3 = 1 - phi1 - phi2.
struct State {
  NodalField phi1;
  NodalField phi2;
  double time = 0.0;
  long step = 0;

  const PeriodicMesh& mesh() const noexcept { return phi1.mesh(); }
  NodalField phi3() const;
  /// phi1 > 0, phi2 > 0 and phi1 + phi2 < 1 at every node.
  bool is_interior() const noexcept;
};

struct EnergyBreakdown {
  double entropy = 0.0;   // (S)_Q
  double enthalpy = 0.0;  // (H)_Q
  double gradient = 0.0;  // (K~, 1)
  double total = 0.0;
  double convex_total = 0.0;   // (S)_Q + (K~, 1)
  double concave_total = 0.0;  // (-H)_Q; total = convex_total - concave_total
};

// Pointwise free-energy densities. `component` is 1 or 2.

/// Throws DomainViolation outside the open Gibbs triangle.
double entropy_density(double phi1, double phi2, const Parameters& p);
double enthalpy_density(double phi1, double phi2, const Parameters& p);
double dS_dphi(int component, double phi1, double phi2, const Parameters& p);
double dH_dphi(int component, double phi1, double phi2, const Parameters& p);
/// Entries (11, 12, 22) of the Hessian of S.
std::array<double, 3> entropy_hessian(double phi1, double phi2, const Parameters& p);

/// (K~(phi1, phi2), 1), exact per element. Throws DegenerateElement.
double gradient_energy(const NodalField& phi1, const NodalField& phi2, const Parameters& p);

/// Vector of (delta_{phi_i} K~, chi_j) over all basis functions chi_j.
NodalField assemble_dK_residual(int component, const NodalField& phi1, const NodalField& phi2,
                                const Parameters& p);
/// Both components in one element pass.
std::array<NodalField, 2> assemble_dK_residuals(const NodalField& phi1, const NodalField& phi2,
                                                const Parameters& p);

/// Throws DomainViolation / DegenerateElement for non-interior states.
EnergyBreakdown discrete_energy(const State& state, const Parameters& p);

/// Hessian of the convex energy part, (S)_Q + (K~, 1), with respect to the
/// stacked nodal unknowns. Unknown 2j + (i-1) is phi_i at node j.
///
/// The sparsity pattern depends on the mesh only and is built once; assemble()
/// refills the values in place.
class ConvexHessian {
 public:
  explicit ConvexHessian(MeshPtr mesh);

  const SparseMatrix& assemble(const NodalField& phi1, const NodalField& phi2,
                               const Parameters& p);
  const SparseMatrix& matrix() const noexcept { return matrix_; }

 private:
  MeshPtr mesh_;
  SparseMatrix matrix_;
  std::vector<int> element_slots_;  // 36 per element, row-major over local (a, b)
  std::vector<int> node_slots_;     // 4 per node: (11, 12, 21, 22)
};

}  // namespace mmc
