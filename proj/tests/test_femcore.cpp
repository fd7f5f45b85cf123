#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mmc/errors.hpp"
#include "mmc/femcore.hpp"
#include "support/oracles.hpp"

namespace mmc {
namespace {

using std::numbers::pi;

TEST(LumpedInnerProduct, UnitFieldsGiveDomainArea) {
  const auto mesh = PeriodicMesh::build_uniform(1.0, 16);
  const NodalField one(mesh, 1.0);
  EXPECT_NEAR(lumped_inner_product(one, one), 1.0, 1e-14);
  const LumpedMass m(*mesh);
  EXPECT_NEAR(m.total(), 1.0, 1e-14);
  for (double w : m.weights()) EXPECT_GT(w, 0.0);
}

TEST(LumpedInnerProduct, BasisFunctionPairsWithThirdOfPatch) {
  const auto mesh = PeriodicMesh::build_uniform(1.3, 8);
  const NodalField one(mesh, 1.0);
  for (std::size_t j : {0u, 9u, 63u}) {
    NodalField chi(mesh, 0.0);
    chi[j] = 1.0;
    EXPECT_NEAR(lumped_inner_product(chi, one), mesh->patch_area(j) / 3.0, 1e-15);
  }
}

TEST(LumpedInnerProduct, MatchesElementLoopOracle) {
  const auto mesh = PeriodicMesh::build_uniform(1.0, 4);
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto psi = testing::random_values(gen, mesh->num_nodes());
    const auto eta = testing::random_values(gen, mesh->num_nodes());
    const double oracle = testing::element_loop_inner_product(*mesh, psi, eta);
    const double got = lumped_inner_product(NodalField(mesh, psi), NodalField(mesh, eta));
    EXPECT_NEAR(got, oracle, 1e-14);
    EXPECT_EQ(got, lumped_inner_product(NodalField(mesh, eta), NodalField(mesh, psi)));
  }
}

TEST(LumpedInnerProduct, NormEquivalenceWithConsistentMass) {
  std::mt19937_64 gen(8);
  for (int n : {4, 7, 12}) {
    const auto mesh = PeriodicMesh::build_uniform(1.0, n);
    for (int trial = 0; trial < 200; ++trial) {
      const auto v = testing::random_values(gen, mesh->num_nodes());
      const NodalField f(mesh, v);
      const double ratio = lumped_inner_product(f, f) / testing::consistent_norm_squared(*mesh, v);
      EXPECT_GE(ratio, 1.0 - 1e-12);
      EXPECT_LE(ratio, 4.0 + 1e-12);
    }
    // The extremes are attained: constants give 1, the checkerboard-like
    // pattern with zero element sums gives the upper bound of each element.
    const NodalField one(mesh, 1.0);
    EXPECT_NEAR(lumped_inner_product(one, one) / testing::consistent_norm_squared(
                                                     *mesh, std::vector<double>(mesh->num_nodes(), 1.0)),
                1.0, 1e-13);
  }
}

TEST(Stiffness, KernelAndSymmetry) {
  const auto mesh = PeriodicMesh::build_uniform(1.0, 9);
  const SparseMatrix k = assemble_stiffness(*mesh);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k.rows());
  EXPECT_LE((k * ones).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE((SparseMatrix(k.transpose()) - k).norm(), 1e-14);
}

TEST(Stiffness, DirichletEnergyOfCosine) {
  const auto mesh = PeriodicMesh::build_uniform(1.0, 64);
  const auto disc = Discretization::build(mesh);
  const NodalField v = NodalField::interpolate(mesh, [](double x, double) { return std::cos(2 * pi * x); });
  const auto kv = disc->apply_stiffness(v.values());
  double vkv = 0.0;
  for (std::size_t j = 0; j < kv.size(); ++j) vkv += v[j] * kv[j];
  std::vector<double> vals(v.values().begin(), v.values().end());
  EXPECT_NEAR(vkv, testing::dirichlet_energy(*mesh, vals), 1e-10);
  EXPECT_NEAR(vkv, 2 * pi * pi, 0.01 * pi * pi);
}

TEST(DiscreteLaplacian, DefiningIdentity) {
  // (Delta_h v, chi_j)_Q + (grad v, grad chi_j) = 0 for every basis function.
  const auto mesh = PeriodicMesh::build_uniform(1.0, 8);
  const auto disc = Discretization::build(mesh);
  std::mt19937_64 gen(2);
  const auto vals = testing::random_values(gen, mesh->num_nodes());
  const NodalField v(mesh, vals);
  const MeanZeroField lap = disc->discrete_laplacian(v);
  for (std::size_t j = 0; j < mesh->num_nodes(); ++j) {
    double stiff = 0.0;  // (grad v, grad chi_j) by element loop
    for (std::size_t e = 0; e < mesh->num_elements(); ++e) {
      const auto nodes = mesh->element_nodes(e);
      for (int k = 0; k < 3; ++k) {
        if (static_cast<std::size_t>(nodes[k]) != j) continue;
        const auto f = testing::frame(*mesh, e);
        const Vec2 g = testing::element_gradient(*mesh, vals, e);
        stiff += f.area * (g.x * f.grad[k].x + g.y * f.grad[k].y);
      }
    }
    NodalField chi(mesh, 0.0);
    chi[j] = 1.0;
    EXPECT_NEAR(lumped_inner_product(lap.field(), chi) + stiff, 0.0, 1e-13);
  }
  EXPECT_LE(std::abs(lumped_mass(lap.field())), 1e-12);
  const MeanZeroField zero = disc->discrete_laplacian(NodalField(mesh, 4.2));
  EXPECT_LE(std::max(std::abs(zero.field().min()), std::abs(zero.field().max())), 1e-12);
}

TEST(DiscreteLaplacian, SecondOrderConsistencyOnCosine) {
  double previous = 0.0;
  for (int n : {32, 64, 128}) {
    const auto mesh = PeriodicMesh::build_uniform(1.0, n);
    const auto disc = Discretization::build(mesh);
    const NodalField v = NodalField::interpolate(mesh, [](double x, double) { return std::cos(2 * pi * x); });
    const MeanZeroField lap = disc->discrete_laplacian(v);
    double err = 0.0;
    for (std::size_t j = 0; j < mesh->num_nodes(); ++j) {
      err = std::max(err, std::abs(lap[j] + 4 * pi * pi * v[j]));
    }
    if (previous > 0.0) EXPECT_NEAR(previous / err, 4.0, 0.2);
    previous = err;
  }
}

TEST(InverseLaplacian, RoundTripAndZero) {
  const auto mesh = PeriodicMesh::build_uniform(1.0, 16);
  const auto disc = Discretization::build(mesh);
  const MeanZeroField zero = MeanZeroField::checked(NodalField(mesh, 0.0));
  const MeanZeroField u0 = disc->inverse_discrete_laplacian(zero);
  EXPECT_EQ(u0.field().min(), 0.0);
  EXPECT_EQ(u0.field().max(), 0.0);

  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = testing::mean_free(testing::random_values(gen, mesh->num_nodes()), mesh->lumped_weights());
    const NodalField vf(mesh, v);
    const MeanZeroField w = disc->discrete_laplacian(vf);
    NodalField minus_w = w.field();
    minus_w *= -1.0;
    const MeanZeroField u = disc->inverse_discrete_laplacian(MeanZeroField::checked(minus_w));
    for (std::size_t j = 0; j < v.size(); ++j) EXPECT_NEAR(u[j], v[j], 1e-10);
  }
}

TEST(InverseLaplacian, RejectsNonZeroMean) {
  const auto mesh = PeriodicMesh::build_uniform(1.0, 8);
  EXPECT_THROW(MeanZeroField::checked(NodalField(mesh, 1.0)), NonZeroMean);
}

TEST(HMinusOneNorm, TwoEvaluationsAgreeAndScale) {
  const auto mesh = PeriodicMesh::build_uniform(1.0, 12);
  const auto disc = Discretization::build(mesh);
  std::mt19937_64 gen(17);
  EXPECT_EQ(disc->h_minus1_norm(MeanZeroField::checked(NodalField(mesh, 0.0))), 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = testing::mean_free(testing::random_values(gen, mesh->num_nodes()), mesh->lumped_weights());
    const MeanZeroField wf = MeanZeroField::checked(NodalField(mesh, w));
    const MeanZeroField u = disc->inverse_discrete_laplacian(wf);
    const double via_q = lumped_inner_product(wf.field(), u.field());
    std::vector<double> uv(u.values().begin(), u.values().end());
    const double via_grad = testing::dirichlet_energy(*mesh, uv);
    EXPECT_GE(via_q, 0.0);
    EXPECT_NEAR(via_q, via_grad, 1e-10 * std::max(1.0, via_q));
    const double norm = disc->h_minus1_norm(wf);
    EXPECT_NEAR(norm * norm, via_q, 1e-12 * std::max(1.0, via_q));
    const MeanZeroField twice = MeanZeroField::checked(2.0 * wf.field());
    EXPECT_NEAR(disc->h_minus1_norm(twice), 2.0 * norm, 1e-12 * norm);
  }
}

TEST(ElementAverage, ValuesAndLinearity) {
  const auto mesh = PeriodicMesh::build_uniform(1.0, 4);
  EXPECT_DOUBLE_EQ(element_average(NodalField(mesh, 0.7), 3), 0.7);
  NodalField f(mesh, 0.0);
  const auto nodes = mesh->element_nodes(5);
  f[nodes[0]] = 0.0;
  f[nodes[1]] = 0.3;
  f[nodes[2]] = 0.6;
  EXPECT_NEAR(element_average(f, 5), 0.3, 1e-16);

  std::mt19937_64 gen(1);
  const auto r = testing::random_interior(gen, mesh->num_nodes());
  const NodalField p1(mesh, r.phi1), p2(mesh, r.phi2);
  const NodalField p3 = NodalField(mesh, 1.0) - p1 - p2;
  for (std::size_t e = 0; e < mesh->num_elements(); ++e) {
    EXPECT_NEAR(element_average(p3, e), 1.0 - element_average(p1, e) - element_average(p2, e), 1e-15);
  }
}

TEST(ElementBounds, GradientOverAverageBound) {
  // |grad phi| / A(phi) <= 3 sqrt(2) h_e / (2 area_e) for positive vertex values.
  std::mt19937_64 gen(99);
  for (int n : {4, 9}) {
    const auto mesh = PeriodicMesh::build_uniform(1.0 + n, n);
    for (int trial = 0; trial < 10000; ++trial) {
      const auto v = testing::random_values(gen, mesh->num_nodes(), 1e-12, 1.0);
      const std::size_t e = trial % mesh->num_elements();
      const Vec2 g = testing::element_gradient(*mesh, v, e);
      const auto nodes = mesh->element_nodes(e);
      const double avg = (v[nodes[0]] + v[nodes[1]] + v[nodes[2]]) / 3.0;
      const double bound = 3.0 * std::sqrt(2.0) * mesh->element_diameter(e) / (2.0 * mesh->element_area(e));
      EXPECT_LE(std::hypot(g.x, g.y) / avg, bound * (1.0 + 1e-12));
    }
  }
}

}  // namespace
}  // namespace mmc
