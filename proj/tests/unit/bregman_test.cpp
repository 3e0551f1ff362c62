#include "geoaccel/bregman.hpp"

#include <gtest/gtest.h>

#include <random>

#include "geoaccel/errors.hpp"
#include "geoaccel/methods.hpp"
#include "test_support.hpp"

namespace geoaccel {
namespace {

using testing::demo_matrix;
using testing::demo_quadratic;
using testing::vec;

Generator quartic() { return make_quartic({demo_matrix()}); }

// Largest deviation of grad phi along the path from the affine interpolant of
// the endpoint dual coordinates.
double dual_affinity_error(const Generator& phi, const GeodesicPath& path) {
  const Vector d0 = phi.gradient(path.start);
  const Vector d1 = phi.gradient(path.end);
  double worst = 0.0;
  for (const auto& s : path.samples) {
    worst = std::max(worst, max_abs_diff(phi.gradient(s.point), (1.0 - s.t) * d0 + s.t * d1));
  }
  return worst;
}

TEST(DivergenceTest, EuclideanIsHalfSquaredDistance) {
  const Generator phi = make_euclidean(3);
  const Vector x = vec({1, -2, 0.5}), y = vec({0, 4, 1});
  EXPECT_NEAR(divergence(phi, x, y), 0.5 * (x - y).squaredNorm(), 1e-13);
  EXPECT_EQ(divergence(phi, x, x), 0.0);
}

TEST(DivergenceTest, QuadraticGenerator) {
  EXPECT_NEAR(divergence(demo_quadratic(), vec({1, 0}), vec({0, 0})), 1.0, 1e-15);
}

TEST(DivergenceTest, NonnegativeOnRandomPairs) {
  std::mt19937_64 rng(17);
  for (const Generator& phi : {demo_quadratic(), quartic(), make_euclidean(2)}) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = testing::random_vector(rng, 2), y = testing::random_vector(rng, 2);
      EXPECT_GT(divergence(phi, x, y), 0.0);
    }
  }
}

TEST(DualCoordsTest, RoundTrips) {
  const Generator e = make_euclidean(2);
  const Vector x = vec({1, 1});
  EXPECT_EQ(to_dual_coords(e, x), x);
  EXPECT_TRUE(to_dual_coords(demo_quadratic(), x).isApprox(demo_matrix() * x));
  EXPECT_LE(max_abs_diff(from_dual_coords(demo_quadratic(), to_dual_coords(demo_quadratic(), x)), x),
            1e-10);
  EXPECT_LE(max_abs_diff(from_dual_coords(quartic(), to_dual_coords(quartic(), x)), x), 1e-8);
}

TEST(TangentTest, FiniteDifferenceAndBiorthogonality) {
  const Generator phi = quartic();
  const Vector x = vec({1, 1}), v = vec({0.3, -0.7});
  EXPECT_EQ(tangent_to_dual(phi, x, Vector::Zero(2)), Vector::Zero(2));
  EXPECT_EQ(tangent_to_dual(make_euclidean(2), x, v), v);
  const double h = 1e-6;
  const Vector fd = (phi.gradient(x + h * v) - phi.gradient(x - h * v)) / (2 * h);
  EXPECT_LE(max_abs_diff(fd, tangent_to_dual(phi, x, v)), 1e-6);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const Vector p = testing::random_vector(rng, 2) + vec({2, 0});
    const Vector v1 = testing::random_vector(rng, 2), v2 = testing::random_vector(rng, 2);
    EXPECT_LE(std::abs(v1.dot(phi.hessian(p) * v2) - v1.dot(tangent_to_dual(phi, p, v2))), 1e-12);
  }
}

TEST(GeodesicTest, ConstantPathWhenEndpointsCoincide) {
  const Vector x = vec({1, 1});
  const GeodesicPath path = dual_geodesic(quartic(), x, x, 11);
  for (const auto& s : path.samples) EXPECT_LE(max_abs_diff(s.point, x), 1e-12);
  EXPECT_EQ(geodesic_ode_residual(quartic(), path), 0.0);
}

TEST(GeodesicTest, EuclideanGeneratorGivesStraightSegment) {
  const Vector x = vec({1, -1}), y = vec({-2, 3});
  const GeodesicPath path = dual_geodesic(make_euclidean(2), x, y, 21);
  const GeodesicPath seg = euclidean_segment(x, y, 21);
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    EXPECT_LE(max_abs_diff(path.samples[i].point, seg.samples[i].point), 1e-15);
  }
  EXPECT_LE(geodesic_ode_residual(make_euclidean(2), seg), 1e-10);
}

TEST(GeodesicTest, BoundaryConditionsAndDualAffinity) {
  const Vector x = vec({1, 1}), y = vec({-0.5, 2});
  for (const Generator& phi : {demo_quadratic(), quartic()}) {
    const GeodesicPath path = dual_geodesic(phi, x, y);
    ASSERT_EQ(path.samples.size(), 101u);
    EXPECT_LE(max_abs_diff(path.samples.front().point, x), 1e-10);
    EXPECT_LE(max_abs_diff(path.samples.back().point, y), 1e-10);
    for (std::size_t i = 1; i < path.samples.size(); ++i) {
      EXPECT_GT(path.samples[i].t, path.samples[i - 1].t);
    }
    EXPECT_LE(dual_affinity_error(phi, path), phi.kind() == "quartic" ? 1e-7 : 1e-8);
  }
}

TEST(GeodesicTest, QuarticOdeResidualIsSmall) {
  const Generator phi = quartic();
  const GeodesicPath path = dual_geodesic(phi, vec({1, 1}), vec({-0.5, 2}), 401);
  EXPECT_LE(geodesic_ode_residual(phi, path), 1e-3);
}

TEST(GeodesicTest, OdeResidualNeedsFiveUniformSamples) {
  const GeodesicPath path = euclidean_segment(vec({0, 0}), vec({1, 1}), 4);
  EXPECT_THROW(geodesic_ode_residual(make_euclidean(2), path), std::invalid_argument);
}

TEST(DualExpTest, ZeroVelocityAndEuclidean) {
  const Vector x = vec({1, 1}), v = vec({0.2, -0.4});
  EXPECT_LE(max_abs_diff(dual_exp(quartic(), x, Vector::Zero(2)), x), 1e-12);
  EXPECT_LE(max_abs_diff(dual_exp(make_euclidean(2), x, v), x + v), 1e-15);
}

TEST(DualExpTest, GeodesicInitialVelocityMatches) {
  const Generator phi = quartic();
  const Vector x = vec({1, 1}), v = vec({0.2, -0.4});
  const Vector y = dual_exp(phi, x, v);
  const double h = 1e-4;
  const Vector fd = (dual_geodesic_point(phi, x, y, h) - dual_geodesic_point(phi, x, y, -h)) / (2 * h);
  EXPECT_LE(max_abs_diff(fd, v), 1e-5);
}

TEST(ConnectionTest, ConstantHessianGivesZeroCoefficients) {
  EXPECT_LE(dual_connection_coeffs(demo_quadratic(), vec({1, 2})).max_abs(), 1e-8);
  EXPECT_LE(dual_connection_coeffs(make_euclidean(3), vec({1, 2, 3})).max_abs(), 1e-8);
}

TEST(ConnectionTest, QuarticCoefficientsSymmetricInLowerIndices) {
  const ConnectionCoefficients gamma = dual_connection_coeffs(quartic(), vec({1, 1}));
  EXPECT_GT(gamma.max_abs(), 0.1);
  EXPECT_LE(gamma.lower_index_asymmetry(), 1e-4);
}

TEST(ConnectionTest, SingularHessianThrows) {
  EXPECT_THROW(dual_connection_coeffs(quartic(), Vector::Zero(2)), DomainError);
}

TEST(BregmanProxTest, EuclideanQuadraticClosedForm) {
  const Matrix H = demo_matrix();
  const Vector x_star = vec({0.5, -1});
  const Objective f = make_quadratic({H, x_star});
  const Vector x_prev = vec({2, 3});
  const double rho = 0.7;
  const Vector x = bregman_prox(f, make_euclidean(2), rho, x_prev);
  const Vector expected =
      (H + rho * Matrix::Identity(2, 2)).fullPivLu().solve(rho * x_prev + H * x_star);
  EXPECT_LE(max_abs_diff(x, expected), 1e-12);
  EXPECT_LE(bregman_prox_residual(f, make_euclidean(2), rho, x_prev, x), 1e-10);
}

TEST(BregmanProxTest, StationaryStartIsFixed) {
  const Objective f = make_quadratic({demo_matrix(), vec({1, 1})});
  EXPECT_LE(max_abs_diff(bregman_prox(f, quartic(), 2.0, vec({1, 1})), vec({1, 1})), 1e-14);
}

TEST(BregmanProxTest, ConjugateGeneratorMatchesAgmGradientUpdate) {
  // argmin_g f*(g) - <g, z> + tau B_{f*}(g, g_prev) is
  // g = grad f((z + tau grad f*(g_prev))/(1 + tau)).
  const Objective f = demo_quadratic();
  const Objective fs = make_conjugate(f);
  const Vector z = vec({0.4, -0.3}), g_prev = vec({1.5, 0.2});
  const double tau = 1.7;
  const Vector g = bregman_prox(make_tilted(fs, z), fs, tau, g_prev);
  const Vector expected = f.gradient((z + tau * f.conjugate_gradient(g_prev)) / (1 + tau));
  EXPECT_LE(max_abs_diff(g, expected), 1e-10);
}

TEST(BregmanProxTest, ResidualOnQuarticGenerator) {
  const Objective f = make_quadratic({demo_matrix(), vec({0.3, 0.1})});
  const Generator phi = quartic();
  const Vector x_prev = vec({1, 1});
  const Vector x = bregman_prox(f, phi, 0.5, x_prev);
  EXPECT_LE(bregman_prox_residual(f, phi, 0.5, x_prev, x), 1e-10);
}

TEST(GeodesicCsvTest, HeaderAndRows) {
  const std::string csv = geodesic_to_csv(euclidean_segment(vec({0, 0}), vec({1, 2}), 3));
  EXPECT_EQ(csv, "t,x_1,x_2\n0,0,0\n0.5,0.5,1\n1,1,2\n");
}

}  // namespace
}  // namespace geoaccel
