#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "manial/manifold.hpp"

using namespace manial;

namespace {

using Descriptor = std::shared_ptr<const ManifoldDescriptor>;

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

MatrixBlocks gaussian_like(const MatrixBlocks& shape, std::mt19937_64& rng) {
  std::vector<Matrix> parts;
  for (std::size_t i = 0; i < shape.block_count(); ++i)
    parts.push_back(gaussian(shape.block(i).rows(), shape.block(i).cols(), rng));
  return MatrixBlocks(std::move(parts));
}

Matrix random_spd(Eigen::Index n, std::mt19937_64& rng, double shift) {
  Matrix g = gaussian(n, n, rng);
  return Matrix(g * g.transpose() + shift * Matrix::Identity(n, n));
}

/// Distance between manifold values in the metric the retraction contracts:
/// Frobenius on Stiefel blocks, the B-weighted norm on generalized Stiefel
/// blocks, root sum of squares across product components.
double metric_norm(const Descriptor& m, const MatrixBlocks& v) {
  if (m->kind() == ManifoldDescriptor::Kind::kProduct) {
    double sq = 0.0;
    const auto& comps = m->components();
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const double c = metric_norm(comps[i], MatrixBlocks(v.block(i)));
      sq += c * c;
    }
    return std::sqrt(sq);
  }
  if (m->kind() == ManifoldDescriptor::Kind::kGeneralizedStiefel) {
    const Matrix& b = m->metric();
    return std::sqrt((v.block(0).transpose() * b * v.block(0)).trace());
  }
  return v.norm();
}

/// Inner product in the same componentwise metric: the pairing under which
/// the tangent projection is orthogonal.
double metric_dot(const Descriptor& m, const MatrixBlocks& u, const MatrixBlocks& v) {
  if (m->kind() == ManifoldDescriptor::Kind::kProduct) {
    double sum = 0.0;
    const auto& comps = m->components();
    for (std::size_t i = 0; i < comps.size(); ++i)
      sum += metric_dot(comps[i], MatrixBlocks(u.block(i)), MatrixBlocks(v.block(i)));
    return sum;
  }
  if (m->kind() == ManifoldDescriptor::Kind::kGeneralizedStiefel) {
    const Matrix& b = m->metric();
    return (b * u.block(0)).cwiseProduct(v.block(0)).sum();
  }
  return u.dot(v);
}

bool bitwise_equal(const MatrixBlocks& a, const MatrixBlocks& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.block_count(); ++i) {
    if (!(a.block(i).array() == b.block(i).array()).all()) return false;
  }
  return true;
}

std::vector<Descriptor> test_manifolds() {
  std::mt19937_64 rng(11);
  auto st = ManifoldDescriptor::stiefel(8, 3);
  auto gst = ManifoldDescriptor::generalized_stiefel(6, 2, random_spd(6, rng, 0.5));
  auto prod = ManifoldDescriptor::product(
      {ManifoldDescriptor::stiefel(5, 2),
       ManifoldDescriptor::generalized_stiefel(4, 2, random_spd(4, rng, 0.5))});
  return {st, gst, prod};
}

}  // namespace

TEST_SUITE("manifold") {
  TEST_CASE("descriptor shapes and validation") {
    auto st = ManifoldDescriptor::stiefel(5, 2);
    CHECK(st->kind() == ManifoldDescriptor::Kind::kStiefel);
    CHECK(st->rows() == 5);
    CHECK(st->cols() == 2);
    CHECK(st->ambient_size() == 10);
    CHECK(st->metric_min_eigenvalue() == 1.0);
    CHECK(st->shape_matches(MatrixBlocks(Matrix::Zero(5, 2))));
    CHECK_FALSE(st->shape_matches(MatrixBlocks(Matrix::Zero(2, 5))));
    CHECK_THROWS_AS((void)st->metric(), std::logic_error);
    CHECK_THROWS_AS((void)st->components(), std::logic_error);
    CHECK_THROWS_AS(ManifoldDescriptor::stiefel(2, 3), std::invalid_argument);
    CHECK_THROWS_AS(ManifoldDescriptor::stiefel(0, 0), std::invalid_argument);
  }

  TEST_CASE("generalized Stiefel metric validation") {
    std::mt19937_64 rng(3);
    Matrix b = random_spd(4, rng, 0.5);
    auto gst = ManifoldDescriptor::generalized_stiefel(4, 2, b);
    CHECK(gst->metric().isApprox(b, 0.0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
    CHECK(gst->metric_min_eigenvalue() ==
          doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-12));

    Matrix asym = b;
    asym(0, 1) += 1e-6;
    CHECK_THROWS_AS(ManifoldDescriptor::generalized_stiefel(4, 2, asym), std::invalid_argument);

    Matrix indef = b;
    indef -= 2.0 * es.eigenvalues().maxCoeff() * Matrix::Identity(4, 4);
    CHECK_THROWS_WITH_AS(ManifoldDescriptor::generalized_stiefel(4, 2, indef),
                         doctest::Contains("eigenvalue"), std::invalid_argument);

    CHECK_THROWS_AS(ManifoldDescriptor::generalized_stiefel(4, 2, Matrix::Identity(3, 3)),
                    std::invalid_argument);
  }

  TEST_CASE("product composition rules") {
    auto st = ManifoldDescriptor::stiefel(3, 1);
    auto prod = ManifoldDescriptor::product({st, st});
    CHECK(prod->kind() == ManifoldDescriptor::Kind::kProduct);
    CHECK(prod->components().size() == 2);
    CHECK(prod->ambient_size() == 6);

    auto solo = ManifoldDescriptor::product({st});
    CHECK(solo->components().size() == 1);
    CHECK(solo->ambient_size() == 3);
    ManifoldPoint x = random_point(solo, 4);
    CHECK(feasibility_error(x) <= kFeasibilityTol);

    CHECK_THROWS_AS(ManifoldDescriptor::product({}), std::invalid_argument);
    CHECK_THROWS_AS(ManifoldDescriptor::product({st, nullptr}), std::invalid_argument);
    CHECK_THROWS_AS(ManifoldDescriptor::product({prod, st}), std::invalid_argument);
  }

  TEST_CASE("tangent projection closed form on Stiefel(2,1)") {
    auto m = ManifoldDescriptor::stiefel(2, 1);
    Matrix xv(2, 1);
    xv << 1.0, 0.0;
    ManifoldPoint x(m, MatrixBlocks(xv));

    TangentVector p1 = project_tangent(x, x.value());
    CHECK(p1.norm() == 0.0);

    Matrix u(2, 1);
    u << 3.0, 4.0;
    TangentVector p2 = project_tangent(x, MatrixBlocks(u));
    CHECK(p2.value().single()(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p2.value().single()(1, 0) == doctest::Approx(4.0).epsilon(1e-15));
  }

  TEST_CASE("tangent projection idempotence and residual orthogonality") {
    std::mt19937_64 rng(42);
    for (const auto& m : test_manifolds()) {
      for (int trial = 0; trial < 100; ++trial) {
        ManifoldPoint x = random_point(m, 1000 + static_cast<std::uint64_t>(trial));
        MatrixBlocks u = gaussian_like(x.value(), rng);
        TangentVector pu = project_tangent(x, u);
        TangentVector ppu = project_tangent(x, pu.value());
        CHECK((ppu.value() - pu.value()).norm() <= 1e-12);
        CHECK(m->tangency_error(x.value(), pu.value()) <= 1e-10);

        // The projection residual is orthogonal to every tangent direction
        // in the metric the component manifolds carry.
        TangentVector xi = project_tangent(x, gaussian_like(x.value(), rng));
        const double inner = metric_dot(m, u - pu.value(), xi.value());
        CHECK(std::abs(inner) <= 1e-10 * std::max(1.0, u.norm() * xi.norm()));
      }
    }
  }

  TEST_CASE("metric gradient residual orthogonality on generalized Stiefel") {
    // For the B-metric the defining property is <egrad - B*grad, xi> = 0 in
    // the Euclidean pairing, i.e. grad is the metric representer of the
    // differential restricted to the tangent space.
    std::mt19937_64 rng(7);
    Matrix b = random_spd(5, rng, 0.5);
    auto m = ManifoldDescriptor::generalized_stiefel(5, 2, b);
    for (int trial = 0; trial < 25; ++trial) {
      ManifoldPoint x = random_point(m, 50 + static_cast<std::uint64_t>(trial));
      MatrixBlocks egrad = gaussian_like(x.value(), rng);
      TangentVector g = riemannian_gradient(x, egrad);
      TangentVector xi = project_tangent(x, gaussian_like(x.value(), rng));
      const double lhs = egrad.dot(xi.value());
      const double rhs = (b * g.value().single()).cwiseProduct(xi.value().single()).sum();
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));
    }
  }

  TEST_CASE("retraction of zero is the identity, bit for bit") {
    for (const auto& m : test_manifolds()) {
      ManifoldPoint x = random_point(m, 5);
      TangentVector zero = project_tangent(x, MatrixBlocks::zeros_like(x.value()));
      ManifoldPoint back = retract(x, zero);
      CHECK(bitwise_equal(back.value(), x.value()));
    }
  }

  TEST_CASE("retraction closed form on Stiefel(2,1)") {
    auto m = ManifoldDescriptor::stiefel(2, 1);
    Matrix xv(2, 1);
    xv << 1.0, 0.0;
    ManifoldPoint x(m, MatrixBlocks(xv));
    for (double t : {0.5, 1.0, 2.0}) {
      Matrix xiv(2, 1);
      xiv << 0.0, t;
      ManifoldPoint y = retract(x, TangentVector(x, MatrixBlocks(xiv)));
      const double scale = 1.0 / std::sqrt(1.0 + t * t);
      CHECK(y.value().single()(0, 0) == doctest::Approx(scale).epsilon(1e-12));
      CHECK(y.value().single()(1, 0) == doctest::Approx(t * scale).epsilon(1e-12));
    }
  }

  TEST_CASE("retraction feasibility, contraction and first-order agreement") {
    std::mt19937_64 rng(99);
    for (const auto& m : test_manifolds()) {
      double worst_ratio = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        ManifoldPoint x = random_point(m, 300 + static_cast<std::uint64_t>(trial));
        TangentVector xi = project_tangent(x, gaussian_like(x.value(), rng));
        ManifoldPoint y = retract(x, xi);
        CHECK(feasibility_error(y) <= 1e-10);
        CHECK(metric_norm(m, y.value() - x.value()) <=
              metric_norm(m, xi.value()) * (1.0 + 1e-12) + 1e-15);

        // ||R_x(s xi) - x - s xi|| / ||s xi||^2 stays bounded as s shrinks:
        // the ratio settles toward a draw-dependent constant instead of
        // growing, so the retraction agrees with the identity to first order.
        TangentVector unit = (1.0 / xi.norm()) * xi;
        double first = 0.0;
        double last = 0.0;
        for (double s : {1e-1, 1e-2, 1e-3}) {
          ManifoldPoint ys = retract(x, s * unit);
          const double ratio = (ys.value() - x.value() - (s * unit).value()).norm() / (s * s);
          if (s == 1e-1) first = ratio;
          last = ratio;
          worst_ratio = std::max(worst_ratio, ratio);
        }
        CHECK(last <= 2.0 * first + 1e-6);
      }
      CHECK(worst_ratio <= 100.0);
    }
  }

  TEST_CASE("transport is the projection onto the target tangent space") {
    std::mt19937_64 rng(21);
    for (const auto& m : test_manifolds()) {
      ManifoldPoint x = random_point(m, 31);
      ManifoldPoint y = random_point(m, 32);
      TangentVector xi = project_tangent(x, gaussian_like(x.value(), rng));
      TangentVector eta = project_tangent(x, gaussian_like(x.value(), rng));

      TangentVector same = transport(x, xi);
      CHECK((same.value() - xi.value()).norm() <= 1e-12);

      TangentVector moved = transport(y, xi);
      CHECK(m->tangency_error(y.value(), moved.value()) <=
            1e-10 * std::max(1.0, moved.norm()));
      TangentVector proj = project_tangent(y, xi.value());
      CHECK((moved.value() - proj.value()).norm() == 0.0);

      // Linearity: T(a xi + b eta) = a T(xi) + b T(eta).
      TangentVector combo = transport(y, 2.0 * xi - 0.5 * eta);
      MatrixBlocks expect = (2.0 * transport(y, xi).value()) - (0.5 * transport(y, eta).value());
      CHECK((combo.value() - expect).norm() <= 1e-12 * std::max(1.0, expect.norm()));
    }
  }

  TEST_CASE("riemannian gradient basics") {
    std::mt19937_64 rng(17);
    auto m = ManifoldDescriptor::stiefel(6, 2);
    ManifoldPoint x = random_point(m, 8);

    TangentVector zero = riemannian_gradient(x, MatrixBlocks::zeros_like(x.value()));
    CHECK(zero.norm() == 0.0);

    TangentVector xi = project_tangent(x, gaussian_like(x.value(), rng));
    TangentVector again = riemannian_gradient(x, xi.value());
    CHECK((again.value() - xi.value()).norm() <= 1e-12 * std::max(1.0, xi.norm()));
  }

  TEST_CASE("riemannian gradient of the sphere Rayleigh quotient") {
    // f(x) = -x'Cx on the unit sphere has grad f = -2Cx + 2 (x'Cx) x.
    std::mt19937_64 rng(23);
    auto m = ManifoldDescriptor::stiefel(5, 1);
    Matrix c = random_spd(5, rng, 0.1);
    for (int trial = 0; trial < 10; ++trial) {
      ManifoldPoint x = random_point(m, 600 + static_cast<std::uint64_t>(trial));
      const Matrix& xv = x.value().single();
      Matrix egrad = -2.0 * c * xv;
      TangentVector g = riemannian_gradient(x, MatrixBlocks(egrad));
      Matrix expect = egrad + 2.0 * (xv.transpose() * c * xv)(0, 0) * xv;
      CHECK((g.value().single() - expect).norm() <= 1e-12 * std::max(1.0, expect.norm()));
    }
  }

  TEST_CASE("random points are deterministic, feasible and well spread") {
    for (const auto& m : test_manifolds()) {
      ManifoldPoint a = random_point(m, 12345);
      ManifoldPoint b = random_point(m, 12345);
      CHECK(bitwise_equal(a.value(), b.value()));
      CHECK(feasibility_error(a) <= kFeasibilityTol);
    }

    auto st = ManifoldDescriptor::stiefel(6, 2);
    std::vector<ManifoldPoint> points;
    for (std::uint64_t s = 0; s < 100; ++s) points.push_back(random_point(st, s));
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        CHECK((points[i].value() - points[j].value()).norm() > 1e-6);
  }

  TEST_CASE("feasibility error closed forms") {
    auto m = ManifoldDescriptor::stiefel(5, 2);
    Matrix tall = Matrix::Zero(5, 2);
    tall(0, 0) = 1.0;
    tall(1, 1) = 1.0;
    CHECK(m->feasibility_error(MatrixBlocks(tall)) == 0.0);
    // Doubling a feasible point gives gram 4I, distance ||3I||_F = 3 sqrt(r).
    CHECK(m->feasibility_error(MatrixBlocks(Matrix(2.0 * tall))) ==
          doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("point validation re-orthonormalizes once and rejects junk") {
    auto m = ManifoldDescriptor::stiefel(5, 2);
    ManifoldPoint x = random_point(m, 77);
    Matrix bent = x.value().single();
    bent(0, 0) += 1e-3;
    ManifoldPoint fixed(m, MatrixBlocks(bent));
    CHECK(feasibility_error(fixed) <= kFeasibilityTol);

    CHECK_THROWS_AS(ManifoldPoint(m, MatrixBlocks(Matrix::Zero(3, 3))), std::invalid_argument);
    Matrix nan = Matrix::Constant(5, 2, std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_AS(ManifoldPoint(m, MatrixBlocks(nan)), std::invalid_argument);
  }

  TEST_CASE("tangent validation rejects non-tangent values") {
    auto m = ManifoldDescriptor::stiefel(5, 2);
    ManifoldPoint x = random_point(m, 13);
    CHECK_THROWS_AS(TangentVector(x, x.value()), std::invalid_argument);
    CHECK_THROWS_AS(TangentVector(x, MatrixBlocks(Matrix::Zero(2, 5))), std::invalid_argument);

    std::mt19937_64 rng(1);
    TangentVector a = project_tangent(x, gaussian_like(x.value(), rng));
    TangentVector b = project_tangent(x, gaussian_like(x.value(), rng));
    TangentVector c = a + b;
    CHECK(c.norm() <= a.norm() + b.norm());
    CHECK(a.dot(b) == doctest::Approx(a.value().dot(b.value())).epsilon(1e-15));
  }

  TEST_CASE("orthonormalize projects near-feasible values back") {
    for (const auto& m : test_manifolds()) {
      ManifoldPoint x = random_point(m, 29);
      MatrixBlocks scaled = 1.5 * x.value();
      MatrixBlocks back = m->orthonormalize(scaled);
      CHECK(m->feasibility_error(back) <= 1e-10);
      CHECK((back - x.value()).norm() <= 1e-8 * std::max(1.0, x.value().norm()));
    }
  }
}
