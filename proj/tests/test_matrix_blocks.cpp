#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "manial/matrix_blocks.hpp"

using namespace manial;

namespace {

Matrix counting(Eigen::Index rows, Eigen::Index cols, double start) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = start + static_cast<double>(i * cols + j);
  return m;
}

}  // namespace

TEST_SUITE("matrix_blocks") {
  TEST_CASE("single block construction and access") {
    MatrixBlocks v(counting(2, 3, 1.0));
    CHECK(v.block_count() == 1);
    CHECK(v.single()(1, 2) == 6.0);
    CHECK(v.block(0).rows() == 2);
  }

  TEST_CASE("multi block construction") {
    MatrixBlocks v{counting(2, 2, 0.0), counting(3, 1, 10.0)};
    CHECK(v.block_count() == 2);
    CHECK(v.block(1)(2, 0) == 12.0);
    CHECK_THROWS_AS((void)v.single(), std::logic_error);

    std::vector<Matrix> parts{counting(1, 1, 5.0)};
    MatrixBlocks w(parts);
    CHECK(w.single()(0, 0) == 5.0);
  }

  TEST_CASE("zeros_like preserves shape") {
    MatrixBlocks v{counting(2, 2, 1.0), counting(4, 3, 1.0)};
    MatrixBlocks z = MatrixBlocks::zeros_like(v);
    CHECK(z.same_shape(v));
    CHECK(z.norm() == 0.0);
  }

  TEST_CASE("same_shape distinguishes block layouts") {
    MatrixBlocks a{counting(2, 2, 0.0), counting(3, 1, 0.0)};
    MatrixBlocks b{counting(2, 2, 1.0), counting(3, 1, 1.0)};
    MatrixBlocks c{counting(2, 2, 1.0), counting(1, 3, 1.0)};
    MatrixBlocks d(counting(2, 2, 1.0));
    CHECK(a.same_shape(b));
    CHECK_FALSE(a.same_shape(c));
    CHECK_FALSE(a.same_shape(d));
  }

  TEST_CASE("dot and norms sum over blocks") {
    Matrix m1 = counting(2, 2, 1.0);  // 1 2 ; 3 4
    Matrix m2 = counting(2, 2, 5.0);  // 5 6 ; 7 8
    MatrixBlocks a{m1, m2};
    double sq = m1.squaredNorm() + m2.squaredNorm();
    CHECK(a.squared_norm() == doctest::Approx(sq).epsilon(1e-15));
    CHECK(a.norm() == doctest::Approx(std::sqrt(sq)).epsilon(1e-15));
    MatrixBlocks b{Matrix::Ones(2, 2), Matrix::Ones(2, 2)};
    CHECK(a.dot(b) == doctest::Approx(m1.sum() + m2.sum()).epsilon(1e-15));
  }

  TEST_CASE("arithmetic matches blockwise Eigen arithmetic") {
    MatrixBlocks a{counting(2, 2, 1.0), counting(1, 3, 0.0)};
    MatrixBlocks b{counting(2, 2, 4.0), counting(1, 3, 9.0)};

    MatrixBlocks sum = a + b;
    CHECK(sum.block(0).isApprox(a.block(0) + b.block(0), 0.0));
    CHECK(sum.block(1).isApprox(a.block(1) + b.block(1), 0.0));

    MatrixBlocks diff = b - a;
    CHECK(diff.block(0).isApprox(b.block(0) - a.block(0), 0.0));

    MatrixBlocks left = 2.0 * a;
    MatrixBlocks right = a * 2.0;
    CHECK(left.block(0).isApprox(right.block(0), 0.0));
    CHECK(left.block(1).isApprox(2.0 * a.block(1), 0.0));

    MatrixBlocks neg = -a;
    CHECK(neg.block(0).isApprox(-a.block(0), 0.0));

    MatrixBlocks acc = a;
    acc += b;
    acc -= a;
    acc *= 0.5;
    CHECK(acc.block(0).isApprox(0.5 * b.block(0), 1e-15));
  }

  TEST_CASE("shape mismatches throw") {
    MatrixBlocks a(counting(2, 2, 0.0));
    MatrixBlocks b(counting(3, 2, 0.0));
    CHECK_THROWS_AS(a += b, std::invalid_argument);
    CHECK_THROWS_AS((void)a.dot(b), std::invalid_argument);
  }
}
