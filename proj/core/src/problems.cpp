#include "manial/problems.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <random>
#include <stdexcept>
#include <utility>

namespace manial {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = gauss(rng);
  return out;
}

// Contiguous [offset, length) row blocks; remainder rows go to leading blocks.
std::vector<std::pair<Eigen::Index, Eigen::Index>> row_blocks(Eigen::Index rows, int batches) {
  if (batches < 1) throw std::invalid_argument("batches must be positive");
  if (static_cast<Eigen::Index>(batches) > rows)
    throw std::invalid_argument("more batches than rows");
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
  blocks.reserve(batches);
  const Eigen::Index base = rows / batches;
  const Eigen::Index rem = rows % batches;
  Eigen::Index offset = 0;
  for (int j = 0; j < batches; ++j) {
    const Eigen::Index len = base + (j < rem ? 1 : 0);
    blocks.emplace_back(offset, len);
    offset += len;
  }
  return blocks;
}

void check_batch(int batch, int count) {
  if (batch < 0 || batch >= count) throw std::out_of_range("batch index out of range");
}

double spectral_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

}  // namespace

Matrix gen_spca_data(int m, int n, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("gen_spca_data: need at least 2 rows to center");
  if (n < 1) throw std::invalid_argument("gen_spca_data: need at least 1 column");
  std::mt19937_64 rng(seed);
  Matrix b = gaussian_matrix(m, n, rng);
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    b.col(j).array() -= b.col(j).mean();
    b.col(j) /= b.col(j).norm();
  }
  return b;
}

SccaData gen_scca_data(int n, int p, int q, std::uint64_t seed) {
  if (n < 1 || p < 1 || q < 1)
    throw std::invalid_argument("gen_scca_data: dimensions must be positive");
  std::mt19937_64 rng(seed);
  SccaData data;
  data.x = gaussian_matrix(n, p, rng);
  data.y = gaussian_matrix(n, q, rng);
  return data;
}

CompositeProblem build_spca(const Matrix& b, double mu, int r, int batches) {
  const Eigen::Index m = b.rows();
  const Eigen::Index n = b.cols();
  if (r < 1 || r > n) throw std::invalid_argument("build_spca: need 1 <= r <= columns");
  auto rows = std::make_shared<Matrix>(b);
  auto gram = std::make_shared<Matrix>(b.transpose() * b);

  CompositeProblem p;
  p.manifold = ManifoldDescriptor::stiefel(n, r);
  p.f_value = [gram](const MatrixBlocks& x) {
    return -((*gram) * x.single()).cwiseProduct(x.single()).sum();
  };
  p.f_egrad = [gram](const MatrixBlocks& x) {
    return MatrixBlocks(Matrix(-2.0 * ((*gram) * x.single())));
  };
  p.map = LinearMap::identity();
  p.h = NonsmoothTerm::scaled_l1(mu, n, r);
  Eigen::SelfAdjointEigenSolver<Matrix> es(*gram, Eigen::EigenvaluesOnly);
  p.lip_f_grad = 2.0 * es.eigenvalues().maxCoeff();

  const auto blocks = row_blocks(m, batches);
  FiniteSum fs;
  fs.batch_count = batches;
  fs.value = [rows, blocks, batches](const MatrixBlocks& x, int j) {
    check_batch(j, batches);
    return -static_cast<double>(batches) *
           (rows->middleRows(blocks[j].first, blocks[j].second) * x.single()).squaredNorm();
  };
  fs.egrad = [rows, blocks, batches](const MatrixBlocks& x, int j) {
    check_batch(j, batches);
    const auto bj = rows->middleRows(blocks[j].first, blocks[j].second);
    return MatrixBlocks(Matrix(-2.0 * batches * (bj.transpose() * (bj * x.single()))));
  };
  p.finite_sum = fs;
  return p;
}

CompositeProblem build_scca(const Matrix& xd, const Matrix& yd, double mu1, double mu2,
                            int r, double ridge, int batches) {
  const Eigen::Index n = xd.rows();
  const Eigen::Index pdim = xd.cols();
  const Eigen::Index qdim = yd.cols();
  if (yd.rows() != n) throw std::invalid_argument("build_scca: observation counts differ");
  if (n < 1) throw std::invalid_argument("build_scca: need at least one observation");
  if (r < 1 || r > pdim || r > qdim)
    throw std::invalid_argument("build_scca: need 1 <= r <= min(p, q)");
  if (ridge < 0.0) throw std::invalid_argument("build_scca: ridge must be nonnegative");

  const Matrix cxx = xd.transpose() * xd / static_cast<double>(n) +
                     ridge * Matrix::Identity(pdim, pdim);
  const Matrix cyy = yd.transpose() * yd / static_cast<double>(n) +
                     ridge * Matrix::Identity(qdim, qdim);
  auto cross = std::make_shared<Matrix>(xd.transpose() * yd / static_cast<double>(n));
  auto xrows = std::make_shared<Matrix>(xd);
  auto yrows = std::make_shared<Matrix>(yd);

  CompositeProblem p;
  p.manifold = ManifoldDescriptor::product({ManifoldDescriptor::generalized_stiefel(pdim, r, cxx),
                                            ManifoldDescriptor::generalized_stiefel(qdim, r, cyy)});
  p.f_value = [cross](const MatrixBlocks& x) {
    return -((*cross) * x.block(1)).cwiseProduct(x.block(0)).sum();
  };
  p.f_egrad = [cross](const MatrixBlocks& x) {
    return MatrixBlocks({Matrix(-(*cross) * x.block(1)),
                         Matrix(-cross->transpose() * x.block(0))});
  };
  p.map = LinearMap::identity();
  p.h = NonsmoothTerm::separable_sum({NonsmoothTerm::scaled_l1(mu1, pdim, r),
                                      NonsmoothTerm::scaled_l1(mu2, qdim, r)});
  p.lip_f_grad = spectral_norm(*cross);

  const auto blocks = row_blocks(n, batches);
  const double scale = static_cast<double>(batches) / static_cast<double>(n);
  FiniteSum fs;
  fs.batch_count = batches;
  fs.value = [xrows, yrows, blocks, batches, scale](const MatrixBlocks& x, int j) {
    check_batch(j, batches);
    const auto xj = xrows->middleRows(blocks[j].first, blocks[j].second);
    const auto yj = yrows->middleRows(blocks[j].first, blocks[j].second);
    return -scale * (xj * x.block(0)).cwiseProduct(yj * x.block(1)).sum();
  };
  fs.egrad = [xrows, yrows, blocks, batches, scale](const MatrixBlocks& x, int j) {
    check_batch(j, batches);
    const auto xj = xrows->middleRows(blocks[j].first, blocks[j].second);
    const auto yj = yrows->middleRows(blocks[j].first, blocks[j].second);
    return MatrixBlocks({Matrix(-scale * (xj.transpose() * (yj * x.block(1)))),
                         Matrix(-scale * (yj.transpose() * (xj * x.block(0))))});
  };
  p.finite_sum = fs;
  return p;
}

double fd_relative_error(const CompositeProblem& p, std::uint64_t seed, int directions) {
  if (directions < 1) throw std::invalid_argument("fd_relative_error: need a direction");
  const ManifoldPoint x = random_point(p.manifold, seed);
  const MatrixBlocks grad = p.f_egrad(x.value());
  std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ULL);
  const double h = 1e-5;
  double worst = 0.0;
  for (int d = 0; d < directions; ++d) {
    std::vector<Matrix> parts;
    for (std::size_t blk = 0; blk < x.value().block_count(); ++blk)
      parts.push_back(
          gaussian_matrix(x.value().block(blk).rows(), x.value().block(blk).cols(), rng));
    MatrixBlocks dir(parts);
    dir *= 1.0 / dir.norm();
    const double analytic = grad.dot(dir);
    const double numeric =
        (p.f_value(x.value() + h * dir) - p.f_value(x.value() - h * dir)) / (2.0 * h);
    worst = std::max(worst, std::abs(numeric - analytic) / std::max(1.0, std::abs(analytic)));
  }
  return worst;
}

double batch_average_error(const CompositeProblem& p, std::uint64_t seed) {
  if (!p.finite_sum) throw std::invalid_argument("batch_average_error: no finite sum");
  const ManifoldPoint x = random_point(p.manifold, seed);
  const FiniteSum& fs = *p.finite_sum;
  MatrixBlocks grad_sum = MatrixBlocks::zeros_like(x.value());
  double value_sum = 0.0;
  for (int j = 0; j < fs.batch_count; ++j) {
    grad_sum += fs.egrad(x.value(), j);
    value_sum += fs.value(x.value(), j);
  }
  const double inv = 1.0 / fs.batch_count;
  const MatrixBlocks full = p.f_egrad(x.value());
  const double grad_err = (inv * grad_sum - full).norm() / std::max(1.0, full.norm());
  const double value_err =
      std::abs(inv * value_sum - p.f_value(x.value())) /
      std::max(1.0, std::abs(p.f_value(x.value())));
  return std::max(grad_err, value_err);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw std::runtime_error("load_matrix: " + path + " line " + std::to_string(line_no) +
                               ": empty row");
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string cell = line.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size())
        throw std::runtime_error("load_matrix: " + path + " line " + std::to_string(line_no) +
                                 ": cannot parse cell '" + cell + "'");
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("load_matrix: " + path + " line " + std::to_string(line_no) +
                               ": expected " + std::to_string(rows.front().size()) +
                               " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_matrix: " + path + " is empty");
  Matrix out(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return out;
}

void save_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix: cannot open " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_matrix: write failed for " + path);
}

std::vector<TraceRecord> rsub_baseline(const CompositeProblem& p, double gamma0, long steps,
                                       std::uint64_t seed) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("rsub_baseline: gamma0 must be positive");
  if (steps < 1) throw std::invalid_argument("rsub_baseline: need at least one step");
  ManifoldPoint x = random_point(p.manifold, seed);
  const auto t_start = std::chrono::steady_clock::now();
  std::vector<TraceRecord> trace;
  trace.reserve(static_cast<std::size_t>(steps));
  for (long t = 0; t < steps; ++t) {
    const double gamma = gamma0 / std::sqrt(static_cast<double>(t + 1));
    const MatrixBlocks ax = p.map.apply(x.value());
    const MatrixBlocks g = p.f_egrad(x.value()) + p.map.adjoint(p.h.sign_subgradient(ax));
    x = retract(x, -gamma * riemannian_gradient(x, g));
    TraceRecord row;
    row.k = t;
    row.oracle_calls = t + 1;
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    row.objective = p.objective(x.value());
    row.beta = gamma;
    row.inner_iters = 1;
    row.retraction_calls = t + 1;
    trace.push_back(row);
  }
  return trace;
}

}  // namespace manial
