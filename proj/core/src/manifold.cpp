#include "manial/manifold.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace manial {

namespace {

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Inverse square root of a symmetric PSD r x r matrix. Eigenvalues below
/// kRankTol * lambda_max contribute zero (pseudoinverse branch), which keeps
/// the result deterministic for rank-deficient inputs.
Matrix inverse_sqrt_psd(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("inverse_sqrt_psd: eigendecomposition failed");
  const Eigen::VectorXd& d = es.eigenvalues();
  const double dmax = d.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] > kRankTol * dmax) inv[i] = 1.0 / std::sqrt(d[i]);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// Polar factor of an n x r matrix. Well-conditioned inputs (every retraction
/// argument x + xi has gram I + xi'xi, eigenvalues >= 1) take the cheap
/// y (y'y)^{-1/2} route; near-singular inputs fall back to a thin SVD, which
/// stays orthonormal even for rank-deficient y.
Matrix polar_factor(const Matrix& y) {
  const Matrix gram = y.transpose() * y;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  if (es.info() == Eigen::Success) {
    const Eigen::VectorXd& d = es.eigenvalues();
    const double dmax = d.maxCoeff();
    if (dmax > 0.0 && d.minCoeff() > 1e-6 * dmax) {
      const Eigen::VectorXd inv = d.array().rsqrt();
      return y * (es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose());
    }
  }
  Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = gauss(rng);
  return g;
}

bool is_zero(const MatrixBlocks& v) {
  for (std::size_t i = 0; i < v.block_count(); ++i) {
    if ((v.block(i).array() != 0.0).any()) return false;
  }
  return true;
}

}  // namespace

std::shared_ptr<const ManifoldDescriptor> ManifoldDescriptor::stiefel(Eigen::Index n,
                                                                      Eigen::Index r) {
  if (n <= 0 || r <= 0 || r > n) throw std::invalid_argument("stiefel: need n >= r >= 1");
  auto m = std::shared_ptr<ManifoldDescriptor>(new ManifoldDescriptor());
  m->kind_ = Kind::kStiefel;
  m->n_ = n;
  m->r_ = r;
  return m;
}

std::shared_ptr<const ManifoldDescriptor> ManifoldDescriptor::generalized_stiefel(Eigen::Index n,
                                                                                  Eigen::Index r,
                                                                                  Matrix B) {
  if (n <= 0 || r <= 0 || r > n)
    throw std::invalid_argument("generalized_stiefel: need n >= r >= 1");
  if (B.rows() != n || B.cols() != n)
    throw std::invalid_argument("generalized_stiefel: metric must be n x n");
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("generalized_stiefel: metric must be symmetric within 1e-12");
  Eigen::SelfAdjointEigenSolver<Matrix> es(B, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (!(min_eig > 0.0))
    throw std::invalid_argument("generalized_stiefel: metric must be positive definite, "
                                "smallest eigenvalue " + std::to_string(min_eig));
  auto m = std::shared_ptr<ManifoldDescriptor>(new ManifoldDescriptor());
  m->kind_ = Kind::kGeneralizedStiefel;
  m->n_ = n;
  m->r_ = r;
  m->metric_ = std::move(B);
  m->metric_llt_.compute(m->metric_);
  if (m->metric_llt_.info() != Eigen::Success)
    throw std::invalid_argument("generalized_stiefel: metric factorization failed");
  m->metric_min_eig_ = min_eig;
  return m;
}

std::shared_ptr<const ManifoldDescriptor> ManifoldDescriptor::product(
    std::vector<std::shared_ptr<const ManifoldDescriptor>> components) {
  if (components.empty()) throw std::invalid_argument("product: need at least 1 component");
  double min_eig = 1.0;
  for (const auto& c : components) {
    if (!c) throw std::invalid_argument("product: null component");
    if (c->kind() == Kind::kProduct)
      throw std::invalid_argument("product: nested products are not supported");
    min_eig = std::min(min_eig, c->metric_min_eigenvalue());
  }
  auto m = std::shared_ptr<ManifoldDescriptor>(new ManifoldDescriptor());
  m->kind_ = Kind::kProduct;
  m->components_ = std::move(components);
  m->metric_min_eig_ = min_eig;
  return m;
}

const Matrix& ManifoldDescriptor::metric() const {
  if (kind_ != Kind::kGeneralizedStiefel)
    throw std::logic_error("metric: only generalized Stiefel carries a metric");
  return metric_;
}

const std::vector<std::shared_ptr<const ManifoldDescriptor>>& ManifoldDescriptor::components()
    const {
  if (kind_ != Kind::kProduct) throw std::logic_error("components: not a product manifold");
  return components_;
}

Eigen::Index ManifoldDescriptor::ambient_size() const {
  if (kind_ == Kind::kProduct) {
    Eigen::Index s = 0;
    for (const auto& c : components_) s += c->ambient_size();
    return s;
  }
  return n_ * r_;
}

bool ManifoldDescriptor::shape_matches(const MatrixBlocks& v) const {
  if (kind_ == Kind::kProduct) {
    if (v.block_count() != components_.size()) return false;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (v.block(i).rows() != components_[i]->rows() ||
          v.block(i).cols() != components_[i]->cols())
        return false;
    }
    return true;
  }
  return v.block_count() == 1 && v.block(0).rows() == n_ && v.block(0).cols() == r_;
}

double ManifoldDescriptor::feasibility_error(const MatrixBlocks& x) const {
  if (!shape_matches(x)) throw std::invalid_argument("feasibility_error: shape mismatch");
  if (kind_ == Kind::kProduct) {
    double worst = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      MatrixBlocks xi(x.block(i));
      worst = std::max(worst, components_[i]->feasibility_error(xi));
    }
    return worst;
  }
  const Matrix& X = x.block(0);
  const Matrix gram = (kind_ == Kind::kStiefel) ? Matrix(X.transpose() * X)
                                                : Matrix(X.transpose() * metric_ * X);
  return (gram - Matrix::Identity(r_, r_)).norm();
}

double ManifoldDescriptor::tangency_error(const MatrixBlocks& x, const MatrixBlocks& xi) const {
  if (!shape_matches(x) || !shape_matches(xi))
    throw std::invalid_argument("tangency_error: shape mismatch");
  if (kind_ == Kind::kProduct) {
    double worst = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      worst = std::max(worst, components_[i]->tangency_error(MatrixBlocks(x.block(i)),
                                                             MatrixBlocks(xi.block(i))));
    }
    return worst;
  }
  const Matrix& X = x.block(0);
  const Matrix& V = xi.block(0);
  const Matrix m = (kind_ == Kind::kStiefel) ? Matrix(X.transpose() * V)
                                             : Matrix(X.transpose() * metric_ * V);
  return (m + m.transpose()).norm();
}

MatrixBlocks ManifoldDescriptor::project_tangent_value(const MatrixBlocks& x,
                                                       const MatrixBlocks& u) const {
  if (!shape_matches(x) || !shape_matches(u))
    throw std::invalid_argument("project_tangent: shape mismatch");
  if (kind_ == Kind::kProduct) {
    std::vector<Matrix> out;
    out.reserve(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) {
      out.push_back(components_[i]
                        ->project_tangent_value(MatrixBlocks(x.block(i)), MatrixBlocks(u.block(i)))
                        .block(0));
    }
    return MatrixBlocks(std::move(out));
  }
  const Matrix& X = x.block(0);
  const Matrix& U = u.block(0);
  if (kind_ == Kind::kStiefel) return MatrixBlocks(U - X * sym(X.transpose() * U));
  return MatrixBlocks(U - X * sym(X.transpose() * (metric_ * U)));
}

MatrixBlocks ManifoldDescriptor::retract_value(const MatrixBlocks& x,
                                               const MatrixBlocks& xi) const {
  if (!shape_matches(x) || !shape_matches(xi))
    throw std::invalid_argument("retract: shape mismatch");
  if (is_zero(xi)) return x;
  if (kind_ == Kind::kProduct) {
    std::vector<Matrix> out;
    out.reserve(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) {
      out.push_back(components_[i]
                        ->retract_value(MatrixBlocks(x.block(i)), MatrixBlocks(xi.block(i)))
                        .block(0));
    }
    return MatrixBlocks(std::move(out));
  }
  const Matrix y = x.block(0) + xi.block(0);
  if (kind_ == Kind::kStiefel) return MatrixBlocks(polar_factor(y));
  return MatrixBlocks(Matrix(y * inverse_sqrt_psd(y.transpose() * metric_ * y)));
}

MatrixBlocks ManifoldDescriptor::gradient_value(const MatrixBlocks& x,
                                                const MatrixBlocks& egrad) const {
  if (kind_ == Kind::kProduct) {
    std::vector<Matrix> out;
    out.reserve(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) {
      out.push_back(components_[i]
                        ->gradient_value(MatrixBlocks(x.block(i)), MatrixBlocks(egrad.block(i)))
                        .block(0));
    }
    return MatrixBlocks(std::move(out));
  }
  if (kind_ == Kind::kStiefel) return project_tangent_value(x, egrad);
  // Metric gradient: solve B w = egrad, then project.
  return project_tangent_value(x, MatrixBlocks(Matrix(metric_llt_.solve(egrad.block(0)))));
}

MatrixBlocks ManifoldDescriptor::orthonormalize(const MatrixBlocks& v) const {
  if (!shape_matches(v)) throw std::invalid_argument("orthonormalize: shape mismatch");
  if (kind_ == Kind::kProduct) {
    std::vector<Matrix> out;
    out.reserve(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i)
      out.push_back(components_[i]->orthonormalize(MatrixBlocks(v.block(i))).block(0));
    return MatrixBlocks(std::move(out));
  }
  if (kind_ == Kind::kStiefel) return MatrixBlocks(polar_factor(v.block(0)));
  const Matrix& Y = v.block(0);
  return MatrixBlocks(Matrix(Y * inverse_sqrt_psd(Y.transpose() * metric_ * Y)));
}

MatrixBlocks ManifoldDescriptor::random_value(std::mt19937_64& rng) const {
  if (kind_ == Kind::kProduct) {
    std::vector<Matrix> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(c->random_value(rng).block(0));
    return MatrixBlocks(std::move(out));
  }
  return orthonormalize(MatrixBlocks(gaussian_matrix(n_, r_, rng)));
}

ManifoldPoint::ManifoldPoint(std::shared_ptr<const ManifoldDescriptor> manifold,
                             MatrixBlocks value)
    : manifold_(std::move(manifold)), value_(std::move(value)) {
  if (!manifold_) throw std::invalid_argument("ManifoldPoint: null manifold");
  if (!manifold_->shape_matches(value_))
    throw std::invalid_argument("ManifoldPoint: value shape does not match manifold");
  if (!(manifold_->feasibility_error(value_) <= kFeasibilityTol)) {
    value_ = manifold_->orthonormalize(value_);
    const double err = manifold_->feasibility_error(value_);
    if (!(err <= kFeasibilityTol))
      throw std::invalid_argument("ManifoldPoint: infeasible after re-orthonormalization, "
                                  "residual " + std::to_string(err));
  }
}

TangentVector::TangentVector(ManifoldPoint base, MatrixBlocks value)
    : base_(std::move(base)), value_(std::move(value)) {
  const auto& m = *base_.manifold();
  if (!m.shape_matches(value_))
    throw std::invalid_argument("TangentVector: value shape does not match manifold");
  const double err = m.tangency_error(base_.value(), value_);
  if (!(err <= kTangencyTol * std::max(1.0, value_.norm())))
    throw std::invalid_argument("TangentVector: tangency residual " + std::to_string(err));
}

TangentVector& TangentVector::operator+=(const TangentVector& other) {
  value_ += other.value_;
  return *this;
}

TangentVector& TangentVector::operator-=(const TangentVector& other) {
  value_ -= other.value_;
  return *this;
}

TangentVector& TangentVector::operator*=(double s) {
  value_ *= s;
  return *this;
}

TangentVector project_tangent(const ManifoldPoint& x, const MatrixBlocks& u) {
  return TangentVector(x, x.manifold()->project_tangent_value(x.value(), u));
}

ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& xi) {
  return ManifoldPoint(x.manifold(), x.manifold()->retract_value(x.value(), xi.value()));
}

TangentVector transport(const ManifoldPoint& y, const TangentVector& xi) {
  return project_tangent(y, xi.value());
}

TangentVector riemannian_gradient(const ManifoldPoint& x, const MatrixBlocks& egrad) {
  return TangentVector(x, x.manifold()->gradient_value(x.value(), egrad));
}

ManifoldPoint random_point(std::shared_ptr<const ManifoldDescriptor> manifold,
                           std::uint64_t seed) {
  if (!manifold) throw std::invalid_argument("random_point: null manifold");
  std::mt19937_64 rng(seed);
  MatrixBlocks v = manifold->random_value(rng);
  return ManifoldPoint(std::move(manifold), std::move(v));
}

double feasibility_error(const ManifoldPoint& x) {
  return x.manifold()->feasibility_error(x.value());
}

}  // namespace manial
