#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manial/alf.hpp"
#include "manial/trace.hpp"

namespace manial {

/// m x n matrix with standard Gaussian entries, columns shifted to zero mean
/// and scaled to unit Euclidean norm. Deterministic given the seed.
/// Throws std::invalid_argument if m < 2 (centering is degenerate).
Matrix gen_spca_data(int m, int n, std::uint64_t seed);

/// Paired observation matrices for canonical correlation instances.
struct SccaData {
  Matrix x;  // n x p
  Matrix y;  // n x q
};

/// Standard Gaussian observation pair, rows are joint samples.
/// Deterministic given the seed.
SccaData gen_scca_data(int n, int p, int q, std::uint64_t seed);

/// Sparse PCA on the Stiefel manifold St(n, r):
///   minimize -tr(X^T B^T B X) + mu * ||X||_1.
/// The linear map is the identity; the finite sum splits the rows of B into
/// `batches` contiguous blocks (remainder rows go to the leading blocks) so
/// that the uniform average of batch gradients equals the full gradient.
CompositeProblem build_spca(const Matrix& b, double mu, int r, int batches = 100);

/// Sparse CCA on GeneralizedStiefel(p,r; Cxx) x GeneralizedStiefel(q,r; Cyy)
/// with Cxx = Xd^T Xd / n + ridge*I and Cyy likewise:
///   minimize -tr(U^T Cxy V) + mu1 * ||U||_1 + mu2 * ||V||_1.
/// The finite sum splits the n joint observations into `batches` blocks.
CompositeProblem build_scca(const Matrix& xd, const Matrix& yd, double mu1, double mu2,
                            int r, double ridge = 1e-6, int batches = 100);

/// Largest relative error between the analytic Euclidean gradient and a
/// central finite difference along random ambient directions, evaluated at a
/// random feasible point. Smooth builders should score below 1e-5.
double fd_relative_error(const CompositeProblem& p, std::uint64_t seed, int directions = 10);

/// Relative error of the enumeration identities for the finite-sum oracles:
/// mean of batch gradients vs full gradient and mean of batch values vs f.
/// Throws std::invalid_argument if the problem has no finite sum.
double batch_average_error(const CompositeProblem& p, std::uint64_t seed);

/// Dense matrix from a header-free comma-separated file, row-major.
/// Throws std::runtime_error naming the line for ragged or non-numeric rows,
/// and for empty files.
Matrix load_matrix(const std::string& path);

/// Writes a matrix in the load_matrix format with round-trip precision.
void save_matrix(const std::string& path, const Matrix& m);

/// Riemannian subgradient baseline with diminishing stepsize
/// gamma_t = gamma0 / sqrt(t + 1):
///   x_{t+1} = R_x(-gamma_t * P_x(f_egrad(x) + A^*(sign subgradient of h))).
/// Returns one trace row per step; oracle_calls counts one gradient per step
/// and the beta column carries the stepsize. Residual columns are zero: the
/// method maintains no multiplier estimate.
std::vector<TraceRecord> rsub_baseline(const CompositeProblem& p, double gamma0, long steps,
                                       std::uint64_t seed);

}  // namespace manial
