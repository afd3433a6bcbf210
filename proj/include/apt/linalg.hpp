#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "apt/rng.hpp"

namespace apt {

using Vector = std::vector<double>;

// Dense row-major matrix.  Dimensions in this project stay below a few
// dozen, so there is no blocked or sparse storage.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // rows*cols, row-major

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Lower-triangular Cholesky factor with strictly positive diagonal,
// stored dense row-major (upper part kept at zero).
struct CholFactor {
  int dim = 0;
  std::vector<double> entries;  // dim*dim, row-major, lower triangle

  CholFactor() = default;
  explicit CholFactor(int d);  // identity factor

  double& at(int r, int c) { return entries[static_cast<std::size_t>(r) * dim + c]; }
  double at(int r, int c) const { return entries[static_cast<std::size_t>(r) * dim + c]; }

  // L * L^T as a dense symmetric matrix.
  Matrix reconstruct() const;

  // Factor with every entry multiplied by s (factor of s^2 * L L^T).
  CholFactor scaled(double s) const;
};

enum class CholMode {
  // If a pivot falls below 1e-12*(trace/dim), add 1e-10*I and retry once.
  // Keeps long adaptation runs alive on near-singular empirical covariances.
  Jitter,
  // Fail on any pivot at or below the floor.  Used where singularity must
  // surface as an error (OLS).
  Strict,
};

// Factor a symmetric positive-definite matrix.  Throws NotPositiveDefinite
// when a pivot falls at or below the jitter floor (after the retry, in
// Jitter mode).
CholFactor chol_from_dense(const Matrix& a, CholMode mode = CholMode::Jitter);

// Factor of (1-gamma) * L L^T + gamma * v v^T in O(dim^2): scale the factor
// by sqrt(1-gamma), then apply a positive rank-one update with weight gamma.
// Requires gamma in [0,1).
CholFactor chol_rank_one_update(const CholFactor& l, double gamma, std::span<const double> v);

// mean + scale * L * z with z i.i.d. standard normal draws from rng.
// The scale is folded into each factor entry before accumulation, so a call
// with (scale=s, L) consumes the same rng draws and produces bit-identical
// output to a call with (scale=1, s*L).
Vector sample_mvn(std::span<const double> mean, const CholFactor& l, double scale, Rng& rng);

struct OlsFit {
  Vector coeffs;     // slope per feature, centered model
  double intercept;  // response mean minus fitted feature means
  double resid_var;  // RSS / (n - p - 1)
};

// Least squares via normal equations on the centered design.  Throws
// SingularDesign when X^T X (after centering) is not positive definite.
OlsFit ols_fit(const Matrix& x, std::span<const double> y);

// Small helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
Vector mat_vec(const Matrix& m, std::span<const double> v);

}  // namespace apt
