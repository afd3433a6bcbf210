#include "apt/linalg.hpp"

#include <cmath>
#include <string>

#include "apt/errors.hpp"

namespace apt {

CholFactor::CholFactor(int d) : dim(d), entries(static_cast<std::size_t>(d) * d, 0.0) {
  for (int i = 0; i < d; ++i) at(i, i) = 1.0;
}

Matrix CholFactor::reconstruct() const {
  Matrix out(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k <= j; ++k) s += at(i, k) * at(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

CholFactor CholFactor::scaled(double s) const {
  CholFactor out = *this;
  for (double& e : out.entries) e *= s;
  return out;
}

namespace {

// Plain lower Cholesky; returns false on a pivot at or below `floor`.
bool try_factor(const Matrix& a, double floor, CholFactor& out) {
  const int n = a.rows;
  out.dim = n;
  out.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= out.at(i, k) * out.at(j, k);
      if (i == j) {
        if (s <= floor) return false;
        out.at(i, i) = std::sqrt(s);
      } else {
        out.at(i, j) = s / out.at(j, j);
      }
    }
  }
  return true;
}

}  // namespace

CholFactor chol_from_dense(const Matrix& a, CholMode mode) {
  if (a.rows != a.cols || a.rows < 1)
    throw DimensionMismatch("chol_from_dense: matrix must be square and non-empty");
  const int n = a.rows;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-10 * (1.0 + std::abs(a(i, j))))
        throw NotPositiveDefinite("chol_from_dense: matrix not symmetric at (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");

  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += a(i, i);
  const double floor = 1e-12 * (trace / n);

  CholFactor l;
  if (try_factor(a, floor, l)) return l;
  if (mode == CholMode::Jitter) {
    Matrix aj = a;
    for (int i = 0; i < n; ++i) aj(i, i) += 1e-10;
    if (try_factor(aj, floor, l)) return l;
  }
  throw NotPositiveDefinite("chol_from_dense: pivot at or below jitter floor");
}

CholFactor chol_rank_one_update(const CholFactor& l, double gamma, std::span<const double> v) {
  const int n = l.dim;
  if (static_cast<int>(v.size()) != n)
    throw DimensionMismatch("chol_rank_one_update: v has dim " + std::to_string(v.size()) +
                            ", factor has dim " + std::to_string(n));
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw Error("chol_rank_one_update: gamma must lie in [0,1)");
  if (gamma == 0.0) return l;

  CholFactor out = l.scaled(std::sqrt(1.0 - gamma));
  // Standard positive rank-one update of out*out^T + u u^T with u = sqrt(gamma)*v.
  Vector u(v.begin(), v.end());
  const double sg = std::sqrt(gamma);
  for (double& e : u) e *= sg;
  for (int i = 0; i < n; ++i) {
    const double lii = out.at(i, i);
    const double r = std::sqrt(lii * lii + u[i] * u[i]);
    const double c = r / lii;
    const double s = u[i] / lii;
    out.at(i, i) = r;
    for (int k = i + 1; k < n; ++k) {
      out.at(k, i) = (out.at(k, i) + s * u[k]) / c;
      u[k] = c * u[k] - s * out.at(k, i);
    }
  }
  return out;
}

Vector sample_mvn(std::span<const double> mean, const CholFactor& l, double scale, Rng& rng) {
  const int n = l.dim;
  if (static_cast<int>(mean.size()) != n)
    throw DimensionMismatch("sample_mvn: mean has dim " + std::to_string(mean.size()) +
                            ", factor has dim " + std::to_string(n));
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (int i = 0; i < n; ++i) z[i] = normal(rng);
  Vector out(mean.begin(), mean.end());
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += (scale * l.at(i, j)) * z[j];
    out[i] += s;
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector mat_vec(const Matrix& m, std::span<const double> v) {
  Vector out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

OlsFit ols_fit(const Matrix& x, std::span<const double> y) {
  const int n = x.rows;
  const int p = x.cols;
  if (static_cast<int>(y.size()) != n)
    throw DimensionMismatch("ols_fit: y has length " + std::to_string(y.size()) +
                            ", X has " + std::to_string(n) + " rows");
  if (n <= p + 1) throw SingularDesign("ols_fit: need n > p + 1 observations");

  Vector xmean(p, 0.0);
  double ymean = 0.0;
  for (int i = 0; i < n; ++i) {
    ymean += y[i];
    for (int j = 0; j < p; ++j) xmean[j] += x(i, j);
  }
  ymean /= n;
  for (int j = 0; j < p; ++j) xmean[j] /= n;

  Matrix xc(n, p);
  Vector yc(n);
  for (int i = 0; i < n; ++i) {
    yc[i] = y[i] - ymean;
    for (int j = 0; j < p; ++j) xc(i, j) = x(i, j) - xmean[j];
  }

  Matrix xtx(p, p);
  Vector xty(p, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      xty[j] += xc(i, j) * yc[i];
      for (int k = 0; k <= j; ++k) xtx(j, k) += xc(i, j) * xc(i, k);
    }
  }
  for (int j = 0; j < p; ++j)
    for (int k = j + 1; k < p; ++k) xtx(j, k) = xtx(k, j);

  CholFactor l;
  try {
    l = chol_from_dense(xtx, CholMode::Strict);
  } catch (const NotPositiveDefinite& e) {
    throw SingularDesign(std::string("ols_fit: centered design is singular (") + e.what() + ")");
  }

  // Solve L L^T b = X^T y by forward then back substitution.
  Vector b(p);
  for (int i = 0; i < p; ++i) {
    double s = xty[i];
    for (int k = 0; k < i; ++k) s -= l.at(i, k) * b[k];
    b[i] = s / l.at(i, i);
  }
  for (int i = p - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < p; ++k) s -= l.at(k, i) * b[k];
    b[i] = s / l.at(i, i);
  }

  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    double fit = 0.0;
    for (int j = 0; j < p; ++j) fit += xc(i, j) * b[j];
    const double r = yc[i] - fit;
    rss += r * r;
  }

  OlsFit out;
  out.coeffs = std::move(b);
  out.intercept = ymean - dot(xmean, out.coeffs);
  out.resid_var = rss / (n - p - 1);
  return out;
}

}  // namespace apt
