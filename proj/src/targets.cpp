#include "apt/target.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "apt/errors.hpp"

namespace apt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

GaussianMixture::GaussianMixture(Vector weights, std::vector<Vector> means, double sigma)
    : weights_(std::move(weights)), means_(std::move(means)), sigma_(sigma) {
  if (weights_.empty() || weights_.size() != means_.size())
    throw DimensionMismatch("GaussianMixture: weights and means must be non-empty and equal length");
  if (!(sigma_ > 0.0)) throw Error("GaussianMixture: sigma must be positive");
  dim_ = static_cast<int>(means_[0].size());
  double wsum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw Error("GaussianMixture: weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw Error("GaussianMixture: weights must sum to 1 (got " + std::to_string(wsum) + ")");
  for (const auto& mu : means_)
    if (static_cast<int>(mu.size()) != dim_)
      throw DimensionMismatch("GaussianMixture: means must share one dimension");
  for (std::size_t i = 0; i < means_.size(); ++i)
    for (std::size_t j = i + 1; j < means_.size(); ++j)
      if (means_[i] == means_[j])
        throw Error("GaussianMixture: means must be pairwise distinct");
  log_norm_ = -0.5 * dim_ * std::log(2.0 * std::numbers::pi * sigma_ * sigma_);
}

double GaussianMixture::log_unnorm(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw DimensionMismatch("GaussianMixture: point has dim " + std::to_string(x.size()));
  const double inv2s2 = 1.0 / (2.0 * sigma_ * sigma_);
  double best = kNegInf;
  Vector expo(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    double d2 = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double d = x[k] - means_[i][k];
      d2 += d * d;
    }
    expo[i] = std::log(weights_[i]) - d2 * inv2s2;
    best = std::max(best, expo[i]);
  }
  double acc = 0.0;
  for (double e : expo) acc += std::exp(e - best);
  return best + std::log(acc) + log_norm_;
}

Vector GaussianMixture::moment1() const {
  Vector m(dim_, 0.0);
  for (std::size_t i = 0; i < weights_.size(); ++i)
    for (int k = 0; k < dim_; ++k) m[k] += weights_[i] * means_[i][k];
  return m;
}

Vector GaussianMixture::moment2() const {
  Vector m(dim_, 0.0);
  for (std::size_t i = 0; i < weights_.size(); ++i)
    for (int k = 0; k < dim_; ++k)
      m[k] += weights_[i] * (means_[i][k] * means_[i][k] + sigma_ * sigma_);
  return m;
}

ProductExtendedTarget::ProductExtendedTarget(std::shared_ptr<const TargetDensity> base,
                                             std::vector<std::pair<double, double>> bounds)
    : base_(std::move(base)), bounds_(std::move(bounds)) {
  if (!base_) throw Error("ProductExtendedTarget: base target required");
  if (bounds_.empty()) throw Error("ProductExtendedTarget: need at least one extra dimension");
  log_volume_ = 0.0;
  for (const auto& [a, b] : bounds_) {
    if (!(b > a))
      throw Error("ProductExtendedTarget: interval [" + std::to_string(a) + "," +
                  std::to_string(b) + "] is empty");
    log_volume_ += std::log(b - a);
  }
}

double ProductExtendedTarget::log_unnorm(std::span<const double> x) const {
  const int d0 = base_->dim();
  if (static_cast<int>(x.size()) != dim())
    throw DimensionMismatch("ProductExtendedTarget: point has dim " + std::to_string(x.size()));
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const double v = x[d0 + i];
    if (v < bounds_[i].first || v > bounds_[i].second) return kNegInf;
  }
  return base_->log_unnorm(x.first(d0)) - log_volume_;
}

double bridge_log_posterior(const BridgeModel& m, std::span<const double> beta, double s) {
  const int n = m.x.rows;
  const int p = m.x.cols;
  if (static_cast<int>(beta.size()) != p)
    throw DimensionMismatch("bridge_log_posterior: beta has dim " + std::to_string(beta.size()));
  const double sigma2 = std::exp(2.0 * s);
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    double fit = 0.0;
    for (int j = 0; j < p; ++j) fit += m.x(i, j) * beta[j];
    const double r = m.y[i] - fit;
    rss += r * r;
  }
  double prior = 0.0;
  for (int j = 0; j < p; ++j) prior += std::pow(std::abs(beta[j]), m.q);
  return -0.5 * n * std::log(2.0 * std::numbers::pi * sigma2) - rss / (2.0 * sigma2) -
         m.lambda * prior - s;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, int row, int col) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw ParseError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                         ", column " + std::to_string(col),
                     row, col);
  }
  while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
  if (pos != cell.size())
    throw ParseError("trailing junk in cell '" + cell + "' at row " + std::to_string(row) +
                         ", column " + std::to_string(col),
                     row, col);
  return v;
}

}  // namespace

RegressionData load_regression_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file '" + path + "'", 0, 0);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 2)
    throw ParseError("need at least one feature column and a response column", 0,
                     static_cast<int>(header.size()));
  const int ncol = static_cast<int>(header.size());
  const int p = ncol - 1;

  std::vector<Vector> rows;
  int rownum = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++rownum;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != ncol)
      throw ParseError("row " + std::to_string(rownum) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(ncol),
                       rownum, static_cast<int>(cells.size()));
    Vector vals(ncol);
    for (int c = 0; c < ncol; ++c) vals[c] = parse_cell(cells[c], rownum, c + 1);
    rows.push_back(std::move(vals));
  }
  const int n = static_cast<int>(rows.size());
  if (n < 2) throw ParseError("need at least two data rows", rownum, 0);

  RegressionData out;
  out.x = Matrix(n, p);
  out.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) out.x(i, j) = rows[i][j];
    out.y[i] = rows[i][p];
  }

  auto& rep = out.report;
  rep.feature_names.assign(header.begin(), header.end() - 1);
  rep.response_name = header.back();
  rep.feature_shift.resize(p);
  rep.feature_scale.resize(p);

  for (int j = 0; j < p; ++j) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += out.x(i, j);
    mean /= n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = out.x(i, j) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (n - 1));
    if (!(sd > 0.0))
      throw ConstantColumn("column '" + rep.feature_names[j] + "' (index " + std::to_string(j + 1) +
                           ") has zero variance");
    rep.feature_shift[j] = mean;
    rep.feature_scale[j] = sd;
    for (int i = 0; i < n; ++i) out.x(i, j) = (out.x(i, j) - mean) / sd;
  }

  double ymean = 0.0;
  for (int i = 0; i < n; ++i) ymean += out.y[i];
  ymean /= n;
  rep.response_shift = ymean;
  for (int i = 0; i < n; ++i) out.y[i] -= ymean;

  return out;
}

}  // namespace apt
