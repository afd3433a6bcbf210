#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "apt/linalg.hpp"

namespace apt {

// Unnormalized log-density.  Evaluation is deterministic and returns
// -infinity (never an error) outside the support.  Implementations are
// immutable after construction and safe to evaluate from several threads.
class TargetDensity {
public:
  virtual ~TargetDensity() = default;
  virtual int dim() const = 0;
  virtual double log_unnorm(std::span<const double> x) const = 0;
};

// Mixture of isotropic normal components with a common standard deviation.
class GaussianMixture : public TargetDensity {
public:
  GaussianMixture(Vector weights, std::vector<Vector> means, double sigma);

  int dim() const override { return dim_; }
  // log sum_i w_i N(x; mu_i, sigma^2 I) via log-sum-exp; finite for finite x.
  double log_unnorm(std::span<const double> x) const override;

  int components() const { return static_cast<int>(weights_.size()); }
  const Vector& weights() const { return weights_; }
  const std::vector<Vector>& means() const { return means_; }
  double sigma() const { return sigma_; }

  // Closed-form moments: E X_k = sum_i w_i mu_ik, E X_k^2 = sum_i w_i (mu_ik^2 + sigma^2).
  Vector moment1() const;
  Vector moment2() const;

private:
  Vector weights_;
  std::vector<Vector> means_;
  double sigma_;
  int dim_;
  double log_norm_;  // -(d/2) log(2 pi sigma^2)
};

// Base density times k independent uniforms on [a_i, b_i].
class ProductExtendedTarget : public TargetDensity {
public:
  ProductExtendedTarget(std::shared_ptr<const TargetDensity> base,
                        std::vector<std::pair<double, double>> bounds);

  int dim() const override { return base_->dim() + static_cast<int>(bounds_.size()); }
  double log_unnorm(std::span<const double> x) const override;

  const TargetDensity& base() const { return *base_; }
  std::shared_ptr<const TargetDensity> base_ptr() const { return base_; }
  int extra_dims() const { return static_cast<int>(bounds_.size()); }
  const std::vector<std::pair<double, double>>& bounds() const { return bounds_; }

private:
  std::shared_ptr<const TargetDensity> base_;
  std::vector<std::pair<double, double>> bounds_;
  double log_volume_;  // sum_i log(b_i - a_i)
};

// Linear model with bridge shrinkage prior exp(-lambda |beta_j|^q) on the
// coefficients and a 1/sigma^2 prior on the noise scale.  The sampler state
// is (beta, s) with s = log sigma; the prior becomes exp(-s) in s.
struct BridgeModel {
  Matrix x;             // n x p, columns standardized
  Vector y;             // length n, centered
  double lambda = 1.0;  // shrinkage strength
  double q = 0.5;       // bridge exponent; q < 1 gives the multimodal posterior
  double intercept_mu = 0.0;  // response mean, profiled out and reported
};

// log posterior: -(n/2) log(2 pi sigma^2) - |y - X beta|^2 / (2 sigma^2)
//                - lambda sum_j |beta_j|^q - s,  with sigma = exp(s).
double bridge_log_posterior(const BridgeModel& m, std::span<const double> beta, double s);

class BridgeTarget : public TargetDensity {
public:
  explicit BridgeTarget(BridgeModel model) : model_(std::move(model)) {}

  int dim() const override { return model_.x.cols + 1; }  // (beta, s)
  double log_unnorm(std::span<const double> x) const override {
    return bridge_log_posterior(model_, x.first(model_.x.cols), x[model_.x.cols]);
  }

  const BridgeModel& model() const { return model_; }

private:
  BridgeModel model_;
};

struct StandardizationReport {
  std::vector<std::string> feature_names;
  Vector feature_shift;  // column means removed
  Vector feature_scale;  // sample standard deviations divided out
  std::string response_name;
  double response_shift = 0.0;  // response mean removed
};

struct RegressionData {
  Matrix x;  // standardized features
  Vector y;  // centered response
  StandardizationReport report;
};

// CSV with a header row; last column is the response; all cells numeric.
// Features are centered and scaled to unit sample standard deviation, the
// response is centered.  Throws ParseError (with row and column) on
// malformed input and ConstantColumn when a feature cannot be scaled.
RegressionData load_regression_csv(const std::string& path);

}  // namespace apt
