#pragma once

#include <span>
#include <vector>

#include "cra/matrix.hpp"

namespace cra::learn {

struct LogisticParams {
  /// Inverse L2 strength; the intercept is not penalized.
  double c = 1.0;
  /// Stop when the largest gradient component falls below this.
  double tol = 1e-6;
  int max_iter = 1000;
};

class LogisticModel {
 public:
  LogisticModel() = default;
  LogisticModel(std::vector<double> weights, double intercept) : weights_(std::move(weights)), intercept_(intercept) {}

  double predict_proba(std::span<const double> row) const;
  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;

 private:
  std::vector<double> weights_;
  double intercept_ = 0.0;
};

struct LogisticFit {
  LogisticModel model;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes c * sum(log-loss) + |w|^2 / 2 with L-BFGS.
LogisticFit train_logistic(const Matrix& x, std::span<const int> y, const LogisticParams& params = {});

}  // namespace cra::learn
