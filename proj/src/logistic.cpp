#include "cra/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "cra/error.hpp"

namespace cra::learn {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

class Objective {
 public:
  Objective(const Matrix& x, std::span<const int> y, double c) : x_(x), y_(y), c_(c) {}

  /// Value at theta = [w..., b]; fills `grad`.
  double evaluate(const std::vector<double>& theta, std::vector<double>& grad) const {
    const std::size_t p = x_.cols();
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      const auto row = x_.row(i);
      double z = theta[p];
      for (std::size_t j = 0; j < p; ++j) z += theta[j] * row[j];
      loss += softplus(z) - y_[i] * z;
      const double r = c_ * (sigmoid(z) - y_[i]);
      for (std::size_t j = 0; j < p; ++j) grad[j] += r * row[j];
      grad[p] += r;
    }
    double penalty = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      penalty += theta[j] * theta[j];
      grad[j] += theta[j];
    }
    return c_ * loss + 0.5 * penalty;
  }

 private:
  const Matrix& x_;
  std::span<const int> y_;
  double c_;
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double LogisticModel::predict_proba(std::span<const double> row) const {
  if (row.size() != weights_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "logistic model expects " + std::to_string(weights_.size()) +
                                                  " features, got " + std::to_string(row.size()));
  }
  double z = intercept_;
  for (std::size_t j = 0; j < row.size(); ++j) z += weights_[j] * row[j];
  return sigmoid(z);
}

LogisticFit train_logistic(const Matrix& x, std::span<const int> y, const LogisticParams& params) {
  constexpr std::size_t kMemory = 10;
  constexpr double kArmijo = 1e-4;
  const double ftol = 64.0 * std::numeric_limits<double>::epsilon();

  const std::size_t dim = x.cols() + 1;
  const Objective objective(x, y, params.c);
  std::vector<double> theta(dim, 0.0), grad(dim), next(dim), next_grad(dim), dir(dim);
  double f = objective.evaluate(theta, grad);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  LogisticFit fit;

  for (int iter = 0; iter < params.max_iter; ++iter) {
    if (max_abs(grad) <= params.tol) {
      fit.converged = true;
      break;
    }
    // Two-loop recursion for dir = -H * grad.
    dir = grad;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], dir);
      for (std::size_t j = 0; j < dim; ++j) dir[j] -= alpha[k] * y_hist[k][j];
    }
    if (!s_hist.empty()) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& d : dir) d *= gamma;
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], dir);
      for (std::size_t j = 0; j < dim; ++j) dir[j] += (alpha[k] - beta) * s_hist[k][j];
    }
    for (double& d : dir) d = -d;

    double slope = dot(grad, dir);
    if (slope >= 0.0) {
      // Not a descent direction; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t j = 0; j < dim; ++j) dir[j] = -grad[j];
      slope = dot(grad, dir);
    }

    double step = s_hist.empty() ? std::min(1.0, 1.0 / std::sqrt(dot(grad, grad))) : 1.0;
    double f_next = 0.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t j = 0; j < dim; ++j) next[j] = theta[j] + step * dir[j];
      f_next = objective.evaluate(next, next_grad);
      if (f_next <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    fit.iterations = iter + 1;
    if (!accepted) break;

    std::vector<double> s(dim), yv(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      s[j] = next[j] - theta[j];
      yv[j] = next_grad[j] - grad[j];
    }
    const double sy = dot(s, yv);
    if (sy > 1e-12 * dot(yv, yv)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double decrease = (f - f_next) / std::max({std::abs(f), std::abs(f_next), 1.0});
    theta.swap(next);
    grad.swap(next_grad);
    f = f_next;
    if (decrease <= ftol) {
      fit.converged = max_abs(grad) <= params.tol;
      break;
    }
  }
  if (!fit.converged && max_abs(grad) <= params.tol) fit.converged = true;

  const double intercept = theta.back();
  theta.pop_back();
  fit.model = LogisticModel(std::move(theta), intercept);
  return fit;
}

}  // namespace cra::learn
