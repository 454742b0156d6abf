#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cra/logistic.hpp"
#include "cra/matrix.hpp"
#include "cra/tree.hpp"
#include "json.hpp"

namespace cra::learn {

enum class Algorithm { decision_tree, random_forest, logistic_regression };

std::string_view to_string(Algorithm a);
/// Accepts the full names and the short forms dt, rf, lr.
std::optional<Algorithm> parse_algorithm(std::string_view text);

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::random_forest;
  /// Decision tree, and each forest tree.
  TreeParams tree;
  std::size_t n_trees = 225;
  bool bootstrap = true;
  LogisticParams logistic;

  static AlgorithmConfig defaults(Algorithm a);
  nlohmann::json hyperparameters() const;
  static AlgorithmConfig from_hyperparameters(Algorithm a, const nlohmann::json& h);
};

class Classifier {
 public:
  using Fitted = std::variant<DecisionTree, RandomForest, LogisticModel>;

  Classifier() = default;
  Classifier(Fitted fitted, std::vector<double> importance, std::size_t n_features)
      : fitted_(std::move(fitted)), importance_(std::move(importance)), n_features_(n_features) {}

  Algorithm algorithm() const;
  /// Probability of the positive (useful) class. Throws SchemaMismatch on a
  /// row of the wrong width.
  double predict_proba(std::span<const double> row) const;
  int predict(std::span<const double> row) const { return predict_proba(row) >= 0.5 ? 1 : 0; }
  /// Normalized to sum 1 (Gini decrease for trees, |weight| for logistic).
  const std::vector<double>& importance() const { return importance_; }
  std::size_t n_features() const { return n_features_; }
  const Fitted& fitted() const { return fitted_; }

  nlohmann::json to_json() const;
  static Classifier from_json(const nlohmann::json& j);

 private:
  Fitted fitted_;
  std::vector<double> importance_;
  std::size_t n_features_ = 0;
};

/// Throws LengthMismatch, EmptyTrainingSet, SingleClassTraining or
/// NonFiniteFeature. Deterministic in `seed`.
Classifier train(const AlgorithmConfig& config, const Matrix& x, std::span<const int> y, std::uint64_t seed);

}  // namespace cra::learn
