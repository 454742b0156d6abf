#include "cra/classifier.hpp"

#include <cmath>
#include <numeric>

#include "cra/error.hpp"

namespace cra::learn {

using nlohmann::json;

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::decision_tree: return "decision_tree";
    case Algorithm::random_forest: return "random_forest";
    case Algorithm::logistic_regression: return "logistic_regression";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  if (text == "dt" || text == "decision_tree") return Algorithm::decision_tree;
  if (text == "rf" || text == "random_forest") return Algorithm::random_forest;
  if (text == "lr" || text == "logistic_regression") return Algorithm::logistic_regression;
  return std::nullopt;
}

AlgorithmConfig AlgorithmConfig::defaults(Algorithm a) {
  AlgorithmConfig c;
  c.algorithm = a;
  return c;
}

json AlgorithmConfig::hyperparameters() const {
  switch (algorithm) {
    case Algorithm::decision_tree:
      return {{"max_depth", tree.max_depth}, {"min_samples_split", tree.min_samples_split},
              {"max_features", tree.max_features}};
    case Algorithm::random_forest:
      return {{"n_trees", n_trees}, {"bootstrap", bootstrap}, {"max_depth", tree.max_depth},
              {"min_samples_split", tree.min_samples_split}, {"max_features", tree.max_features}};
    case Algorithm::logistic_regression:
      return {{"c", logistic.c}, {"tol", logistic.tol}, {"max_iter", logistic.max_iter}};
  }
  return json::object();
}

AlgorithmConfig AlgorithmConfig::from_hyperparameters(Algorithm a, const json& h) {
  AlgorithmConfig c = defaults(a);
  c.tree.max_depth = h.value("max_depth", c.tree.max_depth);
  c.tree.min_samples_split = h.value("min_samples_split", c.tree.min_samples_split);
  c.tree.max_features = h.value("max_features", c.tree.max_features);
  c.n_trees = h.value("n_trees", c.n_trees);
  c.bootstrap = h.value("bootstrap", c.bootstrap);
  c.logistic.c = h.value("c", c.logistic.c);
  c.logistic.tol = h.value("tol", c.logistic.tol);
  c.logistic.max_iter = h.value("max_iter", c.logistic.max_iter);
  return c;
}

Algorithm Classifier::algorithm() const {
  switch (fitted_.index()) {
    case 0: return Algorithm::decision_tree;
    case 1: return Algorithm::random_forest;
    default: return Algorithm::logistic_regression;
  }
}

double Classifier::predict_proba(std::span<const double> row) const {
  if (row.size() != n_features_) {
    throw Error(ErrorCode::SchemaMismatch, "model expects " + std::to_string(n_features_) + " columns, got " +
                                               std::to_string(row.size()));
  }
  return std::visit([&](const auto& m) { return m.predict_proba(row); }, fitted_);
}

namespace {

json tree_to_json(const DecisionTree& t) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       value = json::array();
  for (const auto& n : t.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.positive_fraction);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

DecisionTree tree_from_json(const json& j) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) {
    throw Error(ErrorCode::SchemaMismatch, "tree node arrays differ in length");
  }
  std::vector<TreeNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
    if (feature[i] >= 0) {
      const auto in_range = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
      if (!in_range(left[i]) || !in_range(right[i])) {
        throw Error(ErrorCode::SchemaMismatch, "tree node " + std::to_string(i) + " has invalid children");
      }
    }
  }
  return DecisionTree(std::move(nodes));
}

void check_features(const DecisionTree& t, std::size_t n_features) {
  for (const auto& node : t.nodes()) {
    if (node.feature >= static_cast<int>(n_features)) {
      throw Error(ErrorCode::SchemaMismatch, "tree refers to a column beyond the model width");
    }
  }
}

}  // namespace

json Classifier::to_json() const {
  json j{{"algorithm", to_string(algorithm())}, {"n_features", n_features_}, {"importance", importance_}};
  if (const auto* t = std::get_if<DecisionTree>(&fitted_)) {
    j["trees"] = json::array({tree_to_json(*t)});
  } else if (const auto* f = std::get_if<RandomForest>(&fitted_)) {
    json trees = json::array();
    for (const auto& t : f->trees()) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
  } else {
    const auto& lr = std::get<LogisticModel>(fitted_);
    j["weights"] = lr.weights();
    j["intercept"] = lr.intercept();
  }
  return j;
}

Classifier Classifier::from_json(const json& j) {
  try {
    const auto algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (!algorithm) throw Error(ErrorCode::SchemaMismatch, "unknown algorithm in model");
    const auto n_features = j.at("n_features").get<std::size_t>();
    auto importance = j.at("importance").get<std::vector<double>>();
    switch (*algorithm) {
      case Algorithm::decision_tree: {
        if (j.at("trees").size() != 1) throw Error(ErrorCode::SchemaMismatch, "decision tree model needs one tree");
        DecisionTree t = tree_from_json(j.at("trees")[0]);
        check_features(t, n_features);
        return Classifier(std::move(t), std::move(importance), n_features);
      }
      case Algorithm::random_forest: {
        std::vector<DecisionTree> trees;
        for (const auto& tj : j.at("trees")) {
          trees.push_back(tree_from_json(tj));
          check_features(trees.back(), n_features);
        }
        return Classifier(RandomForest(std::move(trees), importance), std::move(importance), n_features);
      }
      case Algorithm::logistic_regression: {
        auto weights = j.at("weights").get<std::vector<double>>();
        if (weights.size() != n_features) throw Error(ErrorCode::SchemaMismatch, "weight count differs from width");
        return Classifier(LogisticModel(std::move(weights), j.at("intercept").get<double>()), std::move(importance),
                          n_features);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("malformed model parameters: ") + e.what());
  }
  throw Error(ErrorCode::SchemaMismatch, "unreachable");
}

Classifier train(const AlgorithmConfig& config, const Matrix& x, std::span<const int> y, std::uint64_t seed) {
  if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "training rows and labels differ in length");
  if (x.rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");
  std::size_t positives = 0;
  for (int label : y) {
    if (label != 0 && label != 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    positives += static_cast<std::size_t>(label);
  }
  if (positives == 0 || positives == y.size()) {
    throw Error(ErrorCode::SingleClassTraining, "training labels contain a single class");
  }
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, "training matrix contains a non-finite value");
  }

  switch (config.algorithm) {
    case Algorithm::decision_tree: {
      GrownTree grown = train_tree(x, y, config.tree, seed);
      return Classifier(std::move(grown.tree), std::move(grown.importance), x.cols());
    }
    case Algorithm::random_forest: {
      ForestParams params{config.n_trees, config.bootstrap, config.tree};
      RandomForest forest = train_forest(x, y, params, seed);
      auto importance = forest.importance();
      return Classifier(std::move(forest), std::move(importance), x.cols());
    }
    case Algorithm::logistic_regression: {
      LogisticFit fit = train_logistic(x, y, config.logistic);
      std::vector<double> importance(x.cols());
      for (std::size_t j = 0; j < importance.size(); ++j) importance[j] = std::abs(fit.model.weights()[j]);
      const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
      if (total > 0.0) {
        for (double& v : importance) v /= total;
      }
      return Classifier(std::move(fit.model), std::move(importance), x.cols());
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

}  // namespace cra::learn
