#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cra/matrix.hpp"
#include "cra/rng.hpp"

namespace cra::learn {

struct TreeParams {
  int max_depth = 16;
  int min_samples_split = 2;
  /// Candidate features per split; 0 means all of them.
  std::size_t max_features = 0;
};

struct TreeNode {
  /// -1 marks a leaf.
  int feature = -1;
  /// Rows with value <= threshold go left.
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  /// Fraction of positive training rows that reached this node.
  double positive_fraction = 0.0;
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes);

  double predict_proba(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// Per-column bin codes shared by all trees grown on one training matrix.
/// Columns with at most kMaxBins distinct values get one bin per value, so
/// split search is exact there; wider columns are cut at sample quantiles.
/// Thresholds sit halfway between the largest value of a bin and the smallest
/// value of the next, so binned and raw routing agree on training rows.
class BinnedMatrix {
 public:
  static constexpr std::size_t kMaxBins = 256;

  explicit BinnedMatrix(const Matrix& x);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return thresholds_.size(); }
  std::uint8_t code(std::size_t row, std::size_t col) const { return codes_[col * rows_ + row]; }
  const std::uint8_t* column_codes(std::size_t col) const { return codes_.data() + col * rows_; }
  std::size_t bins(std::size_t col) const { return thresholds_[col].size() + 1; }
  double threshold(std::size_t col, std::size_t bin) const { return thresholds_[col][bin]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::uint8_t> codes_;
  std::vector<std::vector<double>> thresholds_;
};

struct GrownTree {
  DecisionTree tree;
  /// Gini decrease per feature, normalized to sum 1 (all zero for a stump).
  std::vector<double> importance;
};

/// CART with Gini impurity over `sample` (row indices; repeats act as
/// weights). Only consumes `rng` when max_features < number of columns.
GrownTree grow_tree(const BinnedMatrix& x, std::span<const int> y, std::vector<std::uint32_t> sample,
                    const TreeParams& params, Rng& rng);

struct ForestParams {
  std::size_t n_trees = 225;
  bool bootstrap = true;
  /// max_features 0 here means floor(sqrt(columns)).
  TreeParams tree;
};

class RandomForest {
 public:
  RandomForest() = default;
  explicit RandomForest(std::vector<DecisionTree> trees, std::vector<double> importance = {});

  /// Mean of the trees' leaf probabilities.
  double predict_proba(std::span<const double> row) const;
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<double>& importance() const { return importance_; }

 private:
  std::vector<DecisionTree> trees_;
  std::vector<double> importance_;
};

RandomForest train_forest(const Matrix& x, std::span<const int> y, const ForestParams& params, std::uint64_t seed);
GrownTree train_tree(const Matrix& x, std::span<const int> y, const TreeParams& params, std::uint64_t seed);

}  // namespace cra::learn
