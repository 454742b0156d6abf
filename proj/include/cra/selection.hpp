#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cra/classifier.hpp"
#include "cra/features.hpp"
#include "cra/matrix.hpp"
#include "json.hpp"

namespace cra::features {

/// Why a feature left the candidate set before elimination.
struct CorrelationDrop {
  std::string feature;
  /// "zero_variance" or "correlated".
  std::string reason;
  /// Empty for zero_variance.
  std::string kept_instead;
  /// Pearson r between the dropped and kept features.
  double pearson_r = 0.0;
  /// Point-biserial correlation with the label, dropped and kept.
  double label_r_dropped = 0.0;
  double label_r_kept = 0.0;
  friend bool operator==(const CorrelationDrop&, const CorrelationDrop&) = default;
};

/// One elimination round: the set evaluated, its score, and what goes next.
struct RfeStep {
  std::vector<std::string> features;
  double mean_f1 = 0.0;
  /// Empty on the last round.
  std::string dropped;
  double dropped_importance = 0.0;
  friend bool operator==(const RfeStep&, const RfeStep&) = default;
};

/// final_selected is a subset of kept_after_correlation, itself a subset of
/// all_features. Replaying the audit reproduces both sets.
struct FeatureSelection {
  std::vector<std::string> all_features;
  std::vector<std::string> kept_after_correlation;
  std::vector<std::string> final_selected;
  std::vector<CorrelationDrop> correlation_drops;
  std::vector<RfeStep> rfe_steps;

  nlohmann::json to_json() const;
  static FeatureSelection from_json(const nlohmann::json& j);
  /// Recomputes both kept sets from the audit alone.
  FeatureSelection replay() const;
  friend bool operator==(const FeatureSelection&, const FeatureSelection&) = default;
};

double pearson(std::span<const double> a, std::span<const double> b);
/// Pearson r against a 0/1 label; 0 when either side is constant.
double point_biserial(std::span<const double> x, std::span<const int> y);

/// Groups columns linked by |r| >= threshold and keeps the one most
/// correlated with the label in each group, ties to the earlier column.
/// Zero-variance columns are dropped outright. Throws LengthMismatch,
/// TooFewSamples (fewer than two rows) or InvalidArgument (non-binary y).
FeatureSelection drop_correlated(const learn::Matrix& x, std::span<const std::string> names, std::span<const int> y,
                                 double threshold = 0.9);

/// A droppable group of columns, e.g. the whole TF-IDF block.
struct FeatureUnit {
  std::string name;
  std::vector<std::size_t> columns;
};

struct RfeConfig {
  learn::AlgorithmConfig estimator = rfe_estimator();
  int folds = 10;
  int repeats = 1;
  std::uint64_t seed = 42;
  bool oversample = true;

  /// A 50-tree forest; elimination refits many times.
  static learn::AlgorithmConfig rfe_estimator();
};

/// Drops the least important unit each round (importance from a fit on all
/// rows, summed over the unit's columns; ties drop the later unit) until one
/// is left, scoring every round by cross-validated minority-class F1. Keeps
/// the best-scoring set, ties to the smaller. Throws TooFewSamples when
/// there are fewer rows than folds.
FeatureSelection rfe_cv(const learn::Matrix& x, std::span<const FeatureUnit> units, std::span<const int> y,
                        const RfeConfig& config = {});

struct SelectionConfig {
  double correlation_threshold = 0.9;
  RfeConfig rfe;
};

/// Both stages over discretized vectors. The TF-IDF block skips the
/// correlation stage and is eliminated as one unit.
FeatureSelection select_features(std::span<const FeatureVector> vectors, std::span<const int> y,
                                 std::size_t vocabulary_size, const SelectionConfig& config = {});

}  // namespace cra::features
