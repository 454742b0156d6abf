#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cra/classifier.hpp"
#include "cra/matrix.hpp"
#include "json.hpp"

namespace cra::learn {

struct Confusion {
  std::size_t tp = 0;  // useful predicted useful
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Undefined ratios (no predictions or no support) score 0.
ClassScores useful_scores(const Confusion& c);
ClassScores not_useful_scores(const Confusion& c);
double accuracy(const Confusion& c);
Confusion confusion(std::span<const int> truth, std::span<const int> predicted);

struct FoldRow {
  int repeat = 0;
  int fold = 0;
  Confusion counts;
  double accuracy = 0.0;
  ClassScores useful;
  ClassScores not_useful;
};

struct CvConfig {
  int repeats = 20;
  int folds = 10;
  std::uint64_t seed = 42;
  bool oversample = true;
  std::size_t smote_k = 5;
};

struct EvaluationReport {
  CvConfig config;
  Algorithm algorithm = Algorithm::random_forest;
  std::vector<FoldRow> rows;

  double mean_accuracy() const;
  ClassScores mean_useful() const;
  ClassScores mean_not_useful() const;
  std::vector<double> accuracies() const;
  /// F1 of the class with fewer rows in the evaluated data.
  std::vector<double> minority_f1() const;
  int minority_label = 0;

  nlohmann::json to_json() const;
};

/// Stratified fold index per row: rows of each class are shuffled and dealt
/// round-robin, the dealing position carrying over from one class to the next.
std::vector<int> stratified_folds(std::span<const int> y, int folds, std::uint64_t seed);

/// What one fold saw; for audits and leak tests.
struct FoldTrace {
  int repeat = 0;
  int fold = 0;
  std::span<const std::size_t> train_rows;
  std::span<const std::size_t> test_rows;
  /// Synthetic training rows as pairs of dataset row indices they interpolate.
  std::span<const std::pair<std::size_t, std::size_t>> synthetic_sources;
};
using FoldObserver = std::function<void(const FoldTrace&)>;

/// Repeated stratified k-fold. Fold membership depends only on (y, seed,
/// repeat), so algorithms compared under one seed see identical splits.
/// Oversampling touches training partitions only. Throws TooFewSamples when a
/// class has fewer rows than folds.
EvaluationReport cross_validate(const Matrix& x, std::span<const int> y, const AlgorithmConfig& algorithm,
                                const CvConfig& config, const FoldObserver& observer = {});

}  // namespace cra::learn
