#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cra/classifier.hpp"
#include "cra/cv.hpp"
#include "cra/features.hpp"
#include "cra/ingest.hpp"
#include "cra/selection.hpp"
#include "cra/textfeat.hpp"
#include "cra/tfidf.hpp"

namespace cra::pipeline {

inline constexpr int kArtifactVersion = 1;
inline constexpr std::string_view kArtifactMagic = "CRA-MODEL/";

/// Everything prediction needs; no training data.
struct TrainedModel {
  learn::AlgorithmConfig algorithm;
  std::uint64_t seed = 42;
  textfeat::Vectorizer vectorizer;
  features::Discretizer discretizer;
  /// "message" and scalar names, in design-column order.
  std::vector<std::string> selected_feature_ids;
  learn::Classifier classifier;
  int artifact_version = kArtifactVersion;

  features::DesignLayout layout() const;
  /// Short algorithm name plus a content hash of the serialized artifact.
  std::string model_version() const;
};

/// "CRA-MODEL/<version>\n" followed by one JSON document.
std::string serialize_model(const TrainedModel& model);
/// Throws ArtifactVersionMismatch for another version and SchemaMismatch for
/// anything malformed.
TrainedModel parse_model(std::string_view bytes);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

struct Prediction {
  bool useful = false;
  double probability = 0.0;
};

/// Takes an undiscretized vector from features::extract with the model's
/// vectorizer. Throws SchemaMismatch when the vector does not fit the model.
Prediction predict(const TrainedModel& model, const features::FeatureVector& raw);

/// Extracts with the model's own text resources, then predicts.
Prediction predict_comment(const TrainedModel& model, const ReviewComment& comment, const ReviewChange& change,
                           const std::vector<ReviewChange>& history, const textfeat::Lexicons& lexicons);

/// One verdict per comment: the most recent label, ties to the larger rater id.
std::vector<UsefulnessLabel> latest_labels(std::span<const UsefulnessLabel> labels);

/// comment_id,rater_id,is_useful,category,labeled_at
std::string write_labels_csv(std::span<const UsefulnessLabel> labels);
/// Throws InvalidArgument naming the line of the first bad row.
std::vector<UsefulnessLabel> parse_labels_csv(std::string_view text);

/// Labeled comments with raw feature vectors, in dump order.
struct TrainingSet {
  textfeat::Vectorizer vectorizer;
  std::vector<std::string> comment_ids;
  std::vector<features::FeatureVector> vectors;
  std::vector<int> labels;
};

/// Fits the vocabulary on the whole dump and extracts every labeled comment.
/// Labels for comments absent from the dump are ignored.
TrainingSet build_training_set(const ReviewDump& dump, std::span<const UsefulnessLabel> labels,
                               const textfeat::Lexicons& lexicons);

struct TrainOptions {
  learn::AlgorithmConfig algorithm = learn::AlgorithmConfig::defaults(learn::Algorithm::random_forest);
  std::uint64_t seed = 42;
  int bins = 4;
  /// Run correlation pruning and elimination; otherwise keep every feature.
  bool select = true;
  features::SelectionConfig selection;
  /// SMOTE the training rows before the final fit.
  bool oversample = true;
};

/// Discretized, selected design matrix shared by training and evaluation.
struct PreparedData {
  features::Discretizer discretizer;
  features::FeatureSelection selection;
  features::DesignLayout layout;
  learn::Matrix x;
  std::vector<int> y;
};

PreparedData prepare(const TrainingSet& data, const TrainOptions& options);

struct TrainOutcome {
  TrainedModel model;
  features::FeatureSelection selection;
};

/// Throws EmptyTrainingSet or SingleClassTraining.
TrainOutcome fit_model(const TrainingSet& data, const TrainOptions& options);

}  // namespace cra::pipeline
