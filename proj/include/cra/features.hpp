#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cra/ingest.hpp"
#include "cra/matrix.hpp"
#include "cra/textfeat.hpp"
#include "cra/tfidf.hpp"

namespace cra::features {

/// Scalar features in their canonical column order.
enum class Scalar : std::size_t {
  comment_sentiment,
  question_ratio,
  code_element_number,
  code_element_ratio,
  similarity,
  readability,
  word_count,
  stop_word_ratio,
  author_responded,
  review_interval,
  patch_id,
  num_patches,
  change_trigger,
  line_change,
  confirmatory_response,
  gratitude,
  reply_sentiment,
  is_last_patch,
  thread_length,
  num_participant,
  review_status,
  code_reviewership,
  code_ownership,
  reviewing_experience,
  developer_experience,
};

inline constexpr std::size_t kScalarCount = 25;
/// The TF-IDF block of the comment text; one feature for selection purposes.
inline constexpr std::string_view kMessageFeature = "message";

std::string_view scalar_name(Scalar s);
const std::array<std::string_view, kScalarCount>& scalar_names();
std::optional<Scalar> parse_scalar(std::string_view name);
constexpr std::size_t index(Scalar s) { return static_cast<std::size_t>(s); }

/// review_status encoding: abandoned 0, merged 1, open 2.
double encode_status(ChangeStatus s);

struct FeatureVector {
  textfeat::SparseVector message;
  std::vector<double> scalars = std::vector<double>(kScalarCount, 0.0);
  /// The comment had no code context, so similarity was set to 0.
  bool missing_code_context = false;

  double& operator[](Scalar s) { return scalars[index(s)]; }
  double operator[](Scalar s) const { return scalars[index(s)]; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Shared text resources for extraction.
struct TextModel {
  const textfeat::Vectorizer& vectorizer;
  const textfeat::Lexicons& lexicons;
  /// Defaults to the lexicon scorer when null.
  const textfeat::SentimentScorer* scorer = nullptr;
};

/// One comment's feature vector. `history` supplies the experience counts,
/// evaluated strictly before the comment was written.
FeatureVector extract(const ReviewComment& comment, const ReviewChange& change,
                      const std::vector<ReviewChange>& history, const TextModel& text);

/// Vocabulary over every comment text and code context in `changes`, stop
/// words removed.
textfeat::Vectorizer fit_text_vectorizer(const std::vector<ReviewChange>& changes, const textfeat::Lexicons& lexicons,
                                         std::size_t max_terms = textfeat::kMaxVocabulary);

/// Per-feature quantile bins. A value lands in bin i when it lies in
/// (edge[i], edge[i+1]]; the lowest bin also takes the minimum, and values
/// outside the fitted range clamp to the end bins.
class Discretizer {
 public:
  /// review_interval, similarity, readability, line_change, word_count,
  /// thread_length and the four experience counts.
  static const std::vector<Scalar>& default_targets();

  Discretizer() = default;
  /// Throws EmptyTrainingSet when `training` is empty.
  static Discretizer fit(std::span<const FeatureVector> training, int q = 4,
                         const std::vector<Scalar>& targets = default_targets());
  static Discretizer from_edges(std::map<std::size_t, std::vector<double>> edges);

  FeatureVector apply(FeatureVector fv) const;
  /// Bin for a value of the feature in `column`; the value itself when that
  /// feature is not discretized.
  double transform(std::size_t column, double value) const;
  static int bin_of(std::span<const double> edges, double value);

  const std::map<std::size_t, std::vector<double>>& edges() const { return edges_; }
  friend bool operator==(const Discretizer&, const Discretizer&) = default;

 private:
  std::map<std::size_t, std::vector<double>> edges_;
};

/// Linear-interpolation quantile edges at k/q, k = 0..q, deduplicated.
std::vector<double> quantile_edges(std::vector<double> values, int q);

/// Which feature columns a learner sees: chosen scalars, then optionally
/// every TF-IDF dimension.
struct DesignLayout {
  std::vector<Scalar> scalars;
  bool message = false;
  std::size_t vocabulary_size = 0;

  std::size_t width() const { return scalars.size() + (message ? vocabulary_size : 0); }
  std::vector<std::string> feature_ids() const;
  static DesignLayout from_feature_ids(std::span<const std::string> ids, std::size_t vocabulary_size);
  static DesignLayout all(std::size_t vocabulary_size);
};

std::vector<double> design_row(const FeatureVector& fv, const DesignLayout& layout);
learn::Matrix design_matrix(std::span<const FeatureVector> vectors, const DesignLayout& layout);

}  // namespace cra::features
