#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cra::textfeat {

struct SparseVector {
  std::size_t dim = 0;
  /// Sorted by index, no zeros.
  std::vector<std::pair<std::uint32_t, double>> entries;

  double norm() const;
  std::vector<double> to_dense() const;
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

inline constexpr std::size_t kMaxVocabulary = 500;

/// TF-IDF model: vocabulary chosen by document frequency (ties broken
/// lexicographically), smoothed idf = ln((1+N)/(1+df)) + 1, tf = raw count,
/// L2-normalized output. Immutable after fit.
class Vectorizer {
 public:
  Vectorizer() = default;

  /// Throws EmptyCorpus when `corpus` has no documents.
  static Vectorizer fit(std::span<const std::string> corpus, std::size_t max_terms = kMaxVocabulary);
  static Vectorizer fit_tokens(std::span<const std::vector<std::string>> documents,
                               std::size_t max_terms = kMaxVocabulary);
  /// Rebuilds a fitted vectorizer from persisted state.
  static Vectorizer from_parts(std::vector<std::string> terms, std::vector<double> idf);

  SparseVector transform(std::string_view text) const;
  SparseVector transform_tokens(std::span<const std::string> tokens) const;

  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  std::optional<std::uint32_t> index_of(std::string_view term) const;
  std::optional<double> idf_of(std::string_view term) const;

 private:
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// dot / (|a| |b|); 0 when either norm is 0. Throws DimensionMismatch.
double cosine_similarity(const SparseVector& a, const SparseVector& b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace cra::textfeat
