#include "cra/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "cra/error.hpp"
#include "cra/textfeat.hpp"

namespace cra::textfeat {

double SparseVector::norm() const {
  double sum = 0.0;
  for (const auto& [_, v] : entries) sum += v * v;
  return std::sqrt(sum);
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim, 0.0);
  for (const auto& [i, v] : entries) out[i] = v;
  return out;
}

Vectorizer Vectorizer::fit(std::span<const std::string> corpus, std::size_t max_terms) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& text : corpus) docs.push_back(tokenize(text).lower);
  return fit_tokens(docs, max_terms);
}

Vectorizer Vectorizer::fit_tokens(std::span<const std::vector<std::string>> documents, std::size_t max_terms) {
  if (documents.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot fit a vectorizer on zero documents");

  std::map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::unordered_set<std::string_view> seen(doc.begin(), doc.end());
    for (auto term : seen) ++df[std::string(term)];
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_terms) ranked.resize(max_terms);
  std::sort(ranked.begin(), ranked.end());

  const double n = static_cast<double>(documents.size());
  std::vector<std::string> terms;
  std::vector<double> idf;
  for (auto& [term, count] : ranked) {
    terms.push_back(term);
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return from_parts(std::move(terms), std::move(idf));
}

Vectorizer Vectorizer::from_parts(std::vector<std::string> terms, std::vector<double> idf) {
  if (terms.size() != idf.size()) {
    throw Error(ErrorCode::DimensionMismatch, "vocabulary and idf lengths differ");
  }
  Vectorizer v;
  v.terms_ = std::move(terms);
  v.idf_ = std::move(idf);
  for (std::uint32_t i = 0; i < v.terms_.size(); ++i) v.index_[v.terms_[i]] = i;
  return v;
}

SparseVector Vectorizer::transform(std::string_view text) const { return transform_tokens(tokenize(text).lower); }

SparseVector Vectorizer::transform_tokens(std::span<const std::string> tokens) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& tok : tokens) {
    if (auto it = index_.find(tok); it != index_.end()) counts[it->second] += 1.0;
  }
  SparseVector out;
  out.dim = terms_.size();
  double sum = 0.0;
  for (const auto& [i, tf] : counts) {
    const double w = tf * idf_[i];
    out.entries.emplace_back(i, w);
    sum += w * w;
  }
  if (sum > 0.0) {
    const double inv = 1.0 / std::sqrt(sum);
    for (auto& [_, w] : out.entries) w *= inv;
  }
  return out;
}

std::optional<std::uint32_t> Vectorizer::index_of(std::string_view term) const {
  if (auto it = index_.find(std::string(term)); it != index_.end()) return it->second;
  return std::nullopt;
}

std::optional<double> Vectorizer::idf_of(std::string_view term) const {
  if (auto i = index_of(term)) return idf_[*i];
  return std::nullopt;
}

double cosine_similarity(const SparseVector& a, const SparseVector& b) {
  if (a.dim != b.dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "vectors of dimension " + std::to_string(a.dim) + " and " + std::to_string(b.dim));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  double dot = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) ++ia;
    else if (ib->first < ia->first) ++ib;
    else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vectors of dimension " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace cra::textfeat
