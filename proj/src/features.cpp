#include "cra/features.hpp"

#include <algorithm>
#include <cmath>

#include "cra/error.hpp"

namespace cra::features {

namespace {

constexpr std::array<std::string_view, kScalarCount> kNames = {
    "comment_sentiment", "question_ratio",  "code_element_number",  "code_element_ratio",
    "similarity",        "readability",     "word_count",           "stop_word_ratio",
    "author_responded",  "review_interval", "patch_id",             "num_patches",
    "change_trigger",    "line_change",     "confirmatory_response", "gratitude",
    "reply_sentiment",   "is_last_patch",   "thread_length",        "num_participant",
    "review_status",     "code_reviewership", "code_ownership",     "reviewing_experience",
    "developer_experience",
};

double flag(bool b) { return b ? 1.0 : 0.0; }

const CommentThread& owning_thread(const ReviewComment& comment, const ReviewChange& change) {
  const CommentThread* thread = find_thread(change, comment.thread_id);
  if (thread == nullptr) {
    throw Error(ErrorCode::InvalidArgument,
                "comment '" + comment.comment_id + "' has no thread in change '" + change.change_id + "'");
  }
  return *thread;
}

}  // namespace

std::string_view scalar_name(Scalar s) { return kNames[index(s)]; }
const std::array<std::string_view, kScalarCount>& scalar_names() { return kNames; }

std::optional<Scalar> parse_scalar(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Scalar>(i);
  }
  return std::nullopt;
}

double encode_status(ChangeStatus s) {
  switch (s) {
    case ChangeStatus::abandoned: return 0.0;
    case ChangeStatus::merged: return 1.0;
    case ChangeStatus::open: return 2.0;
  }
  return 2.0;
}

FeatureVector extract(const ReviewComment& comment, const ReviewChange& change,
                      const std::vector<ReviewChange>& history, const TextModel& text) {
  const auto& lex = text.lexicons;
  const textfeat::LexiconSentiment fallback(lex);
  const textfeat::SentimentScorer& scorer = text.scorer != nullptr ? *text.scorer : fallback;
  const CommentThread& thread = owning_thread(comment, change);

  FeatureVector fv;
  const auto terms = textfeat::content_terms(comment.text, lex.stop_words);
  fv.message = text.vectorizer.transform_tokens(terms);

  fv[Scalar::comment_sentiment] = scorer.score(comment.text);
  fv[Scalar::question_ratio] = textfeat::question_ratio(comment.text);
  const auto code = textfeat::code_element_stats(comment.text, lex.keywords);
  fv[Scalar::code_element_number] = code.count;
  fv[Scalar::code_element_ratio] = code.ratio;
  if (comment.code_context && !comment.code_context->empty()) {
    const auto code_terms = textfeat::content_terms(*comment.code_context, lex.stop_words);
    fv[Scalar::similarity] =
        textfeat::cosine_similarity(fv.message, text.vectorizer.transform_tokens(code_terms));
  } else {
    fv.missing_code_context = true;
  }
  fv[Scalar::readability] = textfeat::readability(comment.text);
  fv[Scalar::word_count] = static_cast<double>(textfeat::tokenize(comment.text).size());
  fv[Scalar::stop_word_ratio] = textfeat::stop_word_ratio(comment.text, lex.stop_words);

  const ThreadContext ctx = thread_context(comment, change);
  fv[Scalar::author_responded] = flag(ctx.author_responded);
  fv[Scalar::review_interval] = static_cast<double>(ctx.review_interval);
  fv[Scalar::patch_id] = ctx.patch_id;
  fv[Scalar::num_patches] = ctx.num_patches;

  const TriggerResult trigger = change_trigger(comment, change);
  fv[Scalar::change_trigger] = flag(trigger.triggered);
  fv[Scalar::line_change] = trigger.line_change;

  const auto replies = textfeat::reply_signals(ctx.reply_texts, lex, scorer);
  fv[Scalar::confirmatory_response] = flag(replies.confirmatory);
  fv[Scalar::gratitude] = flag(replies.gratitude);
  fv[Scalar::reply_sentiment] = replies.reply_sentiment;

  fv[Scalar::is_last_patch] = flag(ctx.is_last_patch);
  fv[Scalar::thread_length] = ctx.thread_length;
  fv[Scalar::num_participant] = ctx.num_participant;
  fv[Scalar::review_status] = encode_status(ctx.review_status);

  const ExperienceFeatures exp = experience(history, comment.author_id, change.author_id, thread.file_path,
                                            change.project_id, comment.written_at);
  fv[Scalar::code_reviewership] = exp.code_reviewership;
  fv[Scalar::code_ownership] = exp.code_ownership;
  fv[Scalar::reviewing_experience] = exp.reviewing_experience;
  fv[Scalar::developer_experience] = exp.developer_experience;
  return fv;
}

textfeat::Vectorizer fit_text_vectorizer(const std::vector<ReviewChange>& changes, const textfeat::Lexicons& lexicons,
                                         std::size_t max_terms) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& change : changes) {
    for (const auto& thread : change.threads) {
      for (const auto& c : thread.comments) {
        docs.push_back(textfeat::content_terms(c.text, lexicons.stop_words));
        if (c.code_context && !c.code_context->empty()) {
          docs.push_back(textfeat::content_terms(*c.code_context, lexicons.stop_words));
        }
      }
    }
  }
  return textfeat::Vectorizer::fit_tokens(docs, max_terms);
}

std::vector<double> quantile_edges(std::vector<double> values, int q) {
  if (values.empty()) return {};
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "need at least one bin");
  std::sort(values.begin(), values.end());
  const double last = static_cast<double>(values.size() - 1);
  std::vector<double> edges;
  for (int k = 0; k <= q; ++k) {
    const double pos = last * static_cast<double>(k) / q;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    const double v = values[lo] + frac * (values[hi] - values[lo]);
    if (edges.empty() || v > edges.back()) edges.push_back(v);
  }
  return edges;
}

const std::vector<Scalar>& Discretizer::default_targets() {
  static const std::vector<Scalar> targets{
      Scalar::review_interval,   Scalar::similarity,     Scalar::readability,          Scalar::line_change,
      Scalar::word_count,        Scalar::thread_length,  Scalar::code_reviewership,    Scalar::code_ownership,
      Scalar::reviewing_experience, Scalar::developer_experience,
  };
  return targets;
}

Discretizer Discretizer::fit(std::span<const FeatureVector> training, int q, const std::vector<Scalar>& targets) {
  if (training.empty()) throw Error(ErrorCode::EmptyTrainingSet, "cannot fit bins on zero vectors");
  Discretizer d;
  for (Scalar s : targets) {
    std::vector<double> values;
    values.reserve(training.size());
    for (const auto& fv : training) values.push_back(fv[s]);
    d.edges_[index(s)] = quantile_edges(std::move(values), q);
  }
  return d;
}

Discretizer Discretizer::from_edges(std::map<std::size_t, std::vector<double>> edges) {
  for (const auto& [column, e] : edges) {
    if (column >= kScalarCount) throw Error(ErrorCode::SchemaMismatch, "bin edges for an unknown feature column");
    if (e.empty() || !std::is_sorted(e.begin(), e.end()) ||
        std::adjacent_find(e.begin(), e.end()) != e.end()) {
      throw Error(ErrorCode::SchemaMismatch, "bin edges must be strictly increasing");
    }
  }
  Discretizer d;
  d.edges_ = std::move(edges);
  return d;
}

int Discretizer::bin_of(std::span<const double> edges, double value) {
  if (edges.size() <= 2) return 0;
  // Count inner edges strictly below the value.
  const auto inner_begin = edges.begin() + 1;
  const auto inner_end = edges.end() - 1;
  return static_cast<int>(std::lower_bound(inner_begin, inner_end, value) - inner_begin);
}

double Discretizer::transform(std::size_t column, double value) const {
  const auto it = edges_.find(column);
  if (it == edges_.end()) return value;
  return bin_of(it->second, value);
}

FeatureVector Discretizer::apply(FeatureVector fv) const {
  for (const auto& [column, e] : edges_) fv.scalars[column] = bin_of(e, fv.scalars[column]);
  return fv;
}

std::vector<std::string> DesignLayout::feature_ids() const {
  std::vector<std::string> ids;
  if (message) ids.emplace_back(kMessageFeature);
  for (Scalar s : scalars) ids.emplace_back(scalar_name(s));
  return ids;
}

DesignLayout DesignLayout::from_feature_ids(std::span<const std::string> ids, std::size_t vocabulary_size) {
  DesignLayout layout;
  layout.vocabulary_size = vocabulary_size;
  std::vector<bool> chosen(kScalarCount, false);
  for (const auto& id : ids) {
    if (id == kMessageFeature) {
      layout.message = true;
    } else if (auto s = parse_scalar(id)) {
      chosen[index(*s)] = true;
    } else {
      throw Error(ErrorCode::SchemaMismatch, "unknown feature id '" + id + "'");
    }
  }
  for (std::size_t i = 0; i < kScalarCount; ++i) {
    if (chosen[i]) layout.scalars.push_back(static_cast<Scalar>(i));
  }
  return layout;
}

DesignLayout DesignLayout::all(std::size_t vocabulary_size) {
  DesignLayout layout;
  for (std::size_t i = 0; i < kScalarCount; ++i) layout.scalars.push_back(static_cast<Scalar>(i));
  layout.message = vocabulary_size > 0;
  layout.vocabulary_size = vocabulary_size;
  return layout;
}

std::vector<double> design_row(const FeatureVector& fv, const DesignLayout& layout) {
  if (fv.scalars.size() != kScalarCount) {
    throw Error(ErrorCode::SchemaMismatch, "feature vector has " + std::to_string(fv.scalars.size()) +
                                               " scalars, expected " + std::to_string(kScalarCount));
  }
  if (layout.message && fv.message.dim != layout.vocabulary_size) {
    throw Error(ErrorCode::SchemaMismatch, "message vector has dimension " + std::to_string(fv.message.dim) +
                                               ", model vocabulary has " + std::to_string(layout.vocabulary_size));
  }
  std::vector<double> row;
  row.reserve(layout.width());
  for (Scalar s : layout.scalars) row.push_back(fv[s]);
  if (layout.message) {
    const std::size_t base = row.size();
    row.resize(base + layout.vocabulary_size, 0.0);
    for (const auto& [i, w] : fv.message.entries) row[base + i] = w;
  }
  return row;
}

learn::Matrix design_matrix(std::span<const FeatureVector> vectors, const DesignLayout& layout) {
  learn::Matrix m(vectors.size(), layout.width());
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    const auto row = design_row(vectors[r], layout);
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace cra::features
