#include "cra/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cra/error.hpp"
#include "cra/rng.hpp"
#include "cra/smote.hpp"
#include "cra/time.hpp"

namespace cra::pipeline {

namespace {

using nlohmann::json;

std::string_view short_name(learn::Algorithm a) {
  switch (a) {
    case learn::Algorithm::decision_tree: return "dt";
    case learn::Algorithm::random_forest: return "rf";
    case learn::Algorithm::logistic_regression: return "lr";
  }
  return "model";
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json edges_to_json(const features::Discretizer& d) {
  json j = json::object();
  for (const auto& [column, edges] : d.edges()) {
    j[std::string(features::scalar_name(static_cast<features::Scalar>(column)))] = edges;
  }
  return j;
}

features::Discretizer edges_from_json(const json& j) {
  std::map<std::size_t, std::vector<double>> edges;
  for (const auto& [name, values] : j.items()) {
    const auto s = features::parse_scalar(name);
    if (!s) throw Error(ErrorCode::SchemaMismatch, "bin edges for unknown feature '" + name + "'");
    edges[features::index(*s)] = values.get<std::vector<double>>();
  }
  return features::Discretizer::from_edges(std::move(edges));
}

// RFC 4180 fields; quoting only when needed.
std::string csv_field(std::string_view v) {
  if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorCode::InvalidArgument, "labels CSV: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<bool> parse_bool(std::string_view v) {
  if (v == "1" || v == "true" || v == "True" || v == "TRUE") return true;
  if (v == "0" || v == "false" || v == "False" || v == "FALSE") return false;
  return std::nullopt;
}

}  // namespace

features::DesignLayout TrainedModel::layout() const {
  return features::DesignLayout::from_feature_ids(selected_feature_ids, vectorizer.size());
}

std::string TrainedModel::model_version() const {
  return std::string(short_name(algorithm.algorithm)) + "-" + hex64(fnv1a64(serialize_model(*this)));
}

std::string serialize_model(const TrainedModel& model) {
  const json body{{"artifact_version", model.artifact_version},
                  {"algorithm", learn::to_string(model.algorithm.algorithm)},
                  {"hyperparameters", model.algorithm.hyperparameters()},
                  {"seed", model.seed},
                  {"vocabulary", model.vectorizer.terms()},
                  {"idf", model.vectorizer.idf()},
                  {"bin_edges", edges_to_json(model.discretizer)},
                  {"selected_feature_ids", model.selected_feature_ids},
                  {"classifier", model.classifier.to_json()}};
  return std::string(kArtifactMagic) + std::to_string(model.artifact_version) + "\n" + body.dump() + "\n";
}

TrainedModel parse_model(std::string_view bytes) {
  const std::size_t eol = bytes.find('\n');
  if (!bytes.starts_with(kArtifactMagic) || eol == std::string_view::npos) {
    throw Error(ErrorCode::SchemaMismatch, "not a model artifact");
  }
  const std::string_view version_text = bytes.substr(kArtifactMagic.size(), eol - kArtifactMagic.size());
  int version = 0;
  const auto [end, ec] = std::from_chars(version_text.data(), version_text.data() + version_text.size(), version);
  if (ec != std::errc() || end != version_text.data() + version_text.size()) {
    throw Error(ErrorCode::SchemaMismatch, "unreadable artifact version");
  }
  if (version != kArtifactVersion) {
    throw Error(ErrorCode::ArtifactVersionMismatch, "artifact version " + std::to_string(version) +
                                                        ", this build reads " + std::to_string(kArtifactVersion));
  }
  try {
    const json j = json::parse(bytes.substr(eol + 1));
    if (j.at("artifact_version").get<int>() != version) {
      throw Error(ErrorCode::ArtifactVersionMismatch, "artifact header and body disagree on version");
    }
    TrainedModel m;
    const auto algorithm = learn::parse_algorithm(j.at("algorithm").get<std::string>());
    if (!algorithm) throw Error(ErrorCode::SchemaMismatch, "unknown algorithm in artifact");
    m.algorithm = learn::AlgorithmConfig::from_hyperparameters(*algorithm, j.at("hyperparameters"));
    m.seed = j.at("seed").get<std::uint64_t>();
    m.vectorizer = textfeat::Vectorizer::from_parts(j.at("vocabulary").get<std::vector<std::string>>(),
                                                    j.at("idf").get<std::vector<double>>());
    m.discretizer = edges_from_json(j.at("bin_edges"));
    m.selected_feature_ids = j.at("selected_feature_ids").get<std::vector<std::string>>();
    m.classifier = learn::Classifier::from_json(j.at("classifier"));
    if (m.classifier.algorithm() != *algorithm) {
      throw Error(ErrorCode::SchemaMismatch, "artifact algorithm does not match its classifier");
    }
    if (m.layout().width() != m.classifier.n_features()) {
      throw Error(ErrorCode::SchemaMismatch, "selected features do not match the classifier width");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("model artifact: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write model file");
  out << serialize_model(model);
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing model file");
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read model file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

Prediction predict(const TrainedModel& model, const features::FeatureVector& raw) {
  const features::DesignLayout layout = model.layout();
  if (!layout.message && raw.message.dim != model.vectorizer.size()) {
    throw Error(ErrorCode::SchemaMismatch, "message vector does not match the model vocabulary");
  }
  const std::vector<double> row = features::design_row(model.discretizer.apply(raw), layout);
  Prediction p;
  p.probability = model.classifier.predict_proba(row);
  p.useful = p.probability >= 0.5;
  return p;
}

Prediction predict_comment(const TrainedModel& model, const ReviewComment& comment, const ReviewChange& change,
                           const std::vector<ReviewChange>& history, const textfeat::Lexicons& lexicons) {
  return predict(model, features::extract(comment, change, history, features::TextModel{model.vectorizer, lexicons}));
}

std::vector<UsefulnessLabel> latest_labels(std::span<const UsefulnessLabel> labels) {
  std::map<std::string, UsefulnessLabel> latest;
  for (const auto& l : labels) {
    auto [it, inserted] = latest.try_emplace(l.comment_id, l);
    if (!inserted && std::tie(l.labeled_at, l.rater_id) > std::tie(it->second.labeled_at, it->second.rater_id)) {
      it->second = l;
    }
  }
  std::vector<UsefulnessLabel> out;
  for (auto& [id, l] : latest) out.push_back(std::move(l));
  return out;
}

std::string write_labels_csv(std::span<const UsefulnessLabel> labels) {
  std::string out = "comment_id,rater_id,is_useful,category,labeled_at\n";
  for (const auto& l : labels) {
    out += csv_field(l.comment_id) + "," + csv_field(l.rater_id) + "," + (l.is_useful ? "1" : "0") + "," +
           std::string(to_string(l.category)) + "," + format_timestamp(l.labeled_at) + "\n";
  }
  return out;
}

std::vector<UsefulnessLabel> parse_labels_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  static const std::vector<std::string> header{"comment_id", "rater_id", "is_useful", "category", "labeled_at"};
  if (rows.empty() || rows.front() != header) {
    throw Error(ErrorCode::InvalidArgument,
                "labels CSV: expected header comment_id,rater_id,is_useful,category,labeled_at");
  }
  std::vector<UsefulnessLabel> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string where = "labels CSV row " + std::to_string(i + 1) + ": ";
    if (r.size() != header.size()) throw Error(ErrorCode::InvalidArgument, where + "expected 5 fields");
    UsefulnessLabel l;
    l.comment_id = r[0];
    l.rater_id = r[1];
    if (l.comment_id.empty() || l.rater_id.empty()) throw Error(ErrorCode::InvalidArgument, where + "empty id");
    const auto useful = parse_bool(r[2]);
    if (!useful) throw Error(ErrorCode::InvalidArgument, where + "is_useful must be 0/1 or true/false");
    l.is_useful = *useful;
    const auto category = parse_category(r[3]);
    if (!category) throw Error(ErrorCode::InvalidArgument, where + "unknown category '" + r[3] + "'");
    l.category = *category;
    const auto at = parse_timestamp(r[4]);
    if (!at) throw Error(ErrorCode::InvalidArgument, where + "bad labeled_at");
    l.labeled_at = *at;
    out.push_back(std::move(l));
  }
  return out;
}

TrainingSet build_training_set(const ReviewDump& dump, std::span<const UsefulnessLabel> labels,
                               const textfeat::Lexicons& lexicons) {
  std::map<std::string, bool> verdict;
  for (const auto& l : latest_labels(labels)) verdict[l.comment_id] = l.is_useful;
  if (verdict.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no labeled comments to train on");

  TrainingSet set;
  set.vectorizer = features::fit_text_vectorizer(dump.changes, lexicons);
  const features::TextModel text{set.vectorizer, lexicons};
  for (const auto& change : dump.changes) {
    for (const auto& thread : change.threads) {
      for (const auto& comment : thread.comments) {
        const auto it = verdict.find(comment.comment_id);
        if (it == verdict.end()) continue;
        set.comment_ids.push_back(comment.comment_id);
        set.vectors.push_back(features::extract(comment, change, dump.changes, text));
        set.labels.push_back(it->second ? 1 : 0);
      }
    }
  }
  return set;
}

PreparedData prepare(const TrainingSet& data, const TrainOptions& options) {
  if (data.vectors.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no labeled comments to train on");
  if (data.vectors.size() != data.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "feature vectors and labels differ in length");
  }
  PreparedData p;
  p.y = data.labels;
  p.discretizer = features::Discretizer::fit(data.vectors, options.bins);
  std::vector<features::FeatureVector> binned;
  binned.reserve(data.vectors.size());
  for (const auto& fv : data.vectors) binned.push_back(p.discretizer.apply(fv));

  const std::size_t vocab = data.vectorizer.size();
  if (options.select) {
    features::SelectionConfig cfg = options.selection;
    cfg.rfe.seed = options.seed;
    p.selection = features::select_features(binned, p.y, vocab, cfg);
  } else {
    p.selection.all_features = features::DesignLayout::all(vocab).feature_ids();
    p.selection.kept_after_correlation = p.selection.all_features;
    p.selection.final_selected = p.selection.all_features;
  }
  p.layout = features::DesignLayout::from_feature_ids(p.selection.final_selected, vocab);
  p.x = features::design_matrix(binned, p.layout);
  return p;
}

TrainOutcome fit_model(const TrainingSet& data, const TrainOptions& options) {
  PreparedData p = prepare(data, options);
  learn::Matrix x = std::move(p.x);
  std::vector<int> y = std::move(p.y);
  if (options.oversample) {
    learn::SmoteResult balanced = learn::smote(x, y, 5, derive_seed(options.seed, 0x5307e));
    x = std::move(balanced.x);
    y = std::move(balanced.y);
  }
  TrainOutcome out;
  out.model.algorithm = options.algorithm;
  out.model.seed = options.seed;
  out.model.vectorizer = data.vectorizer;
  out.model.discretizer = p.discretizer;
  out.model.selected_feature_ids = p.layout.feature_ids();
  out.model.classifier = learn::train(options.algorithm, x, y, options.seed);
  out.selection = std::move(p.selection);
  return out;
}

}  // namespace cra::pipeline
