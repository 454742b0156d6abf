#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "../support/builders.hpp"
#include "../support/synthetic.hpp"
#include "cra/error.hpp"
#include "cra/pipeline.hpp"

using namespace cra;
using namespace cra::pipeline;
using cra::features::Scalar;

namespace {

const textfeat::Lexicons& lex() {
  static const textfeat::Lexicons l = textfeat::load_lexicons(CRA_SOURCE_DATA_DIR);
  return l;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

testing::SyntheticData small_synthetic() {
  testing::SyntheticOptions o;
  o.comments = 240;
  o.clean_negatives = 60;
  o.flips_to_negative = 0;
  o.flips_to_positive = 0;
  o.seed = 5;
  return testing::generate_synthetic(o);
}

TrainOptions quick_options(learn::Algorithm a) {
  TrainOptions o;
  o.algorithm = learn::AlgorithmConfig::defaults(a);
  o.algorithm.n_trees = 15;
  o.select = false;
  return o;
}

}  // namespace

TEST_CASE("synthetic generator: labels follow the three extracted features") {
  const testing::SyntheticData data = testing::generate_synthetic();
  CHECK_NOTHROW(validate_dump(data.dump));
  CHECK(data.labels.size() == 2000);
  const auto useful = std::count_if(data.labels.begin(), data.labels.end(), [](const auto& l) { return l.is_useful; });
  CHECK(useful == 1620);

  const TrainingSet set = build_training_set(data.dump, data.labels, lex());
  REQUIRE(set.vectors.size() == data.truth.size());
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < set.vectors.size(); ++i) {
    const auto& fv = set.vectors[i];
    const auto& t = data.truth[i];
    REQUIRE(set.comment_ids[i] == t.comment_id);
    CHECK(fv[Scalar::change_trigger] == (t.trigger ? 1.0 : 0.0));
    CHECK(fv[Scalar::comment_sentiment] == t.sentiment);
    CHECK((fv[Scalar::similarity] > 0.0) == t.similar);
    const bool f = testing::latent_useful(fv[Scalar::change_trigger] == 1.0,
                                          static_cast<int>(fv[Scalar::comment_sentiment]),
                                          fv[Scalar::similarity] > 0.0);
    CHECK(f == t.clean_useful);
    flipped += (set.labels[i] == 1) != f;
  }
  CHECK(flipped == 200);
}

TEST_CASE("labels CSV round trip and validation") {
  const auto data = small_synthetic();
  const std::string csv = write_labels_csv(data.labels);
  CHECK(csv.starts_with("comment_id,rater_id,is_useful,category,labeled_at\n"));
  CHECK(parse_labels_csv(csv) == data.labels);

  UsefulnessLabel odd = data.labels.front();
  odd.comment_id = "with,comma \"quoted\"";
  const std::vector<UsefulnessLabel> one{odd};
  CHECK(parse_labels_csv(write_labels_csv(one)) == one);
  CHECK(parse_labels_csv("comment_id,rater_id,is_useful,category,labeled_at\r\nc1,r,true,Praise,2024-01-01\r\n")
            .front()
            .category == CommentCategory::Praise);

  CHECK(code_of([] { parse_labels_csv("id,rater\n"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_labels_csv("comment_id,rater_id,is_useful,category,labeled_at\nc1,r,maybe,Praise,2024-01-01\n"); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_labels_csv("comment_id,rater_id,is_useful,category,labeled_at\nc1,r,1,Nope,2024-01-01\n"); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_labels_csv("comment_id,rater_id,is_useful,category,labeled_at\nc1,r,1,Praise\n"); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("latest label wins per comment") {
  UsefulnessLabel a{"c1", "alice", true, CommentCategory::Praise, testing::ts("2024-01-01")};
  UsefulnessLabel b{"c1", "alice", false, CommentCategory::Others, testing::ts("2024-02-01")};
  UsefulnessLabel c{"c2", "bob", true, CommentCategory::Logical, testing::ts("2024-01-01")};
  const std::vector<UsefulnessLabel> labels{b, a, c};
  const auto latest = latest_labels(labels);
  REQUIRE(latest.size() == 2);
  CHECK(latest[0] == b);
  CHECK(latest[1] == c);
}

TEST_CASE("trained artifacts are byte-identical, round trip, and predict like the classifier") {
  const auto data = small_synthetic();
  const TrainingSet set = build_training_set(data.dump, data.labels, lex());
  for (auto algorithm : {learn::Algorithm::decision_tree, learn::Algorithm::random_forest,
                         learn::Algorithm::logistic_regression}) {
    CAPTURE(learn::to_string(algorithm));
    const TrainOptions options = quick_options(algorithm);
    const TrainOutcome a = fit_model(set, options);
    const TrainOutcome b = fit_model(set, options);
    const std::string bytes = serialize_model(a.model);
    CHECK(bytes == serialize_model(b.model));
    CHECK(bytes.starts_with("CRA-MODEL/1\n"));

    const TrainedModel loaded = parse_model(bytes);
    CHECK(serialize_model(loaded) == bytes);
    CHECK(loaded.model_version() == a.model.model_version());
    CHECK(a.model.model_version().size() == 2 + 1 + 16);

    const PreparedData prepared = prepare(set, options);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < set.vectors.size(); ++i) {
      const Prediction p = predict(loaded, set.vectors[i]);
      CHECK(p.probability == a.model.classifier.predict_proba(prepared.x.row(i)));
      CHECK(p.useful == (p.probability >= 0.5));
      correct += p.useful == (set.labels[i] == 1);
    }
    // Noise-free labels: every learner should fit most of its training data.
    CHECK(static_cast<double>(correct) / static_cast<double>(set.vectors.size()) > 0.85);
  }
}

TEST_CASE("artifact files and version checks") {
  const auto data = small_synthetic();
  const TrainingSet set = build_training_set(data.dump, data.labels, lex());
  const TrainedModel model = fit_model(set, quick_options(learn::Algorithm::decision_tree)).model;
  const auto path = std::filesystem::temp_directory_path() / "cra_test_model.bin";
  save_model(model, path);
  CHECK(serialize_model(load_model(path)) == serialize_model(model));
  std::filesystem::remove(path);
  CHECK(code_of([&] { load_model(path); }) == ErrorCode::IoFailure);

  std::string bytes = serialize_model(model);
  std::string v2 = bytes;
  v2.replace(0, std::string("CRA-MODEL/1").size(), "CRA-MODEL/2");
  CHECK(code_of([&] { parse_model(v2); }) == ErrorCode::ArtifactVersionMismatch);
  CHECK(code_of([&] { parse_model("hello"); }) == ErrorCode::SchemaMismatch);
  CHECK(code_of([&] { parse_model("CRA-MODEL/1\n{\"artifact_version\": 1}"); }) == ErrorCode::SchemaMismatch);
  CHECK(code_of([&] { parse_model("CRA-MODEL/1\n{not json"); }) == ErrorCode::SchemaMismatch);
  std::string body_mismatch = bytes;
  const auto at = body_mismatch.find("\"artifact_version\":1");
  REQUIRE(at != std::string::npos);
  body_mismatch.replace(at, std::string("\"artifact_version\":1").size(), "\"artifact_version\":3");
  CHECK(code_of([&] { parse_model(body_mismatch); }) == ErrorCode::ArtifactVersionMismatch);
}

TEST_CASE("predict rejects vectors that do not fit the model") {
  const auto data = small_synthetic();
  const TrainingSet set = build_training_set(data.dump, data.labels, lex());
  const TrainedModel model = fit_model(set, quick_options(learn::Algorithm::decision_tree)).model;
  features::FeatureVector short_vec = set.vectors.front();
  short_vec.scalars.pop_back();
  CHECK(code_of([&] { predict(model, short_vec); }) == ErrorCode::SchemaMismatch);
  features::FeatureVector other_vocab = set.vectors.front();
  other_vocab.message.dim += 1;
  CHECK(code_of([&] { predict(model, other_vocab); }) == ErrorCode::SchemaMismatch);

  // Same rows, via extraction with the model's own vocabulary.
  const auto& change = data.dump.changes.front();
  const auto& comment = change.threads.front().comments.front();
  CHECK(predict_comment(model, comment, change, data.dump.changes, lex()).probability ==
        predict(model, set.vectors.front()).probability);
}

TEST_CASE("training with selection keeps nested feature sets") {
  const auto data = small_synthetic();
  const TrainingSet set = build_training_set(data.dump, data.labels, lex());
  TrainOptions options = quick_options(learn::Algorithm::random_forest);
  options.select = true;
  options.selection.rfe.estimator.n_trees = 10;
  options.selection.rfe.folds = 5;
  const TrainOutcome a = fit_model(set, options);
  const auto& s = a.selection;
  for (const auto& f : s.final_selected) {
    CHECK(std::find(s.kept_after_correlation.begin(), s.kept_after_correlation.end(), f) !=
          s.kept_after_correlation.end());
  }
  for (const auto& f : s.kept_after_correlation) {
    CHECK(std::find(s.all_features.begin(), s.all_features.end(), f) != s.all_features.end());
  }
  CHECK(s.replay() == s);
  CHECK(std::find(s.final_selected.begin(), s.final_selected.end(), "change_trigger") != s.final_selected.end());
  CHECK(a.model.layout().width() == a.model.classifier.n_features());

  const TrainOutcome b = fit_model(set, options);
  CHECK(b.selection == a.selection);
  CHECK(serialize_model(b.model) == serialize_model(a.model));
}

TEST_CASE("empty or one-class training sets are rejected") {
  const auto data = small_synthetic();
  CHECK(code_of([&] { fit_model(build_training_set(data.dump, {}, lex()), TrainOptions{}); }) ==
        ErrorCode::EmptyTrainingSet);
  std::vector<UsefulnessLabel> all_useful = data.labels;
  for (auto& l : all_useful) l.is_useful = true;
  CHECK(code_of([&] {
          fit_model(build_training_set(data.dump, all_useful, lex()), quick_options(learn::Algorithm::decision_tree));
        }) == ErrorCode::SingleClassTraining);
}
