#include "cra/cv.hpp"

#include "cra/error.hpp"
#include "cra/rng.hpp"
#include "cra/smote.hpp"

namespace cra::learn {

using nlohmann::json;

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassScores scores(std::size_t hit, std::size_t false_alarm, std::size_t miss) {
  ClassScores s;
  s.precision = ratio(hit, hit + false_alarm);
  s.recall = ratio(hit, hit + miss);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

json scores_json(const ClassScores& s) { return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}}; }

template <typename Get>
double mean_of(const std::vector<FoldRow>& rows, Get get) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rows) sum += get(r);
  return sum / static_cast<double>(rows.size());
}

}  // namespace

ClassScores useful_scores(const Confusion& c) { return scores(c.tp, c.fp, c.fn); }
ClassScores not_useful_scores(const Confusion& c) { return scores(c.tn, c.fn, c.fp); }
double accuracy(const Confusion& c) { return ratio(c.tp + c.tn, c.total()); }

Confusion confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw Error(ErrorCode::LengthMismatch, "truth and prediction lengths differ");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) (predicted[i] == 1 ? c.tp : c.fn) += 1;
    else (predicted[i] == 1 ? c.fp : c.tn) += 1;
  }
  return c;
}

double EvaluationReport::mean_accuracy() const {
  return mean_of(rows, [](const FoldRow& r) { return r.accuracy; });
}

ClassScores EvaluationReport::mean_useful() const {
  return {mean_of(rows, [](const FoldRow& r) { return r.useful.precision; }),
          mean_of(rows, [](const FoldRow& r) { return r.useful.recall; }),
          mean_of(rows, [](const FoldRow& r) { return r.useful.f1; })};
}

ClassScores EvaluationReport::mean_not_useful() const {
  return {mean_of(rows, [](const FoldRow& r) { return r.not_useful.precision; }),
          mean_of(rows, [](const FoldRow& r) { return r.not_useful.recall; }),
          mean_of(rows, [](const FoldRow& r) { return r.not_useful.f1; })};
}

std::vector<double> EvaluationReport::accuracies() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.accuracy);
  return out;
}

std::vector<double> EvaluationReport::minority_f1() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(minority_label == 1 ? r.useful.f1 : r.not_useful.f1);
  return out;
}

json EvaluationReport::to_json() const {
  json fold_rows = json::array();
  for (const auto& r : rows) {
    fold_rows.push_back({{"repeat", r.repeat},
                         {"fold", r.fold},
                         {"tp", r.counts.tp},
                         {"fp", r.counts.fp},
                         {"tn", r.counts.tn},
                         {"fn", r.counts.fn},
                         {"accuracy", r.accuracy},
                         {"useful", scores_json(r.useful)},
                         {"not_useful", scores_json(r.not_useful)}});
  }
  return {{"algorithm", to_string(algorithm)},
          {"config", {{"seed", config.seed}, {"repeats", config.repeats}, {"folds", config.folds},
                      {"oversample", config.oversample}, {"smote_k", config.smote_k}}},
          {"mean", {{"accuracy", mean_accuracy()}, {"useful", scores_json(mean_useful())},
                    {"not_useful", scores_json(mean_not_useful())}}},
          {"rows", fold_rows}};
}

std::vector<int> stratified_folds(std::span<const int> y, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "need at least two folds");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i] == 1 ? 1 : 0].push_back(i);
  for (const auto& members : by_class) {
    if (members.size() < static_cast<std::size_t>(folds)) {
      throw Error(ErrorCode::TooFewSamples, "a class has " + std::to_string(members.size()) + " rows, fewer than " +
                                                std::to_string(folds) + " folds");
    }
  }
  Rng rng(seed);
  std::vector<int> fold_of(y.size(), 0);
  std::size_t position = 0;
  for (auto& members : by_class) {
    shuffle(members, rng);
    for (std::size_t row : members) fold_of[row] = static_cast<int>(position++ % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

EvaluationReport cross_validate(const Matrix& x, std::span<const int> y, const AlgorithmConfig& algorithm,
                                const CvConfig& config, const FoldObserver& observer) {
  if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "rows and labels differ in length");
  if (config.repeats < 1) throw Error(ErrorCode::InvalidArgument, "need at least one repeat");

  EvaluationReport report;
  report.config = config;
  report.algorithm = algorithm.algorithm;
  std::size_t positives = 0;
  for (int v : y) positives += v == 1;
  report.minority_label = positives * 2 < y.size() ? 1 : 0;

  std::vector<std::size_t> train_rows, test_rows;
  std::vector<std::pair<std::size_t, std::size_t>> synthetic;
  for (int r = 0; r < config.repeats; ++r) {
    const std::vector<int> fold_of = stratified_folds(y, config.folds, derive_seed(config.seed, r));
    for (int f = 0; f < config.folds; ++f) {
      train_rows.clear();
      test_rows.clear();
      synthetic.clear();
      for (std::size_t i = 0; i < y.size(); ++i) (fold_of[i] == f ? test_rows : train_rows).push_back(i);

      Matrix train_x = x.select_rows(train_rows);
      Labels train_y;
      for (std::size_t i : train_rows) train_y.push_back(y[i]);
      const std::uint64_t fold_seed = derive_seed(config.seed, static_cast<std::uint64_t>(r), f + 1);
      if (config.oversample) {
        SmoteResult balanced = smote(train_x, train_y, config.smote_k, derive_seed(fold_seed, 0x5307e));
        for (auto [a, b] : balanced.sources) synthetic.emplace_back(train_rows[a], train_rows[b]);
        train_x = std::move(balanced.x);
        train_y = std::move(balanced.y);
      }
      if (observer) observer({r, f, train_rows, test_rows, synthetic});

      const Classifier model = train(algorithm, train_x, train_y, fold_seed);
      std::vector<int> truth, predicted;
      for (std::size_t i : test_rows) {
        truth.push_back(y[i]);
        predicted.push_back(model.predict(x.row(i)));
      }
      FoldRow row;
      row.repeat = r;
      row.fold = f;
      row.counts = confusion(truth, predicted);
      row.accuracy = accuracy(row.counts);
      row.useful = useful_scores(row.counts);
      row.not_useful = not_useful_scores(row.counts);
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace cra::learn
