// Acceptance gate: one PASS/FAIL line per primary criterion, exit status 1
// when any fails. Tolerances are fixed here and nowhere else.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/builders.hpp"
#include "../support/synthetic.hpp"
#include "cra/api.hpp"
#include "cra/cli.hpp"
#include "cra/cv.hpp"
#include "cra/features.hpp"
#include "cra/metrics.hpp"
#include "cra/pipeline.hpp"
#include "cra/rng.hpp"
#include "cra/selection.hpp"
#include "cra/smote.hpp"
#include "cra/stats.hpp"
#include "cra/textfeat.hpp"

using namespace cra;

namespace {

// Pinned tolerances.
constexpr double kPrintedRatioTol = 0.01;    // CUD and ID against printed two-decimal values
constexpr double kPrintedReTol = 0.05;       // RE against printed values
constexpr double kFloatTol = 1e-12;          // irrational feature values against a closed form
constexpr double kReadabilityTol = 0.01;
constexpr double kStatTableTol = 0.005;
constexpr double kMinAccuracy = 0.85;
constexpr double kMinMinorityF1Margin = 0.40;
constexpr double kProfilesSeconds = 1.0;
constexpr double kClassifierSeconds = 300.0;

/// Collects failed expectations for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok) failures_.push_back(what);
  }
  void near(double actual, double expected, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << ": got " << std::setprecision(10) << actual << ", want " << expected << " +/- " << tol;
    expect(std::abs(actual - expected) <= tol, s.str());
  }
  void note(std::string text) { notes_.push_back(std::move(text)); }

  bool passed() const { return failures_.empty(); }
  int total() const { return total_; }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  int total_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

double pearson_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return va == 0 || vb == 0 ? 0.0 : cov / std::sqrt(va * vb);
}

const textfeat::Lexicons& lexicons() {
  static const textfeat::Lexicons l = textfeat::load_lexicons(CRA_SOURCE_DATA_DIR);
  return l;
}

// ---- AC1 ----

void worked_profiles(Check& c) {
  struct Row {
    const char* id;
    int nr, nc, uc;
    double cud, id_, re;
    long long ri;
  };
  // Printed rows; F is checked against its counts instead (see below).
  const Row rows[] = {{"A", 26, 30, 20, 0.66, 0.77, 6.79, 540}, {"B", 25, 40, 22, 0.55, 0.88, 6.72, 544},
                      {"C", 10, 18, 16, 0.89, 1.6, 8.61, 336},  {"D", 12, 25, 21, 0.84, 1.75, 9.58, 427},
                      {"E", 1, 5, 5, 1.0, 5.0, 6.0, 85}};
  for (const auto& r : rows) {
    const std::string id = r.id;
    c.expect(metrics::review_impact(r.nr, r.nc, r.uc) == r.ri, id + " RI exact");
    c.near(metrics::review_efficiency(r.nr, r.nc, r.uc), r.re, kPrintedReTol, id + " RE");
    c.near(metrics::cud(r.uc, r.nc), r.cud, kPrintedRatioTol, id + " CUD");
    c.near(metrics::issue_density(r.uc, r.nr), r.id_, kPrintedRatioTol, id + " ID");
  }
  // F prints CUD 0.9 and RI 373, but its counts (NR 30, NC 5, UC 4) give
  // 4/5 = 0.8 and 300 + 68 - 10 = 358.
  c.near(metrics::cud(4, 5), 0.8, 1e-15, "F CUD exact");
  c.expect(metrics::review_impact(30, 5, 4) == 358, "F RI exact");
  c.note("F printed CUD 0.9 / RI 373 disagree with its counts; exact 0.8 / 358 asserted");
}

// ---- AC2 ----

void classifier_property(Check& c) {
  const auto data = testing::generate_synthetic();
  const auto set = pipeline::build_training_set(data.dump, data.labels, lexicons());
  const auto useful = std::count(set.labels.begin(), set.labels.end(), 1);
  c.expect(set.labels.size() == 2000, "2000 labeled comments");
  c.near(static_cast<double>(useful) / 2000.0, 0.81, 0.0005, "useful prevalence");
  std::size_t flipped = 0;
  for (const auto& t : data.truth) flipped += t.label != t.clean_useful;
  c.expect(flipped == 200, "10% of labels flipped");

  pipeline::TrainOptions options;
  options.select = false;
  const auto prepared = pipeline::prepare(set, options);
  learn::CvConfig cv;
  cv.repeats = 5;
  cv.folds = 10;
  cv.seed = cli::kDefaultSeed;
  const auto rf = learn::cross_validate(prepared.x, prepared.y,
                                        learn::AlgorithmConfig::defaults(learn::Algorithm::random_forest), cv);
  c.expect(rf.rows.size() == 50, "5 x 10 fold rows");

  // Majority baseline on the same folds: always "useful", so the minority
  // class is never predicted and its F1 is 0.
  double baseline_f1 = 0.0;
  for (int r = 0; r < cv.repeats; ++r) {
    const auto fold_of = learn::stratified_folds(prepared.y, cv.folds, derive_seed(cv.seed, static_cast<std::uint64_t>(r)));
    for (int f = 0; f < cv.folds; ++f) {
      std::vector<int> truth, predicted;
      for (std::size_t i = 0; i < prepared.y.size(); ++i) {
        if (fold_of[i] != f) continue;
        truth.push_back(prepared.y[i]);
        predicted.push_back(1);
      }
      baseline_f1 += learn::not_useful_scores(learn::confusion(truth, predicted)).f1;
    }
  }
  baseline_f1 /= cv.repeats * cv.folds;
  double minority_f1 = 0.0;
  for (double v : rf.minority_f1()) minority_f1 += v;
  minority_f1 /= static_cast<double>(rf.rows.size());

  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << "RF accuracy " << rf.mean_accuracy() << ", minority F1 " << minority_f1
    << ", baseline minority F1 " << baseline_f1;
  c.note(s.str());
  c.expect(rf.mean_accuracy() >= kMinAccuracy, "accuracy >= 0.85");
  c.expect(baseline_f1 == 0.0, "majority baseline minority F1 is 0");
  c.expect(minority_f1 - baseline_f1 >= kMinMinorityF1Margin, "minority F1 beats baseline by >= 0.40");
}

// ---- AC3 ----

void protocol(Check& c) {
  testing::SyntheticOptions o;
  o.comments = 300;
  o.clean_negatives = 60;
  o.flips_to_negative = 10;
  o.flips_to_positive = 5;
  o.seed = 31;
  const auto data = testing::generate_synthetic(o);
  pipeline::TrainOptions options;
  options.select = false;
  const auto prepared = pipeline::prepare(pipeline::build_training_set(data.dump, data.labels, lexicons()), options);
  const auto& y = prepared.y;

  learn::CvConfig cv;
  cv.repeats = 20;
  cv.folds = 10;
  cv.seed = cli::kDefaultSeed;

  using FoldKey = std::pair<int, int>;
  auto run = [&](learn::Algorithm a, std::map<FoldKey, std::vector<std::size_t>>& tests, bool& leak,
                 std::size_t& synthetic) {
    auto config = learn::AlgorithmConfig::defaults(a);
    config.n_trees = 10;
    return learn::cross_validate(prepared.x, y, config, cv, [&](const learn::FoldTrace& t) {
      tests[{t.repeat, t.fold}] = {t.test_rows.begin(), t.test_rows.end()};
      const std::set<std::size_t> test(t.test_rows.begin(), t.test_rows.end());
      for (auto [a_row, b_row] : t.synthetic_sources) {
        leak = leak || test.count(a_row) || test.count(b_row);
        ++synthetic;
      }
    });
  };

  std::map<FoldKey, std::vector<std::size_t>> dt_tests, lr_tests, rf_tests;
  bool leak = false;
  std::size_t synthetic = 0;
  const auto dt = run(learn::Algorithm::decision_tree, dt_tests, leak, synthetic);
  run(learn::Algorithm::logistic_regression, lr_tests, leak, synthetic);
  run(learn::Algorithm::random_forest, rf_tests, leak, synthetic);

  c.expect(dt.rows.size() == 200, "20 x 10 run emits 200 fold rows");
  c.expect(dt_tests == lr_tests && dt_tests == rf_tests, "identical fold membership across dt, lr, rf");
  c.expect(!leak, "no synthetic row derives from a test row");
  c.expect(synthetic > 0, "oversampling happened");

  // Stratification: per class, fold counts differ by at most one.
  for (int r = 0; r < cv.repeats; ++r) {
    for (int cls = 0; cls < 2; ++cls) {
      std::vector<int> counts(cv.folds, 0);
      for (int f = 0; f < cv.folds; ++f) {
        for (std::size_t i : dt_tests[{r, f}]) counts[f] += y[i] == cls;
      }
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      c.expect(*hi - *lo <= 1, "repeat " + std::to_string(r) + " class " + std::to_string(cls) + " stratified");
    }
    std::vector<int> seen(y.size(), 0);
    for (int f = 0; f < cv.folds; ++f) {
      for (std::size_t i : dt_tests[{r, f}]) ++seen[i];
    }
    c.expect(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }),
             "repeat " + std::to_string(r) + " partitions the rows");
  }
}

// ---- AC4 ----

void smote_properties(Check& c) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> g;
  learn::Matrix x;
  learn::Labels y;
  for (int i = 0; i < 130; ++i) {
    const int label = i % 13 == 0 ? 0 : 1;
    x.append_row(std::vector<double>{g(gen) + label, g(gen), std::floor(4 * std::abs(g(gen))), g(gen) * 10});
    y.push_back(label);
  }
  const auto out = learn::smote(x, y, 5, 23);
  const auto positives = std::count(out.y.begin(), out.y.end(), 1);
  c.expect(positives == static_cast<long>(out.y.size()) - positives, "balanced output counts");
  c.expect(out.sources.size() == out.x.rows() - x.rows(), "one source pair per synthetic row");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    c.expect(std::equal(x.row(i).begin(), x.row(i).end(), out.x.row(i).begin()), "original row unchanged");
  }
  for (std::size_t s = 0; s < out.sources.size(); ++s) {
    const auto [a, b] = out.sources[s];
    c.expect(y[a] == 0 && y[b] == 0 && a != b, "sources are two distinct minority rows");
    const auto row = out.x.row(x.rows() + s);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double lo = std::min(x(a, j), x(b, j)), hi = std::max(x(a, j), x(b, j));
      c.expect(row[j] >= lo && row[j] <= hi, "coordinate within its source pair");
    }
  }
  const auto again = learn::smote(x, y, 5, 23);
  c.expect(again.x == out.x && again.sources == out.sources, "deterministic under seed");
}

// ---- AC5 ----

void feature_oracles(Check& c) {
  const auto dump = parse_review_dump(testing::read_file(std::string(CRA_TEST_DATA_DIR) + "/dump_two_changes.json"));
  const auto vec = features::fit_text_vectorizer(dump.changes, lexicons());
  const auto& change = dump.changes[0];
  const auto fv = features::extract(change.threads[0].comments[0], change, dump.changes,
                                    features::TextModel{vec, lexicons()});
  using S = features::Scalar;
  int count = 0;
  auto exact = [&](double actual, double expected, const char* name) {
    c.near(actual, expected, 0.0, name);
    ++count;
  };
  // "Rename fooBar to foo_bar?" by bob on alice's change 101, answered
  // "Done, thanks!"; patchset 2 changes line 13, three below the comment.
  exact(fv[S::question_ratio], 1.0, "question_ratio");
  exact(fv[S::code_element_number], 2.0, "code_element_number");
  exact(fv[S::code_element_ratio], 0.5, "code_element_ratio");
  exact(fv[S::stop_word_ratio], 0.25, "stop_word_ratio");
  exact(fv[S::word_count], 4.0, "word_count");
  exact(fv[S::change_trigger], 1.0, "change_trigger");
  exact(fv[S::line_change], 3.0, "line_change");
  exact(fv[S::author_responded], 1.0, "author_responded");
  exact(fv[S::confirmatory_response], 1.0, "confirmatory_response");
  exact(fv[S::gratitude], 1.0, "gratitude");
  exact(fv[S::review_interval], 10800.0, "review_interval");
  exact(fv[S::patch_id], 1.0, "patch_id");
  exact(fv[S::num_patches], 2.0, "num_patches");
  exact(fv[S::is_last_patch], 0.0, "is_last_patch");
  exact(fv[S::thread_length], 2.0, "thread_length");
  exact(fv[S::num_participant], 2.0, "num_participant");
  exact(fv[S::code_reviewership], 0.0, "code_reviewership");
  exact(fv[S::code_ownership], 0.0, "code_ownership");
  exact(fv[S::reviewing_experience], 0.0, "reviewing_experience");
  exact(fv[S::developer_experience], 1.0, "developer_experience");
  // 4 words, 7 syllables, one sentence.
  c.near(fv[S::readability], 206.835 - 1.015 * 4.0 - 84.6 * 7.0 / 4.0, kReadabilityTol, "readability");
  ++count;
  // Four documents (c1, its code context, c2, c3); only "foobar" is in two.
  const double rare = std::log(5.0 / 2.0) + 1.0, shared = std::log(5.0 / 3.0) + 1.0;
  const double cosine = shared * 2.0 * shared /
                        (std::sqrt(2 * rare * rare + shared * shared) * std::sqrt(3 * rare * rare + 4 * shared * shared));
  c.near(fv[S::similarity], cosine, kFloatTol, "cosine similarity");
  ++count;

  const auto& ch2 = dump.changes[1];
  const auto fv2 = features::extract(ch2.threads[0].comments[0], ch2, dump.changes, features::TextModel{vec, lexicons()});
  exact(fv2[S::comment_sentiment], -1.0, "sentiment of 'This is wrong, use null check.'");
  exact(fv2[S::code_element_ratio], 1.0 / 6.0, "code_element_ratio with keyword null");

  exact(textfeat::question_ratio("Why is this here? Please remove."), 0.5, "question_ratio two sentences");
  exact(textfeat::stop_word_ratio("this is a fix", lexicons().stop_words), 0.75, "stop_word_ratio");
  c.near(textfeat::readability("The cat sat."), 206.835 - 1.015 * 3 - 84.6 * 1.0, kReadabilityTol, "readability 'The cat sat.'");
  ++count;
  const std::vector<double> a{1, 1, 0}, b{1, 0, 0};
  c.near(textfeat::cosine_similarity(std::span<const double>(a), std::span<const double>(b)), std::sqrt(0.5), kFloatTol,
         "cosine of (1,1,0) and (1,0,0)");
  ++count;
  c.expect(count >= 20, "at least 20 oracle values");
  c.note(std::to_string(count) + " hand-computed values");
}

// ---- AC6 ----

void selection_pipeline(Check& c) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> g;
  const std::size_t n = 200;
  std::vector<double> a(n), dup(n), other(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = g(gen);
    dup[i] = a[i] + 0.05 * g(gen);
    other[i] = g(gen);
    y[i] = a[i] > 0.2 ? 1 : 0;
  }
  const std::vector<double> yd(y.begin(), y.end());
  const bool a_stronger = std::abs(pearson_oracle(a, yd)) > std::abs(pearson_oracle(dup, yd));
  learn::Matrix x(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = dup[i];  // the weaker twin comes first
    x(i, 1) = a[i];
    x(i, 2) = other[i];
  }
  const auto s = features::drop_correlated(x, std::vector<std::string>{"dup", "a", "other"}, y);
  c.expect(a_stronger, "fixture: original is the stronger twin");
  c.expect(s.correlation_drops.size() == 1 && s.correlation_drops[0].feature == "dup" &&
               s.correlation_drops[0].kept_instead == "a",
           "duplicate pruned, higher point-biserial member kept");

  // Noise injection: label is s1 AND s2.
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> bit(0, 1);
  const std::size_t m = 160;
  learn::Matrix z(m, 3);
  std::vector<int> yz(m);
  for (std::size_t i = 0; i < m; ++i) {
    z(i, 0) = bit(rng);
    z(i, 1) = bit(rng);
    z(i, 2) = g(rng);
    yz[i] = z(i, 0) == 1.0 && z(i, 1) == 1.0 ? 1 : 0;
  }
  features::RfeConfig rfe;
  rfe.folds = 5;
  rfe.estimator.n_trees = 25;
  rfe.seed = 9;
  const std::vector<features::FeatureUnit> units{{"s1", {0}}, {"s2", {1}}, {"noise", {2}}};
  const auto r = features::rfe_cv(z, units, yz, rfe);
  c.expect(std::find(r.final_selected.begin(), r.final_selected.end(), "noise") == r.final_selected.end(),
           "noise feature excluded by rfe_cv");

  // Chains of correlated columns; survivors must all be pairwise below 0.9.
  const std::size_t cols = 12;
  learn::Matrix w(n, cols);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < cols; ++j) names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    double prev = g(gen);
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = j % 3 == 0 ? g(gen) : prev + 0.3 * g(gen);
      w(i, j) = v;
      prev = v;
    }
  }
  const auto kept = features::drop_correlated(w, names, y);
  double worst = 0.0;
  for (std::size_t p = 0; p < kept.kept_after_correlation.size(); ++p) {
    for (std::size_t q = p + 1; q < kept.kept_after_correlation.size(); ++q) {
      auto column = [&](const std::string& name) {
        const auto j = static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = w(i, j);
        return v;
      };
      worst = std::max(worst, std::abs(pearson_oracle(column(kept.kept_after_correlation[p]),
                                                      column(kept.kept_after_correlation[q]))));
    }
  }
  c.expect(kept.correlation_drops.size() > 0, "chain fixture has correlated pairs");
  c.expect(worst < 0.9, "post-pruning pairwise |r| < 0.9");
}

// ---- AC7 ----

void statistics(Check& c) {
  // Shapiro and Wilk's original worked example (n = 11): W = 0.79, p < 0.01.
  const std::vector<double> weights{148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236};
  const auto sw = learn::shapiro_wilk(weights);
  c.near(sw.w, 0.79, kStatTableTol, "Shapiro-Wilk W");
  c.near(sw.p_value, 0.0067, kStatTableTol, "Shapiro-Wilk p");

  // Hollander and Wolfe depression data (n = 9): T+ = 40, two-sided p = 0.039.
  const std::vector<double> x{1.83, 0.50, 1.62, 2.48, 1.68, 1.88, 1.55, 3.06, 1.30};
  const std::vector<double> y{0.878, 0.647, 0.598, 2.05, 1.06, 1.29, 1.06, 3.14, 1.29};
  const auto w = learn::wilcoxon_signed_rank(x, y);
  c.expect(w.w_plus == 40.0, "Wilcoxon T+ = 40");
  c.near(w.p_value, 0.039, kStatTableTol, "Wilcoxon p (n = 9)");

  // Darwin's Zea mays differences (n = 15): T- = 24, two-sided p = 0.041.
  const std::vector<double> darwin{6, 8, 14, 16, 23, 24, 28, 29, 41, -48, 49, 56, 60, -67, 75};
  const auto dw = learn::wilcoxon_signed_rank(darwin, std::vector<double>(darwin.size(), 0.0));
  c.expect(dw.w_minus == 24.0, "Wilcoxon T- = 24");
  c.near(dw.p_value, 0.041, kStatTableTol, "Wilcoxon p (n = 15)");

  const std::vector<double> same{0.81, 0.77, 0.9, 0.85};
  c.expect(learn::wilcoxon_signed_rank(same, same).p_value == 1.0, "identical vectors give p = 1");
  c.expect(learn::compare(same, same).p_value == 1.0, "compare on identical vectors gives p = 1");
}

// ---- AC8 ----

void golden_run(Check& c) {
  testing::TempDir dir("golden");
  const std::string golden = CRA_GOLDEN_DIR;
  const std::string db = (dir / "cra.db").string();
  std::ostringstream out, err;
  auto cli = [&](std::vector<std::string> args) {
    args.insert(args.begin(), {"--store", db, "--data-dir", CRA_DATA_ROOT});
    out.str("");
    err.str("");
    return cli::run(args, out, err);
  };
  c.expect(cli({"import", golden + "/fixture.json"}) == 0, "import: " + err.str());
  c.expect(cli({"predict", "--model", golden + "/trigger_tree.cra", "--all-unpredicted"}) == 0, "predict: " + err.str());
  c.expect(cli({"rank", "--from", "2024-01-01", "--to", "2024-03-01", "--key", "RI", "--csv"}) == 0, "rank");
  c.expect(out.str() == testing::read_file(golden + "/rank_ri.csv"), "rank CSV byte-for-byte");

  store::Store store(db);
  api::ApiConfig config;
  config.session_secret = "acceptance";
  api::Service service(store, config);
  const auto r = service.handle({"GET", "/api/dashboard", {{"from", "2024-01-01"}, {"to", "2024-03-01"}}, {}, ""});
  c.expect(r.status == 200, "dashboard status");
  c.expect(nlohmann::json::parse(r.body) ==
               nlohmann::json::parse(testing::read_file(golden + "/dashboard_2024-01_2024-03.json")),
           "dashboard JSON equals golden");
  c.note("no dashboard component is built or needed");
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<void(Check&)> run;
  double max_seconds = 0.0;  // 0: no limit
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"AC1", "metric oracle for the six worked reviewer profiles", worked_profiles, kProfilesSeconds},
      {"AC2", "RF on 2000 synthetic comments: accuracy >= 0.85, minority F1 margin >= 0.40", classifier_property,
       kClassifierSeconds},
      {"AC3", "evaluation protocol: 200 fold rows, stratified, shared folds, no SMOTE leak", protocol},
      {"AC4", "SMOTE: balanced, convex combinations of minority pairs, deterministic", smote_properties},
      {"AC5", "feature oracle table", feature_oracles},
      {"AC6", "selection: duplicate pruned, noise eliminated, survivors below |r| 0.9", selection_pipeline},
      {"AC7", "Wilcoxon and Shapiro-Wilk against table values", statistics},
      {"AC8", "golden import -> predict -> rank CSV and dashboard JSON", golden_run},
  };
  int failed = 0;
  for (const auto& criterion : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("threw: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criterion.max_seconds > 0.0) {
      std::ostringstream s;
      s << "runtime " << seconds << " s exceeds " << criterion.max_seconds << " s";
      check.expect(seconds < criterion.max_seconds, s.str());
    }
    failed += check.passed() ? 0 : 1;
    std::cout << criterion.id << " " << (check.passed() ? "PASS" : "FAIL") << " " << criterion.title << " ("
              << check.total() << " checks, " << std::fixed << std::setprecision(2) << seconds << " s)";
    for (const auto& n : check.notes()) std::cout << " [" << n << "]";
    std::cout << "\n";
    for (const auto& f : check.failures()) std::cout << "    " << f << "\n";
    std::cout.unsetf(std::ios::fixed);
  }
  return failed == 0 ? 0 : 1;
}
