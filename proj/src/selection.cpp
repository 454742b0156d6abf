#include "cra/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cra/cv.hpp"
#include "cra/error.hpp"
#include "cra/rng.hpp"

namespace cra::features {

namespace {

using nlohmann::json;

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

bool constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<std::string> without(const std::vector<std::string>& all, const std::set<std::string>& removed) {
  std::vector<std::string> out;
  for (const auto& name : all) {
    if (!removed.contains(name)) out.push_back(name);
  }
  return out;
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "correlated columns differ in length");
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double point_biserial(std::span<const double> x, std::span<const int> y) {
  std::vector<double> yd(y.begin(), y.end());
  return pearson(x, yd);
}

FeatureSelection drop_correlated(const learn::Matrix& x, std::span<const std::string> names, std::span<const int> y,
                                 double threshold) {
  const std::size_t p = x.cols();
  if (names.size() != p) throw Error(ErrorCode::LengthMismatch, "feature names do not match matrix columns");
  if (y.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "labels do not match matrix rows");
  if (x.rows() < 2) throw Error(ErrorCode::TooFewSamples, "correlation needs at least two rows");
  for (int label : y) {
    if (label != 0 && label != 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
  }

  FeatureSelection out;
  out.all_features.assign(names.begin(), names.end());
  std::vector<std::vector<double>> cols(p);
  std::vector<double> label_r(p, 0.0);
  std::vector<bool> live(p, true);
  for (std::size_t j = 0; j < p; ++j) {
    cols[j] = x.column(j);
    if (constant(cols[j])) {
      live[j] = false;
      out.correlation_drops.push_back({names[j], "zero_variance", "", 0.0, 0.0, 0.0});
      continue;
    }
    label_r[j] = point_biserial(cols[j], y);
  }

  std::vector<std::size_t> parent(p);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::vector<double>> r(p, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    if (!live[i]) continue;
    for (std::size_t j = i + 1; j < p; ++j) {
      if (!live[j]) continue;
      r[i][j] = r[j][i] = pearson(cols[i], cols[j]);
      if (std::abs(r[i][j]) >= threshold) parent[find_root(parent, j)] = find_root(parent, i);
    }
  }

  std::vector<std::vector<std::size_t>> groups(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (live[j]) groups[find_root(parent, j)].push_back(j);
  }
  std::set<std::string> dropped;
  for (const auto& d : out.correlation_drops) dropped.insert(d.feature);
  for (const auto& group : groups) {
    if (group.size() < 2) continue;
    std::size_t keep = group.front();
    for (std::size_t j : group) {
      if (std::abs(label_r[j]) > std::abs(label_r[keep])) keep = j;
    }
    for (std::size_t j : group) {
      if (j == keep) continue;
      out.correlation_drops.push_back({names[j], "correlated", names[keep], r[j][keep], label_r[j], label_r[keep]});
      dropped.insert(names[j]);
    }
  }
  out.kept_after_correlation = without(out.all_features, dropped);
  out.final_selected = out.kept_after_correlation;
  return out;
}

learn::AlgorithmConfig RfeConfig::rfe_estimator() {
  learn::AlgorithmConfig c = learn::AlgorithmConfig::defaults(learn::Algorithm::random_forest);
  c.n_trees = 50;
  return c;
}

FeatureSelection rfe_cv(const learn::Matrix& x, std::span<const FeatureUnit> units, std::span<const int> y,
                        const RfeConfig& config) {
  if (y.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "labels do not match matrix rows");
  if (units.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to eliminate");
  if (config.folds < 2 || x.rows() < static_cast<std::size_t>(config.folds)) {
    throw Error(ErrorCode::TooFewSamples, "fewer rows than folds");
  }
  for (const auto& unit : units) {
    for (std::size_t c : unit.columns) {
      if (c >= x.cols()) throw Error(ErrorCode::DimensionMismatch, "unit '" + unit.name + "' column out of range");
    }
  }

  const learn::CvConfig cv{config.repeats, config.folds, config.seed, config.oversample, 5};
  FeatureSelection out;
  for (const auto& unit : units) out.all_features.push_back(unit.name);
  out.kept_after_correlation = out.all_features;

  std::vector<std::size_t> current(units.size());
  std::iota(current.begin(), current.end(), 0);
  std::size_t best_step = 0;
  for (std::size_t round = 0;; ++round) {
    std::vector<std::size_t> columns;
    RfeStep step;
    for (std::size_t u : current) {
      step.features.push_back(units[u].name);
      columns.insert(columns.end(), units[u].columns.begin(), units[u].columns.end());
    }
    const learn::Matrix sub = x.select_cols(columns);
    step.mean_f1 = mean_of(learn::cross_validate(sub, y, config.estimator, cv).minority_f1());
    // Rounds shrink the set, so ">=" hands ties to the smaller one.
    if (round == 0 || step.mean_f1 >= out.rfe_steps[best_step].mean_f1) best_step = round;

    if (current.size() == 1) {
      out.rfe_steps.push_back(std::move(step));
      break;
    }
    const learn::Classifier fit = learn::train(config.estimator, sub, y, derive_seed(config.seed, 0x5fe, round));
    std::size_t offset = 0;
    std::size_t weakest = 0;
    double weakest_importance = 0.0;
    for (std::size_t k = 0; k < current.size(); ++k) {
      const std::size_t width = units[current[k]].columns.size();
      double importance = 0.0;
      for (std::size_t c = 0; c < width; ++c) importance += fit.importance()[offset + c];
      offset += width;
      if (k == 0 || importance <= weakest_importance) {
        weakest = k;
        weakest_importance = importance;
      }
    }
    step.dropped = units[current[weakest]].name;
    step.dropped_importance = weakest_importance;
    out.rfe_steps.push_back(std::move(step));
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(weakest));
  }
  out.final_selected = out.rfe_steps[best_step].features;
  return out;
}

FeatureSelection select_features(std::span<const FeatureVector> vectors, std::span<const int> y,
                                 std::size_t vocabulary_size, const SelectionConfig& config) {
  if (vectors.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "labels do not match feature vectors");
  const DesignLayout scalars_only = DesignLayout::all(0);
  const auto names = scalars_only.feature_ids();
  FeatureSelection stage1 =
      drop_correlated(design_matrix(vectors, scalars_only), names, y, config.correlation_threshold);

  std::vector<std::string> candidates = stage1.kept_after_correlation;
  if (vocabulary_size > 0) candidates.insert(candidates.begin(), std::string(kMessageFeature));
  const DesignLayout layout = DesignLayout::from_feature_ids(candidates, vocabulary_size);

  std::vector<FeatureUnit> units;
  for (std::size_t i = 0; i < layout.scalars.size(); ++i) {
    units.push_back({std::string(scalar_name(layout.scalars[i])), {i}});
  }
  if (layout.message) {
    FeatureUnit message{std::string(kMessageFeature), {}};
    for (std::size_t i = 0; i < vocabulary_size; ++i) message.columns.push_back(layout.scalars.size() + i);
    units.push_back(std::move(message));
  }
  if (units.empty()) throw Error(ErrorCode::InvalidArgument, "every feature was dropped as degenerate");

  const FeatureSelection stage2 = rfe_cv(design_matrix(vectors, layout), units, y, config.rfe);
  FeatureSelection out;
  out.all_features = names;
  if (vocabulary_size > 0) out.all_features.insert(out.all_features.begin(), std::string(kMessageFeature));
  out.kept_after_correlation = without(out.all_features, [&] {
    std::set<std::string> s;
    for (const auto& d : stage1.correlation_drops) s.insert(d.feature);
    return s;
  }());
  out.correlation_drops = std::move(stage1.correlation_drops);
  out.rfe_steps = stage2.rfe_steps;
  const std::set<std::string> chosen(stage2.final_selected.begin(), stage2.final_selected.end());
  for (const auto& name : out.all_features) {
    if (chosen.contains(name)) out.final_selected.push_back(name);
  }
  return out;
}

FeatureSelection FeatureSelection::replay() const {
  FeatureSelection r = *this;
  std::set<std::string> dropped;
  for (const auto& d : correlation_drops) dropped.insert(d.feature);
  r.kept_after_correlation = without(all_features, dropped);
  if (rfe_steps.empty()) {
    r.final_selected = r.kept_after_correlation;
    return r;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rfe_steps.size(); ++i) {
    if (rfe_steps[i].mean_f1 >= rfe_steps[best].mean_f1) best = i;
  }
  const std::set<std::string> chosen(rfe_steps[best].features.begin(), rfe_steps[best].features.end());
  r.final_selected.clear();
  for (const auto& name : all_features) {
    if (chosen.contains(name)) r.final_selected.push_back(name);
  }
  return r;
}

json FeatureSelection::to_json() const {
  json drops = json::array();
  for (const auto& d : correlation_drops) {
    drops.push_back({{"feature", d.feature},
                     {"reason", d.reason},
                     {"kept_instead", d.kept_instead},
                     {"pearson_r", d.pearson_r},
                     {"label_r_dropped", d.label_r_dropped},
                     {"label_r_kept", d.label_r_kept}});
  }
  json steps = json::array();
  for (const auto& s : rfe_steps) {
    steps.push_back({{"features", s.features},
                     {"mean_f1", s.mean_f1},
                     {"dropped", s.dropped},
                     {"dropped_importance", s.dropped_importance}});
  }
  return {{"all_features", all_features},
          {"kept_after_correlation", kept_after_correlation},
          {"final_selected", final_selected},
          {"correlation_drops", drops},
          {"rfe_steps", steps}};
}

FeatureSelection FeatureSelection::from_json(const json& j) {
  try {
    FeatureSelection s;
    s.all_features = j.at("all_features").get<std::vector<std::string>>();
    s.kept_after_correlation = j.at("kept_after_correlation").get<std::vector<std::string>>();
    s.final_selected = j.at("final_selected").get<std::vector<std::string>>();
    for (const auto& d : j.at("correlation_drops")) {
      s.correlation_drops.push_back({d.at("feature").get<std::string>(), d.at("reason").get<std::string>(),
                                     d.at("kept_instead").get<std::string>(), d.at("pearson_r").get<double>(),
                                     d.at("label_r_dropped").get<double>(), d.at("label_r_kept").get<double>()});
    }
    for (const auto& st : j.at("rfe_steps")) {
      s.rfe_steps.push_back({st.at("features").get<std::vector<std::string>>(), st.at("mean_f1").get<double>(),
                             st.at("dropped").get<std::string>(), st.at("dropped_importance").get<double>()});
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("feature selection: ") + e.what());
  }
}

}  // namespace cra::features
