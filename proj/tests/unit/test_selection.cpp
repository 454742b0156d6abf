#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cra/error.hpp"
#include "cra/rng.hpp"
#include "cra/selection.hpp"

using namespace cra;
using namespace cra::features;
using cra::learn::Matrix;

namespace {

// Textbook two-pass Pearson, kept separate from the library's version.
double oracle_r(const std::vector<double>& a, const std::vector<double>& b) {
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
  return cov / std::sqrt(va * vb);
}

Matrix from_columns(const std::vector<std::vector<double>>& cols) {
  Matrix m(cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < cols[j].size(); ++i) m(i, j) = cols[j][i];
  }
  return m;
}

std::vector<FeatureUnit> single_units(const std::vector<std::string>& names) {
  std::vector<FeatureUnit> units;
  for (std::size_t i = 0; i < names.size(); ++i) units.push_back({names[i], {i}});
  return units;
}

RfeConfig quick_rfe() {
  RfeConfig c;
  c.folds = 5;
  c.estimator.n_trees = 25;
  c.seed = 9;
  return c;
}

}  // namespace

TEST_CASE("pearson and point-biserial agree with the oracle") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> a(50), b(50);
  std::vector<int> y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    a[i] = g(rng);
    b[i] = 0.5 * a[i] + g(rng);
    y[i] = b[i] > 0 ? 1 : 0;
  }
  CHECK(pearson(a, b) == doctest::Approx(oracle_r(a, b)).epsilon(1e-12));
  const std::vector<double> yd(y.begin(), y.end());
  CHECK(point_biserial(a, y) == doctest::Approx(oracle_r(a, yd)).epsilon(1e-12));
  CHECK(pearson(a, a) == doctest::Approx(1.0));
  CHECK(pearson(std::vector<double>(50, 2.0), b) == 0.0);
}

TEST_CASE("a near-duplicate feature loses to the original") {
  std::normal_distribution<double> g;
  std::mt19937_64 noise_rng(4);
  const std::size_t n = 200;
  std::vector<double> a(n), b(n), c(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = g(noise_rng);
    b[i] = a[i] + 0.05 * g(noise_rng);
    c[i] = g(noise_rng);
    y[i] = a[i] > 0.2 ? 1 : 0;
  }
  const std::vector<double> yd(y.begin(), y.end());
  const bool a_stronger = std::abs(oracle_r(a, yd)) > std::abs(oracle_r(b, yd));
  REQUIRE(a_stronger);
  REQUIRE(std::abs(oracle_r(a, b)) >= 0.9);
  // Both orders of the pair, so the winner is not just the earlier column.
  for (bool b_first : {false, true}) {
    const std::vector<std::string> names = b_first ? std::vector<std::string>{"B", "A", "C"}
                                                   : std::vector<std::string>{"A", "B", "C"};
    const Matrix x = b_first ? from_columns({b, a, c}) : from_columns({a, b, c});
    const FeatureSelection s = drop_correlated(x, names, y);
    REQUIRE(s.correlation_drops.size() == 1);
    const CorrelationDrop& d = s.correlation_drops[0];
    CHECK(d.feature == "B");
    CHECK(d.kept_instead == "A");
    CHECK(d.reason == "correlated");
    CHECK(d.pearson_r == doctest::Approx(oracle_r(a, b)));
    CHECK(d.label_r_dropped == doctest::Approx(oracle_r(b, yd)));
    CHECK(d.label_r_kept == doctest::Approx(oracle_r(a, yd)));
    CHECK(std::find(s.kept_after_correlation.begin(), s.kept_after_correlation.end(), "A") !=
          s.kept_after_correlation.end());
    CHECK(s.kept_after_correlation.size() == 2);
  }
}

TEST_CASE("uncorrelated features are all kept and constants are dropped") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> cols(4, std::vector<double>(100));
  std::vector<int> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    for (std::size_t j = 0; j < 3; ++j) cols[j][i] = g(rng);
    cols[3][i] = 7.0;
    y[i] = static_cast<int>(i % 2);
  }
  const std::vector<std::string> names{"x0", "x1", "x2", "flat"};
  const FeatureSelection s = drop_correlated(from_columns(cols), names, y);
  CHECK(s.kept_after_correlation == std::vector<std::string>{"x0", "x1", "x2"});
  REQUIRE(s.correlation_drops.size() == 1);
  CHECK(s.correlation_drops[0].feature == "flat");
  CHECK(s.correlation_drops[0].reason == "zero_variance");
}

TEST_CASE("identical copies collapse to one feature") {
  std::vector<double> base{1, 4, 2, 8, 5, 7, 3, 6, 9, 0};
  std::vector<int> y{0, 1, 0, 1, 1, 1, 0, 1, 1, 0};
  const std::vector<std::string> names{"c0", "c1", "c2", "c3"};
  const FeatureSelection s = drop_correlated(from_columns({base, base, base, base}), names, y);
  CHECK(s.kept_after_correlation == std::vector<std::string>{"c0"});
  CHECK(s.correlation_drops.size() == 3);
}

TEST_CASE("no surviving pair reaches the threshold") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  for (int round = 0; round < 30; ++round) {
    const std::size_t p = 8, n = 60;
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      cols[0][i] = g(rng);
      y[i] = g(rng) > 0 ? 1 : 0;
    }
    // Each later column leans on an earlier one by a random amount, giving
    // chains and clusters of varying strength.
    for (std::size_t j = 1; j < p; ++j) {
      const std::size_t src = static_cast<std::size_t>(mix(rng) * static_cast<double>(j));
      const double w = mix(rng);
      for (std::size_t i = 0; i < n; ++i) cols[j][i] = w * cols[src][i] + (1.0 - w) * 0.3 * g(rng);
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));
    const FeatureSelection s = drop_correlated(from_columns(cols), names, y);
    for (std::size_t a = 0; a < s.kept_after_correlation.size(); ++a) {
      for (std::size_t b = a + 1; b < s.kept_after_correlation.size(); ++b) {
        const auto ia = static_cast<std::size_t>(std::stoi(s.kept_after_correlation[a].substr(1)));
        const auto ib = static_cast<std::size_t>(std::stoi(s.kept_after_correlation[b].substr(1)));
        CHECK(std::abs(oracle_r(cols[ia], cols[ib])) < 0.9);
      }
    }
    CHECK(s.replay() == s);
    CHECK(s.kept_after_correlation.size() + s.correlation_drops.size() == p);
  }
}

TEST_CASE("drop_correlated input errors") {
  const Matrix x(1, 2);
  const std::vector<std::string> names{"a", "b"};
  const std::vector<int> one{1};
  CHECK_THROWS_AS(drop_correlated(x, names, one), Error);
  const Matrix two(2, 2);
  const std::vector<int> bad{0, 2};
  CHECK_THROWS_AS(drop_correlated(two, names, bad), Error);
  const std::vector<std::string> short_names{"a"};
  const std::vector<int> ok{0, 1};
  CHECK_THROWS_AS(drop_correlated(two, short_names, ok), Error);
}

TEST_CASE("rfe removes an injected noise feature") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> bit(0, 1);
  std::normal_distribution<double> g;
  const std::size_t n = 160;
  std::vector<std::vector<double>> cols(3, std::vector<double>(n));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    cols[0][i] = bit(rng);
    cols[1][i] = bit(rng);
    cols[2][i] = g(rng);
    y[i] = cols[0][i] == 1.0 && cols[1][i] == 1.0 ? 1 : 0;
  }
  const std::vector<std::string> names{"s1", "s2", "noise"};
  const auto units = single_units(names);
  const FeatureSelection s = rfe_cv(from_columns(cols), units, y, quick_rfe());
  CHECK(s.final_selected == std::vector<std::string>{"s1", "s2"});
  REQUIRE(s.rfe_steps.size() == 3);
  CHECK(s.rfe_steps[0].dropped == "noise");
  CHECK(s.rfe_steps[1].mean_f1 >= s.rfe_steps[0].mean_f1);
  CHECK(s.rfe_steps[2].dropped.empty());
  CHECK(s.replay() == s);
  CHECK(FeatureSelection::from_json(s.to_json()) == s);
  CHECK(rfe_cv(from_columns(cols), units, y, quick_rfe()) == s);
}

TEST_CASE("rfe keeps a lone informative feature") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  const std::size_t n = 150;
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : cols) c[i] = g(rng);
    y[i] = cols[2][i] > 0.4 ? 1 : 0;
  }
  const std::vector<std::string> names{"n0", "n1", "signal", "n3"};
  const FeatureSelection s = rfe_cv(from_columns(cols), single_units(names), y, quick_rfe());
  CHECK(s.final_selected == std::vector<std::string>{"signal"});
}

TEST_CASE("rfe treats a multi-column unit as one feature") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  const std::size_t n = 120;
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : cols) c[i] = g(rng);
    y[i] = cols[1][i] + cols[2][i] > 0.5 ? 1 : 0;
  }
  const std::vector<FeatureUnit> units{{"lone", {0}}, {"block", {1, 2}}, {"other", {3}}};
  const FeatureSelection s = rfe_cv(from_columns(cols), units, y, quick_rfe());
  CHECK(s.rfe_steps.size() == 3);
  CHECK(std::find(s.final_selected.begin(), s.final_selected.end(), "block") != s.final_selected.end());
  for (const auto& step : s.rfe_steps) CHECK(step.dropped != "block");
}

TEST_CASE("rfe input errors") {
  const Matrix x(4, 1);
  const std::vector<int> y{0, 1, 0, 1};
  const std::vector<FeatureUnit> units{{"a", {0}}};
  CHECK_THROWS_AS(rfe_cv(x, units, y, quick_rfe()), Error);
  try {
    rfe_cv(x, units, y, quick_rfe());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
  const std::vector<FeatureUnit> out_of_range{{"a", {3}}};
  const Matrix big(20, 1);
  std::vector<int> y20(20);
  for (std::size_t i = 0; i < 20; ++i) y20[i] = static_cast<int>(i % 2);
  CHECK_THROWS_AS(rfe_cv(big, out_of_range, y20, quick_rfe()), Error);
}

TEST_CASE("select_features is reproducible and nests its sets") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  const std::size_t n = 100;
  std::vector<FeatureVector> vectors(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& fv = vectors[i];
    fv.message.dim = 2;
    const double signal = g(rng);
    fv[Scalar::readability] = signal;
    fv[Scalar::word_count] = signal * 2.0 + 1.0;
    fv[Scalar::gratitude] = g(rng) > 0 ? 1.0 : 0.0;
    if (i % 3 == 0) fv.message.entries = {{0, 1.0}};
    y[i] = signal > 0 ? 1 : 0;
  }
  SelectionConfig cfg;
  cfg.rfe = quick_rfe();
  const FeatureSelection a = select_features(vectors, y, 2, cfg);
  const FeatureSelection b = select_features(vectors, y, 2, cfg);
  CHECK(a == b);
  CHECK(a.all_features.size() == kScalarCount + 1);
  CHECK(a.all_features.front() == "message");
  // word_count is an exact affine copy of readability, so one of them goes.
  const bool one_of_pair =
      std::count(a.kept_after_correlation.begin(), a.kept_after_correlation.end(), "readability") +
          std::count(a.kept_after_correlation.begin(), a.kept_after_correlation.end(), "word_count") ==
      1;
  CHECK(one_of_pair);
  CHECK(std::find(a.kept_after_correlation.begin(), a.kept_after_correlation.end(), "message") !=
        a.kept_after_correlation.end());
  for (const auto& f : a.final_selected) {
    CHECK(std::find(a.kept_after_correlation.begin(), a.kept_after_correlation.end(), f) !=
          a.kept_after_correlation.end());
  }
  CHECK(a.replay() == a);
}
