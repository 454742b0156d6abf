#pragma once

#include <span>
#include <string_view>

namespace cra::learn {

struct ShapiroResult {
  double w = 1.0;
  double p_value = 1.0;
};

/// Shapiro-Wilk normality test (Royston's approximation), 3 <= n <= 5000.
/// A sample with zero range reports w = 1, p = 1.
ShapiroResult shapiro_wilk(std::span<const double> sample);

struct WilcoxonResult {
  /// Rank sums of positive and negative differences.
  double w_plus = 0.0;
  double w_minus = 0.0;
  /// Non-zero differences used.
  int n = 0;
  double p_value = 1.0;
  bool exact = false;
};

/// Two-sided paired signed-rank test. Zero differences are dropped and tied
/// magnitudes get average ranks. Exact null distribution when n <= 25 and no
/// ties; otherwise the normal approximation with continuity and tie
/// correction. All-zero differences give p = 1.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

struct StatTestResult {
  double shapiro_p_a = 1.0;
  double shapiro_p_b = 1.0;
  std::string_view test_used = "wilcoxon_signed_rank";
  double p_value = 1.0;
  double mean_delta = 0.0;
  WilcoxonResult wilcoxon;
};

/// Throws LengthMismatch on unequal lengths.
StatTestResult compare(std::span<const double> scores_a, std::span<const double> scores_b);

}  // namespace cra::learn
