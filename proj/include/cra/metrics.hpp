#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cra/model.hpp"
#include "cra/time.hpp"

namespace cra::metrics {

/// 0 when nc is 0.
double cud(int uc, int nc);
/// 0 when nr is 0.
double issue_density(int uc, int nr);
/// log2(nr + 1) * (cud + issue_density), unrounded.
double review_efficiency(int nr, int nc, int uc);
/// 10 nr + 17 uc - 2 nc.
long long review_impact(int nr, int nc, int uc);

struct Counts {
  int nr = 0;
  int nc = 0;
  int uc = 0;
  friend bool operator==(const Counts&, const Counts&) = default;
};

/// comment_id -> useful. Build with merge_verdicts so labels win.
using VerdictMap = std::map<std::string, bool, std::less<>>;

/// Human labels override model predictions for the same comment.
VerdictMap merge_verdicts(const VerdictMap& predictions, const VerdictMap& labels);

/// Comments the developer wrote in `period` on changes they did not author.
/// A comment without a verdict counts toward NC but never UC.
Counts aggregate(std::span<const ReviewChange> changes, const VerdictMap& verdicts, std::string_view developer_id,
                 Period period);
/// Same counts for all reviewer comments on one project's changes. NR is
/// the number of distinct changes that received any.
Counts aggregate_project(std::span<const ReviewChange> changes, const VerdictMap& verdicts,
                         std::string_view project_id, Period period);

/// Per reviewer or per project, depending on how it was built.
struct PeriodMetrics {
  std::string entity_id;
  Period period;
  int nr = 0;
  int nc = 0;
  int uc = 0;
  double cud = 0.0;
  double id = 0.0;
  double re = 0.0;
  long long ri = 0;
  int nc_score = 0;
  int cud_score = 0;
  int review_score = 0;

  static PeriodMetrics from_counts(std::string entity_id, Period period, Counts counts);
};

/// One row per developer (or project) with at least one counted comment,
/// ordered by id.
std::vector<PeriodMetrics> reviewer_metrics(std::span<const ReviewChange> changes, const VerdictMap& verdicts,
                                            Period period);
std::vector<PeriodMetrics> project_metrics(std::span<const ReviewChange> changes, const VerdictMap& verdicts,
                                           Period period);

inline constexpr int kLegacyCutoff = 30;

/// Fills nc_score, cud_score and review_score: N + 1 - position when the
/// position is at most N, else 0. Positions use competition ranking.
void legacy_scores(std::vector<PeriodMetrics>& rows, int n = kLegacyCutoff);

enum class RankKey { RI, RE, NC, CUD, review_score };
std::string_view to_string(RankKey key);
std::optional<RankKey> parse_rank_key(std::string_view text);
double key_value(const PeriodMetrics& m, RankKey key);

struct RankingEntry {
  std::string entity_id;
  double value = 0.0;
  /// Competition ranking: ties share a rank and the next rank skips.
  int rank = 0;
  friend bool operator==(const RankingEntry&, const RankingEntry&) = default;
};

struct RankingResult {
  RankKey key = RankKey::RI;
  int n = kLegacyCutoff;
  std::vector<RankingEntry> entries;
};

/// Descending by key, ties by id.
RankingResult rank(std::span<const PeriodMetrics> rows, RankKey key, int n = kLegacyCutoff);
/// `rows` reordered to match `ranking`.
std::vector<PeriodMetrics> in_rank_order(std::span<const PeriodMetrics> rows, const RankingResult& ranking);

/// Header then one line per row, fields in declaration order; `id_column`
/// names the first column.
std::string to_csv(std::span<const PeriodMetrics> rows, std::string_view id_column = "developer_id");

}  // namespace cra::metrics
