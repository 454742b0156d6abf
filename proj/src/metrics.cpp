#include "cra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace cra::metrics {

namespace {

bool is_useful(const VerdictMap& verdicts, const std::string& comment_id) {
  const auto it = verdicts.find(comment_id);
  return it != verdicts.end() && it->second;
}

// Calls f(change, comment) for each reviewer comment written in the period.
template <typename F>
void for_each_review_comment(std::span<const ReviewChange> changes, Period period, F&& f) {
  for (const auto& change : changes) {
    for (const auto& thread : change.threads) {
      for (const auto& comment : thread.comments) {
        if (comment.author_id == change.author_id || !period.contains(comment.written_at)) continue;
        f(change, comment);
      }
    }
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Competition rank of each row under `value`, descending.
std::vector<int> competition_ranks(const std::vector<double>& values) {
  std::vector<int> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    int above = 0;
    for (double v : values) above += v > values[i];
    ranks[i] = above + 1;
  }
  return ranks;
}

}  // namespace

double cud(int uc, int nc) { return nc == 0 ? 0.0 : static_cast<double>(uc) / nc; }
double issue_density(int uc, int nr) { return nr == 0 ? 0.0 : static_cast<double>(uc) / nr; }
double review_efficiency(int nr, int nc, int uc) {
  return std::log2(static_cast<double>(nr) + 1.0) * (cud(uc, nc) + issue_density(uc, nr));
}
long long review_impact(int nr, int nc, int uc) { return 10LL * nr + 17LL * uc - 2LL * nc; }

VerdictMap merge_verdicts(const VerdictMap& predictions, const VerdictMap& labels) {
  VerdictMap out = predictions;
  for (const auto& [id, useful] : labels) out[id] = useful;
  return out;
}

Counts aggregate(std::span<const ReviewChange> changes, const VerdictMap& verdicts, std::string_view developer_id,
                 Period period) {
  Counts c;
  std::set<std::string_view> reviewed;
  for_each_review_comment(changes, period, [&](const ReviewChange& change, const ReviewComment& comment) {
    if (comment.author_id != developer_id) return;
    reviewed.insert(change.change_id);
    ++c.nc;
    c.uc += is_useful(verdicts, comment.comment_id);
  });
  c.nr = static_cast<int>(reviewed.size());
  return c;
}

Counts aggregate_project(std::span<const ReviewChange> changes, const VerdictMap& verdicts,
                         std::string_view project_id, Period period) {
  Counts c;
  std::set<std::string_view> reviewed;
  for_each_review_comment(changes, period, [&](const ReviewChange& change, const ReviewComment& comment) {
    if (change.project_id != project_id) return;
    reviewed.insert(change.change_id);
    ++c.nc;
    c.uc += is_useful(verdicts, comment.comment_id);
  });
  c.nr = static_cast<int>(reviewed.size());
  return c;
}

PeriodMetrics PeriodMetrics::from_counts(std::string entity_id, Period period, Counts counts) {
  PeriodMetrics m;
  m.entity_id = std::move(entity_id);
  m.period = period;
  m.nr = counts.nr;
  m.nc = counts.nc;
  m.uc = counts.uc;
  m.cud = metrics::cud(counts.uc, counts.nc);
  m.id = issue_density(counts.uc, counts.nr);
  m.re = review_efficiency(counts.nr, counts.nc, counts.uc);
  m.ri = review_impact(counts.nr, counts.nc, counts.uc);
  return m;
}

std::vector<PeriodMetrics> reviewer_metrics(std::span<const ReviewChange> changes, const VerdictMap& verdicts,
                                            Period period) {
  std::set<std::string> ids;
  for_each_review_comment(changes, period, [&](const ReviewChange&, const ReviewComment& c) { ids.insert(c.author_id); });
  std::vector<PeriodMetrics> out;
  for (const auto& id : ids) out.push_back(PeriodMetrics::from_counts(id, period, aggregate(changes, verdicts, id, period)));
  legacy_scores(out);
  return out;
}

std::vector<PeriodMetrics> project_metrics(std::span<const ReviewChange> changes, const VerdictMap& verdicts,
                                           Period period) {
  std::set<std::string> ids;
  for_each_review_comment(changes, period, [&](const ReviewChange& ch, const ReviewComment&) { ids.insert(ch.project_id); });
  std::vector<PeriodMetrics> out;
  for (const auto& id : ids) {
    out.push_back(PeriodMetrics::from_counts(id, period, aggregate_project(changes, verdicts, id, period)));
  }
  legacy_scores(out);
  return out;
}

void legacy_scores(std::vector<PeriodMetrics>& rows, int n) {
  std::vector<double> nc, cud_values;
  for (const auto& r : rows) {
    nc.push_back(r.nc);
    cud_values.push_back(r.cud);
  }
  const auto nc_rank = competition_ranks(nc);
  const auto cud_rank = competition_ranks(cud_values);
  const auto score = [n](int position) { return position <= n ? n + 1 - position : 0; };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].nc_score = score(nc_rank[i]);
    rows[i].cud_score = score(cud_rank[i]);
    rows[i].review_score = rows[i].nc_score + rows[i].cud_score;
  }
}

std::string_view to_string(RankKey key) {
  switch (key) {
    case RankKey::RI: return "RI";
    case RankKey::RE: return "RE";
    case RankKey::NC: return "NC";
    case RankKey::CUD: return "CUD";
    case RankKey::review_score: return "review_score";
  }
  return "RI";
}

std::optional<RankKey> parse_rank_key(std::string_view text) {
  for (RankKey k : {RankKey::RI, RankKey::RE, RankKey::NC, RankKey::CUD, RankKey::review_score}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

double key_value(const PeriodMetrics& m, RankKey key) {
  switch (key) {
    case RankKey::RI: return static_cast<double>(m.ri);
    case RankKey::RE: return m.re;
    case RankKey::NC: return m.nc;
    case RankKey::CUD: return m.cud;
    case RankKey::review_score: return m.review_score;
  }
  return 0.0;
}

RankingResult rank(std::span<const PeriodMetrics> rows, RankKey key, int n) {
  RankingResult out;
  out.key = key;
  out.n = n;
  for (const auto& r : rows) out.entries.push_back({r.entity_id, key_value(r, key), 0});
  std::sort(out.entries.begin(), out.entries.end(), [](const RankingEntry& a, const RankingEntry& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.entity_id < b.entity_id;
  });
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    const bool tied = i > 0 && out.entries[i].value == out.entries[i - 1].value;
    out.entries[i].rank = tied ? out.entries[i - 1].rank : static_cast<int>(i) + 1;
  }
  return out;
}

std::vector<PeriodMetrics> in_rank_order(std::span<const PeriodMetrics> rows, const RankingResult& ranking) {
  std::vector<PeriodMetrics> out;
  for (const auto& e : ranking.entries) {
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const PeriodMetrics& m) { return m.entity_id == e.entity_id; });
    if (it != rows.end()) out.push_back(*it);
  }
  return out;
}

std::string to_csv(std::span<const PeriodMetrics> rows, std::string_view id_column) {
  std::string out = std::string(id_column) +
                    ",period_from,period_to,NR,NC,UC,CUD,ID,RE,RI,NC_score,CUD_score,review_score\n";
  for (const auto& r : rows) {
    out += r.entity_id + "," + format_timestamp(r.period.from) + "," + format_timestamp(r.period.to) + "," +
           std::to_string(r.nr) + "," + std::to_string(r.nc) + "," + std::to_string(r.uc) + "," + fixed(r.cud, 4) +
           "," + fixed(r.id, 4) + "," + fixed(r.re, 4) + "," + std::to_string(r.ri) + "," +
           std::to_string(r.nc_score) + "," + std::to_string(r.cud_score) + "," + std::to_string(r.review_score) +
           "\n";
  }
  return out;
}

}  // namespace cra::metrics
